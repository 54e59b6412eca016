use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trajattack::attack::TracePoint;
use trajattack::criteria::Objective;
use trajattack::harness::{
    attack_scene, build_scenarios, emit_convergence_plot, emit_report, emit_report_plot,
    run_experiment, write_scenes_csv, AttackKind, DatasetSpec, ExperimentConfig, HarnessError,
    Report,
};
use trajattack::predictors::PredictorHandle;

#[derive(Parser)]
#[command(
    name = "trajattack",
    version,
    about = "Decision-based attacks on trajectory predictors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Attack the first scenario of the configured dataset and print the result.
    Attack(Common),
    /// Run every scenario and write the JSON report.
    Experiment(Common),
    /// Render best distance against queries from a report or a trace.
    Plot {
        /// Report JSON, or a JSON array of {query, distance} points.
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the configured synthetic scenarios as scene CSV.
    Gen(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, value_parser = parse_attack)]
    attack: Option<AttackKind>,
    #[arg(long, value_parser = parse_objective)]
    objective: Option<Objective>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_attack(s: &str) -> Result<AttackKind, String> {
    s.parse()
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    s.parse()
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
                serde_json::from_str(&text)?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(budget) = self.budget {
            config.budget = budget;
        }
        if let Some(attack) = self.attack {
            config.attack = attack;
        }
        if let Some(objective) = self.objective {
            config.objective = objective;
        }
        config.validate()?;
        Ok(config)
    }
}

fn io_error(path: &Path, e: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_error(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Attack(args) => {
            let mut config = args.config()?;
            config.scenario_count = 1;
            let (scene, seed) = build_scenarios(&config)?.remove(0);
            let predictor = PredictorHandle::from_spec(&config.predictor)?;
            let result = attack_scene(&config, &predictor, &scene, seed)?;
            let text = serde_json::to_string_pretty(&result)? + "\n";
            write_or_print(args.out.as_deref(), &text)
        }
        Command::Experiment(args) => {
            let config = args.config()?;
            let report = run_experiment(&config)?;
            let a = &report.aggregates;
            eprintln!(
                "{} scenarios, ASR {:.3}, criterion rate {:.3}, errors {}",
                a.scenarios, a.asr, a.criterion_rate, a.errors
            );
            match args.out {
                Some(path) => emit_report(&report, path),
                None => write_or_print(None, &(report.to_json()? + "\n")),
            }
        }
        Command::Plot { input, out } => {
            let text = std::fs::read_to_string(&input).map_err(|e| io_error(&input, e))?;
            if let Ok(trace) = serde_json::from_str::<Vec<TracePoint>>(&text) {
                emit_convergence_plot(&trace, out)
            } else {
                emit_report_plot(&Report::from_json(&text)?, out)
            }
        }
        Command::Gen(args) => {
            let config = args.config()?;
            if !matches!(config.dataset, DatasetSpec::Synthetic { .. }) {
                return Err(HarnessError::InvalidConfig(
                    "gen needs a synthetic dataset".into(),
                ));
            }
            let scenes: Vec<_> = build_scenarios(&config)?
                .into_iter()
                .map(|(s, _)| s)
                .collect();
            let mut buf = Vec::new();
            write_scenes_csv(&scenes, &mut buf)?;
            write_or_print(args.out.as_deref(), &String::from_utf8_lossy(&buf))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(HarnessError::InvalidConfig(msg)) => {
            eprintln!("error: invalid configuration: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
