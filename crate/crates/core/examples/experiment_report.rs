//! Full experiment from a JSON config: run, write the report, reload it and
//! plot every scenario's convergence.
//!
//! cargo run --release --example experiment_report [config.json] [out_dir]

use trajattack::harness::{
    emit_report, emit_report_plot, load_report, run_experiment, ExperimentConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let config: ExperimentConfig = match args.next() {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => serde_json::from_str(r#"{"scenario_count": 25, "budget": 600, "seed": 3}"#)?,
    };
    let out = std::path::PathBuf::from(
        args.next()
            .unwrap_or_else(|| "target/example_report".into()),
    );
    std::fs::create_dir_all(&out)?;

    let report = run_experiment(&config)?;
    emit_report(&report, out.join("report.json"))?;
    emit_report_plot(&report, out.join("convergence.svg"))?;

    let reloaded = load_report(out.join("report.json"))?;
    assert_eq!(reloaded, report);
    let a = &reloaded.aggregates;
    println!("scenarios {}  errors {}", a.scenarios, a.errors);
    println!("ASR {:.3}  criterion rate {:.3}", a.asr, a.criterion_rate);
    println!(
        "ADE {:.2} -> {:.2}  FDE {:.2} -> {:.2}",
        a.ade_normal.unwrap_or(f64::NAN),
        a.ade_attack.unwrap_or(f64::NAN),
        a.fde_normal.unwrap_or(f64::NAN),
        a.fde_attack.unwrap_or(f64::NAN)
    );
    println!(
        "miss rate {:.2} -> {:.2}  off-road {:.2} -> {:.2}",
        a.mr_normal.unwrap_or(f64::NAN),
        a.mr_attack.unwrap_or(f64::NAN),
        a.orr_normal.unwrap_or(f64::NAN),
        a.orr_attack.unwrap_or(f64::NAN)
    );
    println!("wrote {}", out.display());
    Ok(())
}
