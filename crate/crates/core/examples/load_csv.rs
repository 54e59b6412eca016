//! Write synthetic recordings as scene CSV, read them back as sliding
//! windows and attack a few windows with a least-squares predictor.
//!
//! cargo run --example load_csv [path.csv]

use trajattack::criteria::Objective;
use trajattack::harness::{
    generate_synthetic_scene_with, load_scenes, run_experiment, write_scenes_csv, DatasetSpec,
    ExperimentConfig, Style, SyntheticOptions, Template,
};
use trajattack::predictors::{PredictorKind, PredictorSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => dir.path().join("scenes.csv"),
    };

    // a window-length recording per template; parsing cuts each into one scene
    let options = SyntheticOptions {
        jitter: 0.05,
        ..SyntheticOptions::default()
    };
    let recordings = Template::DEFAULTS
        .iter()
        .enumerate()
        .map(|(i, t)| {
            generate_synthetic_scene_with(
                *t,
                Style::NuscenesLike,
                6.0 + i as f64,
                i as u64,
                &options,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    write_scenes_csv(&recordings, std::fs::File::create(&path)?)?;

    let scenes = load_scenes(&path, Style::NuscenesLike)?;
    println!("{} scenes from {}", scenes.len(), path.display());
    for s in &scenes {
        println!(
            "  {:<16} agents {} target {}",
            s.id,
            s.agent_count(),
            s.target()
        );
    }

    let config = ExperimentConfig {
        dataset: DatasetSpec::Csv { path },
        predictor: PredictorSpec::from(PredictorKind::LeastSquares { degree: 2 }),
        objective: Objective::FDE,
        scenario_count: scenes.len(),
        budget: 500,
        ..ExperimentConfig::default()
    };
    let report = run_experiment(&config)?;
    for r in &report.records {
        println!(
            "  {:<16} success {:<5} fde {:6.2} -> {:6.2}  distance {:.4}",
            r.scene_id, r.success, r.fde_normal, r.fde_attack, r.final_distance
        );
    }
    Ok(())
}
