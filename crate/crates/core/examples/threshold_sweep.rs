//! Lateral intention thresholds from 2 to 6 m: larger thresholds need
//! larger perturbations.
//!
//! cargo run --release --example threshold_sweep [scenarios]

use trajattack::criteria::{Objective, ThresholdConfig};
use trajattack::harness::{run_experiment, ExperimentConfig};
use trajattack::trajcore::Direction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenarios: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(20);
    println!(
        "{:>6} {:>6} {:>9} {:>10}",
        "theta", "ASR", "criterion", "mean dist"
    );
    for theta in [2.0, 3.0, 4.0, 5.0, 6.0] {
        let config = ExperimentConfig {
            objective: Objective::Intention(Direction::Left),
            thresholds: Some(ThresholdConfig {
                theta_int_lateral: theta,
                ..ThresholdConfig::NUSCENES_LIKE
            }),
            scenario_count: scenarios,
            ..ExperimentConfig::default()
        };
        let a = run_experiment(&config)?.aggregates;
        println!(
            "{theta:>6.1} {:>6.3} {:>9.3} {:>10.4}",
            a.asr,
            a.criterion_rate,
            a.mean_perturbation_distance.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
