//! Boundary walk against the three baselines on the same scenarios.
//!
//! The baselines search inside a box derived from a reference boundary walk,
//! so each of their scenarios costs two budgets.
//!
//! cargo run --release --example compare_baselines [scenarios] [budget]

use trajattack::harness::{run_experiment, AttackKind, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let scenarios: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let budget: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(500);

    println!(
        "{:<7} {:>6} {:>9} {:>10} {:>10} {:>9}",
        "attack", "ASR", "criterion", "mean dist", "closest", "queries"
    );
    for attack in [
        AttackKind::Dtp,
        AttackKind::Random,
        AttackKind::Simba,
        AttackKind::Pso,
    ] {
        let config = ExperimentConfig {
            attack,
            budget,
            scenario_count: scenarios,
            ..ExperimentConfig::default()
        };
        let report = run_experiment(&config)?;
        let a = &report.aggregates;
        let closest: Vec<f64> = report
            .records
            .iter()
            .filter_map(|r| r.min_adversarial_distance)
            .collect();
        let closest = closest.iter().sum::<f64>() / closest.len().max(1) as f64;
        println!(
            "{:<7} {:>6.3} {:>9.3} {:>10.4} {:>10.4} {:>9.1}",
            format!("{attack:?}").to_lowercase(),
            a.asr,
            a.criterion_rate,
            a.mean_perturbation_distance.unwrap_or(f64::NAN),
            closest,
            a.mean_queries
        );
    }
    Ok(())
}
