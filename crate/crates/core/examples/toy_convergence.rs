//! Boundary walk against analytic regions where the optimum is known.
//!
//! cargo run --example toy_convergence [out.svg]

use trajattack::attack::toy::{Region, RegionOracle};
use trajattack::attack::{run_attack, run_attack_from, AttackParams, TracePoint};
use trajattack::harness::render_convergence_svg;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut traces: Vec<Vec<TracePoint>> = Vec::new();
    println!(
        "{:<12} {:>4} {:>10} {:>10} {:>8} {:>7}",
        "region", "dim", "optimum", "found", "rel err", "queries"
    );
    for dim in [2, 8, 24] {
        for (name, region) in [
            ("half-plane", Region::half_plane(dim, 1.0)),
            ("ball", Region::ball(dim, 3.0, 1.0)),
        ] {
            let mut oracle = RegionOracle::new(region, dim, 1000);
            let optimum = oracle.optimum_distance();
            let original = oracle.original().clone();
            // the far ball is out of reach of Gaussian initialization in high dimension
            let params = AttackParams::default().with_seed(dim as u64);
            let result = match oracle.region().clone() {
                Region::Ball { center, .. } => {
                    let start = original.with_flat_positions(&center)?;
                    run_attack_from(&original, start, &mut oracle, &params, |_| {})?
                }
                _ => run_attack(&original, &mut oracle, &params)?,
            };
            println!(
                "{name:<12} {dim:>4} {optimum:>10.5} {:>10.5} {:>8.4} {:>7}",
                result.final_distance,
                result.final_distance / optimum - 1.0,
                result.queries_used
            );
            traces.push(result.trace);
        }
    }
    if let Some(path) = std::env::args().nth(1) {
        let refs: Vec<&[TracePoint]> = traces.iter().map(Vec::as_slice).collect();
        std::fs::write(&path, render_convergence_svg(&refs))?;
        println!("wrote {path}");
    }
    Ok(())
}
