//! Attack a predictor that runs in another process.
//!
//! The example re-launches itself with `--serve` as the child. In that mode
//! it answers prediction requests on stdin with a constant-velocity model,
//! which is what a wrapper around a learned model would do.
//!
//! cargo run --example external_predictor

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::time::Duration;

use trajattack::attack::{run_attack, AttackParams};
use trajattack::criteria::{Objective, QueryOracle};
use trajattack::harness::{generate_synthetic_scene, Style, Template};
use trajattack::predictors::{ExternalPredictor, PredictRequest, PredictResponse, WIRE_SCHEMA};
use trajattack::trajcore::Point2;

fn serve() -> Result<(), Box<dyn std::error::Error>> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in std::io::stdin().lock().lines() {
        let request: PredictRequest = serde_json::from_str(&line?)?;
        if request.schema != WIRE_SCHEMA {
            return Err(format!("unexpected schema {}", request.schema).into());
        }
        let mut prediction = BTreeMap::new();
        for (id, points) in request.history {
            let last = *points.last().ok_or("empty history")?;
            let v = match points.len() {
                1 => Point2::ZERO,
                n => last - points[n - 2],
            };
            let future: Vec<Point2> = (1..=request.horizon).map(|k| last + v * k as f64).collect();
            prediction.insert(id, future);
        }
        serde_json::to_writer(&mut out, &PredictResponse { prediction })?;
        out.write_all(b"\n")?;
        out.flush()?;
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    if std::env::args().nth(1).as_deref() == Some("--serve") {
        return serve();
    }
    let exe = std::env::current_exe()?;
    let predictor = ExternalPredictor::spawn(
        exe.to_str().ok_or("non-UTF-8 executable path")?,
        &["--serve".to_string()],
        Duration::from_secs(5),
    )?;

    let style = Style::NuscenesLike;
    let scene = generate_synthetic_scene(Template::LeftTurn { yaw_rate: 0.1 }, style, 7.0, 1)?;
    let mut oracle = QueryOracle::new(&predictor, &scene, Objective::FDE, style.thresholds(), 400)?;
    let result = run_attack(
        scene.target_history(),
        &mut oracle,
        &AttackParams::default().with_seed(1),
    )?;

    println!(
        "success {}  distance {:.4} m  queries {}  stop {:?}",
        result.success, result.final_distance, result.queries_used, result.termination
    );
    Ok(())
}
