//! Push a constant-velocity prediction to the left on one synthetic scene.
//!
//! cargo run --example attack_single_scene [budget]

use trajattack::attack::{run_attack, AttackParams};
use trajattack::criteria::{Objective, QueryOracle};
use trajattack::harness::{
    check_feasibility, generate_synthetic_scene, KinematicBounds, Style, Template,
};
use trajattack::predictors::{Predictor, PredictorHandle};
use trajattack::trajcore::{intention_deviation, Direction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(1000);
    let style = Style::NuscenesLike;
    let scene = generate_synthetic_scene(Template::Straight, style, 8.0, 7)?;
    let predictor = PredictorHandle::ConstantVelocity;
    let objective = Objective::Intention(Direction::Left);

    let clean = predictor.predict(&scene)?;
    let before = intention_deviation(&clean, &scene, scene.target(), Direction::Left)?;

    let mut oracle = QueryOracle::new(&predictor, &scene, objective, style.thresholds(), budget)?;
    let result = run_attack(
        scene.target_history(),
        &mut oracle,
        &AttackParams::default().with_seed(7),
    )?;

    println!("scene {}  objective {objective}", scene.id);
    println!("left deviation before: {before:.3} m");
    println!(
        "success {}  distance {:.4} m  queries {}  stop {:?}",
        result.success, result.final_distance, result.queries_used, result.termination
    );
    if result.success {
        let attacked = scene.with_target_history(result.adversarial.clone())?;
        let pred = predictor.predict(&attacked)?;
        let after = intention_deviation(&pred, &scene, scene.target(), Direction::Left)?;
        let feasible = check_feasibility(&result.adversarial, &KinematicBounds::default());
        println!("left deviation after:  {after:.3} m  feasible {feasible}");
        for (o, a) in scene
            .target_history()
            .positions()
            .zip(result.adversarial.positions())
        {
            println!("  ({:7.3}, {:6.3}) -> ({:7.3}, {:6.3})", o.x, o.y, a.x, a.y);
        }
    }
    Ok(())
}
