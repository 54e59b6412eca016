use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{try_evaluate, BaselineError, NormBall, ScoreSource, Tracker};
use crate::attack::{AttackResult, TerminationReason};

/// Coordinate step used when none is configured.
pub fn default_simba_step(ball: &NormBall) -> f64 {
    ball.radius() / 4.0
}

/// Greedy coordinate search: over a random permutation of the flattened
/// coordinates, try `+step` then `-step` and keep strict score improvements.
/// Passes repeat until one accepts nothing or the budget runs out.
pub fn simba_attack<S: ScoreSource + ?Sized>(
    source: &mut S,
    ball: &NormBall,
    step: f64,
    rng_seed: u64,
) -> Result<AttackResult, BaselineError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(BaselineError::InvalidParams(format!(
            "step must be positive, got {step}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let dim = ball.dim();
    let mut tracker = Tracker::new(ball.center());
    let mut x = vec![0.0; dim];

    let Some(first) = try_evaluate(source, ball.center())? else {
        return Ok(tracker.finish(source.queries_used(), TerminationReason::BudgetExhausted)?);
    };
    tracker.record(ball.center(), first, source.queries_used())?;
    let mut score = first.score;

    let mut order: Vec<usize> = (0..dim).collect();
    let termination = 'passes: loop {
        order.shuffle(&mut rng);
        let mut accepted = false;
        for &k in &order {
            for sign in [1.0, -1.0] {
                let mut y = x.clone();
                y[k] += sign * step;
                ball.clip(&mut y);
                let candidate = ball.at(&y)?;
                let Some(scored) = try_evaluate(source, &candidate)? else {
                    break 'passes TerminationReason::BudgetExhausted;
                };
                tracker.record(&candidate, scored, source.queries_used())?;
                if scored.score > score {
                    score = scored.score;
                    x = y;
                    accepted = true;
                    break;
                }
            }
        }
        if !accepted {
            break TerminationReason::Stalled;
        }
    };
    Ok(tracker.finish(source.queries_used(), termination)?)
}
