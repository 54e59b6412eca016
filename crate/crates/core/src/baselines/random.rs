use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BaselineError, NormBall};
use crate::attack::{AttackResult, TerminationReason, TracePoint};
use crate::criteria::DecisionOracle;
use crate::trajcore::trajectory_distance;

/// Spends the whole budget on uniform samples from `ball` and keeps the
/// closest adversarial one.
pub fn random_attack<O: DecisionOracle + ?Sized>(
    oracle: &mut O,
    ball: &NormBall,
    rng_seed: u64,
) -> Result<AttackResult, BaselineError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let original = ball.center();
    let mut best = None;
    let mut first = None;
    let mut trace = Vec::new();
    while oracle.remaining() > 0 {
        let candidate = ball.at(&ball.sample_offset(&mut rng))?;
        let hit = match oracle.query(&candidate) {
            Ok(hit) => hit,
            Err(e) if e.is_budget_exhausted() => break,
            Err(e) => return Err(e.into()),
        };
        if hit {
            let d = trajectory_distance(original, &candidate)?;
            first.get_or_insert(d);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                trace.push(TracePoint {
                    query: oracle.queries_used(),
                    distance: d,
                });
                best = Some((d, candidate));
            }
        }
    }
    let queries = oracle.queries_used();
    Ok(match best {
        Some((d, adversarial)) => AttackResult {
            adversarial,
            final_distance: d,
            success: true,
            queries_used: queries,
            trace,
            termination: TerminationReason::BudgetExhausted,
            initial_distance: first,
            min_adversarial_distance: Some(d),
        },
        None => AttackResult::failed(original, queries, TerminationReason::BudgetExhausted),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::toy::FnOracle;
    use crate::baselines::Norm;
    use crate::trajcore::{Point2, Trajectory};

    fn ball() -> NormBall {
        let pts = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.5)];
        NormBall::new(Trajectory::from_points(&pts, 0.5).unwrap(), 0.4, Norm::Linf).unwrap()
    }

    #[test]
    fn always_adversarial_returns_an_in_ball_sample() {
        let b = ball();
        let mut oracle = FnOracle::new(50, |_: &Trajectory| true);
        let res = random_attack(&mut oracle, &b, 1).unwrap();
        assert!(res.success);
        assert!(b.contains(&res.adversarial, 1e-12));
        assert_eq!(res.queries_used, 50);
    }

    #[test]
    fn never_adversarial_fails_after_budget() {
        let mut oracle = FnOracle::new(30, |_: &Trajectory| false);
        let res = random_attack(&mut oracle, &ball(), 1).unwrap();
        assert!(!res.success);
        assert_eq!(res.queries_used, 30);
    }

    #[test]
    fn seeded_runs_repeat() {
        let run = |seed| {
            let mut oracle = FnOracle::new(40, |t: &Trajectory| t.flatten()[0] > 0.1);
            random_attack(&mut oracle, &ball(), seed).unwrap()
        };
        assert_eq!(run(9), run(9));
    }
}
