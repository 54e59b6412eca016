use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{try_evaluate, BaselineError, NormBall, ScoreSource, Tracker};
use crate::attack::{AttackResult, TerminationReason};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoParams {
    pub swarm_size: usize,
    /// Inertia weight.
    pub w: f64,
    /// Pull toward each particle's own best.
    pub c1: f64,
    /// Pull toward the swarm best.
    pub c2: f64,
    pub rng_seed: u64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            swarm_size: 20,
            w: 0.7,
            c1: 1.5,
            c2: 1.5,
            rng_seed: 0,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.swarm_size < 2 {
            return Err(BaselineError::InvalidParams(
                "swarm_size must be at least 2".into(),
            ));
        }
        if !(self.w > 0.0 && self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(BaselineError::InvalidParams(
                "PSO coefficients must be positive".into(),
            ));
        }
        Ok(())
    }
}

struct Particle {
    x: Vec<f64>,
    v: Vec<f64>,
    best_x: Vec<f64>,
    best_score: f64,
}

/// Particle swarm maximizing the score over perturbations clipped to `ball`.
/// Runs until the budget is spent and returns the best-scoring candidate.
pub fn pso_attack<S: ScoreSource + ?Sized>(
    source: &mut S,
    ball: &NormBall,
    params: &PsoParams,
) -> Result<AttackResult, BaselineError> {
    params.validate()?;
    if source.remaining() < params.swarm_size {
        return Err(BaselineError::InsufficientBudget {
            needed: params.swarm_size,
            remaining: source.remaining(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let dim = ball.dim();
    let vmax = ball.radius();
    let mut tracker = Tracker::new(ball.center());

    let mut swarm = Vec::with_capacity(params.swarm_size);
    for _ in 0..params.swarm_size {
        let x = ball.sample_offset(&mut rng);
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-vmax..=vmax)).collect();
        let candidate = ball.at(&x)?;
        let scored = source.evaluate(&candidate)?;
        tracker.record(&candidate, scored, source.queries_used())?;
        swarm.push(Particle {
            best_x: x.clone(),
            best_score: scored.score,
            x,
            v,
        });
    }
    let mut global = best_of(&swarm);

    'outer: loop {
        for p in swarm.iter_mut() {
            for k in 0..dim {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let v = params.w * p.v[k]
                    + params.c1 * r1 * (p.best_x[k] - p.x[k])
                    + params.c2 * r2 * (global.0[k] - p.x[k]);
                p.v[k] = v.clamp(-vmax, vmax);
                p.x[k] += p.v[k];
            }
            let unclipped = p.x.clone();
            ball.clip(&mut p.x);
            // absorbing walls: drop the velocity the clip cancelled
            for k in 0..dim {
                if p.x[k] != unclipped[k] {
                    p.v[k] = 0.0;
                }
            }
            let candidate = ball.at(&p.x)?;
            let Some(scored) = try_evaluate(source, &candidate)? else {
                break 'outer;
            };
            tracker.record(&candidate, scored, source.queries_used())?;
            if scored.score > p.best_score {
                p.best_score = scored.score;
                p.best_x = p.x.clone();
                if scored.score > global.1 {
                    global = (p.x.clone(), scored.score);
                }
            }
        }
    }
    Ok(tracker.finish(source.queries_used(), TerminationReason::BudgetExhausted)?)
}

fn best_of(swarm: &[Particle]) -> (Vec<f64>, f64) {
    let p = swarm
        .iter()
        .max_by(|a, b| a.best_score.total_cmp(&b.best_score))
        .expect("swarm is non-empty");
    (p.best_x.clone(), p.best_score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{FnScore, Norm};
    use crate::trajcore::{Point2, Trajectory};

    fn center(n: usize) -> Trajectory {
        let pts: Vec<Point2> = (0..n).map(|i| Point2::new(i as f64, 0.0)).collect();
        Trajectory::from_points(&pts, 0.5).unwrap()
    }

    #[test]
    fn quadratic_optimum_is_found() {
        let ball = NormBall::new(center(2), 1.0, Norm::Linf).unwrap();
        let target_offset = [0.3, -0.5, 0.1, 0.7];
        let target = ball.at(&target_offset).unwrap().flatten();
        let mut source = FnScore::new(1000, f64::INFINITY, |t: &Trajectory| {
            -t.flatten()
                .iter()
                .zip(&target)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        });
        let res = pso_attack(&mut source, &ball, &PsoParams::default()).unwrap();
        assert_eq!(res.queries_used, 1000);
        let err = res
            .adversarial
            .flatten()
            .iter()
            .zip(&target)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-2, "distance to optimum {err}");
        assert!(!res.success);
    }

    #[test]
    fn every_candidate_lies_in_the_ball() {
        let ball = NormBall::new(center(3), 0.25, Norm::Linf).unwrap();
        // the score pulls particles hard against the boundary
        let mut source = FnScore::new(400, 0.1, |t: &Trajectory| t.flatten().iter().sum::<f64>());
        let res = pso_attack(&mut source, &ball, &PsoParams::default()).unwrap();
        assert_eq!(source.transcript.len(), 400);
        assert!(source.transcript.iter().all(|t| ball.contains(t, 1e-12)));
        assert!(res.success);
        assert!(res.min_adversarial_distance.unwrap() <= res.final_distance);
    }

    #[test]
    fn swarm_larger_than_budget_is_rejected() {
        let ball = NormBall::new(center(2), 1.0, Norm::Linf).unwrap();
        let mut source = FnScore::new(10, 0.0, |_: &Trajectory| 0.0);
        assert!(matches!(
            pso_attack(&mut source, &ball, &PsoParams::default()),
            Err(BaselineError::InsufficientBudget {
                needed: 20,
                remaining: 10
            })
        ));
        assert_eq!(source.queries_used(), 0);
    }
}
