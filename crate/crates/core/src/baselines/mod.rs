//! Score-based black-box baselines searched inside a norm ball around the
//! original history: particle swarm, greedy coordinate search and uniform
//! random sampling.

mod pso;
mod random;
mod simba;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attack::{AttackResult, TerminationReason, TracePoint};
use crate::criteria::{CriteriaError, Objective, ThresholdConfig};
use crate::predictors::Predictor;
use crate::trajcore::{trajectory_distance, Scene, TrajError, Trajectory};

pub use pso::{pso_attack, PsoParams};
pub use random::random_attack;
pub use simba::{default_simba_step, simba_attack};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error(
        "no perturbation bound: the reference attack found no nonzero adversarial perturbation"
    )]
    NoBound,
    #[error("invalid ball radius {0}")]
    InvalidRadius(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("needs {needed} queries up front but only {remaining} remain")]
    InsufficientBudget { needed: usize, remaining: usize },
    #[error("oracle failure: {0}")]
    Oracle(#[from] CriteriaError),
    #[error(transparent)]
    Trajectory(#[from] TrajError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    Linf,
    L2,
}

/// Norm ball of trajectories around `center`, measured on flattened
/// position coordinates in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct NormBall {
    center: Trajectory,
    radius: f64,
    norm: Norm,
}

impl NormBall {
    pub fn new(center: Trajectory, radius: f64, norm: Norm) -> Result<Self, BaselineError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(BaselineError::InvalidRadius(radius));
        }
        Ok(Self {
            center,
            radius,
            norm,
        })
    }

    pub fn center(&self) -> &Trajectory {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn dim(&self) -> usize {
        2 * self.center.len()
    }

    /// Clips a flattened perturbation (offset from the center) into the ball.
    pub fn clip(&self, offset: &mut [f64]) {
        match self.norm {
            Norm::Linf => {
                for v in offset.iter_mut() {
                    *v = v.clamp(-self.radius, self.radius);
                }
            }
            Norm::L2 => {
                let n = offset.iter().map(|v| v * v).sum::<f64>().sqrt();
                if n > self.radius {
                    let k = self.radius / n;
                    offset.iter_mut().for_each(|v| *v *= k);
                }
            }
        }
    }

    /// Whether a flattened perturbation lies in the ball, up to `tol`.
    pub fn contains_offset(&self, offset: &[f64], tol: f64) -> bool {
        match self.norm {
            Norm::Linf => offset.iter().all(|v| v.abs() <= self.radius + tol),
            Norm::L2 => offset.iter().map(|v| v * v).sum::<f64>().sqrt() <= self.radius + tol,
        }
    }

    pub fn contains(&self, t: &Trajectory, tol: f64) -> bool {
        t.len() == self.center.len() && self.contains_offset(&self.offset_of(t), tol)
    }

    pub fn offset_of(&self, t: &Trajectory) -> Vec<f64> {
        t.flatten()
            .iter()
            .zip(self.center.flatten())
            .map(|(a, c)| a - c)
            .collect()
    }

    /// The center displaced by a flattened perturbation.
    pub fn at(&self, offset: &[f64]) -> Result<Trajectory, TrajError> {
        let flat: Vec<f64> = self
            .center
            .flatten()
            .iter()
            .zip(offset)
            .map(|(c, o)| c + o)
            .collect();
        self.center.with_flat_positions(&flat)
    }

    /// Uniform sample from the ball, as a perturbation.
    pub fn sample_offset<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.dim();
        match self.norm {
            Norm::Linf => (0..d)
                .map(|_| rng.random_range(-self.radius..=self.radius))
                .collect(),
            Norm::L2 => {
                let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                let n = g
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
                    .max(f64::MIN_POSITIVE);
                let r = self.radius * rng.random::<f64>().powf(1.0 / d as f64);
                g.into_iter().map(|v| v * r / n).collect()
            }
        }
    }
}

/// L-infinity ball whose radius is the largest coordinate deviation of a
/// successful reference attack.
pub fn derive_ball(
    reference: &AttackResult,
    original: &Trajectory,
) -> Result<NormBall, BaselineError> {
    if !reference.success {
        return Err(BaselineError::NoBound);
    }
    if reference.adversarial.len() != original.len() {
        return Err(TrajError::LengthMismatch {
            left: reference.adversarial.len(),
            right: original.len(),
        }
        .into());
    }
    let gamma = reference
        .adversarial
        .flatten()
        .iter()
        .zip(original.flatten())
        .map(|(a, o)| (a - o).abs())
        .fold(0.0, f64::max);
    if gamma <= 0.0 {
        return Err(BaselineError::NoBound);
    }
    NormBall::new(original.clone(), gamma, Norm::Linf)
}

/// One scored query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub score: f64,
    /// Whether the score strictly exceeds the active threshold.
    pub adversarial: bool,
}

/// Continuous feedback about a candidate target history, budgeted like a
/// [`DecisionOracle`](crate::criteria::DecisionOracle).
pub trait ScoreSource {
    fn evaluate(&mut self, candidate: &Trajectory) -> Result<Scored, CriteriaError>;
    fn queries_used(&self) -> usize;
    fn budget(&self) -> usize;

    fn remaining(&self) -> usize {
        self.budget().saturating_sub(self.queries_used())
    }
}

impl<S: ScoreSource + ?Sized> ScoreSource for &mut S {
    fn evaluate(&mut self, candidate: &Trajectory) -> Result<Scored, CriteriaError> {
        (**self).evaluate(candidate)
    }
    fn queries_used(&self) -> usize {
        (**self).queries_used()
    }
    fn budget(&self) -> usize {
        (**self).budget()
    }
}

/// Predictor + objective over one scene, reporting the raw objective value.
pub struct ScoreOracle<'a> {
    predictor: &'a dyn Predictor,
    scene: &'a Scene,
    objective: Objective,
    threshold: f64,
    budget: usize,
    queries_used: usize,
}

impl<'a> ScoreOracle<'a> {
    pub fn new(
        predictor: &'a dyn Predictor,
        scene: &'a Scene,
        objective: Objective,
        thresholds: ThresholdConfig,
        budget: usize,
    ) -> Result<Self, CriteriaError> {
        objective.validate()?;
        thresholds.validate()?;
        Ok(Self {
            predictor,
            scene,
            objective,
            threshold: thresholds.active(&objective),
            budget,
            queries_used: 0,
        })
    }

    pub fn scene(&self) -> &Scene {
        self.scene
    }
}

impl ScoreSource for ScoreOracle<'_> {
    fn evaluate(&mut self, candidate: &Trajectory) -> Result<Scored, CriteriaError> {
        if self.queries_used >= self.budget {
            return Err(CriteriaError::BudgetExhausted {
                budget: self.budget,
            });
        }
        self.queries_used += 1;
        let perturbed = self.scene.with_target_history(candidate.clone())?;
        let pred = self.predictor.predict(&perturbed)?;
        let score = self.objective.score(&pred, self.scene)?;
        Ok(Scored {
            score,
            adversarial: score > self.threshold,
        })
    }
    fn queries_used(&self) -> usize {
        self.queries_used
    }
    fn budget(&self) -> usize {
        self.budget
    }
}

/// Score source backed by a closure; adversarial iff `score > threshold`.
pub struct FnScore<F> {
    score: F,
    threshold: f64,
    budget: usize,
    used: usize,
    /// Every evaluated candidate, in order.
    pub transcript: Vec<Trajectory>,
}

impl<F: FnMut(&Trajectory) -> f64> FnScore<F> {
    pub fn new(budget: usize, threshold: f64, score: F) -> Self {
        Self {
            score,
            threshold,
            budget,
            used: 0,
            transcript: Vec::new(),
        }
    }
}

impl<F: FnMut(&Trajectory) -> f64> ScoreSource for FnScore<F> {
    fn evaluate(&mut self, candidate: &Trajectory) -> Result<Scored, CriteriaError> {
        if self.used >= self.budget {
            return Err(CriteriaError::BudgetExhausted {
                budget: self.budget,
            });
        }
        self.used += 1;
        self.transcript.push(candidate.clone());
        let score = (self.score)(candidate);
        Ok(Scored {
            score,
            adversarial: score > self.threshold,
        })
    }
    fn queries_used(&self) -> usize {
        self.used
    }
    fn budget(&self) -> usize {
        self.budget
    }
}

/// Bookkeeping shared by the score-based searches: best-by-score candidate
/// plus the closest adversarial candidate seen.
struct Tracker {
    original: Trajectory,
    best: Option<(Trajectory, Scored)>,
    first_adversarial: Option<f64>,
    closest_adversarial: Option<f64>,
    trace: Vec<TracePoint>,
}

impl Tracker {
    fn new(original: &Trajectory) -> Self {
        Self {
            original: original.clone(),
            best: None,
            first_adversarial: None,
            closest_adversarial: None,
            trace: Vec::new(),
        }
    }

    fn best_score(&self) -> f64 {
        self.best
            .as_ref()
            .map_or(f64::NEG_INFINITY, |(_, s)| s.score)
    }

    /// Records an evaluation; returns whether it is a new best score.
    fn record(
        &mut self,
        candidate: &Trajectory,
        scored: Scored,
        query: usize,
    ) -> Result<bool, TrajError> {
        if scored.adversarial {
            let d = trajectory_distance(&self.original, candidate)?;
            self.first_adversarial.get_or_insert(d);
            if self.closest_adversarial.is_none_or(|c| d < c) {
                self.closest_adversarial = Some(d);
                self.trace.push(TracePoint { query, distance: d });
            }
        }
        let improved = scored.score > self.best_score();
        if improved {
            self.best = Some((candidate.clone(), scored));
        }
        Ok(improved)
    }

    fn finish(
        self,
        queries_used: usize,
        termination: TerminationReason,
    ) -> Result<AttackResult, TrajError> {
        let Some((adversarial, scored)) = self.best else {
            return Ok(AttackResult::failed(
                &self.original,
                queries_used,
                termination,
            ));
        };
        let final_distance = if scored.adversarial {
            trajectory_distance(&self.original, &adversarial)?
        } else {
            0.0
        };
        Ok(AttackResult {
            adversarial,
            final_distance,
            success: scored.adversarial,
            queries_used,
            trace: self.trace,
            termination,
            initial_distance: self.first_adversarial,
            min_adversarial_distance: self.closest_adversarial,
        })
    }
}

/// Evaluates unless the budget is spent; `None` means out of budget.
fn try_evaluate<S: ScoreSource + ?Sized>(
    source: &mut S,
    candidate: &Trajectory,
) -> Result<Option<Scored>, BaselineError> {
    if source.remaining() == 0 {
        return Ok(None);
    }
    match source.evaluate(candidate) {
        Ok(s) => Ok(Some(s)),
        Err(e) if e.is_budget_exhausted() => Ok(None),
        Err(e) => Err(e.into()),
    }
}
