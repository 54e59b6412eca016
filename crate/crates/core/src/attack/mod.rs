//! Decision-based boundary walk.
//!
//! Starting from any adversarial history, the walk alternates a random
//! orthogonal step (which keeps the distance to the original) with a forward
//! step toward the original, keeping only candidates the oracle accepts. The
//! two step sizes adapt to the local shape of the decision boundary.
//!
//! ```text
//! init:     sample X*(0) with c(X*(0)) = 1, then bisect toward X
//! loop:     S_o  <- orthogonal step (retry, delta *= 0.95)
//!           S_f  <- forward step from X*(k) + S_o (retry, eps *= 0.9)
//!           X*(k+1) <- X*(k) + S_o + S_f
//! stop:     eps < tolerance | max_iter | budget | no progress
//! ```

mod steps;
pub mod toy;

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criteria::{CriteriaError, DecisionOracle};
use crate::trajcore::{trajectory_distance, TrajError, Trajectory};

pub use steps::{forward_step, orthogonal_perturbation, orthogonal_step, MIN_SEPARATION};

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("no adversarial sample found within the initialization budget")]
    InitFailed,
    #[error("candidate coincides with the original; no step direction")]
    NoDirection,
    #[error("oracle failure: {0}")]
    Oracle(#[from] CriteriaError),
    #[error(transparent)]
    Trajectory(#[from] TrajError),
}

/// Hyperparameters of the boundary walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttackParams {
    /// Initial orthogonal step, relative to the current distance.
    pub delta0: f64,
    /// Initial forward step in meters.
    pub epsilon0: f64,
    pub delta_decay: f64,
    pub epsilon_decay: f64,
    pub epsilon_tolerance: f64,
    /// Factor applied to epsilon after a forward step accepted at the first
    /// attempt. `1.0` keeps epsilon non-increasing.
    pub epsilon_growth: f64,
    pub max_iter: usize,
    /// Accepted iterations improving less than this count toward a stall.
    pub improvement_floor: f64,
    pub patience: usize,
    pub init_sample_budget: usize,
    /// Per-point noise scale of the first initialization samples, meters.
    pub init_sigma: f64,
    pub init_sigma_growth: f64,
    /// Samples drawn at each noise scale before it grows.
    pub init_sigma_every: usize,
    pub bisection_steps: usize,
    /// Cap on rejected orthogonal candidates within one iteration.
    pub max_retries: usize,
    /// Cap on rejected forward candidates within one iteration.
    pub max_forward_retries: usize,
    pub success_window: usize,
    /// Delta grows when the windowed orthogonal success rate exceeds this.
    pub success_high: f64,
    /// Delta shrinks when the windowed orthogonal success rate is below this.
    pub success_low: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub rng_seed: u64,
}

impl Default for AttackParams {
    fn default() -> Self {
        Self {
            delta0: 1.0,
            epsilon0: 0.1,
            delta_decay: 0.95,
            epsilon_decay: 0.9,
            epsilon_tolerance: 1e-6,
            epsilon_growth: 1.0 / 0.9,
            max_iter: 1000,
            improvement_floor: 1e-8,
            patience: 10,
            init_sample_budget: 100,
            init_sigma: 0.5,
            init_sigma_growth: 1.5,
            init_sigma_every: 10,
            bisection_steps: 20,
            max_retries: 60,
            max_forward_retries: 10,
            success_window: 20,
            success_high: 0.45,
            success_low: 0.35,
            delta_min: 1e-4,
            delta_max: 10.0,
            rng_seed: 0,
        }
    }
}

impl AttackParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        let decays = [self.delta_decay, self.epsilon_decay];
        if decays.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
            return Err("decay factors must lie in (0, 1)".into());
        }
        if !(self.epsilon_tolerance > 0.0 && self.improvement_floor > 0.0) {
            return Err("tolerances must be positive".into());
        }
        if self.max_iter == 0 {
            return Err("max_iter must be at least 1".into());
        }
        if !(self.delta0 > 0.0 && self.epsilon0 > 0.0 && self.init_sigma > 0.0) {
            return Err("step sizes must be positive".into());
        }
        if !(0.0 <= self.success_low
            && self.success_low <= self.success_high
            && self.success_high <= 1.0)
        {
            return Err("success band must satisfy 0 <= low <= high <= 1".into());
        }
        if !(self.epsilon_growth >= 1.0) {
            return Err("epsilon_growth must be at least 1".into());
        }
        if !(self.delta_min > 0.0 && self.delta_min <= self.delta_max) {
            return Err("invalid delta clamp".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    EpsilonTolerance,
    MaxIter,
    BudgetExhausted,
    Stalled,
    InitFailed,
    /// The unperturbed history already satisfies the criterion.
    OriginalAdversarial,
}

/// One point of a convergence trace: distance of an accepted iterate and the
/// number of queries spent when it was accepted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub query: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackResult {
    pub adversarial: Trajectory,
    /// Distance of `adversarial` to the original (0 when unsuccessful).
    pub final_distance: f64,
    pub success: bool,
    pub queries_used: usize,
    pub trace: Vec<TracePoint>,
    pub termination: TerminationReason,
    /// Distance of the first adversarial sample.
    pub initial_distance: Option<f64>,
    /// Closest adversarial candidate seen, which for score-based searches
    /// can differ from the returned one.
    pub min_adversarial_distance: Option<f64>,
}

impl AttackResult {
    pub(crate) fn failed(
        original: &Trajectory,
        queries_used: usize,
        why: TerminationReason,
    ) -> Self {
        Self {
            adversarial: original.clone(),
            final_distance: 0.0,
            success: false,
            queries_used,
            trace: Vec::new(),
            termination: why,
            initial_distance: None,
            min_adversarial_distance: None,
        }
    }

    /// Smallest accepted distance after at most `queries` queries.
    pub fn best_distance_within(&self, queries: usize) -> Option<f64> {
        self.trace
            .iter()
            .filter(|p| p.query <= queries)
            .map(|p| p.distance)
            .min_by(f64::total_cmp)
    }
}

/// Record of the last accepted iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub distance_before: f64,
    /// Distance after the orthogonal step only.
    pub distance_after_orthogonal: f64,
    pub distance_after: f64,
    /// Forward step length tried last; `None` if only the orthogonal move
    /// was kept.
    pub forward_epsilon: Option<f64>,
    /// `S_o` as a flattened displacement.
    pub orthogonal: Vec<f64>,
    /// `S_f` as a flattened displacement.
    pub forward: Vec<f64>,
}

/// Mutable state of the walk, visible to observers after every iteration.
#[derive(Debug, Clone)]
pub struct AttackState {
    pub current: Trajectory,
    pub distance: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub iteration: usize,
    pub last_step: Option<StepRecord>,
    pub ortho_outcomes: VecDeque<bool>,
}

impl AttackState {
    fn push_outcome(&mut self, accepted: bool, window: usize) {
        if window == 0 {
            return;
        }
        if self.ortho_outcomes.len() == window {
            self.ortho_outcomes.pop_front();
        }
        self.ortho_outcomes.push_back(accepted);
    }

    /// Share of recent orthogonal candidates that were adversarial.
    pub fn ortho_success_rate(&self) -> Option<f64> {
        if self.ortho_outcomes.is_empty() {
            return None;
        }
        let hits = self.ortho_outcomes.iter().filter(|b| **b).count();
        Some(hits as f64 / self.ortho_outcomes.len() as f64)
    }
}

fn perturbed_sample<R: Rng>(
    original: &Trajectory,
    sigma: f64,
    rng: &mut R,
) -> Result<Trajectory, TrajError> {
    let flat: Vec<f64> = original
        .flatten()
        .into_iter()
        .map(|x| x + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    original.with_flat_positions(&flat)
}

/// Finds a first adversarial history by Gaussian sampling around the
/// original with a noise scale that grows every `init_sigma_every` samples.
/// The original itself is tried first.
pub fn initialize_adversarial<O, R>(
    original: &Trajectory,
    oracle: &mut O,
    params: &AttackParams,
    rng: &mut R,
) -> Result<Trajectory, AttackError>
where
    O: DecisionOracle + ?Sized,
    R: Rng,
{
    if params.init_sample_budget == 0 {
        return Err(AttackError::InitFailed);
    }
    if oracle.query(original)? {
        return Ok(original.clone());
    }
    let every = params.init_sigma_every.max(1);
    for j in 0..params.init_sample_budget - 1 {
        let sigma = params.init_sigma * params.init_sigma_growth.powi((j / every) as i32);
        let candidate = perturbed_sample(original, sigma, rng)?;
        if oracle.query(&candidate)? {
            return Ok(candidate);
        }
    }
    Err(AttackError::InitFailed)
}

/// Bisects the segment from `adversarial` to `original` and returns the
/// adversarial end of the final bracket. Stops early, keeping the best point
/// so far, when the budget runs out.
pub fn forward_initialize<O: DecisionOracle + ?Sized>(
    original: &Trajectory,
    adversarial: &Trajectory,
    oracle: &mut O,
    params: &AttackParams,
) -> Result<Trajectory, AttackError> {
    let mut trace = Vec::new();
    bisect(original, adversarial, oracle, params, &mut trace)
}

fn bisect<O: DecisionOracle + ?Sized>(
    original: &Trajectory,
    adversarial: &Trajectory,
    oracle: &mut O,
    params: &AttackParams,
    trace: &mut Vec<TracePoint>,
) -> Result<Trajectory, AttackError> {
    let o = original.flatten();
    let mut lo = 0.0f64; // fraction of the way from the original
    let mut hi = 1.0f64;
    let a = adversarial.flatten();
    let diff = steps::sub(&a, &o);
    if steps::rms(&diff) < MIN_SEPARATION {
        return Ok(adversarial.clone());
    }
    let mut best = adversarial.clone();
    for _ in 0..params.bisection_steps {
        let mid = 0.5 * (lo + hi);
        let flat: Vec<f64> = o.iter().zip(&diff).map(|(x, d)| x + mid * d).collect();
        let candidate = adversarial.with_flat_positions(&flat)?;
        match oracle.query(&candidate) {
            Ok(true) => {
                hi = mid;
                trace.push(TracePoint {
                    query: oracle.queries_used(),
                    distance: trajectory_distance(original, &candidate)?,
                });
                best = candidate;
            }
            Ok(false) => lo = mid,
            Err(e) if e.is_budget_exhausted() => break,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(best)
}

/// Runs the full walk. See [`run_attack_observed`].
pub fn run_attack<O: DecisionOracle + ?Sized>(
    original: &Trajectory,
    oracle: &mut O,
    params: &AttackParams,
) -> Result<AttackResult, AttackError> {
    run_attack_observed(original, oracle, params, |_| {})
}

/// Runs the full walk, calling `observe` after every completed iteration.
///
/// Budget exhaustion and initialization failure end the run with an
/// ordinary result; only oracle faults (predictor I/O, malformed
/// predictions) are returned as errors. The returned trajectory is the
/// closest adversarial iterate accepted during the run.
pub fn run_attack_observed<O, F>(
    original: &Trajectory,
    oracle: &mut O,
    params: &AttackParams,
    mut observe: F,
) -> Result<AttackResult, AttackError>
where
    O: DecisionOracle + ?Sized,
    F: FnMut(&AttackState),
{
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let start = match initialize_adversarial(original, oracle, params, &mut rng) {
        Ok(t) => t,
        Err(AttackError::InitFailed) => {
            return Ok(AttackResult::failed(
                original,
                oracle.queries_used(),
                TerminationReason::InitFailed,
            ))
        }
        Err(AttackError::Oracle(e)) if e.is_budget_exhausted() => {
            return Ok(AttackResult::failed(
                original,
                oracle.queries_used(),
                TerminationReason::BudgetExhausted,
            ))
        }
        Err(e) => return Err(e),
    };
    walk_from(original, start, oracle, params, &mut rng, &mut observe)
}

/// Runs the walk from a caller-supplied adversarial starting point instead of
/// sampling one. `start` is not re-queried.
pub fn run_attack_from<O, F>(
    original: &Trajectory,
    start: Trajectory,
    oracle: &mut O,
    params: &AttackParams,
    mut observe: F,
) -> Result<AttackResult, AttackError>
where
    O: DecisionOracle + ?Sized,
    F: FnMut(&AttackState),
{
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    walk_from(original, start, oracle, params, &mut rng, &mut observe)
}

enum Outcome<T> {
    Value(T),
    OutOfBudget,
}

fn ask<O: DecisionOracle + ?Sized>(
    oracle: &mut O,
    candidate: &Trajectory,
) -> Result<Outcome<bool>, AttackError> {
    match oracle.query(candidate) {
        Ok(v) => Ok(Outcome::Value(v)),
        Err(e) if e.is_budget_exhausted() => Ok(Outcome::OutOfBudget),
        Err(e) => Err(e.into()),
    }
}

fn walk_from<O, F>(
    original: &Trajectory,
    start: Trajectory,
    oracle: &mut O,
    params: &AttackParams,
    rng: &mut ChaCha8Rng,
    observe: &mut F,
) -> Result<AttackResult, AttackError>
where
    O: DecisionOracle + ?Sized,
    F: FnMut(&AttackState),
{
    let initial_distance = trajectory_distance(original, &start)?;
    let mut trace = vec![TracePoint {
        query: oracle.queries_used(),
        distance: initial_distance,
    }];

    let finish = |best: Trajectory,
                  best_distance: f64,
                  trace: Vec<TracePoint>,
                  queries: usize,
                  why: TerminationReason| AttackResult {
        adversarial: best,
        final_distance: best_distance,
        success: true,
        queries_used: queries,
        trace,
        termination: why,
        initial_distance: Some(initial_distance),
        min_adversarial_distance: Some(best_distance),
    };

    if initial_distance < MIN_SEPARATION {
        return Ok(finish(
            start,
            initial_distance,
            trace,
            oracle.queries_used(),
            TerminationReason::OriginalAdversarial,
        ));
    }

    let current = bisect(original, &start, oracle, params, &mut trace)?;
    let distance = trajectory_distance(original, &current)?;
    let mut best = current.clone();
    let mut best_distance = distance;
    let mut state = AttackState {
        current,
        distance,
        delta: params.delta0,
        epsilon: params.epsilon0,
        iteration: 0,
        last_step: None,
        ortho_outcomes: VecDeque::with_capacity(params.success_window),
    };
    if oracle.remaining() == 0 {
        return Ok(finish(
            best,
            best_distance,
            trace,
            oracle.queries_used(),
            TerminationReason::BudgetExhausted,
        ));
    }

    let mut stall = 0usize;
    let termination = loop {
        if state.iteration >= params.max_iter {
            break TerminationReason::MaxIter;
        }
        if state.epsilon <= params.epsilon_tolerance {
            break TerminationReason::EpsilonTolerance;
        }

        // orthogonal step, shrinking delta on every rejection
        let mut temp = None;
        for _ in 0..params.max_retries.max(1) {
            let candidate = orthogonal_step(original, &state.current, state.delta, rng)?;
            match ask(oracle, &candidate)? {
                Outcome::OutOfBudget => break,
                Outcome::Value(true) => {
                    state.push_outcome(true, params.success_window);
                    temp = Some(candidate);
                    break;
                }
                Outcome::Value(false) => {
                    state.push_outcome(false, params.success_window);
                    state.delta = (state.delta * params.delta_decay).max(params.delta_min);
                }
            }
        }
        if oracle.remaining() == 0 && temp.is_none() {
            break TerminationReason::BudgetExhausted;
        }
        let Some(temp) = temp else {
            state.iteration += 1;
            stall += 1;
            if stall >= params.patience {
                break TerminationReason::Stalled;
            }
            continue;
        };

        // forward step from the orthogonal candidate, shrinking epsilon
        let mut next = None;
        let mut tried_epsilon = None;
        let mut out_of_budget = false;
        let mut rejected_forward = 0usize;
        for _ in 0..params.max_forward_retries.max(1) {
            let candidate = forward_step(original, &temp, state.epsilon)?;
            tried_epsilon = Some(state.epsilon);
            match ask(oracle, &candidate)? {
                Outcome::OutOfBudget => {
                    out_of_budget = true;
                    break;
                }
                Outcome::Value(true) => {
                    next = Some(candidate);
                    break;
                }
                Outcome::Value(false) => {
                    rejected_forward += 1;
                    state.epsilon *= params.epsilon_decay;
                    if state.epsilon < params.epsilon_tolerance {
                        break;
                    }
                }
            }
        }
        let forward_taken = next.is_some();
        if forward_taken && rejected_forward == 0 {
            state.epsilon *= params.epsilon_growth;
        }
        // the orthogonal candidate is adversarial, so it is a valid fallback
        let next = next.unwrap_or_else(|| temp.clone());

        let before = state.distance;
        let after_orthogonal = trajectory_distance(original, &temp)?;
        let after = trajectory_distance(original, &next)?;
        let (cur_flat, temp_flat, next_flat) =
            (state.current.flatten(), temp.flatten(), next.flatten());
        state.last_step = Some(StepRecord {
            distance_before: before,
            distance_after_orthogonal: after_orthogonal,
            distance_after: after,
            forward_epsilon: if forward_taken { tried_epsilon } else { None },
            orthogonal: steps::sub(&temp_flat, &cur_flat),
            forward: steps::sub(&next_flat, &temp_flat),
        });
        state.current = next;
        state.distance = after;
        state.iteration += 1;
        trace.push(TracePoint {
            query: oracle.queries_used(),
            distance: after,
        });
        if after < best_distance {
            best_distance = after;
            best = state.current.clone();
        }

        // windowed success-rate control of delta
        if let Some(rate) = state.ortho_success_rate() {
            if rate > params.success_high {
                state.delta /= params.delta_decay;
            } else if rate < params.success_low {
                state.delta *= params.delta_decay;
            }
            state.delta = state.delta.clamp(params.delta_min, params.delta_max);
        }
        observe(&state);

        if out_of_budget || oracle.remaining() == 0 {
            break TerminationReason::BudgetExhausted;
        }
        if before - after < params.improvement_floor {
            stall += 1;
            if stall >= params.patience {
                break TerminationReason::Stalled;
            }
        } else {
            stall = 0;
        }
    };

    Ok(finish(
        best,
        best_distance,
        trace,
        oracle.queries_used(),
        termination,
    ))
}

#[cfg(test)]
mod tests {
    use super::toy::{FnOracle, Region, RegionOracle};
    use super::*;
    use crate::trajcore::Point2;

    #[test]
    fn init_returns_satisfying_sample() {
        let original = Trajectory::from_points(&[Point2::ZERO; 4], 0.5).unwrap();
        let orig = original.clone();
        let mut oracle = FnOracle::new(1000, move |c: &Trajectory| {
            let mean_dx: f64 = c
                .positions()
                .zip(orig.positions())
                .map(|(a, b)| a.x - b.x)
                .sum::<f64>()
                / c.len() as f64;
            mean_dx > 0.5
        });
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = AttackParams::default();
        let adv = initialize_adversarial(&original, &mut oracle, &params, &mut rng).unwrap();
        let mean_dx: f64 = adv.positions().map(|p| p.x).sum::<f64>() / 4.0;
        assert!(mean_dx > 0.5);
    }

    #[test]
    fn init_fails_after_budget_on_empty_region() {
        let mut oracle = RegionOracle::new(Region::Empty, 8, 1000);
        let original = oracle.original().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = AttackParams::default();
        let err = initialize_adversarial(&original, &mut oracle, &params, &mut rng).unwrap_err();
        assert!(matches!(err, AttackError::InitFailed));
        assert_eq!(oracle.queries_used(), params.init_sample_budget);
    }

    #[test]
    fn init_shortcut_when_original_adversarial() {
        let mut oracle = FnOracle::new(10, |_: &Trajectory| true);
        let original = Trajectory::from_points(&[Point2::new(1.0, 2.0)], 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let adv =
            initialize_adversarial(&original, &mut oracle, &AttackParams::default(), &mut rng)
                .unwrap();
        assert_eq!(adv, original);
        assert_eq!(oracle.queries_used(), 1);
    }

    #[test]
    fn bisection_lands_on_half_plane_boundary() {
        let mut oracle = RegionOracle::new(Region::half_plane(2, 1.0), 2, 100);
        let original = oracle.original().clone();
        let adv = Trajectory::from_points(&[Point2::new(4.0, 0.0)], 0.5).unwrap();
        let out =
            forward_initialize(&original, &adv, &mut oracle, &AttackParams::default()).unwrap();
        let d = trajectory_distance(&original, &out).unwrap();
        assert!((1.0..=1.0 + 3.0 * 2f64.powi(-20)).contains(&d), "{d}");
        assert_eq!(oracle.queries_used(), 20);

        // a boundary that is not a dyadic fraction of the segment
        let mut oracle = RegionOracle::new(Region::half_plane(2, 1.0), 2, 100);
        let adv = Trajectory::from_points(&[Point2::new(3.7, 0.0)], 0.5).unwrap();
        let out =
            forward_initialize(&original, &adv, &mut oracle, &AttackParams::default()).unwrap();
        let d = trajectory_distance(&original, &out).unwrap();
        assert!((1.0..=1.0 + 3.7 * 2f64.powi(-20)).contains(&d), "{d}");
    }

    #[test]
    fn bisection_degenerate_cases() {
        let mut oracle = FnOracle::new(100, |_: &Trajectory| true);
        let original = Trajectory::from_points(&[Point2::ZERO], 0.5).unwrap();
        let out = forward_initialize(&original, &original, &mut oracle, &AttackParams::default())
            .unwrap();
        assert_eq!(out, original);

        let adv = Trajectory::from_points(&[Point2::new(2.0, 0.0)], 0.5).unwrap();
        let mut never = FnOracle::new(100, |_: &Trajectory| false);
        let out =
            forward_initialize(&original, &adv, &mut never, &AttackParams::default()).unwrap();
        assert_eq!(out, adv);
    }

    #[test]
    fn disk_toy_in_2d_converges() {
        let mut oracle = RegionOracle::new(Region::ball(2, 3.0, 1.0), 2, 1000);
        let original = oracle.original().clone();
        let start = Trajectory::from_points(&[Point2::new(3.3, 0.6)], 0.5).unwrap();
        let res = run_attack_from(
            &original,
            start,
            &mut oracle,
            &AttackParams::default(),
            |_| {},
        )
        .unwrap();
        assert!(res.success);
        assert!(res.final_distance <= 2.0 * 1.05, "{}", res.final_distance);
        assert!(res.queries_used <= 1000);
    }

    #[test]
    fn half_plane_toy_dim8_converges() {
        let mut oracle = RegionOracle::new(Region::half_plane(8, 1.0), 8, 1000);
        let original = oracle.original().clone();
        let optimum = oracle.optimum_distance();
        assert!((optimum - 0.5).abs() < 1e-15);
        let res = run_attack(
            &original,
            &mut oracle,
            &AttackParams::default().with_seed(7),
        )
        .unwrap();
        assert!(res.success);
        assert!(
            res.final_distance <= 1.05 * optimum,
            "{} vs {optimum}",
            res.final_distance
        );
    }

    #[test]
    fn single_query_budget() {
        let mut never = RegionOracle::new(Region::Empty, 8, 1);
        let original = never.original().clone();
        let res = run_attack(&original, &mut never, &AttackParams::default()).unwrap();
        assert!(!res.success);
        assert!(matches!(
            res.termination,
            TerminationReason::BudgetExhausted | TerminationReason::InitFailed
        ));
        assert_eq!(res.queries_used, 1);

        let mut always = FnOracle::new(1, |_: &Trajectory| true);
        let res = run_attack(&original, &mut always, &AttackParams::default()).unwrap();
        assert!(res.success);
        assert_eq!(res.final_distance, 0.0);
        assert_eq!(res.termination, TerminationReason::OriginalAdversarial);
    }

    #[test]
    fn identical_seeds_reproduce() {
        let run = |seed| {
            let mut oracle = RegionOracle::new(Region::half_plane(8, 1.0), 8, 500);
            let original = oracle.original().clone();
            run_attack(
                &original,
                &mut oracle,
                &AttackParams::default().with_seed(seed),
            )
            .unwrap()
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42).trace, run(43).trace);
    }
}
