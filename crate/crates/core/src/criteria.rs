//! Binary adversarial criterion and the budgeted query oracle the attacks see.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::predictors::{PredictError, Predictor};
use crate::trajcore::{
    combined_error, intention_deviation, Direction, Prediction, Scene, TrajError, Trajectory,
};

/// The active attack objective. Serialized by name: `left`, `right`,
/// `front`, `rear`, `ade`, `fde` or `ade+fde`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Objective {
    /// Push the prediction along a direction relative to the true path.
    Intention(Direction),
    /// Inflate ADE and/or FDE.
    Error { ade: bool, fde: bool },
}

impl Objective {
    pub const ADE: Objective = Objective::Error {
        ade: true,
        fde: false,
    };
    pub const FDE: Objective = Objective::Error {
        ade: false,
        fde: true,
    };

    pub fn validate(&self) -> Result<(), TrajError> {
        match self {
            Objective::Error {
                ade: false,
                fde: false,
            } => Err(TrajError::InvalidObjective),
            _ => Ok(()),
        }
    }

    /// Continuous objective value for the scene's target agent.
    pub fn score(&self, pred: &Prediction, scene: &Scene) -> Result<f64, TrajError> {
        let agent = scene.target();
        match *self {
            Objective::Intention(dir) => intention_deviation(pred, scene, agent, dir),
            Objective::Error { ade, fde } => combined_error(pred, scene, agent, ade, fde),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Objective::Intention(Direction::Left) => "left",
            Objective::Intention(Direction::Right) => "right",
            Objective::Intention(Direction::Front) => "front",
            Objective::Intention(Direction::Rear) => "rear",
            Objective::Error {
                ade: true,
                fde: false,
            } => "ade",
            Objective::Error {
                ade: false,
                fde: true,
            } => "fde",
            Objective::Error { .. } => "ade+fde",
        };
        f.write_str(s)
    }
}

impl From<Objective> for String {
    fn from(o: Objective) -> String {
        o.to_string()
    }
}

impl TryFrom<String> for Objective {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl FromStr for Objective {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "left" => Objective::Intention(Direction::Left),
            "right" => Objective::Intention(Direction::Right),
            "front" => Objective::Intention(Direction::Front),
            "rear" => Objective::Intention(Direction::Rear),
            "ade" => Objective::ADE,
            "fde" => Objective::FDE,
            "ade+fde" => Objective::Error {
                ade: true,
                fde: true,
            },
            other => return Err(format!("unknown objective {other:?}")),
        })
    }
}

/// Activation thresholds in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub theta_int_lateral: f64,
    pub theta_int_longitudinal: f64,
    pub theta_ade: f64,
    pub theta_fde: f64,
}

impl ThresholdConfig {
    /// Four-step history, twelve-step horizon benchmark setting.
    pub const NUSCENES_LIKE: ThresholdConfig = ThresholdConfig {
        theta_int_lateral: 2.0,
        theta_int_longitudinal: 3.0,
        theta_ade: 7.5,
        theta_fde: 17.5,
    };
    /// Six-step history, six-step horizon benchmark setting.
    pub const APOLLO_LIKE: ThresholdConfig = ThresholdConfig {
        theta_int_lateral: 2.0,
        theta_int_longitudinal: 3.0,
        theta_ade: 3.5,
        theta_fde: 7.5,
    };

    pub fn validate(&self) -> Result<(), CriteriaError> {
        let all = [
            self.theta_int_lateral,
            self.theta_int_longitudinal,
            self.theta_ade,
            self.theta_fde,
        ];
        // +inf is allowed: it yields a criterion that can never fire
        if all.iter().all(|t| *t > 0.0 && !t.is_nan()) {
            Ok(())
        } else {
            Err(CriteriaError::InvalidThreshold)
        }
    }

    /// Threshold for the active objective. The combined error objective is
    /// compared against the sum of both thresholds.
    pub fn active(&self, objective: &Objective) -> f64 {
        match *objective {
            Objective::Intention(d) if d.is_lateral() => self.theta_int_lateral,
            Objective::Intention(_) => self.theta_int_longitudinal,
            Objective::Error { ade, fde } => {
                let mut t = 0.0;
                if ade {
                    t += self.theta_ade;
                }
                if fde {
                    t += self.theta_fde;
                }
                t
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error("thresholds must be strictly positive")]
    InvalidThreshold,
    #[error("query budget of {budget} exhausted")]
    BudgetExhausted { budget: usize },
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Metric(#[from] TrajError),
}

impl CriteriaError {
    pub fn is_budget_exhausted(&self) -> bool {
        matches!(self, CriteriaError::BudgetExhausted { .. })
    }
}

/// `true` iff the active objective strictly exceeds its threshold.
pub fn evaluate_criterion(
    pred: &Prediction,
    scene: &Scene,
    objective: &Objective,
    thresholds: &ThresholdConfig,
) -> Result<bool, TrajError> {
    Ok(objective.score(pred, scene)? > thresholds.active(objective))
}

/// Binary feedback about a candidate target history, under a query budget.
pub trait DecisionOracle {
    /// Spends one query. Returns `BudgetExhausted` without spending once the
    /// budget is used up.
    fn query(&mut self, candidate: &Trajectory) -> Result<bool, CriteriaError>;
    fn queries_used(&self) -> usize;
    fn budget(&self) -> usize;

    fn remaining(&self) -> usize {
        self.budget().saturating_sub(self.queries_used())
    }
}

impl<O: DecisionOracle + ?Sized> DecisionOracle for &mut O {
    fn query(&mut self, candidate: &Trajectory) -> Result<bool, CriteriaError> {
        (**self).query(candidate)
    }
    fn queries_used(&self) -> usize {
        (**self).queries_used()
    }
    fn budget(&self) -> usize {
        (**self).budget()
    }
}

/// Predictor + criterion over one scene: the only window an attack has
/// onto the model.
pub struct QueryOracle<'a> {
    predictor: &'a dyn Predictor,
    scene: &'a Scene,
    objective: Objective,
    thresholds: ThresholdConfig,
    budget: usize,
    queries_used: usize,
}

impl<'a> QueryOracle<'a> {
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
            thresholds,
            budget,
            queries_used: 0,
        })
    }

    pub fn scene(&self) -> &Scene {
        self.scene
    }

    pub fn original(&self) -> &Trajectory {
        self.scene.target_history()
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn thresholds(&self) -> &ThresholdConfig {
        &self.thresholds
    }
}

impl DecisionOracle for QueryOracle<'_> {
    fn query(&mut self, candidate: &Trajectory) -> Result<bool, CriteriaError> {
        if self.queries_used >= self.budget {
            return Err(CriteriaError::BudgetExhausted {
                budget: self.budget,
            });
        }
        self.queries_used += 1;
        let perturbed = self.scene.with_target_history(candidate.clone())?;
        let pred = self.predictor.predict(&perturbed)?;
        // truth (and the heading fallback) always come from the clean scene
        Ok(evaluate_criterion(
            &pred,
            self.scene,
            &self.objective,
            &self.thresholds,
        )?)
    }

    fn queries_used(&self) -> usize {
        self.queries_used
    }

    fn budget(&self) -> usize {
        self.budget
    }
}

/// Wraps an oracle and keeps every answered query.
pub struct Recorded<O> {
    pub inner: O,
    pub transcript: Vec<(Trajectory, bool)>,
}

impl<O: DecisionOracle> Recorded<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            transcript: Vec::new(),
        }
    }

    /// Verdict recorded for an exact candidate, most recent first.
    pub fn verdict_for(&self, candidate: &Trajectory) -> Option<bool> {
        self.transcript
            .iter()
            .rev()
            .find(|(t, _)| t == candidate)
            .map(|(_, v)| *v)
    }
}

impl<O: DecisionOracle> DecisionOracle for Recorded<O> {
    fn query(&mut self, candidate: &Trajectory) -> Result<bool, CriteriaError> {
        let verdict = self.inner.query(candidate)?;
        self.transcript.push((candidate.clone(), verdict));
        Ok(verdict)
    }
    fn queries_used(&self) -> usize {
        self.inner.queries_used()
    }
    fn budget(&self) -> usize {
        self.inner.budget()
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::predictors::PredictorHandle;
    use crate::trajcore::Point2;

    fn straight_scene() -> Scene {
        let h: Vec<Point2> = (0..4).map(|i| Point2::new(i as f64, 0.0)).collect();
        let f: Vec<Point2> = (4..16).map(|i| Point2::new(i as f64, 0.0)).collect();
        Scene::new(
            "s",
            BTreeMap::from([("a".into(), Trajectory::from_points(&h, 0.5).unwrap())]),
            BTreeMap::from([("a".into(), Trajectory::from_points(&f, 0.5).unwrap())]),
            "a",
            None,
        )
        .unwrap()
    }

    fn shifted(scene: &Scene, off: Point2) -> Prediction {
        Prediction::new(BTreeMap::from([(
            "a".to_string(),
            scene.target_future().positions().map(|p| p + off).collect(),
        )]))
    }

    #[test]
    fn strict_threshold_boundary() {
        let scene = straight_scene();
        let th = ThresholdConfig::NUSCENES_LIKE;
        let ade = Objective::ADE;
        let at = shifted(&scene, Point2::new(0.0, 7.5));
        assert!(!evaluate_criterion(&at, &scene, &ade, &th).unwrap());
        let above = shifted(&scene, Point2::new(0.0, 8.0));
        assert!(evaluate_criterion(&above, &scene, &ade, &th).unwrap());

        let left = Objective::Intention(Direction::Left);
        let p = shifted(&scene, Point2::new(0.0, 2.5));
        assert!(evaluate_criterion(&p, &scene, &left, &th).unwrap());
        let right = Objective::Intention(Direction::Right);
        assert!(!evaluate_criterion(&p, &scene, &right, &th).unwrap());
    }

    #[test]
    fn objective_names_round_trip() {
        for name in ["left", "right", "front", "rear", "ade", "fde", "ade+fde"] {
            let o: Objective = name.parse().unwrap();
            assert_eq!(o.to_string(), name);
        }
        assert!("up".parse::<Objective>().is_err());
    }

    #[test]
    fn invalid_configs_rejected() {
        let scene = straight_scene();
        let cv = PredictorHandle::ConstantVelocity;
        let bad_obj = Objective::Error {
            ade: false,
            fde: false,
        };
        assert!(QueryOracle::new(&cv, &scene, bad_obj, ThresholdConfig::NUSCENES_LIKE, 5).is_err());
        let mut th = ThresholdConfig::NUSCENES_LIKE;
        th.theta_ade = 0.0;
        assert!(QueryOracle::new(&cv, &scene, Objective::ADE, th, 5).is_err());
    }

    #[test]
    fn oracle_counts_and_enforces_budget() {
        let scene = straight_scene();
        let cv = PredictorHandle::ConstantVelocity;
        let mut oracle = QueryOracle::new(
            &cv,
            &scene,
            Objective::ADE,
            ThresholdConfig::NUSCENES_LIKE,
            1,
        )
        .unwrap();
        let original = scene.target_history().clone();
        assert!(!oracle.query(&original).unwrap());
        assert_eq!(oracle.queries_used(), 1);
        let err = oracle.query(&original).unwrap_err();
        assert!(err.is_budget_exhausted());
        assert_eq!(oracle.queries_used(), 1);
    }

    #[test]
    fn combined_threshold_is_sum() {
        let th = ThresholdConfig::APOLLO_LIKE;
        let both = Objective::Error {
            ade: true,
            fde: true,
        };
        assert_eq!(th.active(&both), 11.0);
        assert_eq!(th.active(&Objective::Intention(Direction::Rear)), 3.0);
    }
}
