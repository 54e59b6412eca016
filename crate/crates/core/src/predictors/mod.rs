//! The black-box prediction contract and the predictors shipped with the
//! crate: three deterministic reference models and an adapter for models
//! running in a separate process.

mod external;
mod reference;

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trajcore::{Prediction, Scene, TrajError};

pub use external::{ExternalPredictor, PredictRequest, PredictResponse, WIRE_SCHEMA};
pub use reference::{constant_turn_predict, constant_velocity_predict, least_squares_predict};

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("history of {found} points is too short, need {needed}")]
    InsufficientHistory { needed: usize, found: usize },
    #[error("least-squares degree must be 1 or 2, got {0}")]
    InvalidDegree(u8),
    #[error("predictor process i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("predictor response violates schema: {0}")]
    Schema(String),
    #[error("predictor response does not match scene: {0}")]
    Mismatch(#[from] TrajError),
    #[error("predictor did not answer within {0:?}")]
    Timeout(Duration),
    #[error("predictor process closed its output")]
    Closed,
}

/// Anything that maps a scene's histories to future positions.
///
/// Implementations must be deterministic for a given scene unless they wrap
/// an external model.
pub trait Predictor: Send + Sync {
    fn predict(&self, scene: &Scene) -> Result<Prediction, PredictError>;
}

/// Serializable description of a predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictorKind {
    ConstantVelocity,
    ConstantTurn,
    LeastSquares {
        degree: u8,
    },
    External {
        program: String,
        #[serde(default)]
        args: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorSpec {
    #[serde(flatten)]
    pub kind: PredictorKind,
    /// Free-form scalar parameters. `timeout_ms` applies to external predictors.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
}

impl Default for PredictorSpec {
    fn default() -> Self {
        PredictorKind::ConstantVelocity.into()
    }
}

impl From<PredictorKind> for PredictorSpec {
    fn from(kind: PredictorKind) -> Self {
        Self {
            kind,
            parameters: BTreeMap::new(),
        }
    }
}

/// A ready-to-query predictor.
#[derive(Debug)]
pub enum PredictorHandle {
    ConstantVelocity,
    ConstantTurn,
    LeastSquares { degree: u8 },
    External(ExternalPredictor),
}

impl PredictorHandle {
    pub fn least_squares(degree: u8) -> Result<Self, PredictError> {
        if !(1..=2).contains(&degree) {
            return Err(PredictError::InvalidDegree(degree));
        }
        Ok(Self::LeastSquares { degree })
    }

    /// Builds the handle, spawning the child process for external predictors.
    pub fn from_spec(spec: &PredictorSpec) -> Result<Self, PredictError> {
        match &spec.kind {
            PredictorKind::ConstantVelocity => Ok(Self::ConstantVelocity),
            PredictorKind::ConstantTurn => Ok(Self::ConstantTurn),
            PredictorKind::LeastSquares { degree } => Self::least_squares(*degree),
            PredictorKind::External { program, args } => {
                let timeout = spec
                    .parameters
                    .get("timeout_ms")
                    .map(|ms| Duration::from_secs_f64(ms / 1000.0))
                    .unwrap_or(external::DEFAULT_TIMEOUT);
                Ok(Self::External(ExternalPredictor::spawn(
                    program, args, timeout,
                )?))
            }
        }
    }
}

impl Predictor for PredictorHandle {
    fn predict(&self, scene: &Scene) -> Result<Prediction, PredictError> {
        let horizon = scene.horizon();
        let per_agent = |f: &dyn Fn(&crate::trajcore::Trajectory) -> Result<_, PredictError>| {
            scene
                .histories()
                .iter()
                .map(|(id, h)| Ok((id.clone(), f(h)?)))
                .collect::<Result<BTreeMap<_, _>, PredictError>>()
                .map(Prediction::new)
        };
        match self {
            Self::ConstantVelocity => per_agent(&|h| Ok(constant_velocity_predict(h, horizon))),
            Self::ConstantTurn => per_agent(&|h| constant_turn_predict(h, horizon)),
            Self::LeastSquares { degree } => {
                per_agent(&|h| least_squares_predict(h, horizon, *degree))
            }
            Self::External(ext) => ext.predict(scene),
        }
    }
}

impl<P: Predictor + ?Sized> Predictor for &P {
    fn predict(&self, scene: &Scene) -> Result<Prediction, PredictError> {
        (**self).predict(scene)
    }
}
