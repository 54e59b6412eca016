//! Trajectory data types and the displacement and intention metrics used as
//! attack objectives.

mod metrics;
mod types;

pub use metrics::{
    ade, combined_error, direction_unit, fde, intention_deviation, trajectory_distance,
    DEGENERATE_SEGMENT,
};
pub use types::{
    AgentId, AgentState, Direction, LaneContext, Point2, Prediction, Scene, Trajectory,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrajError {
    #[error("trajectory must contain at least one state")]
    EmptyTrajectory,
    #[error("sampling interval must be positive and finite, got {0}")]
    InvalidSamplingInterval(f64),
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("lane width must be positive, got {0}")]
    InvalidLaneWidth(f64),
    #[error("lane centerline needs at least two points")]
    ShortPolyline,
    #[error("agent {0:?} not present")]
    MissingAgent(String),
    #[error("histories, futures or prediction cover different agent sets")]
    AgentSetMismatch,
    #[error("agent {agent:?}: expected {expected} steps, found {found}")]
    HorizonMismatch {
        agent: String,
        expected: usize,
        found: usize,
    },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("degenerate heading segment")]
    DegenerateHeading,
    #[error("ground truth is stationary; no heading available")]
    StationaryTruth,
    #[error("error objective needs at least one of ADE or FDE")]
    InvalidObjective,
}
