//! Experiment orchestration: scene ingestion and synthesis, post-hoc
//! kinematic feasibility, aggregate metrics, reports and plots.

mod experiment;
mod feasibility;
mod metrics;
mod plot;
mod report;
mod scenes;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attack::AttackError;
use crate::baselines::BaselineError;
use crate::criteria::{CriteriaError, ThresholdConfig};
use crate::predictors::PredictError;
use crate::trajcore::TrajError;

pub use experiment::{
    attack_scene, build_scenarios, run_experiment, run_experiment_with, scenario_seed, AttackKind,
    DatasetSpec, Execution, ExperimentConfig,
};
pub use feasibility::{check_feasibility, KinematicBounds};
pub use metrics::{
    attack_success_rate, criterion_rate, miss_rate, off_road_rate, point_polyline_distance,
};
pub use plot::{emit_convergence_plot, emit_report_plot, render_convergence_svg};
pub use report::{emit_report, load_report, Aggregates, Intentions, Report, ScenarioRecord};
pub use scenes::{
    generate_synthetic_scene, generate_synthetic_scene_with, load_scenes, parse_scenes,
    write_scenes_csv, SyntheticOptions, Template,
};

/// Sampling interval of every scene, seconds.
pub const DT: f64 = 0.5;

/// Benchmark layout: history and horizon lengths plus default thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Style {
    /// 4 history steps, 12 future steps.
    #[default]
    NuscenesLike,
    /// 6 history steps, 6 future steps.
    ApolloLike,
}

impl Style {
    pub fn history_len(self) -> usize {
        match self {
            Style::NuscenesLike => 4,
            Style::ApolloLike => 6,
        }
    }

    pub fn horizon(self) -> usize {
        match self {
            Style::NuscenesLike => 12,
            Style::ApolloLike => 6,
        }
    }

    pub fn window(self) -> usize {
        self.history_len() + self.horizon()
    }

    pub fn thresholds(self) -> ThresholdConfig {
        match self {
            Style::NuscenesLike => ThresholdConfig::NUSCENES_LIKE,
            Style::ApolloLike => ThresholdConfig::APOLLO_LIKE,
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    MalformedRow { line: usize, message: String },
    #[error("no complete scene window found")]
    NoScenes,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no records to aggregate")]
    EmptyRecords,
    #[error("report is inconsistent: {0}")]
    InconsistentReport(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Trajectory(#[from] TrajError),
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Attack(#[from] AttackError),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}
