//! Scenario harness: TOML scenario files, trajectory ingestion, the
//! evaluation/optimization pipeline, and machine-readable report emission.

pub mod report;
pub mod run;
pub mod scenario;
pub mod trajio;

use std::path::PathBuf;

use thiserror::Error;

/// Harness-level failure, carrying the process exit code contract:
/// 2 for validation problems, 3 for I/O problems, 4 for an unreached goal in
/// evaluate mode.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("goal not reached: {0}")]
    UnreachedGoal(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 2,
            HarnessError::Io { .. } => 3,
            HarnessError::UnreachedGoal(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }
}

impl From<trajeval_core::geometry::GeometryError> for HarnessError {
    fn from(e: trajeval_core::geometry::GeometryError) -> Self {
        HarnessError::Validation(e.to_string())
    }
}

impl From<trajeval_core::metrics::MetricsError> for HarnessError {
    fn from(e: trajeval_core::metrics::MetricsError) -> Self {
        HarnessError::Validation(e.to_string())
    }
}

impl From<trajeval_core::objective::ObjectiveError> for HarnessError {
    fn from(e: trajeval_core::objective::ObjectiveError) -> Self {
        HarnessError::Validation(e.to_string())
    }
}

impl From<trajeval_core::optimizer::OptimizerError> for HarnessError {
    fn from(e: trajeval_core::optimizer::OptimizerError) -> Self {
        HarnessError::Validation(e.to_string())
    }
}
