use crate::learning::TrainingLog;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFiniteInput(&'static str),

    #[error("direction must be a unit vector or zero (norm = {0})")]
    NonUnitDirection(f64),

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate stage: every capture time is zero")]
    DegenerateStage,

    #[error("LP solver failed after {iterations} pivots: {reason}")]
    Solver { iterations: usize, reason: String },

    #[error("training diverged at episode {episode}: weights became non-finite")]
    TrainingDiverged {
        episode: usize,
        log: Box<TrainingLog>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("weights file error: {0}")]
    WeightsFile(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
