use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),

    /// A caller broke an API contract (e.g. unassigned point in a solution).
    #[error("contract error: {0}")]
    Contract(String),

    /// The fairness bounds admit no assignment for the given centers.
    #[error("fairness-infeasible: {0}")]
    FairnessInfeasible(String),

    /// The LP solver gave up (iteration cap, numerical trouble).
    #[error("solver error: {0}")]
    Solver(String),

    /// An oracle was asked for an instance above its size limits.
    #[error("oracle refused: {0}")]
    OracleRefused(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
