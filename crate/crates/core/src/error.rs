use thiserror::Error;

use crate::model::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("box has no axes")]
    ZeroDimension,

    #[error("empty box: axis {axis} has lo {lo} > hi {hi}")]
    EmptyBox { axis: usize, lo: f64, hi: f64 },

    #[error("box bound on axis {axis} is NaN")]
    NanBound { axis: usize },

    #[error("hull of an empty point set")]
    EmptyPointSet,

    #[error("non-finite value in coordinate {coordinate} during evaluation")]
    NonFinite { coordinate: usize },

    #[error("sample {sample} left the finite range at step {step}")]
    NonFiniteTrajectory { sample: usize, step: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("status requested before any symbolic_reach call completed")]
    NoStatus,

    #[error("query data has no record for end time {0}")]
    MissingData(usize),

    #[error("metric of the reference sets is zero; error ratio undefined")]
    ZeroMeasure,

    #[error("{0}")]
    Io(#[from] std::io::Error),
}
