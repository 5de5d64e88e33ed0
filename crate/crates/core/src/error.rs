use thiserror::Error;

use crate::predicate::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("register width {0} is outside the supported range 1..=24")]
    WidthOutOfRange(u32),

    #[error("width mismatch: state has {state} qubits, oracle table has {table}")]
    WidthMismatch { state: u32, table: u32 },

    #[error("state norm drifted to {norm} after {operation}")]
    NormalizationDrift { operation: &'static str, norm: f64 },

    #[error("measurement outcome {outcome} has probability {probability:e}; refusing to renormalize")]
    NumericalDegeneracy { outcome: u8, probability: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{0}")]
    InvalidCounts(String),

    #[error("cannot aggregate an empty outcome sequence")]
    EmptySample,

    #[error("fraction family: {0}")]
    Template(String),

    #[error("could not allocate {bytes} bytes for the state vector")]
    Allocation { bytes: usize },

    #[error("worker pool: {0}")]
    Pool(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by execution.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::WidthOutOfRange(_)
                | Error::WidthMismatch { .. }
                | Error::InvalidParameter { .. }
                | Error::InvalidCounts(_)
                | Error::EmptySample
                | Error::Template(_)
        )
    }
}
