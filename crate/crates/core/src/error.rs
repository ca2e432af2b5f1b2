use thiserror::Error;

use crate::superposition::PartitionViolation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("window is identically zero")]
    AllZeroWindow,
    #[error("window sample {index} is negative")]
    NegativeWindow { index: usize },
    #[error("signal length {got} does not match the system length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("system is not a frame: smallest eigenvalue {lambda_min:e} is below {threshold:e}")]
    NotAFrame { lambda_min: f64, threshold: f64 },
    #[error("refinement to {requested} modulations is coarser than the window length {length}")]
    RefinementTooCoarse { requested: usize, length: usize },
    #[error("invalid ordered partition: {0}")]
    InvalidPartition(PartitionViolation),
    #[error("dyadic shape violated: {0}")]
    DyadicShape(String),
    #[error("selection does not use a constant modulation count")]
    NonconstantModulation,
    #[error("overlap-add constraint violated (max deviation {deviation:e})")]
    OlaViolated { deviation: f64 },
    #[error("neighbor-overlap violated: translates {first} and {second} share support")]
    NeighborOverlapViolated { first: usize, second: usize },
    #[error("{what} = {value} is not a power of two")]
    NotPowerOfTwo { what: &'static str, value: usize },
    #[error("coefficients and duals were built from different selections")]
    SelectionMismatch,
    #[error("segment has zero energy")]
    ZeroEnergySegment,
    #[error("signal is identically zero")]
    ZeroSignal,
    #[error("signal component does not fit: {0}")]
    ComponentOverflow(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("wav error: {0}")]
    Wav(#[from] hound::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Precondition,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io(_) | Error::Json(_) | Error::Wav(_) => ErrorKind::Io,
            Error::NotAFrame { .. }
            | Error::RefinementTooCoarse { .. }
            | Error::DyadicShape(_)
            | Error::NonconstantModulation
            | Error::OlaViolated { .. }
            | Error::NeighborOverlapViolated { .. }
            | Error::NotPowerOfTwo { .. }
            | Error::SelectionMismatch
            | Error::ZeroEnergySegment
            | Error::ZeroSignal => ErrorKind::Precondition,
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
