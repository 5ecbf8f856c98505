use thiserror::Error;

use crate::model::{Basis, Diagnostic};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("number of modes must be at least {min}, got {got}")]
    TooFewModes { got: usize, min: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("basis mismatch: expected {expected} basis, got {got} basis")]
    BasisMismatch { expected: Basis, got: Basis },

    #[error("{relation} requires N divisible by {divisor}, got N = {n_modes}")]
    Divisibility {
        relation: &'static str,
        divisor: usize,
        n_modes: usize,
    },

    #[error("mode index {index} outside 1..={n_modes}")]
    ModeIndex { index: usize, n_modes: usize },

    #[error("transmittance {0} outside [0, 1]")]
    Transmittance(f64),

    #[error("invalid configuration:{}", format_diagnostics(.0))]
    InvalidConfig(Vec<Diagnostic>),

    #[error("{operation} does not support pump profile {profile}")]
    UnsupportedProfile {
        operation: &'static str,
        profile: String,
    },

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("\n  - {d}")).collect()
}
