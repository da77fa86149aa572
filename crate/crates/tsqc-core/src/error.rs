//! Error type shared across the crate.

use thiserror::Error;

use crate::hilbert::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("vector has (near-)zero norm; cannot normalize")]
    ZeroVector,

    #[error("invalid ket: {0}")]
    InvalidKet(String),

    #[error("invalid two-state: {0}")]
    InvalidTwoState(String),

    #[error("invalid measurement '{name}': {report}")]
    InvalidMeasurement { name: String, report: ValidationReport },

    /// The pre/post pair cannot co-occur given this intermediate measurement:
    /// every transition amplitude vanishes, so the conditional probabilities
    /// are undefined.
    #[error("impossible postselection: all transition weights below threshold")]
    ImpossiblePostselection,

    /// The pre and post states are orthogonal, so a rule conditioned on the
    /// intermediate measurement *not* being made has a vanishing denominator.
    #[error("pre and post states have (near-)zero overlap")]
    ZeroOverlap,

    #[error("projector '{label}' must be rank 1 (trace {trace})")]
    RankError { label: String, trace: f64 },

    #[error("no projector labeled '{0}' in measurement")]
    UnknownLabel(String),

    #[error("label mismatch: {0}")]
    LabelMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: invariant '{invariant}' violated (deviation {deviation:e})")]
    Validation { invariant: String, deviation: f64 },
}
