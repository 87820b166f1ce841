use thiserror::Error;

use crate::ring::Ring;
use crate::Degree;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("side mismatch: {0}")]
    SideMismatch(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("degree {degree} is outside the evaluable window: {reason}")]
    Window { degree: Degree, reason: String },
    #[error("Hom complex has infinitely many contributions in degree {0}")]
    InfiniteHom(Degree),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal solver failure: {0}")]
    Internal(String),
    #[error("malformed document: {0}")]
    Schema(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}
