use thiserror::Error;

use crate::dyadic::Dyadic;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid bit value {0} (bits must be 0 or 1)")]
    InvalidBit(u8),

    #[error("bit string of length {len} exceeds the supported maximum of {max}")]
    StringTooLong { len: usize, max: usize },

    #[error("qubit count {0} outside the supported range 1..={max}", max = crate::hilbert::MAX_QUBITS)]
    InvalidQubitCount(usize),

    #[error("basis label needs exactly {expected} bits, got {found}")]
    LabelLength { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("time step {m} outside the closed-form range 0..={n}")]
    TimeOutOfRange { m: usize, n: usize },

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("{what} needs at most {max} qubits, requested {requested}")]
    Capacity { what: &'static str, requested: usize, max: usize },

    #[error("bound violated at N = {n}, m = {m}: |q_m - r_m| = {divergence} > {bound}")]
    BoundViolated { n: usize, m: usize, divergence: Dyadic, bound: Dyadic },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
