//! Experiment configuration and the data products behind the `qbaker` CLI.
//!
//! Every output is a pure function of its configuration: random strings come
//! from a pinned generator (see [`random_bits`]), sweeps are assembled in
//! `(N, m)` order, and no timestamps are written, so identical configurations
//! give byte-identical files.

mod dump;
mod sweep;
mod trajectory;
mod verify;

use std::io;

use clap::ValueEnum;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::error::Error;
use crate::hilbert::QubitCount;
use crate::symbolic::{BitString, MAX_BITS};

pub use dump::{dump_operator, write_operator_csv, write_operator_json, DumpTarget};
pub use sweep::{run_timescale_sweep, write_sweep_csv, write_sweep_json, SweepRow, SWEEP_CSV_HEADER};
pub use trajectory::{
    read_trajectory_csv, run_trajectory, write_trajectory_csv, write_trajectory_json, TrajectoryRecord,
    TRAJECTORY_CSV_HEADER,
};
pub use verify::{run_verify, write_verify_csv, write_verify_json, Suite, SuiteReport, VerifyHooks, VerifyReport};

/// Number of ones appended by [`Tail::Ones`].
pub const ONES_TAIL_BITS: usize = 40;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid {field}: {message}")]
    Config { field: &'static str, message: String },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{0}")]
    Core(Error),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl ExperimentError {
    pub fn config(field: &'static str, message: impl Into<String>) -> ExperimentError {
        ExperimentError::Config { field, message: message.into() }
    }

    /// 0 success, 1 verification failure, 2 configuration error, 3 capacity
    /// error.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Verification(_) | ExperimentError::Core(Error::BoundViolated { .. }) => 1,
            ExperimentError::Core(Error::Inconsistency(_)) => 1,
            ExperimentError::Capacity(_) | ExperimentError::Core(Error::Capacity { .. }) => 3,
            ExperimentError::Config { .. } | ExperimentError::Core(_) => 2,
            ExperimentError::Io(_) => 2,
        }
    }
}

impl From<Error> for ExperimentError {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity { .. } => ExperimentError::Capacity(e.to_string()),
            other => ExperimentError::Core(other),
        }
    }
}

impl From<csv::Error> for ExperimentError {
    fn from(e: csv::Error) -> Self {
        ExperimentError::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for ExperimentError {
    fn from(e: serde_json::Error) -> Self {
        ExperimentError::Io(io::Error::other(e))
    }
}

pub type ExperimentResult<T> = std::result::Result<T, ExperimentError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// Nothing past the given bits.
    #[default]
    Zero,
    /// Pad to `N` bits, then append [`ONES_TAIL_BITS`] ones.
    Ones,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BitSource {
    Explicit(BitString),
    Random { len: usize, seed: u64 },
}

/// How the initial string `ξ` is produced. The quantum state uses its first
/// `N` bits; the classical trajectory uses all of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StringSpec {
    pub source: BitSource,
    pub tail: Tail,
}

impl StringSpec {
    pub fn explicit(bits: BitString) -> StringSpec {
        StringSpec { source: BitSource::Explicit(bits), tail: Tail::Zero }
    }

    pub fn random(len: usize, seed: u64) -> StringSpec {
        StringSpec { source: BitSource::Random { len, seed }, tail: Tail::Zero }
    }

    pub fn with_tail(self, tail: Tail) -> StringSpec {
        StringSpec { tail, ..self }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.source {
            BitSource::Random { seed, .. } => Some(seed),
            BitSource::Explicit(_) => None,
        }
    }

    fn base(&self) -> ExperimentResult<BitString> {
        match &self.source {
            BitSource::Explicit(bits) => Ok(bits.clone()),
            BitSource::Random { len, seed } => {
                if *len > MAX_BITS {
                    return Err(ExperimentError::config("random-bits", format!("length {len} exceeds {MAX_BITS}")));
                }
                Ok(random_bits(*seed, *len))
            }
        }
    }

    /// The full string used for an `N`-qubit run.
    pub fn materialize(&self, n: QubitCount) -> ExperimentResult<BitString> {
        let base = self.base()?;
        match self.tail {
            Tail::Zero => Ok(base),
            Tail::Ones => {
                let padded = base.prefix(base.len().max(n.get()));
                let ones = BitString::from_bools(vec![true; ONES_TAIL_BITS])?;
                padded
                    .concat(&ones)
                    .map_err(|e| ExperimentError::config("tail", format!("ones tail does not fit: {e}")))
            }
        }
    }

    /// Echo for output metadata.
    pub fn describe(&self) -> StringEcho {
        match &self.source {
            BitSource::Explicit(bits) => StringEcho {
                source: "explicit",
                bits: Some(bits.to_string()),
                random_len: None,
                seed: None,
                tail: self.tail,
            },
            BitSource::Random { len, seed } => {
                StringEcho { source: "random", bits: None, random_len: Some(*len), seed: Some(*seed), tail: self.tail }
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StringEcho {
    pub source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tail: Tail,
}

/// `len` pseudo-random bits from `seed`.
///
/// Generator: ChaCha8 (as in `rand_chacha`) keyed with the seed's eight
/// little-endian bytes followed by 24 zero bytes. Bits are read most
/// significant first from successive `next_u64` outputs. Any implementation
/// of ChaCha8 reproduces these strings.
pub fn random_bits(seed: u64, len: usize) -> BitString {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    let mut bits = Vec::with_capacity(len);
    while bits.len() < len {
        let word = rng.next_u64();
        let take = (len - bits.len()).min(64);
        bits.extend((0..take).map(|i| (word >> (63 - i)) & 1 == 1));
    }
    BitString::from_bools(bits).expect("caller checks length")
}

/// `f64` with 17 significant digits, enough to round-trip exactly.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n_qubits: usize,
    pub string: StringSpec,
    /// Defaults to `n_qubits`.
    pub m_max: Option<usize>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    /// Checks the configuration and returns `(N, m_max)`.
    pub fn validate(&self) -> ExperimentResult<(QubitCount, usize)> {
        let n = QubitCount::new(self.n_qubits).map_err(|e| ExperimentError::config("n-qubits", e.to_string()))?;
        let m_max = self.m_max.unwrap_or(n.get());
        if m_max > n.get() {
            return Err(ExperimentError::config(
                "m-max",
                format!("{m_max} exceeds n-qubits = {n}; closed forms exist only for m <= N"),
            ));
        }
        Ok((n, m_max))
    }
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a C,
    seed: Option<u64>,
    records: &'a [R],
}

fn write_envelope<W: io::Write, C: Serialize, R: Serialize>(
    out: W,
    command: &'static str,
    config: &C,
    seed: Option<u64>,
    records: &[R],
) -> ExperimentResult<()> {
    let envelope = Envelope { tool: "qbaker", version: env!("CARGO_PKG_VERSION"), command, config, seed, records };
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &envelope)?;
    out.write_all(b"\n")?;
    Ok(())
}
