//! Classical baker's map and its Bernoulli-shift representation.
//!
//! A point `(q, p)` of the unit square is a two-sided binary string
//! `… ξ₋₁ ξ₀ . ξ₁ ξ₂ …` with `q = Σ_{k≥1} ξ_k 2^{-k}` and
//! `p = Σ_{k≥0} ξ_{-k} 2^{-k-1}`. One step of the map moves the dot one place
//! to the right. Strings are finite with an implicit all-zero tail, so every
//! coordinate is an exact [`Dyadic`].

use std::fmt;
use std::str::FromStr;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Longest explicitly stored string. Values carry at most this many binary
/// digits, well inside the dyadic exponent range.
pub const MAX_BITS: usize = 120;

/// A finite binary string `ξ₁ ξ₂ … ξ_L`, read as an infinite string whose bits
/// past `L` are all zero.
///
/// Equality compares the infinite strings, so `10` and `1000` are equal.
#[derive(Clone, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: &[u8]) -> Result<BitString> {
        let bits = bits
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        BitString::from_bools(bits)
    }

    pub fn from_bools(bits: Vec<bool>) -> Result<BitString> {
        if bits.len() > MAX_BITS {
            return Err(Error::StringTooLong { len: bits.len(), max: MAX_BITS });
        }
        Ok(BitString { bits })
    }

    pub fn zeros(len: usize) -> Result<BitString> {
        BitString::from_bools(vec![false; len])
    }

    /// Binary digits of a fraction in `[0, 1)`, one per power of two in its
    /// denominator.
    pub fn from_fraction(value: Dyadic) -> Result<BitString> {
        if value.is_negative() || value >= Dyadic::ONE {
            return Err(Error::Inconsistency(format!("{value} has no finite expansion in [0, 1)")));
        }
        let k = value.log2_denom();
        let num = value.numerator();
        BitString::from_bools((1..=k).map(|i| (num >> (k - i)) & 1 == 1).collect())
    }

    /// Stored length `L`.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `ξ_k` with 1-based `k`; zero past the stored length.
    pub fn bit(&self, k: usize) -> bool {
        assert!(k >= 1, "bit indices start at 1");
        self.bits.get(k - 1).copied().unwrap_or(false)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Position of the last `1`, or 0 for the all-zero string.
    pub fn support_len(&self) -> usize {
        self.bits.iter().rposition(|&b| b).map_or(0, |i| i + 1)
    }

    /// `ξ₁ … ξ_len`, zero-padded if the stored string is shorter.
    pub fn prefix(&self, len: usize) -> BitString {
        BitString { bits: (1..=len).map(|k| self.bit(k)).collect() }
    }

    /// Appends `extra` to the end of the stored string.
    pub fn concat(&self, extra: &BitString) -> Result<BitString> {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&extra.bits);
        BitString::from_bools(bits)
    }

    /// `Σ_{k=1}^{L} ξ_k 2^{-k}`.
    pub fn value(&self) -> Dyadic {
        self.tail_value(0)
    }

    /// `Σ_{k=1}^{L-m} ξ_{m+k} 2^{-k}`: the value of the string with its first
    /// `m` bits dropped.
    pub fn tail_value(&self, m: usize) -> Dyadic {
        let tail = self.bits.get(m..).unwrap_or(&[]);
        let len = tail.iter().rposition(|&b| b).map_or(0, |i| i + 1);
        let numerator = tail[..len].iter().fold(0i128, |acc, &b| (acc << 1) | i128::from(b));
        Dyadic::new(numerator, len as u32)
    }

    fn trimmed(&self) -> &[bool] {
        &self.bits[..self.support_len()]
    }
}

impl PartialEq for BitString {
    fn eq(&self, other: &Self) -> bool {
        self.trimmed() == other.trimmed()
    }
}

impl Eq for BitString {}

impl std::hash::Hash for BitString {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.trimmed().hash(state);
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        BitString::from_bools(bits)
    }
}

/// A point of the unit square with exact coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhasePoint {
    q: Dyadic,
    p: Dyadic,
}

impl PhasePoint {
    pub fn new(q: Dyadic, p: Dyadic) -> Result<PhasePoint> {
        let unit = |x: Dyadic| x >= Dyadic::ZERO && x <= Dyadic::ONE;
        if !unit(q) || !unit(p) {
            return Err(Error::Inconsistency(format!("({q}, {p}) lies outside the unit square")));
        }
        Ok(PhasePoint { q, p })
    }

    pub fn q(&self) -> Dyadic {
        self.q
    }

    pub fn p(&self) -> Dyadic {
        self.p
    }
}

/// `… ξ₋₁ ξ₀ . ξ₁ ξ₂ …` with finite support on both sides.
///
/// `past` holds `ξ₀, ξ₋₁, ξ₋₂, …` (nearest the dot first), `future` holds
/// `ξ₁, ξ₂, …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct TwoSidedString {
    past: BitString,
    future: BitString,
}

impl TwoSidedString {
    pub fn new(past: BitString, future: BitString) -> TwoSidedString {
        TwoSidedString { past, future }
    }

    pub fn past(&self) -> &BitString {
        &self.past
    }

    pub fn future(&self) -> &BitString {
        &self.future
    }

    /// Moves the dot one place to the right: `ξ'_m = ξ_{m+1}`.
    ///
    /// Fails only if the past would need more than [`MAX_BITS`] significant
    /// bits.
    pub fn shift(&self) -> Result<TwoSidedString> {
        let mut past = Vec::with_capacity(self.past.len() + 1);
        past.push(self.future.bit(1));
        past.extend_from_slice(self.past.trimmed());
        let future = self.future.bits.get(1..).unwrap_or(&[]).to_vec();
        Ok(TwoSidedString { past: trim(past)?, future: BitString { bits: future } })
    }

    /// Moves the dot one place to the left; inverse of [`shift`](Self::shift).
    pub fn unshift(&self) -> Result<TwoSidedString> {
        let mut future = Vec::with_capacity(self.future.len() + 1);
        future.push(self.past.bit(1));
        future.extend_from_slice(self.future.trimmed());
        let past = self.past.bits.get(1..).unwrap_or(&[]).to_vec();
        Ok(TwoSidedString { past: BitString { bits: past }, future: trim(future)? })
    }
}

fn trim(mut bits: Vec<bool>) -> Result<BitString> {
    let len = bits.iter().rposition(|&b| b).map_or(0, |i| i + 1);
    bits.truncate(len);
    BitString::from_bools(bits)
}

/// Reads off `(q, p)` from a two-sided string.
pub fn decode_phase_point(s: &TwoSidedString) -> PhasePoint {
    PhasePoint { q: s.future.value(), p: s.past.value() }
}

/// Inverse of [`decode_phase_point`] for points with `q, p < 1`.
pub fn encode_phase_point(x: PhasePoint) -> Result<TwoSidedString> {
    Ok(TwoSidedString { past: BitString::from_fraction(x.p)?, future: BitString::from_fraction(x.q)? })
}

/// One step of the baker's map on exact coordinates.
///
/// The left half is `q < 1/2`; `q = 1/2` goes to the right branch. With
/// zero-tail strings `1/2` is `0.1000…`, whose shift lands on `q = 0`, so this
/// split is the one for which the map and the shift agree everywhere.
pub fn baker_step(x: PhasePoint) -> PhasePoint {
    if x.q < Dyadic::HALF {
        PhasePoint { q: x.q.mul_pow2(1), p: x.p.mul_pow2(-1) }
    } else {
        PhasePoint { q: x.q.mul_pow2(1) - Dyadic::ONE, p: (x.p + Dyadic::ONE).mul_pow2(-1) }
    }
}

/// Classical position after `m` steps, `q_m = Σ_k ξ_{m+k} 2^{-k}`.
pub fn classical_q(xi: &BitString, m: usize) -> Dyadic {
    xi.tail_value(m)
}
