//! Exact rationals with a power-of-two denominator.
//!
//! Every classical coordinate and every closed-form expectation value in this
//! crate lives in the dyadic rationals, so all of them are carried by
//! [`Dyadic`] and compared structurally.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::error::Error;

/// Largest denominator exponent a [`Dyadic`] may carry.
///
/// Keeps `10 * 2^MAX_LOG2_DENOM` inside a `u128`, which the decimal formatter
/// relies on.
pub const MAX_LOG2_DENOM: u32 = 124;

/// `numerator / 2^log2_denom` in canonical form: whenever the exponent is
/// positive the numerator is odd, and zero is stored as `0/2^0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: i128,
    log2_denom: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { numerator: 0, log2_denom: 0 };
    pub const ONE: Dyadic = Dyadic { numerator: 1, log2_denom: 0 };
    pub const HALF: Dyadic = Dyadic { numerator: 1, log2_denom: 1 };

    /// Builds `numerator / 2^log2_denom` and normalizes it.
    ///
    /// Panics if the canonical exponent exceeds [`MAX_LOG2_DENOM`].
    pub fn new(numerator: i128, log2_denom: u32) -> Dyadic {
        Dyadic::checked_new(numerator, log2_denom).expect("dyadic denominator exponent out of range")
    }

    pub fn checked_new(numerator: i128, log2_denom: u32) -> Option<Dyadic> {
        if numerator == 0 {
            return Some(Dyadic::ZERO);
        }
        let tz = numerator.trailing_zeros().min(log2_denom);
        let log2_denom = log2_denom - tz;
        if log2_denom > MAX_LOG2_DENOM {
            return None;
        }
        Some(Dyadic { numerator: numerator >> tz, log2_denom })
    }

    pub fn from_int(value: i64) -> Dyadic {
        Dyadic::new(value as i128, 0)
    }

    /// `2^exponent` for any (possibly negative) exponent.
    pub fn pow2(exponent: i32) -> Dyadic {
        if exponent >= 0 {
            assert!(exponent < 126, "2^{exponent} does not fit a dyadic numerator");
            Dyadic { numerator: 1i128 << exponent, log2_denom: 0 }
        } else {
            Dyadic::new(1, exponent.unsigned_abs())
        }
    }

    pub fn numerator(&self) -> i128 {
        self.numerator
    }

    pub fn log2_denom(&self) -> u32 {
        self.log2_denom
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn is_negative(&self) -> bool {
        self.numerator < 0
    }

    pub fn abs(self) -> Dyadic {
        Dyadic { numerator: self.numerator.abs(), ..self }
    }

    /// Multiplies by `2^k`; `k` may be negative.
    pub fn checked_mul_pow2(self, k: i32) -> Option<Dyadic> {
        if self.numerator == 0 {
            return Some(self);
        }
        if k >= 0 {
            let k = k as u32;
            if k <= self.log2_denom {
                return Some(Dyadic { numerator: self.numerator, log2_denom: self.log2_denom - k });
            }
            let shift = k - self.log2_denom;
            let numerator = checked_shl(self.numerator, shift)?;
            Some(Dyadic { numerator, log2_denom: 0 })
        } else {
            let log2_denom = self.log2_denom.checked_add(k.unsigned_abs())?;
            Dyadic::checked_new(self.numerator, log2_denom)
        }
    }

    pub fn mul_pow2(self, k: i32) -> Dyadic {
        self.checked_mul_pow2(k).expect("dyadic overflow in mul_pow2")
    }

    pub fn checked_add(self, rhs: Dyadic) -> Option<Dyadic> {
        let (a, b, log2_denom) = align(self, rhs)?;
        Dyadic::checked_new(a.checked_add(b)?, log2_denom)
    }

    pub fn checked_sub(self, rhs: Dyadic) -> Option<Dyadic> {
        let (a, b, log2_denom) = align(self, rhs)?;
        Dyadic::checked_new(a.checked_sub(b)?, log2_denom)
    }

    /// Largest integer not above the value.
    pub fn floor(self) -> i128 {
        // Arithmetic shift rounds toward negative infinity.
        self.numerator >> self.log2_denom
    }

    /// `self - floor(self)`, in `[0, 1)`.
    pub fn fract(self) -> Dyadic {
        let mask = (1i128 << self.log2_denom) - 1;
        Dyadic::new(self.numerator & mask, self.log2_denom)
    }

    pub fn to_f64(self) -> f64 {
        (self.numerator as f64) * 2f64.powi(-(self.log2_denom as i32))
    }

    /// Exact decimal expansion, e.g. `0.625` or `-1.25`.
    pub fn to_decimal_string(&self) -> String {
        let negative = self.numerator < 0;
        let magnitude = self.numerator.unsigned_abs();
        let int_part = magnitude >> self.log2_denom;
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&int_part.to_string());
        if self.log2_denom > 0 {
            out.push('.');
            let mask = (1u128 << self.log2_denom) - 1;
            let mut rem = magnitude & mask;
            // A canonical dyadic with exponent k has exactly k decimal digits.
            while rem != 0 {
                rem *= 10;
                out.push(char::from(b'0' + (rem >> self.log2_denom) as u8));
                rem &= mask;
            }
        }
        out
    }
}

fn checked_shl(value: i128, shift: u32) -> Option<i128> {
    if shift >= 127 {
        return None;
    }
    let shifted = value.checked_mul(1i128 << shift)?;
    Some(shifted)
}

fn align(a: Dyadic, b: Dyadic) -> Option<(i128, i128, u32)> {
    let log2_denom = a.log2_denom.max(b.log2_denom);
    let an = checked_shl(a.numerator, log2_denom - a.log2_denom)?;
    let bn = checked_shl(b.numerator, log2_denom - b.log2_denom)?;
    Some((an, bn, log2_denom))
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::ZERO
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        self.checked_add(rhs).expect("dyadic overflow in add")
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self.checked_sub(rhs).expect("dyadic overflow in sub")
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { numerator: -self.numerator, ..self }
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |acc, x| acc + x)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        // Fractional parts are below 2^MAX_LOG2_DENOM once aligned, so this
        // never overflows even when the integer parts are huge.
        self.floor().cmp(&other.floor()).then_with(|| {
            let (a, b, _) = align(self.fract(), other.fract()).expect("fractions align");
            a.cmp(&b)
        })
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    /// `numerator/2^k`, the lossless exchange format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.log2_denom)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Parses `p/2^k`. Non-canonical input such as `4/2^3` is accepted and
    /// normalized.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Parse(format!("not a dyadic rational `p/2^k`: {s:?}"));
        let (num, den) = s.trim().split_once('/').ok_or_else(bad)?;
        let exp = den.strip_prefix("2^").ok_or_else(bad)?;
        let numerator: i128 = num.parse().map_err(|_| bad())?;
        let log2_denom: u32 = exp.parse().map_err(|_| bad())?;
        Dyadic::checked_new(numerator, log2_denom).ok_or_else(bad)
    }
}

impl serde::Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = <std::borrow::Cow<'de, str>>::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
