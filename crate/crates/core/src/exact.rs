//! Exact rational arithmetic helpers: every bound and min-cut in this crate
//! is computed over arbitrary-precision rationals, never floats.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Rational from a signed integer.
pub fn rat(v: i64) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

/// Rational from an unsigned count.
pub fn rat_u(v: usize) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

/// Rational `n/d`. Panics if `d == 0`; intended for literals in code and tests.
pub fn ratio(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Per-node storage capacity. `Unbounded` is the sentinel accepted by the
/// sweep CLI as `inf`, selecting the bandwidth-limited regime everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alpha {
    Finite(Rat),
    Unbounded,
}

impl Alpha {
    pub fn finite(value: Rat) -> Result<Alpha> {
        if value.is_negative() {
            return Err(Error::NegativeAlpha);
        }
        Ok(Alpha::Finite(value))
    }

    /// Finite capacity from a non-negative integer.
    pub fn from_int(v: u64) -> Alpha {
        Alpha::Finite(BigRational::from_integer(BigInt::from(v)))
    }

    /// `min(term, alpha)`.
    pub fn cap(&self, term: Rat) -> Rat {
        match self {
            Alpha::Unbounded => term,
            Alpha::Finite(a) => {
                if term <= *a {
                    term
                } else {
                    a.clone()
                }
            }
        }
    }

    /// True when the bandwidth term is strictly cut off by this capacity.
    pub fn truncates(&self, term: &Rat) -> bool {
        match self {
            Alpha::Unbounded => false,
            Alpha::Finite(a) => term > a,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Alpha::Unbounded)
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            Alpha::Finite(a) => Some(a),
            Alpha::Unbounded => None,
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(a) => write!(f, "{a}"),
            Alpha::Unbounded => write!(f, "inf"),
        }
    }
}

/// Parses `p/q`, an integer, or a decimal such as `0.35` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::InvalidNumber(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        let magnitude: BigInt = if digits.is_empty() {
            return Err(bad());
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let value = BigRational::new(magnitude, scale);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Parses a storage capacity; `inf` selects the unbounded sentinel.
pub fn parse_alpha(s: &str) -> Result<Alpha> {
    if s.trim().eq_ignore_ascii_case("inf") {
        return Ok(Alpha::Unbounded);
    }
    Alpha::finite(parse_rational(s)?)
}

/// Renders a rational with exactly six fractional digits, rounding ties to
/// the nearest even scaled integer (banker's rounding).
pub fn decimal6(value: &Rat) -> String {
    let scale = BigInt::from(1_000_000u64);
    let scaled_num = value.numer() * &scale;
    let den = value.denom().clone();
    let negative = scaled_num.is_negative();
    let (mut quot, rem) = scaled_num.abs().div_rem(&den);
    let twice = &rem * BigInt::from(2u32);
    if twice > den || (twice == den && quot.is_odd()) {
        quot += BigInt::one();
    }
    let (int_part, frac_part) = quot.div_rem(&scale);
    let sign = if negative && !quot.is_zero() { "-" } else { "" };
    format!("{sign}{int_part}.{frac_part:06}")
}
