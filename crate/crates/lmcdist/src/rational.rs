//! Exact rational arithmetic helpers.
//!
//! All decision procedures in this crate work over arbitrary-precision
//! fractions; [`Rational`] is the shared number type. The helpers here parse
//! and format the `p/q` literals used by the `.lmc` text format and by the
//! command line.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

/// Arbitrary-precision fraction, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for a rational from machine integers. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses a rational literal: `p/q`, an integer, or a finite decimal such as
/// `0.25` (converted exactly). An optional leading sign is accepted.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).ok()?;
        let den = BigInt::from_str(den.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole_int = if whole == "-" || whole.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(whole).ok()?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_int = BigInt::from_str(frac).ok()?;
        let magnitude = whole_int.abs() * &scale + frac_int;
        let signed = if negative { -magnitude } else { magnitude };
        return Some(Rational::new(signed, scale));
    }
    BigInt::from_str(s).ok().map(Rational::from_integer)
}

/// Formats a rational as `p/q`, or just `p` when the denominator is 1. The
/// output parses back to the same value.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest `f64` rendering. Saturates for values outside the `f64` range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let num = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let den = r.denom().to_f64().unwrap_or(f64::INFINITY);
        num / den
    })
}
