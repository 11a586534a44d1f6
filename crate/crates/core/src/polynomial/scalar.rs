//! Exact rational scalars.
//!
//! [`Scalar`] is `num_rational::BigRational`, which keeps every value in lowest
//! terms with a positive denominator after each operation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-1.25"`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let s = text.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Scalar::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let value = Scalar::new(num, den);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Scalar::from_integer(n))
}

/// Canonical `"num/den"` rendering used by every file format.
pub fn format_scalar(value: &Scalar) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Shortest human rendering: integers without a denominator.
pub fn display_scalar(value: &Scalar) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn to_f64(value: &Scalar) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Rounds `x` to the nearest multiple of `2^-bits`.
pub fn round_dyadic(x: f64, bits: u32) -> Option<Scalar> {
    if !x.is_finite() {
        return None;
    }
    let scale = 2f64.powi(bits as i32);
    let scaled = (x * scale).round();
    if !scaled.is_finite() {
        return None;
    }
    let num = Scalar::from_float(scaled)?;
    Some(num / Scalar::from_integer(BigInt::one() << bits as usize))
}

pub fn two_pow(k: u32) -> Scalar {
    Scalar::from_integer(BigInt::one() << k as usize)
}

pub fn pow(base: &Scalar, exp: u32) -> Scalar {
    num_traits::pow(base.clone(), exp as usize)
}

pub fn is_zero(value: &Scalar) -> bool {
    value.is_zero()
}
