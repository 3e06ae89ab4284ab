//! Exact weights.
//!
//! Every derived weight in the library is a rational number with one shared
//! denominator per hopset. A [`Weight`] is the numerator over that
//! denominator; original integer edge weights embed as `w * denom`.

use std::fmt;
use std::ops::Add;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Numerator of an exact rational weight over a shared denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(pub u128);

impl Weight {
    pub const ZERO: Weight = Weight(0);
    /// Sentinel used for unreached vertices inside hot loops.
    pub const INFINITY: Weight = Weight(u128::MAX);

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0 != u128::MAX
    }

    #[inline]
    pub fn saturating_add(self, rhs: Weight) -> Weight {
        Weight(self.0.saturating_add(rhs.0))
    }

    /// The value as a reduced fraction `num/den`.
    pub fn to_ratio(self, denom: u128) -> Ratio<u128> {
        Ratio::new(self.0, denom)
    }
}

impl Add for Weight {
    type Output = Weight;

    #[inline]
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            write!(f, "{}", self.0)
        } else {
            f.write_str("inf")
        }
    }
}

/// Parses `"3/10"`, `"0.3"` or `"2"` into an exact non-negative rational.
pub fn parse_ratio(text: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidParameter(format!("not a non-negative rational: {text:?}"));
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: u64 = num.trim().parse().map_err(|_| bad())?;
        let den: u64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(num, den));
    }
    let (int_part, frac_part) = text.split_once('.').unwrap_or((text, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let den = 10u64.checked_pow(frac_part.len() as u32).ok_or_else(bad)?;
    let int: u64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| bad())?
    };
    let frac: u64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| bad())?
    };
    let num = int
        .checked_mul(den)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Ratio::new(num, den))
}

pub fn format_ratio<T: fmt::Display + Clone + Integer>(r: &Ratio<T>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn big(r: Ratio<u64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// `floor(value * denom)` clamped into `u128`; negative values clamp to 0.
pub(crate) fn floor_on_grid(value: &BigRational, denom: u128) -> Weight {
    let scaled = value * BigRational::from_integer(BigInt::from(denom));
    let floor = scaled.floor().to_integer();
    if floor <= BigInt::zero() {
        return Weight::ZERO;
    }
    Weight(floor.to_u128().unwrap_or(u128::MAX - 1))
}

pub(crate) fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub(crate) fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

/// `floor(r)` of a non-negative rational, saturated into `u64`.
pub(crate) fn floor_u64(r: &BigRational) -> u64 {
    let f = r.floor().to_integer();
    if f <= BigInt::zero() {
        0
    } else {
        BigUint::try_from(f)
            .ok()
            .and_then(|v| v.to_u64())
            .unwrap_or(u64::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_and_fraction_forms() {
        assert_eq!(parse_ratio("0.3").unwrap(), Ratio::new(3, 10));
        assert_eq!(parse_ratio("3/10").unwrap(), Ratio::new(3, 10));
        assert_eq!(parse_ratio("2").unwrap(), Ratio::from_integer(2));
        assert_eq!(parse_ratio(".5").unwrap(), Ratio::new(1, 2));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("-1").is_err());
        assert!(parse_ratio("abc").is_err());
    }

    #[test]
    fn grid_floor_is_exact() {
        let v = BigRational::new(BigInt::from(256), BigInt::from(25)); // 10.24
        assert_eq!(floor_on_grid(&v, 100), Weight(1024));
        assert_eq!(floor_on_grid(&v, 1), Weight(10));
        assert_eq!(floor_on_grid(&v, 3), Weight(30));
    }
}
