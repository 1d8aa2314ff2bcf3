//! Exact fixed-point money and threshold ratios.
//!
//! Every utility value is an integer count of 1/10 000 currency units, so
//! sums, maxima and threshold comparisons never drift.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fixed-point scale: raw units per currency unit.
pub const SCALE: u64 = 10_000;
const SCALE_DIGITS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecimalError {
    #[error("empty number")]
    Empty,
    #[error("invalid decimal `{0}`")]
    Invalid(String),
    #[error("`{0}` has more than {SCALE_DIGITS} fractional digits")]
    TooPrecise(String),
    #[error("`{0}` is out of range")]
    Overflow(String),
}

/// A non-negative utility in fixed point at [`SCALE`].
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Utility(u64);

impl Utility {
    pub const ZERO: Utility = Utility(0);

    pub const fn from_raw(raw: u64) -> Self {
        Utility(raw)
    }

    /// Whole currency units.
    pub const fn from_units(units: u64) -> Self {
        Utility(units * SCALE)
    }

    pub const fn raw(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn checked_add(self, rhs: Utility) -> Option<Utility> {
        self.0.checked_add(rhs.0).map(Utility)
    }

    /// Unit profit times a purchase quantity.
    pub fn checked_mul_qty(self, quantity: u32) -> Option<Utility> {
        self.0.checked_mul(u64::from(quantity)).map(Utility)
    }

    pub fn saturating_sub(self, rhs: Utility) -> Utility {
        Utility(self.0.saturating_sub(rhs.0))
    }

    /// Lossy conversion for reporting only.
    pub fn as_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }
}

impl Add for Utility {
    type Output = Utility;
    fn add(self, rhs: Utility) -> Utility {
        Utility(self.0 + rhs.0)
    }
}

impl AddAssign for Utility {
    fn add_assign(&mut self, rhs: Utility) {
        self.0 += rhs.0;
    }
}

impl Sub for Utility {
    type Output = Utility;
    fn sub(self, rhs: Utility) -> Utility {
        Utility(self.0 - rhs.0)
    }
}

impl Sum for Utility {
    fn sum<I: Iterator<Item = Utility>>(iter: I) -> Utility {
        iter.fold(Utility::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Utility> for Utility {
    fn sum<I: Iterator<Item = &'a Utility>>(iter: I) -> Utility {
        iter.copied().sum()
    }
}

/// Renders with trailing fractional zeros trimmed: `160`, `44.1`, `0.01`.
impl fmt::Display for Utility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / SCALE;
        let frac = self.0 % SCALE;
        if frac == 0 {
            return write!(f, "{whole}");
        }
        let digits = format!("{frac:0width$}", width = SCALE_DIGITS);
        write!(f, "{whole}.{}", digits.trim_end_matches('0'))
    }
}

impl FromStr for Utility {
    type Err = DecimalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (mantissa, scale) = parse_decimal(s)?;
        if scale > SCALE_DIGITS as u32 {
            // Extra digits are fine only when they are zeros.
            let excess = 10u128.pow(scale - SCALE_DIGITS as u32);
            if mantissa % excess != 0 {
                return Err(DecimalError::TooPrecise(s.to_string()));
            }
            return u64::try_from(mantissa / excess)
                .map(Utility)
                .map_err(|_| DecimalError::Overflow(s.to_string()));
        }
        let factor = 10u128.pow(SCALE_DIGITS as u32 - scale);
        mantissa
            .checked_mul(factor)
            .and_then(|v| u64::try_from(v).ok())
            .map(Utility)
            .ok_or_else(|| DecimalError::Overflow(s.to_string()))
    }
}

/// Splits an unsigned decimal literal into `(digits, fractional digit count)`.
fn parse_decimal(s: &str) -> Result<(u128, u32), DecimalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(DecimalError::Empty);
    }
    let s = s.strip_prefix('+').unwrap_or(s);
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(DecimalError::Invalid(s.to_string()));
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(DecimalError::Invalid(s.to_string()));
    }
    if frac_part.len() > 30 || int_part.len() > 30 {
        return Err(DecimalError::Overflow(s.to_string()));
    }
    let mut mantissa: u128 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        mantissa = mantissa
            .checked_mul(10)
            .and_then(|m| m.checked_add(u128::from(b - b'0')))
            .ok_or_else(|| DecimalError::Overflow(s.to_string()))?;
    }
    Ok((mantissa, frac_part.len() as u32))
}

/// An exact decimal ratio such as the relative threshold δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    numerator: u128,
    denominator: u128,
}

impl Ratio {
    pub fn numerator(&self) -> u128 {
        self.numerator
    }

    pub fn denominator(&self) -> u128 {
        self.denominator
    }

    /// `ceil(self * total)`, so a threshold never admits a value the exact
    /// real-valued threshold would reject.
    pub fn ceil_mul(&self, total: Utility) -> Utility {
        let product = self.numerator * u128::from(total.raw());
        let q = product.div_ceil(self.denominator);
        Utility(u64::try_from(q).unwrap_or(u64::MAX))
    }

    pub fn as_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl FromStr for Ratio {
    type Err = DecimalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (numerator, scale) = parse_decimal(s)?;
        if scale > 18 {
            return Err(DecimalError::TooPrecise(s.to_string()));
        }
        Ok(Ratio {
            numerator,
            denominator: 10u128.pow(scale),
        })
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.numerator / self.denominator;
        let frac = self.numerator % self.denominator;
        if frac == 0 {
            return write!(f, "{whole}");
        }
        let width = self.denominator.ilog10() as usize;
        let digits = format!("{frac:0width$}");
        write!(f, "{whole}.{}", digits.trim_end_matches('0'))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_renders() {
        let u: Utility = "0.01".parse().unwrap();
        assert_eq!(u.raw(), 100);
        assert_eq!(u.to_string(), "0.01");
        assert_eq!("5".parse::<Utility>().unwrap(), Utility::from_units(5));
        assert_eq!("44.10000".parse::<Utility>().unwrap().to_string(), "44.1");
        assert_eq!(Utility::from_raw(1).to_string(), "0.0001");
    }

    #[test]
    fn rejects_bad_decimals() {
        assert!(matches!(
            "1.00001".parse::<Utility>(),
            Err(DecimalError::TooPrecise(_))
        ));
        assert!(matches!(
            "-1".parse::<Utility>(),
            Err(DecimalError::Invalid(_))
        ));
        assert!(matches!("".parse::<Utility>(), Err(DecimalError::Empty)));
        assert!(matches!(
            ".".parse::<Utility>(),
            Err(DecimalError::Invalid(_))
        ));
        assert!("1e3".parse::<Utility>().is_err());
    }

    #[test]
    fn threshold_is_exact() {
        let delta: Ratio = "0.1".parse().unwrap();
        assert_eq!(
            delta.ceil_mul(Utility::from_units(441)),
            "44.1".parse().unwrap()
        );
        let third: Ratio = "0.3333".parse().unwrap();
        // 0.3333 * 0.0001 rounds up to one raw unit
        assert_eq!(third.ceil_mul(Utility::from_raw(1)).raw(), 1);
        assert_eq!(delta.to_string(), "0.1");
        assert_eq!("1.01".parse::<Ratio>().unwrap().to_string(), "1.01");
    }
}
