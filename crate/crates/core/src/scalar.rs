//! Coefficient rings.
//!
//! Every algebra in this crate is a free module over some scalar type. The
//! structure constants (products, coproducts, antipodes of basis elements) are
//! all integers, so anything that can absorb an `i64` and do ring arithmetic
//! works. Exact rationals are the default; `f64` and `i64` are supported for
//! quick numerical experiments.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

/// A commutative ring of characteristic zero, as far as this crate cares.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_int(n: i64) -> Self;

    fn is_negative(&self) -> bool;

    /// Render for the `p/q` text format.
    fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parse from the `p/q` text format.
    fn parse_text(s: &str) -> Option<Self>;

    /// Exact division by a nonzero integer, when the ring has it.
    fn div_int(&self, n: i64) -> Option<Self>;

    /// Exact division, when defined.
    fn checked_div(&self, other: &Self) -> Option<Self>;
}

impl Scalar for BigRational {
    fn is_negative(&self) -> bool {
        num_traits::Signed::is_negative(self)
    }

    fn from_int(n: i64) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }

    fn parse_text(s: &str) -> Option<Self> {
        parse_ratio(s).map(|(n, d)| Ratio::new(n, d))
    }

    fn div_int(&self, n: i64) -> Option<Self> {
        (n != 0).then(|| self / Self::from_int(n))
    }

    fn checked_div(&self, other: &Self) -> Option<Self> {
        (!other.is_zero()).then(|| self / other)
    }
}

impl Scalar for Ratio<i64> {
    fn is_negative(&self) -> bool {
        num_traits::Signed::is_negative(self)
    }

    fn from_int(n: i64) -> Self {
        Ratio::from_integer(n)
    }

    fn parse_text(s: &str) -> Option<Self> {
        let (n, d) = parse_ratio(s)?;
        let n: i64 = n.try_into().ok()?;
        let d: i64 = d.try_into().ok()?;
        Some(Ratio::new(n, d))
    }

    fn div_int(&self, n: i64) -> Option<Self> {
        (n != 0).then(|| self / n)
    }

    fn checked_div(&self, other: &Self) -> Option<Self> {
        (!other.is_zero()).then(|| self / other)
    }
}

impl Scalar for i64 {
    fn is_negative(&self) -> bool {
        *self < 0
    }

    fn from_int(n: i64) -> Self {
        n
    }

    fn parse_text(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }

    fn div_int(&self, n: i64) -> Option<Self> {
        (n != 0 && self % n == 0).then(|| self / n)
    }

    fn checked_div(&self, other: &Self) -> Option<Self> {
        self.div_int(*other)
    }
}

impl Scalar for f64 {
    fn is_negative(&self) -> bool {
        *self < 0.0
    }

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn parse_text(s: &str) -> Option<Self> {
        match s.split_once('/') {
            Some((n, d)) => Some(n.trim().parse::<f64>().ok()? / d.trim().parse::<f64>().ok()?),
            None => s.trim().parse().ok(),
        }
    }

    fn div_int(&self, n: i64) -> Option<Self> {
        (n != 0).then(|| self / n as f64)
    }

    fn checked_div(&self, other: &Self) -> Option<Self> {
        (*other != 0.0).then(|| self / other)
    }
}

fn parse_ratio(s: &str) -> Option<(BigInt, BigInt)> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse().ok()?, d.trim().parse().ok()?),
        None => (s.parse().ok()?, BigInt::one()),
    };
    (!d.is_zero()).then_some((n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let x = BigRational::parse_text("-6/4").unwrap();
        assert_eq!(x.to_text(), "-3/2");
        assert_eq!(BigRational::parse_text("7").unwrap(), BigRational::from_int(7));
        assert!(BigRational::parse_text("1/0").is_none());
    }

    #[test]
    fn integer_division_is_exact_only() {
        assert_eq!(6i64.div_int(3), Some(2));
        assert_eq!(7i64.div_int(3), None);
        assert_eq!(f64::from_int(3).div_int(2), Some(1.5));
    }
}
