//! Extended nonnegative distances: an exact scalar or `∞`.

use std::fmt;
use std::hash::Hash;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::Error;

/// Exact ordered scalar used for finite distances.
///
/// Implemented for the rational types of `num-rational`. Floating point types
/// are deliberately not implementors: every law check relies on decidable
/// equality of distances.
pub trait Scalar:
    Num + Clone + Ord + Hash + fmt::Debug + fmt::Display + FromStr + FromPrimitive + Send + Sync + 'static
{
}

impl Scalar for Ratio<i64> {}
impl Scalar for Ratio<i128> {}
impl Scalar for Ratio<BigInt> {}

/// A value in `[0, ∞]`.
///
/// The derived order places every finite value below `Infinite`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtDistance<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> ExtDistance<S> {
    /// Checked constructor; rejects negative values.
    pub fn new(value: S) -> Result<Self, Error> {
        if value < S::zero() {
            return Err(Error::NegativeEntry(value.to_string()));
        }
        Ok(ExtDistance::Finite(value))
    }

    pub fn zero() -> Self {
        ExtDistance::Finite(S::zero())
    }

    pub fn one() -> Self {
        ExtDistance::Finite(S::one())
    }

    pub fn infinity() -> Self {
        ExtDistance::Infinite
    }

    /// `numer / denom` as a finite distance. Panics on a zero denominator.
    pub fn ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        let n = S::from_u64(numer).expect("scalar can represent numerator");
        let d = S::from_u64(denom).expect("scalar can represent denominator");
        ExtDistance::Finite(n / d)
    }

    pub fn integer(value: u64) -> Self {
        Self::ratio(value, 1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtDistance::Finite(v) if v.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtDistance::Finite(_))
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            ExtDistance::Finite(v) => Some(v),
            ExtDistance::Infinite => None,
        }
    }
}

impl<S: Scalar> Add for ExtDistance<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtDistance::Finite(a), ExtDistance::Finite(b)) => ExtDistance::Finite(a + b),
            _ => ExtDistance::Infinite,
        }
    }
}

impl<S: Scalar> Add for &ExtDistance<S> {
    type Output = ExtDistance<S>;

    fn add(self, rhs: Self) -> ExtDistance<S> {
        match (self, rhs) {
            (ExtDistance::Finite(a), ExtDistance::Finite(b)) => ExtDistance::Finite(a.clone() + b.clone()),
            _ => ExtDistance::Infinite,
        }
    }
}

impl<S: Scalar> Sum for ExtDistance<S> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, d| acc + d)
    }
}

/// Prints `inf`, an integer `p`, or a reduced fraction `p/q`.
impl<S: Scalar> fmt::Display for ExtDistance<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtDistance::Finite(v) => write!(f, "{v}"),
            ExtDistance::Infinite => f.write_str("inf"),
        }
    }
}

impl<S: Scalar> FromStr for ExtDistance<S> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        if t == "inf" || t == "∞" {
            return Ok(ExtDistance::Infinite);
        }
        let value: S = t.parse().map_err(|_| Error::Parse(format!("invalid distance {s:?}")))?;
        Self::new(value)
    }
}

impl<S: Scalar> Serialize for ExtDistance<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        serializer.collect_str(self)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for ExtDistance<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type D = ExtDistance<Ratio<i64>>;

    #[test]
    fn infinity_absorbs_and_dominates() {
        let one = D::one();
        assert_eq!(one.clone() + D::Infinite, D::Infinite);
        assert!(one < D::Infinite);
        assert!(D::zero() < one);
        assert_eq!(vec![D::ratio(1, 2), D::ratio(1, 3)].into_iter().sum::<D>(), D::ratio(5, 6));
    }

    #[test]
    fn parse_and_print() {
        assert_eq!("1/2".parse::<D>().unwrap(), D::ratio(1, 2));
        assert_eq!("2/4".parse::<D>().unwrap().to_string(), "1/2");
        assert_eq!("3".parse::<D>().unwrap().to_string(), "3");
        assert_eq!("inf".parse::<D>().unwrap(), D::Infinite);
        assert!(matches!("-1".parse::<D>(), Err(Error::NegativeEntry(_))));
        assert!(matches!("x".parse::<D>(), Err(Error::Parse(_))));
    }

    #[test]
    fn big_rationals_work_too() {
        type B = ExtDistance<Ratio<BigInt>>;
        let a: B = "12345678901234567890123/2".parse().unwrap();
        assert!(a.clone() + B::one() > a);
    }
}
