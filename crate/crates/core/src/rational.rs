//! Exact nonnegative rationals for probability accounting.
//!
//! Every probability in this crate is a ratio of two exact counts; floats
//! only ever appear when a report is rendered for humans. Values are kept
//! in lowest terms with a positive denominator, so equality is structural.

use std::cmp::Ordering;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A nonnegative rational in lowest terms. Denominator is always positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExactRational {
    num: u64,
    den: u64,
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn reduce(num: u128, den: u128) -> ExactRational {
    debug_assert!(den != 0);
    let g = gcd_u128(num, den);
    ExactRational {
        num: u64::try_from(num / g).expect("rational numerator overflow"),
        den: u64::try_from(den / g).expect("rational denominator overflow"),
    }
}

impl ExactRational {
    pub const ZERO: ExactRational = ExactRational { num: 0, den: 1 };
    pub const ONE: ExactRational = ExactRational { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(reduce(num as u128, den as u128))
    }

    pub fn from_integer(value: u64) -> Self {
        ExactRational { num: value, den: 1 }
    }

    /// 1 / 2^k, the building block of the closed-form probabilities.
    pub fn pow2_reciprocal(k: u32) -> Result<Self> {
        if k >= 64 {
            return Err(Error::CapExceeded {
                what: "power-of-two denominator",
                value: k as u64,
                cap: 63,
            });
        }
        Ok(ExactRational { num: 1, den: 1 << k })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// The complement 1 - self. Errors if self > 1.
    pub fn complement(&self) -> Result<Self> {
        if self.num > self.den {
            return Err(Error::Internal(format!(
                "complement of {self} would be negative"
            )));
        }
        Ok(ExactRational {
            num: self.den - self.num,
            den: self.den,
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        let num =
            self.num as u128 * other.den as u128 + other.num as u128 * self.den as u128;
        reduce(num, self.den as u128 * other.den as u128)
    }

    pub fn mul(&self, other: &Self) -> Self {
        reduce(
            self.num as u128 * other.num as u128,
            self.den as u128 * other.den as u128,
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for ExactRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

// Wire format is a fixed {"num": .., "den": ..} object.
impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("ExactRational", 2)?;
        s.serialize_field("num", &self.num)?;
        s.serialize_field("den", &self.den)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: u64,
            den: u64,
        }
        let raw = Raw::deserialize(deserializer)?;
        ExactRational::new(raw.num, raw.den).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let r = ExactRational::new(6, 8).unwrap();
        assert_eq!((r.numerator(), r.denominator()), (3, 4));
        assert_eq!(ExactRational::new(0, 5).unwrap(), ExactRational::ZERO);
        assert_eq!(ExactRational::new(7, 7).unwrap(), ExactRational::ONE);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(ExactRational::new(1, 0), Err(Error::ZeroDenominator));
    }

    #[test]
    fn complement_and_compare() {
        let quarter = ExactRational::new(1, 4).unwrap();
        assert_eq!(quarter.complement().unwrap(), ExactRational::new(3, 4).unwrap());
        assert!(quarter < ExactRational::new(1, 3).unwrap());
        assert!(ExactRational::new(3, 4).unwrap() >= ExactRational::new(3, 4).unwrap());
    }

    #[test]
    fn arithmetic_stays_reduced() {
        let a = ExactRational::new(1, 6).unwrap();
        let b = ExactRational::new(1, 3).unwrap();
        assert_eq!(a.add(&b), ExactRational::new(1, 2).unwrap());
        assert_eq!(a.mul(&b), ExactRational::new(1, 18).unwrap());
    }

    #[test]
    fn json_wire_format() {
        let r = ExactRational::new(2, 8).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"num":1,"den":4}"#);
        let back: ExactRational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
