//! Exact dyadic-rational arithmetic and half-open intervals on [0,1).
//!
//! A dyadic rational is `numerator / 2^exponent` with an arbitrary-precision
//! numerator, so overflow is never a failure mode. Values are normalized on
//! construction (numerator odd or zero whenever the exponent is positive),
//! which makes the derived `Eq`/`Ord`/`Hash` value-based.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DyadicError {
    #[error("interval endpoints out of order: left {left} > right {right}")]
    EndpointsOutOfOrder { left: String, right: String },
    #[error("value {0} outside [0,1]")]
    OutOfUnitRange(String),
}

/// An exact dyadic rational `numerator / 2^exponent`.
///
/// ```
/// use wienerlab::dyadic::DyadicRational;
///
/// let three_eighths = DyadicRational::new(3, 3);
/// let quarter = DyadicRational::new(2, 3); // normalizes to 1/2^2
/// assert_eq!(quarter, DyadicRational::new(1, 2));
/// assert_eq!((&three_eighths - &quarter).to_string(), "1/2^3");
/// assert!(quarter < three_eighths);
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DyadicRational {
    numerator: BigInt,
    exponent: u64,
}

impl DyadicRational {
    pub fn new(numerator: impl Into<BigInt>, exponent: u64) -> Self {
        let mut d = DyadicRational {
            numerator: numerator.into(),
            exponent,
        };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        DyadicRational::new(0, 0)
    }

    pub fn one() -> Self {
        DyadicRational::new(1, 0)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        DyadicRational::new(n, 0)
    }

    /// `1 / 2^k`.
    pub fn pow2(k: u64) -> Self {
        DyadicRational::new(1, k)
    }

    /// Every finite f64 is a dyadic rational; the conversion is exact.
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(DyadicRational::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let mantissa = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (mantissa, -1074i64)
        } else {
            (mantissa | (1 << 52), raw_exp - 1075)
        };
        let mut num = BigInt::from(mant) * sign;
        let exponent = if exp >= 0 {
            num <<= exp as u64;
            0u64
        } else {
            (-exp) as u64
        };
        Some(DyadicRational::new(num, exponent))
    }

    fn normalize(&mut self) {
        if self.numerator.is_zero() {
            self.exponent = 0;
            return;
        }
        while self.exponent > 0 && self.numerator.is_even() {
            self.numerator >>= 1;
            self.exponent -= 1;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Numerator after rescaling to the given exponent; `None` if the value
    /// is not representable on that grid.
    pub fn numerator_at(&self, exponent: u64) -> Option<BigInt> {
        if exponent >= self.exponent {
            Some(&self.numerator << (exponent - self.exponent))
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone(), BigInt::one() << self.exponent)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn abs(&self) -> Self {
        DyadicRational::new(self.numerator.abs(), self.exponent)
    }

    /// Largest multiple of `2^-k` that is `<= self`.
    pub fn floor_to_grid(&self, k: u64) -> Self {
        let scaled = &self.numerator << k;
        let num = scaled.div_floor(&(BigInt::one() << self.exponent));
        DyadicRational::new(num, k)
    }

    /// Smallest multiple of `2^-k` that is `>= self`.
    pub fn ceil_to_grid(&self, k: u64) -> Self {
        let scaled = &self.numerator << k;
        let num = scaled.div_ceil(&(BigInt::one() << self.exponent));
        DyadicRational::new(num, k)
    }

    pub fn clamp_unit(&self) -> Self {
        if self.is_negative() {
            DyadicRational::zero()
        } else if *self > DyadicRational::one() {
            DyadicRational::one()
        } else {
            self.clone()
        }
    }

    pub fn half(&self) -> Self {
        DyadicRational::new(self.numerator.clone(), self.exponent + 1)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &other.numerator << (e - other.exponent);
        a.cmp(&b)
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(rhs.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &rhs.numerator << (e - rhs.exponent);
        DyadicRational::new(a + b, e)
    }
}

impl Sub for &DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(rhs.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &rhs.numerator << (e - rhs.exponent);
        DyadicRational::new(a - b, e)
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        DyadicRational::new(
            &self.numerator * &rhs.numerator,
            self.exponent + rhs.exponent,
        )
    }
}

impl Neg for &DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational::new(-&self.numerator, self.exponent)
    }
}

macro_rules! forward_binop_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for DyadicRational {
            type Output = DyadicRational;
            fn $method(self, rhs: DyadicRational) -> DyadicRational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&DyadicRational> for DyadicRational {
            type Output = DyadicRational;
            fn $method(self, rhs: &DyadicRational) -> DyadicRational {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop_owned!(Add, add);
forward_binop_owned!(Sub, sub);
forward_binop_owned!(Mul, mul);

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.exponent)
        }
    }
}

/// A half-open interval `[left, right)` with dyadic endpoints; empty iff
/// `left == right`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfOpenInterval {
    left: DyadicRational,
    right: DyadicRational,
}

impl HalfOpenInterval {
    pub fn new(left: DyadicRational, right: DyadicRational) -> Result<Self, DyadicError> {
        if left > right {
            return Err(DyadicError::EndpointsOutOfOrder {
                left: left.to_string(),
                right: right.to_string(),
            });
        }
        Ok(HalfOpenInterval { left, right })
    }

    pub fn empty() -> Self {
        HalfOpenInterval {
            left: DyadicRational::zero(),
            right: DyadicRational::zero(),
        }
    }

    pub fn unit() -> Self {
        HalfOpenInterval {
            left: DyadicRational::zero(),
            right: DyadicRational::one(),
        }
    }

    pub fn left(&self) -> &DyadicRational {
        &self.left
    }

    pub fn right(&self) -> &DyadicRational {
        &self.right
    }

    pub fn length(&self) -> DyadicRational {
        &self.right - &self.left
    }

    pub fn is_empty(&self) -> bool {
        self.left == self.right
    }

    pub fn contains(&self, x: &DyadicRational) -> bool {
        *x >= self.left && *x < self.right
    }

    pub fn subset_of(&self, other: &HalfOpenInterval) -> bool {
        self.is_empty() || (self.left >= other.left && self.right <= other.right)
    }
}

impl fmt::Display for HalfOpenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.left, self.right)
    }
}

/// Merge a list of half-open intervals into maximal disjoint ones, dropping
/// empties. Adjacent intervals `[a,b) [b,c)` coalesce into `[a,c)`.
pub fn merge_intervals(mut parts: Vec<HalfOpenInterval>) -> Vec<HalfOpenInterval> {
    parts.retain(|iv| !iv.is_empty());
    parts.sort_by(|a, b| a.left.cmp(&b.left).then_with(|| a.right.cmp(&b.right)));
    let mut merged: Vec<HalfOpenInterval> = Vec::new();
    for iv in parts {
        match merged.last_mut() {
            Some(last) if iv.left <= last.right => {
                if iv.right > last.right {
                    last.right = iv.right;
                }
            }
            _ => merged.push(iv),
        }
    }
    merged
}

/// Total length of a merged interval family.
pub fn total_length(parts: &[HalfOpenInterval]) -> DyadicRational {
    parts
        .iter()
        .fold(DyadicRational::zero(), |acc, iv| &acc + &iv.length())
}

/// A closed interval with dyadic endpoints, as produced by
/// [`crate::presentation::cylinder_interval`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedInterval {
    pub left: DyadicRational,
    pub right: DyadicRational,
}

impl fmt::Display for ClosedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.left, self.right)
    }
}
