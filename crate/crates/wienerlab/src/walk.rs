//! Piecewise-linear random-walk paths: continuous functions on [0,1] that
//! vanish at 0 and move with slope `±√n` on each step interval
//! `[(i-1)/n, i/n]`. A path is stored as its ±1 code; values at breakpoints
//! are `S_i/√n` for the prefix sums `S_i`, and all evaluation is exact as a
//! rational multiple of `1/√n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bits::Bits;
use crate::source::BitSource;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WalkError {
    #[error("code length {got} does not match resolution {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("resolution must be at least 1")]
    EmptyResolution,
    #[error("time {0} outside [0,1]")]
    TimeOutOfRange(String),
    #[error("coarse level {level} exceeds path level {max}")]
    LevelOutOfRange { level: u32, max: u32 },
    #[error("resolution {0} is not even")]
    OddResolution(usize),
    #[error("resolution {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("malformed path text {0:?}: expected \"<n> <bits>\"")]
    MalformedText(String),
}

/// A member of the slope-`±√n` walk class, stored as its ±1 code
/// (bit 1 = up, bit 0 = down).
///
/// ```
/// use wienerlab::walk::WalkPath;
///
/// let path: WalkPath = "4 1101".parse().unwrap();
/// assert_eq!(path.breakpoint_value(2).coeff.to_string(), "2");
/// assert_eq!(path.breakpoint_value(2).to_f64(), 1.0); // 2/sqrt(4)
/// assert_eq!(path.zero_intervals(), vec![0]);
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkPath {
    n: usize,
    code: Bits,
}

/// An exact path value `coeff / √n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkValue {
    pub coeff: BigRational,
    pub resolution: usize,
}

impl WalkValue {
    pub fn to_f64(&self) -> f64 {
        self.coeff.to_f64().unwrap_or(f64::NAN) / (self.resolution as f64).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Exact comparison of `coeff/√n` against a rational, by comparing signs
    /// and then squares (`coeff²` vs `y²·n`).
    pub fn cmp_rational(&self, y: &BigRational) -> Ordering {
        let sc = self.coeff.is_positive() as i8 - self.coeff.is_negative() as i8;
        let sy = y.is_positive() as i8 - y.is_negative() as i8;
        if sc != sy {
            return sc.cmp(&sy);
        }
        if sc == 0 {
            return Ordering::Equal;
        }
        let lhs = &self.coeff * &self.coeff;
        let rhs = y * y * BigRational::from(BigInt::from(self.resolution));
        if sc > 0 {
            lhs.cmp(&rhs)
        } else {
            rhs.cmp(&lhs)
        }
    }
}

/// Result of [`WalkPath::scale_half`]: the re-encoded coarser path plus the
/// number of cancelled (tie) pairs that were forced to code bit 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledPath {
    pub path: WalkPath,
    pub tie_count: usize,
}

impl WalkPath {
    /// Decode a bit string into a path: bit 1 steps up, bit 0 steps down.
    pub fn decode(n: usize, bits: Bits) -> Result<Self, WalkError> {
        if n == 0 {
            return Err(WalkError::EmptyResolution);
        }
        if bits.len() != n {
            return Err(WalkError::LengthMismatch {
                expected: n,
                got: bits.len(),
            });
        }
        Ok(WalkPath { n, code: bits })
    }

    /// Fresh path of `n` steps from a seeded source.
    pub fn sample(n: usize, source: &mut BitSource) -> Result<Self, WalkError> {
        WalkPath::decode(n, source.bits(n))
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn code(&self) -> &Bits {
        &self.code
    }

    /// Step `i` as ±1.
    pub fn step(&self, i: usize) -> i64 {
        if self.code.get(i) {
            1
        } else {
            -1
        }
    }

    /// Prefix sums `S_0..S_n` of the ±1 code.
    pub fn prefix_sums(&self) -> Vec<i64> {
        let mut sums = Vec::with_capacity(self.n + 1);
        let mut acc = 0i64;
        sums.push(0);
        for b in self.code.iter() {
            acc += if b { 1 } else { -1 };
            sums.push(acc);
        }
        sums
    }

    /// Value at breakpoint `i/n`, exactly `S_i/√n`.
    pub fn breakpoint_value(&self, i: usize) -> WalkValue {
        let mut acc = 0i64;
        for j in 0..i {
            acc += self.step(j);
        }
        WalkValue {
            coeff: BigRational::from(BigInt::from(acc)),
            resolution: self.n,
        }
    }

    /// Exact piecewise-linear evaluation at a rational time in [0,1].
    pub fn eval(&self, t: &BigRational) -> Result<WalkValue, WalkError> {
        if t.is_negative() || *t > BigRational::from(BigInt::from(1)) {
            return Err(WalkError::TimeOutOfRange(t.to_string()));
        }
        let n_rat = BigRational::from(BigInt::from(self.n));
        let scaled = t * &n_rat; // t·n ∈ [0, n]
        let floor = scaled.floor().to_integer().to_usize().unwrap();
        let seg = floor.min(self.n - 1);
        let frac = &scaled - BigRational::from(BigInt::from(seg)); // ∈ [0,1]
        let mut acc = 0i64;
        for j in 0..seg {
            acc += self.step(j);
        }
        let coeff = BigRational::from(BigInt::from(acc))
            + frac * BigRational::from(BigInt::from(self.step(seg)));
        Ok(WalkValue {
            coeff,
            resolution: self.n,
        })
    }

    /// Indices `i` of the step intervals `[i/n, (i+1)/n]` whose closed image
    /// contains 0 (a sign change, or zero at an endpoint).
    pub fn zero_intervals(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut prev = 0i64;
        for i in 0..self.n {
            let next = prev + self.step(i);
            if prev == 0 || next == 0 || (prev < 0) != (next < 0) {
                out.push(i);
            }
            prev = next;
        }
        out
    }

    /// Rational endpoints of step interval `i`.
    pub fn segment_bounds(&self, i: usize) -> (BigRational, BigRational) {
        let n = BigInt::from(self.n);
        (
            BigRational::new(BigInt::from(i), n.clone()),
            BigRational::new(BigInt::from(i + 1), n),
        )
    }

    fn level_exponent(&self) -> Option<u32> {
        if self.n.is_power_of_two() {
            Some(self.n.trailing_zeros())
        } else {
            None
        }
    }

    /// For a path at resolution `2^K`, the length-`2^level` bit string whose
    /// bit `i` is the sign of the coarse increment over `[i/2^level,
    /// (i+1)/2^level]`; an exactly zero increment encodes as 1.
    pub fn coarse_code(&self, level: u32) -> Result<Bits, WalkError> {
        let big_k = self
            .level_exponent()
            .ok_or(WalkError::NotPowerOfTwo(self.n))?;
        if level > big_k {
            return Err(WalkError::LevelOutOfRange { level, max: big_k });
        }
        let stride = 1usize << (big_k - level);
        let sums = self.prefix_sums();
        Ok((0..(1usize << level))
            .map(|i| sums[(i + 1) * stride] - sums[i * stride] >= 0)
            .collect())
    }

    /// Re-encode pairs of steps as a path at half the resolution. A pair of
    /// agreeing steps gives an exact `±1/√(n/2)` increment; a cancelled pair
    /// has increment 0 and is re-encoded as 1, counted in `tie_count`.
    pub fn scale_half(&self) -> Result<ScaledPath, WalkError> {
        if !self.n.is_multiple_of(2) {
            return Err(WalkError::OddResolution(self.n));
        }
        let mut bits = Bits::empty();
        let mut ties = 0usize;
        for i in 0..self.n / 2 {
            let pair = self.step(2 * i) + self.step(2 * i + 1);
            if pair == 0 {
                ties += 1;
            }
            bits.push(pair >= 0);
        }
        Ok(ScaledPath {
            path: WalkPath::decode(self.n / 2, bits)?,
            tie_count: ties,
        })
    }
}

/// Text form `<n> <bits>`: resolution in decimal, code as a 0/1 string.
impl fmt::Display for WalkPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.n, self.code)
    }
}

impl FromStr for WalkPath {
    type Err = WalkError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split_whitespace();
        let (Some(n), Some(bits), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(WalkError::MalformedText(s.to_string()));
        };
        let n: usize = n
            .parse()
            .map_err(|_| WalkError::MalformedText(s.to_string()))?;
        let bits: Bits = bits
            .parse()
            .map_err(|_| WalkError::MalformedText(s.to_string()))?;
        WalkPath::decode(n, bits)
    }
}
