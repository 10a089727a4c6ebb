//! Presentations of real numbers and the semidecidable primitives built on
//! them.
//!
//! A presentation is a pull-based generator of open rational intervals: index
//! `n` yields an interval of diameter at most `2^-n` containing the presented
//! real. Strict inequality between presented reals is semidecidable — the
//! search terminates exactly when the inequality holds — so every operation
//! here takes an explicit `fuel` bound and reports `Unresolved` when the
//! budget runs out. `Unresolved` means "not yet", never "not less".

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use std::sync::Arc;

use thiserror::Error;

use crate::bits::Bits;
use crate::dyadic::{ClosedInterval, DyadicRational, HalfOpenInterval};

#[derive(Debug, Error)]
pub enum PresentationError {
    #[error("presentation interval {index} has diameter {diameter} > 2^-{index}")]
    DiameterTooLarge { index: u32, diameter: BigRational },
    #[error("intervals are not nested at position {0}")]
    NotNested(usize),
}

/// An open interval with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl OpenInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        OpenInterval { lo, hi }
    }

    pub fn diameter(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

type IntervalFn = dyn Fn(u32) -> OpenInterval + Send + Sync;

/// A presentation of a real number: interval `n` has diameter `<= 2^-n` and
/// contains the real. Containment is enforced by construction; the diameter
/// bound is checked whenever an interval is pulled.
#[derive(Clone)]
pub struct Presentation {
    generator: Arc<IntervalFn>,
}

impl Presentation {
    /// Intervals `(a - 2^-(n+1), a + 2^-(n+1))` of diameter exactly `2^-n`.
    /// Endpoints are built unreduced as `(p·2^(n+1) ∓ q) / (q·2^(n+1))`;
    /// reducing them would cost a gcd of `n`-bit numbers per pull.
    pub fn of_rational(a: BigRational) -> Self {
        Presentation {
            generator: Arc::new(move |n| {
                let scaled = a.numer() << (n + 1) as usize;
                let denom = a.denom() << (n + 1) as usize;
                OpenInterval::new(
                    BigRational::new_raw(&scaled - a.denom(), denom.clone()),
                    BigRational::new_raw(scaled + a.denom(), denom),
                )
            }),
        }
    }

    pub fn of_dyadic(d: &DyadicRational) -> Self {
        Presentation::of_rational(d.to_rational())
    }

    /// Caller-supplied interval stream (e.g. shrinking numeric estimates).
    /// The diameter contract is validated on every pull.
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(u32) -> OpenInterval + Send + Sync + 'static,
    {
        Presentation {
            generator: Arc::new(f),
        }
    }

    pub fn interval(&self, n: u32) -> Result<OpenInterval, PresentationError> {
        let iv = (self.generator)(n);
        if !diameter_at_most_pow2(&iv, n) {
            return Err(PresentationError::DiameterTooLarge {
                index: n,
                diameter: iv.diameter(),
            });
        }
        Ok(iv)
    }
}

/// `x < y` by cross-multiplication after stripping the powers of two the
/// denominators share. Presentations carry denominators like `q·2^(n+1)`, so
/// the naive `n`-bit-by-`n`-bit products would dominate deep searches; after
/// stripping, one factor is small again.
fn rational_lt(x: &BigRational, y: &BigRational) -> bool {
    let tx = x.denom().trailing_zeros().unwrap_or(0);
    let ty = y.denom().trailing_zeros().unwrap_or(0);
    let t = tx.min(ty);
    let dy = y.denom() >> t;
    let dx = x.denom() >> t;
    x.numer() * dy < y.numer() * dx
}

/// `hi - lo <= 2^-n`, i.e. `(n_h·d_l - n_l·d_h) · 2^n <= d_h·d_l`, with the
/// shared power of two of the denominators cancelled from both sides.
fn diameter_at_most_pow2(iv: &OpenInterval, n: u32) -> bool {
    let th = iv.hi.denom().trailing_zeros().unwrap_or(0);
    let tl = iv.lo.denom().trailing_zeros().unwrap_or(0);
    let t = th.min(tl);
    let u = iv.hi.denom() >> t;
    let v = iv.lo.denom() >> t;
    let spread = iv.hi.numer() * &v - iv.lo.numer() * &u;
    (spread << n as usize) <= ((u * v) << t)
}

/// Outcome of a bounded semidecidable search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semidecision {
    /// A witness was found within the fuel budget.
    Affirmed,
    /// No witness yet; the search may succeed with more fuel.
    Unresolved,
}

/// Outcome of [`compare_presentations`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOutcome {
    StrictlyLess,
    Unresolved,
}

/// Search for disjoint intervals witnessing `a < b`. Step `k` pulls interval
/// `k` from each presentation and checks `right(I_k) < left(J_k)`; with the
/// standard centered rational presentations this resolves once `2^-k` drops
/// below half the gap `b - a`.
pub fn compare_presentations(
    a: &Presentation,
    b: &Presentation,
    fuel: u32,
) -> Result<CompareOutcome, PresentationError> {
    for k in 0..fuel {
        let i = a.interval(k)?;
        let j = b.interval(k)?;
        if rational_lt(&i.hi, &j.lo) {
            return Ok(CompareOutcome::StrictlyLess);
        }
    }
    Ok(CompareOutcome::Unresolved)
}

/// Semidecide `c < a <= b < d` for the half-open interval `[a, b)` inside the
/// open interval `(c, d)` given by presentations of its endpoints.
pub fn strictly_contains(
    outer: (&Presentation, &Presentation),
    inner: &HalfOpenInterval,
    fuel: u32,
) -> Result<Semidecision, PresentationError> {
    let a = Presentation::of_dyadic(inner.left());
    let b = Presentation::of_dyadic(inner.right());
    let left_ok = compare_presentations(outer.0, &a, fuel)?;
    if left_ok != CompareOutcome::StrictlyLess {
        return Ok(Semidecision::Unresolved);
    }
    let right_ok = compare_presentations(&b, outer.1, fuel)?;
    Ok(match right_ok {
        CompareOutcome::StrictlyLess => Semidecision::Affirmed,
        CompareOutcome::Unresolved => Semidecision::Unresolved,
    })
}

/// Verdict of [`nested_endpoint_detector`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndpointVerdict {
    LeftConstant(BigRational),
    RightConstant(BigRational),
    Inconclusive,
}

/// For a nested family of open intervals with empty intersection, one
/// endpoint sequence is eventually constant. This finite-prefix heuristic
/// reports an endpoint that stayed within `tolerance` of its final value over
/// the trailing half of the prefix, preferring the left endpoint when both
/// qualify.
pub fn nested_endpoint_detector(
    prefix: &[OpenInterval],
    tolerance: &DyadicRational,
) -> Result<EndpointVerdict, PresentationError> {
    for i in 1..prefix.len() {
        if prefix[i].lo < prefix[i - 1].lo || prefix[i].hi > prefix[i - 1].hi {
            return Err(PresentationError::NotNested(i));
        }
    }
    if prefix.len() < 2 {
        return Ok(EndpointVerdict::Inconclusive);
    }
    let tol = tolerance.to_rational();
    let tail_start = prefix.len() / 2;
    let last = &prefix[prefix.len() - 1];
    let tail = &prefix[tail_start..];
    let lo_constant = tail.iter().all(|iv| (&iv.lo - &last.lo).abs() <= tol);
    if lo_constant {
        return Ok(EndpointVerdict::LeftConstant(last.lo.clone()));
    }
    let hi_constant = tail.iter().all(|iv| (&iv.hi - &last.hi).abs() <= tol);
    if hi_constant {
        return Ok(EndpointVerdict::RightConstant(last.hi.clone()));
    }
    Ok(EndpointVerdict::Inconclusive)
}

/// The closed dyadic interval identified with the cylinder of a bit string:
/// the empty string maps to `[0,1]`, appending 0 keeps the left half and
/// appending 1 the right half.
pub fn cylinder_interval(sigma: &Bits) -> ClosedInterval {
    let len = sigma.len() as u64;
    let index = sigma.iter().fold(BigInt::from(0u32), |acc, b| {
        (acc << 1) | BigInt::from(b as u32)
    });
    ClosedInterval {
        left: DyadicRational::new(index.clone(), len),
        right: DyadicRational::new(index + 1u32, len),
    }
}
