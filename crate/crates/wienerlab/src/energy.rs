//! Potential-theoretic dimension bounds on masked binary trees.
//!
//! The tree of a residue mask branches exactly at the mask's member
//! positions; its natural mass distribution splits the weight in half at
//! every branching. Two independent samples first differ at the `m`-th
//! branch with probability `2^-m`, which turns the energy double integral
//! into a single exact series over the integer branch positions `n_m`:
//!
//! `I_alpha = Σ_{m ≥ 1} 2^(alpha·n_m - m)`
//!
//! Since `n_{m+p} = n_m + q`, consecutive `p`-blocks scale by exactly
//! `2^(alpha·q - p)`, so the series is block-geometric: it converges iff
//! `alpha < p/q` (decided exactly on rationals), the remainder after any
//! prefix is computable in closed form, and finiteness at `alpha` bounds
//! the tree's dimension below by `alpha`.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use thiserror::Error;

use crate::bits::Bits;
use crate::complexity::ResidueMask;
use crate::dyadic::DyadicRational;
use crate::source::BitSource;

#[derive(Debug, Error, PartialEq)]
pub enum EnergyError {
    #[error(
        "alpha {alpha} >= branching density {p}/{q}: energy diverges, truncated sampling refused"
    )]
    Divergent { alpha: BigRational, p: u64, q: u64 },
    #[error("string length {got} exceeds depth cap {cap}")]
    DepthCapExceeded { got: usize, cap: usize },
    #[error("ultrametric needs equal lengths, got {0} and {1}")]
    LengthMismatch(usize, usize),
}

/// The masked tree with its halving mass distribution, capped at a working
/// depth.
#[derive(Debug, Clone, Copy)]
pub struct MassTree {
    mask: ResidueMask,
    depth_cap: usize,
}

impl MassTree {
    pub fn new(mask: ResidueMask, depth_cap: usize) -> Self {
        MassTree { mask, depth_cap }
    }

    pub fn mask(&self) -> &ResidueMask {
        &self.mask
    }

    pub fn depth_cap(&self) -> usize {
        self.depth_cap
    }

    /// Mass of the cylinder at `sigma`: `2^-(branches before |sigma|)` if
    /// every non-branch position carries 0, else zero.
    pub fn cylinder_mass(&self, sigma: &Bits) -> Result<DyadicRational, EnergyError> {
        if sigma.len() > self.depth_cap {
            return Err(EnergyError::DepthCapExceeded {
                got: sigma.len(),
                cap: self.depth_cap,
            });
        }
        if !crate::complexity::in_tree(&self.mask, sigma) {
            return Ok(DyadicRational::zero());
        }
        Ok(DyadicRational::pow2(
            self.mask.count_below(sigma.len()) as u64
        ))
    }

    /// Draw a branch prefix from the mass distribution: fair bits at branch
    /// positions, 0 elsewhere.
    pub fn sample_branch(&self, source: &mut BitSource, len: usize) -> Result<Bits, EnergyError> {
        if len > self.depth_cap {
            return Err(EnergyError::DepthCapExceeded {
                got: len,
                cap: self.depth_cap,
            });
        }
        Ok(crate::complexity::tree_sequence(&self.mask, source, len))
    }
}

/// Ultrametric distance between equal-length strings: `2^-n` at the first
/// differing position `n`, or `Identical`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ultrametric {
    Distance { first_difference: usize },
    Identical,
}

impl Ultrametric {
    pub fn to_f64(self) -> f64 {
        match self {
            Ultrametric::Distance { first_difference } => 0.5f64.powi(first_difference as i32),
            Ultrametric::Identical => 0.0,
        }
    }
}

pub fn ultrametric(x: &Bits, y: &Bits) -> Result<Ultrametric, EnergyError> {
    if x.len() != y.len() {
        return Err(EnergyError::LengthMismatch(x.len(), y.len()));
    }
    for (n, (a, b)) in x.iter().zip(y.iter()).enumerate() {
        if a != b {
            return Ok(Ultrametric::Distance {
                first_difference: n,
            });
        }
    }
    Ok(Ultrametric::Identical)
}

/// Result of the exact energy series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyExact {
    /// `value` is the full series (partial sum of the requested terms plus
    /// the exact block-geometric remainder `tail_bound`).
    Finite {
        value: f64,
        tail_bound: f64,
    },
    Divergent,
}

/// Exact alpha-energy of the mask's mass distribution. Divergence is decided
/// exactly: the terms vanish iff `alpha < p/q`.
pub fn energy_exact(mask: &ResidueMask, alpha: &BigRational, terms: usize) -> EnergyExact {
    let ratio_density = BigRational::new((mask.p() as i64).into(), (mask.q() as i64).into());
    if *alpha >= ratio_density {
        return EnergyExact::Divergent;
    }
    let a = alpha.to_f64().expect("alpha is a small rational");
    let term = |m: u64| 2f64.powf(a * mask.nth_member(m) as f64 - m as f64);
    let mut partial = 0.0;
    for m in 1..=terms as u64 {
        partial += term(m);
    }
    // consecutive p-blocks scale by exactly rho = 2^(alpha q - p) < 1
    let rho = 2f64.powf(a * mask.q() as f64 - mask.p() as f64);
    let mut block = 0.0;
    for j in 1..=mask.p() {
        block += term(terms as u64 + j);
    }
    let tail = block / (1.0 - rho);
    EnergyExact::Finite {
        value: partial + tail,
        tail_bound: tail,
    }
}

/// Monte Carlo energy estimate with a 99% confidence interval.
#[derive(Debug, Clone)]
pub struct EnergyMc {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Exact mass of the series beyond the sampling depth, added to the
    /// upper confidence limit.
    pub truncation_tail: f64,
    pub samples: u64,
    pub depth: usize,
    /// Pairs that agreed through the full depth (contribute 0 to the mean,
    /// covered by the truncation tail).
    pub truncated_pairs: u64,
}

/// z-value of the two-sided 99% normal interval used by [`energy_mc`].
pub const ENERGY_Z: f64 = 2.576;

/// Estimate the energy by averaging `υ(x,y)^-alpha` over sample pairs from
/// the mass distribution, truncated at `depth`.
///
/// `υ^-alpha` has heavy tails (its variance is infinite once
/// `2·alpha ≥ p/q`), so the default depth deliberately truncates where the
/// deeper terms are unlikely to be sampled at all — around branch index
/// `log2(samples)` — and the exact remainder beyond the truncation is added
/// to the upper confidence limit instead of being left to rare outliers.
pub fn energy_mc(
    mask: &ResidueMask,
    alpha: &BigRational,
    samples: u64,
    depth: Option<usize>,
    seed: u64,
) -> Result<EnergyMc, EnergyError> {
    let ratio_density = BigRational::new((mask.p() as i64).into(), (mask.q() as i64).into());
    if *alpha >= ratio_density {
        return Err(EnergyError::Divergent {
            alpha: alpha.clone(),
            p: mask.p(),
            q: mask.q(),
        });
    }
    let depth = depth.unwrap_or_else(|| {
        let target_branch = (64 - samples.leading_zeros() as u64)
            .max(10)
            .saturating_sub(2);
        mask.nth_member(target_branch) as usize + 1
    });
    let a = alpha.to_f64().expect("alpha is a small rational");

    // per-64-bit-word branch masks: bit i of word w is position 64w + i
    let words = depth.div_ceil(64);
    let mut branch_masks = vec![0u64; words];
    for pos in 0..depth {
        if mask.contains(pos) {
            branch_masks[pos / 64] |= 1u64 << (pos % 64);
        }
    }

    let mut src = BitSource::derived(seed, "energy-mc", 0);
    let mut sum = 0.0f64;
    let mut sumsq = 0.0f64;
    let mut truncated = 0u64;
    let mut xw = vec![0u64; words];
    let mut yw = vec![0u64; words];
    for _ in 0..samples {
        for w in 0..words {
            xw[w] = src.next_word() & branch_masks[w];
            yw[w] = src.next_word() & branch_masks[w];
        }
        let mut first_diff = None;
        for w in 0..words {
            let diff = xw[w] ^ yw[w];
            if diff != 0 {
                first_diff = Some(64 * w + diff.trailing_zeros() as usize);
                break;
            }
        }
        match first_diff {
            Some(pos) if pos < depth => {
                let v = 2f64.powf(a * pos as f64);
                sum += v;
                sumsq += v * v;
            }
            _ => truncated += 1,
        }
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = (sumsq / n - mean * mean).max(0.0);
    let se = (variance / n).sqrt();

    // exact remainder beyond the last branch within `depth`
    let branches_within = mask.count_below(depth) as u64;
    let term = |m: u64| 2f64.powf(a * mask.nth_member(m) as f64 - m as f64);
    let rho = 2f64.powf(a * mask.q() as f64 - mask.p() as f64);
    let mut block = 0.0;
    for j in 1..=mask.p() {
        block += term(branches_within + j);
    }
    let tail = block / (1.0 - rho);

    Ok(EnergyMc {
        estimate: mean,
        ci_low: (mean - ENERGY_Z * se).max(0.0),
        ci_high: mean + ENERGY_Z * se + tail,
        truncation_tail: tail,
        samples,
        depth,
        truncated_pairs: truncated,
    })
}

/// Max observed local mass ratio `μ(ball(x, 2^-n)) / (2^-n)^alpha` over
/// sampled points and the given depths, where the ball of radius `2^-n` is
/// the cylinder of the first `n+1` bits. For residue masks the cylinder mass
/// depends only on the branch count, so the ratio is point-free; the
/// sampling interface is kept for the general shape of the check.
#[derive(Debug, Clone)]
pub struct DensityReport {
    pub per_depth: Vec<(u32, f64)>,
    pub max_ratio: f64,
}

pub fn density_check(
    mask: &ResidueMask,
    alpha: &BigRational,
    samples: u64,
    depths: &[u32],
    seed: u64,
) -> DensityReport {
    let a = alpha.to_f64().expect("alpha is a small rational");
    let max_depth = depths.iter().copied().max().unwrap_or(0) as usize + 1;
    let tree = MassTree::new(*mask, max_depth);
    let mut src = BitSource::derived(seed, "density", 0);
    let mut per_depth: Vec<(u32, f64)> = depths.iter().map(|&n| (n, 0.0f64)).collect();
    for _ in 0..samples.max(1) {
        let x = tree
            .sample_branch(&mut src, max_depth)
            .expect("length equals the cap");
        for (n, best) in per_depth.iter_mut() {
            let ball = x.prefix(*n as usize + 1);
            let mass = tree
                .cylinder_mass(&ball)
                .expect("prefix within cap")
                .to_f64();
            let ratio = mass * 2f64.powf(a * *n as f64);
            if ratio > *best {
                *best = ratio;
            }
        }
    }
    let max_ratio = per_depth.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    DensityReport {
        per_depth,
        max_ratio,
    }
}

/// Largest grid alpha whose exact energy is finite — the potential-theoretic
/// dimension lower bound restricted to the grid. `None` if the whole grid
/// diverges.
pub fn dimension_lower_bound(mask: &ResidueMask, grid: &[BigRational]) -> Option<BigRational> {
    grid.iter()
        .filter(|alpha| matches!(energy_exact(mask, alpha, 1), EnergyExact::Finite { .. }))
        .max()
        .cloned()
}
