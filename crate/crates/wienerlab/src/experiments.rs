//! Desk-scale reproductions of the probabilistic claims: the iterated-
//! logarithm statistic swept over random times, zero-set hits against masked
//! trees, and the Brownian scaling check.
//!
//! Every experiment is driven by a config struct and is bit-reproducible
//! from `(seed, config)`: workers draw from domain-separated streams indexed
//! by path number, and aggregation is order-independent, so reports do not
//! depend on thread count.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use thiserror::Error;

use crate::bits::Bits;
use crate::complexity::{lz_estimate, Calibration, ResidueMask};
use crate::events::wilson_interval;
use crate::source::BitSource;
use crate::stats::{ks_critical_value, ks_distance, quantile_sorted};
use crate::walk::WalkPath;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("grid step {0} has no positive iterated logarithm (need |h| < 1/e)")]
    IteratedLogRange(String),
    #[error("time {t} with step {h} leaves [0,1]")]
    StepOutOfRange { t: String, h: String },
    #[error("zero grid step")]
    ZeroStep,
    #[error("h exponent range [{finest}, {coarsest}] is invalid (need 2 <= coarsest <= finest <= resolution)")]
    BadStepRange { finest: u32, coarsest: u32 },
    #[error("resolution 2^-{resolution} is not finer than scale 2^-{scale}")]
    ResolutionTooCoarse { resolution: u32, scale: u32 },
    #[error("resolution exponent {resolution} over the sweep budget of 26")]
    ResolutionBudget { resolution: u32 },
    #[error("scale factor {0} unsupported (expected 2 or 4)")]
    BadScaleFactor(u32),
    #[error("time {t} · 2^{k} is not an integer")]
    NonLatticeTime { t: String, k: u32 },
    #[error("scaled time {a}·{t} exceeds 1")]
    ScaledTimeOutOfRange { a: u32, t: String },
    #[error(transparent)]
    Walk(#[from] crate::walk::WalkError),
    #[error(transparent)]
    Complexity(#[from] crate::complexity::ComplexityError),
}

/// `|x(t+h) - x(t)| / sqrt(2|h| ln ln (1/|h|))`, the iterated-logarithm
/// statistic at one time and step (natural logarithms).
pub fn lil_term(delta: f64, h_abs: f64) -> f64 {
    delta.abs() / (2.0 * h_abs * (1.0 / h_abs).ln().ln()).sqrt()
}

/// Sup of the statistic over a finite grid of nonzero steps, evaluated
/// exactly on the path and converted to f64 at the end.
pub fn lil_statistic(
    path: &WalkPath,
    t: &BigRational,
    h_grid: &[BigRational],
) -> Result<f64, ExperimentError> {
    let one = BigRational::from(BigInt::from(1));
    let e_inv = (-1.0f64).exp();
    let base = path
        .eval(t)
        .map_err(|_| ExperimentError::StepOutOfRange {
            t: t.to_string(),
            h: "0".into(),
        })?
        .to_f64();
    let mut sup = 0.0f64;
    for h in h_grid {
        if h.is_zero() {
            return Err(ExperimentError::ZeroStep);
        }
        let h_abs = h.abs().to_f64().unwrap();
        if h_abs >= e_inv {
            return Err(ExperimentError::IteratedLogRange(h.to_string()));
        }
        let shifted = t + h;
        if shifted.is_negative() || shifted > one {
            return Err(ExperimentError::StepOutOfRange {
                t: t.to_string(),
                h: h.to_string(),
            });
        }
        let value = path.eval(&shifted).expect("validated range").to_f64();
        sup = sup.max(lil_term(value - base, h_abs));
    }
    Ok(sup)
}

#[derive(Debug, Clone, Serialize)]
pub struct LilConfig {
    pub seed: u64,
    pub paths: usize,
    /// Resolution exponent K (paths have 2^K steps).
    pub resolution_exp: u32,
    pub times_per_path: usize,
    /// Steps are 2^-j for j in coarsest..=finest.
    pub coarsest_h_exp: u32,
    pub finest_h_exp: u32,
    /// Acceptance band for the median sup-statistic.
    pub band: (f64, f64),
    pub p99_limit: f64,
}

impl Default for LilConfig {
    fn default() -> Self {
        LilConfig {
            seed: 0,
            paths: 200,
            resolution_exp: 20,
            times_per_path: 100,
            coarsest_h_exp: 6,
            finest_h_exp: 18,
            band: (0.6, 1.4),
            p99_limit: 2.5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LilRow {
    pub path_index: usize,
    pub time_index: u64,
    pub sup_statistic: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LilReport {
    pub config: LilConfig,
    pub count: usize,
    pub median: f64,
    pub p90: f64,
    pub p99: f64,
    pub min: f64,
    pub max: f64,
    pub median_in_band: bool,
    pub p99_below_limit: bool,
    pub rows: Vec<LilRow>,
}

/// Sweep the sup-statistic over seeded paths and uniformly random dyadic
/// times, padded away from 0 and 1 by the largest grid step.
pub fn lil_sweep(config: &LilConfig) -> Result<LilReport, ExperimentError> {
    let k = config.resolution_exp;
    if k > 26 {
        return Err(ExperimentError::ResolutionBudget { resolution: k });
    }
    if config.coarsest_h_exp < 2
        || config.finest_h_exp < config.coarsest_h_exp
        || config.finest_h_exp > k
    {
        return Err(ExperimentError::BadStepRange {
            finest: config.finest_h_exp,
            coarsest: config.coarsest_h_exp,
        });
    }
    let n: u64 = 1 << k;
    // coarsest_h_exp >= 2 guarantees the padded time range is nonempty
    let pad: u64 = 1 << (k - config.coarsest_h_exp);
    // per-step denominators sqrt(2 h ln ln (1/h)) for h = 2^-j
    let steps: Vec<(u64, f64)> = (config.coarsest_h_exp..=config.finest_h_exp)
        .map(|j| {
            let h = 0.5f64.powi(j as i32);
            ((1u64) << (k - j), (2.0 * h * (1.0 / h).ln().ln()).sqrt())
        })
        .collect();
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();

    let rows: Vec<LilRow> = (0..config.paths)
        .into_par_iter()
        .flat_map_iter(|path_index| {
            let mut bit_src = BitSource::derived(config.seed, "lil-path", path_index as u64);
            let mut sums: Vec<i32> = Vec::with_capacity(n as usize + 1);
            let mut acc = 0i32;
            sums.push(0);
            let mut remaining = n;
            while remaining > 0 {
                let take = remaining.min(64);
                let mut word = bit_src.next_word();
                for _ in 0..take {
                    acc += if word & 1 == 1 { 1 } else { -1 };
                    sums.push(acc);
                    word >>= 1;
                }
                remaining -= take;
            }
            let mut time_src = BitSource::derived(config.seed, "lil-times", path_index as u64);
            let steps = steps.clone();
            (0..config.times_per_path)
                .map(move |_| {
                    let t = pad + time_src.uniform_below(n - 2 * pad + 1);
                    let mut sup = 0.0f64;
                    for (offset, denom) in &steps {
                        let delta = (sums[(t + offset) as usize] - sums[t as usize]).abs() as f64;
                        sup = sup.max(delta * inv_sqrt_n / denom);
                    }
                    LilRow {
                        path_index,
                        time_index: t,
                        sup_statistic: sup,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let mut stats: Vec<f64> = rows.iter().map(|r| r.sup_statistic).collect();
    stats.sort_by(f64::total_cmp);
    let median = quantile_sorted(&stats, 0.5);
    let p99 = quantile_sorted(&stats, 0.99);
    Ok(LilReport {
        count: stats.len(),
        median,
        p90: quantile_sorted(&stats, 0.9),
        p99,
        min: stats[0],
        max: stats[stats.len() - 1],
        median_in_band: config.band.0 <= median && median <= config.band.1,
        p99_below_limit: p99 < config.p99_limit,
        rows,
        config: config.clone(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroHitConfig {
    pub seed: u64,
    pub p: u64,
    pub q: u64,
    /// Dyadic scales n, windows `[2^-(n+1), 2^-n]`.
    pub scale_min: u32,
    pub scale_max: u32,
    pub paths: usize,
    pub resolution_exp: u32,
    /// Certificate length checked after the leading zeros of the witness
    /// expansion.
    pub cert_depth: usize,
    /// Witness passes when its normalized compression rate is below this.
    pub rate_threshold: f64,
    /// Cap on witness rows kept for the detail output.
    pub max_witness_rows: usize,
}

impl Default for ZeroHitConfig {
    fn default() -> Self {
        ZeroHitConfig {
            seed: 0,
            p: 2,
            q: 3,
            scale_min: 2,
            scale_max: 8,
            paths: 10_000,
            resolution_exp: 20,
            cert_depth: 4,
            rate_threshold: 0.8,
            max_witness_rows: 2000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaleStats {
    pub scale: u32,
    pub trials: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessRow {
    pub scale: u32,
    pub path_index: usize,
    /// Witness time as `index / 2^K`.
    pub time_index: u64,
    pub expansion: String,
    /// Depth to which the post-leading-zero suffix stays in the tree.
    pub cert_depth_reached: usize,
    pub rate: f64,
    pub normalized_rate: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroHitReport {
    pub config: ZeroHitConfig,
    pub scales: Vec<ScaleStats>,
    pub monotone_within_ci: bool,
    pub all_positive: bool,
    pub coin_baseline: f64,
    pub witnesses_total: u64,
    pub witnesses_passing: u64,
    pub witness_pass_fraction: f64,
    pub witness_rows: Vec<WitnessRow>,
}

/// Shift-tolerant tree certificate: strip the leading zeros of the
/// expansion (a time below `2^-n` necessarily starts with `n` zeros, and
/// prepending zeros is the halving map), then require the suffix to lie in
/// the tree for `cert_depth` positions. Returns the depth to which the
/// suffix stays in the tree.
pub fn certificate_depth(mask: &ResidueMask, expansion: &Bits) -> usize {
    let tau = expansion.suffix_from(expansion.leading_zeros());
    let mut depth = 0;
    for (i, b) in tau.iter().enumerate() {
        if b && !mask.contains(i) {
            break;
        }
        depth = i + 1;
    }
    depth
}

struct PathScaleOutcome {
    hit: bool,
    witness: Option<(u64, usize, f64)>, // (index, cert depth reached, rate)
}

/// Per scale, estimate the probability that some step interval of the walk
/// containing a zero meets the window with a tree-certified time expansion;
/// witnesses carry their certificate depth and compression rate, and the
/// best (lowest-rate) certified witness per hit is reported.
pub fn zero_hit_experiment(config: &ZeroHitConfig) -> Result<ZeroHitReport, ExperimentError> {
    let mask = ResidueMask::new(config.p, config.q)?;
    let k = config.resolution_exp;
    if k <= config.scale_max {
        return Err(ExperimentError::ResolutionTooCoarse {
            resolution: k,
            scale: config.scale_max,
        });
    }
    let scales: Vec<u32> = (config.scale_min..=config.scale_max).collect();
    // candidate step-interval indices for scale n: [2^(K-n-1) - 1, 2^(K-n)]
    let lo_all: u64 = (1u64 << (k - config.scale_max - 1)) - 1;
    let hi_all: u64 = 1u64 << (k - config.scale_min);

    let per_path: Vec<Vec<PathScaleOutcome>> = (0..config.paths)
        .into_par_iter()
        .map(|path_index| {
            let mut src = BitSource::derived(config.seed, "zerohit-path", path_index as u64);
            // stream the walk, recording zero-touching intervals in range
            let mut crossings: Vec<u64> = Vec::new();
            let mut prev = 0i64;
            let mut word = 0u64;
            let mut bits_left = 0u32;
            for i in 0..=hi_all {
                if bits_left == 0 {
                    word = src.next_word();
                    bits_left = 64;
                }
                let next = prev + if word & 1 == 1 { 1 } else { -1 };
                word >>= 1;
                bits_left -= 1;
                if i >= lo_all && (prev == 0 || next == 0 || (prev < 0) != (next < 0)) {
                    crossings.push(i);
                }
                prev = next;
            }
            scales
                .iter()
                .map(|&n| {
                    let lo = (1u64 << (k - n - 1)) - 1;
                    let hi = 1u64 << (k - n);
                    let mut best: Option<(u64, usize, f64)> = None;
                    for &idx in crossings
                        .iter()
                        .skip_while(|&&c| c < lo)
                        .take_while(|&&c| c <= hi)
                    {
                        let sigma = Bits::from_index(idx, k as usize);
                        let reached = certificate_depth(&mask, &sigma);
                        let suffix_len = (k as usize) - sigma.leading_zeros();
                        if reached < config.cert_depth.min(suffix_len) {
                            continue;
                        }
                        let rate = lz_estimate(&sigma).expect("K >= 1").rate;
                        if best.as_ref().is_none_or(|(_, _, r)| rate < *r) {
                            best = Some((idx, reached, rate));
                        }
                    }
                    PathScaleOutcome {
                        hit: best.is_some(),
                        witness: best,
                    }
                })
                .collect()
        })
        .collect();

    let baseline = Calibration::default().coin_rate(k as usize);
    let mut scale_stats = Vec::new();
    let mut witness_rows = Vec::new();
    let mut witnesses_total = 0u64;
    let mut witnesses_passing = 0u64;
    for (si, &n) in scales.iter().enumerate() {
        let hits = per_path.iter().filter(|p| p[si].hit).count() as u64;
        let trials = config.paths as u64;
        let (ci_low, ci_high) = wilson_interval(hits, trials, 1.96);
        scale_stats.push(ScaleStats {
            scale: n,
            trials,
            hits,
            p_hat: hits as f64 / trials as f64,
            ci_low,
            ci_high,
        });
        for (path_index, outcomes) in per_path.iter().enumerate() {
            if let Some((idx, reached, rate)) = outcomes[si].witness {
                let normalized = rate / baseline;
                let passes = normalized < config.rate_threshold;
                witnesses_total += 1;
                if passes {
                    witnesses_passing += 1;
                }
                if witness_rows.len() < config.max_witness_rows {
                    witness_rows.push(WitnessRow {
                        scale: n,
                        path_index,
                        time_index: idx,
                        expansion: Bits::from_index(idx, k as usize).to_string(),
                        cert_depth_reached: reached,
                        rate,
                        normalized_rate: normalized,
                        passes,
                    });
                }
            }
        }
    }
    let monotone_within_ci = scale_stats.windows(2).all(|w| w[1].ci_high >= w[0].ci_low);
    let all_positive = scale_stats.iter().all(|s| s.hits > 0);
    Ok(ZeroHitReport {
        config: config.clone(),
        scales: scale_stats,
        monotone_within_ci,
        all_positive,
        coin_baseline: baseline,
        witnesses_total,
        witnesses_passing,
        witness_pass_fraction: if witnesses_total == 0 {
            0.0
        } else {
            witnesses_passing as f64 / witnesses_total as f64
        },
        witness_rows,
    })
}

#[derive(Debug, Clone)]
pub struct ScalingConfig {
    pub seed: u64,
    /// Scale factor, 2 or 4.
    pub a: u32,
    pub t_points: Vec<BigRational>,
    pub samples: usize,
    pub resolution_exp: u32,
    pub significance: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            seed: 0,
            a: 2,
            t_points: vec![
                BigRational::new(BigInt::from(1), BigInt::from(8)),
                BigRational::new(BigInt::from(1), BigInt::from(4)),
                BigRational::new(BigInt::from(1), BigInt::from(2)),
            ],
            samples: 100_000,
            resolution_exp: 16,
            significance: 0.01,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub t: String,
    pub scaled_steps: u64,
    pub base_steps: u64,
    pub ks_distance: f64,
    pub critical_value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub seed: u64,
    pub a: u32,
    pub samples: usize,
    pub resolution_exp: u32,
    pub significance: f64,
    pub rows: Vec<ScalingRow>,
    pub all_pass: bool,
}

/// Compare the law of `x(a t)/sqrt(a)` against `x(t)` across independent
/// seeds: per time point, the two-sample KS distance between endpoint values
/// of fresh walks, against the asymptotic critical value.
pub fn scaling_test(config: &ScalingConfig) -> Result<ScalingReport, ExperimentError> {
    if config.a != 2 && config.a != 4 {
        return Err(ExperimentError::BadScaleFactor(config.a));
    }
    let k = config.resolution_exp;
    let n: u64 = 1 << k;
    let one = BigRational::from(BigInt::from(1));
    let mut rows = Vec::new();
    for t in &config.t_points {
        let scaled_t = t * BigRational::from(BigInt::from(config.a));
        if scaled_t > one {
            return Err(ExperimentError::ScaledTimeOutOfRange {
                a: config.a,
                t: t.to_string(),
            });
        }
        let lattice = t * BigRational::from(BigInt::from(n));
        if !lattice.is_integer() {
            return Err(ExperimentError::NonLatticeTime {
                t: t.to_string(),
                k,
            });
        }
        let base_steps = lattice.to_integer().to_u64().unwrap();
        let scaled_steps = base_steps * config.a as u64;
        let scale_a = 1.0 / ((config.a as u64 * n) as f64).sqrt();
        let scale_b = 1.0 / (n as f64).sqrt();
        let sum_walk = |purpose: &'static str, steps: u64, scale: f64| -> Vec<f64> {
            (0..config.samples)
                .into_par_iter()
                .map(|i| {
                    let mut src = BitSource::derived(config.seed, purpose, i as u64);
                    let mut s = 0i64;
                    let mut left = steps;
                    while left >= 64 {
                        s += 2 * src.next_word().count_ones() as i64 - 64;
                        left -= 64;
                    }
                    if left > 0 {
                        let word = src.next_word() & ((1u64 << left) - 1);
                        s += 2 * word.count_ones() as i64 - left as i64;
                    }
                    s as f64 * scale
                })
                .collect()
        };
        let scaled_values = sum_walk("scaling-scaled", scaled_steps, scale_a);
        let base_values = sum_walk("scaling-base", base_steps, scale_b);
        let d = ks_distance(&scaled_values, &base_values);
        let critical = ks_critical_value(config.significance, config.samples, config.samples);
        rows.push(ScalingRow {
            t: t.to_string(),
            scaled_steps,
            base_steps,
            ks_distance: d,
            critical_value: critical,
            pass: d < critical,
        });
    }
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(ScalingReport {
        seed: config.seed,
        a: config.a,
        samples: config.samples,
        resolution_exp: config.resolution_exp,
        significance: config.significance,
        rows,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::in_tree;
    use approx::assert_abs_diff_eq;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn statistic_on_flat_segment_is_zero() {
        // alternating path is 0 at every even breakpoint
        let path = WalkPath::decode(16, "1010101010101010".parse().unwrap()).unwrap();
        let stat = lil_statistic(&path, &rat(1, 2), &[rat(1, 8), rat(-1, 8)]).unwrap();
        assert_eq!(stat, 0.0);
    }

    #[test]
    fn statistic_matches_direct_arithmetic() {
        // all-up path of 4 steps at t=0, h=1/4: 0.5 / sqrt(0.5 ln ln 4)
        let path = WalkPath::decode(4, "1111".parse().unwrap()).unwrap();
        let stat = lil_statistic(&path, &rat(0, 1), &[rat(1, 4)]).unwrap();
        let expected = 0.5 / (2.0 * 0.25 * (4.0f64.ln()).ln()).sqrt();
        assert_abs_diff_eq!(stat, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(stat, 1.2372, epsilon = 1e-4);
    }

    #[test]
    fn statistic_range_errors() {
        let path = WalkPath::decode(4, "1111".parse().unwrap()).unwrap();
        // |h| >= 1/e has no positive iterated logarithm
        assert!(matches!(
            lil_statistic(&path, &rat(0, 1), &[rat(1, 2)]),
            Err(ExperimentError::IteratedLogRange(_))
        ));
        assert!(matches!(
            lil_statistic(&path, &rat(7, 8), &[rat(1, 4)]),
            Err(ExperimentError::StepOutOfRange { .. })
        ));
        assert!(matches!(
            lil_statistic(&path, &rat(1, 2), &[rat(0, 1)]),
            Err(ExperimentError::ZeroStep)
        ));
    }

    #[test]
    fn statistic_invariances() {
        let mut src = BitSource::derived(3, "lil-invariance", 0);
        let path = WalkPath::sample(64, &mut src).unwrap();
        let negated: Bits = path.code().iter().map(|b| !b).collect();
        let negated = WalkPath::decode(64, negated).unwrap();
        let reflected: Bits = path
            .code()
            .iter()
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect();
        let reflected = WalkPath::decode(64, reflected).unwrap();
        let t = rat(1, 4);
        let grid = [rat(1, 16), rat(-1, 32), rat(3, 16)];
        let mirrored_t = rat(3, 4);
        let mirrored: Vec<BigRational> = grid.iter().map(|h| -h).collect();
        let original = lil_statistic(&path, &t, &grid).unwrap();
        assert_abs_diff_eq!(
            original,
            lil_statistic(&negated, &t, &grid).unwrap(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            original,
            lil_statistic(&reflected, &mirrored_t, &mirrored).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn sweep_agrees_with_exact_statistic() {
        let config = LilConfig {
            seed: 41,
            paths: 3,
            resolution_exp: 10,
            times_per_path: 5,
            coarsest_h_exp: 3,
            finest_h_exp: 8,
            ..LilConfig::default()
        };
        let report = lil_sweep(&config).unwrap();
        assert_eq!(report.count, 15);
        let grid: Vec<BigRational> = (3..=8).map(|j| rat(1, 1i64 << j)).collect();
        for row in &report.rows {
            let mut src = BitSource::derived(41, "lil-path", row.path_index as u64);
            let path = WalkPath::sample(1 << 10, &mut src).unwrap();
            let t = rat(row.time_index as i64, 1 << 10);
            let exact = lil_statistic(&path, &t, &grid).unwrap();
            assert_abs_diff_eq!(row.sup_statistic, exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn sweep_single_step_grid_is_pointwise() {
        let config = LilConfig {
            seed: 5,
            paths: 2,
            resolution_exp: 8,
            times_per_path: 4,
            coarsest_h_exp: 4,
            finest_h_exp: 4,
            ..LilConfig::default()
        };
        let report = lil_sweep(&config).unwrap();
        let h = [rat(1, 16)];
        for row in &report.rows {
            let mut src = BitSource::derived(5, "lil-path", row.path_index as u64);
            let path = WalkPath::sample(256, &mut src).unwrap();
            let exact = lil_statistic(&path, &rat(row.time_index as i64, 256), &h).unwrap();
            assert_abs_diff_eq!(row.sup_statistic, exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn sweep_rejects_bad_ranges() {
        let config = LilConfig {
            coarsest_h_exp: 1,
            ..LilConfig::default()
        };
        assert!(matches!(
            lil_sweep(&config),
            Err(ExperimentError::BadStepRange { .. })
        ));
        let config = LilConfig {
            resolution_exp: 7,
            coarsest_h_exp: 6,
            finest_h_exp: 9,
            ..LilConfig::default()
        };
        assert!(matches!(
            lil_sweep(&config),
            Err(ExperimentError::BadStepRange { .. })
        ));
    }

    #[test]
    fn sweep_is_reproducible_and_thread_invariant() {
        let config = LilConfig {
            seed: 17,
            paths: 4,
            resolution_exp: 12,
            times_per_path: 8,
            coarsest_h_exp: 4,
            finest_h_exp: 10,
            ..LilConfig::default()
        };
        let a = lil_sweep(&config).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| lil_sweep(&config)).unwrap();
        assert_eq!(a.median, b.median);
        assert_eq!(
            a.rows.iter().map(|r| r.sup_statistic).collect::<Vec<_>>(),
            b.rows.iter().map(|r| r.sup_statistic).collect::<Vec<_>>()
        );
    }

    #[test]
    fn certificate_depth_strips_leading_zeros() {
        let mask = ResidueMask::new(2, 3).unwrap();
        // expansion 0001 1010 ...: tau = 11010..., position 2 must be 0
        let expansion: Bits = "00011010".parse().unwrap();
        // tau = 11010: positions 0,1 free, position 2 carries 0, 3,4 free
        assert_eq!(certificate_depth(&mask, &expansion), 5);
        let expansion: Bits = "0001110".parse().unwrap();
        // tau = 1110: position 2 carries 1 but is forced: depth 2
        assert_eq!(certificate_depth(&mask, &expansion), 2);
        // all-zero expansion certifies vacuously (tau empty)
        let expansion: Bits = "0000".parse().unwrap();
        assert_eq!(certificate_depth(&mask, &expansion), 0);
    }

    #[test]
    fn full_mask_hits_with_probability_one_at_the_deepest_scale() {
        // with the full tree every zero certifies; the window adjacent to the
        // resolution cell of t = 0 is always touched by the zero at 0
        let config = ZeroHitConfig {
            seed: 2,
            p: 1,
            q: 1,
            scale_min: 5,
            scale_max: 9,
            paths: 64,
            resolution_exp: 10,
            cert_depth: 0,
            ..ZeroHitConfig::default()
        };
        let report = zero_hit_experiment(&config).unwrap();
        let deepest = report.scales.last().unwrap();
        assert_eq!(deepest.scale, 9);
        assert_eq!(deepest.hits, deepest.trials);
        assert!(report.all_positive);
    }

    #[test]
    fn witnesses_overlap_their_window_and_certify() {
        let config = ZeroHitConfig {
            seed: 7,
            paths: 200,
            resolution_exp: 14,
            scale_min: 2,
            scale_max: 6,
            cert_depth: 4,
            ..ZeroHitConfig::default()
        };
        let mask = ResidueMask::new(2, 3).unwrap();
        let report = zero_hit_experiment(&config).unwrap();
        assert!(!report.witness_rows.is_empty());
        for w in &report.witness_rows {
            // witness interval [idx, idx+1]/2^K touches the window
            let lo = (1u64 << (14 - w.scale - 1)) - 1;
            let hi = 1u64 << (14 - w.scale);
            assert!(w.time_index >= lo && w.time_index <= hi);
            // certified to the requested depth (or the whole suffix)
            let sigma: Bits = w.expansion.parse().unwrap();
            let suffix = 14 - sigma.leading_zeros();
            assert!(w.cert_depth_reached >= config.cert_depth.min(suffix));
            assert_eq!(certificate_depth(&mask, &sigma), w.cert_depth_reached);
            // and the certified prefix genuinely lies in the tree
            let tau = sigma.suffix_from(sigma.leading_zeros());
            assert!(in_tree(&mask, &tau.prefix(w.cert_depth_reached)));
            // the walk really has a zero-touching step interval there
            let mut src = BitSource::derived(7, "zerohit-path", w.path_index as u64);
            let path = WalkPath::sample(1 << 14, &mut src).unwrap();
            assert!(path.zero_intervals().contains(&(w.time_index as usize)));
        }
    }

    #[test]
    fn zero_hit_rejects_coarse_resolution() {
        let config = ZeroHitConfig {
            resolution_exp: 8,
            scale_max: 8,
            ..ZeroHitConfig::default()
        };
        assert!(matches!(
            zero_hit_experiment(&config),
            Err(ExperimentError::ResolutionTooCoarse { .. })
        ));
    }

    #[test]
    fn self_comparison_has_zero_distance() {
        let vals: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        assert_eq!(ks_distance(&vals, &vals), 0.0);
    }

    #[test]
    fn scaling_validation() {
        let config = ScalingConfig {
            a: 3,
            ..ScalingConfig::default()
        };
        assert!(matches!(
            scaling_test(&config),
            Err(ExperimentError::BadScaleFactor(3))
        ));
        let config = ScalingConfig {
            a: 4,
            t_points: vec![rat(1, 2)],
            ..ScalingConfig::default()
        };
        assert!(matches!(
            scaling_test(&config),
            Err(ExperimentError::ScaledTimeOutOfRange { .. })
        ));
        let config = ScalingConfig {
            t_points: vec![rat(1, 3)],
            ..ScalingConfig::default()
        };
        assert!(matches!(
            scaling_test(&config),
            Err(ExperimentError::NonLatticeTime { .. })
        ));
    }

    #[test]
    fn scaling_passes_at_small_scale() {
        let config = ScalingConfig {
            seed: 23,
            a: 2,
            t_points: vec![rat(1, 4)],
            samples: 4000,
            resolution_exp: 16,
            significance: 0.01,
        };
        let report = scaling_test(&config).unwrap();
        assert!(report.all_pass, "{:?}", report.rows);
    }
}
