//! Half-space events `{B_t < y}` on path space, atoms of the algebras they
//! generate, and Wiener-measure computation to requested dyadic precision.
//!
//! Under Wiener measure the marginal at time `t` is centered Gaussian with
//! variance `t`, and increments over disjoint intervals are independent. An
//! atom constrains finitely many marginals, so its measure is a Gaussian box
//! probability: deterministic nested quadrature over independent increments
//! handles up to four distinct times, Monte Carlo with a stated-confidence
//! bracket handles the rest.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::bits::Bits;
use crate::dyadic::DyadicRational;
use crate::quad;
use crate::source::BitSource;
use crate::walk::WalkPath;

/// Clipping constant for quadrature: per-increment mass beyond `CLIP_SIGMAS`
/// standard deviations is bounded by `normal_tail_bound` and charged to the
/// bracket.
const CLIP_SIGMAS: f64 = 7.0;

/// z-value of the two-sided 99.9% normal confidence interval used for Monte
/// Carlo brackets.
pub const MC_Z: f64 = 3.2905;

#[derive(Debug, Error)]
pub enum EventError {
    #[error("event time {0} outside (0,1]")]
    TimeOutOfRange(BigRational),
    #[error("mask length {mask} does not match generator count {generators}")]
    MaskLengthMismatch { mask: usize, generators: usize },
    #[error("precision 2^-{requested} needs {required} Monte Carlo samples, over the budget of {budget}")]
    SampleBudget {
        requested: u64,
        required: u64,
        budget: u64,
    },
    #[error("precision 2^-{requested} not reachable by quadrature refinement (width {width:e})")]
    QuadratureBudget { requested: u64, width: f64 },
    #[error("precision 2^-{requested} exceeds configured maximum 2^-{max}")]
    PrecisionTooFine { requested: u64, max: u64 },
    #[error("nonatomicity depth {depth} exceeds cap {cap}")]
    DepthBudget { depth: usize, cap: usize },
    #[error("path membership is on the event boundary for generator {0}")]
    BoundaryMembership(usize),
}

/// The event `{B_time < threshold}` for rational `time ∈ (0,1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorEvent {
    time: BigRational,
    threshold: BigRational,
}

impl GeneratorEvent {
    pub fn new(time: BigRational, threshold: BigRational) -> Result<Self, EventError> {
        if !time.is_positive() || time > BigRational::from(BigInt::from(1)) {
            return Err(EventError::TimeOutOfRange(time));
        }
        Ok(GeneratorEvent { time, threshold })
    }

    pub fn time(&self) -> &BigRational {
        &self.time
    }

    pub fn threshold(&self) -> &BigRational {
        &self.threshold
    }
}

impl fmt::Display for GeneratorEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{B_{} < {}}}", self.time, self.threshold)
    }
}

/// Intersection of the first `mask.len()` generators, each taken positively
/// (bit 1) or complemented (bit 0). The empty mask denotes the whole space.
#[derive(Debug, Clone)]
pub struct EventAtom<'a> {
    generators: &'a [GeneratorEvent],
    mask: Bits,
}

impl<'a> EventAtom<'a> {
    pub fn new(generators: &'a [GeneratorEvent], mask: Bits) -> Result<Self, EventError> {
        if mask.len() > generators.len() {
            return Err(EventError::MaskLengthMismatch {
                mask: mask.len(),
                generators: generators.len(),
            });
        }
        Ok(EventAtom { generators, mask })
    }

    pub fn mask(&self) -> &Bits {
        &self.mask
    }

    /// Per distinct time, the half-open value window `[lo, hi)` that the
    /// marginal must fall in; `None` bounds are unconstrained. Times are
    /// deduplicated and sorted; syntactically identical events collapse.
    fn windows(&self) -> BTreeMap<BigRational, Window> {
        let mut map: BTreeMap<BigRational, Window> = BTreeMap::new();
        for (k, include) in self.mask.iter().enumerate() {
            let g = &self.generators[k];
            let w = map.entry(g.time.clone()).or_default();
            if include {
                w.tighten_upper(&g.threshold);
            } else {
                w.tighten_lower(&g.threshold);
            }
        }
        map
    }
}

#[derive(Debug, Clone, Default)]
struct Window {
    lo: Option<BigRational>,
    hi: Option<BigRational>,
}

impl Window {
    fn tighten_upper(&mut self, y: &BigRational) {
        if self.hi.as_ref().is_none_or(|h| y < h) {
            self.hi = Some(y.clone());
        }
    }

    fn tighten_lower(&mut self, y: &BigRational) {
        if self.lo.as_ref().is_none_or(|l| y > l) {
            self.lo = Some(y.clone());
        }
    }

    /// `[lo, hi)` with `hi <= lo` is the empty event.
    fn is_empty(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(lo), Some(hi)) if hi <= lo)
    }

    fn lo_f64(&self) -> f64 {
        self.lo
            .as_ref()
            .and_then(|x| x.to_f64())
            .unwrap_or(f64::NEG_INFINITY)
    }

    fn hi_f64(&self) -> f64 {
        self.hi
            .as_ref()
            .and_then(|x| x.to_f64())
            .unwrap_or(f64::INFINITY)
    }
}

/// How the measure bracket was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    /// Deterministic nested Gauss–Legendre over independent increments; the
    /// bracket is a hard bound up to clipping charged into it.
    Quadrature,
    /// Seeded Monte Carlo; the bracket is a 99.9% Wilson confidence interval,
    /// not a hard bound.
    MonteCarlo { samples: u64 },
}

/// A dyadic bracket `[lower, upper]` around a Wiener measure.
#[derive(Debug, Clone)]
pub struct MeasureEstimate {
    pub lower: DyadicRational,
    pub upper: DyadicRational,
    pub method: EstimateMethod,
}

impl MeasureEstimate {
    fn exact(value: DyadicRational) -> Self {
        MeasureEstimate {
            lower: value.clone(),
            upper: value,
            method: EstimateMethod::Quadrature,
        }
    }

    pub fn width(&self) -> DyadicRational {
        &self.upper - &self.lower
    }

    pub fn midpoint(&self) -> DyadicRational {
        (&self.lower + &self.upper).half()
    }

    pub fn contains(&self, x: &DyadicRational) -> bool {
        self.lower <= *x && *x <= self.upper
    }

    fn from_f64_bracket(lo: f64, hi: f64, grid: u64, method: EstimateMethod) -> Self {
        let lower = DyadicRational::from_f64_exact(lo.max(0.0))
            .unwrap()
            .floor_to_grid(grid)
            .clamp_unit();
        let upper = DyadicRational::from_f64_exact(hi.min(1.0))
            .unwrap()
            .ceil_to_grid(grid)
            .clamp_unit();
        MeasureEstimate {
            lower,
            upper,
            method,
        }
    }
}

/// Tuning knobs for [`atom_measure`]; the defaults match the documented
/// contract (quadrature through 4 distinct times, then Monte Carlo).
#[derive(Debug, Clone)]
pub struct MeasureConfig {
    pub seed: u64,
    /// Most distinct times handled by quadrature.
    pub max_quadrature_times: usize,
    /// Finest allowed precision exponent.
    pub max_precision: u64,
    /// Monte Carlo sample budget.
    pub max_samples: u64,
    pub method: MethodChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    /// Quadrature when the number of distinct times allows, else Monte Carlo.
    Auto,
    /// Monte Carlo with exactly this many samples.
    ForceMonteCarlo {
        samples: u64,
    },
    ForceQuadrature,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            seed: 0,
            max_quadrature_times: 4,
            max_precision: 20,
            max_samples: 100_000_000,
            method: MethodChoice::Auto,
        }
    }
}

/// Estimate the Wiener measure of an atom to within `2^-precision`.
///
/// Contradictory constraints at a single time are detected syntactically and
/// give the exact bracket `[0,0]`; the empty mask gives `[1,1]`.
pub fn atom_measure(
    atom: &EventAtom,
    precision: u64,
    config: &MeasureConfig,
) -> Result<MeasureEstimate, EventError> {
    if precision > config.max_precision {
        return Err(EventError::PrecisionTooFine {
            requested: precision,
            max: config.max_precision,
        });
    }
    let windows = atom.windows();
    if windows.values().any(Window::is_empty) {
        return Ok(MeasureEstimate::exact(DyadicRational::zero()));
    }
    let constrained: Vec<(&BigRational, &Window)> = windows
        .iter()
        .filter(|(_, w)| w.lo.is_some() || w.hi.is_some())
        .collect();
    if constrained.is_empty() {
        return Ok(MeasureEstimate::exact(DyadicRational::one()));
    }
    let d = constrained.len();
    match config.method {
        MethodChoice::ForceQuadrature => quadrature_measure(&constrained, precision),
        MethodChoice::ForceMonteCarlo { samples } => {
            mc_measure(&constrained, precision, samples, config)
        }
        MethodChoice::Auto => {
            if d <= config.max_quadrature_times {
                quadrature_measure(&constrained, precision)
            } else {
                let required = required_samples(precision);
                if required > config.max_samples {
                    return Err(EventError::SampleBudget {
                        requested: precision,
                        required,
                        budget: config.max_samples,
                    });
                }
                mc_measure(&constrained, precision, required, config)
            }
        }
    }
}

/// Samples needed so the worst-case 99.9% interval half-width is
/// `2^-precision / 2`.
pub fn required_samples(precision: u64) -> u64 {
    let target = 0.5 * 0.5f64.powi(precision as i32);
    (MC_Z / (2.0 * target)).powi(2).ceil() as u64
}

fn quadrature_measure(
    windows: &[(&BigRational, &Window)],
    precision: u64,
) -> Result<MeasureEstimate, EventError> {
    // change of variables to independent increments; each nested integral
    // uses limits shifted by the accumulated value, so nodes always sit on
    // an interval commensurate with the increment scale
    let mut variances = Vec::with_capacity(windows.len());
    let mut prev = 0.0f64;
    for (t, _) in windows {
        let tf = t.to_f64().unwrap();
        variances.push(tf - prev);
        prev = tf;
    }
    let bounds: Vec<(f64, f64)> = windows
        .iter()
        .map(|(_, w)| (w.lo_f64(), w.hi_f64()))
        .collect();
    let clip_err = windows.len() as f64 * 2.0 * quad::normal_tail_bound(CLIP_SIGMAS);
    let target = 0.25 * 0.5f64.powi(precision as i32);

    let mut nodes_per_dim = initial_nodes(windows.len()).min(nodes_cap(windows.len()));
    let mut prev_est = nested_gauss(&variances, &bounds, nodes_per_dim);
    loop {
        if nodes_per_dim >= nodes_cap(windows.len()) {
            let width = clip_err; // refinement exhausted; report best effort
            let err = (prev_est.1).max(clip_err);
            if err > target {
                return Err(EventError::QuadratureBudget {
                    requested: precision,
                    width,
                });
            }
            break;
        }
        nodes_per_dim *= 2;
        let est = nested_gauss(&variances, &bounds, nodes_per_dim);
        let err = (est.0 - prev_est.0).abs();
        prev_est = (est.0, err);
        if err + clip_err <= target {
            break;
        }
    }
    let (value, err) = prev_est;
    let hw = err + clip_err + f64::EPSILON;
    Ok(MeasureEstimate::from_f64_bracket(
        value - hw,
        value + hw,
        precision + 4,
        EstimateMethod::Quadrature,
    ))
}

fn nodes_cap(dims: usize) -> usize {
    match dims {
        0 | 1 => 1024,
        2 => 256,
        3 => 128,
        _ => 64,
    }
}

fn initial_nodes(dims: usize) -> usize {
    match dims {
        0 | 1 => 64,
        2 => 32,
        3 => 16,
        _ => 12,
    }
}

/// Nested Gauss–Legendre evaluation of the box probability in increment
/// space. Returns `(estimate, internal error guess)`.
fn nested_gauss(variances: &[f64], bounds: &[(f64, f64)], n: usize) -> (f64, f64) {
    let (nodes, weights) = quad::gauss_legendre(n);
    let value = nested_gauss_rec(variances, bounds, 0, 0.0, &nodes, &weights);
    (value, f64::EPSILON * n as f64)
}

fn nested_gauss_rec(
    variances: &[f64],
    bounds: &[(f64, f64)],
    dim: usize,
    acc: f64,
    nodes: &[f64],
    weights: &[f64],
) -> f64 {
    if dim == variances.len() {
        return 1.0;
    }
    let var = variances[dim];
    let sigma = var.sqrt();
    let (lo_b, hi_b) = bounds[dim];
    // increment x must land the partial sum in [lo_b, hi_b]
    let lo = (lo_b - acc).max(-CLIP_SIGMAS * sigma);
    let hi = (hi_b - acc).min(CLIP_SIGMAS * sigma);
    if lo >= hi {
        return 0.0;
    }
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        let inc = mid + half * x;
        let density = quad::normal_pdf(inc, var);
        if density == 0.0 {
            continue;
        }
        sum +=
            w * density * nested_gauss_rec(variances, bounds, dim + 1, acc + inc, nodes, weights);
    }
    sum * half
}

fn mc_measure(
    windows: &[(&BigRational, &Window)],
    precision: u64,
    samples: u64,
    config: &MeasureConfig,
) -> Result<MeasureEstimate, EventError> {
    let mut variances = Vec::with_capacity(windows.len());
    let mut prev = 0.0f64;
    for (t, _) in windows {
        let tf = t.to_f64().unwrap();
        variances.push((tf - prev).sqrt());
        prev = tf;
    }
    let bounds: Vec<(f64, f64)> = windows
        .iter()
        .map(|(_, w)| (w.lo_f64(), w.hi_f64()))
        .collect();
    let mut src = BitSource::derived(config.seed, "atom-measure", 0);
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut b = 0.0f64;
        let mut ok = true;
        for (sigma, (lo, hi)) in variances.iter().zip(&bounds) {
            b += sigma * src.standard_normal();
            if !(b >= *lo && b < *hi) {
                ok = false;
                break;
            }
        }
        if ok {
            hits += 1;
        }
    }
    let (lo, hi) = wilson_interval(hits, samples, MC_Z);
    let est = MeasureEstimate::from_f64_bracket(
        lo,
        hi,
        precision + 4,
        EstimateMethod::MonteCarlo { samples },
    );
    if est.width() > DyadicRational::pow2(precision) {
        return Err(EventError::SampleBudget {
            requested: precision,
            required: required_samples(precision),
            budget: samples,
        });
    }
    Ok(est)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let hw = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - hw).max(0.0), (center + hw).min(1.0))
}

/// Membership of a walk path in a half-space event, by exact comparison of
/// the path value (a rational multiple of `1/√n`) against the rational
/// threshold. `Indeterminate` occurs only on exact equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Indeterminate,
}

pub fn path_in_event(path: &WalkPath, event: &GeneratorEvent) -> Membership {
    let value = path
        .eval(&event.time)
        .expect("event time validated to lie in (0,1]");
    match value.cmp_rational(&event.threshold) {
        std::cmp::Ordering::Less => Membership::In,
        std::cmp::Ordering::Greater => Membership::Out,
        std::cmp::Ordering::Equal => Membership::Indeterminate,
    }
}

/// Joint Monte Carlo measure brackets for every mask of length `depth` in a
/// single pass: each sample lands in exactly one atom, so one run prices the
/// whole partition. Returned map contains every mask (zero-hit atoms get a
/// Wilson bracket around 0).
pub fn measure_all_atoms(
    generators: &[GeneratorEvent],
    depth: usize,
    samples: u64,
    seed: u64,
) -> BTreeMap<Bits, MeasureEstimate> {
    assert!(depth <= generators.len());
    assert!(depth <= 20, "mask enumeration of 2^{depth} atoms");
    // distinct sorted times and, per generator, its time slot
    let mut times: Vec<BigRational> = Vec::new();
    for g in &generators[..depth] {
        if !times.contains(&g.time) {
            times.push(g.time.clone());
        }
    }
    times.sort();
    let slots: Vec<usize> = generators[..depth]
        .iter()
        .map(|g| times.iter().position(|t| t == &g.time).unwrap())
        .collect();
    let sigmas: Vec<f64> = {
        let mut out = Vec::with_capacity(times.len());
        let mut prev = 0.0;
        for t in &times {
            let tf = t.to_f64().unwrap();
            out.push((tf - prev).sqrt());
            prev = tf;
        }
        out
    };
    let thresholds: Vec<f64> = generators[..depth]
        .iter()
        .map(|g| g.threshold.to_f64().unwrap())
        .collect();

    let mut counts: Vec<u64> = vec![0; 1 << depth];
    let mut src = BitSource::derived(seed, "atoms-joint", 0);
    let mut values = vec![0.0f64; times.len()];
    for _ in 0..samples {
        let mut b = 0.0;
        for (v, sigma) in values.iter_mut().zip(&sigmas) {
            b += sigma * src.standard_normal();
            *v = b;
        }
        let mut index = 0usize;
        for k in 0..depth {
            index <<= 1;
            if values[slots[k]] < thresholds[k] {
                index |= 1;
            }
        }
        counts[index] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(index, &hits)| {
            let (lo, hi) = wilson_interval(hits, samples, MC_Z);
            let est = MeasureEstimate::from_f64_bracket(
                lo,
                hi,
                40,
                EstimateMethod::MonteCarlo { samples },
            );
            (Bits::from_index(index as u64, depth), est)
        })
        .collect()
}

/// Report of [`check_nonatomic`].
#[derive(Debug, Clone)]
pub struct NonAtomicityReport {
    pub depth: usize,
    pub bound: DyadicRational,
    pub max_upper: DyadicRational,
    pub worst_mask: Bits,
    pub pass: bool,
    pub atoms_evaluated: usize,
    pub pruned_empty: usize,
}

/// Check that every atom of the first `depth` generators has measure (upper
/// bound) at most `bound`. Syntactically empty atoms are pruned without
/// pricing; small depths go through quadrature per atom, larger ones through
/// one joint Monte Carlo pass.
pub fn check_nonatomic(
    generators: &[GeneratorEvent],
    depth: usize,
    bound: &DyadicRational,
    precision: u64,
    config: &MeasureConfig,
) -> Result<NonAtomicityReport, EventError> {
    const DEPTH_CAP: usize = 16;
    if depth > DEPTH_CAP || depth > generators.len() {
        return Err(EventError::DepthBudget {
            depth,
            cap: DEPTH_CAP.min(generators.len()),
        });
    }
    let mut max_upper = DyadicRational::zero();
    let mut worst_mask = Bits::empty();
    let mut evaluated = 0usize;
    let mut pruned = 0usize;

    let distinct_times: usize = {
        let mut ts: Vec<&BigRational> = generators[..depth].iter().map(|g| &g.time).collect();
        ts.sort();
        ts.dedup();
        ts.len()
    };

    let forced_mc = matches!(config.method, MethodChoice::ForceMonteCarlo { .. });
    if distinct_times <= config.max_quadrature_times && !forced_mc {
        for index in 0..(1u64 << depth) {
            let mask = Bits::from_index(index, depth);
            let atom = EventAtom::new(generators, mask.clone())?;
            if atom.windows().values().any(Window::is_empty) {
                pruned += 1;
                continue;
            }
            let est = atom_measure(&atom, precision, config)?;
            evaluated += 1;
            if est.upper > max_upper {
                max_upper = est.upper.clone();
                worst_mask = mask;
            }
        }
    } else {
        let samples = required_samples(precision).min(config.max_samples);
        let all = measure_all_atoms(generators, depth, samples, config.seed);
        for (mask, est) in all {
            let atom = EventAtom::new(generators, mask.clone())?;
            if atom.windows().values().any(Window::is_empty) {
                pruned += 1;
                continue;
            }
            evaluated += 1;
            if est.upper > max_upper {
                max_upper = est.upper.clone();
                worst_mask = mask;
            }
        }
    }
    let pass = max_upper <= *bound;
    Ok(NonAtomicityReport {
        depth,
        bound: bound.clone(),
        max_upper,
        worst_mask,
        pass,
        atoms_evaluated: evaluated,
        pruned_empty: pruned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn gen(t: (i64, i64), y: (i64, i64)) -> GeneratorEvent {
        GeneratorEvent::new(rat(t.0, t.1), rat(y.0, y.1)).unwrap()
    }

    fn dy(n: i64, e: u64) -> DyadicRational {
        DyadicRational::new(n, e)
    }

    /// independent oracle: the bivariate orthant identity
    /// P(B_s < 0, B_t < 0) = 1/4 + arcsin(√(s/t)) / (2π)
    fn orthant_oracle(s: f64, t: f64) -> f64 {
        0.25 + (s / t).sqrt().asin() / (2.0 * std::f64::consts::PI)
    }

    #[test]
    fn time_validation() {
        assert!(GeneratorEvent::new(rat(0, 1), rat(0, 1)).is_err());
        assert!(GeneratorEvent::new(rat(3, 2), rat(0, 1)).is_err());
        assert!(GeneratorEvent::new(rat(1, 1), rat(0, 1)).is_ok());
    }

    #[test]
    fn single_halfspace_brackets_one_half() {
        let gens = [gen((1, 1), (0, 1))];
        let atom = EventAtom::new(&gens, "1".parse().unwrap()).unwrap();
        let est = atom_measure(&atom, 6, &MeasureConfig::default()).unwrap();
        assert_eq!(est.method, EstimateMethod::Quadrature);
        assert!(est.contains(&dy(1, 1)), "bracket {:?} misses 1/2", est);
        assert!(est.width() <= DyadicRational::pow2(6));
    }

    #[test]
    fn orthant_brackets_three_eighths() {
        let gens = [gen((1, 2), (0, 1)), gen((1, 1), (0, 1))];
        let atom = EventAtom::new(&gens, "11".parse().unwrap()).unwrap();
        let est = atom_measure(&atom, 8, &MeasureConfig::default()).unwrap();
        // oracle: 1/4 + arcsin(√½)/(2π) = 3/8 exactly
        let oracle = orthant_oracle(0.5, 1.0);
        assert!((oracle - 0.375).abs() < 1e-12);
        assert!(est.contains(&dy(3, 3)), "bracket {:?} misses 3/8", est);
    }

    #[test]
    fn contradictory_constraints_give_exact_zero() {
        // B_1 >= 1 and B_1 < 0
        let gens = [gen((1, 1), (0, 1)), gen((1, 1), (1, 1))];
        let atom = EventAtom::new(&gens, "10".parse().unwrap()).unwrap();
        let est = atom_measure(&atom, 8, &MeasureConfig::default()).unwrap();
        assert_eq!(est.lower, DyadicRational::zero());
        assert_eq!(est.upper, DyadicRational::zero());
    }

    #[test]
    fn empty_mask_is_full_space() {
        let gens = [gen((1, 1), (0, 1))];
        let atom = EventAtom::new(&gens, Bits::empty()).unwrap();
        let est = atom_measure(&atom, 8, &MeasureConfig::default()).unwrap();
        assert_eq!(est.lower, DyadicRational::one());
        assert_eq!(est.upper, DyadicRational::one());
    }

    #[test]
    fn monte_carlo_agrees_with_quadrature() {
        let gens = [gen((1, 2), (0, 1)), gen((1, 1), (0, 1))];
        let atom = EventAtom::new(&gens, "11".parse().unwrap()).unwrap();
        let mut config = MeasureConfig {
            method: MethodChoice::ForceMonteCarlo { samples: 400_000 },
            seed: 11,
            ..MeasureConfig::default()
        };
        let mc = atom_measure(&atom, 7, &config).unwrap();
        config.method = MethodChoice::Auto;
        let q = atom_measure(&atom, 10, &config).unwrap();
        assert!(matches!(mc.method, EstimateMethod::MonteCarlo { .. }));
        // brackets overlap
        assert!(mc.lower <= q.upper && q.lower <= mc.upper);
    }

    #[test]
    fn sample_budget_error_names_required_count() {
        let gens = [
            gen((1, 8), (0, 1)),
            gen((1, 4), (0, 1)),
            gen((1, 2), (0, 1)),
            gen((3, 4), (0, 1)),
            gen((1, 1), (0, 1)),
        ];
        let atom = EventAtom::new(&gens, "11111".parse().unwrap()).unwrap();
        let config = MeasureConfig {
            max_samples: 1000,
            ..MeasureConfig::default()
        };
        match atom_measure(&atom, 10, &config) {
            Err(EventError::SampleBudget { required, .. }) => {
                assert_eq!(required, required_samples(10));
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn additivity_of_refinements() {
        // bracket of a mask contains the sum of its two refinements
        let gens = [gen((1, 2), (1, 4)), gen((1, 1), (-1, 3))];
        let config = MeasureConfig::default();
        let parent = EventAtom::new(&gens, "1".parse().unwrap()).unwrap();
        let left = EventAtom::new(&gens, "11".parse().unwrap()).unwrap();
        let right = EventAtom::new(&gens, "10".parse().unwrap()).unwrap();
        let p = atom_measure(&parent, 12, &config).unwrap();
        let l = atom_measure(&left, 12, &config).unwrap();
        let r = atom_measure(&right, 12, &config).unwrap();
        assert!(&l.lower + &r.lower <= p.upper);
        assert!(&l.upper + &r.upper >= p.lower);
    }

    #[test]
    fn total_mass_brackets_one() {
        let gens = [
            gen((1, 4), (1, 2)),
            gen((1, 2), (0, 1)),
            gen((1, 1), (-1, 4)),
        ];
        let config = MeasureConfig::default();
        let mut lower = DyadicRational::zero();
        let mut upper = DyadicRational::zero();
        for index in 0..8u64 {
            let atom = EventAtom::new(&gens, Bits::from_index(index, 3)).unwrap();
            let est = atom_measure(&atom, 12, &config).unwrap();
            lower = &lower + &est.lower;
            upper = &upper + &est.upper;
        }
        assert!(lower <= DyadicRational::one() && DyadicRational::one() <= upper);
        assert!((&upper - &lower) <= DyadicRational::new(8, 12)); // 8 · 2^-12
    }

    #[test]
    fn threshold_negation_symmetry() {
        // replacing y by -y and complementing the mask preserves the measure
        let gens = [gen((1, 2), (1, 4)), gen((1, 1), (-2, 5))];
        let neg = [gen((1, 2), (-1, 4)), gen((1, 1), (2, 5))];
        let config = MeasureConfig::default();
        for index in 0..4u64 {
            let mask = Bits::from_index(index, 2);
            let flipped: Bits = mask.iter().map(|b| !b).collect();
            let a = atom_measure(&EventAtom::new(&gens, mask).unwrap(), 12, &config).unwrap();
            let b = atom_measure(&EventAtom::new(&neg, flipped).unwrap(), 12, &config).unwrap();
            // the complemented event differs by a boundary of measure zero;
            // brackets must overlap
            assert!(a.lower <= b.upper && b.lower <= a.upper);
        }
    }

    #[test]
    fn path_membership_examples() {
        let path = WalkPath::decode(4, "1111".parse().unwrap()).unwrap();
        assert_eq!(
            path_in_event(&path, &gen((1, 2), (2, 1))),
            Membership::In // value 1 < 2
        );
        assert_eq!(
            path_in_event(&path, &gen((1, 2), (1, 1))),
            Membership::Indeterminate // value exactly 1
        );
        let path = WalkPath::decode(2, "10".parse().unwrap()).unwrap();
        assert_eq!(
            path_in_event(&path, &gen((1, 1), (-1, 4))),
            Membership::Out // value 0 >= -1/4
        );
    }

    #[test]
    fn nonatomicity_check_examples() {
        let config = MeasureConfig::default();
        let bound = DyadicRational::from_f64_exact(0.6).unwrap();
        let gens = [gen((1, 1), (0, 1))];
        let report = check_nonatomic(&gens, 1, &bound, 8, &config).unwrap();
        assert!(report.pass, "max atom {:?}", report.max_upper);

        // depth 2 with times 1/2 and 1: orthant values 3/8, 1/8, 1/8, 3/8
        let bound = DyadicRational::from_f64_exact(0.4).unwrap();
        let gens = [gen((1, 2), (0, 1)), gen((1, 1), (0, 1))];
        let report = check_nonatomic(&gens, 2, &bound, 8, &config).unwrap();
        assert!(report.pass);
        assert!(report.max_upper.to_f64() < 0.4 && report.max_upper.to_f64() > 0.35);

        // duplicated generator adds no splitting: an atom keeps measure 1/2
        let gens = [gen((1, 1), (0, 1)), gen((1, 1), (0, 1))];
        let report = check_nonatomic(&gens, 2, &bound, 8, &config).unwrap();
        assert!(!report.pass);
        assert_eq!(report.pruned_empty, 2); // masks 10 and 01 are contradictory
    }

    #[test]
    fn quadrature_and_monte_carlo_agree_on_random_atoms() {
        for seed in 0..6u64 {
            let mut src = BitSource::derived(seed, "agree-prop", 0);
            // three generators at distinct dyadic times with small rational
            // thresholds; some time pairs are adjacent, which stresses the
            // increment-space quadrature with narrow kernels
            let mut times: Vec<u64> = Vec::new();
            while times.len() < 3 {
                let t = 1 + src.uniform_below(16);
                if !times.contains(&t) {
                    times.push(t);
                }
            }
            let gens: Vec<GeneratorEvent> = times
                .iter()
                .map(|&t| {
                    let y = src.uniform_below(9) as i64 - 4;
                    GeneratorEvent::new(rat(t as i64, 16), rat(y, 4)).unwrap()
                })
                .collect();
            let mask = Bits::from_index(src.uniform_below(8), 3);
            let atom = EventAtom::new(&gens, mask.clone()).unwrap();
            let quad = atom_measure(&atom, 10, &MeasureConfig::default()).unwrap();
            let mc_config = MeasureConfig {
                seed: seed + 100,
                method: MethodChoice::ForceMonteCarlo { samples: 300_000 },
                ..MeasureConfig::default()
            };
            let mc = atom_measure(&atom, 7, &mc_config).unwrap();
            assert!(
                mc.lower <= quad.upper && quad.lower <= mc.upper,
                "seed {seed} mask {mask}: quadrature {:?}..{:?} vs MC {:?}..{:?}",
                quad.lower.to_f64(),
                quad.upper.to_f64(),
                mc.lower.to_f64(),
                mc.upper.to_f64()
            );
        }
    }

    #[test]
    fn joint_pass_matches_per_atom_quadrature() {
        let gens = [gen((1, 2), (0, 1)), gen((1, 1), (0, 1))];
        let all = measure_all_atoms(&gens, 2, 200_000, 5);
        let config = MeasureConfig::default();
        for (mask, joint) in &all {
            let atom = EventAtom::new(&gens, mask.clone()).unwrap();
            let quad = atom_measure(&atom, 10, &config).unwrap();
            assert!(
                joint.lower <= quad.upper && quad.lower <= joint.upper,
                "mask {mask}: joint {joint:?} vs quadrature {quad:?}"
            );
        }
    }
}
