//! End-to-end acceptance suite: one test per criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them). Thresholds are
//! pinned in code; seeds are fixed, so every run is deterministic.
//!
//! Criteria 5 and 7 assert idealized compression-rate bands that the
//! estimator's own oracle runs refute; they are kept faithful and fail red.
//! The measured values are in the failure messages and in README
//! "Acceptance status".

use std::collections::BTreeSet;
use std::sync::Mutex;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;

use wienerlab::bits::Bits;
use wienerlab::complexity::{lz_estimate, tree_sequence, Calibration, ResidueMask};
use wienerlab::dyadic::{merge_intervals, total_length, DyadicRational, HalfOpenInterval};
use wienerlab::energy::{dimension_lower_bound, energy_exact, energy_mc, EnergyError, EnergyExact};
use wienerlab::events::{atom_measure, EventAtom, GeneratorEvent, MeasureConfig, MethodChoice};
use wienerlab::experiments::{
    lil_sweep, scaling_test, zero_hit_experiment, LilConfig, ScalingConfig, ZeroHitConfig,
};
use wienerlab::interval_map::{
    build_assignment, build_assignment_chain, random_exact_assignment, random_test,
    transfer_test_back, transfer_test_forward, MlTest,
};
use wienerlab::presentation::{
    compare_presentations, nested_endpoint_detector, CompareOutcome, EndpointVerdict, OpenInterval,
    Presentation,
};
use wienerlab::source::BitSource;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// criteria carry wall-clock budgets, so they must not compete for cores;
// a poisoned lock (an earlier red criterion) is fine to reuse
static EXCLUSIVE: Mutex<()> = Mutex::new(());

fn exclusive() -> std::sync::MutexGuard<'static, ()> {
    EXCLUSIVE.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// 1. Homomorphism suite: exact partition, union/complement homomorphism,
///    and exact length additivity over 100 random exact-split assignments of
///    depth <= 8.
#[test]
fn acceptance_01_homomorphism() {
    let _guard = exclusive();
    let start = Instant::now();
    for seed in 0..100u64 {
        let mut src = BitSource::derived(seed, "acceptance-homomorphism", 0);
        let depth = 2 + (src.uniform_below(7) as usize); // 2..=8
        let assignment = random_exact_assignment(depth, 8, &mut src);
        assert_eq!(assignment.error_budget(), &DyadicRational::zero());

        // exact partition of [0,1)
        let all: BTreeSet<Bits> = assignment.atoms().map(|(m, _)| m.clone()).collect();
        assert_eq!(
            assignment.element_image(&all).unwrap(),
            vec![HalfOpenInterval::unit()],
            "seed {seed}: atoms do not partition [0,1)"
        );

        // random elements S, T
        let pick = |src: &mut BitSource| -> BTreeSet<Bits> {
            all.iter().filter(|_| src.next_bit()).cloned().collect()
        };
        let s = pick(&mut src);
        let t = pick(&mut src);

        // Φ(S ∪ T) = Φ(S) ∪ Φ(T) exactly
        let union: BTreeSet<Bits> = s.union(&t).cloned().collect();
        let image_union = assignment.element_image(&union).unwrap();
        let merged = merge_intervals(
            [
                assignment.element_image(&s).unwrap(),
                assignment.element_image(&t).unwrap(),
            ]
            .concat(),
        );
        assert_eq!(image_union, merged, "seed {seed}: union homomorphism");

        // Φ(S^c) = [0,1) \ Φ(S) exactly: lengths add to 1 and the merged
        // union of both images is [0,1)
        let complement = assignment.complement(&s);
        let image_s = assignment.element_image(&s).unwrap();
        let image_c = assignment.element_image(&complement).unwrap();
        assert_eq!(
            &total_length(&image_s) + &total_length(&image_c),
            DyadicRational::one(),
            "seed {seed}: complement lengths"
        );
        assert_eq!(
            merge_intervals([image_s.clone(), image_c].concat()),
            vec![HalfOpenInterval::unit()],
            "seed {seed}: complement cover"
        );

        // length(Φ(S)) equals the summed atom measures exactly
        let summed = s.iter().fold(DyadicRational::zero(), |acc, mask| {
            &acc + &assignment.atom_interval(mask).unwrap().length()
        });
        assert_eq!(total_length(&image_s), summed, "seed {seed}: additivity");
    }
    let elapsed = start.elapsed();
    report(
        "1 (homomorphism suite)",
        elapsed.as_secs_f64() < 5.0,
        &format!("100 assignments, exact partition/homomorphism/additivity in {elapsed:?} (< 5 s)"),
    );
}

/// 2. Orthant probability: Monte Carlo at 10^7 brackets 3/8; quadrature
///    agrees within 2^-10.
#[test]
fn acceptance_02_orthant() {
    let _guard = exclusive();
    let start = Instant::now();
    let generators = [
        GeneratorEvent::new(rat(1, 2), rat(0, 1)).unwrap(),
        GeneratorEvent::new(rat(1, 1), rat(0, 1)).unwrap(),
    ];
    let atom = EventAtom::new(&generators, "11".parse().unwrap()).unwrap();
    let three_eighths = DyadicRational::new(3, 3);

    // oracle: bivariate orthant identity 1/4 + arcsin(sqrt(1/2))/(2π) = 3/8
    let oracle = 0.25 + 0.5f64.sqrt().asin() / (2.0 * std::f64::consts::PI);
    assert!((oracle - 0.375).abs() < 1e-12);

    let mc_config = MeasureConfig {
        seed: 0,
        method: MethodChoice::ForceMonteCarlo {
            samples: 10_000_000,
        },
        ..MeasureConfig::default()
    };
    let mc = atom_measure(&atom, 8, &mc_config).unwrap();
    let mc_ok = mc.contains(&three_eighths);

    let quad = atom_measure(&atom, 10, &MeasureConfig::default()).unwrap();
    let quad_ok = quad.contains(&three_eighths) && quad.width() <= DyadicRational::pow2(10);

    let elapsed = start.elapsed();
    report(
        "2 (orthant probability)",
        mc_ok && quad_ok && elapsed.as_secs_f64() < 30.0,
        &format!(
            "MC bracket [{}, {}] ∋ 3/8: {mc_ok}; quadrature within 2^-10: {quad_ok}; {elapsed:?} (< 30 s)",
            mc.lower.to_f64(),
            mc.upper.to_f64()
        ),
    );
}

/// 3. Energy threshold: finite iff alpha < p/q on the 0.05 grid, and Monte
///    Carlo intervals contain the exact value in >= 95/100 seeded runs (the
///    (1,2)-mask at alpha = 1/2 sits exactly at its divergence threshold and
///    must be refused).
#[test]
fn acceptance_03_energy_threshold() {
    let _guard = exclusive();
    let start = Instant::now();
    let masks = [(1u64, 2u64), (2, 3), (3, 4)];
    for (p, q) in masks {
        let mask = ResidueMask::new(p, q).unwrap();
        for j in 1..=19i64 {
            let alpha = rat(j, 20); // 0.05 .. 0.95
            let finite = matches!(energy_exact(&mask, &alpha, 64), EnergyExact::Finite { .. });
            assert_eq!(
                finite,
                alpha < rat(p as i64, q as i64),
                "({p},{q}) at alpha {alpha}"
            );
        }
    }
    let mut coverage_ok = true;
    let mut details = String::new();
    for (p, q) in masks {
        let mask = ResidueMask::new(p, q).unwrap();
        for alpha in [rat(1, 4), rat(1, 2)] {
            let exact = match energy_exact(&mask, &alpha, 400) {
                EnergyExact::Finite { value, .. } => value,
                EnergyExact::Divergent => {
                    // boundary case alpha = p/q: sampling must refuse
                    assert!(matches!(
                        energy_mc(&mask, &alpha, 1000, None, 0),
                        Err(EnergyError::Divergent { .. })
                    ));
                    continue;
                }
            };
            let mut covered = 0;
            for seed in 0..100u64 {
                let mc = energy_mc(&mask, &alpha, 1_000_000, None, seed).unwrap();
                if mc.ci_low <= exact && exact <= mc.ci_high {
                    covered += 1;
                }
            }
            details.push_str(&format!("({p},{q})@{alpha}: {covered}/100; "));
            if covered < 95 {
                coverage_ok = false;
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        "3 (energy threshold)",
        coverage_ok && elapsed.as_secs_f64() < 120.0,
        &format!("divergence grid exact; coverage {details}{elapsed:?} (< 2 min)"),
    );
}

/// 4. Dimension lower bound on the 0.01 grid: 0.66 for (2,3), 0.49 for
///    (1,2).
#[test]
fn acceptance_04_dimension_lower_bound() {
    let _guard = exclusive();
    let grid: Vec<BigRational> = (0..100).map(|j| rat(j, 100)).collect();
    let a = dimension_lower_bound(&ResidueMask::new(2, 3).unwrap(), &grid);
    let b = dimension_lower_bound(&ResidueMask::new(1, 2).unwrap(), &grid);
    let pass = a == Some(rat(66, 100)) && b == Some(rat(49, 100));
    let show = |x: &Option<BigRational>| {
        x.as_ref().map_or("none".to_string(), |r| r.to_string())
    };
    report(
        "4 (dimension lower bound)",
        pass,
        &format!(
            "(2,3) → {} (want 0.66), (1,2) → {} (want 0.49)",
            show(&a),
            show(&b)
        ),
    );
}

/// 5. Compression separation at n = 2^17 (median over 20 seeds): all-zero
///    rate < 0.1, coin rate > 0.8, and the tree/coin rate ratio in the
///    declared band [0.55, 0.80].
///
/// The ratio clause asserts an entropy idealization (≈ 2/3). The estimator's
/// oracle runs measure 0.8325 ± 0.0005: the LZ78 finite-length overhead is
/// relatively larger for lower-entropy strings and does not cancel under
/// coin normalization (the ratio is still ~0.76 at n = 2^20). The clause is
/// asserted as specified and fails red.
#[test]
fn acceptance_05_compression_separation() {
    let _guard = exclusive();
    let start = Instant::now();
    let n = 1usize << 17;
    let zeros: Bits = (0..n).map(|_| false).collect();
    let zero_rate = lz_estimate(&zeros).unwrap().rate;

    let calibration = Calibration::default();
    let coin_rate = calibration.coin_rate(n);

    let mask = ResidueMask::new(2, 3).unwrap();
    let mut ratios: Vec<f64> = (0..20u64)
        .map(|i| {
            let mut src = BitSource::derived(1000 + i, "acceptance-tz", 0);
            lz_estimate(&tree_sequence(&mask, &mut src, n))
                .unwrap()
                .rate
                / coin_rate
        })
        .collect();
    ratios.sort_by(f64::total_cmp);
    let ratio = wienerlab::complexity::median_sorted(&ratios);

    let elapsed = start.elapsed();
    let zero_ok = zero_rate < 0.1;
    let coin_ok = coin_rate > 0.8;
    let ratio_ok = (0.55..=0.80).contains(&ratio);
    report(
        "5 (compression separation)",
        zero_ok && coin_ok && ratio_ok && elapsed.as_secs_f64() < 60.0,
        &format!(
            "zero rate {zero_rate:.4} (< 0.1): {zero_ok}; coin rate {coin_rate:.4} (> 0.8): {coin_ok}; \
             tree/coin ratio {ratio:.4} (band [0.55, 0.80]): {ratio_ok}; {elapsed:?} (< 1 min)"
        ),
    );
}

/// 6. LIL sweep: 200 paths at 2^-20, 100 uniform times each, dyadic steps in
///    [2^-18, 2^-6]: median in [0.6, 1.4] and p99 < 2.5.
#[test]
fn acceptance_06_lil_sweep() {
    let _guard = exclusive();
    let start = Instant::now();
    let config = LilConfig {
        seed: 0,
        paths: 200,
        resolution_exp: 20,
        times_per_path: 100,
        coarsest_h_exp: 6,
        finest_h_exp: 18,
        band: (0.6, 1.4),
        p99_limit: 2.5,
    };
    let r = lil_sweep(&config).unwrap();
    let elapsed = start.elapsed();
    report(
        "6 (LIL sweep)",
        r.median_in_band && r.p99_below_limit && elapsed.as_secs_f64() < 300.0,
        &format!(
            "median {:.4} in [0.6, 1.4]: {}; p99 {:.4} < 2.5: {}; {elapsed:?} (< 5 min)",
            r.median, r.median_in_band, r.p99, r.p99_below_limit
        ),
    );
}

/// 7. Zero-hit monotonicity for mask (2,3), scales 2..8, 10^4 paths at
///    2^-20: nondecreasing hit probabilities within overlapping 95% intervals,
///    all strictly positive, and >= 90% of witnesses with normalized
///    compression rate < 0.8.
///
/// The first two clauses hold. The witness-rate clause asserts the same
/// entropy idealization as criterion 5 on 20-bit expansions, where the
/// estimator is also heavily quantized; the oracle measures a pass fraction
/// of ~0.33 (and ~0.19 under the alternative suffix reading), so the clause
/// is asserted as specified and fails red.
#[test]
fn acceptance_07_zero_hit() {
    let _guard = exclusive();
    let start = Instant::now();
    let config = ZeroHitConfig {
        seed: 0,
        p: 2,
        q: 3,
        scale_min: 2,
        scale_max: 8,
        paths: 10_000,
        resolution_exp: 20,
        cert_depth: 4,
        rate_threshold: 0.8,
        max_witness_rows: 100,
    };
    let r = zero_hit_experiment(&config).unwrap();
    let elapsed = start.elapsed();
    let per_scale: Vec<String> = r
        .scales
        .iter()
        .map(|s| format!("n={}: {:.4}", s.scale, s.p_hat))
        .collect();
    let witness_ok = r.witness_pass_fraction >= 0.9;
    report(
        "7 (zero-hit monotonicity)",
        r.monotone_within_ci
            && r.all_positive
            && witness_ok
            && elapsed.as_secs_f64() < 600.0,
        &format!(
            "hits [{}]; monotone within CI: {}; all positive: {}; witness pass fraction {:.4} (>= 0.9): {witness_ok}; {elapsed:?} (< 10 min)",
            per_scale.join(", "),
            r.monotone_within_ci,
            r.all_positive,
            r.witness_pass_fraction
        ),
    );
}

/// 8. Scaling: KS distances for a = 2 at t ∈ {1/8, 1/4, 1/2}, 10^5 samples,
///    all below the 1% two-sample critical value.
#[test]
fn acceptance_08_scaling() {
    let _guard = exclusive();
    let start = Instant::now();
    let config = ScalingConfig {
        seed: 0,
        a: 2,
        t_points: vec![rat(1, 8), rat(1, 4), rat(1, 2)],
        samples: 100_000,
        resolution_exp: 20,
        significance: 0.01,
    };
    let r = scaling_test(&config).unwrap();
    let elapsed = start.elapsed();
    let detail: Vec<String> = r
        .rows
        .iter()
        .map(|row| {
            format!(
                "t={}: D={:.5} (< {:.5})",
                row.t, row.ks_distance, row.critical_value
            )
        })
        .collect();
    report(
        "8 (scaling)",
        r.all_pass && elapsed.as_secs_f64() < 120.0,
        &format!("{}; {elapsed:?} (< 2 min)", detail.join("; ")),
    );
}

/// 9. Semidecidability: 1000 random unequal rational pairs answered
///    correctly, 100 equal pairs unresolved at fuel 10^4, and the three nested
///    endpoint families classified.
#[test]
fn acceptance_09_semidecidability() {
    let _guard = exclusive();
    let start = Instant::now();
    let mut src = BitSource::derived(0, "acceptance-semidecide", 0);
    let mut unequal = 0;
    while unequal < 1000 {
        let p1 = src.uniform_below(2001) as i64 - 1000;
        let q1 = src.uniform_below(999) as i64 + 1;
        let p2 = src.uniform_below(2001) as i64 - 1000;
        let q2 = src.uniform_below(999) as i64 + 1;
        let a = rat(p1, q1);
        let b = rat(p2, q2);
        if a == b {
            continue;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let pl = Presentation::of_rational(lo);
        let ph = Presentation::of_rational(hi);
        // gap >= 1/(q1 q2) >= 2^-20, so fuel 64 is ample
        assert_eq!(
            compare_presentations(&pl, &ph, 64).unwrap(),
            CompareOutcome::StrictlyLess
        );
        assert_eq!(
            compare_presentations(&ph, &pl, 64).unwrap(),
            CompareOutcome::Unresolved
        );
        unequal += 1;
    }
    for _ in 0..100 {
        let p = src.uniform_below(2001) as i64 - 1000;
        let q = src.uniform_below(999) as i64 + 1;
        let a = Presentation::of_rational(rat(p, q));
        let b = Presentation::of_rational(rat(p, q));
        assert_eq!(
            compare_presentations(&a, &b, 10_000).unwrap(),
            CompareOutcome::Unresolved
        );
    }
    let tol = DyadicRational::zero();
    let fam: Vec<_> = (1..=20)
        .map(|n| OpenInterval::new(rat(0, 1), rat(1, n)))
        .collect();
    assert_eq!(
        nested_endpoint_detector(&fam, &tol).unwrap(),
        EndpointVerdict::LeftConstant(rat(0, 1))
    );
    let fam: Vec<_> = (2..=20)
        .map(|n| OpenInterval::new(rat(1, 2) - rat(1, n), rat(1, 2)))
        .collect();
    assert_eq!(
        nested_endpoint_detector(&fam, &tol).unwrap(),
        EndpointVerdict::RightConstant(rat(1, 2))
    );
    let fam: Vec<_> = (1..=20)
        .map(|n| OpenInterval::new(rat(-1, n), rat(1, n)))
        .collect();
    assert_eq!(
        nested_endpoint_detector(&fam, &tol).unwrap(),
        EndpointVerdict::Inconclusive
    );
    let elapsed = start.elapsed();
    report(
        "9 (semidecidability suite)",
        elapsed.as_secs_f64() < 5.0,
        &format!(
            "1000 unequal pairs answered, 100 equal pairs unresolved at fuel 10^4, endpoint families classified; {elapsed:?} (< 5 s)"
        ),
    );
}

/// 10. Test transfer: 20 seeded tests over depth-6 algebras transfer
///     forward with level sizes within bound + budget; backward deficits
///     are nonincreasing as depth grows 2 → 8.
#[test]
fn acceptance_10_test_transfer() {
    let _guard = exclusive();
    let start = Instant::now();
    let grid = 6u64;
    for seed in 0..20u64 {
        // seeded generator family: 8 distinct dyadic times, varied thresholds
        let mut src = BitSource::derived(seed, "acceptance-transfer", 0);
        let mut times: Vec<u64> = Vec::new();
        while times.len() < 8 {
            let t = 1 + src.uniform_below(31); // k/32, distinct
            if !times.contains(&t) {
                times.push(t);
            }
        }
        let generators: Vec<GeneratorEvent> = times
            .iter()
            .map(|&t| {
                let y_num = src.uniform_below(9) as i64 - 4; // -4..=4 over 4
                GeneratorEvent::new(rat(t as i64, 32), rat(y_num, 4)).unwrap()
            })
            .collect();
        let config = MeasureConfig {
            seed,
            ..MeasureConfig::default()
        };
        let assignment = build_assignment(&generators, 6, grid, &config).unwrap();
        let mut test_src = BitSource::derived(seed, "acceptance-transfer-test", 1);
        let test = random_test(&assignment, 5, &mut test_src);
        // forward transfer checks μU_n <= 2^-n + slack internally and the
        // reported sizes must match the bound too
        let forward = transfer_test_forward(&test, &assignment).unwrap();
        for (i, level) in forward.levels.iter().enumerate() {
            let union: usize = test.levels[i].iter().map(|e| e.len()).sum();
            let slack = &DyadicRational::from_int(union as i64) * assignment.error_budget();
            assert!(
                level.total_length <= &MlTest::level_bound(i) + &slack,
                "seed {seed} level {}: size {} over bound",
                i + 1,
                level.total_length
            );
        }

        // backward transfer: deficits nonincreasing as depth grows 2..=8,
        // on consistent snapshots of one construction pass
        let cylinders = vec![vec![
            Bits::empty(),
            "0".parse().unwrap(),
            "1".parse().unwrap(),
            "01".parse().unwrap(),
        ]];
        let chain = build_assignment_chain(&generators, 8, grid, &config).unwrap();
        let mut previous: Option<DyadicRational> = None;
        for (depth, assignment) in chain.iter().enumerate().skip(2) {
            let back = transfer_test_back(&cylinders, assignment, 64).unwrap();
            let deficit = back[0].deficit.clone();
            if let Some(prev) = &previous {
                assert!(
                    deficit <= *prev,
                    "seed {seed}: deficit grew {prev} → {deficit} at depth {depth}"
                );
            }
            previous = Some(deficit);
        }
    }
    let elapsed = start.elapsed();
    report(
        "10 (test transfer)",
        elapsed.as_secs_f64() < 60.0,
        &format!(
            "20 seeded tests: forward sizes within bound + budget, backward deficits nonincreasing 2→8; {elapsed:?} (< 1 min)"
        ),
    );
}
