//! Wiener measure of half-space event atoms: deterministic quadrature
//! against Monte Carlo on the same atom, syntactic emptiness, exact path
//! membership, and the non-atomicity check.
//!
//! Run with `cargo run --example event_measures`.

use num_bigint::BigInt;
use num_rational::BigRational;
use wienerlab::dyadic::DyadicRational;
use wienerlab::events::{
    atom_measure, check_nonatomic, path_in_event, EventAtom, GeneratorEvent, MeasureConfig,
    MethodChoice,
};
use wienerlab::walk::WalkPath;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn main() {
    let generators = [
        GeneratorEvent::new(rat(1, 2), rat(0, 1)).unwrap(), // {B_1/2 < 0}
        GeneratorEvent::new(rat(1, 1), rat(0, 1)).unwrap(), // {B_1 < 0}
    ];

    // the both-negative orthant has measure exactly 3/8
    let atom = EventAtom::new(&generators, "11".parse().unwrap()).unwrap();
    let quad = atom_measure(&atom, 12, &MeasureConfig::default()).unwrap();
    println!(
        "quadrature: W(B_1/2<0, B_1<0) ∈ [{:.6}, {:.6}] (target 3/8 = 0.375)",
        quad.lower.to_f64(),
        quad.upper.to_f64()
    );
    let mc_config = MeasureConfig {
        seed: 7,
        method: MethodChoice::ForceMonteCarlo { samples: 2_000_000 },
        ..MeasureConfig::default()
    };
    let mc = atom_measure(&atom, 8, &mc_config).unwrap();
    println!(
        "monte carlo: ∈ [{:.6}, {:.6}] ({:?})",
        mc.lower.to_f64(),
        mc.upper.to_f64(),
        mc.method
    );

    // contradictory constraints at one time are detected syntactically
    let clash = [
        GeneratorEvent::new(rat(1, 1), rat(0, 1)).unwrap(),
        GeneratorEvent::new(rat(1, 1), rat(1, 1)).unwrap(),
    ];
    let empty = EventAtom::new(&clash, "10".parse().unwrap()).unwrap();
    let est = atom_measure(&empty, 12, &MeasureConfig::default()).unwrap();
    println!("B_1 ≥ 1 and B_1 < 0: exact [{}, {}]", est.lower, est.upper);

    // membership of a concrete path is decided exactly; equality is the
    // only indeterminate case
    let path = WalkPath::decode(4, "1111".parse().unwrap()).unwrap();
    for (label, event) in [
        (
            "{B_1/2 < 2}",
            GeneratorEvent::new(rat(1, 2), rat(2, 1)).unwrap(),
        ),
        (
            "{B_1/2 < 1}",
            GeneratorEvent::new(rat(1, 2), rat(1, 1)).unwrap(),
        ),
    ] {
        println!("all-up path in {label}: {:?}", path_in_event(&path, &event));
    }

    // every atom of the two-generator family stays below measure 2/5
    let bound = DyadicRational::from_f64_exact(0.4).unwrap();
    let report = check_nonatomic(&generators, 2, &bound, 10, &MeasureConfig::default()).unwrap();
    println!(
        "non-atomicity at depth 2, bound 2/5: pass={} (max atom ≤ {:.4} at mask {})",
        report.pass,
        report.max_upper.to_f64(),
        report.worst_mask
    );
}
