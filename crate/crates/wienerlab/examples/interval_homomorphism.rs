//! The measure-algebra-to-interval map: build the atom table from measured
//! splits, verify it is an exact partition and a homomorphism, and locate a
//! concrete path inside its shrinking atom interval.
//!
//! Run with `cargo run --example interval_homomorphism`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use wienerlab::bits::Bits;
use wienerlab::dyadic::total_length;
use wienerlab::events::{GeneratorEvent, MeasureConfig};
use wienerlab::interval_map::{build_assignment_chain, path_interval};
use wienerlab::source::BitSource;
use wienerlab::walk::WalkPath;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn main() {
    let generators = [
        GeneratorEvent::new(rat(1, 2), rat(0, 1)).unwrap(),
        GeneratorEvent::new(rat(1, 1), rat(0, 1)).unwrap(),
        GeneratorEvent::new(rat(1, 4), rat(1, 2)).unwrap(),
        GeneratorEvent::new(rat(3, 4), rat(-1, 2)).unwrap(),
    ];
    let config = MeasureConfig::default();
    let chain = build_assignment_chain(&generators, 4, 12, &config).unwrap();
    let assignment = chain.last().unwrap();

    println!(
        "atom table at depth 4 (error budget {}):",
        assignment.error_budget()
    );
    for (mask, interval) in assignment.atoms() {
        if !interval.is_empty() {
            println!(
                "  {mask} → {interval}  (length {:.5})",
                interval.length().to_f64()
            );
        }
    }

    // the table partitions [0,1) exactly, measure uncertainty notwithstanding
    let all: BTreeSet<Bits> = assignment.atoms().map(|(m, _)| m.clone()).collect();
    let image = assignment.element_image(&all).unwrap();
    println!(
        "image of the full algebra: {:?}",
        image.iter().map(|i| i.to_string()).collect::<Vec<_>>()
    );

    // union and complement are exact interval operations
    let s: BTreeSet<Bits> = all.iter().filter(|m| m.get(0)).cloned().collect();
    let complement = assignment.complement(&s);
    let ls = total_length(&assignment.element_image(&s).unwrap());
    let lc = total_length(&assignment.element_image(&complement).unwrap());
    println!(
        "first generator holds: length {:.5}; complement {:.5}; sum {}",
        ls.to_f64(),
        lc.to_f64(),
        (&ls + &lc)
    );

    // a seeded path's atom interval shrinks as generators accumulate
    let mut src = BitSource::derived(5, "homomorphism-demo", 0);
    let path = WalkPath::sample(1 << 12, &mut src).unwrap();
    for assignment in &chain {
        let interval = path_interval(&path, &generators, assignment).unwrap();
        println!(
            "depth {}: path lies in {interval} (length {:.5})",
            assignment.depth(),
            interval.length().to_f64()
        );
    }
}
