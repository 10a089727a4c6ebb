//! Semidecidable comparison of presented reals: strict inequality is
//! confirmed by finding disjoint intervals, equality is never decided, and
//! nested interval families reveal their eventually constant endpoint.
//!
//! Run with `cargo run --example presentations`.

use num_bigint::BigInt;
use num_rational::BigRational;
use wienerlab::dyadic::{DyadicRational, HalfOpenInterval};
use wienerlab::presentation::{
    compare_presentations, nested_endpoint_detector, strictly_contains, OpenInterval, Presentation,
};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn main() {
    // 1/3 < 1/2: the gap is 1/6, so centered diameter-2^-k intervals
    // separate once 2^-k < 1/12, at index 4 with fuel to spare
    let third = Presentation::of_rational(rat(1, 3));
    let half = Presentation::of_rational(rat(1, 2));
    for fuel in [2, 3, 4, 10] {
        println!(
            "1/3 < 1/2 within fuel {fuel:>2}? {:?}",
            compare_presentations(&third, &half, fuel).unwrap()
        );
    }

    // equality cannot be semidecided: the search just keeps running
    let a = Presentation::of_rational(rat(2, 7));
    let b = Presentation::of_rational(rat(2, 7));
    println!(
        "2/7 < 2/7 within fuel 2000? {:?} (and never will be)",
        compare_presentations(&a, &b, 2000).unwrap()
    );

    // strict containment of a half-open interval in an open one is
    // semidecidable the same way
    let inner =
        HalfOpenInterval::new(DyadicRational::new(1, 2), DyadicRational::new(1, 1)).unwrap(); // [1/4, 1/2)
    let lo = Presentation::of_rational(rat(1, 5));
    let hi = Presentation::of_rational(rat(9, 10));
    println!(
        "(1/5, 9/10) strictly contains [1/4, 1/2)? {:?}",
        strictly_contains((&lo, &hi), &inner, 64).unwrap()
    );
    let touching = Presentation::of_rational(rat(1, 2));
    println!(
        "(1/5, 1/2) strictly contains [1/4, 1/2)? {:?} (shared endpoint)",
        strictly_contains((&lo, &touching), &inner, 512).unwrap()
    );

    // a nested family with empty intersection pins one endpoint
    let tol = DyadicRational::zero();
    let family: Vec<OpenInterval> = (1..=24)
        .map(|n| OpenInterval::new(rat(0, 1), rat(1, n)))
        .collect();
    println!(
        "(0, 1/n) family: {:?}",
        nested_endpoint_detector(&family, &tol).unwrap()
    );
    let family: Vec<OpenInterval> = (1..=24)
        .map(|n| OpenInterval::new(rat(-1, n), rat(1, n)))
        .collect();
    println!(
        "(-1/n, 1/n) family: {:?} (intersection {{0}} is nonempty)",
        nested_endpoint_detector(&family, &tol).unwrap()
    );
}
