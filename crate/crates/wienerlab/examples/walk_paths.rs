//! Slope-±√n walk paths: decoding, exact evaluation, zero intervals, coarse
//! re-encoding, and the halving re-encode with its tie count.
//!
//! Run with `cargo run --example walk_paths`.

use num_bigint::BigInt;
use num_rational::BigRational;
use wienerlab::source::BitSource;
use wienerlab::walk::WalkPath;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn main() {
    // a hand-picked code: bit 1 steps up, bit 0 steps down
    let path = WalkPath::decode(8, "11011000".parse().unwrap()).unwrap();
    println!("path (text form): {path}");
    for i in 0..=8 {
        let v = path.breakpoint_value(i);
        println!("  x({i}/8) = {}/√8 = {:+.4}", v.coeff, v.to_f64());
    }
    let mid = path.eval(&rat(3, 16)).unwrap();
    println!(
        "between breakpoints: x(3/16) = {}/√8 = {:+.4}",
        mid.coeff,
        mid.to_f64()
    );

    println!("step intervals touching zero: {:?}", path.zero_intervals());
    println!("coarse code at level 2: {}", path.coarse_code(2).unwrap());
    let halved = path.scale_half().unwrap();
    println!(
        "halved: {} with {} cancelled pair(s) re-encoded as 1",
        halved.path, halved.tie_count
    );

    // a seeded path; everything above is deterministic in (seed, n)
    let mut src = BitSource::derived(42, "walk-demo", 0);
    let sampled = WalkPath::sample(1 << 10, &mut src).unwrap();
    let end = sampled.breakpoint_value(1 << 10);
    println!(
        "seeded path of 2^10 steps: x(1) = {:+.4}, {} zero interval(s)",
        end.to_f64(),
        sampled.zero_intervals().len()
    );
}
