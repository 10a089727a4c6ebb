//! Carrying tests across the interval map: forward (algebra elements to
//! open intervals, sizes within the declared bounds) and backward (dyadic
//! cylinders to event-side elements, with a coverage deficit that shrinks as
//! the algebra deepens).
//!
//! Run with `cargo run --example test_transfer`.

use num_bigint::BigInt;
use num_rational::BigRational;
use wienerlab::bits::Bits;
use wienerlab::events::{GeneratorEvent, MeasureConfig};
use wienerlab::interval_map::{
    build_assignment_chain, random_test, transfer_test_back, transfer_test_forward, MlTest,
};
use wienerlab::source::BitSource;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn main() {
    // six generators at distinct dyadic times
    let generators: Vec<GeneratorEvent> = [(1i64, 8i64), (1, 4), (3, 8), (1, 2), (3, 4), (1, 1)]
        .into_iter()
        .enumerate()
        .map(|(i, (n, d))| {
            let y = rat((i as i64 % 3) - 1, 2); // thresholds -1/2, 0, 1/2
            GeneratorEvent::new(rat(n, d), y).unwrap()
        })
        .collect();
    let config = MeasureConfig::default();
    let chain = build_assignment_chain(&generators, 6, 10, &config).unwrap();
    let assignment = chain.last().unwrap();

    // a seeded test: level n collects atoms of total length <= 2^-n
    let mut src = BitSource::derived(11, "transfer-demo", 0);
    let test = random_test(assignment, 5, &mut src);
    let forward = transfer_test_forward(&test, assignment).unwrap();
    println!("forward transfer (level: size <= bound):");
    for (i, level) in forward.levels.iter().enumerate() {
        println!(
            "  level {}: {} interval(s), total length {:.5} <= {:.5}",
            i + 1,
            level.intervals.len(),
            level.total_length.to_f64(),
            MlTest::level_bound(i).to_f64()
        );
    }

    // backward: which event-algebra elements verifiably sit inside [0,1/2],
    // [1/2,1], and [1/4,1/2]? deficits shrink as the table refines
    let cylinders = vec![vec![
        "0".parse::<Bits>().unwrap(),
        "1".parse().unwrap(),
        "01".parse().unwrap(),
    ]];
    println!("backward transfer deficits by depth (cylinders 0, 1, 01):");
    for assignment in chain.iter().skip(1) {
        let back = transfer_test_back(&cylinders, assignment, 64).unwrap();
        let accepted: usize = back[0].elements.iter().map(|e| e.len()).sum();
        println!(
            "  depth {}: deficit {:.5} with {accepted} accepted atom(s)",
            assignment.depth(),
            back[0].deficit.to_f64()
        );
    }
}
