//! The iterated-logarithm statistic |x(t+h) - x(t)| / sqrt(2|h| ln ln 1/|h|)
//! swept over seeded paths and random times: its median concentrates near 1
//! at desk scale.
//!
//! Run with `cargo run --release --example lil_sweep`.

use num_bigint::BigInt;
use num_rational::BigRational;
use wienerlab::experiments::{lil_statistic, lil_sweep, LilConfig};
use wienerlab::walk::WalkPath;

fn main() {
    // one statistic by hand: the all-up 4-step path at t = 0, h = 1/4
    let path = WalkPath::decode(4, "1111".parse().unwrap()).unwrap();
    let t = BigRational::new(BigInt::from(0), BigInt::from(1));
    let h = vec![BigRational::new(BigInt::from(1), BigInt::from(4))];
    println!(
        "toy statistic: {:.4} (= 0.5 / sqrt(0.5 · ln ln 4))",
        lil_statistic(&path, &t, &h).unwrap()
    );

    // a reduced sweep; the acceptance-scale run uses 200 paths at 2^-20
    let config = LilConfig {
        seed: 0,
        paths: 50,
        resolution_exp: 16,
        times_per_path: 40,
        coarsest_h_exp: 6,
        finest_h_exp: 14,
        ..LilConfig::default()
    };
    let report = lil_sweep(&config).unwrap();
    println!(
        "sweep over {} (path, time) pairs at resolution 2^-{}:",
        report.count, config.resolution_exp
    );
    println!(
        "  median {:.4}   p90 {:.4}   p99 {:.4}   max {:.4}",
        report.median, report.p90, report.p99, report.max
    );
    println!(
        "  median in [{}, {}]: {}",
        config.band.0, config.band.1, report.median_in_band
    );
}
