//! Distributional scaling check: x(a·t)/√a and x(t) across independent
//! seeds should be indistinguishable, measured by the two-sample
//! Kolmogorov–Smirnov distance against its critical value.
//!
//! Run with `cargo run --release --example scaling_check`.

use num_bigint::BigInt;
use num_rational::BigRational;
use wienerlab::experiments::{scaling_test, ScalingConfig};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn main() {
    for a in [2u32, 4] {
        let config = ScalingConfig {
            seed: 0,
            a,
            t_points: vec![rat(1, 8), rat(1, 4)],
            samples: 20_000,
            resolution_exp: 16,
            significance: 0.01,
        };
        let report = scaling_test(&config).unwrap();
        println!("a = {a}, 20k samples per side at resolution 2^-16:");
        for row in &report.rows {
            println!(
                "  t = {:>4}: KS distance {:.5} vs 1% critical {:.5} → {}",
                row.t,
                row.ks_distance,
                row.critical_value,
                if row.pass { "pass" } else { "FAIL" }
            );
        }
    }
}
