//! Incremental-parsing compression rates as a complexity proxy: all-zero vs
//! coin-flip baselines, masked joins at several densities, and the
//! normalized-rate verdict.
//!
//! Run with `cargo run --release --example compression_rates`.

use wienerlab::bits::Bits;
use wienerlab::complexity::{
    dimension_proxy, lz_estimate, masked_join, tree_sequence, Calibration, MaskSet, ResidueMask,
};
use wienerlab::source::BitSource;

fn main() {
    let n = 1 << 17;
    let calibration = Calibration::default();
    let baseline = calibration.coin_rate(n);

    let zeros: Bits = (0..n).map(|_| false).collect();
    let zero = lz_estimate(&zeros).unwrap();
    println!(
        "all-zero:   {} phrases, rate {:.4}",
        zero.phrases, zero.rate
    );
    println!("coin (median of 20 seeds): rate {baseline:.4}");

    // free-bit density drives the rate, though the estimator's finite-length
    // overhead keeps normalized rates above the raw density
    for (p, q) in [(1u64, 4u64), (1, 2), (2, 3), (3, 4)] {
        let mask = ResidueMask::new(p, q).unwrap();
        let mut src = BitSource::derived(1, "rates-demo", (p << 8) | q);
        let tree = tree_sequence(&mask, &mut src, n);
        let rate = lz_estimate(&tree).unwrap().rate;
        println!(
            "tree({p},{q}): rate {:.4}, normalized {:.4} (free-bit density {:.3})",
            rate,
            rate / baseline,
            mask.density()
        );
    }

    // the standard join along odd positions interleaves two sources
    let mut src = BitSource::derived(2, "rates-demo-join", 0);
    let coin = src.bits(n);
    let odd = MaskSet::Residue(ResidueMask::new(1, 2).unwrap());
    let joined = masked_join(&coin, &zeros, &odd, n).unwrap();
    println!(
        "join(coin, zeros, evens): normalized {:.4}",
        lz_estimate(&joined).unwrap().rate / baseline
    );

    // normalized-rate verdicts at a pair of exponents
    let mut src = BitSource::derived(3, "rates-demo-verdict", 0);
    let tree = tree_sequence(&ResidueMask::new(2, 3).unwrap(), &mut src, n);
    for alpha in [0.75, 0.9] {
        println!(
            "tree(2,3) below alpha {alpha}? {:?}",
            dimension_proxy(&tree, alpha, &calibration).unwrap()
        );
    }
}
