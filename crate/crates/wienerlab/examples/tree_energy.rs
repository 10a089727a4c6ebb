//! Potential-theoretic dimension bound on a masked tree: exact energy
//! series vs Monte Carlo sampling from the cylinder mass distribution, the
//! finiteness threshold at the branching density, local density ratios, and
//! the grid lower bound.
//!
//! Run with `cargo run --release --example tree_energy`.

use num_bigint::BigInt;
use num_rational::BigRational;
use wienerlab::complexity::ResidueMask;
use wienerlab::energy::{
    density_check, dimension_lower_bound, energy_exact, energy_mc, ultrametric, EnergyExact,
    MassTree,
};
use wienerlab::source::BitSource;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn main() {
    let mask = ResidueMask::new(2, 3).unwrap();
    let tree = MassTree::new(mask, 64);

    // cylinder masses halve at branch positions and vanish off the tree
    for sigma in ["11", "110", "111"] {
        let mass = tree.cylinder_mass(&sigma.parse().unwrap()).unwrap();
        println!("mass([{sigma}]) = {mass}");
    }

    // the ultrametric between two sampled branches
    let mut src = BitSource::derived(9, "energy-demo", 0);
    let x = tree.sample_branch(&mut src, 24).unwrap();
    let y = tree.sample_branch(&mut src, 24).unwrap();
    println!("υ({x}, {y}) = {:?}", ultrametric(&x, &y).unwrap());

    // energy: finite strictly below the branching density 2/3
    for alpha in [rat(0, 1), rat(1, 2), rat(13, 20), rat(2, 3), rat(3, 4)] {
        match energy_exact(&mask, &alpha, 64) {
            EnergyExact::Finite { value, tail_bound } => println!(
                "I_{alpha}: finite, {value:.5} (remainder beyond 64 terms {tail_bound:.2e})"
            ),
            EnergyExact::Divergent => println!("I_{alpha}: divergent"),
        }
    }

    // Monte Carlo pairs from the mass distribution bracket the exact value
    let alpha = rat(1, 2);
    let exact = match energy_exact(&mask, &alpha, 200) {
        EnergyExact::Finite { value, .. } => value,
        EnergyExact::Divergent => unreachable!(),
    };
    let mc = energy_mc(&mask, &alpha, 500_000, None, 23).unwrap();
    println!(
        "I_1/2 exact {exact:.5}; sampled [{:.5}, {:.5}] from {} pairs at depth {}",
        mc.ci_low, mc.ci_high, mc.samples, mc.depth
    );

    // local mass density ratios: bounded at the branching density, growing
    // above it
    for alpha in [rat(2, 3), rat(1, 1)] {
        let report = density_check(&mask, &alpha, 32, &[10, 20, 30, 40], 5);
        let ratios: Vec<String> = report
            .per_depth
            .iter()
            .map(|(d, r)| format!("2^-{d}: {r:.3}"))
            .collect();
        println!("density ratios at alpha {alpha}: {}", ratios.join(", "));
    }

    // the largest grid exponent with finite energy is the dimension bound
    let grid: Vec<BigRational> = (0..100).map(|j| rat(j, 100)).collect();
    for (p, q) in [(2u64, 3u64), (1, 2), (1, 1)] {
        let m = ResidueMask::new(p, q).unwrap();
        println!(
            "dimension lower bound for ({p},{q}) on the 0.01 grid: {}",
            dimension_lower_bound(&m, &grid).unwrap()
        );
    }
}
