//! Random-walk approximants of Brownian motion and the exact machinery around
//! them: dyadic-rational interval arithmetic, semidecidable comparisons of
//! presented reals, Wiener measure of half-space event atoms, a
//! measure-preserving map from finitely generated event algebras onto
//! half-open subintervals of [0,1), compression-based complexity rates, and
//! potential-theoretic dimension bounds on masked binary trees.
//!
//! Desk-scale experiments (law-of-the-iterated-logarithm sweeps, zero-set hit
//! statistics, Brownian scaling checks) live in [`experiments`]; every
//! experiment is bit-reproducible from `(seed, config)`.
//!
//! Each major capability has a runnable demo under `examples/`; the `wienerlab`
//! binary exposes the same operations as subcommands.

pub mod bits;
pub mod cli;
pub mod complexity;
pub mod dyadic;
pub mod energy;
pub mod events;
pub mod experiments;
pub mod interval_map;
pub mod presentation;
pub mod quad;
pub mod report;
pub mod source;
pub mod stats;
pub mod walk;

pub use bits::Bits;
pub use dyadic::{DyadicRational, HalfOpenInterval};
pub use source::BitSource;
pub use walk::WalkPath;
