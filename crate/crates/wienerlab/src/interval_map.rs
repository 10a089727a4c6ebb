//! The constructive measure-algebra-to-interval homomorphism.
//!
//! A finitely generated event algebra is carried onto finite unions of
//! half-open subintervals of `[0,1)` by inductive splitting: the first
//! generator splits `[0,1)` at its measure, and each further generator
//! splits every atom interval at the (approximate) measure of the refined
//! atom, with the "event holds" child on the left. The atom table is an
//! exact partition of `[0,1)` in dyadic arithmetic; all measure uncertainty
//! is confined to one additively accumulated `error_budget`.
//!
//! Masks are read oldest-first: bit `k` of an atom mask is the membership
//! bit of generator `k+1`, and extending by a new generator appends its bit
//! on the right.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::bits::Bits;
use crate::dyadic::{merge_intervals, total_length, DyadicRational, HalfOpenInterval};
use crate::events::{
    atom_measure, measure_all_atoms, path_in_event, EventAtom, EventError, MeasureConfig,
    Membership,
};
use crate::presentation::{cylinder_interval, strictly_contains, Presentation, Semidecision};
use crate::source::BitSource;
use crate::walk::WalkPath;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("measure {0} outside [0,1]")]
    MeasureOutOfRange(String),
    #[error("missing split measure for atom {0}")]
    MissingSplit(Bits),
    #[error("split {split} for atom {mask} exceeds parent length {parent}")]
    SplitTooLarge {
        mask: Bits,
        split: String,
        parent: String,
    },
    #[error("negative split {split} for atom {mask}")]
    NegativeSplit { mask: Bits, split: String },
    #[error("mask {mask} has depth {got}, assignment has depth {expected}")]
    DepthMismatch {
        mask: Bits,
        got: usize,
        expected: usize,
    },
    #[error("path membership indeterminate on generator {index} (exact boundary)")]
    BoundaryMembership { index: usize },
    #[error("level {level} has size {size}, above bound {bound} plus slack {slack}")]
    InvalidTest {
        level: usize,
        size: String,
        bound: String,
        slack: String,
    },
    #[error(transparent)]
    Event(#[from] EventError),
}

/// The finite-stage homomorphism: a table mapping each atom mask of the
/// first `depth` generators to a half-open interval. The intervals are
/// pairwise disjoint with union exactly `[0,1)`; each interval's length is
/// within `error_budget` of the atom's measure.
#[derive(Debug, Clone)]
pub struct IntervalAssignment {
    depth: usize,
    atoms: BTreeMap<Bits, HalfOpenInterval>,
    error_budget: DyadicRational,
}

impl IntervalAssignment {
    /// Depth-0 assignment: the whole space maps to `[0,1)`.
    pub fn trivial() -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(Bits::empty(), HalfOpenInterval::unit());
        IntervalAssignment {
            depth: 0,
            atoms,
            error_budget: DyadicRational::zero(),
        }
    }

    /// Depth-1 assignment from the measure of the first generator:
    /// mask 1 maps to `[0, mu)` and mask 0 to `[mu, 1)`.
    pub fn base(mu: DyadicRational) -> Result<Self, MapError> {
        if mu.is_negative() || mu > DyadicRational::one() {
            return Err(MapError::MeasureOutOfRange(mu.to_string()));
        }
        let mut splits = BTreeMap::new();
        splits.insert(Bits::empty(), mu);
        IntervalAssignment::trivial().extend(&splits, &DyadicRational::zero())
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn error_budget(&self) -> &DyadicRational {
        &self.error_budget
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Bits, &HalfOpenInterval)> {
        self.atoms.iter()
    }

    pub fn atom_interval(&self, mask: &Bits) -> Option<&HalfOpenInterval> {
        self.atoms.get(mask)
    }

    /// Refine by one generator: each atom interval `[l, r)` splits at
    /// `l + split` into the "event holds" child (mask·1, on the left) and its
    /// complement (mask·0). Splits must lie in `[0, r - l]`; empty child
    /// intervals are allowed. `split_precision` is the caller's bound on
    /// `|split - true measure|` and is added to the error budget.
    pub fn extend(
        &self,
        split_measures: &BTreeMap<Bits, DyadicRational>,
        split_precision: &DyadicRational,
    ) -> Result<Self, MapError> {
        let mut atoms = BTreeMap::new();
        for (mask, interval) in &self.atoms {
            let split = split_measures
                .get(mask)
                .ok_or_else(|| MapError::MissingSplit(mask.clone()))?;
            if split.is_negative() {
                return Err(MapError::NegativeSplit {
                    mask: mask.clone(),
                    split: split.to_string(),
                });
            }
            let len = interval.length();
            if *split > len {
                return Err(MapError::SplitTooLarge {
                    mask: mask.clone(),
                    split: split.to_string(),
                    parent: len.to_string(),
                });
            }
            let cut = interval.left() + split;
            atoms.insert(
                mask.extended(true),
                HalfOpenInterval::new(interval.left().clone(), cut.clone()).unwrap(),
            );
            atoms.insert(
                mask.extended(false),
                HalfOpenInterval::new(cut, interval.right().clone()).unwrap(),
            );
        }
        Ok(IntervalAssignment {
            depth: self.depth + 1,
            atoms,
            error_budget: &self.error_budget + split_precision,
        })
    }

    /// Image of an algebra element (a set of atom masks): the union of its
    /// atom intervals, merged into maximal disjoint half-open intervals.
    pub fn element_image(
        &self,
        element: &BTreeSet<Bits>,
    ) -> Result<Vec<HalfOpenInterval>, MapError> {
        let mut parts = Vec::with_capacity(element.len());
        for mask in element {
            if mask.len() != self.depth {
                return Err(MapError::DepthMismatch {
                    mask: mask.clone(),
                    got: mask.len(),
                    expected: self.depth,
                });
            }
            parts.push(
                self.atoms
                    .get(mask)
                    .cloned()
                    .expect("all masks of assignment depth are present"),
            );
        }
        Ok(merge_intervals(parts))
    }

    /// Complement of an element within the atom table.
    pub fn complement(&self, element: &BTreeSet<Bits>) -> BTreeSet<Bits> {
        self.atoms
            .keys()
            .filter(|m| !element.contains(*m))
            .cloned()
            .collect()
    }
}

/// Membership mask of a path over the first `depth` generators; errors on an
/// exact boundary, naming the offending generator (1-based).
pub fn membership_mask(
    path: &WalkPath,
    generators: &[crate::events::GeneratorEvent],
    depth: usize,
) -> Result<Bits, MapError> {
    let mut bits = Bits::empty();
    for (i, g) in generators[..depth].iter().enumerate() {
        match path_in_event(path, g) {
            Membership::In => bits.push(true),
            Membership::Out => bits.push(false),
            Membership::Indeterminate => return Err(MapError::BoundaryMembership { index: i + 1 }),
        }
    }
    Ok(bits)
}

/// The atom interval of the path's membership mask: the finite stage of the
/// point map sending a path to the unique real inside all images of events
/// containing it. Intervals are nested across depths, and for non-atomic
/// generator families their lengths shrink toward 0.
pub fn path_interval(
    path: &WalkPath,
    generators: &[crate::events::GeneratorEvent],
    assignment: &IntervalAssignment,
) -> Result<HalfOpenInterval, MapError> {
    let mask = membership_mask(path, generators, assignment.depth())?;
    Ok(assignment
        .atom_interval(&mask)
        .expect("membership mask has assignment depth")
        .clone())
}

/// Build an assignment for the first `depth` generators, taking each split
/// as the midpoint of the atom-measure bracket at precision `2^-grid`,
/// snapped to the `2^-grid` dyadic grid and clamped into `[0, parent
/// length]`. The error budget grows by `2^-grid` per level.
pub fn build_assignment(
    generators: &[crate::events::GeneratorEvent],
    depth: usize,
    grid: u64,
    config: &MeasureConfig,
) -> Result<IntervalAssignment, MapError> {
    Ok(build_assignment_chain(generators, depth, grid, config)?
        .pop()
        .expect("chain contains the trivial assignment"))
}

/// The whole construction, one assignment per depth `0..=depth`. The deeper
/// tables refine the shallower ones exactly, so callers comparing stages
/// (deficit sweeps, nesting checks) get consistent snapshots from one pass.
pub fn build_assignment_chain(
    generators: &[crate::events::GeneratorEvent],
    depth: usize,
    grid: u64,
    config: &MeasureConfig,
) -> Result<Vec<IntervalAssignment>, MapError> {
    let mut chain = vec![IntervalAssignment::trivial()];
    let level_precision = DyadicRational::pow2(grid);
    for level in 1..=depth {
        let assignment = chain.last().unwrap();
        let distinct_times: usize = {
            let mut ts: Vec<_> = generators[..level].iter().map(|g| g.time()).collect();
            ts.sort();
            ts.dedup();
            ts.len()
        };
        let joint = if distinct_times > config.max_quadrature_times {
            Some(measure_all_atoms(
                generators,
                level,
                crate::events::required_samples(grid).min(config.max_samples),
                config.seed,
            ))
        } else {
            None
        };
        let estimates: Vec<(Bits, DyadicRational, crate::events::MeasureEstimate)> = assignment
            .atoms
            .par_iter()
            .map(|(mask, interval)| {
                let child = mask.extended(true);
                let estimate = match &joint {
                    Some(map) => Ok(map
                        .get(&child)
                        .expect("joint pass covers all masks")
                        .clone()),
                    None => {
                        let atom = EventAtom::new(generators, child)?;
                        atom_measure(&atom, grid, config)
                    }
                }?;
                Ok((mask.clone(), interval.length(), estimate))
            })
            .collect::<Result<_, EventError>>()?;
        let mut splits = BTreeMap::new();
        for (mask, len, estimate) in estimates {
            let snapped = snap_to_grid(&estimate.midpoint(), grid);
            let clamped = if snapped.is_negative() {
                DyadicRational::zero()
            } else if snapped > len {
                len
            } else {
                snapped
            };
            splits.insert(mask, clamped);
        }
        chain.push(assignment.extend(&splits, &level_precision)?);
    }
    Ok(chain)
}

fn snap_to_grid(x: &DyadicRational, grid: u64) -> DyadicRational {
    // round to nearest multiple of 2^-grid (floor of x + half a step)
    (x + &DyadicRational::pow2(grid + 1)).floor_to_grid(grid)
}

/// Seeded assignment with exact dyadic splits: every parent interval is cut
/// at a uniform random point of its own `2^-grid`-relative subdivision, so
/// the partition and all lengths are exact and the error budget stays zero.
pub fn random_exact_assignment(
    depth: usize,
    grid: u64,
    source: &mut BitSource,
) -> IntervalAssignment {
    let mut assignment = IntervalAssignment::trivial();
    for _ in 0..depth {
        let splits: BTreeMap<Bits, DyadicRational> = assignment
            .atoms
            .iter()
            .map(|(mask, interval)| {
                let u = source.uniform_below((1u64 << grid) + 1);
                let fraction = DyadicRational::new(u as i64, grid);
                (mask.clone(), &interval.length() * &fraction)
            })
            .collect();
        assignment = assignment
            .extend(&splits, &DyadicRational::zero())
            .expect("splits are fractions of parent lengths");
    }
    assignment
}

/// A Martin-Löf-style test over the generated algebra: level `n` (1-based)
/// is a finite list of algebra elements whose union must have measure at
/// most `2^-n`, up to the declared slack.
#[derive(Debug, Clone, Default)]
pub struct MlTest {
    pub levels: Vec<Vec<BTreeSet<Bits>>>,
    pub slack: DyadicRational,
}

impl MlTest {
    pub fn level_bound(level_index: usize) -> DyadicRational {
        DyadicRational::pow2(level_index as u64 + 1)
    }
}

/// One level of the transferred interval-side test: open intervals (the
/// interiors of the half-open images, left endpoints dropped).
#[derive(Debug, Clone)]
pub struct IntervalTestLevel {
    pub intervals: Vec<(DyadicRational, DyadicRational)>,
    pub total_length: DyadicRational,
}

#[derive(Debug, Clone)]
pub struct IntervalTest {
    pub levels: Vec<IntervalTestLevel>,
}

/// Carry a test forward across the map: level `n` maps to the merged images
/// of its elements, reported as open intervals. Errors if a level's measured
/// size exceeds `2^-n + slack + |union| · error_budget`.
pub fn transfer_test_forward(
    test: &MlTest,
    assignment: &IntervalAssignment,
) -> Result<IntervalTest, MapError> {
    let mut levels = Vec::with_capacity(test.levels.len());
    for (i, elements) in test.levels.iter().enumerate() {
        let union: BTreeSet<Bits> = elements.iter().flatten().cloned().collect();
        let merged = assignment.element_image(&union)?;
        let size = total_length(&merged);
        let bound = MlTest::level_bound(i);
        let slack = &test.slack
            + &(&DyadicRational::from_int(union.len() as i64) * assignment.error_budget());
        if size > &bound + &slack {
            return Err(MapError::InvalidTest {
                level: i + 1,
                size: size.to_string(),
                bound: bound.to_string(),
                slack: slack.to_string(),
            });
        }
        levels.push(IntervalTestLevel {
            intervals: merged
                .iter()
                .map(|iv| (iv.left().clone(), iv.right().clone()))
                .collect(),
            total_length: size,
        });
    }
    Ok(IntervalTest { levels })
}

/// Result of [`transfer_test_back`] for one level.
#[derive(Debug, Clone)]
pub struct BackTransferLevel {
    /// One event-side element (set of atom masks) per input cylinder.
    pub elements: Vec<BTreeSet<Bits>>,
    /// Lebesgue measure of the cylinders not covered by accepted atoms.
    pub deficit: DyadicRational,
}

/// Carry an interval-side test of dyadic cylinders back across the map: for
/// each cylinder, accept the atoms whose intervals are verifiably strictly
/// inside it (both endpoint comparisons resolved within `fuel`). The deficit
/// — cylinder measure not yet covered — shrinks as the assignment deepens,
/// because accepted atoms stay accepted under refinement.
pub fn transfer_test_back(
    cylinders_per_level: &[Vec<Bits>],
    assignment: &IntervalAssignment,
    fuel: u32,
) -> Result<Vec<BackTransferLevel>, MapError> {
    let mut out = Vec::with_capacity(cylinders_per_level.len());
    for cylinders in cylinders_per_level {
        let mut elements = Vec::with_capacity(cylinders.len());
        let mut deficit = DyadicRational::zero();
        for sigma in cylinders {
            let closed = cylinder_interval(sigma);
            let outer_left = Presentation::of_dyadic(&closed.left);
            let outer_right = Presentation::of_dyadic(&closed.right);
            let mut accepted = BTreeSet::new();
            let mut covered = DyadicRational::zero();
            for (mask, interval) in assignment.atoms() {
                if interval.is_empty() {
                    continue;
                }
                let verdict = strictly_contains((&outer_left, &outer_right), interval, fuel)
                    .expect("dyadic presentations satisfy the diameter contract");
                if verdict == Semidecision::Affirmed {
                    covered = &covered + &interval.length();
                    accepted.insert(mask.clone());
                }
            }
            // cylinder measure within [0,1): 2^-|sigma| (1 for the empty string)
            let cyl_len = (&closed.right.clone().min(DyadicRational::one())
                - &closed.left.clone().max(DyadicRational::zero()))
                .max(DyadicRational::zero());
            deficit = &deficit + &(&cyl_len - &covered);
            elements.push(accepted);
        }
        out.push(BackTransferLevel { elements, deficit });
    }
    Ok(out)
}

/// Seeded test over an assignment's atoms: level `n` greedily collects
/// random atoms while the total interval length stays at or below `2^-n`,
/// then distributes them into one or two elements.
pub fn random_test(
    assignment: &IntervalAssignment,
    levels: usize,
    source: &mut BitSource,
) -> MlTest {
    let masks: Vec<Bits> = assignment.atoms().map(|(m, _)| m.clone()).collect();
    let mut test = MlTest::default();
    for level in 0..levels {
        let bound = MlTest::level_bound(level);
        // random order
        let mut order = masks.clone();
        for i in (1..order.len()).rev() {
            let j = source.uniform_below(i as u64 + 1) as usize;
            order.swap(i, j);
        }
        let mut chosen = BTreeSet::new();
        let mut size = DyadicRational::zero();
        for mask in order {
            let len = assignment
                .atom_interval(&mask)
                .expect("mask from the atom table")
                .length();
            if &size + &len <= bound {
                size = &size + &len;
                chosen.insert(mask);
            }
        }
        let elements = if chosen.len() >= 2 && source.next_bit() {
            let mid = chosen.len() / 2;
            let a: BTreeSet<Bits> = chosen.iter().take(mid).cloned().collect();
            let b: BTreeSet<Bits> = chosen.iter().skip(mid).cloned().collect();
            vec![a, b]
        } else {
            vec![chosen]
        };
        test.levels.push(elements);
    }
    test
}
