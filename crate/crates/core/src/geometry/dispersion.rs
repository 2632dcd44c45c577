//! Largest empty axis-parallel boxes in `[0,1]^d`.
//!
//! A box `(u, v)` counts as empty when no point lies strictly inside it.
//! The supremum over half-open boxes `[u, v)` equals the maximum over open
//! boxes, and every maximal open box has each face on a point coordinate or
//! on the cube boundary, so candidate bounds come from `{0} ∪ coords ∪ {1}`.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet};

use ordered_float::OrderedFloat;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frequency::enumerate_compositions;
use crate::pointsets::{require_domain, Coords, Domain, PointSet};

use super::{BoxWitness, DispersionMethod, DispersionResult};

/// Point-count guard for `d = 2`.
pub const EXACT_GUARD_2D: usize = 512;
/// Point-count guard for `d = 3`.
pub const EXACT_GUARD_3D: usize = 128;
/// Point-count guard for `d ≥ 4`.
pub const EXACT_GUARD_HIGH: usize = 32;
/// Largest resolution of the dyadic scan.
const DYADIC_MAX_LEVEL: u32 = 26;

type F = OrderedFloat<f64>;

#[derive(Debug, Clone, PartialEq)]
struct Candidate {
    volume: f64,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl Candidate {
    /// Larger volume wins, then smaller `u`, then larger `v` (lexicographic).
    fn better_than(&self, other: &Candidate) -> bool {
        let lex = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        };
        match self.volume.total_cmp(&other.volume) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => match lex(&self.u, &other.u) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => lex(&self.v, &other.v) == Ordering::Greater,
            },
        }
    }
}

fn pick(best: Option<Candidate>, c: Candidate) -> Option<Candidate> {
    match best {
        Some(b) if !c.better_than(&b) => Some(b),
        _ => Some(c),
    }
}

/// Sorted multiset of coordinates plus the multiset of gaps between
/// consecutive distinct values (including the sentinels 0 and 1).
pub(super) struct GapSet {
    values: BTreeMap<F, usize>,
    /// Gaps keyed by (length, reversed start) so the last entry is the
    /// longest gap with the smallest start.
    gaps: BTreeSet<(F, Reverse<F>)>,
}

impl GapSet {
    pub(super) fn new() -> Self {
        let mut values = BTreeMap::new();
        values.insert(OrderedFloat(0.0), 1);
        values.insert(OrderedFloat(1.0), 1);
        let mut gaps = BTreeSet::new();
        gaps.insert((OrderedFloat(1.0), Reverse(OrderedFloat(0.0))));
        Self { values, gaps }
    }

    fn neighbours(&self, x: F) -> (F, F) {
        let lo = *self.values.range(..x).next_back().expect("0 sentinel").0;
        let hi = *self.values.range((std::ops::Bound::Excluded(x), std::ops::Bound::Unbounded)).next().expect("1 sentinel").0;
        (lo, hi)
    }

    fn gap(a: F, b: F) -> (F, Reverse<F>) {
        (OrderedFloat(b.0 - a.0), Reverse(a))
    }

    pub(super) fn insert(&mut self, x: f64) {
        let x = OrderedFloat(x);
        if let Some(c) = self.values.get_mut(&x) {
            *c += 1;
            return;
        }
        let (lo, hi) = self.neighbours(x);
        self.gaps.remove(&Self::gap(lo, hi));
        self.gaps.insert(Self::gap(lo, x));
        self.gaps.insert(Self::gap(x, hi));
        self.values.insert(x, 1);
    }

    pub(super) fn remove(&mut self, x: f64) {
        let x = OrderedFloat(x);
        let c = self.values.get_mut(&x).expect("removing an inserted value");
        if *c > 1 {
            *c -= 1;
            return;
        }
        self.values.remove(&x);
        let (lo, hi) = self.neighbours(x);
        self.gaps.remove(&Self::gap(lo, x));
        self.gaps.remove(&Self::gap(x, hi));
        self.gaps.insert(Self::gap(lo, hi));
    }

    /// `(start, length)` of the longest gap, smallest start on ties.
    pub(super) fn widest(&self) -> (f64, f64) {
        let (len, Reverse(start)) = *self.gaps.iter().next_back().expect("at least one gap");
        (start.0, len.0)
    }
}

/// Distinct values of axis `j`, ascending.
fn axis_values(pts: &[Vec<f64>], j: usize) -> Vec<f64> {
    let mut v: Vec<f64> = pts.iter().map(|p| p[j]).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn best_1d(pts: &[Vec<f64>]) -> Candidate {
    let mut g = GapSet::new();
    for p in pts {
        g.insert(p[0]);
    }
    let (start, len) = g.widest();
    Candidate {
        volume: len,
        u: vec![start],
        v: vec![start + len],
    }
}

/// Sweep over the bottom/top pair on axis 1, with the x-gaps of the points
/// strictly between them maintained incrementally.
fn best_2d(pts: &[Vec<f64>]) -> Candidate {
    let mut by_y: Vec<&Vec<f64>> = pts.iter().collect();
    by_y.sort_by(|a, b| a[1].total_cmp(&b[1]));
    let ys = axis_values(pts, 1);
    let lows: Vec<f64> = std::iter::once(0.0).chain(ys.iter().copied().filter(|&y| y < 1.0)).collect();
    let local = |lo: f64| {
        let mut best: Option<Candidate> = None;
        let mut g = GapSet::new();
        let mut next = by_y.partition_point(|p| p[1] <= lo);
        let highs = ys.iter().copied().filter(|&y| y > lo).chain(std::iter::once(1.0));
        for hi in highs {
            if hi <= lo {
                continue;
            }
            let (start, len) = g.widest();
            best = pick(
                best,
                Candidate {
                    volume: len * (hi - lo),
                    u: vec![start, lo],
                    v: vec![start + len, hi],
                },
            );
            while next < by_y.len() && by_y[next][1] <= hi {
                g.insert(by_y[next][0]);
                next += 1;
            }
        }
        best
    };
    lows.par_iter()
        .map(|&lo| local(lo))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(None, pick)
        .expect("at least one candidate")
}

fn best_box(pts: &[Vec<f64>], d: usize) -> Candidate {
    match d {
        1 => best_1d(pts),
        2 => best_2d(pts),
        _ => {
            // Fix the last-axis slab, recurse on the points strictly inside it.
            let last = d - 1;
            let zs = axis_values(pts, last);
            let lows = std::iter::once(0.0).chain(zs.iter().copied().filter(|&z| z < 1.0));
            let mut best: Option<Candidate> = None;
            for lo in lows {
                let highs = zs.iter().copied().filter(|&z| z > lo).chain(std::iter::once(1.0));
                for hi in highs {
                    let inside: Vec<Vec<f64>> = pts
                        .iter()
                        .filter(|p| p[last] > lo && p[last] < hi)
                        .map(|p| p[..last].to_vec())
                        .collect();
                    let sub = best_box(&inside, last);
                    let mut u = sub.u;
                    let mut v = sub.v;
                    u.push(lo);
                    v.push(hi);
                    best = pick(
                        best,
                        Candidate {
                            volume: sub.volume * (hi - lo),
                            u,
                            v,
                        },
                    );
                }
            }
            best.expect("at least one slab")
        }
    }
}

fn guard(d: usize) -> usize {
    match d {
        1 => usize::MAX,
        2 => EXACT_GUARD_2D,
        3 => EXACT_GUARD_3D,
        _ => EXACT_GUARD_HIGH,
    }
}

/// Exact dispersion of a unit-cube set; `force` lifts the size guard.
pub fn dispersion_exact(points: &PointSet, force: bool) -> Result<DispersionResult> {
    require_domain(points, Domain::UnitCube)?;
    let d = points.dim();
    if !force && points.len() > guard(d) {
        return Err(Error::GuardExceeded(format!(
            "exact dispersion with m = {} in dimension {d} (limit {})",
            points.len(),
            guard(d)
        )));
    }
    let pts: Vec<Vec<f64>> = (0..points.len()).map(|i| points.unit_point(i)).collect();
    let best = best_box(&pts, d);
    Ok(DispersionResult {
        volume: best.volume,
        witness: BoxWitness { u: best.u, v: best.v },
        method: DispersionMethod::Exact,
    })
}

/// Volume of the largest empty dyadic box `Π_j [a_j 2^{-s_j}, (a_j+1) 2^{-s_j})`.
///
/// Scans volumes `2^{-k}` for `k = 0, 1, …` and reports the first empty box.
/// Some box is always empty once `2^k > m`, so the scan stops by
/// `k = ⌈log₂ m⌉ + 1`; 0 is returned only if the level cap cuts it short.
pub fn dispersion_dyadic(points: &PointSet) -> Result<DispersionResult> {
    let d = points.dim();
    let exps = points
        .dyadic_exponents()
        .ok_or_else(|| Error::NotDyadic("dyadic dispersion needs power-of-two denominators".into()))?;
    let Coords::Exact { nums, .. } = points.coords() else {
        unreachable!("dyadic sets are exact")
    };
    let m = points.len();
    let resolution = (m.max(1).next_power_of_two().trailing_zeros() + 1).min(DYADIC_MAX_LEVEL);
    for k in 0..=resolution {
        let shapes = enumerate_compositions(k, d)?;
        let found = shapes.par_iter().find_map_first(|s| {
            let mut hit = vec![false; 1usize << k];
            for p in nums.chunks_exact(d) {
                let mut key = 0usize;
                for ((&x, &sj), &rj) in p.iter().zip(&s.0).zip(&exps) {
                    let idx = if sj <= rj {
                        x >> (rj - sj)
                    } else {
                        x << (sj - rj)
                    };
                    key = (key << sj) | idx as usize;
                }
                hit[key] = true;
            }
            hit.iter().position(|&h| !h).map(|key| {
                let mut a = vec![0u64; d];
                let mut rest = key;
                for j in (0..d).rev() {
                    a[j] = (rest & ((1usize << s.0[j]) - 1)) as u64;
                    rest >>= s.0[j];
                }
                let u: Vec<f64> = a.iter().zip(&s.0).map(|(&aj, &sj)| aj as f64 / (1u64 << sj) as f64).collect();
                let v: Vec<f64> = a.iter().zip(&s.0).map(|(&aj, &sj)| (aj + 1) as f64 / (1u64 << sj) as f64).collect();
                BoxWitness { u, v }
            })
        });
        if let Some(witness) = found {
            return Ok(DispersionResult {
                volume: 1.0 / (1u64 << k) as f64,
                witness,
                method: DispersionMethod::DyadicLowerBound,
            });
        }
    }
    Ok(DispersionResult {
        volume: 0.0,
        witness: BoxWitness {
            u: vec![0.0; d],
            v: vec![0.0; d],
        },
        method: DispersionMethod::DyadicLowerBound,
    })
}
