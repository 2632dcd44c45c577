//! Certificate for the torus covering condition: every `x` has a point `ξ`
//! with `|x_j - ξ_j|_torus ≤ (2d N_j)^{-1}` on each axis.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::FrequencyBox;
use crate::pointsets::{require_domain, Domain, PointSet};

/// Refinement levels tried on a probe cell before giving up on it.
pub const MAX_REFINEMENT: u32 = 6;

/// Verdict of [`covering_certificate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoveringOutcome {
    /// Every `x` on the torus is covered.
    Pass,
    /// `x` has no point within the covering radius.
    Fail { x: Vec<f64> },
    /// Some probe cells could be neither certified nor refuted.
    Inconclusive { unresolved: usize },
}

impl CoveringOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CoveringOutcome::Pass)
    }
}

/// Outcome plus the probe grid it was computed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub outcome: CoveringOutcome,
    /// Per-axis covering radius; infinite on axes with `N_j = 0`.
    pub radius: Vec<f64>,
    /// Per-axis number of coarse probes.
    pub probes: Vec<usize>,
    /// Probe cells that needed subdivision.
    pub refined: usize,
}

enum Probe {
    Covered,
    Uncovered,
    Unsure,
}

/// Points hashed into torus buckets at least one radius wide.
struct Buckets<'a> {
    radius: &'a [f64],
    counts: Vec<usize>,
    width: Vec<f64>,
    start: Vec<usize>,
    members: Vec<usize>,
    pts: Vec<f64>,
    d: usize,
}

impl<'a> Buckets<'a> {
    fn new(points: &PointSet, radius: &'a [f64]) -> Self {
        let d = points.dim();
        let counts: Vec<usize> = radius
            .iter()
            .map(|&r| if r.is_finite() { ((TAU / r).floor() as usize).max(1) } else { 1 })
            .collect();
        let width: Vec<f64> = counts.iter().map(|&c| TAU / c as f64).collect();
        let pts = points.to_f64();
        let keys: Vec<usize> = pts.chunks_exact(d.max(1)).map(|p| Self::key_of(&counts, &width, p)).collect();
        let total: usize = counts.iter().product();
        let mut start = vec![0usize; total + 1];
        for &k in &keys {
            start[k + 1] += 1;
        }
        for i in 0..total {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut members = vec![0usize; keys.len()];
        for (i, &k) in keys.iter().enumerate() {
            members[fill[k]] = i;
            fill[k] += 1;
        }
        Self { radius, counts, width, start, members, pts, d }
    }

    fn key_of(counts: &[usize], width: &[f64], p: &[f64]) -> usize {
        p.iter().zip(counts).zip(width).fold(0, |acc, ((&x, &c), &w)| {
            acc * c + ((x.rem_euclid(TAU) / w) as usize).min(c - 1)
        })
    }

    /// Classifies the probe cell centred at `c` with half-widths `half`.
    fn probe(&self, c: &[f64], half: &[f64]) -> Probe {
        let d = self.d;
        let home: Vec<usize> = c
            .iter()
            .zip(&self.counts)
            .zip(&self.width)
            .map(|((&x, &n), &w)| ((x.rem_euclid(TAU) / w) as usize).min(n - 1))
            .collect();
        let offsets: Vec<Vec<usize>> = (0..d)
            .map(|j| {
                let n = self.counts[j];
                let mut o: Vec<usize> = [n - 1, 0, 1].iter().map(|&k| (home[j] + k) % n).collect();
                o.sort_unstable();
                o.dedup();
                o
            })
            .collect();
        let mut idx = vec![0usize; d];
        let mut within_full = false;
        loop {
            let key = (0..d).fold(0, |acc, j| acc * self.counts[j] + offsets[j][idx[j]]);
            for &i in &self.members[self.start[key]..self.start[key + 1]] {
                let p = &self.pts[i * d..(i + 1) * d];
                let mut relaxed = true;
                let mut full = true;
                for j in 0..d {
                    let r = self.radius[j];
                    if r.is_infinite() {
                        continue;
                    }
                    let t = (p[j] - c[j]).rem_euclid(TAU);
                    let dist = t.min(TAU - t);
                    if dist > r {
                        full = false;
                        relaxed = false;
                        break;
                    }
                    if dist > r - half[j] {
                        relaxed = false;
                    }
                }
                if relaxed {
                    return Probe::Covered;
                }
                within_full |= full;
            }
            let mut k = 0;
            loop {
                if k == d {
                    return if within_full { Probe::Unsure } else { Probe::Uncovered };
                }
                idx[k] += 1;
                if idx[k] < offsets[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

enum Cell {
    Covered { refined: bool },
    Violation(Vec<f64>),
    Unresolved,
}

fn settle(b: &Buckets, c: Vec<f64>, half: Vec<f64>, depth: u32) -> Cell {
    match b.probe(&c, &half) {
        Probe::Covered => Cell::Covered { refined: depth > 0 },
        Probe::Uncovered => Cell::Violation(c),
        Probe::Unsure if depth == MAX_REFINEMENT => Cell::Unresolved,
        Probe::Unsure => {
            let d = c.len();
            let quarter: Vec<f64> = half.iter().map(|h| h / 2.0).collect();
            let mut unresolved = false;
            for corner in 0..1usize << d {
                let child: Vec<f64> = (0..d)
                    .map(|j| {
                        if b.radius[j].is_infinite() {
                            c[j]
                        } else if corner >> j & 1 == 1 {
                            c[j] + quarter[j]
                        } else {
                            c[j] - quarter[j]
                        }
                    })
                    .collect();
                match settle(b, child, quarter.clone(), depth + 1) {
                    Cell::Covered { .. } => {}
                    v @ Cell::Violation(_) => return v,
                    Cell::Unresolved => unresolved = true,
                }
            }
            if unresolved {
                Cell::Unresolved
            } else {
                Cell::Covered { refined: true }
            }
        }
    }
}

/// Checks the covering condition with radius `(2d N_j)^{-1}` on each axis.
///
/// Probes sit on a grid of spacing at most half the radius. A probe cell is
/// certified once one point lies within the radius shrunk by the cell's
/// half-width; cells that fail this but have a point within the full radius
/// are subdivided up to [`MAX_REFINEMENT`] times. A probe with no point
/// within the full radius is a genuine violation.
pub fn covering_certificate(points: &PointSet, degrees: &FrequencyBox) -> Result<CoveringReport> {
    require_domain(points, Domain::Torus)?;
    let d = points.dim();
    if degrees.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: degrees.dim(),
        });
    }
    let radius: Vec<f64> = degrees
        .degrees()
        .iter()
        .map(|&n| if n == 0 { f64::INFINITY } else { 1.0 / (2.0 * d as f64 * n as f64) })
        .collect();
    let probes: Vec<usize> = radius
        .iter()
        .map(|&r| if r.is_finite() { (TAU / (r / 2.0)).ceil() as usize } else { 1 })
        .collect();
    let spacing: Vec<f64> = probes.iter().map(|&p| TAU / p as f64).collect();
    let half: Vec<f64> = spacing.iter().map(|h| h / 2.0).collect();
    let total = probes
        .iter()
        .try_fold(1usize, |a, &p| a.checked_mul(p))
        .ok_or_else(|| Error::Overflow("probe grid is too large".into()))?;
    let buckets = Buckets::new(points, &radius);

    let cells: Vec<Cell> = (0..total)
        .into_par_iter()
        .map(|lin| {
            let mut rest = lin;
            let mut c = vec![0.0; d];
            for j in (0..d).rev() {
                c[j] = (rest % probes[j]) as f64 * spacing[j];
                rest /= probes[j];
            }
            settle(&buckets, c, half.clone(), 0)
        })
        .collect();

    let mut refined = 0;
    let mut unresolved = 0;
    for cell in cells {
        match cell {
            Cell::Covered { refined: r } => refined += r as usize,
            Cell::Violation(x) => {
                return Ok(CoveringReport {
                    outcome: CoveringOutcome::Fail { x },
                    radius,
                    probes,
                    refined,
                })
            }
            Cell::Unresolved => unresolved += 1,
        }
    }
    let outcome = if unresolved == 0 {
        CoveringOutcome::Pass
    } else {
        CoveringOutcome::Inconclusive { unresolved }
    };
    Ok(CoveringReport { outcome, radius, probes, refined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::enumerate_compositions;
    use crate::pointsets::{tensor_grid, universal_set, GridKind, UniversalConstructionParams};

    fn torus_dist(a: f64, b: f64) -> f64 {
        let t = (a - b).rem_euclid(TAU);
        t.min(TAU - t)
    }

    #[test]
    fn single_point_fails_near_antipode() {
        let p = PointSet::from_float(1, Domain::Torus, vec![0.0]).unwrap();
        let r = covering_certificate(&p, &FrequencyBox::new(vec![4]).unwrap()).unwrap();
        let CoveringOutcome::Fail { x } = r.outcome else { panic!("{r:?}") };
        assert!(torus_dist(x[0], 0.0) > 1.0 / 8.0);
    }

    #[test]
    fn fine_grid_passes_and_coarse_grid_fails() {
        // A grid with spacing h leaves every x within h/2 of a node.
        for d in 1..=3usize {
            for n in [1u64, 2, 4] {
                let degrees = FrequencyBox::new(vec![n; d]).unwrap();
                let radius = 1.0 / (2.0 * d as f64 * n as f64);
                let fine = (TAU / (4.0 * radius)).ceil() as u64;
                let g = tensor_grid(&FrequencyBox::new(vec![fine; d]).unwrap(), GridKind::Pprime).unwrap();
                assert!(covering_certificate(g.nodes(), &degrees).unwrap().outcome.passed(), "d={d} n={n}");
                // Own P' grid: spacing π/(2N) exceeds twice the radius.
                let own = tensor_grid(&degrees, GridKind::Pprime).unwrap();
                let r = covering_certificate(own.nodes(), &degrees).unwrap();
                let CoveringOutcome::Fail { x } = r.outcome else { panic!("{r:?}") };
                let nodes = own.nodes();
                assert!((0..nodes.len()).all(|i| {
                    let p = nodes.point(i);
                    (0..d).any(|j| torus_dist(p[j], x[j]) > radius)
                }));
            }
        }
    }

    #[test]
    fn universal_sets_cover_their_subspaces() {
        for (n, d) in [(6, 2), (4, 1), (2, 3)] {
            let u = universal_set(&UniversalConstructionParams::linf(n, d)).unwrap();
            for s in enumerate_compositions(n, d).unwrap() {
                let degrees = FrequencyBox::new(s.powers().unwrap()).unwrap();
                let r = covering_certificate(&u.points, &degrees).unwrap();
                assert!(r.outcome.passed(), "s={s:?}: {r:?}");
            }
        }
    }

    #[test]
    fn zero_degree_axis_is_free() {
        let p = PointSet::from_float(2, Domain::Torus, vec![1.0, 0.0]).unwrap();
        let r = covering_certificate(&p, &FrequencyBox::new(vec![0, 0]).unwrap()).unwrap();
        assert!(r.outcome.passed());
    }

    #[test]
    fn wrong_domain_is_rejected() {
        let p = PointSet::from_float(1, Domain::UnitCube, vec![0.5]).unwrap();
        assert!(covering_certificate(&p, &FrequencyBox::new(vec![1]).unwrap()).is_err());
    }
}
