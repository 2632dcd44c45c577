//! Tensor grids `P(N)`, `P′(N)` and the sparse grid `SG(n, d)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::{enumerate_compositions, FrequencyBox};

use super::{Coords, Domain, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GridKind {
    /// Nodes `2πn_j / (2N_j + 1)`, `0 ≤ n_j ≤ 2N_j`.
    P,
    /// Nodes `πn_j / (2N_j)`, `0 ≤ n_j < 4N_j`; an axis with `N_j = 0` repeats `x_j = 0` four times.
    Pprime,
}

/// A tensor grid on the torus together with its cell structure.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub degrees: FrequencyBox,
    pub kind: GridKind,
    nodes: PointSet,
}

impl GridSpec {
    /// Node set, torus domain, exact coordinates.
    pub fn nodes(&self) -> &PointSet {
        &self.nodes
    }

    pub fn into_nodes(self) -> PointSet {
        self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of nodes per axis.
    pub fn axis_counts(&self) -> Vec<u64> {
        let d = self.degrees.degrees();
        match self.kind {
            GridKind::P => d.iter().map(|&n| 2 * n + 1).collect(),
            GridKind::Pprime => d.iter().map(|&n| 4 * n.max(1)).collect(),
        }
    }
}

/// Cells per axis of the `P′(N)` partition: `4 max(N_j, 1)`.
pub fn cell_counts(degrees: &FrequencyBox) -> Vec<u64> {
    degrees.degrees().iter().map(|&n| 4 * n.max(1)).collect()
}

pub fn tensor_grid(degrees: &FrequencyBox, kind: GridKind) -> Result<GridSpec> {
    let d = degrees.dim();
    let counts: Vec<u64> = match kind {
        GridKind::P => degrees.degrees().iter().map(|&n| 2 * n + 1).collect(),
        GridKind::Pprime => cell_counts(degrees),
    };
    let total = counts
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c as usize))
        .filter(|&t| t <= 1 << 28)
        .ok_or_else(|| Error::OutOfRange(format!("grid for {:?} is too large", degrees.degrees())))?;
    // With N_j = 0 the P′ axis keeps four copies of x_j = 0.
    let dens: Vec<u64> = counts
        .iter()
        .zip(degrees.degrees())
        .map(|(&c, &n)| if kind == GridKind::Pprime && n == 0 { 1 } else { c })
        .collect();
    let mut nums = Vec::with_capacity(total * d);
    let mut idx = vec![0u64; d];
    for _ in 0..total {
        nums.extend(idx.iter().zip(&dens).map(|(&i, &q)| i % q));
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] < counts[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    Ok(GridSpec {
        degrees: degrees.clone(),
        kind,
        nodes: PointSet::from_exact(d, Domain::Torus, dens, nums)?,
    })
}

/// `SG(n, d) = ∪_{‖s‖₁=n} P′(2^s)`, deduplicated, sorted, torus domain.
///
/// Every node is a multiple of `2π / 2^{n+2}` on every axis, so the union is
/// stored with the common dyadic exponent `n + 2`.
pub fn sparse_grid(n: u32, d: usize) -> Result<PointSet> {
    if n + 2 > 52 {
        return Err(Error::OutOfRange(format!("sparse grid level {n} too large")));
    }
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for s in enumerate_compositions(n, d)? {
        let b = FrequencyBox::new(s.powers()?)?;
        let grid = tensor_grid(&b, GridKind::Pprime)?;
        let Coords::Exact { dens, nums } = grid.nodes.coords() else {
            unreachable!("tensor grids are exact")
        };
        let shifts: Vec<u32> = dens.iter().map(|q| n + 2 - q.trailing_zeros()).collect();
        rows.extend(
            nums.chunks(d)
                .map(|p| p.iter().zip(&shifts).map(|(&a, &sh)| a << sh).collect()),
        );
        if rows.len() > 1 << 26 {
            return Err(Error::OutOfRange("sparse grid too large".into()));
        }
        rows.sort_unstable();
        rows.dedup();
    }
    PointSet::from_dyadic(d, Domain::Torus, n + 2, rows.concat())
}

/// `|SG(n, d)|` by counting distinct nodes axis-wise.
///
/// A point with per-axis dyadic levels `L_j` (0 for the origin, else the
/// exponent of its reduced denominator divided by four) lies in `P′(2^s)`
/// iff `L_j ≤ s_j` for all `j`, so it belongs to the union iff `ΣL_j ≤ n`.
pub fn sparse_grid_cardinality(n: u32, d: usize) -> u128 {
    // weights: w(0) = 4 (the points 0, π/2, π, 3π/2), w(L) = 2^{L+1}
    fn rec(budget: u32, left: usize) -> u128 {
        if left == 0 {
            return 1;
        }
        (0..=budget)
            .map(|l| {
                let w: u128 = if l == 0 { 4 } else { 1u128 << (l + 1) };
                w * rec(budget - l, left - 1)
            })
            .sum()
    }
    rec(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn small_grids() {
        let g = tensor_grid(&FrequencyBox::new(vec![1]).unwrap(), GridKind::P).unwrap();
        let xs: Vec<f64> = g.nodes().to_f64();
        assert!(close(&xs, &[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0]));

        let g = tensor_grid(&FrequencyBox::new(vec![1]).unwrap(), GridKind::Pprime).unwrap();
        assert!(close(&g.nodes().to_f64(), &[0.0, PI / 2.0, PI, 1.5 * PI]));

        let g = tensor_grid(&FrequencyBox::new(vec![2, 2]).unwrap(), GridKind::P).unwrap();
        assert_eq!(g.len(), 25);
    }

    #[test]
    fn pprime_zero_degree_repeats_origin() {
        let g = tensor_grid(&FrequencyBox::new(vec![0, 2]).unwrap(), GridKind::Pprime).unwrap();
        assert_eq!(g.len(), 32);
        assert!((0..g.len()).all(|i| g.nodes().point(i)[0] == 0.0));
        assert_eq!(g.nodes().distinct_count(), 8);
    }

    #[test]
    fn sparse_grid_examples() {
        assert_eq!(sparse_grid(0, 2).unwrap().len(), 16);
        for n in 0..6 {
            let sg = sparse_grid(n, 1).unwrap();
            let g = tensor_grid(&FrequencyBox::new(vec![1 << n]).unwrap(), GridKind::Pprime).unwrap();
            assert_eq!(sg.to_f64(), g.nodes().to_f64());
        }
    }

    #[test]
    fn cardinality_formula_matches_enumeration() {
        for d in 1..=3 {
            for n in 0..7 {
                assert_eq!(sparse_grid(n, d).unwrap().len() as u128, sparse_grid_cardinality(n, d), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn sparse_grid_growth_is_n_2n() {
        let ratios: Vec<f64> = (4..=12)
            .map(|n| sparse_grid_cardinality(n, 2) as f64 / ((1u64 << n) as f64 * n as f64))
            .collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(hi / lo <= 8.0, "{ratios:?}");
        let d3: Vec<f64> = (4..=9)
            .map(|n| sparse_grid_cardinality(n, 3) as f64 / ((1u64 << n) as f64 * (n * n) as f64))
            .collect();
        let lo = d3.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = d3.iter().cloned().fold(0.0, f64::max);
        assert!(hi / lo <= 8.0, "{d3:?}");
    }
}
