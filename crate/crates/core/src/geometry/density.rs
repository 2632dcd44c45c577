//! Point counts per cell of the `P′(N)` partition of the torus.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::FrequencyBox;
use crate::pointsets::{cell_counts, require_domain, Coords, Domain, PointSet};

/// Occupancy of the half-open cells `Π_j [2πn_j/(4N̄_j), 2π(n_j+1)/(4N̄_j))`,
/// `N̄_j = max(N_j, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub degrees: FrequencyBox,
    /// Cells per axis.
    pub cells: Vec<usize>,
    /// Row-major counts, last axis fastest.
    pub counts: Vec<usize>,
    pub max_count: usize,
    pub min_count: usize,
    /// `Some(b)` when every cell holds exactly `b` points.
    pub uniform: Option<usize>,
}

impl DensityProfile {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Whether no cell holds more than `b` points.
    pub fn bounded_by(&self, b: usize) -> bool {
        self.max_count <= b
    }
}

/// Counts the points of a torus set in every cell of the `P′(N)` partition.
pub fn density_profile(points: &PointSet, degrees: &FrequencyBox) -> Result<DensityProfile> {
    require_domain(points, Domain::Torus)?;
    let d = points.dim();
    if degrees.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: degrees.dim(),
        });
    }
    let cells: Vec<usize> = cell_counts(degrees).into_iter().map(|c| c as usize).collect();
    let total = cells
        .iter()
        .try_fold(1usize, |a, &c| a.checked_mul(c))
        .filter(|&t| t <= 1 << 30)
        .ok_or_else(|| Error::Overflow(format!("too many cells for {:?}", degrees.degrees())))?;
    let mut counts = vec![0usize; total];
    for i in 0..points.len() {
        let key = match points.coords() {
            Coords::Exact { dens, nums } => nums[i * d..(i + 1) * d]
                .iter()
                .zip(dens)
                .zip(&cells)
                .fold(0, |acc, ((&a, &q), &c)| {
                    acc * c + (a as u128 * c as u128 / q as u128) as usize
                }),
            Coords::Float(_) => points.point(i).iter().zip(&cells).fold(0, |acc, (&x, &c)| {
                acc * c + ((x.rem_euclid(TAU) / TAU * c as f64) as usize).min(c - 1)
            }),
        };
        counts[key] += 1;
    }
    let max_count = counts.iter().copied().max().unwrap_or(0);
    let min_count = counts.iter().copied().min().unwrap_or(0);
    Ok(DensityProfile {
        degrees: degrees.clone(),
        cells,
        counts,
        max_count,
        min_count,
        uniform: (max_count == min_count).then_some(max_count),
    })
}
