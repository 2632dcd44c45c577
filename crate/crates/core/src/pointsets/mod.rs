//! Point families: tensor grids, sparse grids, digital nets and the
//! universal constructions built from them.
//!
//! Coordinates are kept exact whenever the construction allows it: a point
//! coordinate is stored as a fraction `num / den_j` of the period (per-axis
//! denominator, shared by all points), and only turned into a float when a
//! polynomial is evaluated. Dyadic sets are the special case `den_j = 2^r`.

use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub mod grids;
pub mod net;
pub mod universal;

pub use grids::{cell_counts, sparse_grid, sparse_grid_cardinality, tensor_grid, GridKind, GridSpec};
pub use net::{default_generator_matrices, minimal_t, net_points, verify_net, DigitalNet, NetCheck};
pub use universal::{log_term, universal_set, NormMode, UniversalConstructionParams, UniversalSet};

/// Exponent used for uniformly random dyadic coordinates.
pub const RANDOM_EXPONENT: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    #[serde(rename = "unit")]
    UnitCube,
    #[serde(rename = "torus2pi")]
    Torus,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::UnitCube => "unit",
            Domain::Torus => "torus2pi",
        }
    }

    fn period(self) -> f64 {
        match self {
            Domain::UnitCube => 1.0,
            Domain::Torus => TAU,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coords {
    /// Coordinate `j` of point `ν` is `period · nums[ν·d + j] / dens[j]`.
    Exact { dens: Vec<u64>, nums: Vec<u64> },
    /// Raw coordinates, row-major `m × d`.
    Float(Vec<f64>),
}

/// `m` points in `[0,1)^d` or `[0,2π)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    d: usize,
    domain: Domain,
    coords: Coords,
}

impl PointSet {
    pub fn from_exact(d: usize, domain: Domain, dens: Vec<u64>, nums: Vec<u64>) -> Result<Self> {
        if d == 0 || dens.len() != d {
            return Err(invalid("one denominator per axis required"));
        }
        if dens.contains(&0) {
            return Err(invalid("zero denominator"));
        }
        if !nums.len().is_multiple_of(d) {
            return Err(invalid("numerator count is not a multiple of d"));
        }
        for chunk in nums.chunks(d) {
            if chunk.iter().zip(&dens).any(|(&a, &q)| a >= q) {
                return Err(invalid("numerator outside [0, den)"));
            }
        }
        Ok(Self {
            d,
            domain,
            coords: Coords::Exact { dens, nums },
        })
    }

    pub fn from_dyadic(d: usize, domain: Domain, exponent: u32, nums: Vec<u64>) -> Result<Self> {
        if exponent > 52 {
            return Err(Error::OutOfRange(format!("dyadic exponent {exponent} > 52")));
        }
        Self::from_exact(d, domain, vec![1u64 << exponent; d], nums)
    }

    pub fn from_float(d: usize, domain: Domain, coords: Vec<f64>) -> Result<Self> {
        if d == 0 || !coords.len().is_multiple_of(d) {
            return Err(invalid("coordinate count is not a multiple of d"));
        }
        let p = domain.period();
        if coords.iter().any(|&x| !(0.0..p).contains(&x)) {
            return Err(invalid(format!("coordinate outside [0, {p})")));
        }
        Ok(Self {
            d,
            domain,
            coords: Coords::Float(coords),
        })
    }

    pub fn empty(d: usize, domain: Domain) -> Self {
        Self {
            d,
            domain,
            coords: Coords::Float(Vec::new()),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        match &self.coords {
            Coords::Exact { nums, .. } => nums.len() / self.d,
            Coords::Float(x) => x.len() / self.d,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    /// Common dyadic exponent, if every denominator is the same power of two.
    pub fn dyadic_exponent(&self) -> Option<u32> {
        match &self.coords {
            Coords::Exact { dens, .. } => {
                let e = dens[0].trailing_zeros();
                dens.iter()
                    .all(|&q| q.is_power_of_two() && q.trailing_zeros() == e)
                    .then_some(e)
            }
            Coords::Float(_) => None,
        }
    }

    /// Per-axis exponents when every denominator is a power of two.
    pub fn dyadic_exponents(&self) -> Option<Vec<u32>> {
        match &self.coords {
            Coords::Exact { dens, .. } if dens.iter().all(|q| q.is_power_of_two()) => {
                Some(dens.iter().map(|q| q.trailing_zeros()).collect())
            }
            _ => None,
        }
    }

    /// Coordinates of point `i` in the set's own domain.
    /// [`point`](Self::point) written into `out` (length `dim`).
    pub fn point_into(&self, i: usize, out: &mut [f64]) {
        let p = self.domain.period();
        let row = i * self.d..(i + 1) * self.d;
        match &self.coords {
            Coords::Exact { dens, nums } => {
                for ((o, &a), &q) in out.iter_mut().zip(&nums[row]).zip(dens) {
                    *o = p * (a as f64 / q as f64);
                }
            }
            Coords::Float(x) => out.copy_from_slice(&x[row]),
        }
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        let p = self.domain.period();
        match &self.coords {
            Coords::Exact { dens, nums } => nums[i * self.d..(i + 1) * self.d]
                .iter()
                .zip(dens)
                .map(|(&a, &q)| p * (a as f64 / q as f64))
                .collect(),
            Coords::Float(x) => x[i * self.d..(i + 1) * self.d].to_vec(),
        }
    }

    /// All coordinates as floats, row-major.
    pub fn to_f64(&self) -> Vec<f64> {
        (0..self.len()).flat_map(|i| self.point(i)).collect()
    }

    /// Coordinates of point `i` as fractions of the period, in `[0, 1)`.
    pub fn unit_point(&self, i: usize) -> Vec<f64> {
        let p = self.domain.period();
        match &self.coords {
            Coords::Exact { dens, nums } => nums[i * self.d..(i + 1) * self.d]
                .iter()
                .zip(dens)
                .map(|(&a, &q)| a as f64 / q as f64)
                .collect(),
            Coords::Float(x) => x[i * self.d..(i + 1) * self.d].iter().map(|v| v / p).collect(),
        }
    }

    /// Multiplies by `2π`; exact coordinates keep their numerators.
    pub fn scale_to_torus(&self) -> Result<PointSet> {
        match self.domain {
            Domain::Torus => Err(Error::WrongDomain {
                expected: "unit",
                found: "torus2pi",
            }),
            Domain::UnitCube => Ok(self.with_domain(Domain::Torus)),
        }
    }

    /// Divides by `2π`; exact coordinates keep their numerators.
    pub fn to_unit_cube(&self) -> Result<PointSet> {
        match self.domain {
            Domain::UnitCube => Err(Error::WrongDomain {
                expected: "torus2pi",
                found: "unit",
            }),
            Domain::Torus => Ok(self.with_domain(Domain::UnitCube)),
        }
    }

    fn with_domain(&self, domain: Domain) -> PointSet {
        let coords = match &self.coords {
            Coords::Exact { .. } => self.coords.clone(),
            Coords::Float(x) => {
                let f = domain.period() / self.domain.period();
                // rounding may push a coordinate onto the period boundary
                let p = domain.period();
                Coords::Float(x.iter().map(|v| (v * f).min(p * (1.0 - f64::EPSILON))).collect())
            }
        };
        PointSet {
            d: self.d,
            domain,
            coords,
        }
    }

    /// Keeps the points for which `keep` returns true.
    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> PointSet {
        let d = self.d;
        let coords = match &self.coords {
            Coords::Exact { dens, nums } => Coords::Exact {
                dens: dens.clone(),
                nums: (0..self.len())
                    .filter(|&i| keep(i))
                    .flat_map(|i| nums[i * d..(i + 1) * d].iter().copied())
                    .collect(),
            },
            Coords::Float(x) => Coords::Float(
                (0..self.len())
                    .filter(|&i| keep(i))
                    .flat_map(|i| x[i * d..(i + 1) * d].iter().copied())
                    .collect(),
            ),
        };
        PointSet {
            d,
            domain: self.domain,
            coords,
        }
    }

    /// Number of distinct points (exact comparison for exact coordinates).
    pub fn distinct_count(&self) -> usize {
        let d = self.d;
        match &self.coords {
            Coords::Exact { nums, .. } => {
                let mut rows: Vec<&[u64]> = nums.chunks(d).collect();
                rows.sort_unstable();
                rows.dedup();
                rows.len()
            }
            Coords::Float(x) => {
                let mut rows: Vec<Vec<u64>> = x.chunks(d).map(|r| r.iter().map(|v| v.to_bits()).collect()).collect();
                rows.sort_unstable();
                rows.dedup();
                rows.len()
            }
        }
    }

    pub fn to_json(&self) -> PointSetJson {
        let (encoding, r, denominators, points) = match &self.coords {
            Coords::Exact { dens, nums } => {
                let rows = nums
                    .chunks(self.d)
                    .map(|c| c.iter().map(|&a| serde_json::Value::from(a)).collect())
                    .collect();
                match self.dyadic_exponent() {
                    Some(e) => (Encoding::Dyadic, Some(e), None, rows),
                    None => (Encoding::Rational, None, Some(dens.clone()), rows),
                }
            }
            Coords::Float(x) => (
                Encoding::Float,
                None,
                None,
                x.chunks(self.d)
                    .map(|c| c.iter().map(|&v| serde_json::Value::from(v)).collect())
                    .collect(),
            ),
        };
        PointSetJson {
            d: self.d,
            m: self.len(),
            domain: self.domain,
            encoding,
            r,
            denominators,
            points,
        }
    }

    pub fn from_json(j: &PointSetJson) -> Result<Self> {
        if j.points.len() != j.m {
            return Err(invalid(format!("m = {} but {} points listed", j.m, j.points.len())));
        }
        if j.points.iter().any(|p| p.len() != j.d) {
            return Err(Error::DimensionMismatch {
                expected: j.d,
                found: j.points.iter().map(|p| p.len()).find(|&l| l != j.d).unwrap_or(0),
            });
        }
        let ints = || -> Result<Vec<u64>> {
            j.points
                .iter()
                .flatten()
                .map(|v| v.as_u64().ok_or_else(|| invalid("expected integer numerators")))
                .collect()
        };
        match j.encoding {
            Encoding::Dyadic => {
                let r = j.r.ok_or_else(|| invalid("dyadic encoding needs r"))?;
                Self::from_dyadic(j.d, j.domain, r, ints()?)
            }
            Encoding::Rational => {
                let dens = j
                    .denominators
                    .clone()
                    .ok_or_else(|| invalid("rational encoding needs denominators"))?;
                Self::from_exact(j.d, j.domain, dens, ints()?)
            }
            Encoding::Float => {
                let x = j
                    .points
                    .iter()
                    .flatten()
                    .map(|v| v.as_f64().ok_or_else(|| invalid("expected numbers")))
                    .collect::<Result<Vec<_>>>()?;
                Self::from_float(j.d, j.domain, x)
            }
        }
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let j: PointSetJson = serde_json::from_str(&text)?;
        Self::from_json(&j)
    }

    /// One point per row, coordinates in the set's domain.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let header: Vec<String> = (0..self.d).map(|j| format!("x{}", j + 1)).collect();
        wr.write_record(&header)?;
        for i in 0..self.len() {
            wr.write_record(self.point(i).iter().map(|v| format!("{v:.17e}")))?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Dyadic,
    Float,
    /// Extension: per-axis denominators for exact non-dyadic grids.
    Rational,
}

/// On-disk point-set format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSetJson {
    pub d: usize,
    pub m: usize,
    pub domain: Domain,
    pub encoding: Encoding,
    pub r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denominators: Option<Vec<u64>>,
    pub points: Vec<Vec<serde_json::Value>>,
}

/// `m` i.i.d. uniform points in `[0,1)^d`, on the dyadic grid of mesh `2^-32`.
pub fn random_points(m: usize, d: usize, seed: u64) -> Result<PointSet> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let mut rng = crate::seed::rng(seed);
    let nums = (0..m * d)
        .map(|_| rng.random::<u32>() as u64)
        .collect();
    PointSet::from_dyadic(d, Domain::UnitCube, RANDOM_EXPONENT, nums)
}

/// Errors unless the set lives in `domain`.
pub(crate) fn require_domain(points: &PointSet, domain: Domain) -> Result<()> {
    if points.domain() == domain {
        Ok(())
    } else {
        Err(Error::WrongDomain {
            expected: domain.name(),
            found: points.domain().name(),
        })
    }
}
