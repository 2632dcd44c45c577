//! Universal point sets: a scaled digital net of `2^r` points with
//! `r = n + t + margin·d`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::net::{default_generator_matrices, net_points, verify_net, MAX_NET_EXPONENT};
use super::PointSet;

/// Which inequality the set is built for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum NormMode {
    /// Sup-norm: per-axis margin `1 + ⌊log₂(4dπ)⌋`.
    Linf,
    /// `L_q` with a configurable per-axis margin `a ≥ 2`.
    Lq { q: f64, a: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalConstructionParams {
    pub n: u32,
    pub d: usize,
    pub mode: NormMode,
}

/// `1 + ⌊log₂(4dπ)⌋`.
pub fn log_term(d: usize) -> u32 {
    1 + (4.0 * d as f64 * std::f64::consts::PI).log2().floor() as u32
}

impl UniversalConstructionParams {
    pub fn linf(n: u32, d: usize) -> Self {
        Self { n, d, mode: NormMode::Linf }
    }

    pub fn lq(n: u32, d: usize, q: f64, a: u32) -> Self {
        Self { n, d, mode: NormMode::Lq { q, a } }
    }

    /// Per-axis margin added to `n + t`.
    pub fn margin(&self) -> u32 {
        match self.mode {
            NormMode::Linf => log_term(self.d),
            NormMode::Lq { a, .. } => a,
        }
    }

    /// Net exponent for quality `t`.
    pub fn exponent(&self, t: u32) -> u64 {
        self.n as u64 + t as u64 + self.margin() as u64 * self.d as u64
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if let NormMode::Lq { q, a } = self.mode {
            if q.is_nan() || q < 1.0 {
                return Err(invalid(format!("q = {q} must be at least 1")));
            }
            if a < 2 {
                return Err(invalid(format!("L_q margin a = {a} must be at least 2")));
            }
        }
        Ok(())
    }
}

/// A universal set with its construction record.
#[derive(Debug, Clone, PartialEq)]
pub struct UniversalSet {
    pub params: UniversalConstructionParams,
    /// Measured quality of the underlying net at exponent `r`.
    pub t: u32,
    pub r: u32,
    pub log_term: u32,
    pub margin: u32,
    /// Points on the torus, `2π` times the net.
    pub points: PointSet,
}

impl UniversalSet {
    pub fn m(&self) -> usize {
        self.points.len()
    }
}

/// Builds the set for the smallest `t` at which the net at exponent
/// `r = n + t + margin·d` verifies as a `(t, r, d)`-net.
pub fn universal_set(params: &UniversalConstructionParams) -> Result<UniversalSet> {
    params.validate()?;
    for t in 0.. {
        let r = params.exponent(t);
        if r > MAX_NET_EXPONENT as u64 {
            return Err(Error::OutOfRange(format!(
                "n = {} needs a net with 2^{r} points (limit 2^{MAX_NET_EXPONENT}); choose a smaller n",
                params.n
            )));
        }
        let r = r as u32;
        let net = default_generator_matrices(params.d, r)?;
        let points = net_points(&net)?;
        if verify_net(&points, t)?.passed() {
            return Ok(UniversalSet {
                params: *params,
                t,
                r,
                log_term: log_term(params.d),
                margin: params.margin(),
                points: points.scale_to_torus()?,
            });
        }
    }
    unreachable!("the exponent bound ends the search")
}
