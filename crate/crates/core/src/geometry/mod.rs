//! Dispersion, empty boxes, covering certificates and cell densities.

mod covering;
mod density;
mod dispersion;
mod empty_box;

use serde::{Deserialize, Serialize};

pub use covering::{covering_certificate, CoveringOutcome, CoveringReport, MAX_REFINEMENT};
pub use density::{density_profile, DensityProfile};
pub use dispersion::{dispersion_dyadic, dispersion_exact, EXACT_GUARD_2D, EXACT_GUARD_3D, EXACT_GUARD_HIGH};
pub use empty_box::{find_empty_box, find_shaped_empty_box, ShapedEmptyBox};

/// The box `[u, v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxWitness {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl BoxWitness {
    pub fn volume(&self) -> f64 {
        self.u.iter().zip(&self.v).map(|(a, b)| b - a).product()
    }

    /// True when `x` lies strictly inside on every axis.
    pub fn contains_open(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.u).zip(&self.v).all(|((&x, &a), &b)| a < x && x < b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionMethod {
    Exact,
    DyadicLowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionResult {
    pub volume: f64,
    pub witness: BoxWitness,
    pub method: DispersionMethod,
}
