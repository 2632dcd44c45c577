//! Universal sampling discretization for trigonometric polynomials with
//! dyadic rectangular spectra.
//!
//! The crate builds point sets on the torus `[0, 2π)^d` that discretize the
//! `L_q` norm of every polynomial whose frequencies lie in some dyadic
//! rectangle `R(s) = {k : |k_j| < 2^{s_j}}` with `‖s‖₁ = n`, using digital
//! `(t, r, d)`-nets in base 2. Alongside the construction it ships the
//! machinery needed to check the relevant inequalities numerically: exact
//! net-quality verification, exact dispersion, covering certificates,
//! certified sup norms and a reproducible sweep harness.
//!
//! Module map:
//!
//! * [`frequency`]: boxes `Π(N)`, dyadic rectangles, hyperbolic crosses.
//! * [`trigpoly`]: polynomials, evaluation, Dirichlet/Fejér/de la Vallée Poussin kernels.
//! * [`pointsets`]: tensor and sparse grids, digital nets, universal sets.
//! * [`geometry`]: dispersion, empty-box search, covering and cell densities.
//! * [`norms`]: continuous and discrete `L_q` norms.
//! * [`universality`]: sweeps, witnesses and kernel/operator checks.
//! * [`cli`]: the `unidisc` command-line front end.

pub mod cli;
pub mod error;
pub mod frequency;
pub mod geometry;
pub mod norms;
pub mod pointsets;
pub mod trigpoly;
pub mod universality;

mod seed;

pub use error::{Error, Result};
pub use frequency::{FrequencyBox, HyperbolicCross, SubspaceIndex};
pub use norms::{Exponent, NormMethod, NormResult};
pub use pointsets::{Domain, PointSet};
pub use trigpoly::TrigPolynomial;

/// Crate version embedded into every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
