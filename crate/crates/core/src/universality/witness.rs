//! Fejér-kernel witnesses against sets with large empty boxes.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::frequency::SubspaceIndex;
use crate::geometry::find_shaped_empty_box;
use crate::pointsets::{require_domain, Domain, PointSet};
use crate::trigpoly::{tensor_kernel, tensor_kernel_value, KernelKind};

/// A polynomial in `T(R(s))` that peaks inside an empty box and is small on
/// every point of the set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub s: SubspaceIndex,
    /// Empty box `(u, v)` in unit-cube coordinates.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Box centre in unit-cube coordinates.
    pub w: Vec<f64>,
    pub a: u32,
    /// `f(2πw)`, equal to `2^{‖s‖₁}`.
    pub peak: f64,
    /// `max_ν |f(2πξ^ν)|`.
    pub max_on_points: f64,
    pub argmax: Option<usize>,
    /// `max_on_points / peak`.
    pub ratio: f64,
}

/// Looks for an empty box with sides `2^{a - s_j}`, `‖s‖₁ = n`, and measures
/// the tensor Fejér kernel `K_{2^s}` centred in it on the set.
///
/// Returns `None` when no such box exists.
pub fn fejer_witness(points: &PointSet, n: u32, a: u32) -> Result<Option<WitnessResult>> {
    require_domain(points, Domain::UnitCube)?;
    let Some(hit) = find_shaped_empty_box(points, n, a)? else {
        return Ok(None);
    };
    let order = hit.s.powers()?;
    let w: Vec<f64> = hit.u.iter().zip(&hit.v).map(|(a, b)| 0.5 * (a + b)).collect();
    let centre: Vec<f64> = w.iter().map(|x| TAU * x).collect();
    let f = tensor_kernel(KernelKind::Fejer, &order)?.translate(&centre)?;
    let peak = f.eval_point(&centre)?.re;
    let (max_on_points, argmax) = (0..points.len())
        .map(|i| {
            let x: Vec<f64> = points.unit_point(i).iter().zip(&w).map(|(p, c)| TAU * (p - c)).collect();
            (tensor_kernel_value(KernelKind::Fejer, &order, &x).abs(), i)
        })
        .fold((0.0, None), |best, (v, i)| if v > best.0 { (v, Some(i)) } else { best });
    Ok(Some(WitnessResult {
        s: hit.s,
        u: hit.u,
        v: hit.v,
        w,
        a,
        peak,
        max_on_points,
        argmax,
        ratio: max_on_points / peak,
    }))
}

/// Removes every point strictly inside `Π_j (corner_j, corner_j + 2^{a - s_j})`.
pub fn plant_empty_box(points: &PointSet, s: &SubspaceIndex, a: u32, corner: &[f64]) -> Result<PointSet> {
    require_domain(points, Domain::UnitCube)?;
    if s.dim() != points.dim() || corner.len() != points.dim() {
        return Err(invalid("box shape and corner must match the dimension"));
    }
    let side: Vec<f64> = s.as_slice().iter().map(|&sj| 2f64.powi(a as i32 - sj as i32)).collect();
    if corner.iter().zip(&side).any(|(c, l)| *c < 0.0 || c + l > 1.0) {
        return Err(invalid("planted box must lie inside the unit cube"));
    }
    Ok(points.filter(|i| {
        let x = points.unit_point(i);
        !x.iter().zip(corner).zip(&side).all(|((x, c), l)| *c < *x && *x < c + l)
    }))
}
