//! Measurements behind the upper bounds: kernel sums, the de la Vallée
//! Poussin sampling operator, one-sided inequalities and snapping.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frequency::{FrequencyBox, SubspaceIndex};
use crate::geometry::density_profile;
use crate::norms::{norm_lq, Exponent};
use crate::pointsets::{require_domain, Coords, Domain, PointSet};
use crate::seed;
use crate::trigpoly::{random_poly, tensor_kernel_value, KernelKind, SampleKind, Support, TrigPolynomial};

use super::sweep::{sample_ratio, sample_seed};

/// `v(N) = Π_j max(N_j, 1)`.
pub fn volume_factor(degrees: &FrequencyBox) -> f64 {
    degrees.degrees().iter().map(|&n| n.max(1) as f64).product()
}

fn check_dims(points: &PointSet, degrees: &FrequencyBox) -> Result<()> {
    require_domain(points, Domain::Torus)?;
    if points.dim() != degrees.dim() {
        return Err(Error::DimensionMismatch {
            expected: points.dim(),
            found: degrees.dim(),
        });
    }
    if points.is_empty() {
        return Err(invalid("empty point set"));
    }
    Ok(())
}

fn uniform_torus(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random::<f64>() * TAU).collect()
}

/// Result of [`kernel_sum_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSumResult {
    pub b_plus: usize,
    pub volume: f64,
    /// `max_x Σ_ν |V_N(x - ξ^ν)| / (b⁺ v(N))` over the sampled `x`.
    pub normalized_sup: f64,
    pub argmax: Vec<f64>,
}

/// Largest normalized kernel sum over `samples` uniform points `x`.
pub fn kernel_sum_check(points: &PointSet, degrees: &FrequencyBox, samples: usize, seed: u64) -> Result<KernelSumResult> {
    check_dims(points, degrees)?;
    if degrees.degrees().contains(&0) {
        return Err(invalid("kernel orders must be at least 1"));
    }
    let b_plus = density_profile(points, degrees)?.max_count;
    let volume = volume_factor(degrees);
    let mut rng = seed::rng(seed);
    let xs: Vec<Vec<f64>> = (0..samples.max(1)).map(|_| uniform_torus(&mut rng, points.dim())).collect();
    let pts: Vec<Vec<f64>> = (0..points.len()).map(|i| points.point(i)).collect();
    let order = degrees.degrees();
    let sums: Vec<f64> = xs
        .par_iter()
        .map(|x| {
            pts.iter()
                .map(|p| {
                    let y: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
                    tensor_kernel_value(KernelKind::ValleePoussin, order, &y).abs()
                })
                .sum()
        })
        .collect();
    let (k, top) = sums
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    Ok(KernelSumResult {
        b_plus,
        volume,
        normalized_sup: top / (b_plus as f64 * volume),
        argmax: xs[k].clone(),
    })
}

/// `(1/m) Σ_ν a_ν V_N(x - ξ^ν)` as a polynomial of degree `2N_j - 1`.
pub fn vp_operator(points: &PointSet, degrees: &FrequencyBox, a: &[Complex64]) -> Result<TrigPolynomial> {
    check_dims(points, degrees)?;
    if a.len() != points.len() {
        return Err(invalid("one coefficient per point is required"));
    }
    if degrees.degrees().contains(&0) {
        return Err(invalid("kernel orders must be at least 1"));
    }
    let d = points.dim();
    let order = degrees.degrees();
    let out = FrequencyBox::new(order.iter().map(|&n| KernelKind::ValleePoussin.degree(n)).collect())?;
    let lens = out.axis_lens();
    let mut acc = vec![Complex64::new(0.0, 0.0); out.cardinality() as usize];
    let mut row = acc.clone();
    for (i, &ai) in a.iter().enumerate() {
        let p = points.point(i);
        // Tensor product of e^{-i k_j ξ_j} built axis by axis.
        row[0] = ai;
        let mut len = 1;
        for j in 0..d {
            let deg = out.degrees()[j] as i64;
            let step = Complex64::from_polar(1.0, -p[j]);
            let mut w = Complex64::from_polar(1.0, deg as f64 * p[j]);
            let axis: Vec<Complex64> = (0..lens[j])
                .map(|_| {
                    let c = w;
                    w *= step;
                    c
                })
                .collect();
            for r in (0..len).rev() {
                let base = row[r];
                for (k, &e) in axis.iter().enumerate() {
                    row[r * lens[j] + k] = base * e;
                }
            }
            len *= lens[j];
        }
        for (s, r) in acc.iter_mut().zip(&row) {
            *s += r;
        }
    }
    let m = points.len() as f64;
    let freqs = out.frequencies();
    for (c, k) in acc.iter_mut().zip(&freqs) {
        let v: f64 = order.iter().zip(k).map(|(&n, &kj)| KernelKind::ValleePoussin.coefficient(n, kj)).product();
        *c *= v / m;
    }
    TrigPolynomial::new(Support::Box(out), acc)
}

/// Result of [`vp_operator_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorResult {
    pub q: Exponent,
    pub b_plus: usize,
    pub volume: f64,
    /// Largest ratio over the trials.
    pub max_ratio: f64,
    pub ratios: Vec<f64>,
}

/// `‖(1/m)Σ a_ν V_N(·-ξ^ν)‖_q / ((b⁺v(N)/m)^{1-1/q} ‖a‖_{ℓ_q(m)})` with the
/// upper end of the norm bracket in the numerator and the normalized
/// `ℓ_q` norm `((1/m)Σ|a_ν|^q)^{1/q}`.
pub fn vp_operator_ratio(points: &PointSet, degrees: &FrequencyBox, q: Exponent, a: &[Complex64]) -> Result<f64> {
    let g = vp_operator(points, degrees, a)?;
    let b_plus = density_profile(points, degrees)?.max_count as f64;
    let m = points.len() as f64;
    let scale = b_plus * volume_factor(degrees) / m;
    let (factor, a_norm) = match q {
        Exponent::Infinity => (scale, a.iter().map(|x| x.norm()).fold(0.0, f64::max)),
        Exponent::Finite(e) => (
            scale.powf(1.0 - 1.0 / e),
            (a.iter().map(|x| x.norm().powf(e)).sum::<f64>() / m).powf(1.0 / e),
        ),
    };
    if a_norm == 0.0 {
        return Err(invalid("coefficient vector is zero"));
    }
    Ok(norm_lq(&g, q)?.upper() / (factor * a_norm))
}

/// Maximum of [`vp_operator_ratio`] over `trials` complex Gaussian vectors.
pub fn vp_operator_check(
    points: &PointSet,
    degrees: &FrequencyBox,
    q: Exponent,
    trials: usize,
    seed: u64,
) -> Result<OperatorResult> {
    check_dims(points, degrees)?;
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid deviation");
    let ratios: Vec<f64> = (0..trials.max(1))
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(seed::derive(seed, &[t as u64]));
            let a: Vec<Complex64> = (0..points.len())
                .map(|_| Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
                .collect();
            vp_operator_ratio(points, degrees, q, &a)
        })
        .collect::<Result<_>>()?;
    Ok(OperatorResult {
        q,
        b_plus: density_profile(points, degrees)?.max_count,
        volume: volume_factor(degrees),
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        ratios,
    })
}

/// Result of [`one_sided_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneSidedResult {
    pub q: Exponent,
    pub m: usize,
    /// `ϑ(N) = Π(2N_j + 1)`.
    pub theta: u64,
    pub b_plus: usize,
    /// False when `m < ϑ(N)`; the measurement still runs.
    pub enough_points: bool,
    /// Largest discrete-to-continuous norm ratio, against the lower end of
    /// the norm bracket.
    pub sup_ratio: f64,
    /// The same maximum against the upper end of the bracket.
    pub sup_ratio_conservative: f64,
}

/// Largest `((1/m)Σ|f(ξ)|^q)^{1/q} / ‖f‖_q` over Gaussian samples of `T(Π(N))`.
pub fn one_sided_check(
    points: &PointSet,
    degrees: &FrequencyBox,
    q: Exponent,
    trials: usize,
    seed: u64,
) -> Result<OneSidedResult> {
    check_dims(points, degrees)?;
    let power = if q.is_infinite() { 1.0 } else { q.as_f64() };
    let brackets = (0..trials.max(1))
        .into_par_iter()
        .map(|t| {
            let f = random_poly(degrees, sample_seed(seed, 0, SampleKind::Gaussian, t), SampleKind::Gaussian);
            sample_ratio(&f, points, q, None, crate::norms::DEFAULT_DELTA)
        })
        .collect::<Result<Vec<_>>>()?;
    let theta = degrees.cardinality();
    Ok(OneSidedResult {
        q,
        m: points.len(),
        theta,
        b_plus: density_profile(points, degrees)?.max_count,
        enough_points: points.len() as u64 >= theta,
        sup_ratio: brackets.iter().map(|b| b.high).fold(0.0, f64::max).powf(1.0 / power),
        sup_ratio_conservative: brackets.iter().map(|b| b.low).fold(0.0, f64::max).powf(1.0 / power),
    })
}

/// Result of [`snap_compare`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapResult {
    pub s: SubspaceIndex,
    pub margin: u32,
    pub q: Exponent,
    /// The cell grid `N = 2^{s + margin - 2}`.
    pub cells: FrequencyBox,
    /// `Some(b)` when every cell holds exactly `b` points.
    pub uniform: Option<usize>,
    /// Largest `(1/m)Σ||f(ξ)|^q - |f(γ)|^q| / ((K_j/N_j)‖f‖_q^q)` over trials
    /// and axes.
    pub normalized: f64,
    /// Largest un-normalized left side relative to `‖f‖_q^q`.
    pub raw: f64,
}

/// Moves coordinate `axis` of every point to the lower corner of its cell.
pub fn snap_axis(points: &PointSet, cells: &FrequencyBox, axis: usize) -> Result<PointSet> {
    check_dims(points, cells)?;
    let d = points.dim();
    let count = 4 * cells.degrees()[axis].max(1);
    let mut x = points.to_f64();
    for i in 0..points.len() {
        let c = &mut x[i * d + axis];
        let cell = match points.coords() {
            Coords::Exact { dens, nums } => (nums[i * d + axis] as u128 * count as u128 / dens[axis] as u128) as u64,
            Coords::Float(_) => ((c.rem_euclid(TAU) / TAU * count as f64) as u64).min(count - 1),
        };
        *c = TAU * cell as f64 / count as f64;
    }
    PointSet::from_float(d, Domain::Torus, x)
}

/// Measures the snapping inequality for `f ∈ T(2^s)` on cells
/// `N = 2^{s + margin - 2}`.
pub fn snap_compare(
    points: &PointSet,
    s: &SubspaceIndex,
    margin: u32,
    q: Exponent,
    trials: usize,
    seed: u64,
) -> Result<SnapResult> {
    let e = match q {
        Exponent::Finite(e) => e,
        Exponent::Infinity => return Err(invalid("snapping comparison needs finite q")),
    };
    if margin < 2 {
        return Err(invalid("margin must be at least 2"));
    }
    let k = FrequencyBox::new(s.powers()?)?;
    let cells = FrequencyBox::new(s.as_slice().iter().map(|&sj| 1u64 << (sj + margin - 2)).collect())?;
    check_dims(points, &cells)?;
    let uniform = density_profile(points, &cells)?.uniform;
    let snapped: Vec<PointSet> = (0..points.dim()).map(|j| snap_axis(points, &cells, j)).collect::<Result<_>>()?;
    let ratio_k_n = 2f64.powi(2 - margin as i32);
    let per_trial: Vec<f64> = (0..trials.max(1))
        .into_par_iter()
        .map(|t| {
            let f = random_poly(&k, sample_seed(seed, 0, SampleKind::Gaussian, t), SampleKind::Gaussian);
            let norm = norm_lq(&f, q)?.value.powf(e);
            let at_points: Vec<f64> = f.eval(points)?.iter().map(|v| v.norm().powf(e)).collect();
            let mut worst = 0.0f64;
            for g in &snapped {
                let diff: f64 = f
                    .eval(g)?
                    .iter()
                    .zip(&at_points)
                    .map(|(v, p)| (v.norm().powf(e) - p).abs())
                    .sum::<f64>()
                    / points.len() as f64;
                worst = worst.max(diff / norm);
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let raw = per_trial.iter().copied().fold(0.0, f64::max);
    Ok(SnapResult {
        s: s.clone(),
        margin,
        q,
        cells,
        uniform,
        normalized: raw / ratio_k_n,
        raw,
    })
}
