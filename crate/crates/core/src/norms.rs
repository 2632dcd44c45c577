//! Continuous and discrete `L_q` norms with respect to the normalized measure
//! `(2π)^{-d} dx` on the torus.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::pointsets::{require_domain, Domain, PointSet};
use crate::trigpoly::TrigPolynomial;

/// Default relative slack of the certified sup norm.
pub const DEFAULT_DELTA: f64 = 0.1;
/// Default oversampling of the quadrature fallback.
pub const DEFAULT_OVERSAMPLE: usize = 8;

/// A norm index `q ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(q: f64) -> Result<Self> {
        if q == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if q >= 1.0 && q.is_finite() {
            Ok(Exponent::Finite(q))
        } else {
            Err(invalid(format!("norm index q = {q} must lie in [1, ∞]")))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(q) => q,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// The even integer `q`, if it is one.
    pub fn even_integer(self) -> Option<u32> {
        match self {
            Exponent::Finite(q) if q.fract() == 0.0 && (q as u32).is_multiple_of(2) && q <= 64.0 => Some(q as u32),
            _ => None,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(q) => write!(f, "{q}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            t => Exponent::new(t.parse().map_err(|_| invalid(format!("bad norm index {s:?}")))?),
        }
    }
}

/// Finite indices serialize as numbers, `∞` as the string `"inf"`.
impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(q) => s.serialize_f64(*q),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(q) => Exponent::new(q),
            Raw::Text(t) => t.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Parseval,
    ExactGrid,
    Quadrature,
    CertifiedSup,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub q: Exponent,
    pub method: NormMethod,
    pub error_bound: f64,
}

impl NormResult {
    fn exact(value: f64, q: Exponent, method: NormMethod) -> Self {
        Self {
            value,
            q,
            method,
            error_bound: 0.0,
        }
    }

    /// Lower end of the reported bracket.
    pub fn lower(&self) -> f64 {
        match self.method {
            NormMethod::CertifiedSup => self.value,
            _ => (self.value - self.error_bound).max(0.0),
        }
    }

    /// Upper end of the reported bracket.
    pub fn upper(&self) -> f64 {
        self.value + self.error_bound
    }
}

/// `‖f‖₂ = (Σ|c_k|²)^{1/2}`.
pub fn norm_l2_exact(f: &TrigPolynomial) -> NormResult {
    NormResult::exact(f.coeff_energy().sqrt(), Exponent::Finite(2.0), NormMethod::Parseval)
}

/// Exact `‖f‖_q` for even `q` from the grid with `qN_j + 1` nodes per axis.
pub fn norm_lq_even_exact(f: &TrigPolynomial, q: u32) -> Result<NormResult> {
    if q == 0 || !q.is_multiple_of(2) {
        return Err(invalid(format!("exact grid needs an even q, got {q} (use quadrature)")));
    }
    let sizes: Vec<usize> = f
        .support()
        .bounding_degrees()
        .iter()
        .map(|&n| q as usize * n as usize + 1)
        .collect();
    let g = f.eval_grid(&sizes)?;
    let mean = g.mean_abs_pow(q as f64);
    Ok(NormResult::exact(
        mean.powf(1.0 / q as f64),
        Exponent::Finite(q as f64),
        NormMethod::ExactGrid,
    ))
}

fn quadrature_value(f: &TrigPolynomial, q: f64, rho: usize) -> Result<f64> {
    let sizes: Vec<usize> = f
        .support()
        .bounding_degrees()
        .iter()
        .map(|&n| if n == 0 { 1 } else { rho * (2 * n as usize + 1) })
        .collect();
    Ok(f.eval_grid(&sizes)?.mean_abs_pow(q).powf(1.0 / q))
}

/// Equispaced quadrature with `ρ(2N_j + 1)` nodes per axis.
///
/// The value comes from the refined grid `2ρ`; the error estimate is the
/// change between `ρ` and `2ρ`.
pub fn norm_lq_quadrature(f: &TrigPolynomial, q: f64, rho: usize) -> Result<NormResult> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(invalid(format!("quadrature needs finite q ≥ 1, got {q}")));
    }
    if rho < 4 {
        return Err(invalid(format!("oversampling ρ = {rho} must be at least 4")));
    }
    let coarse = quadrature_value(f, q, rho)?;
    let fine = quadrature_value(f, q, 2 * rho)?;
    Ok(NormResult {
        value: fine,
        q: Exponent::Finite(q),
        method: NormMethod::Quadrature,
        error_bound: (coarse - fine).abs(),
    })
}

/// Grid maximum of `|f|` together with a certified bracket for `‖f‖_∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedSup {
    pub delta: f64,
    pub sizes: Vec<usize>,
    /// `|f|` at every grid node, row-major.
    pub abs: Vec<f64>,
    /// Grid maximum; a lower bound for `‖f‖_∞`.
    pub lower: f64,
    /// `lower / (1 - δ)`; an upper bound for `‖f‖_∞`.
    pub upper: f64,
    pub argmax: usize,
}

/// Nodes per axis so that `Σ_j N_j h_j / 2 ≤ δ` with `h_j = 2π / M_j`.
pub fn sup_grid_sizes(degrees: &[u64], delta: f64) -> Vec<usize> {
    let active = degrees.iter().filter(|&&n| n > 0).count().max(1) as f64;
    degrees
        .iter()
        .map(|&n| {
            if n == 0 {
                1
            } else {
                (std::f64::consts::PI * active * n as f64 / delta).ceil() as usize
            }
        })
        .collect()
}

/// Sup over a grid fine enough that Bernstein's inequality
/// `|f(x) - f(y)| ≤ Σ N_j |x_j - y_j| ‖f‖_∞` certifies
/// `M ≤ ‖f‖_∞ ≤ M / (1 - δ)`.
pub fn certified_sup(f: &TrigPolynomial, delta: f64) -> Result<CertifiedSup> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(invalid(format!("δ = {delta} must lie in (0, 1/2]")));
    }
    let sizes = sup_grid_sizes(&f.support().bounding_degrees(), delta);
    let g = f.eval_grid(&sizes)?;
    let abs: Vec<f64> = g.values.iter().map(|v| v.norm_sqr().sqrt()).collect();
    let (argmax, lower) = abs
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |best, (i, &a)| if a > best.1 { (i, a) } else { best });
    Ok(CertifiedSup {
        delta,
        sizes,
        abs,
        lower,
        upper: lower / (1.0 - delta),
        argmax,
    })
}

pub fn norm_linf_certified(f: &TrigPolynomial, delta: f64) -> Result<NormResult> {
    let s = certified_sup(f, delta)?;
    Ok(NormResult {
        value: s.lower,
        q: Exponent::Infinity,
        method: NormMethod::CertifiedSup,
        error_bound: s.upper - s.lower,
    })
}

/// Best available continuous norm: Parseval, exact grid, certified sup or quadrature.
pub fn norm_lq(f: &TrigPolynomial, q: Exponent) -> Result<NormResult> {
    match q {
        Exponent::Infinity => norm_linf_certified(f, DEFAULT_DELTA),
        Exponent::Finite(2.0) => Ok(norm_l2_exact(f)),
        _ => match q.even_integer() {
            Some(e) => norm_lq_even_exact(f, e),
            None => norm_lq_quadrature(f, q.as_f64(), DEFAULT_OVERSAMPLE),
        },
    }
}

/// `((1/m) Σ |v|^q)^{1/q}`, or `max |v|` for `q = ∞`.
pub fn discrete_norm_of_values(values: &[Complex64], q: Exponent) -> Result<f64> {
    if values.is_empty() {
        return Err(invalid("discrete norm of an empty point set"));
    }
    Ok(match q {
        Exponent::Infinity => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        Exponent::Finite(q) => {
            let s: f64 = values.iter().map(|v| v.norm().powf(q)).sum();
            (s / values.len() as f64).powf(1.0 / q)
        }
    })
}

pub fn discrete_norm(f: &TrigPolynomial, points: &PointSet, q: Exponent) -> Result<NormResult> {
    if points.is_empty() {
        return Err(invalid("discrete norm of an empty point set"));
    }
    let values = f.eval(points)?;
    Ok(NormResult::exact(
        discrete_norm_of_values(&values, q)?,
        q,
        NormMethod::Discrete,
    ))
}

/// Precomputed nearest sup-grid node of each point, for exact maxima of
/// `|f|` over large point sets without evaluating every point.
#[derive(Debug, Clone)]
pub struct PointSupPlan {
    pub degrees: Vec<u64>,
    pub delta: f64,
    sizes: Vec<usize>,
    node: Vec<usize>,
    /// `Σ_j N_j |ξ_j - node_j|`, so that `|f(ξ)| ≤ |f(node)| + offset·‖f‖_∞`.
    offset: Vec<f64>,
}

impl PointSupPlan {
    pub fn new(points: &PointSet, degrees: &[u64], delta: f64) -> Result<Self> {
        require_domain(points, Domain::Torus)?;
        if points.dim() != degrees.len() {
            return Err(crate::Error::DimensionMismatch {
                expected: degrees.len(),
                found: points.dim(),
            });
        }
        let sizes = sup_grid_sizes(degrees, delta);
        let mut node = Vec::with_capacity(points.len());
        let mut offset = Vec::with_capacity(points.len());
        for i in 0..points.len() {
            let u = points.unit_point(i);
            let mut flat = 0usize;
            let mut off = 0.0;
            for ((&uj, &m), &n) in u.iter().zip(&sizes).zip(degrees) {
                let scaled = uj * m as f64;
                let k = scaled.round();
                off += n as f64 * std::f64::consts::TAU * (scaled - k).abs() / m as f64;
                flat = flat * m + (k as usize % m);
            }
            node.push(flat);
            offset.push(off);
        }
        Ok(Self {
            degrees: degrees.to_vec(),
            delta,
            sizes,
            node,
            offset,
        })
    }

    /// Exact `max_ν |f(ξ^ν)|` and a maximizing index, using grid bounds to
    /// skip points that cannot beat the running maximum.
    pub fn max_abs(&self, f: &TrigPolynomial, points: &PointSet, sup: &CertifiedSup) -> Result<(f64, usize)> {
        if sup.sizes != self.sizes || f.support().bounding_degrees() != self.degrees {
            return Err(invalid("sup grid does not match the plan"));
        }
        if points.len() != self.node.len() || points.dim() != self.degrees.len() {
            return Err(invalid("point set does not match the plan"));
        }
        if points.is_empty() {
            return Err(invalid("max over an empty point set"));
        }
        // Rounding slack on the grid values.
        let slack = 1e-12 * sup.upper;
        let bound = |i: usize| sup.abs[self.node[i]] + sup.upper * self.offset[i] + slack;
        let bounds: Vec<f64> = (0..self.node.len()).map(bound).collect();
        let first = (0..bounds.len())
            .max_by(|&a, &b| bounds[a].total_cmp(&bounds[b]).then(b.cmp(&a)))
            .expect("non-empty");
        let mut eval = f.evaluator();
        let mut x = vec![0.0; points.dim()];
        let mut value = |i: usize| {
            points.point_into(i, &mut x);
            eval.at(&x).norm()
        };
        let mut best = value(first);
        let mut arg = first;
        for (i, &b) in bounds.iter().enumerate() {
            if i == first || b < best {
                continue;
            }
            let v = value(i);
            if v > best || (v == best && i < arg) {
                best = v;
                arg = i;
            }
        }
        Ok((best, arg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::FrequencyBox;
    use crate::pointsets::{random_points, tensor_grid, GridKind};
    use crate::trigpoly::{dirichlet, fejer, random_poly, SampleKind, Support};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn one_plus_eix() -> TrigPolynomial {
        TrigPolynomial::new(Support::sparse(1, vec![vec![0], vec![1]]).unwrap(), vec![c(1.0), c(1.0)]).unwrap()
    }

    #[test]
    fn l2_examples() {
        let e = TrigPolynomial::monomial(&[2, -1], c(1.0)).unwrap();
        assert_eq!(norm_l2_exact(&e).value, 1.0);
        assert_eq!(norm_l2_exact(&TrigPolynomial::constant(2, c(3.0)).unwrap()).value, 3.0);
    }

    #[test]
    fn parseval_equals_p_grid_mean() {
        let b = FrequencyBox::new(vec![2, 3]).unwrap();
        let f = random_poly(&b, 1, SampleKind::Gaussian);
        let grid = tensor_grid(&b, GridKind::P).unwrap();
        let disc = discrete_norm(&f, grid.nodes(), Exponent::Finite(2.0)).unwrap().value;
        let l2 = norm_l2_exact(&f).value;
        assert!((disc - l2).abs() <= 1e-12 * l2);
    }

    #[test]
    fn even_exact_examples() {
        let e = TrigPolynomial::monomial(&[3], c(1.0)).unwrap();
        assert!((norm_lq_even_exact(&e, 4).unwrap().value - 1.0).abs() < 1e-14);
        // mean of (2 + 2cos x)² is 6
        let v = norm_lq_even_exact(&one_plus_eix(), 4).unwrap().value;
        assert!((v - 6f64.powf(0.25)).abs() < 1e-14);
        assert!(norm_lq_even_exact(&e, 3).is_err());
        let f = random_poly(&FrequencyBox::new(vec![3, 1, 2]).unwrap(), 4, SampleKind::Gaussian);
        let a = norm_lq_even_exact(&f, 2).unwrap().value;
        assert!((a - norm_l2_exact(&f).value).abs() <= 1e-12 * a);
    }

    #[test]
    fn quadrature_examples() {
        let f = random_poly(&FrequencyBox::new(vec![3, 2]).unwrap(), 8, SampleKind::Gaussian);
        let r = norm_lq_quadrature(&f, 2.0, 4).unwrap();
        assert!((r.value - norm_l2_exact(&f).value).abs() <= r.error_bound + 1e-12);

        // ‖1 + 2cos x‖₁ against a 64× refined reference
        let d1 = dirichlet(1);
        let r = norm_lq_quadrature(&d1, 1.0, 4).unwrap();
        let m = 64 * 8 * 3 * 4;
        let reference: f64 = (0..m)
            .map(|i| (1.0 + 2.0 * (std::f64::consts::TAU * (i as f64 + 0.5) / m as f64).cos()).abs())
            .sum::<f64>()
            / m as f64;
        assert!((r.value - reference).abs() <= r.error_bound.max(1e-6), "{r:?} vs {reference}");

        for q in [1.0, 1.5, 3.0, 7.0] {
            let k = TrigPolynomial::constant(2, Complex64::new(0.0, -2.5)).unwrap();
            let r = norm_lq_quadrature(&k, q, 4).unwrap();
            assert!((r.value - 2.5).abs() < 1e-14);
        }
        assert!(norm_lq_quadrature(&d1, 1.0, 3).is_err());
    }

    #[test]
    fn certified_sup_examples() {
        for (f, exact) in [
            (fejer(8).unwrap(), 8.0),
            (TrigPolynomial::monomial(&[5], c(1.0)).unwrap(), 1.0),
            (dirichlet(3), 7.0),
        ] {
            let r = norm_linf_certified(&f, 0.1).unwrap();
            assert!(r.lower() <= exact + 1e-12 && exact <= r.upper() + 1e-12, "{r:?}");
            assert!((r.upper() - r.value / 0.9).abs() < 1e-12);
        }
        assert!(norm_linf_certified(&dirichlet(1), 0.7).is_err());
    }

    #[test]
    fn discrete_examples() {
        let k = TrigPolynomial::constant(2, c(-4.0)).unwrap();
        let pts = random_points(17, 2, 3).unwrap().scale_to_torus().unwrap();
        for q in [Exponent::Finite(1.0), Exponent::Finite(3.5), Exponent::Infinity] {
            assert!((discrete_norm(&k, &pts, q).unwrap().value - 4.0).abs() < 1e-14);
        }
        assert!(discrete_norm(&k, &PointSet::empty(2, Domain::Torus), Exponent::Infinity).is_err());
    }

    #[test]
    fn exponent_parsing_and_json() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("4".parse::<Exponent>().unwrap(), Exponent::Finite(4.0));
        assert!("0.5".parse::<Exponent>().is_err());
        assert_eq!(serde_json::to_string(&Exponent::Infinity).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<Exponent>("2.0").unwrap(), Exponent::Finite(2.0));
        assert_eq!(Exponent::Finite(6.0).even_integer(), Some(6));
        assert_eq!(Exponent::Finite(3.0).even_integer(), None);
    }

    #[test]
    fn pruned_max_equals_full_scan() {
        let b = FrequencyBox::new(vec![7, 3]).unwrap();
        let pts = random_points(3000, 2, 5).unwrap().scale_to_torus().unwrap();
        let plan = PointSupPlan::new(&pts, b.degrees(), 0.1).unwrap();
        for seed in 0..6 {
            let kind = if seed % 2 == 0 { SampleKind::Gaussian } else { SampleKind::Spike };
            let f = random_poly(&b, seed, kind);
            let sup = certified_sup(&f, 0.1).unwrap();
            let (best, arg) = plan.max_abs(&f, &pts, &sup).unwrap();
            let full = discrete_norm(&f, &pts, Exponent::Infinity).unwrap().value;
            assert!((best - full).abs() <= 1e-12 * full);
            assert!((f.eval_point(&pts.point(arg)).unwrap().norm() - best).abs() <= 1e-12 * best);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn norms_are_monotone_in_q(degrees in prop::collection::vec(0u64..5, 1..3), seed in any::<u64>()) {
            let f = random_poly(&FrequencyBox::new(degrees).unwrap(), seed, SampleKind::Gaussian);
            let n1 = norm_lq_quadrature(&f, 1.0, 4).unwrap();
            let n2 = norm_l2_exact(&f);
            let n4 = norm_lq_even_exact(&f, 4).unwrap();
            let ninf = norm_linf_certified(&f, 0.1).unwrap();
            prop_assert!(n1.lower() <= n2.value * (1.0 + 1e-12));
            prop_assert!(n2.value <= n4.value * (1.0 + 1e-12));
            prop_assert!(n4.value <= ninf.upper() * (1.0 + 1e-12));
        }

        #[test]
        fn p_grid_identity(degrees in prop::collection::vec(0u64..9, 1..4), seed in any::<u64>()) {
            let b = FrequencyBox::new(degrees).unwrap();
            let f = random_poly(&b, seed, SampleKind::Gaussian);
            let grid = tensor_grid(&b, GridKind::P).unwrap();
            let disc = discrete_norm(&f, grid.nodes(), Exponent::Finite(2.0)).unwrap().value;
            let l2 = norm_l2_exact(&f).value;
            prop_assert!((disc - l2).abs() <= 1e-10 * l2);
        }
    }
}
