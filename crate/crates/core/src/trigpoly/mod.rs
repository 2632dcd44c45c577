//! Trigonometric polynomials `f(x) = Σ_{k∈Q} c_k e^{i(k,x)}` on `[0, 2π)^d`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frequency::FrequencyBox;
use crate::seed;

mod eval;
pub mod kernels;

pub use eval::{GridValues, PointEvaluator};
pub use kernels::{
    dirichlet, fejer, kernel, tensor_kernel, tensor_kernel_value, vallee_poussin, wrap_angle,
    KernelKind, KernelSpec,
};

/// The frequency set a polynomial lives on.
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    /// Dense box, coefficients in row-major order (last axis fastest).
    Box(FrequencyBox),
    /// Explicit, strictly increasing (lexicographic) frequency list.
    Sparse { d: usize, freqs: Vec<Vec<i64>> },
}

impl Support {
    pub fn sparse(d: usize, mut freqs: Vec<Vec<i64>>) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if let Some(k) = freqs.iter().find(|k| k.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: k.len(),
            });
        }
        freqs.sort_unstable();
        let before = freqs.len();
        freqs.dedup();
        if freqs.len() != before {
            return Err(invalid("duplicate frequency in support"));
        }
        Ok(Support::Sparse { d, freqs })
    }

    pub fn dim(&self) -> usize {
        match self {
            Support::Box(b) => b.dim(),
            Support::Sparse { d, .. } => *d,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Support::Box(b) => b.cardinality() as usize,
            Support::Sparse { freqs, .. } => freqs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn frequencies(&self) -> Vec<Vec<i64>> {
        match self {
            Support::Box(b) => b.frequencies(),
            Support::Sparse { freqs, .. } => freqs.clone(),
        }
    }

    pub fn position(&self, k: &[i64]) -> Option<usize> {
        match self {
            Support::Box(b) => b.position(k),
            Support::Sparse { freqs, .. } => freqs.binary_search_by(|f| f.as_slice().cmp(k)).ok(),
        }
    }

    /// Per-axis `max |k_j|` over the support.
    pub fn bounding_degrees(&self) -> Vec<u64> {
        match self {
            Support::Box(b) => b.degrees().to_vec(),
            Support::Sparse { d, freqs } => (0..*d)
                .map(|j| freqs.iter().map(|k| k[j].unsigned_abs()).max().unwrap_or(0))
                .collect(),
        }
    }
}

/// Element of `T(Q)` with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    support: Support,
    coeffs: Vec<Complex64>,
}

/// Kinds of random test polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    /// I.i.d. standard complex Gaussian coefficients (`E|c_k|² = 1`).
    Gaussian,
    /// Dirichlet kernel `D_N(x - w)` with `w` uniform on the torus.
    Spike,
}

impl TrigPolynomial {
    pub fn new(support: Support, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != support.len() {
            return Err(invalid(format!(
                "{} coefficients for a support of size {}",
                coeffs.len(),
                support.len()
            )));
        }
        Ok(Self { support, coeffs })
    }

    pub fn on_box(b: FrequencyBox, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(Support::Box(b), coeffs)
    }

    /// The zero polynomial on `b`.
    pub fn zeros(b: FrequencyBox) -> Self {
        let n = b.cardinality() as usize;
        Self {
            support: Support::Box(b),
            coeffs: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// `c · e^{i(k,x)}`.
    pub fn monomial(k: &[i64], c: Complex64) -> Result<Self> {
        Self::new(Support::sparse(k.len(), vec![k.to_vec()])?, vec![c])
    }

    /// The constant polynomial `c` in dimension `d`.
    pub fn constant(d: usize, c: Complex64) -> Result<Self> {
        Self::monomial(&vec![0; d], c)
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: &[i64]) -> Option<Complex64> {
        self.support.position(k).map(|p| self.coeffs[p])
    }

    /// Smallest box `Π(N)` containing the support.
    pub fn bounding_box(&self) -> Result<FrequencyBox> {
        FrequencyBox::new(self.support.bounding_degrees())
    }

    /// The same polynomial with dense coefficients over a box containing its support.
    pub fn embed(&self, b: &FrequencyBox) -> Result<TrigPolynomial> {
        if b.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: b.dim(),
            });
        }
        if let Support::Box(own) = &self.support {
            if own == b {
                return Ok(self.clone());
            }
        }
        let mut out = TrigPolynomial::zeros(b.clone());
        for (k, &c) in self.support.frequencies().iter().zip(&self.coeffs) {
            let p = b
                .position(k)
                .ok_or_else(|| invalid(format!("frequency {k:?} outside target box")))?;
            out.coeffs[p] = c;
        }
        Ok(out)
    }

    /// Dense copy over the bounding box.
    pub fn densified(&self) -> Result<TrigPolynomial> {
        self.embed(&self.bounding_box()?)
    }

    pub fn scaled(&self, lambda: Complex64) -> TrigPolynomial {
        TrigPolynomial {
            support: self.support.clone(),
            coeffs: self.coeffs.iter().map(|&c| c * lambda).collect(),
        }
    }

    /// `Σ |c_k|²`.
    pub fn coeff_energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `x ↦ f(x - w)`: coefficients `c_k e^{-i(k,w)}`.
    pub fn translate(&self, w: &[f64]) -> Result<TrigPolynomial> {
        if w.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: w.len(),
            });
        }
        let coeffs = self
            .support
            .frequencies()
            .iter()
            .zip(&self.coeffs)
            .map(|(k, &c)| {
                let phase: f64 = k.iter().zip(w).map(|(&kj, &wj)| kj as f64 * wj).sum();
                c * Complex64::from_polar(1.0, -phase)
            })
            .collect();
        Ok(TrigPolynomial {
            support: self.support.clone(),
            coeffs,
        })
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            freqs: self.support.frequencies(),
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    /// Accepts any frequency list; a complete box in row-major order is stored densely.
    pub fn from_json(j: &PolynomialJson) -> Result<Self> {
        if j.freqs.len() != j.coeffs.len() {
            return Err(invalid("freqs and coeffs differ in length"));
        }
        let d = j.freqs.first().map_or(0, Vec::len);
        let coeffs: Vec<Complex64> = j.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        let support = Support::sparse(d, j.freqs.clone())?;
        let sparse = TrigPolynomial::new(support, vec![Complex64::new(0.0, 0.0); coeffs.len()])?;
        let b = sparse.bounding_box()?;
        if b.cardinality() as usize == j.freqs.len() && b.frequencies() == j.freqs {
            return TrigPolynomial::on_box(b, coeffs);
        }
        let mut out = sparse;
        for (k, c) in j.freqs.iter().zip(coeffs) {
            let p = out.support.position(k).expect("frequency is in its own support");
            out.coeffs[p] = c;
        }
        Ok(out)
    }
}

/// Polynomial JSON: `{"freqs": [[k…]], "coeffs": [[re, im], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub freqs: Vec<Vec<i64>>,
    pub coeffs: Vec<[f64; 2]>,
}

/// Draws a test polynomial on `b`, deterministically from `seed`.
pub fn random_poly(b: &FrequencyBox, seed: u64, kind: SampleKind) -> TrigPolynomial {
    let mut rng = seed::rng(seed);
    match kind {
        SampleKind::Gaussian => {
            let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid deviation");
            let coeffs = (0..b.cardinality())
                .map(|_| Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
                .collect();
            TrigPolynomial::on_box(b.clone(), coeffs).expect("sizes agree")
        }
        SampleKind::Spike => {
            let w: Vec<f64> = (0..b.dim()).map(|_| rng.random::<f64>() * TAU).collect();
            tensor_kernel(KernelKind::Dirichlet, b.degrees())
                .and_then(|k| k.translate(&w))
                .expect("Dirichlet kernel on a valid box")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_at_origin_is_one() {
        let f = TrigPolynomial::monomial(&[3, -2], c(1.0, 0.0)).unwrap();
        assert_eq!(f.eval_point(&[0.0, 0.0]).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn translate_examples() {
        let d1 = dirichlet(1);
        assert_eq!(d1.translate(&[0.0]).unwrap(), d1);
        let shifted = d1.translate(&[PI]).unwrap();
        let v = shifted.eval_point(&[0.0]).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-14);

        let k8 = fejer(8).unwrap();
        let w = [1.234];
        let v = k8.translate(&w).unwrap().eval_point(&w).unwrap();
        assert!((v - c(8.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn random_poly_is_deterministic() {
        let b = FrequencyBox::new(vec![2, 1]).unwrap();
        for kind in [SampleKind::Gaussian, SampleKind::Spike] {
            assert_eq!(random_poly(&b, 9, kind), random_poly(&b, 9, kind));
            assert_ne!(random_poly(&b, 9, kind), random_poly(&b, 10, kind));
        }
    }

    #[test]
    fn gaussian_energy_matches_dimension() {
        // E‖f‖₂² = ϑ(N) = 9 on Π((1,1)).
        let b = FrequencyBox::new(vec![1, 1]).unwrap();
        let draws = 10_000;
        let mean: f64 = (0..draws)
            .map(|i| random_poly(&b, seed::derive(5, &[i]), SampleKind::Gaussian).coeff_energy())
            .sum::<f64>()
            / draws as f64;
        assert!((mean - 9.0).abs() < 0.45, "mean energy {mean}");
    }

    #[test]
    fn spike_peaks_near_its_centre() {
        let b = FrequencyBox::new(vec![4, 2]).unwrap();
        let f = random_poly(&b, 77, SampleKind::Spike);
        // recover w from the phase of the (1,0) and (0,1) coefficients
        let w: Vec<f64> = [[1, 0], [0, 1]]
            .iter()
            .map(|k| (-f.coefficient(k).unwrap().arg()).rem_euclid(TAU))
            .collect();
        let sizes = [400usize, 400];
        let g = f.eval_grid(&sizes).unwrap();
        let (imax, _) = g
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        let node = [TAU * (imax / 400) as f64 / 400.0, TAU * (imax % 400) as f64 / 400.0];
        for j in 0..2 {
            let cell = PI / (2 * b.degrees()[j]) as f64;
            let dist = wrap_angle(node[j] - w[j]).abs();
            assert!(dist <= 2.0 * cell, "axis {j}: {dist} vs {cell}");
        }
    }

    #[test]
    fn json_round_trip_dense_and_sparse() {
        let b = FrequencyBox::new(vec![1, 2]).unwrap();
        let f = random_poly(&b, 3, SampleKind::Gaussian);
        let back = TrigPolynomial::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        assert!(matches!(back.support(), Support::Box(_)));

        let g = TrigPolynomial::new(
            Support::sparse(2, vec![vec![0, 0], vec![3, -1]]).unwrap(),
            vec![c(1.0, 2.0), c(-0.5, 0.0)],
        )
        .unwrap();
        let text = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(text, r#"{"freqs":[[0,0],[3,-1]],"coeffs":[[1.0,2.0],[-0.5,0.0]]}"#);
        let back: PolynomialJson = serde_json::from_str(&text).unwrap();
        assert_eq!(TrigPolynomial::from_json(&back).unwrap(), g);
    }

    #[test]
    fn sparse_support_rejects_duplicates() {
        assert!(Support::sparse(1, vec![vec![1], vec![1]]).is_err());
        assert!(Support::sparse(2, vec![vec![1]]).is_err());
    }

    #[test]
    fn embed_preserves_values() {
        let g = TrigPolynomial::new(
            Support::sparse(2, vec![vec![-2, 1], vec![0, 0], vec![1, 1]]).unwrap(),
            vec![c(1.0, -1.0), c(0.5, 0.0), c(0.0, 2.0)],
        )
        .unwrap();
        let dense = g.densified().unwrap();
        assert_eq!(dense.bounding_box().unwrap().degrees(), &[2, 1]);
        let x = [0.3, 5.1];
        assert!((dense.eval_point(&x).unwrap() - g.eval_point(&x).unwrap()).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn translate_shifts_argument(
            n1 in 0u64..6, n2 in 0u64..6, seed in any::<u64>(),
            w in prop::collection::vec(0.0..TAU, 2),
            x in prop::collection::vec(0.0..TAU, 2),
        ) {
            let f = random_poly(&FrequencyBox::new(vec![n1, n2]).unwrap(), seed, SampleKind::Gaussian);
            let lhs = f.translate(&w).unwrap().eval_point(&x).unwrap();
            let y: Vec<f64> = x.iter().zip(&w).map(|(a, b)| a - b).collect();
            let rhs = f.eval_point(&y).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }
}
