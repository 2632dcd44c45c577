//! Dirichlet, Fejér and de la Vallée Poussin kernels.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::frequency::FrequencyBox;

use super::{Support, TrigPolynomial};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `D_n(x) = Σ_{|k|≤n} e^{ikx}`.
    Dirichlet,
    /// `K_n(x) = Σ_{|k|≤n} (1 - |k|/n) e^{ikx}`, degree `n - 1`.
    Fejer,
    /// `V_n = 2K_{2n} - K_n`, degree `2n - 1`.
    ValleePoussin,
}

/// A kernel and its per-axis order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub order: Vec<u64>,
}

impl KernelKind {
    fn check_order(self, n: u64) -> Result<()> {
        match self {
            KernelKind::Dirichlet => Ok(()),
            _ if n == 0 => Err(invalid(format!("{self:?} kernel needs order n ≥ 1"))),
            _ => Ok(()),
        }
    }

    /// Trigonometric degree of the order-`n` kernel.
    pub fn degree(self, n: u64) -> u64 {
        match self {
            KernelKind::Dirichlet => n,
            KernelKind::Fejer => n - 1,
            KernelKind::ValleePoussin => 2 * n - 1,
        }
    }

    /// Fourier coefficient at frequency `k`.
    pub fn coefficient(self, n: u64, k: i64) -> f64 {
        let a = k.unsigned_abs();
        let fejer = |n: u64| {
            if a >= n {
                0.0
            } else {
                (n - a) as f64 / n as f64
            }
        };
        match self {
            KernelKind::Dirichlet => {
                if a <= n {
                    1.0
                } else {
                    0.0
                }
            }
            KernelKind::Fejer => fejer(n),
            KernelKind::ValleePoussin => {
                if a <= n {
                    1.0
                } else if a < 2 * n {
                    (2 * n - a) as f64 / n as f64
                } else {
                    0.0
                }
            }
        }
    }

    /// Closed-form value at `x` (no coefficient sum).
    pub fn value(self, n: u64, x: f64) -> f64 {
        match self {
            KernelKind::Dirichlet => dirichlet_value(n, x),
            KernelKind::Fejer => fejer_value(n, x),
            KernelKind::ValleePoussin => 2.0 * fejer_value(2 * n, x) - fejer_value(n, x),
        }
    }
}

/// Wraps `x` into `[-π, π)`.
pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y >= PI {
        y - TAU
    } else {
        y
    }
}

fn dirichlet_value(n: u64, x: f64) -> f64 {
    let y = wrap_angle(x);
    let half = (0.5 * y).sin();
    if half.abs() < 1e-9 {
        let m = (2 * n + 1) as f64;
        // sin(m y/2)/sin(y/2) ≈ m (1 - (m² - 1) y² / 24)
        m * (1.0 - (m * m - 1.0) * y * y / 24.0)
    } else {
        ((n as f64 + 0.5) * y).sin() / half
    }
}

fn fejer_value(n: u64, x: f64) -> f64 {
    let y = wrap_angle(x);
    let nf = n as f64;
    let half = (0.5 * y).sin();
    if half.abs() < 1e-9 {
        nf * (1.0 - (nf * nf - 1.0) * y * y / 12.0)
    } else {
        let s = (0.5 * nf * y).sin();
        s * s / (nf * half * half)
    }
}

/// Univariate kernel as a polynomial.
pub fn kernel(kind: KernelKind, n: u64) -> Result<TrigPolynomial> {
    tensor_kernel(kind, &[n])
}

pub fn dirichlet(n: u64) -> TrigPolynomial {
    kernel(KernelKind::Dirichlet, n).expect("Dirichlet kernel accepts every order")
}

pub fn fejer(n: u64) -> Result<TrigPolynomial> {
    kernel(KernelKind::Fejer, n)
}

pub fn vallee_poussin(n: u64) -> Result<TrigPolynomial> {
    kernel(KernelKind::ValleePoussin, n)
}

/// Product kernel `Π_j kind_{N_j}(x_j)`.
pub fn tensor_kernel(kind: KernelKind, order: &[u64]) -> Result<TrigPolynomial> {
    if order.is_empty() {
        return Err(invalid("kernel needs at least one axis"));
    }
    for &n in order {
        kind.check_order(n)?;
    }
    let b = FrequencyBox::new(order.iter().map(|&n| kind.degree(n)).collect())?;
    let axis: Vec<Vec<f64>> = order
        .iter()
        .zip(b.degrees())
        .map(|(&n, &deg)| {
            (-(deg as i64)..=deg as i64)
                .map(|k| kind.coefficient(n, k))
                .collect()
        })
        .collect();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for a in &axis {
        coeffs = coeffs
            .iter()
            .flat_map(|&c| a.iter().map(move |&x| c * x))
            .collect();
    }
    TrigPolynomial::new(Support::Box(b), coeffs)
}

/// Closed-form value of a tensor kernel.
pub fn tensor_kernel_value(kind: KernelKind, order: &[u64], x: &[f64]) -> f64 {
    order.iter().zip(x).map(|(&n, &xj)| kind.value(n, xj)).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn peak_values() {
        assert!(close(dirichlet(3).eval_point(&[0.0]).unwrap().re, 7.0, 1e-14));
        assert!(close(fejer(4).unwrap().eval_point(&[0.0]).unwrap().re, 4.0, 1e-14));
        assert!(close(vallee_poussin(5).unwrap().eval_point(&[0.0]).unwrap().re, 15.0, 1e-14));
    }

    #[test]
    fn fejer_mean_is_one_and_vp_reproduces() {
        for n in 1..20 {
            let k = fejer(n).unwrap();
            assert_eq!(k.coefficient(&[0]), Some(Complex64::new(1.0, 0.0)));
            let v = vallee_poussin(n).unwrap();
            assert_eq!(v.support().bounding_degrees(), vec![2 * n - 1]);
            for j in -(n as i64)..=n as i64 {
                assert_eq!(v.coefficient(&[j]), Some(Complex64::new(1.0, 0.0)));
            }
        }
    }

    #[test]
    fn vp_equals_fejer_combination() {
        for n in 1..12u64 {
            for k in -(4 * n as i64)..=4 * n as i64 {
                let lhs = KernelKind::ValleePoussin.coefficient(n, k);
                let rhs = 2.0 * KernelKind::Fejer.coefficient(2 * n, k) - KernelKind::Fejer.coefficient(n, k);
                assert!((lhs - rhs).abs() < 1e-15, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn closed_forms_match_coefficient_sums() {
        for kind in [KernelKind::Dirichlet, KernelKind::Fejer, KernelKind::ValleePoussin] {
            for n in [1u64, 2, 5, 16] {
                let p = kernel(kind, n).unwrap();
                for i in 0..97 {
                    let x = -PI + 2.0 * PI * i as f64 / 97.0 + 1e-3;
                    let direct = p.eval_point(&[x]).unwrap();
                    assert!(direct.im.abs() < 1e-12);
                    assert!(close(kind.value(n, x), direct.re, 1e-10), "{kind:?} n={n} x={x}");
                }
                assert!(close(kind.value(n, 0.0), p.eval_point(&[0.0]).unwrap().re, 1e-12));
                assert!(close(kind.value(n, 1e-11), p.eval_point(&[1e-11]).unwrap().re, 1e-12));
            }
        }
    }

    #[test]
    fn fejer_rejects_zero_order() {
        assert!(fejer(0).is_err());
        assert!(vallee_poussin(0).is_err());
        assert!(tensor_kernel(KernelKind::Fejer, &[2, 0]).is_err());
        assert_eq!(dirichlet(0).eval_point(&[1.0]).unwrap().re, 1.0);
    }

    #[test]
    fn tensor_kernel_is_a_product() {
        let p = tensor_kernel(KernelKind::Fejer, &[3, 5]).unwrap();
        let x = [0.7, -2.1];
        let v = p.eval_point(&x).unwrap().re;
        assert!(close(v, tensor_kernel_value(KernelKind::Fejer, &[3, 5], &x), 1e-12));
        assert!(close(p.eval_point(&[0.0, 0.0]).unwrap().re, 15.0, 1e-14));
    }

    #[test]
    fn wrap_is_periodic() {
        assert!(close(wrap_angle(3.0 * PI + 0.1), -PI + 0.1, 1e-12));
        assert!(close(wrap_angle(-0.2), -0.2, 1e-15));
        let w = wrap_angle(PI);
        assert!((-PI..PI).contains(&w));
    }
}
