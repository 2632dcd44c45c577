//! Evaluation by per-axis factorized summation.
//!
//! A point costs one table of `e^{ik x_j}` per axis and one pass over the
//! coefficients; a tensor grid is handled by contracting one axis at a time
//! against the matrix `e^{2πi·m·k/M_j}`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use matrixmultiply::CGemmOption;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::pointsets::{require_domain, Domain, PointSet};

use super::{Support, TrigPolynomial};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Steps between exact re-anchoring of the `e^{ikx}` recurrence.
const ANCHOR: usize = 32;

/// Writes `e^{ikx}` for `k = -n..=n` into `out`.
fn cis_table(x: f64, n: u64, out: &mut Vec<Complex64>) {
    let len = 2 * n as usize + 1;
    out.clear();
    let step = Complex64::from_polar(1.0, x);
    let mut cur = ZERO;
    for idx in 0..len {
        cur = if idx % ANCHOR == 0 {
            Complex64::from_polar(1.0, (idx as f64 - n as f64) * x)
        } else {
            cur * step
        };
        out.push(cur);
    }
}

struct Scratch {
    tables: Vec<Vec<Complex64>>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl Scratch {
    fn new(d: usize) -> Self {
        Self {
            tables: vec![Vec::new(); d],
            a: Vec::new(),
            b: Vec::new(),
        }
    }
}

/// Evaluates one polynomial at many points without reallocating.
pub struct PointEvaluator<'a> {
    f: &'a TrigPolynomial,
    degrees: Vec<u64>,
    scratch: Scratch,
}

impl PointEvaluator<'_> {
    /// `f(x)`; `x` must have the polynomial's dimension.
    pub fn at(&mut self, x: &[f64]) -> Complex64 {
        assert_eq!(x.len(), self.degrees.len(), "point dimension");
        self.f.eval_with_degrees(x, &self.degrees, &mut self.scratch)
    }
}

impl TrigPolynomial {
    fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            })
        }
    }

    /// `f(x)` at a single point of `R^d`.
    pub fn eval_point(&self, x: &[f64]) -> Result<Complex64> {
        self.check_dim(x.len())?;
        Ok(self.eval_with(x, &mut Scratch::new(self.dim())))
    }

    /// Reusable single-point evaluator for many calls in a row.
    pub fn evaluator(&self) -> PointEvaluator<'_> {
        PointEvaluator {
            f: self,
            degrees: self.support.bounding_degrees(),
            scratch: Scratch::new(self.dim()),
        }
    }

    fn eval_with(&self, x: &[f64], s: &mut Scratch) -> Complex64 {
        self.eval_with_degrees(x, &self.support.bounding_degrees(), s)
    }

    fn eval_with_degrees(&self, x: &[f64], degrees: &[u64], s: &mut Scratch) -> Complex64 {
        for ((t, &xj), &n) in s.tables.iter_mut().zip(x).zip(degrees) {
            cis_table(xj, n, t);
        }
        match &self.support {
            Support::Box(_) => {
                // Contract the last axis first; `a` holds the partial sums.
                let d = degrees.len();
                s.a.clear();
                s.a.extend_from_slice(&self.coeffs);
                for j in (0..d).rev() {
                    let t = &s.tables[j];
                    s.b.clear();
                    s.b.extend(s.a.chunks_exact(t.len()).map(|row| {
                        row.iter().zip(t).fold(ZERO, |acc, (&c, &e)| acc + c * e)
                    }));
                    std::mem::swap(&mut s.a, &mut s.b);
                }
                s.a[0]
            }
            Support::Sparse { freqs, .. } => freqs
                .iter()
                .zip(&self.coeffs)
                .map(|(k, &c)| {
                    k.iter().zip(degrees).zip(&s.tables).fold(c, |acc, ((&kj, &n), t)| {
                        acc * t[(kj + n as i64) as usize]
                    })
                })
                .sum(),
        }
    }

    /// Values at every point of a torus-domain set, in point order.
    pub fn eval(&self, points: &PointSet) -> Result<Vec<Complex64>> {
        require_domain(points, Domain::Torus)?;
        self.check_dim(points.dim())?;
        let d = self.dim();
        Ok((0..points.len())
            .into_par_iter()
            .with_min_len(256)
            .map_init(
                || (Scratch::new(d), Vec::with_capacity(d)),
                |(s, x), i| {
                    x.clear();
                    x.extend(points.point(i));
                    self.eval_with(x, s)
                },
            )
            .collect())
    }

    /// Values on the tensor grid with `sizes[j]` equispaced nodes `2πm/M_j` per axis.
    pub fn eval_grid(&self, sizes: &[usize]) -> Result<GridValues> {
        self.check_dim(sizes.len())?;
        if sizes.contains(&0) {
            return Err(invalid("grid needs at least one node per axis"));
        }
        let dense = self.densified()?;
        let degrees = dense.support.bounding_degrees();
        let lens: Vec<usize> = degrees.iter().map(|&n| 2 * n as usize + 1).collect();
        let order = contraction_order(&lens, sizes);
        let mut shape = lens.clone();
        let mut data = dense.coeffs;
        for j in order {
            data = contract_axis(&data, &shape, j, degrees[j], &roots_of_unity(sizes[j]));
            shape[j] = sizes[j];
        }
        Ok(GridValues {
            sizes: sizes.to_vec(),
            values: data,
        })
    }
}

/// The `M`-th roots of unity `e^{2πi r/M}`.
fn roots_of_unity(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|r| Complex64::from_polar(1.0, TAU * r as f64 / m as f64))
        .collect()
}

/// Row `row` of `E[row][k] = e^{2πi·row·(k-n)/M}`, `k = 0..=2n`.
fn axis_row(row: usize, n: u64, roots: &[Complex64], out: &mut Vec<Complex64>) {
    let m = roots.len();
    let len = 2 * n as usize + 1;
    let neg_n = (m - (n % m as u64) as usize) % m;
    let mut idx = (row as u128 * neg_n as u128 % m as u128) as usize;
    out.clear();
    for _ in 0..len {
        out.push(roots[idx]);
        idx += row;
        if idx >= m {
            idx -= m;
        }
    }
}

/// Axis order minimising the multiply count of successive contractions.
fn contraction_order(lens: &[usize], sizes: &[usize]) -> Vec<usize> {
    let d = lens.len();
    let cost = |order: &[usize]| {
        let mut size: f64 = lens.iter().map(|&l| l as f64).product();
        let mut total = 0.0;
        for &j in order {
            total += size * sizes[j] as f64;
            size = size / lens[j] as f64 * sizes[j] as f64;
        }
        total
    };
    let mut order: Vec<usize> = (0..d).collect();
    if d > 5 {
        order.sort_by(|&a, &b| {
            let ga = sizes[a] as f64 / lens[a] as f64;
            let gb = sizes[b] as f64 / lens[b] as f64;
            ga.total_cmp(&gb)
        });
        return order;
    }
    let mut best = order.clone();
    let mut best_cost = cost(&order);
    permute(&mut order, 0, &mut |p| {
        let c = cost(p);
        if c < best_cost {
            best_cost = c;
            best = p.to_vec();
        }
    });
    best
}

fn permute(v: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, visit);
        v.swap(k, i);
    }
}

fn contract_axis(data: &[Complex64], shape: &[usize], j: usize, n: u64, roots: &[Complex64]) -> Vec<Complex64> {
    let m = roots.len();
    let len = shape[j];
    let inner: usize = shape[j + 1..].iter().product();
    let outer: usize = shape[..j].iter().product();
    if outer * inner >= 8 && m * len <= 1 << 22 {
        let mut table = Vec::with_capacity(m * len);
        let mut row_buf = Vec::with_capacity(len);
        for row in 0..m {
            axis_row(row, n, roots, &mut row_buf);
            table.extend_from_slice(&row_buf);
        }
        let mut out = vec![ZERO; outer * m * inner];
        if inner == 1 {
            // (outer × len) · tableᵀ
            gemm(outer, len, m, data, (len, 1), &table, (1, len), &mut out, m);
        } else {
            for (src, dst) in data.chunks_exact(len * inner).zip(out.chunks_exact_mut(m * inner)) {
                gemm(m, len, inner, &table, (len, 1), src, (inner, 1), dst, inner);
            }
        }
        return out;
    }
    let mut out = vec![ZERO; outer * m * inner];
    out.par_chunks_mut(inner)
        .with_min_len(64)
        .enumerate()
        .for_each_init(Vec::new, |coeffs, (idx, dst)| {
            let (o, row) = (idx / m, idx % m);
            axis_row(row, n, roots, coeffs);
            let block = &data[o * len * inner..(o + 1) * len * inner];
            if inner == 1 {
                dst[0] = dot(block, coeffs);
                return;
            }
            let dst = as_f64_mut(dst);
            for (src, &e) in block.chunks_exact(inner).zip(coeffs.iter()) {
                axpy(dst, as_f64(src), e.re, e.im);
            }
        });
    out
}

/// `c = a · b` for row-major `c` (`rows × cols`); `a` and `b` carry
/// `(row, column)` strides.
#[allow(clippy::too_many_arguments)]
fn gemm(
    rows: usize,
    depth: usize,
    cols: usize,
    a: &[Complex64],
    (rsa, csa): (usize, usize),
    b: &[Complex64],
    (rsb, csb): (usize, usize),
    c: &mut [Complex64],
    rsc: usize,
) {
    assert!(c.len() >= rows * cols);
    assert!(rows == 0 || depth == 0 || (rows - 1) * rsa + (depth - 1) * csa < a.len());
    assert!(depth == 0 || cols == 0 || (depth - 1) * rsb + (cols - 1) * csb < b.len());
    // SAFETY: the asserts keep every access in bounds, `Complex64` has the
    // layout of `[f64; 2]`, and `c` is exclusively borrowed with unit column stride.
    unsafe {
        matrixmultiply::zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            rows,
            depth,
            cols,
            [1.0, 0.0],
            a.as_ptr().cast(),
            rsa as isize,
            csa as isize,
            b.as_ptr().cast(),
            rsb as isize,
            csb as isize,
            [0.0, 0.0],
            c.as_mut_ptr().cast(),
            rsc as isize,
            1,
        );
    }
}

fn as_f64(z: &[Complex64]) -> &[f64] {
    // SAFETY: `Complex64` is `repr(C)` with two `f64` fields.
    unsafe { std::slice::from_raw_parts(z.as_ptr().cast(), 2 * z.len()) }
}

fn as_f64_mut(z: &mut [Complex64]) -> &mut [f64] {
    // SAFETY: as above; the borrow is exclusive.
    unsafe { std::slice::from_raw_parts_mut(z.as_mut_ptr().cast(), 2 * z.len()) }
}

/// `Σ x_k e_k` with independent partial sums to shorten the dependency chain.
fn dot(x: &[Complex64], e: &[Complex64]) -> Complex64 {
    let mut acc = [0.0f64; 8];
    let mut xs = x.chunks_exact(2);
    let mut es = e.chunks_exact(2);
    for (xc, ec) in (&mut xs).zip(&mut es) {
        acc[0] += xc[0].re * ec[0].re;
        acc[1] -= xc[0].im * ec[0].im;
        acc[2] += xc[0].re * ec[0].im;
        acc[3] += xc[0].im * ec[0].re;
        acc[4] += xc[1].re * ec[1].re;
        acc[5] -= xc[1].im * ec[1].im;
        acc[6] += xc[1].re * ec[1].im;
        acc[7] += xc[1].im * ec[1].re;
    }
    let mut total = Complex64::new(acc[0] + acc[1] + acc[4] + acc[5], acc[2] + acc[3] + acc[6] + acc[7]);
    for (a, b) in xs.remainder().iter().zip(es.remainder()) {
        total += a * b;
    }
    total
}

/// `y += (a + ib)·x` on interleaved complex data.
fn axpy(y: &mut [f64], x: &[f64], a: f64, b: f64) {
    for (yc, xc) in y.chunks_exact_mut(2).zip(x.chunks_exact(2)) {
        let (xr, xi) = (xc[0], xc[1]);
        yc[0] += a * xr - b * xi;
        yc[1] += a * xi + b * xr;
    }
}

/// Polynomial values on a tensor grid, row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridValues {
    pub sizes: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl GridValues {
    /// Multi-index of the flat position `idx`.
    pub fn index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for (o, &m) in out.iter_mut().zip(&self.sizes).rev() {
            *o = idx % m;
            idx /= m;
        }
        out
    }

    /// Torus coordinates of the node at flat position `idx`.
    pub fn node(&self, idx: usize) -> Vec<f64> {
        self.index(idx)
            .iter()
            .zip(&self.sizes)
            .map(|(&i, &m)| TAU * i as f64 / m as f64)
            .collect()
    }

    /// Largest modulus and its flat position (first one on ties).
    pub fn abs_max(&self) -> (usize, f64) {
        let (i, a) = self.values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                let a = v.norm_sqr();
                if a > best.1 {
                    (i, a)
                } else {
                    best
                }
            });
        (i, a.sqrt())
    }

    /// `mean |f|^q` over the nodes.
    pub fn mean_abs_pow(&self, q: f64) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm().powf(q)).sum();
        sum / self.values.len() as f64
    }
}
