//! Sweeps of a point set against every subspace `T(R(s))`, `‖s‖₁ = n`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frequency::{enumerate_compositions, SubspaceIndex};
use crate::norms::{certified_sup, discrete_norm_of_values, norm_lq, Exponent, PointSupPlan, DEFAULT_DELTA};
use crate::pointsets::{require_domain, Domain, PointSet};
use crate::seed;
use crate::trigpoly::{random_poly, SampleKind, TrigPolynomial};

/// Parameters of [`sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: u32,
    pub q: Exponent,
    /// Gaussian samples per subspace.
    pub gaussian: usize,
    /// Translated Dirichlet kernels per subspace.
    pub spikes: usize,
    pub seed: u64,
    /// Accuracy of the certified sup norm.
    pub delta: f64,
    /// Restricts the sweep to these shapes instead of all compositions of `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspaces: Option<Vec<SubspaceIndex>>,
}

impl SweepConfig {
    pub fn new(n: u32, q: Exponent, gaussian: usize, spikes: usize, seed: u64) -> Self {
        Self {
            n,
            q,
            gaussian,
            spikes,
            seed,
            delta: DEFAULT_DELTA,
            subspaces: None,
        }
    }

    pub fn only(mut self, subspaces: Vec<SubspaceIndex>) -> Self {
        self.subspaces = Some(subspaces);
        self
    }
}

/// Which sample attained an extreme ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleWitness {
    pub kind: SampleKind,
    pub sample: usize,
    pub ratio: f64,
}

/// Extremes of the ratio over the samples of one subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceRecord {
    pub s: SubspaceIndex,
    /// Smallest ratio, taken against the upper end of the norm bracket.
    pub min_ratio: f64,
    /// Largest ratio, taken against the lower end of the norm bracket.
    pub max_ratio: f64,
    /// Smallest ratio against the lower end of the norm bracket.
    pub min_ratio_optimistic: f64,
    pub worst_low: SampleWitness,
    pub worst_high: SampleWitness,
}

/// Empirical universal-discretization constants of a point set.
///
/// For finite `q` the ratio is `(1/m)Σ|f(ξ)|^q / ‖f‖_q^q`; for `q = ∞` it is
/// `max|f(ξ)| / ‖f‖_∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalityReport {
    pub n: u32,
    pub d: usize,
    pub q: Exponent,
    pub m: usize,
    pub seed: u64,
    pub gaussian: usize,
    pub spikes: usize,
    pub delta: f64,
    pub c1_hat: f64,
    pub c2_hat: f64,
    pub subspaces: Vec<SubspaceRecord>,
}

impl UniversalityReport {
    pub fn samples(&self) -> usize {
        self.subspaces.len() * (self.gaussian + self.spikes)
    }

    /// One CSV row per subspace.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["s", "min_ratio", "max_ratio", "min_ratio_optimistic", "worst_kind", "worst_sample"])?;
        for r in &self.subspaces {
            out.write_record([
                r.s.to_string(),
                r.min_ratio.to_string(),
                r.max_ratio.to_string(),
                r.min_ratio_optimistic.to_string(),
                format!("{:?}", r.worst_low.kind).to_lowercase(),
                r.worst_low.sample.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Ratio against the upper and the lower end of the norm bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RatioBracket {
    pub low: f64,
    pub high: f64,
}

/// Ratio of the discrete to the continuous norm of `f` on `points`.
pub(crate) fn sample_ratio(
    f: &TrigPolynomial,
    points: &PointSet,
    q: Exponent,
    plan: Option<&PointSupPlan>,
    delta: f64,
) -> Result<RatioBracket> {
    match q {
        Exponent::Infinity => {
            let sup = certified_sup(f, delta)?;
            let top = match plan {
                Some(p) => p.max_abs(f, points, &sup)?.0,
                None => discrete_norm_of_values(&f.eval(points)?, q)?,
            };
            Ok(RatioBracket {
                low: top / sup.upper,
                high: top / sup.lower,
            })
        }
        Exponent::Finite(e) => {
            let values = f.eval(points)?;
            let mean = values.iter().map(|v| v.norm().powf(e)).sum::<f64>() / values.len() as f64;
            let norm = norm_lq(f, q)?;
            Ok(RatioBracket {
                low: mean / norm.upper().powf(e),
                high: mean / norm.lower().powf(e),
            })
        }
    }
}

pub(crate) fn shapes(n: u32, d: usize, only: Option<&[SubspaceIndex]>) -> Result<Vec<SubspaceIndex>> {
    match only {
        Some(list) => {
            if let Some(s) = list.iter().find(|s| s.dim() != d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: s.dim(),
                });
            }
            Ok(list.to_vec())
        }
        None => enumerate_compositions(n, d),
    }
}

/// Seed of sample `i` of `kind` on the `k`-th subspace.
pub(crate) fn sample_seed(base: u64, k: usize, kind: SampleKind, i: usize) -> u64 {
    let tag = match kind {
        SampleKind::Gaussian => 0,
        SampleKind::Spike => 1,
    };
    seed::derive(base, &[k as u64, tag, i as u64])
}

/// Measures the ratio for Gaussian and spike samples of every `T(R(s))`.
///
/// Samples run in parallel with seeds derived from `(seed, s, kind, index)`
/// and are reduced in a fixed order, so the report does not depend on the
/// number of worker threads.
pub fn sweep(points: &PointSet, cfg: &SweepConfig) -> Result<UniversalityReport> {
    require_domain(points, Domain::Torus)?;
    if points.is_empty() {
        return Err(invalid("sweep over an empty point set"));
    }
    if cfg.gaussian + cfg.spikes == 0 {
        return Err(invalid("a sweep needs at least one sample"));
    }
    let d = points.dim();
    let shapes = shapes(cfg.n, d, cfg.subspaces.as_deref())?;
    let boxes = shapes.iter().map(|s| s.to_box()).collect::<Result<Vec<_>>>()?;
    let plans: Vec<Option<PointSupPlan>> = if cfg.q.is_infinite() {
        boxes
            .par_iter()
            .map(|b| PointSupPlan::new(points, b.degrees(), cfg.delta).map(Some))
            .collect::<Result<_>>()?
    } else {
        vec![None; boxes.len()]
    };

    let jobs: Vec<(usize, SampleKind, usize)> = (0..shapes.len())
        .flat_map(|k| {
            (0..cfg.gaussian)
                .map(move |i| (k, SampleKind::Gaussian, i))
                .chain((0..cfg.spikes).map(move |i| (k, SampleKind::Spike, i)))
        })
        .collect();
    let ratios: Vec<RatioBracket> = jobs
        .par_iter()
        .map(|&(k, kind, i)| {
            let f = random_poly(&boxes[k], sample_seed(cfg.seed, k, kind, i), kind);
            sample_ratio(&f, points, cfg.q, plans[k].as_ref(), cfg.delta)
        })
        .collect::<Result<_>>()?;

    let per = cfg.gaussian + cfg.spikes;
    let subspaces: Vec<SubspaceRecord> = shapes
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            let chunk = &ratios[k * per..(k + 1) * per];
            let meta = &jobs[k * per..(k + 1) * per];
            let witness = |j: usize, ratio: f64| SampleWitness {
                kind: meta[j].1,
                sample: meta[j].2,
                ratio,
            };
            let (mut lo, mut hi, mut opt) = (0usize, 0usize, f64::INFINITY);
            for (j, r) in chunk.iter().enumerate() {
                if r.low < chunk[lo].low {
                    lo = j;
                }
                if r.high > chunk[hi].high {
                    hi = j;
                }
                opt = opt.min(r.high);
            }
            SubspaceRecord {
                s,
                min_ratio: chunk[lo].low,
                max_ratio: chunk[hi].high,
                min_ratio_optimistic: opt,
                worst_low: witness(lo, chunk[lo].low),
                worst_high: witness(hi, chunk[hi].high),
            }
        })
        .collect();
    let c1_hat = subspaces.iter().map(|r| r.min_ratio).fold(f64::INFINITY, f64::min);
    let c2_hat = subspaces.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    Ok(UniversalityReport {
        n: cfg.n,
        d,
        q: cfg.q,
        m: points.len(),
        seed: cfg.seed,
        gaussian: cfg.gaussian,
        spikes: cfg.spikes,
        delta: cfg.delta,
        c1_hat,
        c2_hat,
        subspaces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::FrequencyBox;
    use crate::pointsets::{random_points, sparse_grid, tensor_grid, universal_set, GridKind, UniversalConstructionParams};

    fn q(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn p_grid_is_exact_for_its_own_subspace() {
        for s in [vec![2u32, 1], vec![0, 3], vec![3]] {
            let s = SubspaceIndex::new(s);
            let grid = tensor_grid(&s.to_box().unwrap(), GridKind::P).unwrap();
            let cfg = SweepConfig::new(s.level(), q(2.0), 20, 5, 3).only(vec![s.clone()]);
            let r = sweep(grid.nodes(), &cfg).unwrap();
            assert!((r.c1_hat - 1.0).abs() < 1e-10 && (r.c2_hat - 1.0).abs() < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn universal_linf_set_keeps_half_the_sup() {
        let u = universal_set(&UniversalConstructionParams::linf(4, 2)).unwrap();
        let r = sweep(&u.points, &SweepConfig::new(4, Exponent::Infinity, 30, 10, 1)).unwrap();
        assert_eq!(r.subspaces.len(), 5);
        assert!(r.c1_hat >= 0.5, "{r:?}");
        assert!(r.c2_hat <= 1.0 / (1.0 - r.delta) + 1e-12);
        for s in &r.subspaces {
            assert!(s.min_ratio <= s.worst_low.ratio && s.worst_high.ratio <= s.max_ratio);
            assert!(s.min_ratio <= s.min_ratio_optimistic);
        }
    }

    #[test]
    fn sparse_grid_beats_each_member_grid() {
        // The union contains every P'(2^s) grid, so its sup ratio is at least
        // each member's on the same samples.
        let n = 3;
        let union = sweep(&sparse_grid(n, 2).unwrap(), &SweepConfig::new(n, Exponent::Infinity, 10, 5, 9)).unwrap();
        for (k, s) in enumerate_compositions(n, 2).unwrap().into_iter().enumerate() {
            let g = tensor_grid(&FrequencyBox::new(s.powers().unwrap()).unwrap(), GridKind::Pprime).unwrap();
            let member = sweep(g.nodes(), &SweepConfig::new(n, Exponent::Infinity, 10, 5, 9)).unwrap();
            assert!(union.subspaces[k].min_ratio >= member.subspaces[k].min_ratio - 1e-12);
        }
    }

    #[test]
    fn deterministic_and_scale_free() {
        let p = random_points(300, 2, 5).unwrap().scale_to_torus().unwrap();
        let cfg = SweepConfig::new(3, q(3.0), 4, 2, 11);
        let a = sweep(&p, &cfg).unwrap();
        let b = sweep(&p, &cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());

        let s = SubspaceIndex::new(vec![2, 1]);
        let f = random_poly(&s.to_box().unwrap(), 4, SampleKind::Gaussian);
        for qq in [q(1.0), q(2.0), q(4.0), Exponent::Infinity] {
            let r1 = sample_ratio(&f, &p, qq, None, 0.1).unwrap();
            let r2 = sample_ratio(&f.scaled(num_complex::Complex64::new(7.5, 0.0)), &p, qq, None, 0.1).unwrap();
            assert!((r1.low - r2.low).abs() <= 1e-12 * r1.low, "{qq}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let p = random_points(10, 2, 5).unwrap();
        assert!(sweep(&p, &SweepConfig::new(2, q(2.0), 1, 0, 0)).is_err());
        let t = p.scale_to_torus().unwrap();
        assert!(sweep(&t, &SweepConfig::new(2, q(2.0), 0, 0, 0)).is_err());
        let bad = SweepConfig::new(2, q(2.0), 1, 0, 0).only(vec![SubspaceIndex::new(vec![2])]);
        assert!(sweep(&t, &bad).is_err());
    }
}
