//! Head-to-head sweeps of point families and the margin search.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::norms::Exponent;
use crate::pointsets::{random_points, sparse_grid, universal_set, UniversalConstructionParams};
use crate::seed;

use super::sweep::{sweep, SweepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Net,
    SparseGrid,
    IidUniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub family: Family,
    pub m: usize,
    pub c1_hat: f64,
    pub c2_hat: f64,
}

/// Net parameters for exponent `q`: the sup-norm margin for `q = ∞`,
/// otherwise the `L_q` margin `a`.
pub fn net_params(n: u32, d: usize, q: Exponent, a: u32) -> UniversalConstructionParams {
    match q {
        Exponent::Infinity => UniversalConstructionParams::linf(n, d),
        Exponent::Finite(v) => UniversalConstructionParams::lq(n, d, v, a),
    }
}

/// Sweeps the universal net, the sparse grid `SG(n, d)` and as many i.i.d.
/// uniform points as the net has.
pub fn compare_constructions(n: u32, d: usize, q: Exponent, a: u32, cfg: &SweepConfig) -> Result<Vec<ComparisonRow>> {
    let net = universal_set(&net_params(n, d, q, a))?.points;
    let grid = sparse_grid(n, d)?;
    let iid = random_points(net.len(), d, seed::derive(cfg.seed, &[u64::from(n), d as u64]))?.scale_to_torus()?;
    let cfg = SweepConfig { n, q, ..cfg.clone() };
    [(Family::Net, net), (Family::SparseGrid, grid), (Family::IidUniform, iid)]
        .into_iter()
        .map(|(family, points)| {
            let r = sweep(&points, &cfg)?;
            Ok(ComparisonRow {
                family,
                m: points.len(),
                c1_hat: r.c1_hat,
                c2_hat: r.c2_hat,
            })
        })
        .collect()
}

/// Outcome of [`search_margin`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginSearch {
    /// Smallest margin reaching the target, if any.
    pub a: Option<u32>,
    /// `(a, C1_hat)` for every margin tried.
    pub tried: Vec<(u32, f64)>,
}

/// Smallest `L_q` margin `a ∈ [2, a_max]` whose universal set reaches
/// `C1_hat ≥ target` over the sweep.
pub fn search_margin(d: usize, target: f64, a_max: u32, cfg: &SweepConfig) -> Result<MarginSearch> {
    let Exponent::Finite(q) = cfg.q else {
        return Err(invalid("the margin search applies to finite q"));
    };
    let mut tried = Vec::new();
    for a in 2..=a_max {
        let u = universal_set(&UniversalConstructionParams::lq(cfg.n, d, q, a))?;
        let c1 = sweep(&u.points, cfg)?.c1_hat;
        tried.push((a, c1));
        if c1 >= target {
            return Ok(MarginSearch { a: Some(a), tried });
        }
    }
    Ok(MarginSearch { a: None, tried })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::sparse_grid_cardinality;

    #[test]
    fn three_rows_with_expected_sizes() {
        let cfg = SweepConfig::new(4, Exponent::Finite(2.0), 6, 2, 1);
        let rows = compare_constructions(4, 2, Exponent::Finite(2.0), 2, &cfg).unwrap();
        assert_eq!(rows.iter().map(|r| r.family).collect::<Vec<_>>(), [Family::Net, Family::SparseGrid, Family::IidUniform]);
        assert_eq!(rows[0].m, 1 << 8);
        assert_eq!(rows[1].m as u128, sparse_grid_cardinality(4, 2));
        assert_eq!(rows[2].m, rows[0].m);
        assert!(rows.iter().all(|r| 0.0 < r.c1_hat && r.c1_hat <= r.c2_hat));
    }

    #[test]
    fn margin_search_is_monotone_in_target() {
        let cfg = SweepConfig::new(3, Exponent::Finite(2.0), 8, 2, 3);
        let easy = search_margin(2, 0.1, 4, &cfg).unwrap();
        assert_eq!(easy.a, Some(2));
        let hard = search_margin(2, 2.0, 3, &cfg).unwrap();
        assert_eq!(hard.a, None);
        assert_eq!(hard.tried.len(), 2);
    }
}
