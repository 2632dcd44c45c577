//! Search for empty boxes of prescribed side lengths.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::frequency::{enumerate_compositions, SubspaceIndex};
use crate::pointsets::{require_domain, Domain, PointSet};

use super::dispersion::GapSet;

/// An empty open box `(u, u + side)` found for the shape `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapedEmptyBox {
    pub s: SubspaceIndex,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

fn distinct_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn search_1d(xs: &[f64], side: f64) -> Option<f64> {
    let vals = distinct_sorted(xs.iter().copied().chain([0.0, 1.0]).collect());
    vals.windows(2).find(|w| w[1] - w[0] >= side).map(|w| w[0])
}

/// Slides the window `(u_0, u_0 + L_0)` over candidate left faces and keeps
/// the axis-1 gaps of the points inside it.
fn search_2d(pts: &[Vec<f64>], side: &[f64]) -> Option<Vec<f64>> {
    let mut by_x: Vec<&Vec<f64>> = pts.iter().collect();
    by_x.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let lefts = distinct_sorted(std::iter::once(0.0).chain(pts.iter().map(|p| p[0])).collect());
    let mut g = GapSet::new();
    let (mut lo, mut hi) = (0usize, 0usize);
    for u0 in lefts {
        if u0 + side[0] > 1.0 {
            break;
        }
        while hi < by_x.len() && by_x[hi][0] < u0 + side[0] {
            g.insert(by_x[hi][1]);
            hi += 1;
        }
        while lo < hi && by_x[lo][0] <= u0 {
            g.remove(by_x[lo][1]);
            lo += 1;
        }
        let (start, len) = g.widest();
        if len >= side[1] {
            return Some(vec![u0, start]);
        }
    }
    None
}

fn search(pts: &[Vec<f64>], side: &[f64]) -> Option<Vec<f64>> {
    let d = side.len();
    match d {
        1 => search_1d(&pts.iter().map(|p| p[0]).collect::<Vec<_>>(), side[0]).map(|u| vec![u]),
        2 => search_2d(pts, side),
        _ => {
            let last = d - 1;
            let bottoms = distinct_sorted(std::iter::once(0.0).chain(pts.iter().map(|p| p[last])).collect());
            for lo in bottoms {
                if lo + side[last] > 1.0 {
                    break;
                }
                let inside: Vec<Vec<f64>> = pts
                    .iter()
                    .filter(|p| p[last] > lo && p[last] < lo + side[last])
                    .map(|p| p[..last].to_vec())
                    .collect();
                if let Some(mut u) = search(&inside, &side[..last]) {
                    u.push(lo);
                    return Some(u);
                }
            }
            None
        }
    }
}

/// Lower corner of an empty open box with the given sides inside `[0,1]^d`.
pub fn find_empty_box(points: &PointSet, side: &[f64]) -> Result<Option<Vec<f64>>> {
    require_domain(points, Domain::UnitCube)?;
    if side.len() != points.dim() {
        return Err(crate::Error::DimensionMismatch {
            expected: points.dim(),
            found: side.len(),
        });
    }
    if side.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
        return Err(invalid("box sides must lie in (0, 1]"));
    }
    let pts: Vec<Vec<f64>> = (0..points.len()).map(|i| points.unit_point(i)).collect();
    Ok(search(&pts, side))
}

/// First `s` (lexicographic, `‖s‖₁ = n`, every `s_j ≥ a`) admitting an empty
/// box with sides `2^{a - s_j}`.
pub fn find_shaped_empty_box(points: &PointSet, n: u32, a: u32) -> Result<Option<ShapedEmptyBox>> {
    for s in enumerate_compositions(n, points.dim())? {
        if s.as_slice().iter().any(|&sj| sj < a) {
            continue;
        }
        let side: Vec<f64> = s.as_slice().iter().map(|&sj| (2.0f64).powi(a as i32 - sj as i32)).collect();
        if let Some(u) = find_empty_box(points, &side)? {
            let v = u.iter().zip(&side).map(|(a, b)| a + b).collect();
            return Ok(Some(ShapedEmptyBox { s, u, v }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::{default_generator_matrices, net_points, random_points, Coords};
    use proptest::prelude::*;

    fn brute(pts: &[Vec<f64>], side: &[f64]) -> bool {
        let d = side.len();
        let cands: Vec<Vec<f64>> = (0..d)
            .map(|j| distinct_sorted(std::iter::once(0.0).chain(pts.iter().map(|p| p[j])).collect()))
            .collect();
        let mut idx = vec![0usize; d];
        loop {
            let u: Vec<f64> = (0..d).map(|j| cands[j][idx[j]]).collect();
            if u.iter().zip(side).all(|(a, l)| a + l <= 1.0)
                && pts.iter().all(|p| !(0..d).all(|j| u[j] < p[j] && p[j] < u[j] + side[j]))
            {
                return true;
            }
            let mut k = 0;
            loop {
                if k == d {
                    return false;
                }
                idx[k] += 1;
                if idx[k] < cands[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn finds_planted_hole() {
        // Hammersley r = 8 minus every point in (1/4, 1/2) × (1/2, 3/4).
        let p = net_points(&default_generator_matrices(2, 8).unwrap()).unwrap();
        let holed = p.filter(|i| {
            let x = p.unit_point(i);
            !(x[0] >= 0.25 && x[0] < 0.5 && x[1] >= 0.5 && x[1] < 0.75)
        });
        let hit = find_shaped_empty_box(&holed, 6, 1).unwrap().expect("planted box");
        assert_eq!(hit.s.as_slice(), &[3, 3]);
        for i in 0..holed.len() {
            let x = holed.unit_point(i);
            assert!(!(0..2).all(|j| hit.u[j] < x[j] && x[j] < hit.v[j]));
        }
        assert!(find_shaped_empty_box(&p, 6, 1).unwrap().is_none());
    }

    #[test]
    fn nets_have_no_large_holes() {
        // Every open box of volume 2^{-10} contains a dyadic box of volume 2^{-12}.
        let p = net_points(&default_generator_matrices(2, 12).unwrap()).unwrap();
        assert!(find_shaped_empty_box(&p, 12, 1).unwrap().is_none());
        assert!(find_shaped_empty_box(&p, 14, 1).unwrap().is_some());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn agrees_with_brute_force(d in 1usize..4, m in 0usize..12, seed in any::<u64>(), sides in prop::collection::vec(1i32..3, 3)) {
            let p = random_points(m, d, seed).unwrap();
            let Coords::Exact { nums, .. } = p.coords() else { unreachable!() };
            let q = PointSet::from_dyadic(d, Domain::UnitCube, 3, nums.iter().map(|x| x >> 29).collect()).unwrap();
            let side: Vec<f64> = sides[..d].iter().map(|&e| (0.5f64).powi(e)).collect();
            let pts: Vec<Vec<f64>> = (0..q.len()).map(|i| q.unit_point(i)).collect();
            let found = find_empty_box(&q, &side).unwrap();
            prop_assert_eq!(found.is_some(), brute(&pts, &side));
            if let Some(u) = found {
                prop_assert!(pts.iter().all(|p| !(0..d).all(|j| u[j] < p[j] && p[j] < u[j] + side[j])));
                prop_assert!(u.iter().zip(&side).all(|(a, l)| a + l <= 1.0));
            }
        }
    }
}
