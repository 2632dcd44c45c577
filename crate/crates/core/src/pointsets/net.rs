//! Digital `(t, r, d)`-nets over GF(2) and exact verification of their quality.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frequency::enumerate_compositions;

use super::{Coords, Domain, PointSet};

pub const MAX_NET_DIM: usize = 8;
pub const MAX_NET_EXPONENT: u32 = 20;

/// Sobol primitive-polynomial data `(degree, inner coefficients, initial m)`
/// for Sobol dimensions 2 to 8 (new-joe-kuo-6 parameters).
const SOBOL: [(u32, u32, &[u32]); 7] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
];

/// `d` generator matrices of size `r × r`, stored as columns.
///
/// The axis-`j` numerator of point `i` is the XOR of `columns[j][k]` over
/// the set bits `k` of `i`; bit `r-1` of a column is the most significant
/// output digit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitalNet {
    pub d: usize,
    pub r: u32,
    pub columns: Vec<Vec<u32>>,
    /// Quality parameter if known a priori.
    pub declared_t: Option<u32>,
}

fn identity(r: u32) -> Vec<u32> {
    (0..r).map(|k| 1 << k).collect()
}

fn reversal(r: u32) -> Vec<u32> {
    (0..r).map(|k| 1 << (r - 1 - k)).collect()
}

/// Columns of Sobol dimension `dim ≥ 2`.
fn sobol(dim: usize, r: u32) -> Vec<u32> {
    let (s, a, init) = SOBOL[dim - 2];
    let s = s as usize;
    let mut m: Vec<u32> = init.to_vec();
    while m.len() < r as usize {
        let k = m.len();
        let mut next = m[k - s] ^ (m[k - s] << s);
        for i in 1..s {
            if (a >> (s - 1 - i)) & 1 == 1 {
                next ^= m[k - i] << i;
            }
        }
        m.push(next);
    }
    (0..r as usize).map(|k| m[k] << (r as usize - 1 - k)).collect()
}

/// Built-in nets: identity for `d = 1`, Hammersley for `d = 2`, and for
/// `d ≥ 3` the Hammersley construction on top of Sobol dimensions `1..d`.
pub fn default_generator_matrices(d: usize, r: u32) -> Result<DigitalNet> {
    if d == 0 || d > MAX_NET_DIM {
        return Err(Error::OutOfRange(format!("net dimension {d} not in 1..={MAX_NET_DIM}")));
    }
    if r > MAX_NET_EXPONENT {
        return Err(Error::OutOfRange(format!("net exponent r = {r} exceeds {MAX_NET_EXPONENT}")));
    }
    let mut columns = vec![identity(r)];
    if d >= 2 {
        columns.push(reversal(r));
    }
    for dim in 2..d {
        columns.push(sobol(dim, r));
    }
    Ok(DigitalNet {
        d,
        r,
        columns,
        declared_t: (d <= 2).then_some(0),
    })
}

impl DigitalNet {
    fn numerator(&self, j: usize, i: u32) -> u32 {
        let mut bits = i;
        let mut acc = 0;
        while bits != 0 {
            let k = bits.trailing_zeros();
            acc ^= self.columns[j][k as usize];
            bits &= bits - 1;
        }
        acc
    }
}

/// The `2^r` points of the net in `[0,1)^d`.
pub fn net_points(net: &DigitalNet) -> Result<PointSet> {
    if net.columns.len() != net.d || net.columns.iter().any(|c| c.len() != net.r as usize) {
        return Err(invalid("generator matrices do not match (d, r)"));
    }
    if net.r > MAX_NET_EXPONENT {
        return Err(Error::OutOfRange(format!("net exponent r = {} exceeds {MAX_NET_EXPONENT}", net.r)));
    }
    if net.columns.iter().flatten().any(|&c| c >> net.r != 0) {
        return Err(invalid("generator column wider than r bits"));
    }
    let m = 1u32 << net.r;
    let nums: Vec<u64> = (0..m)
        .flat_map(|i| (0..net.d).map(move |j| net.numerator(j, i) as u64))
        .collect();
    let points = PointSet::from_dyadic(net.d, Domain::UnitCube, net.r, nums)?;
    let distinct = points.distinct_count();
    if distinct != m as usize {
        return Err(Error::DegenerateNet(format!(
            "{} distinct points out of {m}",
            distinct
        )));
    }
    Ok(points)
}

/// Outcome of an exhaustive dyadic-box check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NetCheck {
    Pass,
    /// The first box (in lexicographic order of `s`, then of `a`) with the wrong count.
    /// It is `Π_j [a_j 2^{-s_j}, (a_j + 1) 2^{-s_j})`.
    Fail {
        s: Vec<u32>,
        a: Vec<u64>,
        count: u64,
        expected: u64,
    },
}

impl NetCheck {
    pub fn passed(&self) -> bool {
        matches!(self, NetCheck::Pass)
    }
}

fn exact_dyadic(points: &PointSet) -> Result<(u32, &[u64])> {
    let r = points
        .dyadic_exponent()
        .ok_or_else(|| Error::NotDyadic("coordinates must share one power-of-two denominator".into()))?;
    let Coords::Exact { nums, .. } = points.coords() else {
        unreachable!("dyadic sets are exact")
    };
    if points.len() as u64 != 1u64 << r.min(63) || r > 40 {
        return Err(invalid(format!(
            "expected 2^{r} points for a net of exponent {r}, found {}",
            points.len()
        )));
    }
    Ok((r, nums))
}

/// Checks that every dyadic box of volume `2^{t-r}` holds exactly `2^t` points.
pub fn verify_net(points: &PointSet, t: u32) -> Result<NetCheck> {
    let (r, nums) = exact_dyadic(points)?;
    if t > r {
        return Err(invalid(format!("t = {t} exceeds r = {r}")));
    }
    let d = points.dim();
    let expected = 1u64 << t;
    let shapes = enumerate_compositions(r - t, d)?;
    let fail = shapes.par_iter().find_map_first(|s| {
        let mut counts = vec![0u64; 1usize << (r - t)];
        for p in nums.chunks_exact(d) {
            let mut key = 0usize;
            for (&x, &sj) in p.iter().zip(&s.0) {
                key = (key << sj) | (x >> (r - sj)) as usize;
            }
            counts[key] += 1;
        }
        counts.iter().position(|&c| c != expected).map(|key| {
            let mut a = vec![0u64; d];
            let mut rest = key;
            for j in (0..d).rev() {
                a[j] = (rest & ((1usize << s.0[j]) - 1)) as u64;
                rest >>= s.0[j];
            }
            NetCheck::Fail {
                s: s.0.clone(),
                a,
                count: counts[key],
                expected,
            }
        })
    });
    Ok(fail.unwrap_or(NetCheck::Pass))
}

/// Smallest `t` for which [`verify_net`] passes (always at most `r`).
pub fn minimal_t(points: &PointSet) -> Result<u32> {
    let (r, _) = exact_dyadic(points)?;
    for t in 0..=r {
        if verify_net(points, t)?.passed() {
            return Ok(t);
        }
    }
    unreachable!("t = r is a single box holding every point")
}
