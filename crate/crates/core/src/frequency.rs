//! Frequency index sets: boxes `Π(N)`, dyadic rectangles `R(s)`, hyperbolic
//! crosses `Q_n` and the ordered list of compositions `‖s‖₁ = n`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Upper bound on the number of compositions we are willing to materialise.
const MAX_COMPOSITIONS: u64 = 1 << 24;

/// The frequency box `Π(N) = [-N_1, N_1] × … × [-N_d, N_d]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct FrequencyBox {
    degrees: Vec<u64>,
}

impl FrequencyBox {
    pub fn new(degrees: Vec<u64>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(invalid("frequency box needs at least one axis"));
        }
        let b = Self { degrees };
        b.checked_cardinality()?;
        b.checked_clamped_product()?;
        Ok(b)
    }

    /// The box `[-N, N]^d`.
    pub fn cube(degree: u64, d: usize) -> Result<Self> {
        Self::new(vec![degree; d])
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Per-axis degrees `N_j`.
    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// Number of frequencies on axis `j`, `2N_j + 1`.
    pub fn axis_len(&self, j: usize) -> usize {
        (2 * self.degrees[j] + 1) as usize
    }

    pub fn axis_lens(&self) -> Vec<usize> {
        (0..self.dim()).map(|j| self.axis_len(j)).collect()
    }

    fn checked_cardinality(&self) -> Result<u64> {
        self.degrees.iter().try_fold(1u64, |acc, &n| {
            n.checked_mul(2)
                .and_then(|x| x.checked_add(1))
                .and_then(|x| acc.checked_mul(x))
                .ok_or_else(|| Error::Overflow(format!("box {:?} is too large", self.degrees)))
        })
    }

    fn checked_clamped_product(&self) -> Result<u64> {
        self.degrees.iter().try_fold(1u64, |acc, &n| {
            acc.checked_mul(n.max(1))
                .ok_or_else(|| Error::Overflow(format!("box {:?} is too large", self.degrees)))
        })
    }

    /// Dimension of `T(Π(N))`: `Π (2N_j + 1)`. Always odd.
    pub fn cardinality(&self) -> u64 {
        self.checked_cardinality().expect("checked at construction")
    }

    /// `Π max(N_j, 1)`.
    pub fn clamped_product(&self) -> u64 {
        self.checked_clamped_product().expect("checked at construction")
    }

    /// The box with every degree multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        let degrees = self
            .degrees
            .iter()
            .map(|&n| {
                n.checked_mul(factor)
                    .ok_or_else(|| Error::Overflow("scaled box".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(degrees)
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        k.len() == self.dim()
            && k.iter()
                .zip(&self.degrees)
                .all(|(&kj, &n)| kj.unsigned_abs() <= n)
    }

    /// Row-major position of `k` (last axis fastest), if it lies in the box.
    pub fn position(&self, k: &[i64]) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        let mut pos = 0usize;
        for (j, &kj) in k.iter().enumerate() {
            pos = pos * self.axis_len(j) + (kj + self.degrees[j] as i64) as usize;
        }
        Some(pos)
    }

    /// All frequencies in row-major (lexicographic) order.
    pub fn frequencies(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::with_capacity(self.cardinality() as usize);
        let mut k: Vec<i64> = self.degrees.iter().map(|&n| -(n as i64)).collect();
        loop {
            out.push(k.clone());
            let mut j = self.dim();
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                if k[j] < self.degrees[j] as i64 {
                    k[j] += 1;
                    break;
                }
                k[j] = -(self.degrees[j] as i64);
            }
        }
    }
}

impl TryFrom<Vec<u64>> for FrequencyBox {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FrequencyBox> for Vec<u64> {
    fn from(b: FrequencyBox) -> Self {
        b.degrees
    }
}

/// A dyadic level vector `s ∈ Z₊^d`, naming the rectangle `R(s)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubspaceIndex(pub Vec<u32>);

impl SubspaceIndex {
    pub fn new(s: Vec<u32>) -> Self {
        Self(s)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `‖s‖₁`.
    pub fn level(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// `R(s)` as a box: `N_j = 2^{s_j} - 1`.
    pub fn to_box(&self) -> Result<FrequencyBox> {
        box_of_s(self)
    }

    /// The vector `2^s` (used for covering radii and the Fejér witness).
    pub fn powers(&self) -> Result<Vec<u64>> {
        self.0
            .iter()
            .map(|&sj| {
                1u64.checked_shl(sj)
                    .filter(|_| sj < 63)
                    .ok_or_else(|| Error::Overflow(format!("2^{sj}")))
            })
            .collect()
    }
}

impl std::fmt::Display for SubspaceIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `R(s) = Π(N)` with `N_j = 2^{s_j} - 1`.
pub fn box_of_s(s: &SubspaceIndex) -> Result<FrequencyBox> {
    if s.dim() == 0 {
        return Err(invalid("empty level vector"));
    }
    let degrees = s
        .powers()?
        .into_iter()
        .map(|p| p - 1)
        .collect::<Vec<_>>();
    FrequencyBox::new(degrees)
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Number of compositions `‖s‖₁ = n` with `s ∈ Z₊^d`.
pub fn composition_count(n: u32, d: usize) -> Option<u64> {
    if d == 0 {
        return None;
    }
    binomial(n as u64 + d as u64 - 1, d as u64 - 1)
}

/// All `s ∈ Z₊^d` with `‖s‖₁ = n`, in ascending lexicographic order.
pub fn enumerate_compositions(n: u32, d: usize) -> Result<Vec<SubspaceIndex>> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let count = composition_count(n, d)
        .filter(|&c| c <= MAX_COMPOSITIONS)
        .ok_or_else(|| Error::Overflow(format!("too many compositions for n={n}, d={d}")))?;
    let mut out = Vec::with_capacity(count as usize);
    let mut prefix = Vec::with_capacity(d);
    fn rec(rest: u32, left: usize, prefix: &mut Vec<u32>, out: &mut Vec<SubspaceIndex>) {
        if left == 1 {
            prefix.push(rest);
            out.push(SubspaceIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in 0..=rest {
            prefix.push(first);
            rec(rest - first, left - 1, prefix, out);
            prefix.pop();
        }
    }
    rec(n, d, &mut prefix, &mut out);
    debug_assert_eq!(out.len() as u64, count);
    Ok(out)
}

/// The hyperbolic cross `Q_n = ∪_{‖s‖₁=n} R(s)`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicCross {
    pub n: u32,
    pub d: usize,
    pub frequencies: Vec<Vec<i64>>,
}

impl HyperbolicCross {
    pub fn cardinality(&self) -> usize {
        self.frequencies.len()
    }

    /// Per-axis maximum `|k_j|`; the smallest box holding the cross.
    pub fn bounding_box(&self) -> Result<FrequencyBox> {
        let mut deg = vec![0u64; self.d];
        for k in &self.frequencies {
            for (dj, &kj) in deg.iter_mut().zip(k) {
                *dj = (*dj).max(kj.unsigned_abs());
            }
        }
        FrequencyBox::new(deg)
    }
}

/// Smallest `s` with `|k| < 2^s`.
fn bit_length(k: i64) -> u32 {
    64 - k.unsigned_abs().leading_zeros()
}

/// Builds `Q_n` directly: `k ∈ Q_n` iff `Σ_j bitlen(|k_j|) ≤ n`, since any
/// level vector dominating the per-axis bit lengths can be padded to sum `n`.
pub fn hyperbolic_cross(n: u32, d: usize) -> Result<HyperbolicCross> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if n >= 40 {
        return Err(Error::Overflow(format!("hyperbolic cross level {n} too large")));
    }
    let mut set = BTreeSet::new();
    let mut k = vec![0i64; d];
    fn rec(axis: usize, budget: u32, k: &mut Vec<i64>, set: &mut BTreeSet<Vec<i64>>) {
        if axis == k.len() {
            set.insert(k.clone());
            return;
        }
        // bit length 0 is k = 0; bit length b ≥ 1 covers 2^{b-1} ≤ |k| < 2^b
        k[axis] = 0;
        rec(axis + 1, budget, k, set);
        for b in 1..=budget {
            let lo = 1i64 << (b - 1);
            let hi = 1i64 << b;
            for mag in lo..hi {
                for sign in [-1, 1] {
                    k[axis] = sign * mag;
                    rec(axis + 1, budget - b, k, set);
                }
            }
        }
        k[axis] = 0;
    }
    rec(0, n, &mut k, &mut set);
    debug_assert!(set.iter().all(|k| k.iter().map(|&x| bit_length(x)).sum::<u32>() <= n));
    Ok(HyperbolicCross {
        n,
        d,
        frequencies: set.into_iter().collect(),
    })
}

/// JSON form of a frequency set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FrequencySet {
    Box {
        #[serde(rename = "N")]
        degrees: Vec<u64>,
    },
    Cross {
        n: u32,
        d: usize,
        freqs: Vec<Vec<i64>>,
    },
}

impl From<&FrequencyBox> for FrequencySet {
    fn from(b: &FrequencyBox) -> Self {
        FrequencySet::Box {
            degrees: b.degrees.clone(),
        }
    }
}

impl From<&HyperbolicCross> for FrequencySet {
    fn from(c: &HyperbolicCross) -> Self {
        FrequencySet::Cross {
            n: c.n,
            d: c.d,
            freqs: c.frequencies.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(v: &[u32]) -> SubspaceIndex {
        SubspaceIndex(v.to_vec())
    }

    #[test]
    fn box_of_s_examples() {
        let b = box_of_s(&s(&[0, 0])).unwrap();
        assert_eq!(b.degrees(), &[0, 0]);
        assert_eq!(b.cardinality(), 1);

        let b = box_of_s(&s(&[1, 2])).unwrap();
        assert_eq!(b.degrees(), &[1, 3]);
        assert_eq!(b.cardinality(), 21);

        let b = box_of_s(&s(&[3, 0, 1])).unwrap();
        assert_eq!(b.degrees(), &[7, 0, 1]);
        assert_eq!(b.cardinality(), 45);
    }

    #[test]
    fn box_of_s_rejects_overflow() {
        assert!(matches!(box_of_s(&s(&[63])), Err(Error::Overflow(_))));
        assert!(matches!(box_of_s(&s(&[40, 40])), Err(Error::Overflow(_))));
    }

    #[test]
    fn clamped_product_and_cardinality() {
        let b = FrequencyBox::new(vec![0, 3, 2]).unwrap();
        assert_eq!(b.clamped_product(), 6);
        assert_eq!(b.cardinality(), 35);
        assert_eq!(b.scaled(4).unwrap().clamped_product(), 96);
    }

    #[test]
    fn compositions_examples() {
        assert_eq!(
            enumerate_compositions(2, 2).unwrap(),
            vec![s(&[0, 2]), s(&[1, 1]), s(&[2, 0])]
        );
        assert_eq!(enumerate_compositions(0, 3).unwrap(), vec![s(&[0, 0, 0])]);
        assert_eq!(enumerate_compositions(4, 3).unwrap().len(), 15);
        assert!(enumerate_compositions(3, 0).is_err());
    }

    #[test]
    fn cross_examples() {
        let q = hyperbolic_cross(0, 2).unwrap();
        assert_eq!(q.frequencies, vec![vec![0, 0]]);
        let q = hyperbolic_cross(1, 2).unwrap();
        assert_eq!(
            q.frequencies,
            vec![vec![-1, 0], vec![0, -1], vec![0, 0], vec![0, 1], vec![1, 0]]
        );
    }

    fn brute_union(n: u32, d: usize) -> BTreeSet<Vec<i64>> {
        let mut set = BTreeSet::new();
        for s in enumerate_compositions(n, d).unwrap() {
            for k in s.to_box().unwrap().frequencies() {
                set.insert(k);
            }
        }
        set
    }

    #[test]
    fn cross_matches_union_of_rectangles() {
        for d in 1..=3 {
            for n in 0..=6 {
                let q = hyperbolic_cross(n, d).unwrap();
                let brute: Vec<_> = brute_union(n, d).into_iter().collect();
                assert_eq!(q.frequencies, brute, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn cross_cardinality_grows_like_2n_n() {
        let ratios: Vec<f64> = (6..=12)
            .map(|n| hyperbolic_cross(n, 2).unwrap().cardinality() as f64 / ((1u64 << n) as f64 * n as f64))
            .collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(lo > 0.5 && hi / lo < 3.0, "{ratios:?}");
    }

    #[test]
    fn box_frequencies_are_row_major() {
        let b = FrequencyBox::new(vec![1, 2]).unwrap();
        let f = b.frequencies();
        assert_eq!(f.len(), 15);
        for (i, k) in f.iter().enumerate() {
            assert_eq!(b.position(k), Some(i));
        }
        assert_eq!(b.position(&[2, 0]), None);
    }

    #[test]
    fn json_forms() {
        let b = FrequencyBox::new(vec![1, 3]).unwrap();
        let j = serde_json::to_string(&FrequencySet::from(&b)).unwrap();
        assert_eq!(j, r#"{"kind":"box","N":[1,3]}"#);
        let q = hyperbolic_cross(1, 2).unwrap();
        let j = serde_json::to_value(FrequencySet::from(&q)).unwrap();
        assert_eq!(j["kind"], "cross");
        assert_eq!(j["freqs"].as_array().unwrap().len(), 5);
        let back: FrequencyBox = serde_json::from_str("[1,3]").unwrap();
        assert_eq!(back, b);
    }

    proptest! {
        #[test]
        fn composition_count_matches_binomial(n in 0u32..9, d in 1usize..5) {
            let comps = enumerate_compositions(n, d).unwrap();
            prop_assert_eq!(comps.len() as u64, composition_count(n, d).unwrap());
            prop_assert!(comps.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(comps.iter().all(|s| s.level() == n && s.dim() == d));
        }

        #[test]
        fn rectangles_lie_in_cross(n in 0u32..6, d in 1usize..4) {
            let q: BTreeSet<_> = hyperbolic_cross(n, d).unwrap().frequencies.into_iter().collect();
            for s in enumerate_compositions(n, d).unwrap() {
                for k in s.to_box().unwrap().frequencies() {
                    prop_assert!(q.contains(&k));
                }
            }
        }

        #[test]
        fn box_invariants(deg in proptest::collection::vec(0u64..20, 1..4)) {
            let b = FrequencyBox::new(deg).unwrap();
            prop_assert!(b.cardinality() % 2 == 1);
            prop_assert!(b.clamped_product() <= b.cardinality());
        }
    }
}
