//! Degree distributions, type sequences and size-biasing.
//!
//! A [`TypeSequence`] counts vertices per degree class and is the object all
//! counting is indexed by. A [`DegreeDistribution`] is a finitely supported
//! probability vector on the positive integers.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Deserialize)]
struct RawDistribution {
    weights: BTreeMap<u32, f64>,
}

/// Probability weights on degrees `k >= 1` with finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct DegreeDistribution {
    weights: BTreeMap<u32, f64>,
}

impl TryFrom<RawDistribution> for DegreeDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        DegreeDistribution::new(raw.weights)
    }
}

impl DegreeDistribution {
    /// Validates weights: finite, nonnegative, no mass at degree 0, total mass 1.
    /// Zero weights are dropped from the support.
    pub fn new(weights: BTreeMap<u32, f64>) -> Result<Self> {
        let mut clean = BTreeMap::new();
        let mut total = 0.0;
        for (&k, &w) in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDistribution(format!("weight {w} at degree {k}")));
            }
            if w == 0.0 {
                continue;
            }
            if k == 0 {
                return Err(Error::ZeroDegree);
            }
            total += w;
            clean.insert(k, w);
        }
        if clean.is_empty() {
            return Err(Error::InvalidDistribution("no positive weight".into()));
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("total mass {total}")));
        }
        Ok(DegreeDistribution { weights: clean })
    }

    /// Rescales nonnegative weights to unit mass.
    pub fn normalized(weights: BTreeMap<u32, f64>) -> Result<Self> {
        let total: f64 = weights.values().filter(|w| w.is_finite()).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidDistribution("no positive weight".into()));
        }
        Self::new(weights.into_iter().map(|(k, w)| (k, w / total)).collect())
    }

    pub fn from_pairs(pairs: &[(u32, f64)]) -> Result<Self> {
        Self::new(pairs.iter().copied().collect())
    }

    pub fn weight(&self, k: u32) -> f64 {
        self.weights.get(&k).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &BTreeMap<u32, f64> {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.weights.iter().map(|(&k, &w)| (k, w))
    }

    pub fn max_degree(&self) -> u32 {
        *self.weights.keys().next_back().expect("support is nonempty")
    }

    /// Mean degree `sum k p_k`.
    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, w)| k as f64 * w).sum()
    }

    /// Weighted l1 distance `sum k |p_k - q_k|`.
    pub fn distance(&self, other: &DegreeDistribution) -> f64 {
        let mut keys: Vec<u32> = self.weights.keys().chain(other.weights.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|k| k as f64 * (self.weight(k) - other.weight(k)).abs())
            .sum()
    }

    /// Integer type sequence with `n_k = round(n p_k)`; an odd total degree is
    /// repaired by removing one vertex of degree 1 (or, lacking one, of the
    /// smallest odd degree present).
    pub fn integerize(&self, n: u64) -> TypeSequence {
        let counts: BTreeMap<u32, u64> = self
            .iter()
            .map(|(k, w)| (k, (w * n as f64).round() as u64))
            .collect();
        TypeSequence::with_parity_repair(counts)
    }
}

/// `q*_k = (k+1) q_{k+1} / mu_q`, the offspring law of a non-root vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeBiasedDistribution {
    weights: BTreeMap<u32, f64>,
    parent_mean: f64,
}

impl SizeBiasedDistribution {
    pub fn weight(&self, k: u32) -> f64 {
        self.weights.get(&k).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &BTreeMap<u32, f64> {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.weights.iter().map(|(&k, &w)| (k, w))
    }

    pub fn parent_mean(&self) -> f64 {
        self.parent_mean
    }

    /// Probability generating function at `s`.
    pub fn pgf(&self, s: f64) -> f64 {
        self.iter().map(|(k, w)| w * s.powi(k as i32)).sum()
    }
}

/// Size-biased law minus one. The mean of `p` is positive for every valid
/// distribution since the support lies in `k >= 1`.
pub fn size_biased(p: &DegreeDistribution) -> SizeBiasedDistribution {
    let mean = p.mean();
    let weights = p.iter().map(|(k, w)| (k - 1, k as f64 * w / mean)).collect();
    SizeBiasedDistribution { weights, parent_mean: mean }
}

#[derive(Deserialize)]
struct RawTypeSequence {
    counts: BTreeMap<u32, u64>,
}

/// Vertex counts per degree class, `n = (n_k)_{k >= 1}`, with even total degree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTypeSequence")]
pub struct TypeSequence {
    counts: BTreeMap<u32, u64>,
}

impl TryFrom<RawTypeSequence> for TypeSequence {
    type Error = Error;

    fn try_from(raw: RawTypeSequence) -> Result<Self> {
        TypeSequence::new(raw.counts)
    }
}

impl TypeSequence {
    pub fn new(counts: BTreeMap<u32, u64>) -> Result<Self> {
        let seq = Self::unchecked(counts)?;
        if seq.total_degree() % 2 != 0 {
            return Err(Error::OddTotalDegree { total: seq.total_degree() });
        }
        Ok(seq)
    }

    fn unchecked(counts: BTreeMap<u32, u64>) -> Result<Self> {
        let mut clean = BTreeMap::new();
        for (k, c) in counts {
            if c == 0 {
                continue;
            }
            if k == 0 {
                return Err(Error::ZeroDegree);
            }
            clean.insert(k, c);
        }
        Ok(TypeSequence { counts: clean })
    }

    pub fn from_pairs(pairs: &[(u32, u64)]) -> Result<Self> {
        Self::new(pairs.iter().copied().collect())
    }

    /// Builds a sequence from counts that may have odd total degree, fixing
    /// parity by removing one vertex of degree 1, or of the smallest odd
    /// degree present when there is no degree-1 vertex.
    pub fn with_parity_repair(counts: BTreeMap<u32, u64>) -> Self {
        let mut counts: BTreeMap<u32, u64> = counts.into_iter().filter(|&(k, c)| k > 0 && c > 0).collect();
        let total: u64 = counts.iter().map(|(&k, &c)| k as u64 * c).sum();
        if total % 2 == 1 {
            let k = *counts
                .iter()
                .find(|&(&k, _)| k % 2 == 1)
                .map(|(k, _)| k)
                .expect("odd total implies an odd degree class");
            let c = counts.get_mut(&k).unwrap();
            *c -= 1;
            if *c == 0 {
                counts.remove(&k);
            }
        }
        TypeSequence { counts }
    }

    pub fn empty() -> Self {
        TypeSequence::default()
    }

    pub fn count(&self, k: u32) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<u32, u64> {
        &self.counts
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    /// Number of vertices `n`.
    pub fn vertices(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Total degree `l = sum k n_k`.
    pub fn total_degree(&self) -> u64 {
        self.iter().map(|(k, c)| k as u64 * c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.counts.keys().next_back().copied()
    }

    /// Degree list in the canonical vertex order: ascending degree.
    pub fn degree_list(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.vertices() as usize);
        for (k, c) in self.iter() {
            out.extend(std::iter::repeat(k).take(c as usize));
        }
        out
    }

    /// Elementwise `self <= other`.
    pub fn is_bounded_by(&self, other: &TypeSequence) -> bool {
        self.iter().all(|(k, c)| c <= other.count(k))
    }

    /// `other - self`, defined when `self <= other`.
    pub fn complement_in(&self, other: &TypeSequence) -> Result<TypeSequence> {
        if !self.is_bounded_by(other) {
            return Err(Error::NotBounded);
        }
        let counts = other.iter().map(|(k, c)| (k, c - self.count(k))).collect();
        TypeSequence::new(counts)
    }

    /// `prod_k binom(other_k, self_k)`, the number of ways to place `self`
    /// inside the labelled vertex set of `other`.
    pub fn placements_in(&self, other: &TypeSequence) -> Result<BigUint> {
        if !self.is_bounded_by(other) {
            return Err(Error::NotBounded);
        }
        Ok(self
            .iter()
            .fold(BigUint::from(1u32), |acc, (k, c)| acc * binomial(other.count(k), c)))
    }

    /// `prod_k (k!)^{n_k}`: configurations per simple graph.
    pub fn stub_symmetry(&self) -> BigUint {
        self.iter().fold(BigUint::from(1u32), |acc, (k, c)| {
            acc * num_traits::pow::pow(factorial(k as u64), c as usize)
        })
    }

    /// Sum of two sequences.
    pub fn plus(&self, other: &TypeSequence) -> Result<TypeSequence> {
        let mut counts = self.counts.clone();
        for (k, c) in other.iter() {
            *counts.entry(k).or_insert(0) += c;
        }
        TypeSequence::new(counts)
    }
}

/// Collapses a degree list into its type sequence.
pub fn type_from_degrees(degrees: &[u32]) -> Result<TypeSequence> {
    let mut counts = BTreeMap::new();
    for &d in degrees {
        if d == 0 {
            return Err(Error::ZeroDegree);
        }
        *counts.entry(d).or_insert(0u64) += 1;
    }
    TypeSequence::new(counts)
}

/// Empirical law `n_k / n`.
pub fn empirical_distribution(t: &TypeSequence) -> Result<DegreeDistribution> {
    let n = t.vertices();
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    let weights = t.iter().map(|(k, c)| (k, c as f64 / n as f64)).collect();
    DegreeDistribution::normalized(weights)
}

pub(crate) fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::from(1u32), |acc, i| acc * i)
}

pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
