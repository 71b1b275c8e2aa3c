//! Hamming metrics and the classical entropy measures.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Tolerance used when comparing floating-point probabilities.
pub const PROB_TOL: f64 = 1e-9;

pub fn hamming(x: &[bool], y: &[bool]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::param(format!("length mismatch {} vs {}", x.len(), y.len())));
    }
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count())
}

/// Fraction of differing positions. Empty strings are at distance 0.
pub fn relative_hamming(x: &[bool], y: &[bool]) -> Result<f64> {
    let d = hamming(x, y)?;
    if x.is_empty() {
        return Ok(0.0);
    }
    Ok(d as f64 / x.len() as f64)
}

pub fn binary_entropy(mu: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&mu) {
        return Err(Error::param(format!("μ={mu} outside [0, 1/2]")));
    }
    if mu == 0.0 {
        return Ok(0.0);
    }
    Ok(-(mu * mu.log2() + (1.0 - mu) * (1.0 - mu).log2()))
}

/// A finite probability distribution over ordered outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<K: Ord> {
    probs: BTreeMap<K, f64>,
}

impl<K: Ord + Clone> Distribution<K> {
    /// Zero-probability outcomes are dropped.
    pub fn new(probs: impl IntoIterator<Item = (K, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, p) in probs {
            if !(p >= 0.0) {
                return Err(Error::param(format!("negative or NaN probability {p}")));
            }
            if p > 0.0 {
                *map.entry(k).or_insert(0.0) += p;
            }
        }
        let total: f64 = map.values().sum();
        if map.is_empty() {
            return Err(Error::param("empty distribution"));
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::param(format!("probabilities sum to {total}")));
        }
        Ok(Distribution { probs: map })
    }

    /// Normalises non-negative weights.
    pub fn from_weights(weights: impl IntoIterator<Item = (K, f64)>) -> Result<Self> {
        let w: Vec<_> = weights.into_iter().collect();
        let total: f64 = w.iter().map(|(_, p)| *p).sum();
        if !(total > 0.0) {
            return Err(Error::param("weights must have positive total"));
        }
        Self::new(w.into_iter().map(|(k, p)| (k, p / total)))
    }

    pub fn uniform(outcomes: impl IntoIterator<Item = K>) -> Result<Self> {
        Self::from_weights(outcomes.into_iter().map(|k| (k, 1.0)))
    }

    pub fn prob(&self, k: &K) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.probs.iter().map(|(k, &p)| (k, p))
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.values().copied().fold(0.0, f64::max)
    }

    /// Push the distribution through `f`.
    pub fn map<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> J) -> Distribution<J> {
        let mut out = BTreeMap::new();
        for (k, &p) in &self.probs {
            *out.entry(f(k)).or_insert(0.0) += p;
        }
        Distribution { probs: out }
    }
}

/// H∞(X) = −log₂ max_x P(x).
pub fn min_entropy<K: Ord + Clone>(d: &Distribution<K>) -> f64 {
    -d.max_prob().log2()
}

/// log₂ of the support size.
pub fn max_entropy_support<K: Ord + Clone>(d: &Distribution<K>) -> f64 {
    (d.support_len() as f64).log2()
}

/// A concrete split variable K(x0, x1) for a joint distribution.
#[derive(Debug, Clone)]
pub struct SplitWitness {
    pub assignment: BTreeMap<(u64, u64), bool>,
    /// H∞(X_{1−K} K) achieved by `assignment`.
    pub achieved: f64,
    /// Whether the heavy-marginal rule sufficed without search.
    pub canonical: bool,
}

/// H∞ of the pair (X_{1−K}, K) under a deterministic assignment.
pub fn split_entropy(joint: &Distribution<(u64, u64)>, k: impl Fn(&(u64, u64)) -> bool) -> f64 {
    let d = joint.map(|xy| {
        let kk = k(xy);
        (if kk { xy.0 } else { xy.1 }, kk)
    });
    min_entropy(&d)
}

/// Search for K with H∞(X_{1−K} K) ≥ α/2.
///
/// First tries the rule K = 1 iff P_{X0}(x0) ≤ 2^{−α/2}; when that fails
/// (it should not whenever H∞(X0 X1) ≥ α) every assignment over a support
/// of at most 20 points is enumerated. `None` is a falsification.
pub fn min_entropy_split_witness(joint: &Distribution<(u64, u64)>, alpha: f64) -> Option<SplitWitness> {
    let target = alpha / 2.0;
    let threshold = (-target).exp2();
    let marginal = joint.map(|xy| xy.0);
    let canon: BTreeMap<_, _> =
        joint.iter().map(|(xy, _)| (*xy, marginal.prob(&xy.0) <= threshold + PROB_TOL)).collect();
    let achieved = split_entropy(joint, |xy| canon[xy]);
    if achieved >= target - PROB_TOL {
        return Some(SplitWitness { assignment: canon, achieved, canonical: true });
    }

    let points: Vec<(u64, u64)> = joint.iter().map(|(xy, _)| *xy).collect();
    if points.len() > 20 {
        return None;
    }
    for mask in 0u64..(1 << points.len()) {
        let assignment: BTreeMap<_, _> = points.iter().enumerate().map(|(i, xy)| (*xy, mask >> i & 1 == 1)).collect();
        let achieved = split_entropy(joint, |xy| assignment[xy]);
        if achieved >= target - PROB_TOL {
            return Some(SplitWitness { assignment, achieved, canonical: false });
        }
    }
    None
}

/// Σ_{k ≤ ⌊μn⌋} C(n, k) next to its upper bound 2^{h(μ)n}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallBound {
    pub bound: f64,
    pub exact: u128,
}

pub fn hamming_ball_bound(n: usize, mu: f64) -> Result<BallBound> {
    let h = binary_entropy(mu)?;
    let radius = (mu * n as f64 + PROB_TOL).floor() as usize;
    let mut exact = 0u128;
    let mut binom = 1u128;
    for k in 0..=radius.min(n) {
        exact += binom;
        binom = binom * (n - k) as u128 / (k + 1) as u128;
    }
    Ok(BallBound { bound: (h * n as f64).exp2(), exact })
}
