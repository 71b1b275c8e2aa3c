//! Estimators and pass/fail rules shared by the statistical checks.

use std::collections::BTreeMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub metric: String,
    pub estimate: f64,
    pub std_err: f64,
    pub bound: f64,
    pub verdict: Verdict,
}

impl StatReport {
    /// Passes iff `estimate ≤ bound + 3·std_err`; no slack when the
    /// standard error is zero.
    pub fn upper(metric: impl Into<String>, estimate: f64, std_err: f64, bound: f64) -> Self {
        let ok = if std_err == 0.0 { estimate <= bound } else { estimate <= bound + 3.0 * std_err };
        StatReport { metric: metric.into(), estimate, std_err, bound, verdict: Verdict::from_bool(ok) }
    }

    /// Passes iff `estimate ≥ bound − 3·std_err`.
    pub fn lower(metric: impl Into<String>, estimate: f64, std_err: f64, bound: f64) -> Self {
        let ok = if std_err == 0.0 { estimate >= bound } else { estimate >= bound - 3.0 * std_err };
        StatReport { metric: metric.into(), estimate, std_err, bound, verdict: Verdict::from_bool(ok) }
    }

    /// Exact comparison, no slack.
    pub fn exact(metric: impl Into<String>, estimate: f64, bound: f64, ok: bool) -> Self {
        StatReport { metric: metric.into(), estimate, std_err: 0.0, bound, verdict: Verdict::from_bool(ok) }
    }
}

/// Sample proportion with its binomial standard error.
pub fn proportion(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 0.0);
    }
    let p = hits as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

/// Mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Pearson goodness-of-fit against the uniform distribution on `bins`
/// outcomes. Returns `(statistic, p_value)`.
pub fn chi_square_uniform(counts: &[u64]) -> (f64, f64) {
    let total: u64 = counts.iter().sum();
    let k = counts.len();
    if k < 2 || total == 0 {
        return (0.0, 1.0);
    }
    let expect = total as f64 / k as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    let dist = ChiSquared::new((k - 1) as f64).expect("k ≥ 2");
    (stat, 1.0 - dist.cdf(stat))
}

/// Frequency table of hashable outcomes.
pub fn histogram<K: Ord + Clone, I: IntoIterator<Item = K>>(xs: I) -> BTreeMap<K, u64> {
    let mut h = BTreeMap::new();
    for x in xs {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}

/// Total variation distance between two empirical histograms.
pub fn tvd<K: Ord + Clone + Hash>(a: &BTreeMap<K, u64>, b: &BTreeMap<K, u64>) -> f64 {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    let keys: std::collections::BTreeSet<&K> = a.keys().chain(b.keys()).collect();
    keys.into_iter()
        .map(|k| {
            let pa = a.get(k).copied().unwrap_or(0) as f64 / na as f64;
            let pb = b.get(k).copied().unwrap_or(0) as f64 / nb as f64;
            (pa - pb).abs()
        })
        .sum::<f64>()
        / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_rules() {
        assert!(StatReport::upper("x", 0.11, 0.01, 0.1).verdict.passed());
        assert!(!StatReport::upper("x", 0.14, 0.01, 0.1).verdict.passed());
        assert!(StatReport::upper("x", 0.1, 0.0, 0.1).verdict.passed());
        assert!(!StatReport::upper("x", 0.100001, 0.0, 0.1).verdict.passed());
        assert!(StatReport::lower("x", 0.97, 0.01, 0.99).verdict.passed());
    }

    #[test]
    fn zero_variance_mean() {
        assert_eq!(mean_se(&[2.0, 2.0, 2.0]), (2.0, 0.0));
    }

    #[test]
    fn chi_square_flat_counts() {
        let (s, p) = chi_square_uniform(&[100, 100, 100, 100]);
        assert_eq!(s, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
        let (_, p) = chi_square_uniform(&[400, 0, 0, 0]);
        assert!(p < 1e-6);
    }

    #[test]
    fn tvd_extremes() {
        let a = histogram([1, 1, 2]);
        assert_eq!(tvd(&a, &a), 0.0);
        assert_eq!(tvd(&histogram([1]), &histogram([2])), 1.0);
    }
}
