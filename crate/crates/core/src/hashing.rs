//! Universal hash families and privacy amplification.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldmath::Distribution;
use crate::rng::Rng;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HashKind {
    /// `x ↦ Mx`, two-universal.
    Matrix,
    /// `x ↦ Mx ⊕ c`, strongly two-universal.
    Affine,
}

/// A member of the matrix or affine family over GF(2).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHashFunc")]
pub struct HashFunc {
    pub kind: HashKind,
    pub n: usize,
    pub ell: usize,
    /// Row-major, each row packed into 64-bit words, LSB first.
    rows: Vec<Vec<u64>>,
    offset: Vec<bool>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

#[derive(Deserialize)]
struct RawHashFunc {
    kind: HashKind,
    n: usize,
    ell: usize,
    rows: Vec<Vec<u64>>,
    offset: Vec<bool>,
}

impl TryFrom<RawHashFunc> for HashFunc {
    type Error = String;

    fn try_from(r: RawHashFunc) -> std::result::Result<Self, String> {
        let w = words(r.n);
        let spare = if r.n.is_multiple_of(64) { 0 } else { u64::MAX << (r.n % 64) };
        if r.ell == 0 || r.rows.len() != r.ell || r.offset.len() != r.ell {
            return Err("hash function with inconsistent ℓ".into());
        }
        if r.rows.iter().any(|row| row.len() != w || row[w - 1] & spare != 0) {
            return Err("hash function rows do not match n".into());
        }
        if r.kind == HashKind::Matrix && r.offset.iter().any(|&b| b) {
            return Err("matrix hash with an offset".into());
        }
        Ok(HashFunc { kind: r.kind, n: r.n, ell: r.ell, rows: r.rows, offset: r.offset })
    }
}

impl HashFunc {
    /// Build from explicit rows of bits; `offset` must be empty for the
    /// matrix kind.
    pub fn from_rows(rows: &[Vec<bool>], offset: Option<Vec<bool>>) -> Result<Self> {
        let ell = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if ell == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::param("ragged or empty hash matrix"));
        }
        let packed = rows
            .iter()
            .map(|r| {
                let mut w = vec![0u64; words(n)];
                for (i, &b) in r.iter().enumerate() {
                    w[i / 64] |= u64::from(b) << (i % 64);
                }
                w
            })
            .collect();
        let (kind, offset) = match offset {
            Some(o) if o.len() == ell => (HashKind::Affine, o),
            Some(_) => return Err(Error::param("offset length must equal ℓ")),
            None => (HashKind::Matrix, vec![false; ell]),
        };
        Ok(HashFunc { kind, n, ell, rows: packed, offset })
    }

    pub fn row(&self, i: usize) -> Vec<bool> {
        (0..self.n).map(|j| self.rows[i][j / 64] >> (j % 64) & 1 == 1).collect()
    }

    pub fn offset(&self) -> &[bool] {
        &self.offset
    }
}

pub fn sample_hash(n: usize, ell: usize, strong: bool, rng: &mut Rng) -> Result<HashFunc> {
    if ell == 0 || ell > n {
        return Err(Error::param(format!("need 1 ≤ ℓ ≤ n, got ℓ={ell}, n={n}")));
    }
    let mask_last = if n.is_multiple_of(64) { u64::MAX } else { (1u64 << (n % 64)) - 1 };
    let rows = (0..ell)
        .map(|_| {
            let mut w: Vec<u64> = (0..words(n)).map(|_| rng.random()).collect();
            *w.last_mut().expect("non-empty") &= mask_last;
            w
        })
        .collect();
    let (kind, offset) = if strong {
        (HashKind::Affine, (0..ell).map(|_| rng.random()).collect())
    } else {
        (HashKind::Matrix, vec![false; ell])
    };
    Ok(HashFunc { kind, n, ell, rows, offset })
}

/// `Mx ⊕ c` with `x` zero-padded to `n` bits.
pub fn apply_hash(f: &HashFunc, x: &[bool]) -> Result<Vec<bool>> {
    if x.len() > f.n {
        return Err(Error::param(format!("input of {} bits exceeds n={}", x.len(), f.n)));
    }
    let mut xw = vec![0u64; words(f.n)];
    for (i, &b) in x.iter().enumerate() {
        xw[i / 64] |= u64::from(b) << (i % 64);
    }
    Ok(f.rows
        .iter()
        .zip(&f.offset)
        .map(|(row, &c)| {
            let ones: u32 = row.iter().zip(&xw).map(|(a, b)| (a & b).count_ones()).sum();
            (ones & 1 == 1) ^ c
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaBoundInput {
    pub hmin_x_given_u: f64,
    pub h0_e: f64,
    pub ell: f64,
}

/// `½·2^{−(H∞(X|U) − H₀(E) − ℓ)/2}`.
pub fn pa_bound(inp: PaBoundInput) -> f64 {
    0.5 * (-(inp.hmin_x_given_u - inp.h0_e - inp.ell) / 2.0).exp2()
}

/// Total variation distance between the empirical distributions of two
/// sample multisets.
pub fn empirical_tvd(a: &[Vec<bool>], b: &[Vec<bool>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::param("empty sample set"));
    }
    Ok(stats::tvd(&stats::histogram(a.iter().cloned()), &stats::histogram(b.iter().cloned())))
}

/// Average-case conditional min-entropy `−log Σ_u max_x P(x, u)` where
/// `u` is `x` restricted to `leak`.
pub fn conditional_min_entropy(dist: &Distribution<u64>, leak: &[usize]) -> f64 {
    let mut best: BTreeMap<u64, f64> = BTreeMap::new();
    for (&x, p) in dist.iter() {
        let e = best.entry(project(x, leak)).or_insert(0.0);
        *e = e.max(p);
    }
    -best.values().sum::<f64>().log2()
}

fn project(x: u64, idx: &[usize]) -> u64 {
    idx.iter().enumerate().fold(0, |acc, (j, &i)| acc | ((x >> i & 1) << j))
}

fn to_bits(x: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| x >> i & 1 == 1).collect()
}

/// Exact `E_u δ(P_{f(X)|U=u}, uniform)` for one fixed hash function.
pub fn conditional_distance(dist: &Distribution<u64>, n: usize, leak: &[usize], f: &HashFunc) -> f64 {
    let mut joint: BTreeMap<(u64, Vec<bool>), f64> = BTreeMap::new();
    let mut marg: BTreeMap<u64, f64> = BTreeMap::new();
    for (&x, p) in dist.iter() {
        let u = project(x, leak);
        let z = apply_hash(f, &to_bits(x, n)).expect("n bits fit");
        *joint.entry((u, z)).or_insert(0.0) += p;
        *marg.entry(u).or_insert(0.0) += p;
    }
    let cells = (f.ell as f64).exp2();
    let uniform = 1.0 / cells;
    let mut total = 0.0;
    for (&u, &pu) in &marg {
        let mut seen = 0.0;
        let mut dev = 0.0;
        for ((_, _), &p) in joint.range((u, Vec::new())..).take_while(|((uu, _), _)| *uu == u) {
            dev += (p - pu * uniform).abs();
            seen += 1.0;
        }
        // outputs never hit contribute P(u)·2^{-ℓ} each
        dev += (cells - seen) * pu * uniform;
        total += dev;
    }
    total / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaOutcome {
    pub empirical: f64,
    pub std_err: f64,
    pub bound: f64,
    pub hmin: f64,
}

/// Monte-Carlo over the hash choice with exact enumeration of `X` for
/// every sampled function.
pub fn pa_experiment(
    dist: &Distribution<u64>,
    n: usize,
    leak: &[usize],
    ell: usize,
    trials: usize,
    rng: &mut Rng,
) -> Result<PaOutcome> {
    if n > 16 || dist.support_len() > 1 << 16 {
        return Err(Error::param("support too large for exact enumeration"));
    }
    if dist.iter().any(|(&x, _)| n < 64 && x >> n != 0) {
        return Err(Error::param("outcome wider than n bits"));
    }
    if leak.iter().any(|&i| i >= n) || trials == 0 {
        return Err(Error::param("leak position out of range or zero trials"));
    }
    let hmin = conditional_min_entropy(dist, leak);
    let bound = pa_bound(PaBoundInput { hmin_x_given_u: hmin, h0_e: 0.0, ell: ell as f64 });
    let samples: Vec<f64> = (0..trials)
        .map(|_| {
            let f = sample_hash(n, ell, false, rng)?;
            Ok(conditional_distance(dist, n, leak, &f))
        })
        .collect::<Result<_>>()?;
    let (empirical, std_err) = stats::mean_se(&samples);
    Ok(PaOutcome { empirical, std_err, bound, hmin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::from_u64;
    use crate::rng::seeded;

    #[test]
    fn decoding_checks_shape() {
        let f = sample_hash(70, 3, true, &mut seeded(4)).unwrap();
        let mut bytes = bincode::serialize(&f).unwrap();
        assert_eq!(bincode::deserialize::<HashFunc>(&bytes).unwrap(), f);
        // n is the u64 after the 4-byte kind tag
        bytes[4..12].copy_from_slice(&(1u64 << 60).to_le_bytes());
        assert!(bincode::deserialize::<HashFunc>(&bytes).is_err());
        bytes[4..12].copy_from_slice(&65u64.to_le_bytes());
        assert!(bincode::deserialize::<HashFunc>(&bytes).is_err());
    }

    fn all_matrices(n: usize, ell: usize) -> impl Iterator<Item = Vec<Vec<bool>>> {
        (0u64..1 << (n * ell)).map(move |m| (0..ell).map(|r| from_u64(m >> (r * n), n)).collect())
    }

    #[test]
    fn rejects_bad_lengths() {
        let mut rng = seeded(0);
        assert!(sample_hash(4, 5, false, &mut rng).is_err());
        let f = sample_hash(4, 2, false, &mut rng).unwrap();
        assert!(apply_hash(&f, &[false; 5]).is_err());
    }

    #[test]
    fn zero_maps_to_zero() {
        let mut rng = seeded(1);
        let f = sample_hash(20, 7, false, &mut rng).unwrap();
        assert_eq!(apply_hash(&f, &[false; 20]).unwrap(), vec![false; 7]);
    }

    #[test]
    fn identity_matrix() {
        let n = 6;
        let rows: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        let f = HashFunc::from_rows(&rows, None).unwrap();
        let x = vec![true, false, true, true, false, true];
        assert_eq!(apply_hash(&f, &x).unwrap(), x);
    }

    #[test]
    fn matches_reference_matvec() {
        let mut rng = seeded(2);
        for _ in 0..200 {
            let n = rng.random_range(1..150);
            let ell = rng.random_range(1..=n.min(20));
            let f = sample_hash(n, ell, true, &mut rng).unwrap();
            let x: Vec<bool> = (0..rng.random_range(0..=n)).map(|_| rng.random()).collect();
            let expect: Vec<bool> = (0..ell)
                .map(|i| {
                    let row = f.row(i);
                    x.iter().zip(&row).filter(|(a, b)| **a && **b).count() % 2 == 1
                })
                .zip(f.offset())
                .map(|(a, &c)| a ^ c)
                .collect();
            assert_eq!(apply_hash(&f, &x).unwrap(), expect);
        }
    }

    #[test]
    fn matrix_family_collision_is_exactly_two_to_minus_ell() {
        let (n, ell) = (4, 2);
        let fs: Vec<HashFunc> = all_matrices(n, ell).map(|rows| HashFunc::from_rows(&rows, None).unwrap()).collect();
        assert_eq!(fs.len(), 256);
        for x in 0..16u64 {
            for y in 0..16u64 {
                if x == y {
                    continue;
                }
                let hits = fs
                    .iter()
                    .filter(|f| apply_hash(f, &from_u64(x, n)).unwrap() == apply_hash(f, &from_u64(y, n)).unwrap())
                    .count();
                assert_eq!(hits * 4, fs.len());
            }
        }
    }

    #[test]
    fn affine_family_is_pairwise_uniform() {
        let (n, ell) = (4, 2);
        let mut fs = Vec::new();
        for rows in all_matrices(n, ell) {
            for c in 0..4u64 {
                fs.push(HashFunc::from_rows(&rows, Some(from_u64(c, ell))).unwrap());
            }
        }
        for (x, y) in [(0u64, 1u64), (3, 12), (5, 10), (7, 15)] {
            let mut counts = BTreeMap::new();
            for f in &fs {
                let key = (apply_hash(f, &from_u64(x, n)).unwrap(), apply_hash(f, &from_u64(y, n)).unwrap());
                *counts.entry(key).or_insert(0usize) += 1;
            }
            assert_eq!(counts.len(), 16);
            assert!(counts.values().all(|&c| c == fs.len() / 16));
        }
    }

    #[test]
    fn pa_bound_arithmetic() {
        let b = |h, z, l| pa_bound(PaBoundInput { hmin_x_given_u: h, h0_e: z, ell: l });
        assert_eq!(b(10.0, 2.0, 4.0), 0.125);
        assert_eq!(b(6.0, 2.0, 4.0), 0.5);
        assert_eq!(b(20.0, 0.0, 10.0), 1.0 / 64.0);
    }

    #[test]
    fn tvd_examples() {
        let a = vec![vec![true], vec![false]];
        assert_eq!(empirical_tvd(&a, &a).unwrap(), 0.0);
        assert_eq!(empirical_tvd(&[vec![true]], &[vec![false]]).unwrap(), 1.0);
        // P = (4,3,2,1)/10, Q = (1,2,3,4)/10 → ½(0.3+0.1+0.1+0.3) = 0.4
        let mk = |w: [usize; 4]| -> Vec<Vec<bool>> {
            w.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(from_u64(i as u64, 2), c)).collect()
        };
        let d = empirical_tvd(&mk([4, 3, 2, 1]), &mk([1, 2, 3, 4])).unwrap();
        assert!((d - 0.4).abs() < 1e-12);
        assert!(empirical_tvd(&[], &a).is_err());
    }

    #[test]
    fn pa_uniform_no_leak() {
        let mut rng = seeded(3);
        let d = Distribution::uniform(0u64..256).unwrap();
        let out = pa_experiment(&d, 8, &[], 2, 50, &mut rng).unwrap();
        assert!(out.empirical <= out.bound + 3.0 * out.std_err);
        assert!(out.empirical < 0.05);
    }

    #[test]
    fn pa_vacuous_when_leak_is_large() {
        let mut rng = seeded(4);
        let d = Distribution::uniform(0u64..256).unwrap();
        let out = pa_experiment(&d, 8, &[0, 1, 2, 3, 4, 5], 4, 20, &mut rng).unwrap();
        assert!((out.hmin - 2.0).abs() < 1e-9);
        assert!(out.bound >= 1.0);
    }

    #[test]
    fn pa_min_entropy_six() {
        let mut rng = seeded(5);
        // uniform on 64 of the 256 strings
        let d = Distribution::uniform((0u64..64).map(|x| x * 4 + 1)).unwrap();
        let out = pa_experiment(&d, 8, &[], 2, 100, &mut rng).unwrap();
        assert!((out.hmin - 6.0).abs() < 1e-9);
        assert_eq!(out.bound, 0.125);
        assert!(out.empirical <= out.bound + 3.0 * out.std_err);
    }

    #[test]
    fn oversized_support_rejected() {
        let mut rng = seeded(6);
        let d = Distribution::uniform(0u64..4).unwrap();
        assert!(pa_experiment(&d, 17, &[], 2, 1, &mut rng).is_err());
    }
}
