//! Dual-mode bit commitment from Regev's LWE encryption.
//!
//! A key is a pair `(A, b)`. Uniform keys hide the committed bit
//! statistically; keys with `b = As + e` bind it and `s` extracts it.

use rand::Rng as _;
use rand::SeedableRng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits;
use crate::error::{Error, Result};
use crate::rng::Rng;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LweParams {
    pub n_dim: usize,
    pub p: u32,
    pub m_samples: usize,
    pub err_sigma: f64,
}

impl LweParams {
    /// Smallest prime `p ≥ n²`, `m = 2(n+1)⌈log₂ p⌉`, `σ = p/(2m)`.
    pub fn for_dimension(n_dim: usize) -> Result<Self> {
        if n_dim < 2 {
            return Err(Error::param("lattice dimension must be at least 2"));
        }
        let lo = (n_dim * n_dim) as u64;
        let p = (lo..=2 * lo).find(|&q| is_prime(q)).expect("Bertrand's postulate") as u32;
        let m = 2 * (n_dim + 1) * Self::log2_ceil(p);
        Self::new(n_dim, p, m, f64::from(p) / (2.0 * m as f64))
    }

    pub fn new(n_dim: usize, p: u32, m_samples: usize, err_sigma: f64) -> Result<Self> {
        let n2 = (n_dim * n_dim) as u64;
        if !is_prime(u64::from(p)) || u64::from(p) < n2 || u64::from(p) > 2 * n2 {
            return Err(Error::param(format!("p={p} must be a prime in [n², 2n²] for n={n_dim}")));
        }
        if m_samples < 2 * (n_dim + 1) * Self::log2_ceil(p) {
            return Err(Error::param(format!("m={m_samples} below 2(n+1)⌈log p⌉")));
        }
        if (m_samples as u64 + 1) * u64::from(p) >= 1 << 32 {
            return Err(Error::param(format!("m={m_samples} too large for 32-bit commitment sums")));
        }
        if !(err_sigma >= 0.0) {
            return Err(Error::param("error width must be non-negative"));
        }
        Ok(LweParams { n_dim, p, m_samples, err_sigma })
    }

    fn log2_ceil(p: u32) -> usize {
        (32 - (p - 1).leading_zeros()) as usize
    }

    /// Bits used per coordinate of `b` in a trapdoor-capable key string.
    pub fn b_width(&self) -> usize {
        Self::log2_ceil(self.p) + 8
    }

    /// Length of a key string that can be forced to a binding key.
    pub fn trapdoor_string_len(&self) -> usize {
        SEED_BITS + self.m_samples * self.b_width()
    }

    fn half(&self) -> u32 {
        self.p / 2
    }
}

impl Default for LweParams {
    fn default() -> Self {
        LweParams::for_dimension(16).expect("valid defaults")
    }
}

/// Length of the seed from which `A` is expanded.
pub const SEED_BITS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeyMode {
    Hiding,
    Binding,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommitKey {
    pub mode: KeyMode,
    pub params: LweParams,
    /// `m × n`, row-major.
    a: Vec<u32>,
    b: Vec<u32>,
    sk: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LweCommitment {
    pub a_vec: Vec<u32>,
    pub c_val: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LweOpening {
    pub bit: bool,
    /// Bitmask over the `m` key rows.
    pub subset: Vec<bool>,
}

fn uniform_matrix(params: &LweParams, rng: &mut Rng) -> Vec<u32> {
    (0..params.m_samples * params.n_dim).map(|_| rng.random_range(0..params.p)).collect()
}

fn expand_seed(seed: &[bool]) -> Rng {
    let digest: [u8; 32] = Sha256::digest(bits::pack(seed)).into();
    Rng::from_seed(digest)
}

/// Rounded Gaussian errors, resampled until every subset sum stays
/// strictly inside `p/4 − 1` so extraction never fails.
fn sample_errors(params: &LweParams, rng: &mut Rng) -> Vec<i64> {
    let limit = f64::from(params.p) / 4.0 - 1.0;
    loop {
        let e: Vec<i64> = if params.err_sigma == 0.0 {
            vec![0; params.m_samples]
        } else {
            let normal = Normal::new(0.0, params.err_sigma).expect("finite width");
            (0..params.m_samples).map(|_| normal.sample(rng).round() as i64).collect()
        };
        if (e.iter().map(|x| x.abs()).sum::<i64>() as f64) < limit {
            return e;
        }
    }
}

fn binding_parts(params: &LweParams, a: &[u32], rng: &mut Rng) -> (Vec<u32>, Vec<u32>) {
    let p = i64::from(params.p);
    let s: Vec<u32> = (0..params.n_dim).map(|_| rng.random_range(0..params.p)).collect();
    let e = sample_errors(params, rng);
    let b = (0..params.m_samples)
        .map(|i| {
            let row = &a[i * params.n_dim..(i + 1) * params.n_dim];
            let dot: u64 = row.iter().zip(&s).map(|(&x, &y)| u64::from(x) * u64::from(y)).sum();
            ((dot as i64 + e[i]).rem_euclid(p)) as u32
        })
        .collect();
    (s, b)
}

pub fn gen_hiding(params: &LweParams, rng: &mut Rng) -> CommitKey {
    let a = uniform_matrix(params, rng);
    let b = (0..params.m_samples).map(|_| rng.random_range(0..params.p)).collect();
    CommitKey { mode: KeyMode::Hiding, params: *params, a, b, sk: None }
}

pub fn gen_binding(params: &LweParams, rng: &mut Rng) -> CommitKey {
    let a = uniform_matrix(params, rng);
    let (s, b) = binding_parts(params, &a, rng);
    CommitKey { mode: KeyMode::Binding, params: *params, a, b, sk: Some(s) }
}

/// Key strings produced by coin flipping.
///
/// A short string (`SEED_BITS` long) seeds both `A` and `b`. A string of
/// [`LweParams::trapdoor_string_len`] bits seeds `A` from its first
/// `SEED_BITS` and spells out each `b_i` directly, reduced mod `p`, which
/// lets a simulator pick a string whose key is binding.
pub fn key_from_string(params: &LweParams, s: &[bool]) -> Result<CommitKey> {
    if s.len() == SEED_BITS {
        let mut rng = expand_seed(s);
        let mut k = gen_hiding(params, &mut rng);
        k.mode = KeyMode::Hiding;
        return Ok(k);
    }
    if s.len() != params.trapdoor_string_len() {
        return Err(Error::param(format!(
            "key string has {} bits; expected {SEED_BITS} or {}",
            s.len(),
            params.trapdoor_string_len()
        )));
    }
    let a = uniform_matrix(params, &mut expand_seed(&s[..SEED_BITS]));
    let w = params.b_width();
    let b = s[SEED_BITS..].chunks(w).map(|c| (bits::to_u64(c) % u64::from(params.p)) as u32).collect();
    Ok(CommitKey { mode: KeyMode::Hiding, params: *params, a, b, sk: None })
}

/// A key string whose key is binding, together with that key.
pub fn binding_key_string(params: &LweParams, rng: &mut Rng) -> (Vec<bool>, CommitKey) {
    let seed = bits::random_bits(SEED_BITS, rng);
    let a = uniform_matrix(params, &mut expand_seed(&seed));
    let (s, b) = binding_parts(params, &a, rng);
    let w = params.b_width();
    let mut out = seed;
    for &bi in &b {
        // uniform among the representatives of b_i below 2^w
        let reps = ((1u64 << w) - 1 - u64::from(bi)) / u64::from(params.p) + 1;
        let v = u64::from(bi) + rng.random_range(0..reps) * u64::from(params.p);
        out.extend(bits::from_u64(v, w));
    }
    (out, CommitKey { mode: KeyMode::Binding, params: *params, a, b, sk: Some(s) })
}

impl CommitKey {
    pub fn sk(&self) -> Option<&[u32]> {
        self.sk.as_deref()
    }

    /// The same key without its extraction trapdoor.
    pub fn public(&self) -> CommitKey {
        CommitKey { sk: None, ..self.clone() }
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[u32], u32)> {
        self.a.chunks(self.params.n_dim).zip(self.b.iter().copied())
    }

    /// `p, n, m, A, b[, s]` as little-endian u64 words.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut words = vec![u64::from(self.params.p), self.params.n_dim as u64, self.params.m_samples as u64];
        words.extend(self.a.iter().map(|&x| u64::from(x)));
        words.extend(self.b.iter().map(|&x| u64::from(x)));
        if let Some(s) = &self.sk {
            words.extend(s.iter().map(|&x| u64::from(x)));
        }
        let mut out = Vec::with_capacity(8 + 8 * words.len());
        out.extend((words.len() as u64).to_le_bytes());
        for w in words {
            out.extend(w.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], err_sigma: f64) -> Result<Self> {
        let bad = |d: &str| Error::Wire(format!("key encoding: {d}"));
        if bytes.len() < 8 || !bytes.len().is_multiple_of(8) {
            return Err(bad("length not a multiple of 8"));
        }
        let words: Vec<u64> = bytes.chunks(8).map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        if words[0] as usize != words.len() - 1 || words.len() < 4 {
            return Err(bad("length prefix mismatch"));
        }
        let (p, n, m) = (words[1], words[2] as usize, words[3] as usize);
        let p32 = u32::try_from(p).map_err(|_| bad("modulus too large"))?;
        let params = LweParams::new(n, p32, m, err_sigma)?;
        let body = &words[4..];
        let to32 = |v: &[u64]| -> Result<Vec<u32>> {
            v.iter().map(|&x| if x < p { Ok(x as u32) } else { Err(bad("entry not reduced")) }).collect()
        };
        let (a, b, sk) = match body.len() {
            l if l == m * n + m => (to32(&body[..m * n])?, to32(&body[m * n..])?, None),
            l if l == m * n + m + n => {
                (to32(&body[..m * n])?, to32(&body[m * n..m * n + m])?, Some(to32(&body[m * n + m..])?))
            }
            _ => return Err(bad("body length")),
        };
        let mode = if sk.is_some() { KeyMode::Binding } else { KeyMode::Hiding };
        Ok(CommitKey { mode, params, a, b, sk })
    }
}

/// Deterministic part of committing: sum the selected rows.
pub fn commit_with(key: &CommitKey, bit: bool, subset: &[bool]) -> Result<LweCommitment> {
    let params = &key.params;
    if subset.len() != params.m_samples {
        return Err(Error::param("subset mask length differs from m"));
    }
    let n = params.n_dim;
    // (m+1)·p < 2^32 is checked on construction
    let mut acc = vec![0u32; n];
    let mut c = if bit { params.half() } else { 0 };
    for ((row, &bi), &take) in key.a.chunks_exact(n).zip(&key.b).zip(subset) {
        let mask = 0u32.wrapping_sub(u32::from(take));
        for (a, &x) in acc.iter_mut().zip(row) {
            *a += x & mask;
        }
        c += bi & mask;
    }
    let p = params.p;
    Ok(LweCommitment { a_vec: acc.into_iter().map(|x| x % p).collect(), c_val: c % p })
}

pub fn lwe_commit(key: &CommitKey, bit: bool, rng: &mut Rng) -> (LweCommitment, LweOpening) {
    let subset = bits::random_bits(key.params.m_samples, rng);
    let com = commit_with(key, bit, &subset).expect("mask has length m");
    (com, LweOpening { bit, subset })
}

pub fn lwe_verify(key: &CommitKey, com: &LweCommitment, opening: &LweOpening) -> bool {
    commit_with(key, opening.bit, &opening.subset).is_ok_and(|c| &c == com)
}

/// Decrypt with the trapdoor: 0 iff the centred `c − ⟨a, s⟩` is below `p/4`.
pub fn lwe_extract(key: &CommitKey, com: &LweCommitment) -> Result<bool> {
    let s = key.sk.as_ref().ok_or_else(|| Error::usage("extraction needs a binding key"))?;
    let p = i64::from(key.params.p);
    let dot: i64 = com.a_vec.iter().zip(s).map(|(&a, &b)| i64::from(a) * i64::from(b)).sum();
    let mut d = (i64::from(com.c_val) - dot).rem_euclid(p);
    if d > p / 2 {
        d -= p;
    }
    Ok(4 * d.abs() >= p)
}

/// Commit to each bit of `msg` independently.
pub fn commit_bits(key: &CommitKey, msg: &[bool], rng: &mut Rng) -> (Vec<LweCommitment>, Vec<LweOpening>) {
    msg.iter().map(|&b| lwe_commit(key, b, rng)).unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::stats;

    #[test]
    fn default_parameters() {
        let p = LweParams::default();
        assert_eq!((p.n_dim, p.p, p.m_samples), (16, 257, 306));
        assert!(256 <= p.p && p.p <= 512);
        assert!(LweParams::new(16, 256, 306, 1.0).is_err());
        assert!(LweParams::new(16, 257, 100, 1.0).is_err());
    }

    #[test]
    fn binding_residuals_are_small() {
        let params = LweParams::default();
        let mut rng = seeded(1);
        for _ in 0..20 {
            let k = gen_binding(&params, &mut rng);
            let s = k.sk().unwrap().to_vec();
            let mut total = 0;
            for (row, b) in k.rows() {
                let dot: i64 = row.iter().zip(&s).map(|(&x, &y)| i64::from(x) * i64::from(y)).sum();
                let mut e = (i64::from(b) - dot).rem_euclid(257);
                if e > 128 {
                    e -= 257;
                }
                assert!(e.abs() * 8 < 257);
                total += e.abs();
            }
            assert!((total as f64) < 257.0 / 4.0);
        }
    }

    #[test]
    fn hiding_key_entries_uniform() {
        let params = LweParams::default();
        let mut rng = seeded(2);
        let mut counts = vec![0u64; 257];
        let mut draws = 0;
        while draws < 100_000 {
            let k = gen_hiding(&params, &mut rng);
            for (row, b) in k.rows() {
                counts[row[0] as usize] += 1;
                counts[b as usize] += 1;
                draws += 2;
            }
        }
        let (_, p) = stats::chi_square_uniform(&counts);
        assert!(p > 0.001, "p={p}");
    }

    #[test]
    fn empty_subset_commitments() {
        let params = LweParams::default();
        let k = gen_hiding(&params, &mut seeded(3));
        let none = vec![false; params.m_samples];
        let c0 = commit_with(&k, false, &none).unwrap();
        assert_eq!(c0, LweCommitment { a_vec: vec![0; 16], c_val: 0 });
        let c1 = commit_with(&k, true, &none).unwrap();
        assert_eq!(c1.c_val, 128);
        let kb = gen_binding(&params, &mut seeded(3));
        assert!(!lwe_extract(&kb, &commit_with(&kb, false, &none).unwrap()).unwrap());
        assert!(lwe_extract(&kb, &commit_with(&kb, true, &none).unwrap()).unwrap());
    }

    #[test]
    fn recomputation_and_tampering() {
        let params = LweParams::default();
        let mut rng = seeded(4);
        let k = gen_hiding(&params, &mut rng);
        for _ in 0..10_000 {
            let bit: bool = rng.random();
            let (c, o) = lwe_commit(&k, bit, &mut rng);
            assert!(lwe_verify(&k, &c, &o));
        }
        let (c, o) = lwe_commit(&k, true, &mut rng);
        let flipped = LweOpening { bit: false, ..o.clone() };
        assert!(!lwe_verify(&k, &c, &flipped));
        let mut bad = c.clone();
        bad.a_vec[3] = (bad.a_vec[3] + 1) % 257;
        assert!(!lwe_verify(&k, &bad, &o));
    }

    #[test]
    fn extraction_never_fails() {
        let params = LweParams::default();
        let mut rng = seeded(5);
        let k = gen_binding(&params, &mut rng);
        for _ in 0..10_000 {
            let bit: bool = rng.random();
            let (c, _) = lwe_commit(&k, bit, &mut rng);
            assert_eq!(lwe_extract(&k, &c).unwrap(), bit);
        }
        assert!(lwe_extract(&gen_hiding(&params, &mut rng), &lwe_commit(&k, true, &mut rng).0).is_err());
    }

    #[test]
    fn key_bytes_roundtrip() {
        let params = LweParams::for_dimension(4).unwrap();
        let mut rng = seeded(6);
        for k in [gen_hiding(&params, &mut rng), gen_binding(&params, &mut rng)] {
            let back = CommitKey::from_bytes(&k.to_bytes(), params.err_sigma).unwrap();
            assert_eq!(back, k);
        }
        assert!(CommitKey::from_bytes(&[1, 2, 3], 1.0).is_err());
    }

    #[test]
    fn forced_key_string_decodes_to_binding_key() {
        let params = LweParams::for_dimension(8).unwrap();
        let mut rng = seeded(7);
        let (s, kb) = binding_key_string(&params, &mut rng);
        assert_eq!(s.len(), params.trapdoor_string_len());
        let decoded = key_from_string(&params, &s).unwrap();
        assert_eq!(decoded.public(), CommitKey { mode: KeyMode::Hiding, ..kb.public() });
        let (c, _) = lwe_commit(&decoded, true, &mut rng);
        assert!(lwe_extract(&kb, &c).unwrap());
        assert!(key_from_string(&params, &s[..10]).is_err());
        assert_eq!(key_from_string(&params, &s[..SEED_BITS]).unwrap().params, params);
    }
}
