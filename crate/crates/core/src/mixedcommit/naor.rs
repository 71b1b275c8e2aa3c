//! Naor's bit commitment from a length-tripling generator.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Largest seed length for which seeds can be enumerated.
pub const MAX_ENUMERABLE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaorParams {
    /// Seed length; the generator outputs `3n` bits.
    pub n: usize,
}

impl NaorParams {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::param(format!("seed length {n} outside 1..=64")));
        }
        Ok(NaorParams { n })
    }

    pub fn out_len(&self) -> usize {
        3 * self.n
    }

    pub fn random_seed(&self, rng: &mut Rng) -> u64 {
        if self.n == 64 {
            rng.random()
        } else {
            rng.random_range(0..1u64 << self.n)
        }
    }
}

impl Default for NaorParams {
    fn default() -> Self {
        NaorParams { n: 16 }
    }
}

/// `G(s)`: SHA-256 in counter mode over the seed, truncated to `3n` bits.
pub fn prg(params: &NaorParams, seed: u64) -> Vec<bool> {
    let want = params.out_len();
    let mut out = Vec::with_capacity(want);
    let mut ctr = 0u32;
    while out.len() < want {
        let mut h = Sha256::new();
        h.update(b"naor-prg");
        h.update((params.n as u32).to_le_bytes());
        h.update(seed.to_le_bytes());
        h.update(ctr.to_le_bytes());
        out.extend(bits::unpack(&h.finalize(), 256));
        ctr += 1;
    }
    out.truncate(want);
    out
}

fn prg_word(params: &NaorParams, seed: u64) -> u64 {
    bits::to_u64(&prg(params, seed))
}

/// `r′ = G(s) ⊕ a·R`.
pub fn naor_commit(params: &NaorParams, a: bool, seed: u64, rb: &[bool]) -> Result<Vec<bool>> {
    if rb.len() != params.out_len() {
        return Err(Error::param(format!("receiver vector must have {} bits", params.out_len())));
    }
    let g = prg(params, seed);
    Ok(if a { bits::xor(&g, rb) } else { g })
}

pub fn naor_verify(params: &NaorParams, com: &[bool], rb: &[bool], a: bool, seed: u64) -> bool {
    naor_commit(params, a, seed, rb).is_ok_and(|c| c == com)
}

/// Reverse lookup `G(s) ↦ s` for enumerable seed lengths.
pub struct NaorTable {
    params: NaorParams,
    inverse: HashMap<u64, Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extracted {
    Unique {
        a: bool,
        seed: u64,
    },
    /// Openings to both bits exist.
    Ambiguous,
    /// Not a valid commitment for any seed.
    Invalid,
}

impl NaorTable {
    fn build(params: NaorParams) -> Self {
        let mut inverse: HashMap<u64, Vec<u32>> = HashMap::with_capacity(1 << params.n);
        for s in 0..1u64 << params.n {
            inverse.entry(prg_word(&params, s)).or_default().push(s as u32);
        }
        NaorTable { params, inverse }
    }

    /// Shared table for `params`, built on first use.
    pub fn get(params: NaorParams) -> Result<Arc<NaorTable>> {
        if params.n > MAX_ENUMERABLE {
            return Err(Error::param(format!("seed length {} is not enumerable", params.n)));
        }
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<NaorTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().expect("table cache poisoned");
        Ok(guard.entry(params.n).or_insert_with(|| Arc::new(NaorTable::build(params))).clone())
    }

    /// Which bit a commitment can be opened to, found by enumeration.
    pub fn extract(&self, com: &[bool], rb: &[bool]) -> Extracted {
        let c = bits::to_u64(com);
        let r = bits::to_u64(rb);
        let zero = self.inverse.get(&c).map(|v| v[0]);
        let one = self.inverse.get(&(c ^ r)).map(|v| v[0]);
        match (zero, one) {
            (Some(_), Some(_)) => Extracted::Ambiguous,
            (Some(s), None) => Extracted::Unique { a: false, seed: u64::from(s) },
            (None, Some(s)) => Extracted::Unique { a: true, seed: u64::from(s) },
            (None, None) => Extracted::Invalid,
        }
    }

    pub fn params(&self) -> NaorParams {
        self.params
    }
}

/// Fraction of all receiver vectors `R` for which some pair of seeds
/// satisfies `G(s₀) ⊕ G(s₁) = R`, i.e. a commitment can be opened both ways.
pub fn equivocation_probability(params: &NaorParams) -> Result<f64> {
    if params.n > 12 {
        return Err(Error::param("exhaustive pair search limited to n ≤ 12"));
    }
    let outs: Vec<u64> = (0..1u64 << params.n).map(|s| prg_word(params, s)).collect();
    let mut bad = HashSet::new();
    for (i, &g0) in outs.iter().enumerate() {
        for &g1 in &outs[i..] {
            bad.insert(g0 ^ g1);
        }
    }
    Ok(bad.len() as f64 / (params.out_len() as f64).exp2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::random_bits;
    use crate::rng::seeded;

    #[test]
    fn zero_bit_is_generator_output() {
        let p = NaorParams::new(16).unwrap();
        let mut rng = seeded(1);
        let s = p.random_seed(&mut rng);
        let rb = random_bits(48, &mut rng);
        assert_eq!(naor_commit(&p, false, s, &rb).unwrap(), prg(&p, s));
    }

    #[test]
    fn completeness() {
        let p = NaorParams::new(32).unwrap();
        let mut rng = seeded(2);
        for _ in 0..10_000 {
            let a: bool = rng.random();
            let s = p.random_seed(&mut rng);
            let rb = random_bits(96, &mut rng);
            let c = naor_commit(&p, a, s, &rb).unwrap();
            assert!(naor_verify(&p, &c, &rb, a, s));
        }
    }

    #[test]
    fn wrong_bit_rejected_for_nonzero_receiver_vector() {
        let p = NaorParams::new(16).unwrap();
        let mut rng = seeded(3);
        let rb = random_bits(48, &mut rng);
        let c = naor_commit(&p, true, 77, &rb).unwrap();
        assert!(!naor_verify(&p, &c, &rb, false, 77));
    }

    #[test]
    fn toy_equivocation_is_order_two_to_minus_n() {
        let p = NaorParams::new(8).unwrap();
        let e = equivocation_probability(&p).unwrap();
        assert!(e > 0.0);
        assert!(e <= 4.0 * (-8f64).exp2(), "{e}");

        // random receiver vectors agree with the exhaustive count
        let outs: Vec<u64> = (0..256).map(|s| prg_word(&p, s)).collect();
        let set: HashSet<u64> = outs.iter().flat_map(|&a| outs.iter().map(move |&b| a ^ b)).collect();
        let mut rng = seeded(4);
        let trials = 200_000;
        let hits = (0..trials).filter(|_| set.contains(&rng.random_range(0..1u64 << 24))).count();
        let emp = hits as f64 / trials as f64;
        assert!((emp - e).abs() < 4.0 * (e / trials as f64).sqrt() + 1e-4);
    }

    #[test]
    fn table_extraction_recovers_bit() {
        let p = NaorParams::new(12).unwrap();
        let t = NaorTable::get(p).unwrap();
        let mut rng = seeded(5);
        let mut unique = 0;
        for _ in 0..2000 {
            let a: bool = rng.random();
            let s = p.random_seed(&mut rng);
            let rb = random_bits(36, &mut rng);
            let c = naor_commit(&p, a, s, &rb).unwrap();
            match t.extract(&c, &rb) {
                Extracted::Unique { a: got, .. } => {
                    assert_eq!(got, a);
                    unique += 1;
                }
                Extracted::Ambiguous => {}
                Extracted::Invalid => panic!("honest commitment must be valid"),
            }
        }
        assert!(unique >= 1990);
    }
}
