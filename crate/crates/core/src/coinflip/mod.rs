//! Coin flipping: the single-bit protocol, sequential repetition,
//! amplification to stronger flavors, and the simulators that enforce a
//! chosen outcome.
//!
//! Strategies are plain `Clone` structs that own their randomness, so a
//! simulator rewinds a party by restoring a clone taken earlier.

mod amplify;
mod single;

pub use amplify::{
    encode_message, force_force, force_random, simulate_force_force_against_alice, simulate_force_force_against_bob,
    simulate_force_random_against_committer, AmpConfig, AmpWire, FfAlice, FfBehaviour, FfBob, FfConfig, KeyStringMode,
    FR_WIRE, KEY_WIRE, S_WIRE,
};
pub use single::{
    coin_sequential, coin_single, enforce_against_alice, enforce_against_bob, CoinCom, CoinOpen, CoinScheme, CoinWire,
    Extractor, COIN,
};

use std::collections::BTreeSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::rng::Rng;

/// What a committing party does once it has seen the other side's bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpenChoice {
    Honest,
    Refuse,
    /// Claim the other bit with the same randomness.
    Flip,
}

pub trait Committer: Clone {
    fn choose(&mut self, round: usize) -> bool;
    fn open(&mut self, round: usize, a: bool, b: bool) -> OpenChoice;
    fn rng(&mut self) -> &mut Rng;
}

pub trait Responder: Clone {
    /// Naor receiver vector of `len` bits.
    fn receiver_vector(&mut self, len: usize) -> Vec<bool>;
    /// The response bit, given the serialized commitment.
    fn respond(&mut self, round: usize, com: &[u8]) -> bool;
}

#[derive(Clone)]
pub struct HonestCommitter {
    pub rng: Rng,
}

impl Committer for HonestCommitter {
    fn choose(&mut self, _: usize) -> bool {
        self.rng.random()
    }
    fn open(&mut self, _: usize, _: bool, _: bool) -> OpenChoice {
        OpenChoice::Honest
    }
    fn rng(&mut self) -> &mut Rng {
        &mut self.rng
    }
}

/// Refuses to open in round `at`.
#[derive(Clone)]
pub struct RefusingCommitter {
    pub rng: Rng,
    pub at: usize,
}

impl Committer for RefusingCommitter {
    fn choose(&mut self, _: usize) -> bool {
        self.rng.random()
    }
    fn open(&mut self, round: usize, _: bool, _: bool) -> OpenChoice {
        if round == self.at {
            OpenChoice::Refuse
        } else {
            OpenChoice::Honest
        }
    }
    fn rng(&mut self) -> &mut Rng {
        &mut self.rng
    }
}

/// Tries to open the other bit whenever the coin would come out 0.
#[derive(Clone)]
pub struct EquivocatingCommitter {
    pub rng: Rng,
}

impl Committer for EquivocatingCommitter {
    fn choose(&mut self, _: usize) -> bool {
        self.rng.random()
    }
    fn open(&mut self, _: usize, a: bool, b: bool) -> OpenChoice {
        if a ^ b {
            OpenChoice::Honest
        } else {
            OpenChoice::Flip
        }
    }
    fn rng(&mut self) -> &mut Rng {
        &mut self.rng
    }
}

/// Aborts as soon as the outcome so far stops being a prefix of some
/// string in `target`.
#[derive(Clone)]
pub struct SteeringCommitter {
    pub rng: Rng,
    prefixes: BTreeSet<Vec<bool>>,
    so_far: Vec<bool>,
}

impl SteeringCommitter {
    pub fn new(rng: Rng, target: &[Vec<bool>]) -> Self {
        let prefixes = target.iter().flat_map(|t| (1..=t.len()).map(|k| t[..k].to_vec())).collect();
        SteeringCommitter { rng, prefixes, so_far: Vec::new() }
    }
}

impl Committer for SteeringCommitter {
    fn choose(&mut self, _: usize) -> bool {
        self.rng.random()
    }
    fn open(&mut self, round: usize, a: bool, b: bool) -> OpenChoice {
        self.so_far.truncate(round);
        self.so_far.push(a ^ b);
        if self.prefixes.contains(&self.so_far) {
            OpenChoice::Honest
        } else {
            OpenChoice::Refuse
        }
    }
    fn rng(&mut self) -> &mut Rng {
        &mut self.rng
    }
}

#[derive(Clone)]
pub struct HonestResponder {
    pub rng: Rng,
}

impl Responder for HonestResponder {
    fn receiver_vector(&mut self, len: usize) -> Vec<bool> {
        crate::bits::random_bits(len, &mut self.rng)
    }
    fn respond(&mut self, _: usize, _: &[u8]) -> bool {
        self.rng.random()
    }
}

/// Always answers `bit`.
#[derive(Clone)]
pub struct ConstantResponder {
    pub bit: bool,
}

impl Responder for ConstantResponder {
    fn receiver_vector(&mut self, len: usize) -> Vec<bool> {
        (0..len).map(|i| i % 3 == 0).collect()
    }
    fn respond(&mut self, _: usize, _: &[u8]) -> bool {
        self.bit
    }
}

/// Answers with the parity of the commitment bytes.
#[derive(Clone)]
pub struct ParityResponder;

impl Responder for ParityResponder {
    fn receiver_vector(&mut self, len: usize) -> Vec<bool> {
        (0..len).map(|i| i % 2 == 1).collect()
    }
    fn respond(&mut self, _: usize, com: &[u8]) -> bool {
        com.iter().fold(0u8, |acc, b| acc ^ b).count_ones() % 2 == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Uncont,
    Random,
    Force,
}

impl Flavor {
    /// Force implies random implies uncont.
    pub fn implies(self, other: Flavor) -> bool {
        self >= other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinFlavor {
    pub alice_side: Flavor,
    pub bob_side: Flavor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoinProtocol {
    Sequential,
    ForceRandom,
    ForceForce,
}

/// The flavor each protocol is claimed to have; the test suite checks
/// the claims.
pub fn claimed_flavor(p: CoinProtocol) -> CoinFlavor {
    let (alice_side, bob_side) = match p {
        CoinProtocol::Sequential => (Flavor::Force, Flavor::Force),
        CoinProtocol::ForceRandom => (Flavor::Force, Flavor::Random),
        CoinProtocol::ForceForce => (Flavor::Force, Flavor::Force),
    };
    CoinFlavor { alice_side, bob_side }
}

/// The trusted coin: a uniform `λ`-bit string, or nothing if the
/// corrupted side aborts.
#[derive(Debug, Clone)]
pub struct IdealCoin {
    pub lambda: usize,
    pending: Option<Vec<bool>>,
}

impl IdealCoin {
    pub fn new(lambda: usize) -> Self {
        IdealCoin { lambda, pending: None }
    }

    /// Draw `h`; the corrupted side sees it before deciding.
    pub fn flip(&mut self, rng: &mut Rng) -> &[bool] {
        self.pending.insert(crate::bits::random_bits(self.lambda, rng))
    }

    /// Hand `h` to the honest side unless the corrupted side aborts.
    pub fn deliver(&mut self, abort: bool) -> Option<Vec<bool>> {
        let h = self.pending.take();
        if abort {
            None
        } else {
            h
        }
    }
}

/// Outcome record for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinRecord {
    pub outcome: Option<String>,
    pub aborted: bool,
    pub retries: u64,
}

impl CoinRecord {
    pub fn from_result(r: &crate::Result<Vec<bool>>, retries: u64) -> Self {
        match r {
            Ok(bits) => CoinRecord { outcome: Some(hex::encode(crate::bits::pack(bits))), aborted: false, retries },
            Err(_) => CoinRecord { outcome: None, aborted: true, retries },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn flavor_lattice() {
        assert!(Flavor::Force.implies(Flavor::Uncont));
        assert!(Flavor::Random.implies(Flavor::Uncont));
        assert!(!Flavor::Uncont.implies(Flavor::Random));
        for p in [CoinProtocol::Sequential, CoinProtocol::ForceRandom, CoinProtocol::ForceForce] {
            assert!(claimed_flavor(p).bob_side.implies(Flavor::Random));
        }
    }

    #[test]
    fn ideal_coin() {
        let mut f = IdealCoin::new(8);
        let mut rng = seeded(1);
        let h = f.flip(&mut rng).to_vec();
        assert_eq!(h.len(), 8);
        assert_eq!(f.deliver(false), Some(h));
        f.flip(&mut rng);
        assert_eq!(f.deliver(true), None);
        assert_eq!(f.deliver(false), None);
    }

    #[test]
    fn record_encoding() {
        let r = CoinRecord::from_result(&Ok(vec![true, false, false, false, true]), 3);
        assert_eq!(r.outcome.as_deref(), Some("11"));
        assert!(CoinRecord::from_result(&Err(crate::AbortReason::Refusal.into()), 0).aborted);
    }
}
