//! Identification with an authentication tag over the whole classical
//! exchange and private error correction of the keyed bits.
//!
//! The tag is `b + Σ dᵢ·aⁱ` over GF(2^16), where `d₁, …, d₁₆` are the
//! 16-bit words of a SHA-256 digest of the sender's view of every
//! classical message together with the string `x|_{I_w}`. Error
//! correction sends one 12-bit syndrome per 16-bit block under a random
//! `[16, 4]` code of minimum distance at least 7, so up to 3 errors per
//! block are corrected.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::xor;
use crate::error::{AbortReason, Error, Result};
use crate::fieldmath::FieldElem;
use crate::hashing::apply_hash;
use crate::qchannel::ChannelConfig;
use crate::rng::{seeded, Rng};
use crate::session::{EveTap, Party, Schedule, Session, TranscriptRecord};

use super::bb84::{self, BobStrategy, CompilerConfig, QubitTap};
use super::id::{i_w, id_exchange, password_hash, restrict, Code};
use super::{basis_xor, compiled_schedule, malformed, PartyRngs};

pub const BLOCK: usize = 16;
pub const SYNDROME_BITS: usize = 12;
pub const CORRECTABLE: usize = 3;
pub const FAMILY_SIZE: usize = 64;
const FAMILY_SEED: u64 = 0x5159_4450_4c55_5321;

/// One parity-check matrix, stored by column, with its coset leaders of
/// weight at most [`CORRECTABLE`].
#[derive(Debug)]
pub struct SyndromeCode {
    columns: [u16; BLOCK],
    leaders: HashMap<u16, u16>,
}

impl SyndromeCode {
    fn syndrome_word(&self, block: u16) -> u16 {
        (0..BLOCK).filter(|&i| block >> i & 1 == 1).fold(0, |acc, i| acc ^ self.columns[i])
    }

    /// Random columns, rejected until all error patterns of weight ≤ 3
    /// have distinct syndromes.
    fn sample(rng: &mut Rng) -> Self {
        loop {
            let mut columns = [0u16; BLOCK];
            for c in &mut columns {
                *c = rng.random_range(1..1u16 << SYNDROME_BITS);
            }
            let mut code = SyndromeCode { columns, leaders: HashMap::new() };
            let mut ok = true;
            'outer: for w in 0..=CORRECTABLE as u32 {
                for e in 0..=u16::MAX {
                    if e.count_ones() != w {
                        continue;
                    }
                    let s = code.syndrome_word(e);
                    if code.leaders.insert(s, e).is_some() {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            if ok {
                return code;
            }
        }
    }
}

pub struct SyndromeFamily {
    codes: Vec<SyndromeCode>,
}

fn blocks(bits: &[bool]) -> Vec<u16> {
    bits.chunks(BLOCK).map(|c| c.iter().enumerate().fold(0u16, |acc, (i, &b)| acc | (u16::from(b) << i))).collect()
}

impl SyndromeFamily {
    /// The fixed family, generated once from a constant seed.
    pub fn get() -> &'static SyndromeFamily {
        static FAMILY: OnceLock<SyndromeFamily> = OnceLock::new();
        FAMILY.get_or_init(|| {
            let mut rng = seeded(FAMILY_SEED);
            SyndromeFamily { codes: (0..FAMILY_SIZE).map(|_| SyndromeCode::sample(&mut rng)).collect() }
        })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn code(&self, j: usize) -> &SyndromeCode {
        &self.codes[j]
    }

    /// One syndrome per 16-bit block, the last block zero-padded.
    pub fn syndrome(&self, j: usize, bits: &[bool]) -> Vec<u16> {
        blocks(bits).into_iter().map(|b| self.codes[j].syndrome_word(b)).collect()
    }

    /// Flip the coset leader of each block's syndrome difference.
    pub fn correct(&self, j: usize, noisy: &[bool], syn: &[u16]) -> Result<Vec<bool>> {
        let code = self.codes.get(j).ok_or(AbortReason::Malformed)?;
        let bl = blocks(noisy);
        if bl.len() != syn.len() {
            return Err(AbortReason::Malformed.into());
        }
        let mut out = Vec::with_capacity(noisy.len());
        for (b, &s) in bl.iter().zip(syn) {
            let e = code.leaders.get(&(code.syndrome_word(*b) ^ s)).ok_or(AbortReason::DecodeFailure)?;
            let fixed = b ^ e;
            out.extend((0..BLOCK).map(|i| fixed >> i & 1 == 1));
        }
        out.truncate(noisy.len());
        Ok(out)
    }
}

/// Pre-shared authentication key `(a, b)` in GF(2^16).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdPlusKeys {
    pub a: FieldElem,
    pub b: FieldElem,
}

impl IdPlusKeys {
    pub fn random(rng: &mut Rng) -> Self {
        IdPlusKeys { a: FieldElem::random(16, rng), b: FieldElem::random(16, rng) }
    }

    pub fn tag(&self, digest: &[u8; 32]) -> u16 {
        let mut acc = self.b;
        let mut pow = self.a;
        for w in digest.chunks(2) {
            let d = FieldElem::new(u32::from(u16::from_le_bytes([w[0], w[1]])), 16).expect("16-bit word");
            acc = acc + d * pow;
            pow = pow * self.a;
        }
        acc.value() as u16
    }
}

/// Digest of `party`'s view of the first `upto` records: its own
/// messages as sent and the other side's as delivered.
fn view_digest(records: &[TranscriptRecord], party: Party) -> Sha256 {
    let mut h = Sha256::new();
    for (i, r) in records.iter().enumerate() {
        if r.sender == Party::E {
            continue;
        }
        let payload = match records.get(i + 1) {
            Some(next) if r.sender != party && next.sender == Party::E => &next.payload,
            _ => &r.payload,
        };
        h.update(r.msg_type.as_bytes());
        h.update((payload.len() as u64).to_le_bytes());
        h.update(payload);
    }
    h
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Final {
    z: Vec<bool>,
    j: u32,
    syn: Vec<u16>,
    tag: u16,
}

fn finish_digest(mut h: Sha256, fin: &Final, keyed: &[bool]) -> Result<[u8; 32]> {
    h.update(bincode::serialize(&(&fin.z, fin.j, &fin.syn)).map_err(|e| Error::Wire(e.to_string()))?);
    h.update(crate::bits::pack(keyed));
    Ok(h.finalize().into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdPlusOutcome {
    pub accepted: bool,
    /// Bits Bob flipped while correcting `x̂|_{I_w}`.
    pub corrected: usize,
}

pub fn schedule() -> Schedule {
    Schedule::new()
        .msg("id-shift", Party::B)
        .msg("id-theta", Party::A)
        .msg("id-g", Party::B)
        .msg("idp-final", Party::A)
        .requires("bb84-qubits", "id-shift")
        .requires("id-shift", "id-theta")
        .requires("id-theta", "id-g")
        .requires("id-g", "idp-final")
}

pub fn full_compiled_schedule() -> Schedule {
    compiled_schedule(&schedule(), "id-shift")
}

/// Compiled identification on `m` qubits followed by the authenticated
/// final message. The session must record its transcript, since each
/// party's tag covers its view of it.
#[allow(clippy::too_many_arguments)]
pub fn id_plus_run(
    session: &mut Session,
    m: usize,
    cfg: &CompilerConfig,
    channel: &ChannelConfig,
    code: &Code,
    w_user: usize,
    w_server: usize,
    ell: usize,
    keys: &IdPlusKeys,
    tap: &QubitTap,
    rngs: &mut PartyRngs,
) -> Result<IdPlusOutcome> {
    if !session.is_recorded() {
        return Err(Error::Config("authenticated identification needs a recorded session".into()));
    }
    if w_user >= code.len() {
        return Err(Error::param("password index outside the code"));
    }
    let family = SyndromeFamily::get();
    let (a, b) = bb84::run_bb84_preparation(session, m, channel, BobStrategy::Honest, tap, rngs)?;
    let v = bb84::compile_verification(session, &a, &b, cfg, rngs)?;
    let (alice, bob) = (v.alice, v.bob);
    let ex = id_exchange(session, &alice, &bob, code, w_server, ell, rngs)?;

    let ia = i_w(&alice.theta, code.word(w_user), &ex.kappa_a);
    let xa = restrict(&alice.x, &ia);
    let z = xor(&apply_hash(&ex.f_a, &xa)?, &password_hash(&ex.g_a, w_user)?);
    let j = rngs.alice.random_range(0..family.len());
    let mut fin = Final { z, j: j as u32, syn: family.syndrome(j, &xa), tag: 0 };
    let prefix = session.transcript().len();
    fin.tag = keys.tag(&finish_digest(view_digest(session.transcript(), Party::A), &fin, &xa)?);
    let got = session.send(Party::A, "idp-final", &fin)?;

    let kappa_b: Vec<_> = bob.theta_hat.iter().zip(code.word(w_server)).map(|(&t, &c)| basis_xor(t, c)).collect();
    let ib = i_w(&ex.theta_b, code.word(w_server), &kappa_b);
    let xb = restrict(&bob.x_hat, &ib);
    let fixed = family.correct(got.j as usize, &xb, &got.syn)?;
    let digest = finish_digest(view_digest(&session.transcript()[..prefix], Party::B), &got, &fixed)?;
    if keys.tag(&digest) != got.tag {
        return Err(AbortReason::MacReject.into());
    }
    let expect = xor(&apply_hash(&ex.f_b, &fixed).map_err(malformed)?, &password_hash(&ex.g_b, w_server)?);
    let corrected = xb.iter().zip(&fixed).filter(|(x, y)| x != y).count();
    Ok(IdPlusOutcome { accepted: got.z == expect, corrected })
}

/// Flips one bit of the message sent in round `round`; the bit index is
/// `pick` modulo the payload length.
pub struct BitFlipTap {
    pub round: usize,
    pub pick: u64,
}

impl EveTap for BitFlipTap {
    fn intercept(&mut self, round: usize, _: Party, _: &str, payload: &mut Vec<u8>) {
        if round == self.round && !payload.is_empty() {
            let bit = (self.pick % (payload.len() as u64 * 8)) as usize;
            payload[bit / 8] ^= 1 << (bit % 8);
        }
    }
}

/// Number of classical messages in one run.
pub fn message_count() -> usize {
    // qubits, commit, test set, openings, shift, θ/f, g, final
    8
}
