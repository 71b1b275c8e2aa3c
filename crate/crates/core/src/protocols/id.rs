//! Password-based identification of a user (Alice) to a server (Bob).

use serde::{Deserialize, Serialize};

use crate::bits::{from_u64, xor};
use crate::error::{AbortReason, Error, Result};
use crate::hashing::{apply_hash, sample_hash, HashFunc};
use crate::qchannel::{random_bases, Basis, ChannelConfig};
use crate::rng::Rng;
use crate::session::{Party, Schedule, Session};

use super::bb84::{self, AlicePrep, BobPrep, BobStrategy, CompilerConfig, QubitTap};
use super::{basis_xor, compiled_schedule, malformed, PartyRngs};

/// Codewords in `{+,×}^n` with pairwise distance at least `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Code {
    pub n: usize,
    pub d: usize,
    words: Vec<Vec<Basis>>,
}

fn distance(a: &[Basis], b: &[Basis]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

impl Code {
    /// Random codewords, each redrawn until it keeps distance `⌈δn⌉` from
    /// those before it.
    pub fn random(size: usize, n: usize, delta: f64, rng: &mut Rng) -> Result<Code> {
        if size == 0 || n == 0 || !(0.0..=1.0).contains(&delta) {
            return Err(Error::param("code needs at least one word, n ≥ 1 and δ ∈ [0, 1]"));
        }
        let d = (delta * n as f64).ceil() as usize;
        let mut words: Vec<Vec<Basis>> = Vec::with_capacity(size);
        while words.len() < size {
            let mut tries = 0;
            let w = loop {
                let w = random_bases(n, rng);
                if words.iter().all(|v| distance(v, &w) >= d) {
                    break w;
                }
                tries += 1;
                if tries > 10_000 {
                    return Err(Error::param(format!("could not find {size} words of length {n} at distance {d}")));
                }
            };
            words.push(w);
        }
        Ok(Code { n, d, words })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, w: usize) -> &[Basis] {
        &self.words[w]
    }

    pub fn min_distance(&self) -> usize {
        let mut best = self.n;
        for (i, a) in self.words.iter().enumerate() {
            for b in &self.words[i + 1..] {
                best = best.min(distance(a, b));
            }
        }
        best
    }

    /// Nearest codeword index, smallest index on ties.
    pub fn decode(&self, c: &[Basis]) -> usize {
        (0..self.words.len()).min_by_key(|&w| distance(&self.words[w], c)).expect("non-empty code")
    }

    /// Input width of the password hash: enough bits for an index and at
    /// least `ell`.
    pub fn index_bits(&self, ell: usize) -> usize {
        let b = usize::BITS - (self.words.len().max(2) - 1).leading_zeros();
        (b as usize).max(ell)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdOutcome {
    pub accepted: bool,
    /// The shift `κ` as Alice received it.
    pub kappa: Vec<Basis>,
    /// The response `z` as Bob received it.
    pub z: Vec<bool>,
}

pub fn schedule() -> Schedule {
    Schedule::new()
        .msg("id-shift", Party::B)
        .msg("id-theta", Party::A)
        .msg("id-g", Party::B)
        .msg("id-z", Party::A)
        .requires("bb84-qubits", "id-shift")
        .requires("id-shift", "id-theta")
        .requires("id-theta", "id-g")
        .requires("id-g", "id-z")
}

pub fn plain_schedule() -> Schedule {
    bb84::schedule().merge(&schedule())
}

pub fn full_compiled_schedule() -> Schedule {
    compiled_schedule(&schedule(), "id-shift")
}

pub(crate) fn restrict(x: &[bool], idx: &[usize]) -> Vec<bool> {
    idx.iter().map(|&i| x[i]).collect()
}

/// Positions where `θ` agrees with `𝔠(w) ⊕ κ`.
pub(crate) fn i_w(theta: &[Basis], code_word: &[Basis], kappa: &[Basis]) -> Vec<usize> {
    (0..theta.len()).filter(|&i| theta[i] == basis_xor(code_word[i], kappa[i])).collect()
}

/// Messages up to and including `g`, shared by the plain and the
/// authenticated variants.
pub(crate) struct IdExchange {
    pub kappa_a: Vec<Basis>,
    pub theta_b: Vec<Basis>,
    pub f_a: HashFunc,
    pub f_b: HashFunc,
    pub g_a: HashFunc,
    pub g_b: HashFunc,
}

pub(crate) fn id_exchange(
    session: &mut Session,
    alice: &AlicePrep,
    bob: &BobPrep,
    code: &Code,
    w_server: usize,
    ell: usize,
    rngs: &mut PartyRngs,
) -> Result<IdExchange> {
    let n = alice.x.len();
    if code.n != n || w_server >= code.len() || ell == 0 || ell > n {
        return Err(Error::param(format!("code length {} vs n={n}, or ℓ={ell} out of range", code.n)));
    }
    let kappa: Vec<Basis> = bob.theta_hat.iter().zip(code.word(w_server)).map(|(&t, &c)| basis_xor(t, c)).collect();
    let kappa_a = session.send(Party::B, "id-shift", &kappa)?;
    if kappa_a.len() != n {
        return Err(AbortReason::Malformed.into());
    }
    let f = sample_hash(n, ell, false, &mut rngs.alice)?;
    let (theta_b, f_b) = session.send(Party::A, "id-theta", &(alice.theta.clone(), f.clone()))?;
    if theta_b.len() != n {
        return Err(AbortReason::Malformed.into());
    }
    let g = sample_hash(code.index_bits(ell), ell, true, &mut rngs.bob)?;
    let g_a = session.send(Party::B, "id-g", &g)?;
    Ok(IdExchange { kappa_a, theta_b, f_a: f, f_b, g_a, g_b: g })
}

pub(crate) fn password_hash(g: &HashFunc, w: usize) -> Result<Vec<bool>> {
    apply_hash(g, &from_u64(w as u64, g.n.min(64))).map_err(malformed)
}

/// Shift, announcement of `θ` and `f`, Bob's `g`, Alice's `z`, Bob's
/// verdict.
pub fn id_run(
    session: &mut Session,
    alice: &AlicePrep,
    bob: &BobPrep,
    code: &Code,
    w_user: usize,
    w_server: usize,
    ell: usize,
    rngs: &mut PartyRngs,
) -> Result<IdOutcome> {
    if w_user >= code.len() {
        return Err(Error::param("password index outside the code"));
    }
    let ex = id_exchange(session, alice, bob, code, w_server, ell, rngs)?;
    let ia = i_w(&alice.theta, code.word(w_user), &ex.kappa_a);
    let za = xor(&apply_hash(&ex.f_a, &restrict(&alice.x, &ia))?, &password_hash(&ex.g_a, w_user)?);
    let z = session.send(Party::A, "id-z", &za)?;
    let ib = i_w(&ex.theta_b, code.word(w_server), &basis_kappa(bob, code, w_server));
    let expect =
        xor(&apply_hash(&ex.f_b, &restrict(&bob.x_hat, &ib)).map_err(malformed)?, &password_hash(&ex.g_b, w_server)?);
    Ok(IdOutcome { accepted: z == expect, kappa: ex.kappa_a, z })
}

fn basis_kappa(bob: &BobPrep, code: &Code, w: usize) -> Vec<Basis> {
    bob.theta_hat.iter().zip(code.word(w)).map(|(&t, &c)| basis_xor(t, c)).collect()
}

#[allow(clippy::too_many_arguments)]
pub fn run_id(
    session: &mut Session,
    channel: &ChannelConfig,
    code: &Code,
    w_user: usize,
    w_server: usize,
    ell: usize,
    rngs: &mut PartyRngs,
) -> Result<IdOutcome> {
    let (a, b) = bb84::run_bb84_preparation(session, code.n, channel, BobStrategy::Honest, &QubitTap::None, rngs)?;
    id_run(session, &a, &b, code, w_user, w_server, ell, rngs)
}

/// Compiled run on `m` qubits; `code` must have length `m − ⌈αm⌉`.
#[allow(clippy::too_many_arguments)]
pub fn run_compiled_id(
    session: &mut Session,
    m: usize,
    cfg: &CompilerConfig,
    channel: &ChannelConfig,
    code: &Code,
    w_user: usize,
    w_server: usize,
    ell: usize,
    rngs: &mut PartyRngs,
) -> Result<IdOutcome> {
    let (a, b) = bb84::run_bb84_preparation(session, m, channel, BobStrategy::Honest, &QubitTap::None, rngs)?;
    let v = bb84::compile_verification(session, &a, &b, cfg, rngs)?;
    id_run(session, &v.alice, &v.bob, code, w_user, w_server, ell, rngs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn random_code_has_distance() {
        let mut rng = seeded(1);
        let c = Code::random(64, 128, 0.25, &mut rng).unwrap();
        assert!(c.min_distance() >= 32);
        assert_eq!(c.decode(c.word(17)), 17);
        let mut noisy = c.word(5).to_vec();
        for b in noisy.iter_mut().take(10) {
            *b = basis_xor(*b, Basis::Cross);
        }
        assert_eq!(c.decode(&noisy), 5);
        assert_eq!(c.index_bits(8), 8);
        assert_eq!(Code::random(300, 32, 0.0, &mut rng).unwrap().index_bits(2), 9);
    }

    #[test]
    fn impossible_code_reported() {
        let mut rng = seeded(2);
        assert!(Code::random(20, 4, 1.0, &mut rng).is_err());
    }

    fn run(seed: u64, code: &Code, wa: usize, wb: usize) -> IdOutcome {
        let mut rng = seeded(seed);
        let mut rngs = PartyRngs::new(&mut rng);
        let mut s = Session::new(seed, plain_schedule());
        run_id(&mut s, &ChannelConfig::noiseless(), code, wa, wb, 8, &mut rngs).unwrap()
    }

    #[test]
    fn right_password_accepted() {
        let code = Code::random(16, 128, 0.25, &mut seeded(3)).unwrap();
        for seed in 0..200 {
            assert!(run(seed, &code, (seed % 16) as usize, (seed % 16) as usize).accepted);
        }
    }

    #[test]
    fn wrong_password_rarely_accepted() {
        let code = Code::random(16, 128, 0.25, &mut seeded(4)).unwrap();
        let accepted = (0..2000).filter(|&s| run(s, &code, 1, 2).accepted).count();
        assert!(accepted <= 8 + 40, "{accepted}");
    }

    #[test]
    fn compiled_run_accepts() {
        let mut rng = seeded(5);
        let cfg = CompilerConfig::with_defaults(0.02, &mut rng).unwrap();
        let code = Code::random(8, 128, 0.25, &mut rng).unwrap();
        for seed in 0..20 {
            let mut rngs = PartyRngs::new(&mut seeded(seed));
            let mut s = Session::new(0, full_compiled_schedule());
            let out =
                run_compiled_id(&mut s, 256, &cfg, &ChannelConfig::noiseless(), &code, 3, 3, 8, &mut rngs).unwrap();
            assert!(out.accepted);
        }
    }
}
