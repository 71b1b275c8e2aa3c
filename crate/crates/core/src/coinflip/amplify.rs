use serde::{Deserialize, Serialize};

use crate::bits::xor;
use crate::error::{AbortReason, Error, Result};
use crate::fieldmath::FieldElem;
use crate::mixedcommit::{
    binding_key_string, key_from_string, lwe_commit, lwe_extract, lwe_verify, CommitKey, LweCommitment, LweOpening,
    LweParams, NaorParams, NaorTable, SEED_BITS,
};
use crate::rng::{fork, Rng};
use crate::session::{Party, Schedule, Session};
use crate::ssscommit::{
    bits_for_challenge, challenge_from_bits, commit_phase, extract_commitment, max_agreement_claim, open_positions,
    random_challenge, reveal_shares, sss_reconstruct, trapdoor_shares, verify_positions, CommitterState, SssCommitment,
    SssParams, CHALLENGE_BITS,
};

use super::single::{coin_sequential, enforce_against_alice, CoinScheme, CoinWire, Extractor};
use super::{Committer, HonestCommitter, HonestResponder, OpenChoice, Responder};

/// How many bits the flipped key string has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeyStringMode {
    /// A 256-bit seed expanded into the whole key.
    Seeded,
    /// Seed for `A` plus every `b_i` spelled out, so a simulator can force
    /// a binding key.
    Trapdoorable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmpConfig {
    pub naor: NaorParams,
    pub lwe: LweParams,
    pub key_mode: KeyStringMode,
}

impl AmpConfig {
    pub fn new(key_mode: KeyStringMode) -> Self {
        AmpConfig { naor: NaorParams::default(), lwe: LweParams::default(), key_mode }
    }

    pub fn key_len(&self) -> usize {
        match self.key_mode {
            KeyStringMode::Seeded => SEED_BITS,
            KeyStringMode::Trapdoorable => self.lwe.trapdoor_string_len(),
        }
    }

    fn require_trapdoor(&self) -> Result<()> {
        if self.key_mode != KeyStringMode::Trapdoorable {
            return Err(Error::Config("simulation needs trapdoorable key strings".into()));
        }
        Ok(())
    }
}

impl Default for AmpConfig {
    fn default() -> Self {
        AmpConfig::new(KeyStringMode::Seeded)
    }
}

/// Message names of an amplified flip: the base coins for the key, then
/// the committed string. `main.r` is unused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmpWire {
    pub base: CoinWire,
    pub main: CoinWire,
}

impl AmpWire {
    pub fn schedule(&self) -> Schedule {
        let m = &self.main;
        self.base
            .schedule()
            .merge(
                &Schedule::new()
                    .msg(m.commit, m.committer)
                    .msg(m.b, m.responder())
                    .msg(m.open, m.committer)
                    .requires(m.commit, m.b)
                    .requires(m.b, m.open),
            )
            .requires(self.base.open, m.commit)
    }
}

const fn wire(committer: Party, names: [&'static str; 8]) -> AmpWire {
    AmpWire {
        base: CoinWire { committer, r: names[0], commit: names[1], b: names[2], open: names[3] },
        main: CoinWire { committer, r: names[4], commit: names[5], b: names[6], open: names[7] },
    }
}

pub const FR_WIRE: AmpWire =
    wire(Party::A, ["fc-r", "fc-commit", "fc-b", "fc-open", "fr-r", "fr-commit", "fr-b", "fr-open"]);
/// Key flip inside the strong protocol; Alice commits.
pub const KEY_WIRE: AmpWire =
    wire(Party::A, ["kc-r", "kc-commit", "kc-b", "kc-open", "kf-r", "kf-commit", "kf-b", "kf-open"]);
/// Challenge flip inside the strong protocol; Bob commits.
pub const S_WIRE: AmpWire =
    wire(Party::B, ["sc-r", "sc-commit", "sc-b", "sc-open", "sf-r", "sf-commit", "sf-b", "sf-open"]);

/// Commit to `ell` bits under `key`, take the responder's bits from
/// `respond`, open. Returns the xor as the responder computes it.
fn main_step<C: Committer>(
    session: &mut Session,
    key: &CommitKey,
    wire: &CoinWire,
    ell: usize,
    committer: &mut C,
    mut respond: impl FnMut(usize, &LweCommitment) -> Result<bool>,
) -> Result<Vec<bool>> {
    let a: Vec<bool> = (0..ell).map(|i| committer.choose(i)).collect();
    let (coms, opens): (Vec<LweCommitment>, Vec<LweOpening>) =
        a.iter().map(|&x| lwe_commit(key, x, committer.rng())).unzip();
    let coms: Vec<LweCommitment> = session.send(wire.committer, wire.commit, &coms)?;
    if coms.len() != ell {
        return Err(AbortReason::Malformed.into());
    }
    let b = coms.iter().enumerate().map(|(i, c)| respond(i, c)).collect::<Result<Vec<bool>>>()?;
    let b_seen: Vec<bool> = session.send(wire.responder(), wire.b, &b)?;
    if b_seen.len() != ell {
        return Err(AbortReason::Malformed.into());
    }
    let mut reply = Some(Vec::with_capacity(ell));
    for (i, mut o) in opens.into_iter().enumerate() {
        match committer.open(i, a[i], b_seen[i]) {
            OpenChoice::Honest => {}
            OpenChoice::Flip => o.bit = !o.bit,
            OpenChoice::Refuse => {
                reply = None;
                break;
            }
        }
        if let Some(r) = reply.as_mut() {
            r.push(o);
        }
    }
    let got: Option<Vec<LweOpening>> = session.send(wire.committer, wire.open, &reply)?;
    let got = got.ok_or(AbortReason::Refusal)?;
    if got.len() != ell || !coms.iter().zip(&got).all(|(c, o)| lwe_verify(key, c, o)) {
        return Err(AbortReason::BadOpening.into());
    }
    Ok(got.iter().zip(&b).map(|(o, &bi)| o.bit ^ bi).collect())
}

fn com_bytes(c: &LweCommitment) -> Vec<u8> {
    bincode::serialize(c).expect("commitments serialize")
}

/// Flip a key string with sequential Naor coins, then flip `ell` bits by
/// committing under the key derived from it.
pub fn force_random<C: Committer, R: Responder>(
    session: &mut Session,
    cfg: &AmpConfig,
    wire: &AmpWire,
    ell: usize,
    committer: &mut C,
    responder: &mut R,
) -> Result<Vec<bool>> {
    let pk = coin_sequential(session, &CoinScheme::Naor(cfg.naor), &wire.base, cfg.key_len(), committer, responder)?;
    let key = key_from_string(&cfg.lwe, &pk)?;
    main_step(session, &key, &wire.main, ell, committer, |i, c| Ok(responder.respond(i, &com_bytes(c))))
}

/// Simulator against a corrupted committer: force the key string to a
/// binding key, read the committed bits with its trapdoor, and answer so
/// the outcome is `target`.
pub fn simulate_force_random_against_committer<C: Committer>(
    session: &mut Session,
    cfg: &AmpConfig,
    wire: &AmpWire,
    target: &[bool],
    committer: &mut C,
    rng: &mut Rng,
) -> Result<Vec<bool>> {
    cfg.require_trapdoor()?;
    let (bits, bkey) = binding_key_string(&cfg.lwe, rng);
    let table = NaorTable::get(cfg.naor)?;
    let pk = enforce_against_alice(session, &Extractor::Naor(table), &wire.base, &bits, committer, rng)?;
    let key = key_from_string(&cfg.lwe, &pk)?;
    main_step(session, &key, &wire.main, target.len(), committer, |i, c| Ok(target[i] ^ lwe_extract(&bkey, c)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FfConfig {
    pub amp: AmpConfig,
    pub sss: SssParams,
    pub ell: usize,
}

impl FfConfig {
    pub fn new(ell: usize, sigma: usize, key_mode: KeyStringMode) -> Result<Self> {
        let sss = SssParams::for_sigma(sigma)?;
        if ell == 0 || ell > sss.message_bits() {
            return Err(Error::param(format!("ℓ={ell} must be in 1..={}", sss.message_bits())));
        }
        Ok(FfConfig { amp: AmpConfig::new(key_mode), sss, ell })
    }

    pub fn schedule(&self) -> Schedule {
        KEY_WIRE.schedule().merge(&S_WIRE.schedule()).merge(
            &Schedule::new()
                .msg("sss-commit", Party::A)
                .msg("ff-b", Party::B)
                .msg("sss-shares", Party::A)
                .msg("sss-open", Party::A)
                .requires(KEY_WIRE.main.open, "sss-commit")
                .requires("sss-commit", "ff-b")
                .requires("ff-b", "sss-shares")
                .requires("sss-shares", S_WIRE.base.r)
                .requires(S_WIRE.main.open, "sss-open"),
        )
    }
}

/// `ℓ` bits as field elements, `κ` bits each, zero padded.
pub fn encode_message(params: &SssParams, bits: &[bool]) -> Vec<FieldElem> {
    let k = params.kappa as usize;
    (0..params.sigma)
        .map(|i| {
            let chunk: Vec<bool> = (0..k).map(|j| bits.get(i * k + j).copied().unwrap_or(false)).collect();
            FieldElem::from_bits(&chunk).expect("κ bits")
        })
        .collect()
}

fn decode_message(m: &[FieldElem], ell: usize) -> Vec<bool> {
    m.iter().flat_map(|x| x.to_bits()).take(ell).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FfBehaviour {
    Honest,
    /// Reveal a consistent sharing of another message that agrees with
    /// the commitment on `2σ − 1` positions.
    MaxAgreement,
    Refuse,
}

/// The committing side of the strong flip.
#[derive(Clone)]
pub struct FfAlice {
    pub rng: Rng,
    pub behaviour: FfBehaviour,
}

impl FfAlice {
    pub fn new(rng: Rng, behaviour: FfBehaviour) -> Self {
        FfAlice { rng, behaviour }
    }

    fn key_committer(&mut self) -> HonestCommitter {
        HonestCommitter { rng: fork(&mut self.rng, "key-flip") }
    }

    fn s_responder(&mut self) -> HonestResponder {
        HonestResponder { rng: fork(&mut self.rng, "s-flip") }
    }

    fn commit(&mut self, cfg: &FfConfig, key: &CommitKey) -> Result<(SssCommitment, CommitterState)> {
        let a = crate::bits::random_bits(cfg.ell, &mut self.rng);
        commit_phase(&cfg.sss, key, &encode_message(&cfg.sss, &a), &mut self.rng)
    }

    fn claim(&mut self, cfg: &FfConfig, state: &CommitterState) -> Result<Vec<FieldElem>> {
        match self.behaviour {
            FfBehaviour::Honest => Ok(state.committed.clone()),
            FfBehaviour::MaxAgreement => Ok(max_agreement_claim(&cfg.sss, &state.committed, &mut self.rng)),
            FfBehaviour::Refuse => Err(AbortReason::Refusal.into()),
        }
    }
}

/// The responding side; `respond` picks the bits sent after the
/// commitment.
#[derive(Clone)]
pub struct FfBob<R> {
    pub rng: Rng,
    pub respond: R,
}

impl<R: Responder> FfBob<R> {
    pub fn new(rng: Rng, respond: R) -> Self {
        FfBob { rng, respond }
    }

    fn key_responder(&mut self) -> HonestResponder {
        HonestResponder { rng: fork(&mut self.rng, "key-flip") }
    }

    fn s_committer(&mut self) -> HonestCommitter {
        HonestCommitter { rng: fork(&mut self.rng, "s-flip") }
    }

    fn answer(&mut self, ell: usize, com: &SssCommitment) -> Vec<bool> {
        let bytes = bincode::serialize(com).expect("commitments serialize");
        (0..ell).map(|i| self.respond.respond(i, &bytes)).collect()
    }
}

fn shares_indexed(shares: &[FieldElem]) -> Vec<(usize, FieldElem)> {
    shares.iter().copied().enumerate().collect()
}

fn send_b(session: &mut Session, b: &[bool]) -> Result<Vec<bool>> {
    let got: Vec<bool> = session.send(Party::B, "ff-b", &b.to_vec())?;
    if got.len() != b.len() {
        return Err(AbortReason::Malformed.into());
    }
    Ok(got)
}

/// Bob's side of the last steps: open the challenged positions, check
/// them, and xor the reconstructed message with `b`.
#[allow(clippy::too_many_arguments)]
fn finish(
    session: &mut Session,
    cfg: &FfConfig,
    key: &CommitKey,
    com: &SssCommitment,
    shares: &[FieldElem],
    state: &CommitterState,
    subset: &[usize],
    b: &[bool],
) -> Result<Vec<bool>> {
    let opened = open_positions(session, state, subset)?;
    verify_positions(key, com, shares, subset, &opened)?;
    let m = sss_reconstruct(&cfg.sss, &shares_indexed(shares))?;
    Ok(xor(&decode_message(&m, cfg.ell), b))
}

/// The strong flip: a flipped key, a secret-sharing commitment to `a`,
/// Bob's `b`, the full share vector, a challenge flipped with the roles
/// swapped, and the opening of the challenged shares. Returns Bob's
/// `a ⊕ b`.
pub fn force_force<R: Responder>(
    session: &mut Session,
    cfg: &FfConfig,
    alice: &mut FfAlice,
    bob: &mut FfBob<R>,
) -> Result<Vec<bool>> {
    let (mut kc, mut kr) = (alice.key_committer(), bob.key_responder());
    let pk = force_random(session, &cfg.amp, &KEY_WIRE, cfg.amp.key_len(), &mut kc, &mut kr)?;
    let key = key_from_string(&cfg.amp.lwe, &pk)?;
    let (com, state) = alice.commit(cfg, &key)?;
    let com_b: SssCommitment = session.send(Party::A, "sss-commit", &com)?;
    let b = bob.answer(cfg.ell, &com_b);
    send_b(session, &b)?;
    let claimed = alice.claim(cfg, &state)?;
    let shares = reveal_shares(session, &cfg.sss, &claimed)?;
    let (mut sc, mut sr) = (bob.s_committer(), alice.s_responder());
    let s_bits = force_random(session, &cfg.amp, &S_WIRE, CHALLENGE_BITS, &mut sc, &mut sr)?;
    let subset = challenge_from_bits(&cfg.sss, &s_bits)?;
    finish(session, cfg, &key, &com_b, &shares, &state, &subset, &b)
}

/// Simulator against a corrupted Bob: commit to garbage, pick the
/// challenge in advance, reveal shares fabricated for `target ⊕ b` that
/// agree with the commitment on the challenge, then force the challenge
/// flip (where Bob commits) to that challenge.
pub fn simulate_force_force_against_bob<R: Responder>(
    session: &mut Session,
    cfg: &FfConfig,
    target: &[bool],
    bob: &mut FfBob<R>,
    rng: &mut Rng,
) -> Result<Vec<bool>> {
    cfg.amp.require_trapdoor()?;
    let mut sim = FfAlice::new(fork(rng, "sim-alice"), FfBehaviour::Honest);
    let (mut kc, mut kr) = (sim.key_committer(), bob.key_responder());
    let pk = force_random(session, &cfg.amp, &KEY_WIRE, cfg.amp.key_len(), &mut kc, &mut kr)?;
    let key = key_from_string(&cfg.amp.lwe, &pk)?;
    let (com, state) = sim.commit(cfg, &key)?;
    let com_b: SssCommitment = session.send(Party::A, "sss-commit", &com)?;
    let b = bob.answer(cfg.ell, &com_b);
    let b_seen = send_b(session, &b)?;
    let want = xor(target, &b_seen);
    let subset = random_challenge(&cfg.sss, rng);
    let fake = trapdoor_shares(&cfg.sss, &state.committed, &encode_message(&cfg.sss, &want), &subset)?;
    let shares = reveal_shares(session, &cfg.sss, &fake)?;
    let mut sc = bob.s_committer();
    let forced = bits_for_challenge(&cfg.sss, &subset, rng)?;
    let s_bits = simulate_force_random_against_committer(session, &cfg.amp, &S_WIRE, &forced, &mut sc, rng)?;
    let got = challenge_from_bits(&cfg.sss, &s_bits)?;
    finish(session, cfg, &key, &com_b, &shares, &state, &got, &b)
}

/// Simulator against a corrupted Alice: force the key flip to a binding
/// key, extract the committed message with its trapdoor, and answer with
/// `b = target ⊕ a`. The rest runs as an honest Bob would.
pub fn simulate_force_force_against_alice(
    session: &mut Session,
    cfg: &FfConfig,
    target: &[bool],
    alice: &mut FfAlice,
    rng: &mut Rng,
) -> Result<Vec<bool>> {
    cfg.amp.require_trapdoor()?;
    let (bits, bkey) = binding_key_string(&cfg.amp.lwe, rng);
    let mut kc = alice.key_committer();
    let pk = simulate_force_random_against_committer(session, &cfg.amp, &KEY_WIRE, &bits, &mut kc, rng)?;
    let key = key_from_string(&cfg.amp.lwe, &pk)?;
    let (com, state) = alice.commit(cfg, &key)?;
    let com_b: SssCommitment = session.send(Party::A, "sss-commit", &com)?;
    let ext = extract_commitment(&cfg.sss, &bkey, &com_b)?;
    let b = xor(target, &decode_message(&ext.message, cfg.ell));
    send_b(session, &b)?;
    let claimed = alice.claim(cfg, &state)?;
    let shares = reveal_shares(session, &cfg.sss, &claimed)?;
    let mut sc = HonestCommitter { rng: fork(rng, "s-flip") };
    let mut sr = alice.s_responder();
    let s_bits = force_random(session, &cfg.amp, &S_WIRE, CHALLENGE_BITS, &mut sc, &mut sr)?;
    let subset = challenge_from_bits(&cfg.sss, &s_bits)?;
    finish(session, cfg, &key, &com_b, &shares, &state, &subset, &b)
}
