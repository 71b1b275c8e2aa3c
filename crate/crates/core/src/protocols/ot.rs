//! 1-out-of-2 oblivious transfer of ℓ-bit strings.

use serde::{Deserialize, Serialize};

use crate::bits::{random_bits, xor};
use crate::error::{AbortReason, Error, Result};
use crate::hashing::{apply_hash, sample_hash, HashFunc};
use crate::qchannel::{random_bases, receiver_bounded_storage, send_bb84, ChannelConfig, ImmediateBases};
use crate::session::{Party, Schedule, Session};

use super::bb84::{self, AlicePrep, BobPrep, BobStrategy, CompilerConfig, QubitTap};
use super::{check_index_set, compiled_schedule, malformed, PartyRngs};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OtInputs {
    pub s0: Vec<bool>,
    pub s1: Vec<bool>,
    pub k: bool,
}

impl OtInputs {
    pub fn random(ell: usize, rng: &mut crate::rng::Rng) -> Self {
        use rand::Rng as _;
        OtInputs { s0: random_bits(ell, rng), s1: random_bits(ell, rng), k: rng.random() }
    }

    pub fn ell(&self) -> usize {
        self.s0.len()
    }

    pub fn chosen(&self) -> &[bool] {
        if self.k {
            &self.s1
        } else {
            &self.s0
        }
    }
}

/// `⌊λn⌋`.
pub fn output_length(n: usize, lambda: f64) -> usize {
    (lambda * n as f64 + 1e-9).floor() as usize
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtOutcome {
    pub received: Vec<bool>,
    /// `(I₀, I₁)` as Alice saw them.
    pub partition: (Vec<usize>, Vec<usize>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Masked {
    f0: HashFunc,
    f1: HashFunc,
    m0: Vec<bool>,
    m1: Vec<bool>,
}

pub fn schedule() -> Schedule {
    Schedule::new()
        .msg("ot-theta", Party::A)
        .msg("ot-partition", Party::B)
        .msg("ot-mask", Party::A)
        .requires("bb84-qubits", "ot-theta")
        .requires("ot-theta", "ot-partition")
        .requires("ot-partition", "ot-mask")
}

pub fn plain_schedule() -> Schedule {
    bb84::schedule().merge(&schedule())
}

pub fn full_compiled_schedule() -> Schedule {
    compiled_schedule(&schedule(), "ot-theta")
}

fn restrict(x: &[bool], idx: &[usize]) -> Vec<bool> {
    idx.iter().map(|&i| x[i]).collect()
}

fn alice_mask(
    session: &mut Session,
    alice: &AlicePrep,
    inputs: &OtInputs,
    partition: &(Vec<usize>, Vec<usize>),
    rngs: &mut PartyRngs,
) -> Result<Masked> {
    let n = alice.x.len();
    let (i0, i1) = partition;
    check_index_set(i0, n)?;
    check_index_set(i1, n)?;
    let mut all: Vec<usize> = i0.iter().chain(i1).copied().collect();
    all.sort_unstable();
    if all != (0..n).collect::<Vec<_>>() {
        return Err(AbortReason::Malformed.into());
    }
    let ell = inputs.ell();
    let f0 = sample_hash(n, ell, false, &mut rngs.alice)?;
    let f1 = sample_hash(n, ell, false, &mut rngs.alice)?;
    let m0 = xor(&inputs.s0, &apply_hash(&f0, &restrict(&alice.x, i0))?);
    let m1 = xor(&inputs.s1, &apply_hash(&f1, &restrict(&alice.x, i1))?);
    session.send(Party::A, "ot-mask", &Masked { f0, f1, m0, m1 })
}

/// Announcement of `θ`, Bob's partition into `I_k` (matching bases) and
/// `I_{1−k}`, Alice's masked strings, and Bob's unmasking.
pub fn ot_postprocess(
    session: &mut Session,
    alice: &AlicePrep,
    bob: &BobPrep,
    inputs: &OtInputs,
    rngs: &mut PartyRngs,
) -> Result<OtOutcome> {
    let n = alice.x.len();
    let ell = inputs.ell();
    if ell == 0 || ell > n || inputs.s1.len() != ell {
        return Err(Error::param(format!("need 1 ≤ ℓ ≤ n={n} and |s₀| = |s₁|")));
    }
    let theta = session.send(Party::A, "ot-theta", &alice.theta)?;
    if theta.len() != bob.theta_hat.len() {
        return Err(AbortReason::Malformed.into());
    }
    let (good, bad): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| theta[i] == bob.theta_hat[i]);
    if good.len() < ell {
        return Err(AbortReason::ShortSet.into());
    }
    let good_set = good.clone();
    let partition = if inputs.k { (bad, good) } else { (good, bad) };
    let seen = session.send(Party::B, "ot-partition", &partition)?;
    let masked = alice_mask(session, alice, inputs, &seen, rngs)?;
    let (f, m) = if inputs.k { (&masked.f1, &masked.m1) } else { (&masked.f0, &masked.m0) };
    let h = apply_hash(f, &restrict(&bob.x_hat, &good_set)).map_err(malformed)?;
    if m.len() != h.len() {
        return Err(AbortReason::Malformed.into());
    }
    Ok(OtOutcome { received: xor(m, &h), partition: seen })
}

/// Plain protocol on `n` qubits with an honest receiver.
pub fn run_ot(
    session: &mut Session,
    n: usize,
    channel: &ChannelConfig,
    inputs: &OtInputs,
    rngs: &mut PartyRngs,
) -> Result<OtOutcome> {
    let (a, b) = bb84::run_bb84_preparation(session, n, channel, BobStrategy::Honest, &QubitTap::None, rngs)?;
    ot_postprocess(session, &a, &b, inputs, rngs)
}

/// Compiled protocol on `m` qubits.
pub fn run_compiled_ot(
    session: &mut Session,
    m: usize,
    cfg: &CompilerConfig,
    channel: &ChannelConfig,
    inputs: &OtInputs,
    bob: BobStrategy,
    rngs: &mut PartyRngs,
) -> Result<OtOutcome> {
    let (a, b) = bb84::run_bb84_preparation(session, m, channel, bob, &QubitTap::None, rngs)?;
    let v = bb84::compile_verification(session, &a, &b, cfg, rngs)?;
    ot_postprocess(session, &v.alice, &v.bob, inputs, rngs)
}

/// A receiver that keeps `⌊γn⌋` qubits until `θ` is announced, measures
/// the rest in random bases, spreads what it knows evenly over `I₀` and
/// `I₁`, and guesses `s₁` from its own bits. Returns whether the guess
/// was right.
pub fn ot_storage_attack(n: usize, gamma: f64, lambda: f64, rngs: &mut PartyRngs) -> Result<bool> {
    let ell = output_length(n, lambda);
    let inputs = OtInputs { s0: random_bits(ell, &mut rngs.alice), s1: random_bits(ell, &mut rngs.alice), k: false };
    let mut session = Session::new(0, plain_schedule()).unrecorded();
    let x = random_bits(n, &mut rngs.alice);
    let theta = random_bases(n, &mut rngs.alice);
    let qubits = send_bb84(&x, &theta, &ChannelConfig::noiseless(), &mut rngs.world)?;
    session.send(Party::A, "bb84-qubits", &(n as u64))?;
    let mut view = receiver_bounded_storage(qubits, gamma, ImmediateBases::Random, &mut rngs.bob)?;
    let theta_b = session.send(Party::A, "ot-theta", &theta)?;
    view.announce(&theta_b, &mut rngs.bob)?;
    let known = view.known_positions(&theta_b);
    let unknown: Vec<usize> = (0..n).filter(|i| known.binary_search(i).is_err()).collect();
    let (mut i0, mut i1) = (Vec::new(), Vec::new());
    for (j, &i) in known.iter().chain(&unknown).enumerate() {
        if j % 2 == 0 { &mut i0 } else { &mut i1 }.push(i);
    }
    i0.sort_unstable();
    i1.sort_unstable();
    let partition = session.send(Party::B, "ot-partition", &(i0, i1.clone()))?;
    let alice = AlicePrep { x, theta };
    let masked = alice_mask(&mut session, &alice, &inputs, &partition, rngs)?;
    let own: Vec<bool> = i1.iter().map(|&i| view.learned[i].as_ref().is_some_and(|l| l.bit)).collect();
    let guess = xor(&masked.m1, &apply_hash(&masked.f1, &own)?);
    Ok(guess == inputs.s1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn honest(seed: u64, n: usize, k: bool) -> (OtInputs, OtOutcome) {
        let mut rng = seeded(seed);
        let mut inputs = OtInputs::random(output_length(n, 0.1), &mut rng);
        inputs.k = k;
        let mut rngs = PartyRngs::new(&mut rng);
        let mut s = Session::new(seed, plain_schedule());
        let out = run_ot(&mut s, n, &ChannelConfig::noiseless(), &inputs, &mut rngs).unwrap();
        (inputs, out)
    }

    #[test]
    fn receiver_gets_chosen_string() {
        for seed in 0..200 {
            let (inputs, out) = honest(seed, 128, seed % 2 == 0);
            assert_eq!(out.received, inputs.chosen());
        }
    }

    #[test]
    fn partition_covers_everything() {
        let (_, out) = honest(7, 64, true);
        let mut all: Vec<usize> = out.partition.0.iter().chain(&out.partition.1).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..64).collect::<Vec<_>>());
    }

    #[test]
    fn short_set_aborts() {
        let mut rng = seeded(8);
        let inputs = OtInputs::random(8, &mut rng);
        let mut rngs = PartyRngs::new(&mut rng);
        let mut s = Session::new(0, plain_schedule());
        let e = run_ot(&mut s, 8, &ChannelConfig::noiseless(), &inputs, &mut rngs).unwrap_err();
        assert_eq!(e.abort_reason(), Some(AbortReason::ShortSet));
    }

    #[test]
    fn compiled_postprocessing_replays_plain() {
        let mut rng = seeded(9);
        let cfg = CompilerConfig::with_defaults(0.02, &mut rng).unwrap();
        for seed in 0..20 {
            let mut rng = seeded(seed);
            let inputs = OtInputs::random(12, &mut rng);
            let mut rngs = PartyRngs::new(&mut rng);
            let mut s = Session::new(0, full_compiled_schedule());
            let (a, b) = bb84::run_bb84_preparation(
                &mut s,
                256,
                &ChannelConfig::noiseless(),
                BobStrategy::Honest,
                &QubitTap::None,
                &mut rngs,
            )
            .unwrap();
            let v = bb84::compile_verification(&mut s, &a, &b, &cfg, &mut rngs).unwrap();
            let mut replay_rngs = rngs.clone();
            let before = s.rounds();
            let compiled = ot_postprocess(&mut s, &v.alice, &v.bob, &inputs, &mut rngs).unwrap();
            let mut plain = Session::new(0, schedule().merge(&bb84::schedule()));
            plain.send(Party::A, "bb84-qubits", &128u64).unwrap();
            let replay = ot_postprocess(&mut plain, &v.alice, &v.bob, &inputs, &mut replay_rngs).unwrap();
            assert_eq!(compiled, replay);
            assert_eq!(compiled.received, inputs.chosen());
            let payloads =
                |t: &[crate::session::TranscriptRecord]| t.iter().map(|r| r.payload.clone()).collect::<Vec<_>>();
            assert_eq!(payloads(&s.transcript()[before..]), payloads(&plain.transcript()[1..]));
        }
    }

    #[test]
    fn full_storage_learns_everything() {
        let mut rngs = PartyRngs::new(&mut seeded(10));
        assert!(ot_storage_attack(64, 1.0, 0.1, &mut rngs).unwrap());
    }

    #[test]
    fn no_storage_learns_nothing() {
        let mut rngs = PartyRngs::new(&mut seeded(11));
        let wins = (0..200).filter(|_| ot_storage_attack(64, 0.0, 0.1, &mut rngs).unwrap()).count();
        assert!(wins <= 12, "{wins}");
    }
}
