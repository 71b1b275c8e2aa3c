//! Preparation phase and the commit-and-open verification that turns it
//! into a protocol against a receiver who must measure on arrival.

use rand::Rng as _;

use crate::bits::random_bits;
use crate::error::{AbortReason, Error, Result};
use crate::mixedcommit::{gen_binding, lwe_commit, lwe_verify, CommitKey, LweCommitment, LweOpening, LweParams};
use crate::qchannel::{random_bases, send_bb84, Basis, ChannelConfig, StoredQubit};
use crate::rng::Rng;
use crate::session::{Party, Schedule, Session};

use super::{check_index_set, PartyRngs};

/// Alice's private strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlicePrep {
    pub x: Vec<bool>,
    pub theta: Vec<Basis>,
}

/// Bob's claimed bases and outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BobPrep {
    pub theta_hat: Vec<Basis>,
    pub x_hat: Vec<bool>,
}

impl AlicePrep {
    pub fn restrict(&self, idx: &[usize]) -> AlicePrep {
        AlicePrep { x: idx.iter().map(|&i| self.x[i]).collect(), theta: idx.iter().map(|&i| self.theta[i]).collect() }
    }
}

impl BobPrep {
    pub fn restrict(&self, idx: &[usize]) -> BobPrep {
        BobPrep {
            theta_hat: idx.iter().map(|&i| self.theta_hat[i]).collect(),
            x_hat: idx.iter().map(|&i| self.x_hat[i]).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BobStrategy {
    /// Measure each qubit in a random basis on arrival.
    Honest,
    /// Keep the qubits and commit to guessed bases and outcomes.
    DelayedMeasurement,
}

/// What an eavesdropper does to the qubits in transit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitTap {
    None,
    /// Measure and resend a random `fraction` of the qubits in `basis`.
    MeasureFixed {
        fraction: f64,
        basis: Basis,
    },
}

impl QubitTap {
    fn apply(&self, qs: &mut [StoredQubit], rng: &mut Rng) -> Result<()> {
        if let QubitTap::MeasureFixed { fraction, basis } = *self {
            if !(0.0..=1.0).contains(&fraction) {
                return Err(Error::param(format!("tap fraction {fraction} outside [0, 1]")));
            }
            for q in qs.iter_mut() {
                if rng.random_bool(fraction) {
                    q.intercept_resend(basis, rng)?;
                }
            }
        }
        Ok(())
    }
}

pub fn schedule() -> Schedule {
    Schedule::new().msg("bb84-qubits", Party::A)
}

pub fn compiler_schedule() -> Schedule {
    Schedule::new()
        .msg("cmp-commit", Party::B)
        .msg("cmp-test-set", Party::A)
        .msg("cmp-open", Party::B)
        .requires("bb84-qubits", "cmp-commit")
        .requires("cmp-commit", "cmp-test-set")
        .requires("cmp-test-set", "cmp-open")
}

/// Alice sends `m` random BB84 qubits; Bob handles them per `bob`.
pub fn run_bb84_preparation(
    session: &mut Session,
    m: usize,
    channel: &ChannelConfig,
    bob: BobStrategy,
    tap: &QubitTap,
    rngs: &mut PartyRngs,
) -> Result<(AlicePrep, BobPrep)> {
    if m < 8 {
        return Err(Error::param(format!("need at least 8 qubits, got {m}")));
    }
    let x = random_bits(m, &mut rngs.alice);
    let theta = random_bases(m, &mut rngs.alice);
    let mut qubits = send_bb84(&x, &theta, channel, &mut rngs.world)?;
    tap.apply(&mut qubits, &mut rngs.world)?;
    let announced: u64 = session.send(Party::A, "bb84-qubits", &(m as u64))?;
    if announced != qubits.len() as u64 {
        return Err(AbortReason::Malformed.into());
    }
    let theta_hat = random_bases(m, &mut rngs.bob);
    let x_hat = match bob {
        BobStrategy::Honest => {
            qubits.iter_mut().zip(&theta_hat).map(|(q, &b)| q.measure(b, &mut rngs.bob)).collect::<Result<_>>()?
        }
        BobStrategy::DelayedMeasurement => random_bits(m, &mut rngs.bob),
    };
    Ok((AlicePrep { x, theta }, BobPrep { theta_hat, x_hat }))
}

#[derive(Debug, Clone)]
pub struct CompilerConfig {
    pub alpha: f64,
    pub phi_prime: f64,
    pub key: CommitKey,
}

impl CompilerConfig {
    pub fn new(alpha: f64, phi_prime: f64, key: CommitKey) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param(format!("α={alpha} outside (0, 1)")));
        }
        if !(0.0..0.5).contains(&phi_prime) {
            return Err(Error::param(format!("φ′={phi_prime} outside [0, 1/2)")));
        }
        Ok(CompilerConfig { alpha, phi_prime, key })
    }

    /// Default test fraction ½ with a binding key from `rng`.
    pub fn with_defaults(phi_prime: f64, rng: &mut Rng) -> Result<Self> {
        CompilerConfig::new(0.5, phi_prime, gen_binding(&LweParams::default(), rng))
    }

    pub fn test_size(&self, m: usize) -> usize {
        ((self.alpha * m as f64).ceil() as usize).min(m.saturating_sub(1))
    }
}

/// Outcome of a successful verification.
#[derive(Debug, Clone)]
pub struct Verification {
    pub alice: AlicePrep,
    pub bob: BobPrep,
    /// The positions outside the test set, in increasing order.
    pub surviving: Vec<usize>,
    pub tested_matching: usize,
    pub test_errors: usize,
}

type PositionCommit = (LweCommitment, LweCommitment);
type PositionOpening = (LweOpening, LweOpening);

/// Bob commits to every `(θ̂ᵢ, x̂ᵢ)`, Alice picks a test set, Bob opens it,
/// Alice checks the openings and the error rate on matching bases. Both
/// keep the complement of the test set.
pub fn compile_verification(
    session: &mut Session,
    alice: &AlicePrep,
    bob: &BobPrep,
    cfg: &CompilerConfig,
    rngs: &mut PartyRngs,
) -> Result<Verification> {
    let m = alice.x.len();
    let (coms, opens): (Vec<PositionCommit>, Vec<PositionOpening>) = bob
        .theta_hat
        .iter()
        .zip(&bob.x_hat)
        .map(|(&t, &x)| {
            let (ct, ot) = lwe_commit(&cfg.key, t.bit(), &mut rngs.bob);
            let (cx, ox) = lwe_commit(&cfg.key, x, &mut rngs.bob);
            ((ct, cx), (ot, ox))
        })
        .unzip();
    let coms = session.send(Party::B, "cmp-commit", &coms)?;
    if coms.len() != m {
        return Err(AbortReason::Malformed.into());
    }

    let mut test = rand::seq::index::sample(&mut rngs.alice, m, cfg.test_size(m)).into_vec();
    test.sort_unstable();
    let test_b: Vec<usize> = session.send(Party::A, "cmp-test-set", &test)?;
    check_index_set(&test_b, m)?;
    let reply: Vec<PositionOpening> = test_b.iter().map(|&i| opens[i].clone()).collect();
    let reply = session.send(Party::B, "cmp-open", &reply)?;

    if reply.len() != test.len() {
        return Err(AbortReason::BadOpening.into());
    }
    let (mut matching, mut errors) = (0, 0);
    for (&i, (ot, ox)) in test.iter().zip(&reply) {
        let (ct, cx) = &coms[i];
        if !lwe_verify(&cfg.key, ct, ot) || !lwe_verify(&cfg.key, cx, ox) {
            return Err(AbortReason::BadOpening.into());
        }
        if Basis::from_bit(ot.bit) == alice.theta[i] {
            matching += 1;
            errors += usize::from(ox.bit != alice.x[i]);
        }
    }
    if matching > 0 && errors as f64 / matching as f64 > cfg.phi_prime {
        return Err(AbortReason::ErrorRate.into());
    }

    let in_test = |set: &[usize], i: usize| set.binary_search(&i).is_ok();
    let surviving: Vec<usize> = (0..m).filter(|&i| !in_test(&test, i)).collect();
    let bob_surviving: Vec<usize> = (0..m).filter(|&i| !in_test(&test_b, i)).collect();
    Ok(Verification {
        alice: alice.restrict(&surviving),
        bob: bob.restrict(&bob_surviving),
        surviving,
        tested_matching: matching,
        test_errors: errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn compiled_session() -> Session {
        Session::new(0, schedule().merge(&compiler_schedule()))
    }

    #[test]
    fn honest_matching_positions_agree() {
        let mut rngs = PartyRngs::new(&mut seeded(1));
        let mut s = Session::new(0, schedule());
        let (a, b) = run_bb84_preparation(
            &mut s,
            64,
            &ChannelConfig::noiseless(),
            BobStrategy::Honest,
            &QubitTap::None,
            &mut rngs,
        )
        .unwrap();
        for i in 0..64 {
            if a.theta[i] == b.theta_hat[i] {
                assert_eq!(a.x[i], b.x_hat[i]);
            }
        }
    }

    #[test]
    fn too_few_qubits_rejected() {
        let mut rngs = PartyRngs::new(&mut seeded(2));
        let mut s = Session::new(0, schedule());
        let e = run_bb84_preparation(
            &mut s,
            0,
            &ChannelConfig::noiseless(),
            BobStrategy::Honest,
            &QubitTap::None,
            &mut rngs,
        );
        assert!(matches!(e, Err(Error::Param(_))));
    }

    #[test]
    fn basis_agreement_concentrates() {
        let mut rngs = PartyRngs::new(&mut seeded(3));
        let mut s = Session::new(0, schedule());
        let m = 10_000;
        let (a, b) = run_bb84_preparation(
            &mut s,
            m,
            &ChannelConfig::noiseless(),
            BobStrategy::Honest,
            &QubitTap::None,
            &mut rngs,
        )
        .unwrap();
        let frac = a.theta.iter().zip(&b.theta_hat).filter(|(x, y)| x == y).count() as f64 / m as f64;
        assert!((frac - 0.5).abs() < 3.0 * 0.005);
    }

    #[test]
    fn test_set_before_commitments_is_a_schedule_violation() {
        let mut s = compiled_session();
        s.send(Party::A, "bb84-qubits", &8u64).unwrap();
        let e = s.send(Party::A, "cmp-test-set", &vec![0usize]).unwrap_err();
        assert!(matches!(e, Error::Schedule { round: 1, .. }));
    }

    fn verify_once(seed: u64, bob: BobStrategy, phi: f64, phi_prime: f64, m: usize) -> Result<Verification> {
        let mut rng = seeded(seed);
        let cfg = CompilerConfig::with_defaults(phi_prime, &mut rng).unwrap();
        let mut rngs = PartyRngs::new(&mut rng);
        let mut s = compiled_session().unrecorded();
        let (a, b) =
            run_bb84_preparation(&mut s, m, &ChannelConfig::new(phi).unwrap(), bob, &QubitTap::None, &mut rngs)?;
        compile_verification(&mut s, &a, &b, &cfg, &mut rngs)
    }

    #[test]
    fn honest_noiseless_always_accepted() {
        for seed in 0..100 {
            let v = verify_once(seed, BobStrategy::Honest, 0.0, 0.02, 64).unwrap();
            assert_eq!(v.test_errors, 0);
            assert_eq!(v.surviving.len(), 32);
            assert_eq!(v.alice.x.len(), v.bob.x_hat.len());
        }
    }

    #[test]
    fn noisy_honest_accepted_with_margin() {
        let runs = 200;
        let ok = (0..runs).filter(|&s| verify_once(100 + s, BobStrategy::Honest, 0.05, 0.08, 1024).is_ok()).count();
        assert!(ok as f64 / runs as f64 >= 0.95, "{ok}");
    }

    #[test]
    fn delayed_measurement_caught() {
        let runs = 100;
        let caught = (0..runs)
            .filter(|&s| {
                verify_once(500 + s, BobStrategy::DelayedMeasurement, 0.0, 0.02, 256)
                    .is_err_and(|e| e.abort_reason() == Some(AbortReason::ErrorRate))
            })
            .count();
        assert_eq!(caught, runs as usize);
    }

    #[test]
    fn eve_measuring_raises_error_rate() {
        let mut rng = seeded(9);
        let cfg = CompilerConfig::with_defaults(0.005, &mut rng).unwrap();
        let tap = QubitTap::MeasureFixed { fraction: 0.5, basis: Basis::Plus };
        let mut rngs = PartyRngs::new(&mut rng);
        let mut s = compiled_session();
        let (a, b) =
            run_bb84_preparation(&mut s, 512, &ChannelConfig::noiseless(), BobStrategy::Honest, &tap, &mut rngs)
                .unwrap();
        let e = compile_verification(&mut s, &a, &b, &cfg, &mut rngs).unwrap_err();
        assert_eq!(e.abort_reason(), Some(AbortReason::ErrorRate));
    }
}
