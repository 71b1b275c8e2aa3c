use std::sync::Arc;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{AbortReason, Error, Result};
use crate::mixedcommit::{
    lwe_commit, lwe_extract, lwe_verify, naor_commit, naor_verify, CommitKey, Extracted, LweCommitment, LweOpening,
    NaorParams, NaorTable,
};
use crate::rng::Rng;
use crate::session::{Party, Schedule, Session};

use super::{Committer, OpenChoice, Responder};

/// How a single coin commits to the committer's bit.
#[derive(Debug, Clone)]
pub enum CoinScheme {
    Naor(NaorParams),
    Lwe(CommitKey),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoinCom {
    Naor(Vec<bool>),
    Lwe(LweCommitment),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoinOpen {
    Naor { a: bool, seed: u64 },
    Lwe(LweOpening),
}

impl CoinOpen {
    fn flipped(mut self) -> Self {
        match &mut self {
            CoinOpen::Naor { a, .. } => *a = !*a,
            CoinOpen::Lwe(o) => o.bit = !o.bit,
        }
        self
    }
}

/// Message names and the committing side of one coin flip, so the same
/// code runs in either direction inside a larger protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoinWire {
    pub committer: Party,
    pub r: &'static str,
    pub commit: &'static str,
    pub b: &'static str,
    pub open: &'static str,
}

pub const COIN: CoinWire =
    CoinWire { committer: Party::A, r: "coin-r", commit: "coin-commit", b: "coin-b", open: "coin-open" };

impl CoinWire {
    pub fn responder(&self) -> Party {
        self.committer.other()
    }

    pub fn schedule(&self) -> Schedule {
        Schedule::new()
            .msg(self.r, self.responder())
            .msg(self.commit, self.committer)
            .msg(self.b, self.responder())
            .msg(self.open, self.committer)
            .requires(self.commit, self.b)
            .requires(self.b, self.open)
    }
}

fn commit_bit(scheme: &CoinScheme, a: bool, rb: Option<&[bool]>, rng: &mut Rng) -> Result<(CoinCom, CoinOpen)> {
    match scheme {
        CoinScheme::Naor(p) => {
            let seed = p.random_seed(rng);
            let rb = rb.ok_or_else(|| Error::usage("Naor commitment needs a receiver vector"))?;
            Ok((CoinCom::Naor(naor_commit(p, a, seed, rb)?), CoinOpen::Naor { a, seed }))
        }
        CoinScheme::Lwe(key) => {
            let (c, o) = lwe_commit(key, a, rng);
            Ok((CoinCom::Lwe(c), CoinOpen::Lwe(o)))
        }
    }
}

/// The opened bit, if the opening is valid.
fn verify_bit(scheme: &CoinScheme, com: &CoinCom, rb: Option<&[bool]>, open: &CoinOpen) -> Option<bool> {
    match (scheme, com, open) {
        (CoinScheme::Naor(p), CoinCom::Naor(c), CoinOpen::Naor { a, seed }) => {
            naor_verify(p, c, rb?, *a, *seed).then_some(*a)
        }
        (CoinScheme::Lwe(key), CoinCom::Lwe(c), CoinOpen::Lwe(o)) => lwe_verify(key, c, o).then_some(o.bit),
        _ => None,
    }
}

fn com_bytes(com: &CoinCom) -> Vec<u8> {
    bincode::serialize(com).expect("commitments serialize")
}

fn send_receiver_vector<R: Responder>(
    session: &mut Session,
    scheme: &CoinScheme,
    wire: &CoinWire,
    bob: &mut R,
) -> Result<(Option<Vec<bool>>, Option<Vec<bool>>)> {
    match scheme {
        CoinScheme::Naor(p) => {
            let rb = bob.receiver_vector(p.out_len());
            let got: Vec<bool> = session.send(wire.responder(), wire.r, &rb)?;
            if got.len() != p.out_len() {
                return Err(AbortReason::Malformed.into());
            }
            Ok((Some(rb), Some(got)))
        }
        CoinScheme::Lwe(_) => Ok((None, None)),
    }
}

/// The response phase after the commitment: the responder's bit, then the
/// opening. Returns the coin as the responder computes it.
fn finish<C: Committer, R: Responder>(
    session: &mut Session,
    scheme: &CoinScheme,
    wire: &CoinWire,
    round: usize,
    com: &CoinCom,
    open: CoinOpen,
    a: bool,
    rb: Option<&[bool]>,
    alice: &mut C,
    bob: &mut R,
) -> Result<bool> {
    let b = bob.respond(round, &com_bytes(com));
    let b_seen: bool = session.send(wire.responder(), wire.b, &b)?;
    let reply = match alice.open(round, a, b_seen) {
        OpenChoice::Honest => Some(open),
        OpenChoice::Refuse => None,
        OpenChoice::Flip => Some(open.flipped()),
    };
    let got: Option<CoinOpen> = session.send(wire.committer, wire.open, &reply)?;
    let open = got.ok_or(AbortReason::Refusal)?;
    let a_opened = verify_bit(scheme, com, rb, &open).ok_or(AbortReason::BadOpening)?;
    Ok(a_opened ^ b)
}

/// One coin: receiver vector (Naor only), commitment to `a`, the
/// responder's `b`, opening; the coin is `a ⊕ b`.
pub fn coin_single<C: Committer, R: Responder>(
    session: &mut Session,
    scheme: &CoinScheme,
    wire: &CoinWire,
    round: usize,
    alice: &mut C,
    bob: &mut R,
) -> Result<bool> {
    let (rb_bob, rb_alice) = send_receiver_vector(session, scheme, wire, bob)?;
    let a = alice.choose(round);
    let (com, open) = commit_bit(scheme, a, rb_alice.as_deref(), alice.rng())?;
    let com_seen: CoinCom = session.send(wire.committer, wire.commit, &com)?;
    finish(session, scheme, wire, round, &com_seen, open, a, rb_bob.as_deref(), alice, bob)
}

/// `ell` coins in a row; any abort aborts the whole string.
pub fn coin_sequential<C: Committer, R: Responder>(
    session: &mut Session,
    scheme: &CoinScheme,
    wire: &CoinWire,
    ell: usize,
    alice: &mut C,
    bob: &mut R,
) -> Result<Vec<bool>> {
    (0..ell).map(|i| coin_single(session, scheme, wire, i, alice, bob)).collect()
}

/// Committer with a fixed bit, used by the simulators.
#[derive(Clone)]
struct Fixed {
    a: bool,
    rng: Rng,
}

impl Committer for Fixed {
    fn choose(&mut self, _: usize) -> bool {
        self.a
    }
    fn open(&mut self, _: usize, _: bool, _: bool) -> OpenChoice {
        OpenChoice::Honest
    }
    fn rng(&mut self) -> &mut Rng {
        &mut self.rng
    }
}

/// Simulator against a corrupted responder: guess its bit, commit to
/// `target ⊕ guess`, and rewind the responder whenever the guess was
/// wrong. Returns the outcome and the total number of rewinds.
pub fn enforce_against_bob<R: Responder>(
    scheme: &CoinScheme,
    wire: &CoinWire,
    target: &[bool],
    bob: &mut R,
    max_retries: u64,
    rng: &mut Rng,
) -> (Result<Vec<bool>>, u64) {
    let mut retries = 0u64;
    let mut out = Vec::with_capacity(target.len());
    for (round, &t) in target.iter().enumerate() {
        let mut here = 0u64;
        loop {
            let checkpoint = bob.clone();
            let guess: bool = rng.random();
            let mut sim = Fixed { a: t ^ guess, rng: crate::rng::fork(rng, "attempt") };
            let mut session = Session::new(0, wire.schedule()).unrecorded();
            let attempt = (|| {
                let (rb, _) = send_receiver_vector(&mut session, scheme, wire, bob)?;
                let (com, open) = commit_bit(scheme, sim.a, rb.as_deref(), &mut sim.rng)?;
                let b = bob.respond(round, &com_bytes(&com));
                if b != guess {
                    return Ok(None);
                }
                let a_opened = verify_bit(scheme, &com, rb.as_deref(), &open).ok_or(AbortReason::BadOpening)?;
                Ok(Some(a_opened ^ b))
            })();
            match attempt {
                Ok(Some(coin)) => {
                    out.push(coin);
                    break;
                }
                Ok(None) => {
                    *bob = checkpoint;
                    retries += 1;
                    here += 1;
                    if here > max_retries {
                        return (Err(AbortReason::EnforcementFailure.into()), retries);
                    }
                }
                Err(e) => return (Err(e), retries),
            }
        }
    }
    (Ok(out), retries)
}

/// What the simulator against a corrupted committer uses to read the
/// committed bit.
#[derive(Clone)]
pub enum Extractor {
    Naor(Arc<NaorTable>),
    /// Binding key with its trapdoor.
    Lwe(CommitKey),
}

impl Extractor {
    pub fn scheme(&self) -> CoinScheme {
        match self {
            Extractor::Naor(t) => CoinScheme::Naor(t.params()),
            Extractor::Lwe(k) => CoinScheme::Lwe(k.public()),
        }
    }
}

/// Simulator against a corrupted committer: read `a` from the commitment
/// and answer `b = target ⊕ a`. Ambiguous Naor commitments make the
/// simulator rewind the committer and send a fresh receiver vector.
pub fn enforce_against_alice<C: Committer>(
    session: &mut Session,
    ext: &Extractor,
    wire: &CoinWire,
    target: &[bool],
    alice: &mut C,
    rng: &mut Rng,
) -> Result<Vec<bool>> {
    let scheme = ext.scheme();
    let mut out = Vec::with_capacity(target.len());
    for (round, &t) in target.iter().enumerate() {
        let mut tries = 0;
        let coin = loop {
            let checkpoint = alice.clone();
            let mut bob = super::HonestResponder { rng: crate::rng::fork(rng, "receiver") };
            let (rb_bob, rb_alice) = send_receiver_vector(session, &scheme, wire, &mut bob)?;
            let a = alice.choose(round);
            let (com, open) = commit_bit(&scheme, a, rb_alice.as_deref(), alice.rng())?;
            let com_seen: CoinCom = session.send(wire.committer, wire.commit, &com)?;
            let read = match (ext, &com_seen) {
                (Extractor::Naor(table), CoinCom::Naor(c)) => {
                    match table.extract(c, rb_bob.as_deref().expect("Naor has a receiver vector")) {
                        Extracted::Unique { a, .. } => Some(a),
                        Extracted::Invalid => Some(false),
                        Extracted::Ambiguous => None,
                    }
                }
                (Extractor::Lwe(key), CoinCom::Lwe(c)) => Some(lwe_extract(key, c)?),
                _ => return Err(AbortReason::Malformed.into()),
            };
            let Some(a_read) = read else {
                tries += 1;
                if tries > 64 {
                    return Err(AbortReason::EnforcementFailure.into());
                }
                *alice = checkpoint;
                continue;
            };
            let b = t ^ a_read;
            let b_seen: bool = session.send(wire.responder(), wire.b, &b)?;
            let reply = match alice.open(round, a, b_seen) {
                OpenChoice::Honest => Some(open),
                OpenChoice::Refuse => None,
                OpenChoice::Flip => Some(open.flipped()),
            };
            let got: Option<CoinOpen> = session.send(wire.committer, wire.open, &reply)?;
            let open = got.ok_or(AbortReason::Refusal)?;
            let a_opened = verify_bit(&scheme, &com_seen, rb_bob.as_deref(), &open).ok_or(AbortReason::BadOpening)?;
            break a_opened ^ b;
        };
        out.push(coin);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::mixedcommit::{gen_binding, LweParams};
    use crate::rng::{fork, seeded};
    use crate::stats;

    fn naor() -> CoinScheme {
        CoinScheme::Naor(NaorParams::default())
    }

    fn honest(seed: u64) -> (HonestCommitter, HonestResponder) {
        let mut rng = seeded(seed);
        (HonestCommitter { rng: fork(&mut rng, "a") }, HonestResponder { rng: fork(&mut rng, "b") })
    }

    #[test]
    fn honest_coin_matches_both_views() {
        let (mut a, mut b) = honest(1);
        let mut s = Session::new(0, COIN.schedule());
        let c = coin_sequential(&mut s, &naor(), &COIN, 16, &mut a, &mut b).unwrap();
        assert_eq!(c.len(), 16);
        assert_eq!(s.rounds(), 64);
    }

    #[test]
    fn honest_coins_are_uniform() {
        let mut counts = vec![0u64; 16];
        let (mut a, mut b) = honest(2);
        let mut s = Session::new(0, COIN.schedule()).unrecorded();
        for _ in 0..4000 {
            let c = coin_sequential(&mut s, &naor(), &COIN, 4, &mut a, &mut b).unwrap();
            counts[crate::bits::to_u64(&c) as usize] += 1;
        }
        let (_, p) = stats::chi_square_uniform(&counts);
        assert!(p > 1e-3, "{counts:?}");
    }

    #[test]
    fn lwe_coin_runs() {
        let mut rng = seeded(3);
        let key = gen_binding(&LweParams::default(), &mut rng);
        let (mut a, mut b) = honest(3);
        let mut s = Session::new(0, COIN.schedule());
        coin_sequential(&mut s, &CoinScheme::Lwe(key.public()), &COIN, 8, &mut a, &mut b).unwrap();
        assert!(s.transcript().iter().all(|r| r.msg_type != "coin-r"));
    }

    #[test]
    fn refusal_and_equivocation_abort() {
        let mut rng = seeded(4);
        let mut s = Session::new(0, COIN.schedule());
        let mut a = RefusingCommitter { rng: fork(&mut rng, "a"), at: 2 };
        let mut b = HonestResponder { rng: fork(&mut rng, "b") };
        let r = coin_sequential(&mut s, &naor(), &COIN, 8, &mut a, &mut b);
        assert_eq!(r.unwrap_err().abort_reason(), Some(AbortReason::Refusal));
        let mut e = EquivocatingCommitter { rng: fork(&mut rng, "e") };
        let mut aborted = 0;
        for _ in 0..200 {
            let mut s = Session::new(0, COIN.schedule());
            match coin_single(&mut s, &naor(), &COIN, 0, &mut e, &mut b) {
                Ok(c) => assert!(c),
                Err(err) => {
                    assert_eq!(err.abort_reason(), Some(AbortReason::BadOpening));
                    aborted += 1;
                }
            }
        }
        assert!(aborted > 60);
    }

    #[test]
    fn swapped_direction() {
        let wire = CoinWire { committer: Party::B, r: "x-r", commit: "x-c", b: "x-b", open: "x-o" };
        let (mut a, mut b) = honest(5);
        let mut s = Session::new(0, wire.schedule());
        coin_single(&mut s, &naor(), &wire, 0, &mut a, &mut b).unwrap();
        let senders: Vec<Party> = s.transcript().iter().map(|r| r.sender).collect();
        assert_eq!(senders, [Party::A, Party::B, Party::A, Party::B]);
    }

    #[test]
    fn rewinding_hits_target() {
        let mut rng = seeded(6);
        let target = crate::bits::random_bits(200, &mut rng);
        let mut bob = HonestResponder { rng: fork(&mut rng, "b") };
        let (out, retries) = enforce_against_bob(&naor(), &COIN, &target, &mut bob, 64, &mut rng);
        assert_eq!(out.unwrap(), target);
        let mean = retries as f64 / 200.0;
        assert!((0.6..1.4).contains(&mean), "{mean}");
        let mut parity = ParityResponder;
        let (out, _) = enforce_against_bob(&naor(), &COIN, &target, &mut parity, 64, &mut rng);
        assert_eq!(out.unwrap(), target);
    }

    #[test]
    fn extraction_hits_target() {
        let mut rng = seeded(7);
        let table = NaorTable::get(NaorParams::default()).unwrap();
        let target = crate::bits::random_bits(64, &mut rng);
        let mut alice = HonestCommitter { rng: fork(&mut rng, "a") };
        let mut s = Session::new(0, COIN.schedule());
        let out = enforce_against_alice(&mut s, &Extractor::Naor(table), &COIN, &target, &mut alice, &mut rng);
        assert_eq!(out.unwrap(), target);

        let key = gen_binding(&LweParams::default(), &mut rng);
        let mut s = Session::new(0, COIN.schedule());
        let out = enforce_against_alice(&mut s, &Extractor::Lwe(key), &COIN, &target, &mut alice, &mut rng);
        assert_eq!(out.unwrap(), target);
    }

    #[test]
    fn extraction_against_refusing_committer_aborts() {
        let mut rng = seeded(8);
        let table = NaorTable::get(NaorParams::default()).unwrap();
        let mut alice = RefusingCommitter { rng: fork(&mut rng, "a"), at: 3 };
        let mut s = Session::new(0, COIN.schedule());
        let out = enforce_against_alice(&mut s, &Extractor::Naor(table), &COIN, &[true; 8], &mut alice, &mut rng);
        assert!(out.is_err());
    }
}
