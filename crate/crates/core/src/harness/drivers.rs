//! Parameterised statistical drivers behind the command-line tools.

use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bits::{self, random_bits};
use crate::coinflip::{
    coin_sequential, enforce_against_alice, enforce_against_bob, simulate_force_force_against_alice,
    simulate_force_force_against_bob, CoinRecord, CoinScheme, Extractor, FfAlice, FfBehaviour, FfBob, FfConfig,
    HonestCommitter, HonestResponder, KeyStringMode, COIN,
};
use crate::error::{Error, Result};
use crate::fieldmath::Distribution;
use crate::hashing::pa_experiment;
use crate::mixedcommit::{
    commit_with, gen_binding, gen_hiding, lwe_commit, lwe_extract, lwe_verify, LweOpening, LweParams, NaorParams,
    NaorTable,
};
use crate::protocols::{self, id, idplus, ot, BobStrategy, CompilerConfig, IdPlusKeys, OtInputs, PartyRngs, QubitTap};
use crate::qchannel::{Basis, ChannelConfig};
use crate::rng::{fork, session_rng, Rng};
use crate::session::{Party, Session};
use crate::ssscommit::{
    self, corrupt_commit, escape_probability, open_phase, random_challenge, OpenBehaviour, SssParams,
};
use crate::stats::{self, StatReport, Verdict};
use crate::zkpk::{self, find_hamiltonian_cycle, Graph, Nizk, Prover, SquareNizk, ZkpkConfig};

/// Run `f` once per trial with that trial's own generator.
fn per_trial<T>(trials: u64, master: u64, mut f: impl FnMut(&mut Rng) -> Result<T>) -> Result<Vec<T>> {
    if trials == 0 {
        return Err(Error::usage("trials must be at least 1"));
    }
    (0..trials).map(|i| f(&mut session_rng(master, i))).collect()
}

/// Treat protocol aborts as a negative outcome.
fn or_abort(r: Result<bool>) -> Result<bool> {
    match r {
        Err(e) if e.is_abort() => Ok(false),
        other => other,
    }
}

fn count(xs: &[bool]) -> u64 {
    xs.iter().filter(|&&x| x).count() as u64
}

fn rate_upper(metric: &str, hits: u64, n: u64, bound: f64) -> StatReport {
    let (p, se) = stats::proportion(hits, n);
    StatReport::upper(metric, p, se, bound)
}

fn rate_lower(metric: &str, hits: u64, n: u64, bound: f64) -> StatReport {
    let (p, se) = stats::proportion(hits, n);
    StatReport::lower(metric, p, se, bound)
}

fn parse_enum<T: Copy>(s: &str, table: &[(&str, T)]) -> Result<T> {
    table.iter().find(|(n, _)| *n == s).map(|(_, v)| *v).ok_or_else(|| {
        let names: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
        Error::usage(format!("{s} is not one of {}", names.join(", ")))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OtStrategy {
    Honest,
    /// Commit without measuring.
    Delayed,
    /// Keep a fraction of the qubits until the bases are announced.
    Storage,
}

impl FromStr for OtStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_enum(
            s,
            &[("honest", OtStrategy::Honest), ("delayed", OtStrategy::Delayed), ("storage", OtStrategy::Storage)],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OtArgs {
    pub m: usize,
    pub alpha: f64,
    pub phi: f64,
    pub phi_prime: f64,
    pub lambda: f64,
    /// Storage bound; the attacker keeps a `γ(1−α)` fraction of the
    /// post-test qubits.
    pub gamma: f64,
    pub strategy: OtStrategy,
}

impl Default for OtArgs {
    fn default() -> Self {
        OtArgs { m: 256, alpha: 0.5, phi: 0.0, phi_prime: 0.03, lambda: 0.1, gamma: 0.08, strategy: OtStrategy::Honest }
    }
}

pub fn ot_driver(args: &OtArgs, trials: u64, master: u64) -> Result<Vec<StatReport>> {
    let channel = ChannelConfig::new(args.phi)?;
    let probe = CompilerConfig::new(
        args.alpha,
        args.phi_prime,
        gen_binding(&LweParams::default(), &mut session_rng(master, u64::MAX)),
    )?;
    let survivors = args.m - probe.test_size(args.m);
    let ell = ot::output_length(survivors, args.lambda);
    if ell == 0 {
        return Err(Error::usage("λ·(m − ⌈αm⌉) must be at least 1"));
    }
    let compiled = |bob: BobStrategy, rng: &mut Rng| -> Result<bool> {
        let cfg = CompilerConfig::new(args.alpha, args.phi_prime, gen_binding(&LweParams::default(), rng))?;
        let inputs = OtInputs::random(ell, rng);
        let mut rngs = PartyRngs::new(rng);
        let mut s = Session::new(0, ot::full_compiled_schedule()).unrecorded();
        or_abort(
            protocols::run_compiled_ot(&mut s, args.m, &cfg, &channel, &inputs, bob, &mut rngs)
                .map(|o| o.received == inputs.chosen()),
        )
    };
    match args.strategy {
        OtStrategy::Honest => {
            let ok = per_trial(trials, master, |rng| compiled(BobStrategy::Honest, rng))?;
            Ok(vec![rate_lower("honest receiver gets s_k", count(&ok), trials, 1.0)])
        }
        OtStrategy::Delayed => {
            let ok = per_trial(trials, master, |rng| compiled(BobStrategy::DelayedMeasurement, rng))?;
            let rejected = trials - count(&ok);
            Ok(vec![rate_lower("delayed measurement rejected", rejected, trials, 0.99)])
        }
        OtStrategy::Storage => {
            let g = args.gamma * (1.0 - args.alpha);
            let wins = per_trial(trials, master, |rng| {
                ot::ot_storage_attack(survivors, g, args.lambda, &mut PartyRngs::new(rng))
            })?;
            let (p, se) = stats::proportion(count(&wins), trials);
            let chance = (-(ell as f64)).exp2();
            Ok(vec![StatReport::upper(format!("guessing advantage on s_1 at g={g}"), p - chance, se, 0.05)])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdArgs {
    /// Qubits; the code length is what survives the test when compiled.
    pub m: usize,
    pub compiled: bool,
    pub wrong_password: bool,
    pub ell: usize,
}

impl Default for IdArgs {
    fn default() -> Self {
        IdArgs { m: 256, compiled: true, wrong_password: false, ell: 8 }
    }
}

pub fn id_driver(args: &IdArgs, trials: u64, master: u64) -> Result<Vec<StatReport>> {
    let mut bytes = vec![0u64; 256];
    let accepted = per_trial(trials, master, |rng| {
        let ccfg = CompilerConfig::with_defaults(0.03, rng)?;
        let n = if args.compiled { args.m - ccfg.test_size(args.m) } else { args.m };
        let code = id::Code::random(16, n, 0.25, rng)?;
        let wu = rng.random_range(0..code.len());
        let ws = if args.wrong_password { (wu + rng.random_range(1..code.len())) % code.len() } else { wu };
        let mut rngs = PartyRngs::new(rng);
        let channel = ChannelConfig::noiseless();
        let out = if args.compiled {
            let mut s = Session::new(0, id::full_compiled_schedule()).unrecorded();
            protocols::run_compiled_id(&mut s, args.m, &ccfg, &channel, &code, wu, ws, args.ell, &mut rngs)
        } else {
            let mut s = Session::new(0, id::plain_schedule()).unrecorded();
            protocols::run_id(&mut s, &channel, &code, wu, ws, args.ell, &mut rngs)
        };
        match out {
            Ok(o) => {
                let kbits: Vec<bool> = o.kappa.iter().map(|&b| b == Basis::Cross).collect();
                for byte in bits::pack(&kbits) {
                    bytes[usize::from(byte)] += 1;
                }
                Ok(o.accepted)
            }
            Err(e) if e.is_abort() => Ok(false),
            Err(e) => Err(e),
        }
    })?;
    let hits = count(&accepted);
    let mut out = if args.wrong_password {
        vec![rate_upper("wrong password accepted", hits, trials, (-(args.ell as f64)).exp2() + 0.02)]
    } else {
        vec![rate_lower("right password accepted", hits, trials, 1.0)]
    };
    let (_, p) = stats::chi_square_uniform(&bytes);
    out.push(StatReport::exact("shift byte chi-square p", p, 0.001, p > 0.001));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tamper {
    None,
    /// Flip one classical bit in a random message.
    BitFlip,
    /// Measure a tenth of the qubits in one basis.
    Measure,
}

impl FromStr for Tamper {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_enum(s, &[("none", Tamper::None), ("bitflip", Tamper::BitFlip), ("measure", Tamper::Measure)])
    }
}

pub fn idplus_driver(m: usize, tamper: Tamper, trials: u64, master: u64) -> Result<Vec<StatReport>> {
    let accepted = per_trial(trials, master, |rng| {
        // noiseless channel, so any test error aborts
        let ccfg = CompilerConfig::with_defaults(0.0, rng)?;
        let code = id::Code::random(8, m - ccfg.test_size(m), 0.25, rng)?;
        let keys = IdPlusKeys::random(rng);
        let w = rng.random_range(0..code.len());
        let mut s = Session::new(0, idplus::full_compiled_schedule());
        let mut tap = QubitTap::None;
        match tamper {
            Tamper::None => {}
            Tamper::BitFlip => {
                let eve =
                    idplus::BitFlipTap { round: rng.random_range(0..idplus::message_count()), pick: rng.random() };
                s = s.with_eve(Box::new(eve));
            }
            Tamper::Measure => {
                tap = QubitTap::MeasureFixed { fraction: 0.1, basis: Basis::Plus };
            }
        }
        let mut rngs = PartyRngs::new(rng);
        let channel = ChannelConfig::noiseless();
        or_abort(
            protocols::id_plus_run(&mut s, m, &ccfg, &channel, &code, w, w, 8, &keys, &tap, &mut rngs)
                .map(|o| o.accepted),
        )
    })?;
    let hits = count(&accepted);
    Ok(match tamper {
        Tamper::None => vec![rate_lower("accepted", hits, trials, 1.0)],
        Tamper::BitFlip => {
            vec![rate_lower("tampered run rejected", trials - hits, trials, 1.0 - (-16f64).exp2() - 0.01)]
        }
        Tamper::Measure => vec![rate_lower("measured run rejected", trials - hits, trials, 0.9)],
    })
}

/// Sequential coin flips of `bits` bits.
pub fn coin_flip(bits: usize, trials: u64, master: u64) -> Result<(Vec<CoinRecord>, Vec<StatReport>)> {
    if bits == 0 {
        return Err(Error::usage("need at least one bit"));
    }
    let scheme = CoinScheme::Naor(NaorParams::default());
    let records = per_trial(trials, master, |rng| {
        let mut a = HonestCommitter { rng: fork(rng, "alice") };
        let mut b = HonestResponder { rng: fork(rng, "bob") };
        let mut s = Session::new(0, COIN.schedule()).unrecorded();
        let out = coin_sequential(&mut s, &scheme, &COIN, bits, &mut a, &mut b);
        if let Err(e) = &out {
            if !e.is_abort() {
                return Err(Error::Config(e.to_string()));
            }
        }
        Ok(CoinRecord::from_result(&out, 0))
    })?;
    let mut reports = vec![];
    if bits <= 16 {
        let mut counts = vec![0u64; 1 << bits];
        for r in &records {
            if let Some(h) = &r.outcome {
                let bytes = hex::decode(h).map_err(|e| Error::Config(e.to_string()))?;
                counts[bits::to_u64(&bits::unpack(&bytes, bits)) as usize] += 1;
            }
        }
        let (_, p) = stats::chi_square_uniform(&counts);
        reports.push(StatReport::exact("uniformity chi-square p", p, 0.001, p > 0.001));
    }
    let aborted = records.iter().filter(|r| r.aborted).count() as u64;
    reports.push(StatReport::exact("aborted runs", aborted as f64, 0.0, aborted == 0));
    Ok((records, reports))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Alice,
    Bob,
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_enum(s, &[("alice", Side::Alice), ("bob", Side::Bob)])
    }
}

/// Drive runs against an honest-behaving corrupted `side` to `target`.
/// Without `sigma` the sequential coin is enforced bit by bit; with it the
/// strong flip is simulated.
pub fn coin_force(
    target: &[bool],
    side: Side,
    sigma: Option<usize>,
    trials: u64,
    master: u64,
) -> Result<(Vec<CoinRecord>, Vec<StatReport>)> {
    if target.is_empty() {
        return Err(Error::usage("empty target"));
    }
    let naor = NaorParams::default();
    let ff = sigma.map(|s| FfConfig::new(target.len(), s, KeyStringMode::Trapdoorable)).transpose()?;
    let records = per_trial(trials, master, |rng| {
        let (out, retries) = match (&ff, side) {
            (None, Side::Alice) => {
                let ext = Extractor::Naor(NaorTable::get(naor)?);
                let mut alice = HonestCommitter { rng: fork(rng, "alice") };
                let mut s = Session::new(0, COIN.schedule()).unrecorded();
                (enforce_against_alice(&mut s, &ext, &COIN, target, &mut alice, rng), 0)
            }
            (None, Side::Bob) => {
                let mut bob = HonestResponder { rng: fork(rng, "bob") };
                enforce_against_bob(&CoinScheme::Naor(naor), &COIN, target, &mut bob, 64, rng)
            }
            (Some(cfg), Side::Alice) => {
                let mut alice = FfAlice::new(fork(rng, "alice"), FfBehaviour::Honest);
                let mut s = Session::new(0, cfg.schedule()).unrecorded();
                (simulate_force_force_against_alice(&mut s, cfg, target, &mut alice, rng), 0)
            }
            (Some(cfg), Side::Bob) => {
                let mut bob = FfBob::new(fork(rng, "bob"), HonestResponder { rng: fork(rng, "respond") });
                let mut s = Session::new(0, cfg.schedule()).unrecorded();
                (simulate_force_force_against_bob(&mut s, cfg, target, &mut bob, rng), 0)
            }
        };
        if let Err(e) = &out {
            if !e.is_abort() {
                return Err(Error::Config(e.to_string()));
            }
        }
        Ok(CoinRecord::from_result(&out, retries))
    })?;
    let want = hex::encode(bits::pack(target));
    let done: Vec<&CoinRecord> = records.iter().filter(|r| !r.aborted).collect();
    let hits = done.iter().filter(|r| r.outcome.as_deref() == Some(want.as_str())).count() as u64;
    let n = done.len() as u64;
    let reports = vec![StatReport::exact("non-abort runs on target", hits as f64 / n.max(1) as f64, 1.0, hits == n)];
    Ok((records, reports))
}

/// Extraction, binding and hiding checks of the LWE commitment.
pub fn commit_driver(trials: u64, master: u64) -> Result<Vec<StatReport>> {
    let params = LweParams::default();
    let mut rng = session_rng(master, u64::MAX);
    let key = gen_binding(&params, &mut rng);
    let hkey = gen_hiding(&params, &mut rng);
    let mut h = [std::collections::BTreeMap::new(), std::collections::BTreeMap::new()];
    let checks = per_trial(trials, master, |rng| {
        let bit = rng.random();
        let (com, honest) = lwe_commit(&key, bit, rng);
        let e = lwe_extract(&key, &com)?;
        let flipped = LweOpening { bit: !bit, subset: honest.subset.clone() };
        let bound = [&honest, &flipped].iter().all(|o| !lwe_verify(&key, &com, o) || o.bit == e);
        let hc = commit_with(&hkey, bit, &random_bits(params.m_samples, rng))?;
        *h[usize::from(bit)].entry((hc.c_val * 8 / params.p, hc.a_vec[0] * 8 / params.p)).or_insert(0u64) += 1;
        Ok((e == bit, bound))
    })?;
    let extracted = checks.iter().filter(|c| c.0).count() as u64;
    let bound = checks.iter().filter(|c| c.1).count() as u64;
    let tvd = if h.iter().all(|x| !x.is_empty()) { stats::tvd(&h[0], &h[1]) } else { 1.0 };
    Ok(vec![
        StatReport::exact("extraction correct", extracted as f64 / trials as f64, 1.0, extracted == trials),
        StatReport::exact("openings match extraction", bound as f64 / trials as f64, 1.0, bound == trials),
        StatReport::exact("hiding projection tvd", tvd, 0.05, tvd < 0.05),
    ])
}

/// Acceptance of a committer with `bad` corrupted shares against the
/// exact escape probability.
pub fn sss_driver(sigma: usize, bad: usize, trials: u64, master: u64) -> Result<Vec<StatReport>> {
    let params = SssParams::for_sigma(sigma)?;
    if bad > params.big_sigma {
        return Err(Error::usage(format!("at most {} positions can be corrupted", params.big_sigma)));
    }
    let key = gen_binding(&LweParams::default(), &mut session_rng(master, u64::MAX));
    let passed = per_trial(trials, master, |rng| {
        let m = params.random_vector(rng);
        let (com, state) = corrupt_commit(&params, &key, &m, bad, rng)?;
        let mut s = Session::new(0, ssscommit::schedule()).unrecorded();
        s.send(Party::A, "sss-commit", &com)?;
        let claim = OpenBehaviour::Claim(state.sharing.shares.clone());
        let challenge = random_challenge(&params, rng);
        or_abort(open_phase(&mut s, &params, &key, &com, &state, &claim, challenge).map(|_| true))
    })?;
    let expect = escape_probability(&params, bad);
    let (p, se) = stats::proportion(count(&passed), trials);
    let close = if se == 0.0 { p == expect } else { (p - expect).abs() <= 3.0 * se };
    Ok(vec![StatReport { verdict: Verdict::from_bool(close), ..StatReport::upper("cheater pass rate", p, se, expect) }])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZkArgs {
    /// A fixed statement; random Hamiltonian graphs otherwise.
    pub graph: Option<Graph>,
    pub vertices: usize,
    pub sigma: usize,
    pub cheat: bool,
}

pub fn zkpk_driver(args: &ZkArgs, trials: u64, master: u64) -> Result<Vec<StatReport>> {
    let v = args.graph.as_ref().map_or(args.vertices, |g| g.v);
    let cfg = ZkpkConfig::new(v, args.sigma)?;
    let fixed = match (&args.graph, args.cheat) {
        (Some(g), false) => {
            let w = find_hamiltonian_cycle(g).ok_or_else(|| Error::usage("graph has no Hamiltonian cycle"))?;
            Some((g.clone(), w))
        }
        (Some(g), true) => Some((g.clone(), Vec::new())),
        (None, _) => None,
    };
    let accepted = per_trial(trials, master, |rng| {
        let (g, w) = match &fixed {
            Some(gw) => gw.clone(),
            None => Graph::random_hamiltonian(v, rng)?,
        };
        let prover = if args.cheat { Prover::Cheat } else { Prover::Honest(w) };
        let mut rngs = PartyRngs::new(rng);
        let mut s = Session::new(0, zkpk::schedule()).unrecorded();
        Ok(zkpk::zkpk_run(&mut s, &g, &prover, &cfg, &mut rngs)?.accepted)
    })?;
    let hits = count(&accepted);
    Ok(if args.cheat {
        vec![rate_upper("witnessless acceptance", hits, trials, (-(args.sigma as f64)).exp2())]
    } else {
        vec![StatReport::exact("completeness", hits as f64 / trials as f64, 1.0, hits == trials)]
    })
}

/// The coin-flipped reference string followed by one proof of squareness.
pub fn iqzk_driver(crs_bits: usize, trials: u64, master: u64) -> Result<Vec<StatReport>> {
    let nizk = SquareNizk { crs_bits };
    let mut crs_counts = vec![0u64; 1 << crs_bits.min(12)];
    let runs = per_trial(trials, master, |rng| {
        let w: u64 = rng.random_range(1..1 << 20);
        let x = if rng.random() { w * w } else { w * w + 1 };
        let mut rngs = PartyRngs::new(rng);
        let mut s = Session::new(0, zkpk::iqzk_schedule()).unrecorded();
        let out = zkpk::iqzk_run(&mut s, &nizk, &x, &w, &mut rngs)?;
        if crs_bits <= 12 && out.crs.len() == crs_bits {
            crs_counts[bits::to_u64(&out.crs) as usize] += 1;
        }
        Ok((x == w * w, out.accepted, nizk.crs_bits() == out.crs.len()))
    })?;
    let correct = runs.iter().filter(|(yes, acc, len)| yes == acc && *len).count() as u64;
    let mut out =
        vec![StatReport::exact("verdict matches membership", correct as f64 / trials as f64, 1.0, correct == trials)];
    if crs_bits <= 12 {
        let (_, p) = stats::chi_square_uniform(&crs_counts);
        out.push(StatReport::exact("reference string chi-square p", p, 0.001, p > 0.001));
    }
    Ok(out)
}

/// Random sources on `n` bits with `leak` leaked positions, hashed to
/// `ell` bits; one report per source.
pub fn pa_driver(n: usize, ell: usize, leak: usize, trials: u64, master: u64) -> Result<Vec<StatReport>> {
    if n > 12 || leak > n || ell == 0 || ell > n {
        return Err(Error::usage("need n ≤ 12, leak ≤ n and 1 ≤ ell ≤ n"));
    }
    let mut violations = 0u64;
    let outcomes = per_trial(trials, master, |rng| {
        let support = rng.random_range(1..=1usize << n);
        let xs = rand::seq::index::sample(rng, 1 << n, support);
        let dist = Distribution::from_weights(xs.iter().map(|x| (x as u64, rng.random_range(0.05..1.0))))?;
        let mut pos = rand::seq::index::sample(rng, n, leak).into_vec();
        pos.sort_unstable();
        pa_experiment(&dist, n, &pos, ell, 32, rng)
    })?;
    for o in &outcomes {
        violations += u64::from(o.empirical > o.bound + 3.0 * o.std_err);
    }
    Ok(vec![StatReport::exact("bound violations", violations as f64, 0.0, violations == 0)])
}
