//! The fourteen acceptance criteria as deterministic functions of a master
//! seed.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{run_batch, ProtocolKind, SessionConfig};
use crate::bits::{self, from_u64, random_bits};
use crate::coinflip::{
    coin_sequential, enforce_against_alice, simulate_force_force_against_alice, simulate_force_force_against_bob,
    CoinScheme, ConstantResponder, EquivocatingCommitter, Extractor, FfAlice, FfBehaviour, FfBob, FfConfig,
    HonestCommitter, HonestResponder, KeyStringMode, ParityResponder, RefusingCommitter, SteeringCommitter, COIN,
};
use crate::error::{Error, Result};
use crate::fieldmath::{min_entropy, min_entropy_split_witness, split_entropy, Distribution, PROB_TOL};
use crate::hashing::{apply_hash, pa_experiment, HashFunc};
use crate::mixedcommit::{
    commit_with, equivocation_probability, gen_binding, gen_hiding, lwe_commit, lwe_extract, lwe_verify, LweOpening,
    LweParams, NaorParams, NaorTable,
};
use crate::protocols::{self, id, idplus, ot, CompilerConfig, IdPlusKeys, OtInputs, PartyRngs, QubitTap};
use crate::qchannel::{Basis, ChannelConfig};
use crate::rng::{fork, session_rng, Rng};
use crate::session::{Party, Session};
use crate::ssscommit::{
    self, commit_phase, corrupt_commit, escape_probability, open_phase, random_challenge, trapdoor_open, OpenBehaviour,
    SssParams,
};
use crate::stats::{self, StatReport};
use crate::zkpk::{self, is_hamiltonian_cycle, Graph, HamEncoding, Prover, ZkpkConfig};

pub const CRITERIA: u8 = 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub reports: Vec<StatReport>,
    pub passed: bool,
}

impl CriterionReport {
    fn new(id: u8, reports: Vec<StatReport>) -> Self {
        let passed = reports.iter().all(|r| r.verdict.passed());
        CriterionReport { id, name: criterion_name(id).to_string(), reports, passed }
    }

    /// One line for terminal output.
    pub fn line(&self) -> String {
        format!("[{}] criterion {:>2}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub master_seed: u64,
    pub criteria: Vec<CriterionReport>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub fn criterion_name(id: u8) -> &'static str {
    match id {
        1 => "two-universal collision rate",
        2 => "privacy amplification distance",
        3 => "min-entropy splitting witness",
        4 => "dual-mode commitment extraction, binding, hiding",
        5 => "generator commitment equivocation",
        6 => "cut-and-choose commitment soundness",
        7 => "trapdoor opening",
        8 => "oblivious transfer",
        9 => "compiler rejects delayed measurement",
        10 => "password identification",
        11 => "authenticated identification tamper detection",
        12 => "coin flipping",
        13 => "proof of knowledge for Hamiltonicity",
        14 => "reproducibility",
        _ => "unknown",
    }
}

fn crit_rng(master: u64, id: u8) -> Rng {
    session_rng(master, 0xC000 + u64::from(id))
}

fn rate_upper(metric: &str, hits: u64, n: u64, bound: f64) -> StatReport {
    let (p, se) = stats::proportion(hits, n);
    StatReport::upper(metric, p, se, bound)
}

fn rate_lower(metric: &str, hits: u64, n: u64, bound: f64) -> StatReport {
    let (p, se) = stats::proportion(hits, n);
    StatReport::lower(metric, p, se, bound)
}

fn all_of(metric: &str, good: u64, n: u64) -> StatReport {
    StatReport::exact(metric, good as f64 / n.max(1) as f64, 1.0, good == n && n > 0)
}

/// Criteria 1 to 13.
pub fn run_criterion(id: u8, master: u64) -> Result<CriterionReport> {
    let mut rng = crit_rng(master, id);
    let reports = match id {
        1 => two_universality()?,
        2 => privacy_amplification(&mut rng)?,
        3 => splitting(&mut rng)?,
        4 => mixed_commitment(&mut rng)?,
        5 => naor_equivocation()?,
        6 => cut_and_choose(&mut rng)?,
        7 => trapdoor(&mut rng)?,
        8 => oblivious_transfer(master, &mut rng)?,
        9 => delayed_measurement(master)?,
        10 => identification(&mut rng)?,
        11 => tamper_detection(&mut rng)?,
        12 => coin_flipping(&mut rng)?,
        13 => proof_of_knowledge(&mut rng)?,
        14 => return reproducibility(master),
        _ => return Err(Error::usage(format!("no criterion {id}"))),
    };
    Ok(CriterionReport::new(id, reports))
}

fn core_suite(master: u64) -> Result<Vec<CriterionReport>> {
    (1..CRITERIA).map(|id| run_criterion(id, master)).collect()
}

fn reproducibility(master: u64) -> Result<CriterionReport> {
    let a = serde_json::to_string(&core_suite(master)?).expect("reports serialize");
    let b = serde_json::to_string(&core_suite(master)?).expect("reports serialize");
    Ok(reproducibility_report(&a, &b))
}

/// Byte comparison of two serialized suite runs.
pub fn reproducibility_report(a: &str, b: &str) -> CriterionReport {
    let same = a == b;
    CriterionReport::new(14, vec![StatReport::exact("identical json bytes", f64::from(u8::from(same)), 1.0, same)])
}

/// The whole suite. `on_done` sees each criterion as it finishes.
pub fn run_suite(master: u64, mut on_done: impl FnMut(&CriterionReport)) -> Result<SuiteReport> {
    let mut criteria = Vec::new();
    for id in 1..CRITERIA {
        let c = run_criterion(id, master)?;
        on_done(&c);
        criteria.push(c);
    }
    let first = serde_json::to_string(&criteria).expect("reports serialize");
    let second = serde_json::to_string(&core_suite(master)?).expect("reports serialize");
    let c14 = reproducibility_report(&first, &second);
    on_done(&c14);
    criteria.push(c14);
    let passed = criteria.iter().all(|c| c.passed);
    Ok(SuiteReport { master_seed: master, criteria, passed })
}

fn two_universality() -> Result<Vec<StatReport>> {
    let mut out = Vec::new();
    for n in 4..=6usize {
        let inputs: Vec<Vec<bool>> = (0..1u64 << n).map(|x| from_u64(x, n)).collect();
        let pairs = inputs.len() * (inputs.len() - 1) / 2;
        for ell in 1..=3usize {
            let total = 1u64 << (n * ell);
            let mut collisions = vec![0u64; pairs];
            for m in 0..total {
                let rows: Vec<Vec<bool>> = (0..ell).map(|r| from_u64(m >> (r * n), n)).collect();
                let f = HashFunc::from_rows(&rows, None)?;
                let img: Vec<u64> =
                    inputs.iter().map(|x| apply_hash(&f, x).map(|y| bits::to_u64(&y))).collect::<Result<_>>()?;
                let mut k = 0;
                for i in 0..img.len() {
                    for j in i + 1..img.len() {
                        collisions[k] += u64::from(img[i] == img[j]);
                        k += 1;
                    }
                }
            }
            let exact = collisions.iter().all(|&c| c << ell == total);
            let worst = collisions.iter().map(|&c| c as f64 / total as f64).fold(0.0, f64::max);
            out.push(StatReport::exact(format!("max collision n={n} l={ell}"), worst, (-(ell as f64)).exp2(), exact));
        }
    }
    Ok(out)
}

fn privacy_amplification(rng: &mut Rng) -> Result<Vec<StatReport>> {
    const INSTANCES: u64 = 1000;
    let mut violations = 0u64;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..INSTANCES {
        let n = rng.random_range(4..=10usize);
        let support = rng.random_range(1..=1usize << n);
        let xs = rand::seq::index::sample(rng, 1 << n, support);
        let dist = Distribution::from_weights(xs.iter().map(|x| (x as u64, rng.random_range(0.05..1.0))))?;
        let leaks = rng.random_range(0..=2usize);
        let mut leak = rand::seq::index::sample(rng, n, leaks).into_vec();
        leak.sort_unstable();
        let ell = rng.random_range(1..=4usize);
        let pa = pa_experiment(&dist, n, &leak, ell, 32, rng)?;
        if pa.empirical > pa.bound + 3.0 * pa.std_err {
            violations += 1;
        }
        worst = worst.max(pa.empirical - pa.bound);
    }
    Ok(vec![
        StatReport::exact("bound violations", violations as f64, 0.0, violations == 0),
        StatReport::exact("max distance minus bound", worst, 0.0, true),
    ])
}

fn splitting(rng: &mut Rng) -> Result<Vec<StatReport>> {
    const JOINTS: u64 = 200;
    let mut found = 0u64;
    for _ in 0..JOINTS {
        let k = rng.random_range(2..=16usize);
        let pts = rand::seq::index::sample(rng, 64, k);
        let joint = Distribution::from_weights(
            pts.iter().map(|p| ((p as u64 & 7, p as u64 >> 3), rng.random_range(0.01..1.0))),
        )?;
        let alpha = min_entropy(&joint);
        if let Some(w) = min_entropy_split_witness(&joint, alpha) {
            let check = split_entropy(&joint, |xy| w.assignment[xy]);
            if check >= alpha / 2.0 - PROB_TOL {
                found += 1;
            }
        }
    }
    Ok(vec![all_of("joints with a verified witness", found, JOINTS)])
}

fn hiding_projection(c: &crate::mixedcommit::LweCommitment, p: u32) -> (u32, u32) {
    (c.c_val * 8 / p, c.a_vec[0] * 8 / p)
}

fn mixed_commitment(rng: &mut Rng) -> Result<Vec<StatReport>> {
    let params = LweParams::default();
    let key = gen_binding(&params, rng);
    let mut extracted = 0u64;
    for _ in 0..10_000 {
        let bit = rng.random();
        let (com, _) = lwe_commit(&key, bit, rng);
        extracted += u64::from(lwe_extract(&key, &com)? == bit);
    }

    let mut consistent = 0u64;
    const BINDING: u64 = 100_000;
    for _ in 0..BINDING {
        let bit = rng.random();
        let (com, honest) = lwe_commit(&key, bit, rng);
        let flipped = LweOpening { bit: !bit, subset: honest.subset.clone() };
        let forged = LweOpening { bit: !bit, subset: random_bits(params.m_samples, rng) };
        let e = lwe_extract(&key, &com)?;
        let ok = [&honest, &flipped, &forged].iter().all(|o| !lwe_verify(&key, &com, o) || o.bit == e);
        consistent += u64::from(ok);
    }

    let hkey = gen_hiding(&params, rng);
    let mut h = [BTreeMap::new(), BTreeMap::new()];
    for i in 0..100_000u32 {
        let bit = i % 2 == 1;
        let subset = random_bits(params.m_samples, rng);
        let com = commit_with(&hkey, bit, &subset)?;
        *h[usize::from(bit)].entry(hiding_projection(&com, params.p)).or_insert(0u64) += 1;
    }
    let tvd = stats::tvd(&h[0], &h[1]);
    Ok(vec![
        all_of("binding-key extraction", extracted, 10_000),
        all_of("accepted openings match extraction", consistent, BINDING),
        StatReport::exact("hiding-key projection tvd", tvd, 0.05, tvd < 0.05),
    ])
}

fn naor_equivocation() -> Result<Vec<StatReport>> {
    let p = equivocation_probability(&NaorParams::new(8)?)?;
    let bound = 4.0 * (-8f64).exp2();
    Ok(vec![StatReport::exact("equivocation probability n=8", p, bound, p <= bound)])
}

fn sss_session() -> Result<Session> {
    let mut s = Session::new(0, ssscommit::schedule()).unrecorded();
    s.send(Party::A, "sss-commit", &0u8)?;
    Ok(s)
}

/// Fraction of runs in which a committer with `bad` corrupted shares who
/// claims the true sharing is accepted.
fn cheater_pass_rate(sigma: usize, bad: usize, trials: u64, rng: &mut Rng) -> Result<(u64, SssParams)> {
    let params = SssParams::for_sigma(sigma)?;
    let key = gen_binding(&LweParams::default(), rng);
    let mut passed = 0u64;
    for _ in 0..trials {
        let m = params.random_vector(rng);
        let (com, state) = corrupt_commit(&params, &key, &m, bad, rng)?;
        let claim = OpenBehaviour::Claim(state.sharing.shares.clone());
        let challenge = random_challenge(&params, rng);
        match open_phase(&mut sss_session()?, &params, &key, &com, &state, &claim, challenge) {
            Ok(_) => passed += 1,
            Err(e) if e.is_abort() => {}
            Err(e) => return Err(e),
        }
    }
    Ok((passed, params))
}

fn cut_and_choose(rng: &mut Rng) -> Result<Vec<StatReport>> {
    const SMALL: u64 = 100_000;
    let (passed, p4) = cheater_pass_rate(4, 4, SMALL, rng)?;
    let expect = escape_probability(&p4, 4);
    let (rate, se) = stats::proportion(passed, SMALL);
    let close = (rate - expect).abs() <= 3.0 * se;
    const LARGE: u64 = 10_000;
    let (passed16, _) = cheater_pass_rate(16, 16, LARGE, rng)?;
    Ok(vec![
        StatReport {
            verdict: stats::Verdict::from_bool(close),
            ..StatReport::upper("pass rate sigma=4", rate, se, expect)
        },
        rate_upper("pass rate sigma=16", passed16, LARGE, 0.75f64.powi(16)),
    ])
}

fn trapdoor(rng: &mut Rng) -> Result<Vec<StatReport>> {
    const RUNS: u64 = 1000;
    let params = SssParams::for_sigma(4)?;
    let lwe = LweParams::default();
    let mut identical = 0u64;
    let mut accepted = 0u64;
    for _ in 0..RUNS {
        let key = gen_binding(&lwe, rng);
        let m = params.random_vector(rng);
        let (com, state) = commit_phase(&params, &key, &m, rng)?;
        let challenge = random_challenge(&params, rng);
        let mut honest = Session::new(0, ssscommit::schedule());
        honest.send(Party::A, "sss-commit", &com)?;
        open_phase(&mut honest, &params, &key, &com, &state, &OpenBehaviour::Honest, challenge.clone())?;
        let mut sim = Session::new(0, ssscommit::schedule());
        sim.send(Party::A, "sss-commit", &com)?;
        trapdoor_open(&mut sim, &params, &key, &com, &state, &m, challenge)?;
        identical += u64::from(honest.transcript() == sim.transcript());

        let hkey = gen_hiding(&lwe, rng);
        let (com, state) = commit_phase(&params, &hkey, &m, rng)?;
        let other = loop {
            let o = params.random_vector(rng);
            if o != m {
                break o;
            }
        };
        let challenge = random_challenge(&params, rng);
        let got = trapdoor_open(&mut sss_session()?, &params, &hkey, &com, &state, &other, challenge);
        accepted += u64::from(got.is_ok_and(|g| g == other));
    }
    Ok(vec![
        all_of("simulated transcript equals honest", identical, RUNS),
        all_of("receiver accepts other message", accepted, RUNS),
    ])
}

fn partition_projection(i0: &[usize], i1: &[usize]) -> (bool, bool) {
    (i0.first() == Some(&0), i0.len() > i1.len())
}

fn oblivious_transfer(master: u64, rng: &mut Rng) -> Result<Vec<StatReport>> {
    let compiled = SessionConfig::new(ProtocolKind::CompiledOt);
    let batch = run_batch(&compiled, master ^ 0x08, 1000, 1)?;
    let correct = batch.count("correct");

    const PRIVACY: u64 = 10_000;
    let n = 256;
    let mut h = [BTreeMap::new(), BTreeMap::new()];
    for k in [false, true] {
        for _ in 0..PRIVACY {
            let mut inputs = OtInputs::random(ot::output_length(n, 0.1), rng);
            inputs.k = k;
            let mut rngs = PartyRngs::new(rng);
            let mut s = Session::new(0, ot::plain_schedule()).unrecorded();
            let out = protocols::run_ot(&mut s, n, &ChannelConfig::noiseless(), &inputs, &mut rngs)?;
            let (i0, i1) = &out.partition;
            *h[usize::from(k)].entry(partition_projection(i0, i1)).or_insert(0u64) += 1;
        }
    }
    let tvd = stats::tvd(&h[0], &h[1]);

    // post-test qubits of an m=256, α=½ run; `g` is the stored fraction γ(1−α)
    const ATTACKS: u64 = 1000;
    let survivors = 128;
    let chance = (-(ot::output_length(survivors, 0.1) as f64)).exp2();
    let mut advantage = |g: f64| -> Result<(f64, f64)> {
        let mut wins = 0u64;
        for _ in 0..ATTACKS {
            let mut rngs = PartyRngs::new(rng);
            wins += u64::from(ot::ot_storage_attack(survivors, g, 0.1, &mut rngs)?);
        }
        let (p, se) = stats::proportion(wins, ATTACKS);
        Ok((p - chance, se))
    };
    let (adv_ok, se_ok) = advantage(0.04)?;
    let (adv_bad, _) = advantage(0.15)?;
    Ok(vec![
        all_of("compiled completeness m=256", correct, 1000),
        StatReport::exact("partition tvd k=0 vs k=1", tvd, 0.05, tvd < 0.05),
        StatReport::upper("storage attack advantage g=0.04", adv_ok, se_ok, 0.05),
        StatReport::exact("storage attack advantage g=0.15 (outside regime)", adv_bad, 0.05, true),
    ])
}

fn delayed_measurement(master: u64) -> Result<Vec<StatReport>> {
    let cfg = SessionConfig { cheat: true, ..SessionConfig::new(ProtocolKind::CompiledOt) };
    let batch = run_batch(&cfg, master ^ 0x09, 1000, 1)?;
    let rejected = batch.counts.iter().filter(|(l, _)| l.starts_with("abort:")).map(|(_, c)| c).sum();
    Ok(vec![rate_lower("delayed measurement rejected", rejected, 1000, 0.99)])
}

fn identification(rng: &mut Rng) -> Result<Vec<StatReport>> {
    const HONEST: u64 = 1000;
    let m = 256;
    let mut accepted = 0u64;
    for _ in 0..HONEST {
        let ccfg = CompilerConfig::with_defaults(0.02, rng)?;
        let code = id::Code::random(16, m - ccfg.test_size(m), 0.25, rng)?;
        let w = rng.random_range(0..code.len());
        let mut rngs = PartyRngs::new(rng);
        let mut s = Session::new(0, id::full_compiled_schedule()).unrecorded();
        let out = protocols::run_compiled_id(&mut s, m, &ccfg, &ChannelConfig::noiseless(), &code, w, w, 8, &mut rngs)?;
        accepted += u64::from(out.accepted);
    }

    const WRONG: u64 = 10_000;
    let n = 128;
    let mut fooled = 0u64;
    let mut bytes = vec![0u64; 256];
    for _ in 0..WRONG {
        let code = id::Code::random(16, n, 0.25, rng)?;
        let wu = rng.random_range(0..code.len());
        let ws = (wu + rng.random_range(1..code.len())) % code.len();
        let mut rngs = PartyRngs::new(rng);
        let mut s = Session::new(0, id::plain_schedule()).unrecorded();
        let out = protocols::run_id(&mut s, &ChannelConfig::noiseless(), &code, wu, ws, 8, &mut rngs)?;
        fooled += u64::from(out.accepted);
        let kbits: Vec<bool> = out.kappa.iter().map(|&b| b == Basis::Cross).collect();
        for byte in bits::pack(&kbits) {
            bytes[usize::from(byte)] += 1;
        }
    }
    let (_, p) = stats::chi_square_uniform(&bytes);
    Ok(vec![
        all_of("compiled completeness m=256", accepted, HONEST),
        rate_upper("wrong password accepted", fooled, WRONG, (-8f64).exp2() + 0.02),
        StatReport::exact("shift byte chi-square p", p, 0.001, p > 0.001),
    ])
}

fn tamper_detection(rng: &mut Rng) -> Result<Vec<StatReport>> {
    let run = |m: usize, eve: Option<idplus::BitFlipTap>, tap: QubitTap, rng: &mut Rng| -> Result<bool> {
        // noiseless channel, so any test error aborts
        let ccfg = CompilerConfig::with_defaults(0.0, rng)?;
        let code = id::Code::random(8, m - ccfg.test_size(m), 0.25, rng)?;
        let keys = IdPlusKeys::random(rng);
        let w = rng.random_range(0..code.len());
        let mut rngs = PartyRngs::new(rng);
        let mut s = Session::new(0, idplus::full_compiled_schedule());
        if let Some(e) = eve {
            s = s.with_eve(Box::new(e));
        }
        let out = protocols::id_plus_run(
            &mut s,
            m,
            &ccfg,
            &ChannelConfig::noiseless(),
            &code,
            w,
            w,
            8,
            &keys,
            &tap,
            &mut rngs,
        );
        match out {
            Ok(o) => Ok(o.accepted),
            Err(e) if e.is_abort() => Ok(false),
            Err(e) => Err(e),
        }
    };
    const FLIPS: u64 = 1000;
    let mut caught = 0u64;
    for _ in 0..FLIPS {
        let tap = idplus::BitFlipTap { round: rng.random_range(0..idplus::message_count()), pick: rng.random() };
        caught += u64::from(!run(128, Some(tap), QubitTap::None, rng)?);
    }
    const MEASURE: u64 = 200;
    let mut stopped = 0u64;
    for _ in 0..MEASURE {
        stopped += u64::from(!run(512, None, QubitTap::MeasureFixed { fraction: 0.1, basis: Basis::Plus }, rng)?);
    }
    Ok(vec![
        rate_lower("single bit tamper rejected", caught, FLIPS, 1.0 - (-16f64).exp2() - 0.01),
        rate_lower("measuring eve rejected m=512", stopped, MEASURE, 0.9),
    ])
}

fn coin_flipping(rng: &mut Rng) -> Result<Vec<StatReport>> {
    const HONEST: u64 = 100_000;
    let naor = NaorParams::default();
    let scheme = CoinScheme::Naor(naor);
    let mut counts = vec![0u64; 256];
    for _ in 0..HONEST {
        let mut a = HonestCommitter { rng: fork(rng, "a") };
        let mut b = HonestResponder { rng: fork(rng, "b") };
        let mut s = Session::new(0, COIN.schedule()).unrecorded();
        let out = coin_sequential(&mut s, &scheme, &COIN, 8, &mut a, &mut b)?;
        counts[bits::to_u64(&out) as usize] += 1;
    }
    let (_, p) = stats::chi_square_uniform(&counts);

    let extractors = [Extractor::Naor(NaorTable::get(naor)?), Extractor::Lwe(gen_binding(&LweParams::default(), rng))];
    let (mut hits, mut completed) = (0u64, 0u64);
    for i in 0..400u64 {
        let target = random_bits(8, rng);
        let ext = &extractors[(i % 2) as usize];
        let r = fork(rng, "alice");
        let mut s = Session::new(0, COIN.schedule()).unrecorded();
        let out = match i % 8 / 2 {
            0 => enforce_against_alice(&mut s, ext, &COIN, &target, &mut HonestCommitter { rng: r }, rng),
            1 => enforce_against_alice(&mut s, ext, &COIN, &target, &mut EquivocatingCommitter { rng: r }, rng),
            2 => enforce_against_alice(&mut s, ext, &COIN, &target, &mut RefusingCommitter { rng: r, at: 5 }, rng),
            _ => {
                let allowed = [random_bits(8, rng), target.clone()];
                enforce_against_alice(&mut s, ext, &COIN, &target, &mut SteeringCommitter::new(r, &allowed), rng)
            }
        };
        match out {
            Ok(bits) => {
                completed += 1;
                hits += u64::from(bits == target);
            }
            Err(e) if e.is_abort() => {}
            Err(e) => return Err(e),
        }
    }

    let cfg = FfConfig::new(8, 8, KeyStringMode::Trapdoorable)?;
    const BOB_RUNS: u64 = 1000;
    let (mut bob_hits, mut bob_done) = (0u64, 0u64);
    for i in 0..BOB_RUNS {
        let target = random_bits(8, rng);
        let r = fork(rng, "bob");
        let mut s = Session::new(0, cfg.schedule()).unrecorded();
        let out = match i % 3 {
            0 => simulate_force_force_against_bob(
                &mut s,
                &cfg,
                &target,
                &mut FfBob::new(r, HonestResponder { rng: fork(rng, "resp") }),
                rng,
            ),
            1 => simulate_force_force_against_bob(&mut s, &cfg, &target, &mut FfBob::new(r, ParityResponder), rng),
            _ => simulate_force_force_against_bob(
                &mut s,
                &cfg,
                &target,
                &mut FfBob::new(r, ConstantResponder { bit: true }),
                rng,
            ),
        };
        match out {
            Ok(bits) => {
                bob_done += 1;
                bob_hits += u64::from(bits == target);
            }
            Err(e) if e.is_abort() => {}
            Err(e) => return Err(e),
        }
    }

    const ALICE_RUNS: u64 = 300;
    let mut failures = 0u64;
    for i in 0..ALICE_RUNS {
        let target = random_bits(8, rng);
        let behaviour = if i % 2 == 0 { FfBehaviour::MaxAgreement } else { FfBehaviour::Honest };
        let mut alice = FfAlice::new(fork(rng, "alice"), behaviour);
        let mut s = Session::new(0, cfg.schedule()).unrecorded();
        match simulate_force_force_against_alice(&mut s, &cfg, &target, &mut alice, rng) {
            Ok(bits) => failures += u64::from(bits != target),
            Err(e) if e.is_abort() => {}
            Err(e) => return Err(e),
        }
    }

    Ok(vec![
        StatReport::exact("honest coin chi-square p", p, 0.001, p > 0.001),
        all_of("committer-side enforcement hits target", hits, completed),
        all_of("strong flip responder-side enforcement hits target", bob_hits, bob_done),
        rate_upper("strong flip committer-side enforcement failure", failures, ALICE_RUNS, 0.75f64.powi(8)),
    ])
}

fn permutations(v: usize) -> Vec<Vec<usize>> {
    if v == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(v - 1) {
        for pos in 0..v {
            let mut q = p.clone();
            q.insert(pos, v - 1);
            out.push(q);
        }
    }
    out
}

fn zk_once(g: &Graph, prover: &Prover, cfg: &ZkpkConfig, rng: &mut Rng) -> Result<zkpk::ZkpkOutcome> {
    let mut rngs = PartyRngs::new(rng);
    let mut s = Session::new(0, zkpk::schedule()).unrecorded();
    zkpk::zkpk_run(&mut s, g, prover, cfg, &mut rngs)
}

fn proof_of_knowledge(rng: &mut Rng) -> Result<Vec<StatReport>> {
    const HONEST: u64 = 200;
    let cfg = ZkpkConfig::new(8, 8)?;
    let mut accepted = 0u64;
    for _ in 0..HONEST {
        let (g, w) = Graph::random_hamiltonian(8, rng)?;
        accepted += u64::from(zk_once(&g, &Prover::Honest(w), &cfg, rng)?.accepted);
    }

    const CHEATS: u64 = 10_000;
    let small = ZkpkConfig::new(4, 8)?;
    let mut fooled = 0u64;
    for _ in 0..CHEATS {
        let (g, _) = Graph::random_hamiltonian(4, rng)?;
        fooled += u64::from(zk_once(&g, &Prover::Cheat, &small, rng)?.accepted);
    }

    let binding = ZkpkConfig { binding: true, ..ZkpkConfig::new(8, 8)? };
    let (mut extracted, mut accepting) = (0u64, 0u64);
    for _ in 0..HONEST {
        let (g, w) = Graph::random_hamiltonian(8, rng)?;
        let out = zk_once(&g, &Prover::Honest(w), &binding, rng)?;
        if out.accepted {
            accepting += 1;
            extracted += u64::from(out.extracted.is_some_and(|c| is_hamiltonian_cycle(&g, &c)));
        }
    }

    let enc = HamEncoding::new(4, 1)?;
    let mut graphs = vec![Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])?];
    for _ in 0..4 {
        graphs.push(Graph::random_hamiltonian(4, rng)?.0);
    }
    let mut exact = true;
    for (i, g) in graphs.iter().enumerate() {
        let w: Vec<usize> = if i == 0 {
            (0..4).collect()
        } else {
            permutations(4).into_iter().find(|c| is_hamiltonian_cycle(g, c)).expect("graph is Hamiltonian")
        };
        for bit in [false, true] {
            let real = stats::histogram(permutations(4).iter().map(|pi| {
                let blk = enc.encode_repetition(g, &w, pi);
                enc.select(&[bit], &blk).into_iter().map(|p| (p, blk[p])).collect::<Vec<_>>()
            }));
            let sim = stats::histogram(permutations(4).iter().map(|p| enc.simulate_repetition(g, bit, p)));
            exact &= real == sim;
        }
    }

    Ok(vec![
        all_of("completeness v=8 sigma=8", accepted, HONEST),
        rate_upper("witnessless acceptance v=4 sigma=8", fooled, CHEATS, (-8f64).exp2()),
        all_of("binding-mode extraction on accepting runs", extracted, accepting),
        StatReport::exact("simulated openings equal real at v=4", f64::from(u8::from(exact)), 1.0, exact),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_cover_all_criteria() {
        for id in 1..=CRITERIA {
            assert_ne!(criterion_name(id), "unknown");
        }
        assert!(run_criterion(0, 1).is_err());
    }

    #[test]
    fn fast_criteria_pass() {
        for id in [3, 5] {
            let r = run_criterion(id, 7).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn reproducibility_compares_bytes() {
        assert!(reproducibility_report("{}", "{}").passed);
        assert!(!reproducibility_report("{}", "{ }").passed);
    }

    #[test]
    fn projections() {
        assert_eq!(partition_projection(&[0, 2, 3], &[1]), (true, true));
        assert_eq!(partition_projection(&[1], &[0, 2]), (false, false));
        let c = crate::mixedcommit::LweCommitment { a_vec: vec![256], c_val: 0 };
        assert_eq!(hiding_projection(&c, 257), (0, 7));
    }
}
