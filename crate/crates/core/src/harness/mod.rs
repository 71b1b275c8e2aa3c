//! Seeded session runner, batch driver and the acceptance suite.

pub mod drivers;
pub mod suite;

use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coinflip::{coin_sequential, CoinScheme, HonestCommitter, HonestResponder, COIN};
use crate::error::{Error, Result};
use crate::mixedcommit::NaorParams;
use crate::protocols::{self, id, idplus, ot, BobStrategy, CompilerConfig, IdPlusKeys, OtInputs, PartyRngs, QubitTap};
use crate::qchannel::ChannelConfig;
use crate::rng::{fork, session_rng};
use crate::session::{EveTap, PassThrough, Schedule, Session, TranscriptRecord};
use crate::stats::{self, StatReport};
use crate::zkpk::{self, Graph, Prover, ZkpkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    Ot,
    CompiledOt,
    Id,
    IdPlus,
    Coin,
    Zkpk,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 6] = [
        ProtocolKind::Ot,
        ProtocolKind::CompiledOt,
        ProtocolKind::Id,
        ProtocolKind::IdPlus,
        ProtocolKind::Coin,
        ProtocolKind::Zkpk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Ot => "ot",
            ProtocolKind::CompiledOt => "compiled-ot",
            ProtocolKind::Id => "id",
            ProtocolKind::IdPlus => "idplus",
            ProtocolKind::Coin => "coin",
            ProtocolKind::Zkpk => "zkpk",
        }
    }

    /// Whether a classical tap may sit on the wire.
    pub fn supports_eve(self) -> bool {
        matches!(self, ProtocolKind::Ot | ProtocolKind::CompiledOt | ProtocolKind::Id | ProtocolKind::IdPlus)
    }

    /// Qubit count, code length, coin length or vertex count.
    pub fn default_size(self) -> usize {
        match self {
            ProtocolKind::Ot => 64,
            ProtocolKind::CompiledOt => 256,
            ProtocolKind::Id => 128,
            ProtocolKind::IdPlus => 512,
            ProtocolKind::Coin => 8,
            ProtocolKind::Zkpk => 8,
        }
    }

    pub fn schedule(self) -> Schedule {
        match self {
            ProtocolKind::Ot => ot::plain_schedule(),
            ProtocolKind::CompiledOt => ot::full_compiled_schedule(),
            ProtocolKind::Id => id::plain_schedule(),
            ProtocolKind::IdPlus => idplus::full_compiled_schedule(),
            ProtocolKind::Coin => COIN.schedule(),
            ProtocolKind::Zkpk => zkpk::schedule(),
        }
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown protocol {s}")))
    }
}

/// Registered adversaries on the classical wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EveSpec {
    None,
    PassThrough,
    /// Flip one bit of the message in `round`.
    BitFlip {
        round: usize,
        pick: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub protocol: ProtocolKind,
    pub size: usize,
    pub noise: f64,
    pub eve: EveSpec,
    /// Keep the transcript; large batches switch it off.
    pub record: bool,
    /// Run the dishonest strategy the protocol is tested against: a
    /// wrong password, a delayed-measuring receiver, a witnessless prover.
    pub cheat: bool,
}

impl SessionConfig {
    pub fn new(protocol: ProtocolKind) -> Self {
        SessionConfig {
            protocol,
            size: protocol.default_size(),
            noise: 0.0,
            eve: EveSpec::None,
            record: true,
            cheat: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.eve != EveSpec::None && !self.protocol.supports_eve() {
            return Err(Error::Config(format!("{} does not accept a wire tap", self.protocol.name())));
        }
        if self.cheat && matches!(self.protocol, ProtocolKind::Coin | ProtocolKind::IdPlus) {
            return Err(Error::Config(format!("{} has no registered cheating strategy", self.protocol.name())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Ot { k: bool, received: String, expected: String },
    Verdict { accepted: bool },
    Coin { bits: String },
    Abort { reason: String },
}

impl Outcome {
    /// Short label used to aggregate batches.
    pub fn label(&self) -> String {
        match self {
            Outcome::Ot { received, expected, .. } => {
                if received == expected { "correct" } else { "wrong" }.to_string()
            }
            Outcome::Verdict { accepted } => if *accepted { "accepted" } else { "rejected" }.to_string(),
            Outcome::Coin { bits } => bits.clone(),
            Outcome::Abort { reason } => format!("abort:{reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRun {
    pub outcome: Outcome,
    pub transcript: Vec<TranscriptRecord>,
}

fn bits_str(b: &[bool]) -> String {
    crate::bits::to_string(b)
}

fn tap(spec: EveSpec) -> Option<Box<dyn EveTap>> {
    match spec {
        EveSpec::None => None,
        EveSpec::PassThrough => Some(Box::new(PassThrough)),
        EveSpec::BitFlip { round, pick } => Some(Box::new(idplus::BitFlipTap { round, pick })),
    }
}

/// One session of `cfg` with randomness derived from `(master, index)`.
pub fn run_session(cfg: &SessionConfig, master: u64, index: u64) -> Result<SessionRun> {
    cfg.validate()?;
    let mut rng = session_rng(master, index);
    let mut setup = fork(&mut rng, "setup");
    let mut rngs = PartyRngs::new(&mut rng);
    let mut session = Session::new(index, cfg.protocol.schedule());
    if !cfg.record && cfg.protocol != ProtocolKind::IdPlus {
        session = session.unrecorded();
    }
    if let Some(t) = tap(cfg.eve) {
        session = session.with_eve(t);
    }
    let channel = ChannelConfig::new(cfg.noise)?;
    let result = drive(&mut session, cfg, &channel, &mut setup, &mut rngs);
    let outcome = match result {
        Ok(o) => o,
        Err(Error::Abort(r)) => Outcome::Abort { reason: r.to_string() },
        Err(e) => return Err(e),
    };
    Ok(SessionRun { outcome, transcript: session.into_transcript() })
}

fn drive(
    session: &mut Session,
    cfg: &SessionConfig,
    channel: &ChannelConfig,
    setup: &mut crate::rng::Rng,
    rngs: &mut PartyRngs,
) -> Result<Outcome> {
    let n = cfg.size;
    match cfg.protocol {
        ProtocolKind::Ot | ProtocolKind::CompiledOt => {
            let inputs = OtInputs::random(ot::output_length(ot_effective(cfg), 0.1).max(1), setup);
            let out = if cfg.protocol == ProtocolKind::Ot {
                protocols::run_ot(session, n, channel, &inputs, rngs)?
            } else {
                let ccfg = CompilerConfig::with_defaults(0.02, setup)?;
                let bob = if cfg.cheat { BobStrategy::DelayedMeasurement } else { BobStrategy::Honest };
                protocols::run_compiled_ot(session, n, &ccfg, channel, &inputs, bob, rngs)?
            };
            Ok(Outcome::Ot { k: inputs.k, received: bits_str(&out.received), expected: bits_str(inputs.chosen()) })
        }
        ProtocolKind::Id => {
            let code = id::Code::random(16, n, 0.25, setup)?;
            let wu = if cfg.cheat { 1 } else { 0 };
            let out = protocols::run_id(session, channel, &code, wu, 0, 8, rngs)?;
            Ok(Outcome::Verdict { accepted: out.accepted })
        }
        ProtocolKind::IdPlus => {
            let ccfg = CompilerConfig::with_defaults(0.08, setup)?;
            let surviving = n - ccfg.test_size(n);
            let code = id::Code::random(8, surviving, 0.25, setup)?;
            let keys = IdPlusKeys::random(setup);
            let out = protocols::id_plus_run(session, n, &ccfg, channel, &code, 0, 0, 8, &keys, &QubitTap::None, rngs)?;
            Ok(Outcome::Verdict { accepted: out.accepted })
        }
        ProtocolKind::Coin => {
            let mut a = HonestCommitter { rng: fork(&mut rngs.alice, "coin") };
            let mut b = HonestResponder { rng: fork(&mut rngs.bob, "coin") };
            let bits = coin_sequential(session, &CoinScheme::Naor(NaorParams::default()), &COIN, n, &mut a, &mut b)?;
            Ok(Outcome::Coin { bits: bits_str(&bits) })
        }
        ProtocolKind::Zkpk => {
            let (g, w) = Graph::random_hamiltonian(n, setup)?;
            let prover = if cfg.cheat { Prover::Cheat } else { Prover::Honest(w) };
            let out = zkpk::zkpk_run(session, &g, &prover, &ZkpkConfig::new(n, 8)?, rngs)?;
            Ok(Outcome::Verdict { accepted: out.accepted })
        }
    }
}

/// Qubits left for post-processing.
fn ot_effective(cfg: &SessionConfig) -> usize {
    match cfg.protocol {
        ProtocolKind::CompiledOt => cfg.size - cfg.size.div_ceil(2).min(cfg.size.saturating_sub(1)),
        _ => cfg.size,
    }
}

/// Aggregated outcome labels of a batch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub protocol: ProtocolKind,
    pub trials: u64,
    pub counts: BTreeMap<String, u64>,
}

impl BatchSummary {
    pub fn count(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    /// The default checks for the batch: completeness for honest runs,
    /// uniformity for coins, acceptance of cheaters as a rate.
    pub fn reports(&self, cfg: &SessionConfig) -> Vec<StatReport> {
        let n = self.trials;
        match cfg.protocol {
            ProtocolKind::Coin => {
                let cells = 1usize << cfg.size.min(16);
                let mut counts = vec![0u64; cells];
                for (label, &c) in &self.counts {
                    if let Some(i) = label_index(label) {
                        counts[i] = c;
                    }
                }
                let (_, p) = stats::chi_square_uniform(&counts);
                vec![StatReport::exact("coin uniformity chi-square p", p, 0.001, p > 0.001)]
            }
            _ => {
                let good = self.count("correct") + self.count("accepted");
                let (rate, se) = stats::proportion(good, n);
                if cfg.cheat {
                    vec![StatReport::upper(format!("{} cheat acceptance", cfg.protocol.name()), rate, se, 1.0)]
                } else {
                    vec![StatReport::lower(format!("{} completeness", cfg.protocol.name()), rate, se, 1.0)]
                }
            }
        }
    }
}

fn label_index(bits: &str) -> Option<usize> {
    bits.chars().rev().try_fold(0usize, |acc, c| match c {
        '0' => Some(acc << 1),
        '1' => Some(acc << 1 | 1),
        _ => None,
    })
}

/// `trials` sessions on `parallelism` threads. The result does not depend
/// on the thread count.
pub fn run_batch(cfg: &SessionConfig, master: u64, trials: u64, parallelism: usize) -> Result<BatchSummary> {
    if trials == 0 {
        return Err(Error::param("a batch needs at least one trial"));
    }
    let cfg = SessionConfig { record: cfg.protocol == ProtocolKind::IdPlus, ..*cfg };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let labels: Vec<String> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| run_session(&cfg, master, i).map(|r| r.outcome.label()))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut counts = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    Ok(BatchSummary { protocol: cfg.protocol, trials, counts })
}
