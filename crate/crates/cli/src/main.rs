use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcw_core::bits;
use qcw_core::harness::drivers::{self, IdArgs, OtArgs, OtStrategy, Side, Tamper, ZkArgs};
use qcw_core::harness::suite;
use qcw_core::stats::StatReport;
use qcw_core::zkpk::Graph;
use qcw_core::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "qcw", version, about = "Seeded statistical checks for BB84-based two-party protocols")]
struct Cli {
    /// Master seed; QCW_SEED takes precedence when set.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Number of sessions; each command has its own default.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Print the JSON document instead of one line per report.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON document to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compiled oblivious transfer against a chosen receiver.
    Ot(OtCmd),
    /// Password identification.
    Id(IdCmd),
    /// Authenticated identification under tampering.
    Idplus(IdPlusCmd),
    #[command(subcommand)]
    /// Coin flipping and enforcement simulators.
    Coin(CoinCmd),
    /// Extraction, binding and hiding of the dual-mode commitment.
    Commit,
    /// Cut-and-choose commitment against a corrupting committer.
    Ssscommit(SssCmd),
    #[command(subcommand)]
    /// Proof of knowledge of a Hamiltonian cycle.
    Zkpk(ZkCmd),
    /// Coin-flipped reference string with a non-interactive proof.
    Iqzk(IqzkCmd),
    /// Privacy amplification on random leaky sources.
    Pa(PaCmd),
    /// The acceptance suite.
    Suite(SuiteCmd),
}

#[derive(Args)]
struct OtCmd {
    #[arg(long, default_value_t = 256)]
    m: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Channel noise.
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Error-rate threshold; defaults to phi + 0.03.
    #[arg(long)]
    phi_prime: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 0.08)]
    gamma: f64,
    /// honest, delayed or storage.
    #[arg(long, default_value = "honest")]
    strategy: OtStrategy,
}

#[derive(Args)]
struct IdCmd {
    #[arg(long, default_value_t = 256)]
    m: usize,
    /// Run without the compiler on m qubits.
    #[arg(long)]
    plain: bool,
    #[arg(long)]
    wrong_password: bool,
    #[arg(long, default_value_t = 8)]
    ell: usize,
}

#[derive(Args)]
struct IdPlusCmd {
    #[arg(long, default_value_t = 512)]
    m: usize,
    /// none, bitflip or measure.
    #[arg(long, default_value = "none")]
    tamper: Tamper,
}

#[derive(Subcommand)]
enum CoinCmd {
    /// Honest sequential flips.
    Flip {
        #[arg(long, default_value_t = 8)]
        bits: usize,
    },
    /// Steer runs to a target against one corrupted side.
    Force {
        /// Target bits, LSB first within each byte.
        #[arg(long)]
        target: String,
        /// Use only the first N bits of the target.
        #[arg(long)]
        target_bits: Option<usize>,
        #[arg(long, default_value = "bob")]
        side: Side,
        /// Simulate the strong flip with this σ instead of the sequential coin.
        #[arg(long)]
        sigma: Option<usize>,
    },
}

#[derive(Args)]
struct SssCmd {
    #[arg(long, default_value_t = 4)]
    sigma: usize,
    /// Corrupted positions; defaults to sigma.
    #[arg(long)]
    bad: Option<usize>,
}

#[derive(Subcommand)]
enum ZkCmd {
    Run {
        #[arg(long, default_value_t = 8)]
        vertices: usize,
        #[arg(long, default_value_t = 8)]
        sigma: usize,
        /// Prove without a witness.
        #[arg(long)]
        cheat: bool,
        /// JSON adjacency list; random Hamiltonian graphs otherwise.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
}

#[derive(Args)]
struct IqzkCmd {
    #[arg(long, default_value_t = 8)]
    crs_bits: usize,
}

#[derive(Args)]
struct PaCmd {
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    ell: usize,
    #[arg(long, default_value_t = 1)]
    leak: usize,
}

#[derive(Args)]
struct SuiteCmd {
    /// Run a single criterion.
    #[arg(long)]
    criterion: Option<u8>,
}

// A closed pipe (e.g. `| head`) is not an error.
fn emit(line: &str) {
    let _ = writeln!(std::io::stdout(), "{line}");
}

struct Output {
    doc: Value,
    lines: Vec<String>,
    passed: bool,
}

fn report_line(r: &StatReport) -> String {
    let tag = if r.verdict.passed() { "PASS" } else { "FAIL" };
    format!("[{tag}] {}: estimate={:.6} std_err={:.6} bound={:.6}", r.metric, r.estimate, r.std_err, r.bound)
}

fn from_reports(command: &str, reports: Vec<StatReport>, records: Option<Value>) -> Output {
    let passed = reports.iter().all(|r| r.verdict.passed());
    let lines = reports.iter().map(report_line).collect();
    let mut doc = json!({ "command": command, "reports": reports, "passed": passed });
    if let Some(r) = records {
        doc["records"] = r;
    }
    Output { doc, lines, passed }
}

fn parse_target(hex_str: &str, n: Option<usize>) -> Result<Vec<bool>, Error> {
    let bytes = hex::decode(hex_str).map_err(|e| Error::usage(format!("target: {e}")))?;
    let all = bytes.len() * 8;
    let n = n.unwrap_or(all);
    if n == 0 || n > all {
        return Err(Error::usage(format!("target has {all} bits, asked for {n}")));
    }
    Ok(bits::unpack(&bytes, n))
}

fn load_graph(path: &PathBuf) -> Result<Graph, Error> {
    let text = std::fs::read_to_string(path)?;
    let list: Vec<Vec<usize>> =
        serde_json::from_str(&text).map_err(|e| Error::usage(format!("{}: {e}", path.display())))?;
    Graph::from_adjacency_list(&list).map_err(|e| Error::usage(e.to_string()))
}

fn run(cli: &Cli, seed: u64) -> Result<Output, Error> {
    let trials = |default: u64| cli.trials.unwrap_or(default);
    Ok(match &cli.command {
        Command::Ot(c) => {
            let args = OtArgs {
                m: c.m,
                alpha: c.alpha,
                phi: c.phi,
                phi_prime: c.phi_prime.unwrap_or(c.phi + 0.03),
                lambda: c.lambda,
                gamma: c.gamma,
                strategy: c.strategy,
            };
            from_reports("ot", drivers::ot_driver(&args, trials(100), seed)?, None)
        }
        Command::Id(c) => {
            let args = IdArgs { m: c.m, compiled: !c.plain, wrong_password: c.wrong_password, ell: c.ell };
            from_reports("id", drivers::id_driver(&args, trials(100), seed)?, None)
        }
        Command::Idplus(c) => from_reports("idplus", drivers::idplus_driver(c.m, c.tamper, trials(50), seed)?, None),
        Command::Coin(CoinCmd::Flip { bits }) => {
            let (records, reports) = drivers::coin_flip(*bits, trials(1000), seed)?;
            from_reports("coin flip", reports, Some(json!(records)))
        }
        Command::Coin(CoinCmd::Force { target, target_bits, side, sigma }) => {
            let target = parse_target(target, *target_bits)?;
            let (records, reports) = drivers::coin_force(&target, *side, *sigma, trials(20), seed)?;
            from_reports("coin force", reports, Some(json!(records)))
        }
        Command::Commit => from_reports("commit", drivers::commit_driver(trials(100_000), seed)?, None),
        Command::Ssscommit(c) => {
            let bad = c.bad.unwrap_or(c.sigma);
            from_reports("ssscommit", drivers::sss_driver(c.sigma, bad, trials(2000), seed)?, None)
        }
        Command::Zkpk(ZkCmd::Run { vertices, sigma, cheat, graph }) => {
            let graph = graph.as_ref().map(load_graph).transpose()?;
            let args = ZkArgs { graph, vertices: *vertices, sigma: *sigma, cheat: *cheat };
            from_reports("zkpk run", drivers::zkpk_driver(&args, trials(20), seed)?, None)
        }
        Command::Iqzk(c) => from_reports("iqzk", drivers::iqzk_driver(c.crs_bits, trials(1000), seed)?, None),
        Command::Pa(c) => from_reports("pa", drivers::pa_driver(c.n, c.ell, c.leak, trials(100), seed)?, None),
        Command::Suite(c) => match c.criterion {
            Some(id) => {
                let r = suite::run_criterion(id, seed)?;
                let lines = std::iter::once(r.line())
                    .chain(r.reports.iter().map(|x| format!("    {}", report_line(x))))
                    .collect();
                Output { passed: r.passed, doc: json!(r), lines }
            }
            None => {
                let quiet = cli.json;
                let r = suite::run_suite(seed, |c| {
                    if !quiet {
                        emit(&c.line());
                    }
                })?;
                Output { passed: r.passed, doc: serde_json::to_value(&r).expect("serializable"), lines: Vec::new() }
            }
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = match std::env::var("QCW_SEED") {
        Ok(s) => match s.parse() {
            Ok(v) => v,
            Err(_) => {
                eprintln!("error: QCW_SEED={s} is not an unsigned integer");
                return ExitCode::from(2);
            }
        },
        Err(_) => cli.seed,
    };
    let out = match run(&cli, seed) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if matches!(e, Error::Usage(_) | Error::Param(_)) { 2 } else { 1 });
        }
    };
    let mut doc = out.doc;
    doc["seed"] = json!(seed);
    let text = serde_json::to_string_pretty(&doc).expect("serializable");
    if cli.json {
        emit(&text);
    } else {
        for l in &out.lines {
            emit(l);
        }
    }
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    ExitCode::from(if out.passed { 0 } else { 1 })
}
