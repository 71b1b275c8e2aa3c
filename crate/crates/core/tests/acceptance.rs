use std::process::ExitCode;

use qcw_core::harness::suite;

const MASTER_SEED: u64 = 20_240_601;

fn main() -> ExitCode {
    let report = suite::run_suite(MASTER_SEED, |c| {
        println!("{}", c.line());
        for r in &c.reports {
            let tag = if r.verdict.passed() { "ok" } else { "FAILED" };
            println!(
                "        {tag:>6} {}: estimate={:.6} std_err={:.6} bound={:.6}",
                r.metric, r.estimate, r.std_err, r.bound
            );
        }
    });
    match report {
        Ok(r) => {
            let failed = r.criteria.iter().filter(|c| !c.passed).count();
            println!("acceptance: {} passed, {failed} failed", r.criteria.len() - failed);
            if r.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            println!("acceptance: error: {e}");
            ExitCode::FAILURE
        }
    }
}
