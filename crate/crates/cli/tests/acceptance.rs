//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use qdp::acceptance::{
    criterion_1, criterion_10, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
    criterion_8, criterion_9, CriterionResult, SuiteConfig,
};
use qdp::random::DEFAULT_SEED;

/// Truncation every criterion runs at.
const H_ORDER: i64 = 8;
const DEGREE_CAP: u32 = 8;
/// Wall-clock limit of criterion 1.
const CRITERION_1_LIMIT: Duration = Duration::from_secs(5);

fn selftest_json(parallel: bool) -> (Option<i32>, Vec<u8>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qdp"));
    cmd.args(["selftest", "--format", "json", "--h-order", "8", "--degree", "8"]);
    cmd.env_remove("QDP_DEFAULT_ORDER");
    if !parallel {
        cmd.arg("--no-parallel");
    }
    let out = cmd.output().expect("qdp runs");
    (out.status.code(), out.stdout)
}

fn criterion_11() -> CriterionResult {
    let (pc, par) = selftest_json(true);
    let (sc, seq) = selftest_json(false);
    let mut failures = Vec::new();
    if par != seq {
        failures.push("parallel and sequential reports differ".to_string());
    }
    if pc != sc {
        failures.push(format!("exit codes differ: {pc:?} vs {sc:?}"));
    }
    if par.is_empty() {
        failures.push("empty report".to_string());
    }
    CriterionResult {
        id: "11".into(),
        title: "selftest JSON identical with and without --no-parallel".into(),
        pass: failures.is_empty(),
        checks: 3,
        failures,
    }
}

fn main() {
    let cfg = SuiteConfig {
        h_order: H_ORDER,
        degree_cap: DEGREE_CAP,
        seed: DEFAULT_SEED,
    };
    let start = Instant::now();
    let mut first = criterion_1(&cfg);
    let took = start.elapsed();
    first.checks += 1;
    if took > CRITERION_1_LIMIT {
        first.pass = false;
        first.failures.push(format!("took {took:?}, limit {CRITERION_1_LIMIT:?}"));
    }
    let mut results = vec![first];
    let rest: [fn(&SuiteConfig) -> CriterionResult; 9] = [
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    results.extend(rest.iter().map(|f| f(&cfg)));
    results.push(criterion_11());
    let mut failed = 0;
    for r in &results {
        println!("{}", r.line());
        for f in &r.failures {
            println!("    {f}");
        }
        failed += usize::from(!r.pass);
    }
    println!(
        "{} of {} criteria passed (h-order {H_ORDER}, degree cap {DEGREE_CAP}) in {:.1?}",
        results.len() - failed,
        results.len(),
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
