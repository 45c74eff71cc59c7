//! The eleven acceptance criteria, each run as a seeded suite with its
//! tolerance, expected check count and time limit. Prints one line per
//! criterion and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Duration;

use slicereg::verify::run_suite;

const SEED: u64 = 7;

enum Count {
    Exactly(u64),
    MoreThan(u64),
}

struct Criterion {
    suite: &'static str,
    limit_secs: u64,
    count: Count,
}

const CRITERIA: [Criterion; 11] = [
    Criterion { suite: "star", limit_secs: 5, count: Count::Exactly(200 * 20) },
    Criterion { suite: "commutativity", limit_secs: 5, count: Count::Exactly(100 * 50 * 2) },
    Criterion { suite: "representation", limit_secs: 3, count: Count::Exactly(100 * 100) },
    Criterion { suite: "zeros", limit_secs: 10, count: Count::MoreThan(100) },
    Criterion { suite: "divisor", limit_secs: 5, count: Count::Exactly(50 * 4) },
    Criterion { suite: "realization", limit_secs: 5, count: Count::Exactly(50) },
    Criterion { suite: "exp-root", limit_secs: 3, count: Count::Exactly(20 * 3 * 100) },
    Criterion { suite: "isssa", limit_secs: 10, count: Count::Exactly(20 + 3) },
    Criterion { suite: "valuation", limit_secs: 5, count: Count::Exactly(10 * (7 + 7 + 5)) },
    Criterion { suite: "character", limit_secs: 5, count: Count::Exactly(100 + 20 * 2) },
    Criterion { suite: "laurent", limit_secs: 5, count: Count::Exactly(50 * 3) },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for c in &CRITERIA {
        let report = match run_suite(c.suite, SEED) {
            Ok(r) => r,
            Err(e) => {
                println!("criterion ?? [FAIL] {}: {e}", c.suite);
                failed += 1;
                continue;
            }
        };
        let limit = Duration::from_secs(c.limit_secs);
        let count_ok = match c.count {
            Count::Exactly(n) => report.checks == n,
            Count::MoreThan(n) => report.checks > n,
        };
        let ok = report.passed && report.elapsed <= limit && count_ok;
        println!(
            "criterion {:>2} [{}] {}: {} checks, {} failures, worst {:.3e} (tol {:.0e}), {:.2}s (limit {}s)",
            report.criterion,
            if ok { "PASS" } else { "FAIL" },
            report.suite,
            report.checks,
            report.failures,
            report.worst,
            report.tolerance,
            report.elapsed.as_secs_f64(),
            c.limit_secs,
        );
        if let Some(f) = &report.first_failure {
            println!("    first failure: {f}");
        }
        if !count_ok {
            println!("    unexpected check count {}", report.checks);
        }
        if !ok {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
