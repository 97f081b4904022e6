//! Acceptance suite: runs criteria 1 through 10 with a fixed seed and prints
//! one line per criterion. Exits nonzero if any criterion fails or aborts.
//!
//! Pass criterion ids as arguments to run a subset.

use std::process::ExitCode;
use std::time::Instant;

use invlab::acceptance::{run_criterion, SuiteOptions, CRITERIA};

const SEED: u64 = 1;

fn main() -> ExitCode {
    let selected: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let opts = SuiteOptions {
        seed: SEED,
        ..SuiteOptions::default()
    };
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        match run_criterion(id, &opts) {
            Ok(r) => {
                println!("{} [{:.1} s]", r.line(), start.elapsed().as_secs_f64());
                if !r.passed {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("criterion {id}: FAIL (error) {e}");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
