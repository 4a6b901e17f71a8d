//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails. Pass criterion numbers as arguments to
//! run a subset, e.g. `cargo test -p wordbench-cli --test acceptance -- 4 9`.

mod data;
mod embeddings;
mod gradients;
mod pipelines;
mod structural;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

/// Outcome detail on success, reason on failure.
pub type Outcome = Result<String, String>;

/// Fails the enclosing criterion with a formatted reason.
#[macro_export]
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

struct Criterion {
    id: u32,
    name: &'static str,
    run: fn() -> Outcome,
}

const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "gain ratio table reproduction", run: structural::pgr_table_reproduction },
    Criterion { id: 2, name: "gradient checks", run: gradients::all_gradient_checks },
    Criterion { id: 3, name: "skip-gram / factorization equivalence", run: structural::equivalence },
    Criterion { id: 4, name: "viterbi against exhaustive search", run: structural::viterbi_oracle },
    Criterion { id: 5, name: "subsampling statistics", run: structural::subsampling_statistics },
    Criterion { id: 6, name: "desk-scale embedding quality", run: embeddings::wordsim_quality },
    Criterion { id: 7, name: "c&w analogy below cbow", run: embeddings::cw_analogy_below_cbow },
    Criterion { id: 8, name: "segmenter capacity", run: pipelines::segmenter_capacity },
    Criterion { id: 9, name: "rcnn properties", run: pipelines::rcnn_properties },
    Criterion { id: 10, name: "bit-identical checkpoints", run: pipelines::reproducible_checkpoints },
];

fn main() -> ExitCode {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let list_only = std::env::args().any(|a| a == "--list");
    if list_only {
        for c in &CRITERIA {
            println!("criterion_{}: test", c.id);
        }
        return ExitCode::SUCCESS;
    }
    let mut failed = 0;
    let mut ran = 0;
    for c in CRITERIA.iter().filter(|c| wanted.is_empty() || wanted.contains(&c.id)) {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        let secs = start.elapsed().as_secs_f64();
        ran += 1;
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{:.1}s] {}: {detail}", c.id, secs, c.name),
            Err(reason) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{:.1}s] {}: {reason}", c.id, secs, c.name);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
