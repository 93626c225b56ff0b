//! Runs the full verification suite and prints one line per criterion.
//!
//! Set `ACCEPTANCE_ONLY=3,7` to run a subset.

use std::time::{Duration, Instant};

use contcrystal::selftest::{criterion_title, run_criterion, Mode, Status, LAST_CRITERION};

const SEED: u64 = 20240601;
const BUDGET: Duration = Duration::from_secs(20 * 60);

fn selected() -> Vec<u32> {
    match std::env::var("ACCEPTANCE_ONLY") {
        Ok(s) => s.split(',').filter_map(|t| t.trim().parse().ok()).collect(),
        Err(_) => (1..=LAST_CRITERION).collect(),
    }
}

#[test]
fn acceptance() {
    let mut unexpected = vec![];
    let mut total = Duration::ZERO;
    for id in selected() {
        let start = Instant::now();
        let rep =
            run_criterion(id, Mode::Full, SEED).unwrap_or_else(|e| panic!("criterion {id}: {e}"));
        let took = start.elapsed();
        if id != LAST_CRITERION {
            total += took;
        }
        let mut status = rep.status();
        let mut detail: Vec<String> = rep
            .failures()
            .iter()
            .map(|c| format!("{} = {:.3e} vs {:.3e}", c.name, c.value, c.threshold))
            .collect();
        if id == LAST_CRITERION && selected().len() == LAST_CRITERION as usize && total > BUDGET {
            status = Status::Fail;
            detail.push(format!("full suite took {:.0} s", total.as_secs_f64()));
        }
        let word = match status {
            Status::Pass => "PASS".to_string(),
            Status::KnownFail => format!("FAIL (known: {})", detail.join("; ")),
            Status::Fail => format!("FAIL ({})", detail.join("; ")),
        };
        println!(
            "criterion {id:2} {:<55} {word} [{:.1} s]",
            criterion_title(id),
            took.as_secs_f64()
        );
        if status == Status::Fail {
            unexpected.push(id);
        }
    }
    println!(
        "suite runtime (criteria 1-13): {:.1} s",
        total.as_secs_f64()
    );
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}
