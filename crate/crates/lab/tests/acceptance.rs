//! Acceptance suite: one PASS/FAIL line per criterion. Set
//! `FRINGE_ACCEPTANCE=3,5` to run a subset.

use fringe_lab::acceptance::{run_criterion, CRITERIA};

const SEED: u64 = 42;

fn main() {
    let only: Option<Vec<usize>> = std::env::var("FRINGE_ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for id in 1..=CRITERIA.len() {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let c = run_criterion(id, SEED);
        println!("{}", c.summary());
        if !c.passed() {
            failed += 1;
            for r in c.failures().take(8) {
                println!(
                    "    {} {} n={:?}: {} (target {}, tolerance {})",
                    r.model,
                    r.statistic,
                    r.n,
                    r.estimate,
                    r.target.as_deref().unwrap_or("-"),
                    r.tolerance.as_deref().unwrap_or("-")
                );
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
