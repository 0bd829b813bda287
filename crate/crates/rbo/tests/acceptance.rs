//! Acceptance gate for the whole workspace: eight criteria, each
//! printed as one `criterion N (...): PASS` or `FAIL` line (run with
//! `--nocapture` to see them stream). Every check is an exact integer
//! comparison; observed maxima are reported, never asserted to meet
//! the ceilings exactly.

use std::sync::OnceLock;
use std::time::Instant;

use rbo::bitops::{rev_k, rev_k_reference};
use rbo::verifier::{lemma_sweep, sweep_bounds, KeyScheme, SweepConfig, SweepReport, LEMMA_ORDER};

/// Exhaustive bound sweep shared by criteria 1, 2, 5, 6 and 8.
fn main_sweep() -> &'static SweepReport {
    static MAIN: OnceLock<SweepReport> = OnceLock::new();
    MAIN.get_or_init(|| {
        let started = Instant::now();
        let report = sweep_bounds(&SweepConfig::exhaustive(2, 8)).expect("k range within the cap");
        println!(
            "exhaustive sweep k=2..8 finished in {:.1}s",
            started.elapsed().as_secs_f64()
        );
        report
    })
}

/// Exhaustive sweep of the two one-segment-table cycles, k = 0 and 1.
fn small_sweep() -> &'static SweepReport {
    static SMALL: OnceLock<SweepReport> = OnceLock::new();
    SMALL.get_or_init(|| sweep_bounds(&SweepConfig::exhaustive(0, 1)).expect("tiny sweep"))
}

/// Exhaustive statement suite, k = 0 through 6, shared by criteria 4,
/// 5 and 6.
fn statement_suite() -> &'static SweepReport {
    static SUITE: OnceLock<SweepReport> = OnceLock::new();
    SUITE.get_or_init(|| lemma_sweep(0, 6, &KeyScheme::Distinct, 8).expect("k range within cap"))
}

fn conclude(criterion: u32, label: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("criterion {criterion} ({label}): PASS");
        return;
    }
    println!("criterion {criterion} ({label}): FAIL");
    for failure in &failures {
        println!("  {failure}");
    }
    panic!("criterion {criterion} failed: {}", failures.join("; "));
}

#[test]
fn criterion_1_extra_energy_bound_exhaustive() {
    let report = main_sweep();
    let mut failures = Vec::new();
    for summary in &report.per_k {
        let n = 1u64 << summary.k;
        let expected_runs = n * (n + 1) * (n + 2) / 2;
        if summary.runs != expected_runs {
            failures.push(format!(
                "k={}: visited {} runs, expected {} (all starts x all feasible target pairs)",
                summary.k, summary.runs, expected_runs
            ));
        }
        if !summary.extra_ok {
            failures.push(format!(
                "k={}: extra energy reached {} > {}",
                summary.k, summary.max_extra, summary.bound_extra
            ));
        }
        for ce in &summary.counterexamples {
            if ce.check == "extra-energy-bound" {
                failures.push(format!(
                    "k={}: s={} targets=({},{})",
                    ce.k, ce.s, ce.r_lo, ce.r_hi
                ));
            }
        }
    }
    conclude(
        1,
        "extra energy <= 2k+3 over every run, k=2..8 exhaustive",
        failures,
    );
}

#[test]
fn criterion_2_side_energy_bounds_exhaustive() {
    let report = main_sweep();
    let mut failures = Vec::new();
    for summary in &report.per_k {
        if !summary.left_ok {
            failures.push(format!(
                "k={}: left energy reached {} > {}",
                summary.k, summary.max_left, summary.bound_left
            ));
        }
        if !summary.right_ok {
            failures.push(format!(
                "k={}: right energy reached {} > {}",
                summary.k, summary.max_right, summary.bound_right
            ));
        }
    }
    conclude(
        2,
        "left <= k+1 and right <= k+2 over every run, k=2..8",
        failures,
    );
}

#[test]
fn criterion_3_smallest_cycles_spend_at_most_two() {
    let report = small_sweep();
    let mut failures = Vec::new();
    for summary in &report.per_k {
        let n = 1u64 << summary.k;
        let expected_runs = n * (n + 1) * (n + 2) / 2;
        if summary.runs != expected_runs {
            failures.push(format!(
                "k={}: visited {} runs, expected {}",
                summary.k, summary.runs, expected_runs
            ));
        }
        if summary.max_extra > 2 {
            failures.push(format!(
                "k={}: extra energy reached {} > 2",
                summary.k, summary.max_extra
            ));
        }
    }
    conclude(3, "extra energy <= 2 for k=0 and k=1, exhaustive", failures);
}

#[test]
fn criterion_4_statement_suite_holds_and_is_exercised() {
    let report = statement_suite();
    let mut failures = Vec::new();
    for table in &report.lemma_suite {
        for row in &table.lemmas {
            if row.failed > 0 {
                failures.push(format!(
                    "k={}: {} failed on {} of {} instances",
                    table.k, row.name, row.failed, row.checked
                ));
                for ce in row.counterexamples.iter().take(1) {
                    failures.push(format!(
                        "  first at s={} targets=({},{}): {}",
                        ce.s, ce.r_lo, ce.r_hi, ce.detail
                    ));
                }
            }
        }
    }
    for name in LEMMA_ORDER {
        let exercised_somewhere =
            report
                .lemma_suite
                .iter()
                .filter(|table| table.k >= 4)
                .any(|table| {
                    table
                        .lemmas
                        .iter()
                        .any(|row| row.name == name && row.exercised() > 0)
                });
        if !exercised_somewhere {
            failures.push(format!("{name}: vacuous at every k in 4..=6"));
        }
    }
    conclude(
        4,
        "per-segment statements hold k=0..6, all non-vacuous by k>=4",
        failures,
    );
}

#[test]
fn criterion_5_closed_form_matches_state_machine() {
    let mut failures = Vec::new();
    for (which, report) in [
        ("k=2..8 sweep", main_sweep()),
        ("k=0..1 sweep", small_sweep()),
        ("statement suite", statement_suite()),
    ] {
        for summary in &report.per_k {
            if summary.crosscheck_failures > 0 {
                failures.push(format!(
                    "{which}: k={}: {} runs diverged from the closed-form windows",
                    summary.k, summary.crosscheck_failures
                ));
            }
        }
    }
    conclude(
        5,
        "prefix-extremum window recomputation agrees on every run",
        failures,
    );
}

#[test]
fn criterion_6_every_run_delivers_its_targets() {
    let mut failures = Vec::new();
    for (which, report) in [
        ("k=2..8 sweep", main_sweep()),
        ("k=0..1 sweep", small_sweep()),
        ("statement suite", statement_suite()),
    ] {
        for summary in &report.per_k {
            if summary.protocol_failures > 0 {
                failures.push(format!(
                    "{which}: k={}: {} runs broke delivery or window invariants",
                    summary.k, summary.protocol_failures
                ));
            }
        }
    }
    conclude(6, "exact delivery and final window on every run", failures);
}

#[test]
fn criterion_7_bit_reversal_involution_bijection_reference() {
    let mut failures = Vec::new();
    'outer: for k in 0..=16u32 {
        let n = 1i64 << k;
        let mut seen = vec![false; n as usize];
        for t in 0..n {
            let x = rev_k(t, k);
            if !(0..n).contains(&x) {
                failures.push(format!("k={k}: rev({t}) = {x} is out of range"));
                break 'outer;
            }
            if rev_k(x, k) != t {
                failures.push(format!("k={k}: rev(rev({t})) = {} != {t}", rev_k(x, k)));
                break 'outer;
            }
            if seen[x as usize] {
                failures.push(format!("k={k}: rev hits {x} twice"));
                break 'outer;
            }
            seen[x as usize] = true;
            if x != rev_k_reference(t, k) {
                failures.push(format!(
                    "k={k}: fast path rev({t}) = {x}, string reversal gives {}",
                    rev_k_reference(t, k)
                ));
                break 'outer;
            }
        }
    }
    conclude(
        7,
        "rev_k involution, bijection and reference parity, k<=16",
        failures,
    );
}

#[test]
fn criterion_8_margin_over_previous_bound() {
    let report = main_sweep();
    let mut failures = Vec::new();
    for summary in &report.per_k {
        println!(
            "k={}: observed max extra {} <= bound {} < previous bound {}",
            summary.k, summary.max_extra, summary.bound_extra, summary.old_bound
        );
        if summary.max_extra > summary.bound_extra {
            failures.push(format!(
                "k={}: observed {} exceeds bound {}",
                summary.k, summary.max_extra, summary.bound_extra
            ));
        }
        if summary.bound_extra >= summary.old_bound {
            failures.push(format!(
                "k={}: bound {} does not improve on previous {}",
                summary.k, summary.bound_extra, summary.old_bound
            ));
        }
    }
    conclude(
        8,
        "2k+3 beats the previous 4k+2 ceiling at every k",
        failures,
    );
}
