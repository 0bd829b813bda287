//! The per-segment statement suite.
//!
//! Each named statement ties the receiver's measured behaviour to the
//! arithmetic of its segment ladder: how often a window bound can move
//! inside a segment, which index each move lands on, and how the
//! stride-quotients `x_i` chain from one segment to the next. Statements
//! about a single side hold under the premise that this side's first
//! update happens at the very first listened slot; instances that fail
//! the premise count as vacuous and are re-exercised by restarting the
//! trace at the first update slot, which the two `restart-invariance`
//! rows justify: restarting there reproduces exactly the original set of
//! moved-to indices.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::analysis::{decompose, side_quantities, Decomposition, Side, SideQuantities};
use crate::bitops::{rev_k, BitString};
use crate::error::Error;
use crate::protocol::{BroadcastCycle, QueryInterval, ReceiverTrace};
use crate::verifier::report::{
    Counterexample, KLemmaReport, KSummary, LemmaStats, SweepMode, SweepReport,
};
use crate::verifier::{
    capture, enumerate_queries, push_capped, KAccum, KeyScheme, SweepConfig, MAX_SWEEP_K,
};

/// Canonical row order of every suite report.
pub const LEMMA_ORDER: [&str; 16] = [
    "suffix-chain",
    "left-m-formula",
    "left-sublevel-update",
    "left-starting-segment",
    "left-middle-segments",
    "left-last-segment",
    "left-restart-invariance",
    "right-m-formula",
    "right-sublevel-update",
    "right-starting-segment",
    "right-middle-segments",
    "right-last-segment",
    "right-steps-chain",
    "right-binary-carry",
    "right-saturated-run",
    "right-restart-invariance",
];

const ORIGINAL_CHECKS: [&str; 14] = [
    "suffix-chain",
    "left-m-formula",
    "left-sublevel-update",
    "left-starting-segment",
    "left-middle-segments",
    "left-last-segment",
    "right-m-formula",
    "right-sublevel-update",
    "right-starting-segment",
    "right-middle-segments",
    "right-last-segment",
    "right-steps-chain",
    "right-binary-carry",
    "right-saturated-run",
];

const LEFT_RESTART_CHECKS: [&str; 5] = [
    "left-m-formula",
    "left-sublevel-update",
    "left-starting-segment",
    "left-middle-segments",
    "left-last-segment",
];

const RIGHT_RESTART_CHECKS: [&str; 8] = [
    "right-m-formula",
    "right-sublevel-update",
    "right-starting-segment",
    "right-middle-segments",
    "right-last-segment",
    "right-steps-chain",
    "right-binary-carry",
    "right-saturated-run",
];

enum Outcome {
    Passed,
    Vacuous,
    Failed(String),
}

/// One run with its ladder, side quantities and per-sublevel update sets
/// laid out for checking.
struct Instance<'a> {
    k: u32,
    n: i64,
    s: i64,
    r_lo: i64,
    r_hi: i64,
    restarted: Option<&'static str>,
    trace: &'a ReceiverTrace<i64>,
    dec: Decomposition,
    left: SideQuantities,
    right: SideQuantities,
    // [segment][sublevel] -> indices the bound moved past, in slot order.
    left_updates: Vec<Vec<Vec<i64>>>,
    right_updates: Vec<Vec<Vec<i64>>>,
}

impl<'a> Instance<'a> {
    fn build(
        trace: &'a ReceiverTrace<i64>,
        r_lo: i64,
        r_hi: i64,
        restarted: Option<&'static str>,
    ) -> Self {
        let k = trace.k();
        let dec = decompose(trace.s(), k);
        let left = side_quantities(&dec, trace, r_lo, Side::Left).expect("trace matches");
        let right = side_quantities(&dec, trace, r_hi, Side::Right).expect("trace matches");
        let empty: Vec<Vec<Vec<i64>>> = dec
            .segments()
            .iter()
            .map(|seg| vec![Vec::new(); seg.level() as usize + 1])
            .collect();
        let mut left_updates = empty.clone();
        let mut right_updates = empty;
        for &t in trace.left_changes() {
            let (i, j) = locate(&dec, t);
            left_updates[i][j].push(rev_k(t, k));
        }
        for &t in trace.right_changes() {
            let (i, j) = locate(&dec, t);
            right_updates[i][j].push(rev_k(t, k));
        }
        Instance {
            k,
            n: trace.n(),
            s: trace.s(),
            r_lo,
            r_hi,
            restarted,
            trace,
            dec,
            left,
            right,
            left_updates,
            right_updates,
        }
    }

    /// Did this side's first update happen at the first listened slot?
    fn premise(&self, side: Side) -> bool {
        match side {
            Side::Left => self.trace.t_first_left() == Some(self.s),
            Side::Right => self.trace.t_first_right() == Some(self.s),
        }
    }

    fn quantities(&self, side: Side) -> &SideQuantities {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    fn updates(&self, side: Side) -> &[Vec<Vec<i64>>] {
        match side {
            Side::Left => &self.left_updates,
            Side::Right => &self.right_updates,
        }
    }

    /// How many times the side's bound moved during segment `i`.
    fn moves(&self, side: Side, i: usize) -> u64 {
        self.updates(side)[i].iter().map(|v| v.len() as u64).sum()
    }

    /// Level jump from segment `i` to `i + 1`.
    fn gap(&self, i: usize) -> u32 {
        self.dec.segment(i + 1).level() - self.dec.segment(i).level()
    }
}

/// Maps a slot to its (segment, sublevel) coordinates.
fn locate(dec: &Decomposition, t: i64) -> (usize, usize) {
    for seg in dec.segments() {
        let (lo, hi) = seg.y_interval();
        if (lo..=hi).contains(&t) {
            let offset = (t - lo) as u64;
            let j = if offset == 0 {
                0
            } else {
                (64 - offset.leading_zeros()) as usize
            };
            return (seg.index(), j);
        }
    }
    unreachable!("slot {t} outside the decomposed window");
}

fn evaluate(name: &'static str, inst: &Instance) -> Outcome {
    match name {
        "suffix-chain" => check_suffix_chain(inst),
        "left-m-formula" => check_m_formula(inst, Side::Left),
        "left-sublevel-update" => check_sublevel_updates(inst, Side::Left),
        "left-starting-segment" => check_starting_segment(inst, Side::Left),
        "left-middle-segments" => check_middle_segments(inst, Side::Left),
        "left-last-segment" => check_last_segment(inst, Side::Left),
        "right-m-formula" => check_m_formula(inst, Side::Right),
        "right-sublevel-update" => check_sublevel_updates(inst, Side::Right),
        "right-starting-segment" => check_starting_segment(inst, Side::Right),
        "right-middle-segments" => check_middle_segments(inst, Side::Right),
        "right-last-segment" => check_last_segment(inst, Side::Right),
        "right-steps-chain" => check_steps_chain(inst),
        "right-binary-carry" => check_binary_carry(inst),
        "right-saturated-run" => check_saturated_run(inst),
        _ => unreachable!("unknown check {name}"),
    }
}

/// Consecutive index suffixes nest: the tail of `beta_i` cut to the next
/// suffix's length never exceeds `beta_{i+1}` in value.
fn check_suffix_chain(inst: &Instance) -> Outcome {
    let segs = inst.dec.segments();
    if segs.len() < 2 {
        return Outcome::Vacuous;
    }
    for i in 0..segs.len() - 1 {
        let beta = segs[i].beta();
        let next = segs[i + 1].beta();
        let tail = beta.suffix(next.len());
        if tail.value() > next.value() {
            return Outcome::Failed(format!(
                "beta_{i} = {beta} ends in {tail}, above beta_{} = {next}",
                i + 1
            ));
        }
    }
    Outcome::Passed
}

/// The measured extremum `m` at every sublevel equals the prefix
/// extremum of out-of-target transmitted indices, sits on `p`'s far
/// side, and (when the first update came at slot `s`) never reverts to
/// its virgin value.
fn check_m_formula(inst: &Instance, side: Side) -> Outcome {
    let quantities = inst.quantities(side);
    let premise = inst.premise(side);
    let mut u = inst.s;
    let mut running = match side {
        Side::Left => -1,
        Side::Right => inst.n,
    };
    for (i, seg) in inst.dec.segments().iter().enumerate() {
        for j in 0..=seg.level() {
            let (_, y_hi) = seg.sublevel(j).expect("j <= level");
            while u <= y_hi {
                let x = rev_k(u, inst.k);
                match side {
                    Side::Left if x < inst.r_lo => running = running.max(x),
                    Side::Right if x > inst.r_hi => running = running.min(x),
                    _ => {}
                }
                u += 1;
            }
            let m = quantities.m_at(i, j);
            if m != running {
                return Outcome::Failed(format!(
                    "m[{i},{j}] = {m}, prefix extremum says {running}"
                ));
            }
            let p = quantities.p_at(i, j);
            let ordered = match side {
                Side::Left => m >= p,
                Side::Right => m <= p,
            };
            if !ordered {
                return Outcome::Failed(format!("m[{i},{j}] = {m} on the wrong side of p = {p}"));
            }
            if premise {
                let moved = match side {
                    Side::Left => m >= 0,
                    Side::Right => m < inst.n,
                };
                if !moved {
                    return Outcome::Failed(format!(
                        "m[{i},{j}] = {m} still virgin although the first slot updated"
                    ));
                }
            }
        }
    }
    Outcome::Passed
}

/// Inside one sublevel the bound moves at most once, and only onto the
/// sublevel's own extremal candidate `p`.
fn check_sublevel_updates(inst: &Instance, side: Side) -> Outcome {
    if !inst.premise(side) {
        return Outcome::Vacuous;
    }
    let quantities = inst.quantities(side);
    for (i, seg) in inst.dec.segments().iter().enumerate() {
        for j in 0..=seg.level() {
            let moved = &inst.updates(side)[i][j as usize];
            if moved.len() > 1 {
                return Outcome::Failed(format!("{} moves inside sublevel ({i},{j})", moved.len()));
            }
            if let Some(&x) = moved.first() {
                let p = quantities.p_at(i, j);
                if x != p {
                    return Outcome::Failed(format!(
                        "sublevel ({i},{j}) moved onto {x}, candidate was {p}"
                    ));
                }
                if !seg.in_x_sublevel(x, j).expect("j <= level") {
                    return Outcome::Failed(format!(
                        "sublevel ({i},{j}) moved onto {x}, outside its image"
                    ));
                }
            }
        }
    }
    Outcome::Passed
}

/// The opening segment: at most `l_0 + 1` left moves, and exactly one
/// right move.
fn check_starting_segment(inst: &Instance, side: Side) -> Outcome {
    if !inst.premise(side) {
        return Outcome::Vacuous;
    }
    let moves = inst.moves(side, 0);
    let level0 = inst.dec.segment(0).level() as u64;
    match side {
        Side::Left if moves > level0 + 1 => Outcome::Failed(format!(
            "first segment moved lb {moves} times, bound {}",
            level0 + 1
        )),
        Side::Right if moves != 1 => Outcome::Failed(format!(
            "first segment moved ub {moves} times, expected exactly 1"
        )),
        _ => Outcome::Passed,
    }
}

/// Segments strictly between the first and the top: moves per segment
/// are bounded by the level jump into it (right side: or 2, whichever
/// is larger).
fn check_middle_segments(inst: &Instance, side: Side) -> Outcome {
    if !inst.premise(side) {
        return Outcome::Vacuous;
    }
    let last = inst.dec.last();
    if last < 2 {
        return Outcome::Vacuous;
    }
    for i in 0..=last - 2 {
        let moves = inst.moves(side, i + 1);
        let gap = self_gap(inst, i);
        let bound = match side {
            Side::Left => gap,
            Side::Right => gap.max(2),
        };
        if moves > bound {
            return Outcome::Failed(format!(
                "segment {} moved {moves} times, bound {bound}",
                i + 1
            ));
        }
    }
    Outcome::Passed
}

fn self_gap(inst: &Instance, i: usize) -> u64 {
    inst.gap(i) as u64
}

/// The top segment: moves bounded by the final level jump.
fn check_last_segment(inst: &Instance, side: Side) -> Outcome {
    if !inst.premise(side) {
        return Outcome::Vacuous;
    }
    let last = inst.dec.last();
    if last == 0 {
        return Outcome::Vacuous;
    }
    let moves = inst.moves(side, last);
    let bound = self_gap(inst, last - 1);
    if moves > bound {
        Outcome::Failed(format!("top segment moved {moves} times, bound {bound}"))
    } else {
        Outcome::Passed
    }
}

/// `(bin(x) (0)^{delta-1} (1))_2`: the quotient a full ladder of moves
/// across a level jump of `delta` lands on.
fn chain_step(x: i64, delta: u32) -> i64 {
    debug_assert!(x >= 0 && delta >= 1);
    let bits = BitString::bin(x as u64);
    let bits = bits
        .concat(&BitString::zeros(delta - 1).expect("delta <= k"))
        .expect("fits 64 bits");
    let bits = bits
        .concat(&BitString::ones(1).expect("one bit"))
        .expect("fits 64 bits");
    bits.value() as i64
}

/// When a segment saw at least `delta` moves and its quotient reached
/// the ladder value, all three equalities snap tight: exactly `delta`
/// moves, the quotient exactly the ladder value, and `m = p`.
fn check_steps_chain(inst: &Instance) -> Outcome {
    if !inst.premise(Side::Right) {
        return Outcome::Vacuous;
    }
    let mut exercised = false;
    for i in 0..inst.dec.last() {
        let delta = inst.gap(i);
        let ladder = chain_step(inst.right.x(i), delta);
        let x_next = inst.right.x(i + 1);
        let moves = inst.moves(Side::Right, i + 1);
        if x_next >= ladder && moves >= delta as u64 {
            exercised = true;
            if moves != delta as u64 {
                return Outcome::Failed(format!(
                    "segment {}: {moves} moves where the ladder forces {delta}",
                    i + 1
                ));
            }
            if x_next != ladder {
                return Outcome::Failed(format!("x_{} = {x_next}, ladder value {ladder}", i + 1));
            }
            if inst.right.m(i + 1) != inst.right.p(i + 1) {
                return Outcome::Failed(format!(
                    "m_{} = {} missed p = {}",
                    i + 1,
                    inst.right.m(i + 1),
                    inst.right.p(i + 1)
                ));
            }
        }
    }
    if exercised {
        Outcome::Passed
    } else {
        Outcome::Vacuous
    }
}

/// A doubled move count across a level jump of one forces the borrow
/// pattern: positive quotient, one level down, `x' = 2(x - 1) + 1`.
fn check_binary_carry(inst: &Instance) -> Outcome {
    if !inst.premise(Side::Right) {
        return Outcome::Vacuous;
    }
    let mut exercised = false;
    for i in 0..inst.dec.last() {
        if inst.gap(i) != 1 || inst.moves(Side::Right, i + 1) != 2 {
            continue;
        }
        exercised = true;
        let x_i = inst.right.x(i);
        if inst.dec.segment(i).level() == 0 {
            return Outcome::Failed(format!(
                "doubled gap-one segment {} sits above a level-zero segment",
                i + 1
            ));
        }
        if x_i <= 0 {
            return Outcome::Failed(format!("x_{i} = {x_i}, expected positive"));
        }
        let expected = 2 * (x_i - 1) + 1;
        let x_next = inst.right.x(i + 1);
        if x_next != expected {
            return Outcome::Failed(format!("x_{} = {x_next}, expected {expected}", i + 1));
        }
        if inst.right.m(i + 1) != inst.right.p(i + 1) {
            return Outcome::Failed(format!(
                "m_{} = {} missed p = {}",
                i + 1,
                inst.right.m(i + 1),
                inst.right.p(i + 1)
            ));
        }
    }
    if exercised {
        Outcome::Passed
    } else {
        Outcome::Vacuous
    }
}

/// After a borrow, a run of saturated segments (each with at least as
/// many moves as its level jump) pays exactly its jump, never more than
/// two per segment, and the quotients follow the `gamma` fillers.
fn check_saturated_run(inst: &Instance) -> Outcome {
    if !inst.premise(Side::Right) {
        return Outcome::Vacuous;
    }
    let last = inst.dec.last();
    let mut exercised = false;
    for i in 0..last.saturating_sub(1) {
        let x_i = inst.right.x(i);
        if x_i < 1 || inst.right.x(i + 1) != 2 * (x_i - 1) + 1 {
            continue;
        }
        if inst.right.m(i + 1) != inst.right.p(i + 1) {
            continue;
        }
        let mut run = 0usize;
        while i + 2 + run <= last
            && inst.moves(Side::Right, i + 2 + run) >= self_gap(inst, i + 1 + run)
        {
            run += 1;
        }
        if run == 0 {
            continue;
        }
        exercised = true;
        let mut bits = BitString::bin(inst.right.x(i + 1) as u64);
        for c in 0..run {
            let seg_idx = i + 2 + c;
            bits = bits
                .concat(&inst.dec.gamma(i + 1 + c).expect("below the top"))
                .expect("fits 64 bits");
            let moves = inst.moves(Side::Right, seg_idx);
            let gap = self_gap(inst, i + 1 + c);
            if moves != gap {
                return Outcome::Failed(format!(
                    "saturated segment {seg_idx} moved {moves} times, jump is {gap}"
                ));
            }
            if gap > 2 {
                return Outcome::Failed(format!(
                    "saturated run crossed a level jump of {gap} at segment {seg_idx}"
                ));
            }
            let target = bits.value() as i64;
            if inst.right.x(seg_idx) != target {
                return Outcome::Failed(format!(
                    "x_{seg_idx} = {}, filler chain says {target}",
                    inst.right.x(seg_idx)
                ));
            }
            if inst.right.m(seg_idx) != inst.right.p(seg_idx) {
                return Outcome::Failed(format!(
                    "m_{seg_idx} = {} missed p = {}",
                    inst.right.m(seg_idx),
                    inst.right.p(seg_idx)
                ));
            }
        }
    }
    if exercised {
        Outcome::Passed
    } else {
        Outcome::Vacuous
    }
}

/// The indices a side's bound moved past over the whole run.
fn updated_index_set(trace: &ReceiverTrace<i64>, side: Side) -> BTreeSet<i64> {
    let slots = match side {
        Side::Left => trace.left_changes(),
        Side::Right => trace.right_changes(),
    };
    slots.iter().map(|&t| rev_k(t, trace.k())).collect()
}

#[derive(Clone, Default)]
struct Counts {
    checked: u64,
    passed: u64,
    vacuous: u64,
    failed: u64,
    counterexamples: Vec<Counterexample>,
}

struct SuiteAccum {
    k_accum: KAccum,
    lemmas: BTreeMap<&'static str, Counts>,
}

impl SuiteAccum {
    fn new(k: u32) -> Self {
        let lemmas = LEMMA_ORDER
            .iter()
            .map(|&name| (name, Counts::default()))
            .collect();
        SuiteAccum {
            k_accum: KAccum::new(k),
            lemmas,
        }
    }

    fn record(&mut self, name: &'static str, outcome: Outcome, inst: &Instance) {
        let counts = self.lemmas.get_mut(name).expect("preseeded name");
        counts.checked += 1;
        match outcome {
            Outcome::Passed => counts.passed += 1,
            Outcome::Vacuous => counts.vacuous += 1,
            Outcome::Failed(detail) => {
                counts.failed += 1;
                push_capped(
                    &mut counts.counterexamples,
                    capture(
                        inst.k,
                        inst.trace,
                        inst.r_lo,
                        inst.r_hi,
                        inst.restarted,
                        name,
                        detail,
                    ),
                );
            }
        }
    }

    fn merge(mut self, other: SuiteAccum) -> SuiteAccum {
        self.k_accum = self.k_accum.merge(other.k_accum);
        for (name, counts) in other.lemmas {
            let mine = self.lemmas.get_mut(name).expect("same key set");
            mine.checked += counts.checked;
            mine.passed += counts.passed;
            mine.vacuous += counts.vacuous;
            mine.failed += counts.failed;
            for ce in counts.counterexamples {
                push_capped(&mut mine.counterexamples, ce);
            }
        }
        self
    }

    fn into_parts(mut self, k: u32) -> (KSummary, KLemmaReport) {
        let lemmas = LEMMA_ORDER
            .iter()
            .map(|&name| {
                let counts = self.lemmas.remove(name).expect("preseeded name");
                LemmaStats {
                    name,
                    checked: counts.checked,
                    passed: counts.passed,
                    vacuous: counts.vacuous,
                    failed: counts.failed,
                    counterexamples: counts.counterexamples,
                }
            })
            .collect();
        (self.k_accum.into_summary(), KLemmaReport { k, lemmas })
    }
}

fn process_instance(
    acc: &mut SuiteAccum,
    cycle: &BroadcastCycle<i64>,
    query: &QueryInterval<i64>,
    s: i64,
    r_lo: i64,
    r_hi: i64,
) {
    let trace = acc.k_accum.checked_run(cycle, query, s, r_lo, r_hi, None);
    let inst = Instance::build(&trace, r_lo, r_hi, None);
    for name in ORIGINAL_CHECKS {
        let outcome = evaluate(name, &inst);
        acc.record(name, outcome, &inst);
    }

    let sides: [(Side, &'static str, &'static str, &[&'static str]); 2] = [
        (
            Side::Left,
            "left",
            "left-restart-invariance",
            &LEFT_RESTART_CHECKS,
        ),
        (
            Side::Right,
            "right",
            "right-restart-invariance",
            &RIGHT_RESTART_CHECKS,
        ),
    ];
    for (side, label, invariance_row, restart_checks) in sides {
        let t_first = match side {
            Side::Left => trace.t_first_left(),
            Side::Right => trace.t_first_right(),
        };
        match t_first {
            // The side never moved; there is nothing to restart into.
            None => acc.record(invariance_row, Outcome::Vacuous, &inst),
            Some(t1) => {
                let s2 = t1.rem_euclid(inst.n);
                if s2 == s {
                    // The restart is the run itself; the side checks
                    // above already ran with their premise satisfied.
                    acc.record(invariance_row, Outcome::Passed, &inst);
                } else {
                    let trace2 = acc
                        .k_accum
                        .checked_run(cycle, query, s2, r_lo, r_hi, Some(label));
                    let inst2 = Instance::build(&trace2, r_lo, r_hi, Some(label));
                    for &name in restart_checks {
                        let outcome = evaluate(name, &inst2);
                        acc.record(name, outcome, &inst2);
                    }
                    let original = updated_index_set(&trace, side);
                    let restarted = updated_index_set(&trace2, side);
                    let outcome = if original == restarted {
                        Outcome::Passed
                    } else {
                        Outcome::Failed(format!(
                            "restart at {s2} moved past {restarted:?}, original moved past {original:?}"
                        ))
                    };
                    acc.record(invariance_row, outcome, &inst);
                }
            }
        }
    }
}

pub(crate) fn suite_for_k(k: u32, scheme: &KeyScheme) -> Result<(KSummary, KLemmaReport), Error> {
    assert!(k <= MAX_SWEEP_K, "suite at k={k} is no desk check");
    let cycle = BroadcastCycle::new(scheme.keys_for(k)?)?;
    let n = cycle.n();
    let queries = enumerate_queries(scheme, cycle.keys());
    let acc = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut acc = SuiteAccum::new(k);
            for (r_lo, r_hi, query) in &queries {
                process_instance(&mut acc, &cycle, query, s, *r_lo, *r_hi);
            }
            acc
        })
        .reduce(|| SuiteAccum::new(k), SuiteAccum::merge);
    Ok(acc.into_parts(k))
}

/// Runs every statement on every instance of one exponent, with
/// restarts, and returns the per-statement table.
pub fn check_lemma_suite(k: u32, scheme: &KeyScheme) -> Result<KLemmaReport, Error> {
    suite_for_k(k, scheme).map(|(_, lemmas)| lemmas)
}

/// The statement suite over a range of exponents, exhaustive per
/// exponent, bundled with the usual bound summaries of all runs it
/// executed (restarts included).
pub fn lemma_sweep(
    k_min: u32,
    k_max: u32,
    scheme: &KeyScheme,
    exhaustive_cap: u32,
) -> Result<SweepReport, Error> {
    let cfg = SweepConfig {
        k_min,
        k_max,
        mode: SweepMode::Exhaustive,
        samples: 0,
        seed: 0,
        key_scheme: scheme.clone(),
        exhaustive_cap,
    };
    cfg.validate()?;
    let mut per_k = Vec::new();
    let mut lemma_suite = Vec::new();
    for k in k_min..=k_max {
        let (summary, lemmas) = suite_for_k(k, scheme)?;
        per_k.push(summary);
        lemma_suite.push(lemmas);
    }
    Ok(SweepReport {
        k_min,
        k_max,
        mode: SweepMode::Exhaustive,
        seed: 0,
        samples: 0,
        key_scheme: scheme.label().to_string(),
        per_k,
        lemma_suite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::run;
    use crate::verifier::query_for_targets;

    #[test]
    fn chain_step_is_shift_plus_one() {
        // (bin(x)(0)^{d-1}(1))_2 spells x * 2^d + 1.
        for x in 0..64i64 {
            for delta in 1..8u32 {
                assert_eq!(chain_step(x, delta), (x << delta) | 1);
            }
        }
    }

    #[test]
    fn suite_is_clean_at_small_exponents() {
        for k in 0..=4 {
            let table = check_lemma_suite(k, &KeyScheme::Distinct).unwrap();
            assert_eq!(table.k, k);
            assert_eq!(table.failed(), 0, "k={k}: {table:?}");
            assert_eq!(table.lemmas.len(), LEMMA_ORDER.len());
            for (row, name) in table.lemmas.iter().zip(LEMMA_ORDER) {
                assert_eq!(row.name, name);
                assert_eq!(row.checked, row.passed + row.vacuous + row.failed);
            }
        }
    }

    #[test]
    fn core_rows_are_exercised_by_k4() {
        let table = check_lemma_suite(4, &KeyScheme::Distinct).unwrap();
        for row in &table.lemmas {
            if matches!(
                row.name,
                "suffix-chain"
                    | "left-m-formula"
                    | "right-m-formula"
                    | "left-sublevel-update"
                    | "right-sublevel-update"
                    | "left-starting-segment"
                    | "right-starting-segment"
                    | "left-middle-segments"
                    | "right-middle-segments"
                    | "left-last-segment"
                    | "right-last-segment"
                    | "left-restart-invariance"
                    | "right-restart-invariance"
            ) {
                assert!(row.exercised() > 0, "{} never exercised", row.name);
            }
        }
    }

    #[test]
    fn suite_runs_feed_the_bound_summary() {
        let (summary, table) = suite_for_k(3, &KeyScheme::Distinct).unwrap();
        // 8 starts, 45 pairs, plus one restarted run per side that
        // moved later than its start.
        assert!(summary.runs > 8 * 45);
        assert!(summary.pass());
        assert_eq!(table.failed(), 0);
    }

    #[test]
    fn suite_is_thread_count_independent() {
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| suite_for_k(3, &KeyScheme::Distinct).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(5)
            .build()
            .unwrap()
            .install(|| suite_for_k(3, &KeyScheme::Distinct).unwrap());
        assert_eq!(one, many);
    }

    #[test]
    fn checker_rejects_a_tampered_trace() {
        // Freeze lb where the machine moved it: the m-formula comparison
        // must notice the records lie about the schedule.
        let (keys, query) = query_for_targets(8, 3, 6).unwrap();
        let cycle = BroadcastCycle::new(keys).unwrap();
        let trace = run(&cycle, &query, 5);
        assert!(trace.t_first_left().is_some());
        let mut tampered = trace.clone();
        for entry in tampered.lb_history.iter_mut() {
            *entry = 0;
        }
        tampered.left_changes.clear();
        let inst = Instance::build(&tampered, 3, 6, None);
        assert!(matches!(
            check_m_formula(&inst, Side::Left),
            Outcome::Failed(_)
        ));
    }

    #[test]
    fn lemma_sweep_respects_the_cap() {
        assert!(matches!(
            lemma_sweep(0, 9, &KeyScheme::Distinct, 8),
            Err(Error::ExhaustiveCapExceeded { k: 9, cap: 8 })
        ));
        let report = lemma_sweep(2, 3, &KeyScheme::Distinct, 8).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.lemma_suite.len(), 2);
        assert_eq!(report.per_k.len(), 2);
    }
}
