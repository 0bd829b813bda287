//! Text and JSON renderings of traces, ladders and sweep reports.

use serde::Serialize;

use rbo::analysis::Decomposition;
use rbo::protocol::{
    BroadcastCycle, EnergyTally, EventKind, QueryInterval, ReceiverTrace, TargetBounds,
};
use rbo::verifier::{Counterexample, SweepReport};

#[derive(Serialize)]
struct SlotRow {
    t: i64,
    index: i64,
    key: i64,
    radio: bool,
    action: Option<String>,
    lb_after: i64,
    ub_after: i64,
}

#[derive(Serialize)]
struct TraceReport<'a> {
    k: u32,
    n: i64,
    s: i64,
    query: &'a QueryInterval<i64>,
    targets: TargetBounds,
    slots: Vec<SlotRow>,
    energy: EnergyTally,
    final_lb: i64,
    final_ub: i64,
    empty_detected: Option<i64>,
}

fn slot_rows(trace: &ReceiverTrace<i64>, cycle: &BroadcastCycle<i64>) -> Vec<SlotRow> {
    let s = trace.s();
    (s..s + trace.n())
        .map(|t| {
            let (index, key) = cycle.message_at(t);
            let event = trace
                .events()
                .iter()
                .find(|e| e.slot == t && e.kind != EventKind::EmptyDetected);
            let action = event.map(|e| match e.kind {
                EventKind::InRange => "in-range".to_string(),
                EventKind::LbUpdate => format!("lb->{}", e.index + 1),
                EventKind::UbUpdate => format!("ub->{}", e.index - 1),
                EventKind::EmptyDetected => unreachable!("filtered"),
            });
            SlotRow {
                t,
                index,
                key: *key,
                radio: event.is_some(),
                action,
                lb_after: trace.lb_before(t + 1),
                ub_after: trace.ub_before(t + 1),
            }
        })
        .collect()
}

pub fn trace_text(
    trace: &ReceiverTrace<i64>,
    cycle: &BroadcastCycle<i64>,
    query: &QueryInterval<i64>,
    targets: TargetBounds,
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "cycle: k={} n={} start={}\n",
        trace.k(),
        trace.n(),
        trace.s()
    ));
    out.push_str(&format!(
        "query: [{}, {}] -> targets r_lo={} r_hi={}\n",
        query.lo(),
        query.hi(),
        targets.r_lo,
        targets.r_hi
    ));
    out.push_str(&format!(
        "{:>6} {:>6} {:>5} {:>8} {:>10} {:>5} {:>5}\n",
        "t", "index", "radio", "key", "action", "lb", "ub"
    ));
    for row in slot_rows(trace, cycle) {
        out.push_str(&format!(
            "{:>6} {:>6} {:>5} {:>8} {:>10} {:>5} {:>5}\n",
            row.t,
            row.index,
            if row.radio { "on" } else { "off" },
            row.key,
            row.action.as_deref().unwrap_or("-"),
            row.lb_after,
            row.ub_after
        ));
    }
    let tally = trace.energies();
    out.push_str(&format!(
        "energy: left={} right={} extra={} total={}\n",
        tally.left, tally.right, tally.extra, tally.total
    ));
    out.push_str(&format!(
        "final window: lb={} ub={}\n",
        trace.final_lb(),
        trace.final_ub()
    ));
    if let Some(t) = trace.empty_detected() {
        out.push_str(&format!("empty result detected at slot {t}\n"));
    }
    out
}

pub fn trace_json(
    trace: &ReceiverTrace<i64>,
    cycle: &BroadcastCycle<i64>,
    query: &QueryInterval<i64>,
    targets: TargetBounds,
) -> String {
    let report = TraceReport {
        k: trace.k(),
        n: trace.n(),
        s: trace.s(),
        query,
        targets,
        slots: slot_rows(trace, cycle),
        energy: trace.energies(),
        final_lb: trace.final_lb(),
        final_ub: trace.final_ub(),
        empty_detected: trace.empty_detected(),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("trace serializes");
    text.push('\n');
    text
}

/// One `slot,index,key,kind` line per reception.
pub fn trace_csv(trace: &ReceiverTrace<i64>) -> String {
    let mut out = String::new();
    for line in trace.record_lines() {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn image_summary(min: i64, max: i64, stride: i64, count: i64) -> String {
    if count == 1 {
        return format!("{{{min}}}");
    }
    if count <= 8 {
        let all: Vec<String> = (0..count).map(|i| (min + i * stride).to_string()).collect();
        return format!("{{{}}}", all.join(","));
    }
    format!("{{{min},{},..,{max}}}", min + stride)
}

#[derive(Serialize)]
struct SegmentRow {
    index: usize,
    t_start: i64,
    level: u32,
    y_lo: i64,
    y_hi: i64,
    beta: String,
    alpha: Option<String>,
    min_x: i64,
    max_x: i64,
    x_stride: i64,
}

#[derive(Serialize)]
struct LadderReport {
    k: u32,
    n: i64,
    s: i64,
    last: usize,
    segments: Vec<SegmentRow>,
    gammas: Vec<String>,
}

fn ladder_report(dec: &Decomposition) -> LadderReport {
    let segments = dec
        .segments()
        .iter()
        .map(|seg| {
            let (y_lo, y_hi) = seg.y_interval();
            SegmentRow {
                index: seg.index(),
                t_start: seg.t_start(),
                level: seg.level(),
                y_lo,
                y_hi,
                beta: seg.beta().to_string(),
                alpha: seg.alpha().map(|a| a.to_string()),
                min_x: seg.min_x(),
                max_x: seg.max_x(),
                x_stride: 1i64 << (dec.k() - seg.level()),
            }
        })
        .collect();
    let gammas = (0..dec.last())
        .map(|j| dec.gamma(j).expect("below last").to_string())
        .collect();
    LadderReport {
        k: dec.k(),
        n: dec.n(),
        s: dec.s(),
        last: dec.last(),
        segments,
        gammas,
    }
}

pub fn ladder_text(dec: &Decomposition) -> String {
    let report = ladder_report(dec);
    let mut out = format!(
        "ladder: k={} n={} s={} last={}\n",
        report.k, report.n, report.s, report.last
    );
    out.push_str(&format!(
        "{:>3} {:>8} {:>5} {:>16} {:>10} {:>8}  {}\n",
        "i", "t_start", "level", "y", "beta", "alpha", "x_image"
    ));
    for row in &report.segments {
        out.push_str(&format!(
            "{:>3} {:>8} {:>5} {:>16} {:>10} {:>8}  {}\n",
            row.index,
            row.t_start,
            row.level,
            format!("[{},{}]", row.y_lo, row.y_hi),
            row.beta,
            row.alpha.as_deref().unwrap_or("-"),
            image_summary(row.min_x, row.max_x, row.x_stride, 1i64 << row.level)
        ));
    }
    if !report.gammas.is_empty() {
        out.push_str(&format!("gammas: {}\n", report.gammas.join(" ")));
    }
    out
}

pub fn ladder_json(dec: &Decomposition) -> String {
    let mut text = serde_json::to_string_pretty(&ladder_report(dec)).expect("ladder serializes");
    text.push('\n');
    text
}

pub fn ladder_csv(dec: &Decomposition) -> String {
    let mut out = String::from("i,t_start,level,y_lo,y_hi,beta,alpha\n");
    for row in ladder_report(dec).segments {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.index,
            row.t_start,
            row.level,
            row.y_lo,
            row.y_hi,
            row.beta,
            row.alpha.as_deref().unwrap_or("")
        ));
    }
    out
}

fn push_counterexamples(out: &mut String, items: &[Counterexample]) {
    for ce in items {
        out.push_str(&format!(
            "counterexample [{}]: k={} s={} targets=({},{}){}\n  {}\n",
            ce.check,
            ce.k,
            ce.s,
            ce.r_lo,
            ce.r_hi,
            ce.restarted
                .map(|side| format!(" restarted={side}"))
                .unwrap_or_default(),
            ce.detail
        ));
        for line in &ce.events {
            out.push_str(&format!("    event {line}\n"));
        }
        for line in &ce.segments {
            out.push_str(&format!("    segment {line}\n"));
        }
    }
}

pub fn sweep_text(report: &SweepReport) -> String {
    let mut out = format!(
        "mode={} scheme={} k={}..{}",
        match report.mode {
            rbo::verifier::SweepMode::Exhaustive => "exhaustive",
            rbo::verifier::SweepMode::Random => "random",
        },
        report.key_scheme,
        report.k_min,
        report.k_max
    );
    if report.samples > 0 {
        out.push_str(&format!(" samples={} seed={}", report.samples, report.seed));
    }
    out.push('\n');
    out.push_str(&format!(
        "{:>3} {:>9} {:>9}/{:<5} {:>9}/{:<5} {:>9}/{:<5} {:>4} {:>7}\n",
        "k",
        "runs",
        "max_left",
        "bound",
        "max_right",
        "bound",
        "max_extra",
        "bound",
        "old",
        "verdict"
    ));
    for s in &report.per_k {
        out.push_str(&format!(
            "{:>3} {:>9} {:>9}/{:<5} {:>9}/{:<5} {:>9}/{:<5} {:>4} {:>7}\n",
            s.k,
            s.runs,
            s.max_left,
            s.bound_left,
            s.max_right,
            s.bound_right,
            s.max_extra,
            s.bound_extra,
            s.old_bound,
            if report.k_pass(s.k) { "pass" } else { "fail" }
        ));
    }
    for s in &report.per_k {
        push_counterexamples(&mut out, &s.counterexamples);
    }
    out.push_str(if report.all_pass() {
        "all checks passed\n"
    } else {
        "counterexamples found\n"
    });
    out
}

pub fn worst_text(report: &SweepReport) -> String {
    let mut out = String::from("worst-case extra energy per exponent\n");
    for s in &report.per_k {
        match s.witness_extra {
            Some(w) => out.push_str(&format!(
                "k={}: extra={} at s={} targets=({},{}) left={} right={} (bound {}, previously {})\n",
                s.k, w.extra, w.s, w.r_lo, w.r_hi, w.left, w.right, s.bound_extra, s.old_bound
            )),
            None => out.push_str(&format!("k={}: no runs\n", s.k)),
        }
    }
    out.push_str(if report.all_pass() {
        "all checks passed\n"
    } else {
        "counterexamples found\n"
    });
    out
}

pub fn lemma_text(report: &SweepReport) -> String {
    let mut out = format!(
        "statement suite, scheme={} k={}..{}\n",
        report.key_scheme, report.k_min, report.k_max
    );
    for table in &report.lemma_suite {
        out.push_str(&format!("k={}\n", table.k));
        out.push_str(&format!(
            "  {:<26} {:>9} {:>9} {:>9} {:>7}\n",
            "statement", "checked", "exercised", "vacuous", "failed"
        ));
        for row in &table.lemmas {
            out.push_str(&format!(
                "  {:<26} {:>9} {:>9} {:>9} {:>7}\n",
                row.name,
                row.checked,
                row.exercised(),
                row.vacuous,
                row.failed
            ));
        }
        for row in &table.lemmas {
            push_counterexamples(&mut out, &row.counterexamples);
        }
    }
    for s in &report.per_k {
        push_counterexamples(&mut out, &s.counterexamples);
    }
    out.push_str(if report.all_pass() {
        "all statements hold on every exercised instance\n"
    } else {
        "counterexamples found\n"
    });
    out
}

pub fn lemma_csv(report: &SweepReport) -> String {
    let mut out = String::from("k,statement,checked,passed,vacuous,failed,verdict\n");
    for table in &report.lemma_suite {
        for row in &table.lemmas {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                table.k,
                row.name,
                row.checked,
                row.passed,
                row.vacuous,
                row.failed,
                if row.failed == 0 { "pass" } else { "fail" }
            ));
        }
    }
    out
}
