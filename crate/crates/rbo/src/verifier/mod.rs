//! Empirical certification of the energy bounds.
//!
//! A sweep enumerates instances `(s, r_lo, r_hi)` of one cycle exponent,
//! runs the receiver on each, and folds four families of checks into a
//! [`SweepReport`]:
//!
//! * energy ceilings: left `<= k + 1`, right `<= k + 2`, extra
//!   `<= 2k + 3` on every run;
//! * closed-form crosscheck: the bound histories recomputed from prefix
//!   extrema of the transmitted indices, with no receiver logic, must
//!   match the state machine slot for slot;
//! * protocol correctness: every target key delivered exactly once,
//!   windows monotone and safe, final window equal to the target pair,
//!   energy ledger consistent with the event log;
//! * the per-segment statement suite in [`lemmas`], when requested.
//!
//! Exhaustive mode covers all `n * (n+1)(n+2)/2` instances of a `k` and
//! is capped; random mode draws a seeded uniform sample and can go
//! higher. Parallel folding is associative and commutative, so results
//! are byte-identical regardless of thread count.

mod lemmas;
mod report;

pub use lemmas::{check_lemma_suite, lemma_sweep, LEMMA_ORDER};
pub use report::{
    Counterexample, KLemmaReport, KSummary, LemmaStats, SweepMode, SweepReport, Witness,
};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::decompose;
use crate::bitops::rev_k;
use crate::error::Error;
use crate::protocol::{
    self, BroadcastCycle, EventKind, QueryInterval, ReceiverTrace, TargetBounds,
};

/// Exhaustive sweeps refuse exponents above this unless overridden.
pub const DEFAULT_EXHAUSTIVE_CAP: u32 = 8;

/// Hard ceiling for any sweep; a cycle beyond this is no desk check.
pub const MAX_SWEEP_K: u32 = 24;

/// Which key sequence backs the generated cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyScheme {
    /// Keys `0, 2, 4, ...`: every target pair realizable, odd query
    /// endpoints cut strictly between keys.
    Distinct,
    /// Keys `0, 0, 2, 2, ...`: each value twice, exercising ties.
    Duplicates,
    /// A fixed key sequence, e.g. loaded from a file.
    Explicit(Vec<i64>),
}

impl KeyScheme {
    /// The key sequence for a cycle of `2^k` slots.
    pub fn keys_for(&self, k: u32) -> Result<Vec<i64>, Error> {
        let n = 1i64 << k;
        match self {
            KeyScheme::Distinct => Ok((0..n).map(|i| 2 * i).collect()),
            KeyScheme::Duplicates => Ok((0..n).map(|i| 2 * (i / 2)).collect()),
            KeyScheme::Explicit(keys) => {
                if keys.len() != n as usize {
                    return Err(Error::KeyCountMismatch {
                        expected: n as usize,
                        got: keys.len(),
                    });
                }
                Ok(keys.clone())
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            KeyScheme::Distinct => "distinct",
            KeyScheme::Duplicates => "duplicates",
            KeyScheme::Explicit(_) => "explicit",
        }
    }
}

/// Everything a sweep needs to know.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub k_min: u32,
    pub k_max: u32,
    pub mode: SweepMode,
    /// Instances per exponent in random mode; ignored when exhaustive.
    pub samples: u64,
    pub seed: u64,
    pub key_scheme: KeyScheme,
    /// Largest exponent exhaustive mode will accept.
    pub exhaustive_cap: u32,
}

impl SweepConfig {
    pub fn exhaustive(k_min: u32, k_max: u32) -> Self {
        SweepConfig {
            k_min,
            k_max,
            mode: SweepMode::Exhaustive,
            samples: 0,
            seed: 0,
            key_scheme: KeyScheme::Distinct,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }

    pub fn random(k_min: u32, k_max: u32, samples: u64, seed: u64) -> Self {
        SweepConfig {
            k_min,
            k_max,
            mode: SweepMode::Random,
            samples,
            seed,
            key_scheme: KeyScheme::Distinct,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), Error> {
        if self.k_min > self.k_max {
            return Err(Error::EmptyKRange {
                k_min: self.k_min,
                k_max: self.k_max,
            });
        }
        let cap = match self.mode {
            SweepMode::Exhaustive => self.exhaustive_cap.min(MAX_SWEEP_K),
            SweepMode::Random => MAX_SWEEP_K,
        };
        if self.k_max > cap {
            return Err(Error::ExhaustiveCapExceeded { k: self.k_max, cap });
        }
        Ok(())
    }
}

/// Keys `0, 2, ..., 2(n-1)` and a query hitting exactly the targets
/// `[r_lo, r_hi]`: odd endpoints `[2 r_lo - 1, 2 r_hi + 1]` for a
/// nonempty pair, the point `2 r_lo - 1` for an empty one. Feasible
/// pairs satisfy `0 <= r_lo <= r_hi + 1 <= n`.
pub fn query_for_targets(
    n: i64,
    r_lo: i64,
    r_hi: i64,
) -> Result<(Vec<i64>, QueryInterval<i64>), Error> {
    if n < 1 || r_lo < 0 || r_hi < r_lo - 1 || r_hi > n - 1 {
        return Err(Error::InfeasibleTargets { r_lo, r_hi, n });
    }
    let keys = (0..n).map(|i| 2 * i).collect();
    Ok((keys, odd_endpoint_query(r_lo, r_hi)))
}

fn odd_endpoint_query(r_lo: i64, r_hi: i64) -> QueryInterval<i64> {
    let query = if r_lo <= r_hi {
        QueryInterval::new(2 * r_lo - 1, 2 * r_hi + 1)
    } else {
        QueryInterval::new(2 * r_lo - 1, 2 * r_lo - 1)
    };
    query.expect("odd endpoints are ordered")
}

/// A query with integer endpoints whose target bounds over `keys` come
/// out exactly `(r_lo, r_hi)`, if the key layout allows one. Nonempty
/// pairs need both boundaries to fall between distinct values; an empty
/// pair needs an integer strictly between its neighbour keys.
pub fn query_realizing(keys: &[i64], r_lo: i64, r_hi: i64) -> Option<QueryInterval<i64>> {
    let n = keys.len() as i64;
    if r_lo < 0 || r_hi < r_lo - 1 || r_hi > n - 1 {
        return None;
    }
    if r_lo <= r_hi {
        let lo_cuts = r_lo == 0 || keys[r_lo as usize - 1] < keys[r_lo as usize];
        let hi_cuts = r_hi == n - 1 || keys[r_hi as usize] < keys[r_hi as usize + 1];
        if !(lo_cuts && hi_cuts) {
            return None;
        }
        Some(QueryInterval::new(keys[r_lo as usize], keys[r_hi as usize]).expect("keys ascend"))
    } else {
        let below = (r_hi >= 0).then(|| keys[r_hi as usize]);
        let above = (r_lo < n).then(|| keys[r_lo as usize]);
        let point = match (below, above) {
            (None, Some(a)) => a - 1,
            (Some(b), None) => b + 1,
            (Some(b), Some(a)) if a - b >= 2 => b + 1,
            (Some(_), Some(_)) => return None,
            (None, None) => unreachable!("n >= 1"),
        };
        Some(QueryInterval::new(point, point).expect("a point interval"))
    }
}

fn make_query(
    scheme: &KeyScheme,
    keys: &[i64],
    r_lo: i64,
    r_hi: i64,
) -> Option<QueryInterval<i64>> {
    match scheme {
        KeyScheme::Distinct => Some(odd_endpoint_query(r_lo, r_hi)),
        _ => query_realizing(keys, r_lo, r_hi),
    }
}

/// All target pairs the sweep will visit for one cycle, each with a
/// query realizing it.
pub(crate) fn enumerate_queries(
    scheme: &KeyScheme,
    keys: &[i64],
) -> Vec<(i64, i64, QueryInterval<i64>)> {
    let n = keys.len() as i64;
    let mut out = Vec::new();
    for r_lo in 0..=n {
        for r_hi in (r_lo - 1)..n {
            if let Some(query) = make_query(scheme, keys, r_lo, r_hi) {
                out.push((r_lo, r_hi, query));
            }
        }
    }
    out
}

/// Recomputes both bound histories from scratch and compares them with
/// the recorded trace.
///
/// The recomputation never consults the receiver: it walks the schedule
/// and keeps prefix extrema of `rev_k(u) + 1` over slots with index
/// below `r_lo` (for `lb`) and of `rev_k(u) - 1` over slots with index
/// above `r_hi` (for `ub`). Agreement means the state machine's window
/// equals its closed form at every slot.
pub fn closed_form_crosscheck<K: Ord>(
    trace: &ReceiverTrace<K>,
    cycle: &BroadcastCycle<K>,
    query: &QueryInterval<K>,
) -> bool {
    closed_form_report(trace, cycle, query).is_ok()
}

fn closed_form_report<K: Ord>(
    trace: &ReceiverTrace<K>,
    cycle: &BroadcastCycle<K>,
    query: &QueryInterval<K>,
) -> Result<(), String> {
    let TargetBounds { r_lo, r_hi } = cycle.target_bounds(query);
    let n = cycle.n();
    let s = trace.s();
    let k = trace.k();
    let (mut lb, mut ub) = (0i64, n - 1);
    if trace.lb_history()[0] != lb || trace.ub_history()[0] != ub {
        return Err(format!(
            "initial window ({}, {}) is not (0, {})",
            trace.lb_history()[0],
            trace.ub_history()[0],
            n - 1
        ));
    }
    for (d, t) in (s..s + n).enumerate() {
        let index = rev_k(t, k);
        if index < r_lo {
            lb = lb.max(index + 1);
        }
        if index > r_hi {
            ub = ub.min(index - 1);
        }
        if trace.lb_history()[d + 1] != lb || trace.ub_history()[d + 1] != ub {
            return Err(format!(
                "after slot {t}: machine window ({}, {}), closed form ({lb}, {ub})",
                trace.lb_history()[d + 1],
                trace.ub_history()[d + 1],
            ));
        }
    }
    Ok(())
}

/// Checks the behavioural contract of one run; the message pins down the
/// first violated clause.
fn protocol_report<K: Ord>(trace: &ReceiverTrace<K>, tb: TargetBounds) -> Result<(), String> {
    let n = trace.n();
    let TargetBounds { r_lo, r_hi } = tb;
    for d in 0..n as usize {
        let (lb0, lb1) = (trace.lb_history()[d], trace.lb_history()[d + 1]);
        let (ub0, ub1) = (trace.ub_history()[d], trace.ub_history()[d + 1]);
        if lb1 < lb0 || ub1 > ub0 {
            return Err(format!(
                "window widened going into slot {}",
                trace.s() + d as i64 + 1
            ));
        }
        if lb1 > r_lo || ub1 < r_hi {
            return Err(format!(
                "window ({lb1}, {ub1}) overshot the targets ({r_lo}, {r_hi}) at step {d}"
            ));
        }
    }
    if trace.final_lb() != r_lo || trace.final_ub() != r_hi {
        return Err(format!(
            "final window ({}, {}) differs from targets ({r_lo}, {r_hi})",
            trace.final_lb(),
            trace.final_ub()
        ));
    }
    let mut delivered: Vec<i64> = trace
        .events()
        .iter()
        .filter(|e| e.kind == EventKind::InRange)
        .map(|e| e.index)
        .collect();
    delivered.sort_unstable();
    let expected: Vec<i64> = (r_lo..=r_hi).collect();
    if delivered != expected {
        return Err(format!(
            "delivered indices {delivered:?} instead of [{r_lo}, {r_hi}]"
        ));
    }
    for event in trace.events() {
        if event.kind == EventKind::EmptyDetected {
            continue;
        }
        let (lb, ub) = (trace.lb_before(event.slot), trace.ub_before(event.slot));
        if event.index < lb || event.index > ub {
            return Err(format!(
                "slot {} was received with index {} outside the window ({lb}, {ub})",
                event.slot, event.index
            ));
        }
    }
    let tally = trace.energies();
    let lb_updates = trace
        .events()
        .iter()
        .filter(|e| e.kind == EventKind::LbUpdate)
        .count() as u64;
    let ub_updates = trace
        .events()
        .iter()
        .filter(|e| e.kind == EventKind::UbUpdate)
        .count() as u64;
    if lb_updates != tally.left || ub_updates != tally.right {
        return Err(format!(
            "event counts ({lb_updates}, {ub_updates}) disagree with the change ledger ({}, {})",
            tally.left, tally.right
        ));
    }
    if tally.total != delivered.len() as u64 + tally.extra {
        return Err(format!(
            "total energy {} is not receptions {} plus extra {}",
            tally.total,
            delivered.len(),
            tally.extra
        ));
    }
    match (tb.is_empty(), trace.empty_detected()) {
        (true, None) => return Err("empty result never detected".into()),
        (false, Some(t)) => return Err(format!("spurious empty detection at slot {t}")),
        _ => {}
    }
    Ok(())
}

/// Mergeable fold state of one exponent's sweep.
#[derive(Debug, Clone)]
pub(crate) struct KAccum {
    k: u32,
    runs: u64,
    best_left: Option<Witness>,
    best_right: Option<Witness>,
    best_extra: Option<Witness>,
    crosscheck_failures: u64,
    protocol_failures: u64,
    counterexamples: Vec<Counterexample>,
}

/// Kept per fold state and per lemma row; enough to diagnose, small
/// enough to merge freely.
const MAX_COUNTEREXAMPLES: usize = 3;

impl KAccum {
    pub(crate) fn new(k: u32) -> Self {
        KAccum {
            k,
            runs: 0,
            best_left: None,
            best_right: None,
            best_extra: None,
            crosscheck_failures: 0,
            protocol_failures: 0,
            counterexamples: Vec::new(),
        }
    }

    /// Runs one instance, folds its tally and checks, and hands the
    /// trace back for further analysis.
    pub(crate) fn checked_run(
        &mut self,
        cycle: &BroadcastCycle<i64>,
        query: &QueryInterval<i64>,
        s: i64,
        r_lo: i64,
        r_hi: i64,
        restarted: Option<&'static str>,
    ) -> ReceiverTrace<i64> {
        let trace = protocol::run(cycle, query, s);
        let tally = trace.energies();
        let k = self.k;
        self.runs += 1;

        let witness = Witness {
            s: trace.s(),
            r_lo,
            r_hi,
            left: tally.left,
            right: tally.right,
            extra: tally.extra,
        };
        replace_if_better(&mut self.best_left, witness, |w| w.left);
        replace_if_better(&mut self.best_right, witness, |w| w.right);
        replace_if_better(&mut self.best_extra, witness, |w| w.extra);

        let fail = |list: &mut Vec<Counterexample>, check: &str, detail: String| {
            push_capped(
                list,
                capture(k, &trace, r_lo, r_hi, restarted, check, detail),
            );
        };
        if tally.left > k as u64 + 1 {
            fail(
                &mut self.counterexamples,
                "left-energy-bound",
                format!("left energy {} exceeds {}", tally.left, k + 1),
            );
        }
        if tally.right > k as u64 + 2 {
            fail(
                &mut self.counterexamples,
                "right-energy-bound",
                format!("right energy {} exceeds {}", tally.right, k + 2),
            );
        }
        if tally.extra > 2 * k as u64 + 3 {
            fail(
                &mut self.counterexamples,
                "extra-energy-bound",
                format!("extra energy {} exceeds {}", tally.extra, 2 * k + 3),
            );
        }
        if let Err(detail) = closed_form_report(&trace, cycle, query) {
            self.crosscheck_failures += 1;
            fail(&mut self.counterexamples, "closed-form-crosscheck", detail);
        }
        if let Err(detail) = protocol_report(&trace, TargetBounds { r_lo, r_hi }) {
            self.protocol_failures += 1;
            fail(&mut self.counterexamples, "protocol-correctness", detail);
        }
        trace
    }

    pub(crate) fn merge(mut self, other: KAccum) -> KAccum {
        debug_assert_eq!(self.k, other.k);
        self.runs += other.runs;
        merge_best(&mut self.best_left, other.best_left, |w| w.left);
        merge_best(&mut self.best_right, other.best_right, |w| w.right);
        merge_best(&mut self.best_extra, other.best_extra, |w| w.extra);
        self.crosscheck_failures += other.crosscheck_failures;
        self.protocol_failures += other.protocol_failures;
        self.counterexamples.extend(other.counterexamples);
        cap_sorted(&mut self.counterexamples);
        self
    }

    pub(crate) fn into_summary(self) -> KSummary {
        let k = self.k as u64;
        let max_left = self.best_left.map_or(0, |w| w.left);
        let max_right = self.best_right.map_or(0, |w| w.right);
        let max_extra = self.best_extra.map_or(0, |w| w.extra);
        KSummary {
            k: self.k,
            runs: self.runs,
            max_left,
            max_right,
            max_extra,
            bound_left: k + 1,
            bound_right: k + 2,
            bound_extra: 2 * k + 3,
            old_bound: 4 * k + 2,
            left_ok: max_left <= k + 1,
            right_ok: max_right <= k + 2,
            extra_ok: max_extra <= 2 * k + 3,
            crosscheck_failures: self.crosscheck_failures,
            protocol_failures: self.protocol_failures,
            witness_left: self.best_left,
            witness_right: self.best_right,
            witness_extra: self.best_extra,
            counterexamples: self.counterexamples,
        }
    }
}

fn replace_if_better(best: &mut Option<Witness>, candidate: Witness, metric: fn(&Witness) -> u64) {
    let take = match best {
        None => true,
        Some(w) => {
            let (c, b) = (metric(&candidate), metric(w));
            c > b
                || (c == b && (candidate.s, candidate.r_lo, candidate.r_hi) < (w.s, w.r_lo, w.r_hi))
        }
    };
    if take {
        *best = Some(candidate);
    }
}

fn merge_best(best: &mut Option<Witness>, other: Option<Witness>, metric: fn(&Witness) -> u64) {
    if let Some(candidate) = other {
        replace_if_better(best, candidate, metric);
    }
}

pub(crate) fn push_capped(list: &mut Vec<Counterexample>, item: Counterexample) {
    list.push(item);
    cap_sorted(list);
}

fn cap_sorted(list: &mut Vec<Counterexample>) {
    if list.len() > MAX_COUNTEREXAMPLES {
        list.sort_by_key(Counterexample::sort_key);
        list.truncate(MAX_COUNTEREXAMPLES);
    }
}

/// Renders the instance into a replayable record.
pub(crate) fn capture(
    k: u32,
    trace: &ReceiverTrace<i64>,
    r_lo: i64,
    r_hi: i64,
    restarted: Option<&'static str>,
    check: &str,
    detail: String,
) -> Counterexample {
    let dec = decompose(trace.s(), k);
    let segments = dec
        .segments()
        .iter()
        .map(|seg| {
            let (lo, hi) = seg.y_interval();
            let alpha = seg
                .alpha()
                .map_or_else(|| "-".to_string(), |a| a.to_string());
            format!(
                "i={} t={} level={} y=[{lo},{hi}] beta={} alpha={alpha}",
                seg.index(),
                seg.t_start(),
                seg.level(),
                seg.beta()
            )
        })
        .collect();
    Counterexample {
        k,
        s: trace.s(),
        r_lo,
        r_hi,
        restarted,
        check: check.to_string(),
        detail,
        events: trace.record_lines(),
        segments,
    }
}

/// Sweeps the energy bounds over the configured exponents.
pub fn sweep_bounds(cfg: &SweepConfig) -> Result<SweepReport, Error> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut per_k = Vec::new();
    for k in cfg.k_min..=cfg.k_max {
        per_k.push(sweep_one_k(cfg, k, &mut rng)?.into_summary());
    }
    Ok(SweepReport {
        k_min: cfg.k_min,
        k_max: cfg.k_max,
        mode: cfg.mode,
        seed: cfg.seed,
        samples: if cfg.mode == SweepMode::Random {
            cfg.samples
        } else {
            0
        },
        key_scheme: cfg.key_scheme.label().to_string(),
        per_k,
        lemma_suite: Vec::new(),
    })
}

/// The witness view of [`sweep_bounds`]: same checks, same report; the
/// interesting part is `witness_extra` per `k`, the lexicographically
/// smallest instance reaching the observed maximum.
pub fn worst_case(cfg: &SweepConfig) -> Result<SweepReport, Error> {
    sweep_bounds(cfg)
}

fn sweep_one_k(cfg: &SweepConfig, k: u32, rng: &mut ChaCha8Rng) -> Result<KAccum, Error> {
    let cycle = BroadcastCycle::new(cfg.key_scheme.keys_for(k)?)?;
    let n = cycle.n();
    let accum = match cfg.mode {
        SweepMode::Exhaustive => {
            let queries = enumerate_queries(&cfg.key_scheme, cycle.keys());
            (0..n)
                .into_par_iter()
                .map(|s| {
                    let mut acc = KAccum::new(k);
                    for (r_lo, r_hi, query) in &queries {
                        acc.checked_run(&cycle, query, s, *r_lo, *r_hi, None);
                    }
                    acc
                })
                .reduce(|| KAccum::new(k), KAccum::merge)
        }
        SweepMode::Random => {
            let samples = draw_samples(cfg, &cycle, rng);
            samples
                .par_chunks(512)
                .map(|chunk| {
                    let mut acc = KAccum::new(k);
                    for (s, r_lo, r_hi, query) in chunk {
                        acc.checked_run(&cycle, query, *s, *r_lo, *r_hi, None);
                    }
                    acc
                })
                .reduce(|| KAccum::new(k), KAccum::merge)
        }
    };
    Ok(accum)
}

/// Uniform instances: start slot uniform over the cycle, target pair
/// uniform over the feasible triangle by rejection.
fn draw_samples(
    cfg: &SweepConfig,
    cycle: &BroadcastCycle<i64>,
    rng: &mut ChaCha8Rng,
) -> Vec<(i64, i64, i64, QueryInterval<i64>)> {
    let n = cycle.n();
    let mut out = Vec::with_capacity(cfg.samples as usize);
    while out.len() < cfg.samples as usize {
        let s = rng.random_range(0..n);
        let r_lo = rng.random_range(0..=n);
        let r_hi = rng.random_range(-1..n);
        if r_hi < r_lo - 1 {
            continue;
        }
        if let Some(query) = make_query(&cfg.key_scheme, cycle.keys(), r_lo, r_hi) {
            out.push((s, r_lo, r_hi, query));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::run;

    #[test]
    fn target_queries_round_trip() {
        for n in [1i64, 2, 4, 8, 16] {
            let (keys, _) = query_for_targets(n, 0, n - 1).unwrap();
            let cycle = BroadcastCycle::new(keys).unwrap();
            for r_lo in 0..=n {
                for r_hi in (r_lo - 1)..n {
                    let (_, query) = query_for_targets(n, r_lo, r_hi).unwrap();
                    let tb = cycle.target_bounds(&query);
                    assert_eq!((tb.r_lo, tb.r_hi), (r_lo, r_hi), "n={n}");
                }
            }
            assert!(query_for_targets(n, -1, 0).is_err());
            assert!(query_for_targets(n, 0, n).is_err());
            assert!(query_for_targets(n, 2, 0).is_err());
        }
    }

    #[test]
    fn realized_queries_round_trip_with_duplicates() {
        let keys = KeyScheme::Duplicates.keys_for(3).unwrap();
        assert_eq!(keys, vec![0, 0, 2, 2, 4, 4, 6, 6]);
        let cycle = BroadcastCycle::new(keys.clone()).unwrap();
        let mut realizable = 0;
        for r_lo in 0..=8 {
            for r_hi in (r_lo - 1)..8 {
                if let Some(query) = query_realizing(&keys, r_lo, r_hi) {
                    realizable += 1;
                    let tb = cycle.target_bounds(&query);
                    assert_eq!((tb.r_lo, tb.r_hi), (r_lo, r_hi));
                }
            }
        }
        // Pairs starting or ending inside a tied pair can't be cut, and
        // no integer fits strictly between equal neighbours.
        assert!(realizable > 8);
        assert!(realizable < 9 * 10 / 2);
        // A boundary splitting the tie 0,0 is not realizable.
        assert!(query_realizing(&keys, 1, 3).is_none());
        // Empty pair between the two 2s has no integer gap.
        assert!(query_realizing(&keys, 3, 2).is_none());
        // Empty pair between 0 and 2 does.
        assert_eq!(
            query_realizing(&keys, 2, 1),
            Some(QueryInterval::new(1, 1).unwrap())
        );
    }

    #[test]
    fn crosscheck_accepts_real_traces_and_rejects_corrupt_ones() {
        let (keys, query) = query_for_targets(8, 2, 5).unwrap();
        let cycle = BroadcastCycle::new(keys).unwrap();
        for s in 0..8 {
            let trace = run(&cycle, &query, s);
            assert!(closed_form_crosscheck(&trace, &cycle, &query));
            let mut corrupt = trace.clone();
            corrupt.lb_history[3] += 1;
            assert!(!closed_form_crosscheck(&corrupt, &cycle, &query));
            let mut corrupt = trace.clone();
            corrupt.ub_history[5] -= 1;
            assert!(!closed_form_crosscheck(&corrupt, &cycle, &query));
        }
    }

    #[test]
    fn protocol_report_flags_tampering() {
        let (keys, query) = query_for_targets(8, 2, 5).unwrap();
        let cycle = BroadcastCycle::new(keys).unwrap();
        let tb = TargetBounds { r_lo: 2, r_hi: 5 };
        let trace = run(&cycle, &query, 3);
        assert!(protocol_report(&trace, tb).is_ok());

        let mut missing = trace.clone();
        let pos = missing
            .events
            .iter()
            .position(|e| e.kind == EventKind::InRange)
            .unwrap();
        missing.events.remove(pos);
        assert!(protocol_report(&missing, tb)
            .unwrap_err()
            .contains("delivered"));

        let mut widened = trace.clone();
        let end = widened.lb_history.len() - 1;
        widened.lb_history[end] -= 1;
        assert!(protocol_report(&widened, tb).is_err());

        assert!(protocol_report(&trace, TargetBounds { r_lo: 2, r_hi: 4 }).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SweepConfig::exhaustive(2, 8).validate().is_ok());
        assert!(matches!(
            SweepConfig::exhaustive(2, 9).validate(),
            Err(Error::ExhaustiveCapExceeded { k: 9, cap: 8 })
        ));
        let mut raised = SweepConfig::exhaustive(2, 9);
        raised.exhaustive_cap = 10;
        assert!(raised.validate().is_ok());
        assert!(matches!(
            SweepConfig::exhaustive(3, 2).validate(),
            Err(Error::EmptyKRange { .. })
        ));
        assert!(SweepConfig::random(2, 12, 100, 7).validate().is_ok());
        assert!(matches!(
            SweepConfig::random(2, 60, 100, 7).validate(),
            Err(Error::ExhaustiveCapExceeded { .. })
        ));
    }

    #[test]
    fn small_exhaustive_sweep_shape() {
        let report = sweep_bounds(&SweepConfig::exhaustive(0, 3)).unwrap();
        assert_eq!(report.per_k.len(), 4);
        for (i, summary) in report.per_k.iter().enumerate() {
            let k = i as u32;
            let n = 1u64 << k;
            assert_eq!(summary.k, k);
            // n starts times (n+1)(n+2)/2 feasible pairs.
            assert_eq!(summary.runs, n * (n + 1) * (n + 2) / 2);
            assert!(summary.pass(), "k={k}: {summary:?}");
        }
        assert!(report.all_pass());
        let csv = report.to_csv();
        assert!(csv.starts_with("k,runs,max_left,"));
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.lines().nth(1).unwrap().ends_with(",pass"));
    }

    #[test]
    fn sweeps_are_thread_count_independent() {
        let cfg = SweepConfig::exhaustive(0, 4);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sweep_bounds(&cfg).unwrap());
        let several = rayon::ThreadPoolBuilder::new()
            .num_threads(7)
            .build()
            .unwrap()
            .install(|| sweep_bounds(&cfg).unwrap());
        assert_eq!(single, several);
        assert_eq!(single.to_json(), several.to_json());
    }

    #[test]
    fn random_sweeps_reproduce_by_seed() {
        let cfg = SweepConfig::random(3, 5, 500, 42);
        let a = sweep_bounds(&cfg).unwrap();
        let b = sweep_bounds(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.all_pass());
        assert_eq!(a.per_k[0].runs, 500);
        let other_seed = sweep_bounds(&SweepConfig::random(3, 5, 500, 43)).unwrap();
        assert!(other_seed.all_pass());
        // Different seeds almost surely visit different witnesses.
        assert_ne!(
            (a.seed, a.per_k[2].witness_extra),
            (other_seed.seed, other_seed.per_k[2].witness_extra)
        );
    }

    #[test]
    fn duplicate_keys_sweep_passes() {
        let mut cfg = SweepConfig::exhaustive(0, 4);
        cfg.key_scheme = KeyScheme::Duplicates;
        let report = sweep_bounds(&cfg).unwrap();
        assert!(report.all_pass());
        // Fewer realizable pairs than with distinct keys.
        let distinct = sweep_bounds(&SweepConfig::exhaustive(0, 4)).unwrap();
        assert!(report.per_k[4].runs < distinct.per_k[4].runs);
    }

    #[test]
    fn explicit_keys_must_match_the_cycle_size() {
        let mut cfg = SweepConfig::exhaustive(2, 2);
        cfg.key_scheme = KeyScheme::Explicit(vec![1, 2, 3]);
        assert!(matches!(
            sweep_bounds(&cfg),
            Err(Error::KeyCountMismatch {
                expected: 4,
                got: 3
            })
        ));
        cfg.key_scheme = KeyScheme::Explicit(vec![3, 9, 9, 40]);
        let report = sweep_bounds(&cfg).unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn witnesses_prefer_smallest_coordinates() {
        let report = sweep_bounds(&SweepConfig::exhaustive(2, 2)).unwrap();
        let w = report.per_k[0].witness_extra.unwrap();
        // Any instance with the same extra energy must not precede the
        // reported witness.
        let cycle = BroadcastCycle::new(KeyScheme::Distinct.keys_for(2).unwrap()).unwrap();
        for s in 0..4 {
            for r_lo in 0..=4i64 {
                for r_hi in (r_lo - 1)..4 {
                    let (_, query) = query_for_targets(4, r_lo, r_hi).unwrap();
                    let tally = run(&cycle, &query, s).energies();
                    assert!(tally.extra <= w.extra);
                    if tally.extra == w.extra {
                        assert!((s, r_lo, r_hi) >= (w.s, w.r_lo, w.r_hi));
                    }
                }
            }
        }
    }
}
