//! Report types emitted by the sweeps, serializable to JSON and CSV.

use serde::Serialize;

/// How a sweep picked its instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Every start slot crossed with every feasible target pair.
    Exhaustive,
    /// A seeded uniform sample of instances.
    Random,
}

/// The instance achieving a per-`k` maximum, with its full tally.
/// Ties break toward the lexicographically smallest `(s, r_lo, r_hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub s: i64,
    pub r_lo: i64,
    pub r_hi: i64,
    pub left: u64,
    pub right: u64,
    pub extra: u64,
}

/// A failed check with enough context to replay it by hand: the instance
/// coordinates, the reception log and the segment ladder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub k: u32,
    pub s: i64,
    pub r_lo: i64,
    pub r_hi: i64,
    /// Set when the failing trace was a restarted run, to `"left"` or
    /// `"right"` after the side whose first update chose the new start.
    pub restarted: Option<&'static str>,
    pub check: String,
    pub detail: String,
    pub events: Vec<String>,
    pub segments: Vec<String>,
}

impl Counterexample {
    pub(crate) fn sort_key(&self) -> (u32, i64, i64, i64, u8, String) {
        let restart_rank = match self.restarted {
            None => 0,
            Some("left") => 1,
            _ => 2,
        };
        (
            self.k,
            self.s,
            self.r_lo,
            self.r_hi,
            restart_rank,
            self.check.clone(),
        )
    }
}

/// Bound results for one cycle exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KSummary {
    pub k: u32,
    pub runs: u64,
    pub max_left: u64,
    pub max_right: u64,
    pub max_extra: u64,
    /// `k + 1`, the proven ceiling for left energy.
    pub bound_left: u64,
    /// `k + 2`, the proven ceiling for right energy.
    pub bound_right: u64,
    /// `2k + 3`, the proven ceiling for extra energy.
    pub bound_extra: u64,
    /// `4k + 2`, the previously known ceiling the sharper one replaces.
    pub old_bound: u64,
    pub left_ok: bool,
    pub right_ok: bool,
    pub extra_ok: bool,
    /// Runs where the recomputed bound histories disagreed with the
    /// state machine.
    pub crosscheck_failures: u64,
    /// Runs that broke a protocol invariant (delivery, monotonicity,
    /// convergence or energy bookkeeping).
    pub protocol_failures: u64,
    pub witness_left: Option<Witness>,
    pub witness_right: Option<Witness>,
    pub witness_extra: Option<Witness>,
    pub counterexamples: Vec<Counterexample>,
}

impl KSummary {
    /// True when every check at this `k` came back clean.
    pub fn pass(&self) -> bool {
        self.left_ok
            && self.right_ok
            && self.extra_ok
            && self.crosscheck_failures == 0
            && self.protocol_failures == 0
    }
}

/// Tally for one named statement across all instances of a suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaStats {
    pub name: &'static str,
    /// Instances the statement was evaluated on.
    pub checked: u64,
    /// Instances where the premise held and the conclusion followed.
    pub passed: u64,
    /// Instances where the premise did not apply.
    pub vacuous: u64,
    /// Instances where the premise held and the conclusion failed.
    pub failed: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl LemmaStats {
    /// Instances that actually exercised the statement.
    pub fn exercised(&self) -> u64 {
        self.checked - self.vacuous
    }
}

/// Per-exponent lemma table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KLemmaReport {
    pub k: u32,
    pub lemmas: Vec<LemmaStats>,
}

impl KLemmaReport {
    pub fn failed(&self) -> u64 {
        self.lemmas.iter().map(|l| l.failed).sum()
    }
}

/// Complete result of a sweep: per-`k` bound summaries plus, when the
/// per-segment suite ran, per-`k` lemma tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub k_min: u32,
    pub k_max: u32,
    pub mode: SweepMode,
    pub seed: u64,
    pub samples: u64,
    pub key_scheme: String,
    pub per_k: Vec<KSummary>,
    pub lemma_suite: Vec<KLemmaReport>,
}

impl SweepReport {
    pub fn all_pass(&self) -> bool {
        self.per_k.iter().all(KSummary::pass) && self.lemma_suite.iter().all(|t| t.failed() == 0)
    }

    /// Verdict for one exponent: its bounds, run checks and lemma rows.
    pub fn k_pass(&self, k: u32) -> bool {
        self.per_k.iter().filter(|s| s.k == k).all(KSummary::pass)
            && self
                .lemma_suite
                .iter()
                .filter(|t| t.k == k)
                .all(|t| t.failed() == 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per exponent under a fixed header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "k,runs,max_left,max_right,max_extra,bound_left,bound_right,bound_extra,verdict\n",
        );
        for s in &self.per_k {
            let verdict = if self.k_pass(s.k) { "pass" } else { "fail" };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                s.k,
                s.runs,
                s.max_left,
                s.max_right,
                s.max_extra,
                s.bound_left,
                s.bound_right,
                s.bound_extra,
                verdict
            ));
        }
        out
    }
}
