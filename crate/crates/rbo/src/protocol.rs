//! The broadcast cycle and the energy-limited receiver.
//!
//! A broadcaster owns `n = 2^k` keys in ascending order and transmits
//! forever, sending the key with index `rev_k(t)` in slot `t`. A receiver
//! wakes at some slot `s` wanting every key in a query interval. It keeps
//! an index window `[lb, ub]`, listens only to slots whose index falls
//! inside the window, and narrows the window on every key it hears that
//! lies outside the query. After one full cycle the window has converged
//! onto exactly the target indices.
//!
//! Energy is counted in window movements: each slot that moves `lb` costs
//! one unit of left energy, each slot that moves `ub` one unit of right
//! energy. Their sum is the extra energy, the overhead on top of the
//! receptions that actually deliver query results.

use serde::Serialize;
use std::fmt;

use crate::bitops::rev_k;
use crate::error::Error;

/// One full broadcast schedule: `n = 2^k` ascending keys, transmitted in
/// bit-reversed index order, repeating every `n` slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastCycle<K> {
    k: u32,
    keys: Vec<K>,
}

impl<K: Ord> BroadcastCycle<K> {
    /// Wraps an ascending key sequence whose length is a power of two.
    /// Equal neighbours are allowed.
    pub fn new(keys: Vec<K>) -> Result<Self, Error> {
        if keys.is_empty() || !keys.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(keys.len()));
        }
        if let Some(i) = (1..keys.len()).find(|&i| keys[i - 1] > keys[i]) {
            return Err(Error::UnsortedKeys(i));
        }
        Ok(BroadcastCycle {
            k: keys.len().trailing_zeros(),
            keys,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Slots per cycle.
    pub fn n(&self) -> i64 {
        1i64 << self.k
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn key(&self, index: i64) -> &K {
        &self.keys[index as usize]
    }

    /// What goes over the air in slot `t`: the index `rev_k(t)` and its
    /// key. `t` may be any integer; the schedule repeats mod `n`.
    pub fn message_at(&self, t: i64) -> (i64, &K) {
        let index = rev_k(t, self.k);
        (index, &self.keys[index as usize])
    }

    /// The index interval `[r_lo, r_hi]` holding exactly the keys inside
    /// `query`. An empty result comes out as `r_hi = r_lo - 1`.
    pub fn target_bounds(&self, query: &QueryInterval<K>) -> TargetBounds {
        let r_lo = self.keys.partition_point(|key| *key < query.lo) as i64;
        let r_hi = self.keys.partition_point(|key| *key <= query.hi) as i64 - 1;
        TargetBounds { r_lo, r_hi }
    }
}

/// A closed key interval `[lo, hi]` the receiver wants delivered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QueryInterval<K> {
    lo: K,
    hi: K,
}

impl<K: Ord> QueryInterval<K> {
    pub fn new(lo: K, hi: K) -> Result<Self, Error> {
        if lo > hi {
            return Err(Error::InvalidQuery);
        }
        Ok(QueryInterval { lo, hi })
    }

    pub fn lo(&self) -> &K {
        &self.lo
    }

    pub fn hi(&self) -> &K {
        &self.hi
    }

    pub fn contains(&self, key: &K) -> bool {
        self.lo <= *key && *key <= self.hi
    }
}

/// The boundary indices a run converges to: `r_lo` is the first index
/// with key not below the query, `r_hi` the last with key not above it.
/// `r_lo <= r_hi + 1` always; equality plus one means no key matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TargetBounds {
    pub r_lo: i64,
    pub r_hi: i64,
}

impl TargetBounds {
    pub fn is_empty(&self) -> bool {
        self.r_hi < self.r_lo
    }

    /// Number of matching keys.
    pub fn len(&self) -> i64 {
        (self.r_hi - self.r_lo + 1).max(0)
    }
}

/// What a single listened-to slot meant for the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// The key lies inside the query and is reported.
    InRange,
    /// The key is below the query; `lb` moved up past its index.
    LbUpdate,
    /// The key is above the query; `ub` moved down past its index.
    UbUpdate,
    /// The window just emptied: no key matches, result reported.
    EmptyDetected,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::InRange => "in-range",
            EventKind::LbUpdate => "lb-update",
            EventKind::UbUpdate => "ub-update",
            EventKind::EmptyDetected => "empty-detected",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One reception: the slot, what it carried and what the receiver did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReceptionEvent<K> {
    pub slot: i64,
    pub index: i64,
    pub key: K,
    pub kind: EventKind,
}

impl<K: fmt::Display> ReceptionEvent<K> {
    /// `slot,index,key,kind` on one line.
    pub fn record_line(&self) -> String {
        format!("{},{},{},{}", self.slot, self.index, self.key, self.kind)
    }
}

/// The receiver's index window plus its stopped flag.
///
/// `lb` only ever grows and `ub` only ever shrinks; every target index
/// stays inside `[lb, ub]` for the whole run. Once the window empties the
/// receiver has proven that no key matches and permanently stops
/// listening.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReceiverState {
    lb: i64,
    ub: i64,
    done: bool,
}

impl ReceiverState {
    /// The fresh window `[0, n - 1]` covering a whole cycle.
    pub fn new(n: i64) -> Self {
        assert!(n >= 1, "cycle of {n} slots");
        ReceiverState {
            lb: 0,
            ub: n - 1,
            done: false,
        }
    }

    pub fn lb(&self) -> i64 {
        self.lb
    }

    pub fn ub(&self) -> i64 {
        self.ub
    }

    /// True once the window has emptied and the radio is off for good.
    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Advances over slot `t`. `Ok(None)` means the transmitted index was
    /// outside the window and the radio stayed off. A returned event is
    /// the reception itself; when it empties the window, [`is_done`]
    /// flips and later calls refuse to run.
    ///
    /// [`is_done`]: ReceiverState::is_done
    pub fn step<K: Ord + Clone>(
        &mut self,
        t: i64,
        cycle: &BroadcastCycle<K>,
        query: &QueryInterval<K>,
    ) -> Result<Option<ReceptionEvent<K>>, Error> {
        if self.done {
            return Err(Error::ReceiverDone);
        }
        let (index, key) = cycle.message_at(t);
        if index < self.lb || index > self.ub {
            return Ok(None);
        }
        let kind = if *key < query.lo {
            self.lb = index + 1;
            EventKind::LbUpdate
        } else if *key > query.hi {
            self.ub = index - 1;
            EventKind::UbUpdate
        } else {
            EventKind::InRange
        };
        if self.lb > self.ub {
            self.done = true;
        }
        Ok(Some(ReceptionEvent {
            slot: t,
            index,
            key: key.clone(),
            kind,
        }))
    }
}

/// Energy totals of one run. `extra` is always `left + right`, and
/// `total` counts every slot the radio was on, receptions included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnergyTally {
    pub left: u64,
    pub right: u64,
    pub extra: u64,
    pub total: u64,
}

/// Everything observable from one receiver run over a full cycle.
///
/// The bound histories record `lb` and `ub` *before* each slot: entry `d`
/// is the state going into slot `s + d`, so entry `n` is the final state.
/// `events` lists receptions in slot order; when the window empties, the
/// triggering update is followed by an `EmptyDetected` marker for the
/// same slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiverTrace<K> {
    pub(crate) k: u32,
    pub(crate) s: i64,
    pub(crate) lb_history: Vec<i64>,
    pub(crate) ub_history: Vec<i64>,
    pub(crate) events: Vec<ReceptionEvent<K>>,
    pub(crate) left_changes: Vec<i64>,
    pub(crate) right_changes: Vec<i64>,
}

impl<K> ReceiverTrace<K> {
    pub fn k(&self) -> u32 {
        self.k
    }

    /// First listened slot, already reduced into `[0, n - 1]`.
    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn n(&self) -> i64 {
        1i64 << self.k
    }

    pub fn events(&self) -> &[ReceptionEvent<K>] {
        &self.events
    }

    pub fn lb_history(&self) -> &[i64] {
        &self.lb_history
    }

    pub fn ub_history(&self) -> &[i64] {
        &self.ub_history
    }

    /// Slots where `lb` moved, ascending.
    pub fn left_changes(&self) -> &[i64] {
        &self.left_changes
    }

    /// Slots where `ub` moved, ascending.
    pub fn right_changes(&self) -> &[i64] {
        &self.right_changes
    }

    /// The slot of the first `lb` movement, if any.
    pub fn t_first_left(&self) -> Option<i64> {
        self.left_changes.first().copied()
    }

    /// The slot of the first `ub` movement, if any.
    pub fn t_first_right(&self) -> Option<i64> {
        self.right_changes.first().copied()
    }

    /// `lb` going into slot `t`, for any `t >= s`; past the recorded
    /// cycle the final value is returned (the window never moves again).
    pub fn lb_before(&self, t: i64) -> i64 {
        assert!(t >= self.s, "slot {t} precedes the run start {}", self.s);
        let d = (t - self.s).min(self.n()) as usize;
        self.lb_history[d]
    }

    /// `ub` going into slot `t`; same conventions as [`lb_before`].
    ///
    /// [`lb_before`]: ReceiverTrace::lb_before
    pub fn ub_before(&self, t: i64) -> i64 {
        assert!(t >= self.s, "slot {t} precedes the run start {}", self.s);
        let d = (t - self.s).min(self.n()) as usize;
        self.ub_history[d]
    }

    pub fn final_lb(&self) -> i64 {
        *self.lb_history.last().expect("history is never empty")
    }

    pub fn final_ub(&self) -> i64 {
        *self.ub_history.last().expect("history is never empty")
    }

    /// The slot where the empty result was detected, if it was.
    pub fn empty_detected(&self) -> Option<i64> {
        self.events
            .iter()
            .find(|e| e.kind == EventKind::EmptyDetected)
            .map(|e| e.slot)
    }

    /// Window-movement counts. `total` excludes the empty-detection
    /// marker, which shares a slot with the update that caused it.
    pub fn energies(&self) -> EnergyTally {
        let left = self.left_changes.len() as u64;
        let right = self.right_changes.len() as u64;
        let total = self
            .events
            .iter()
            .filter(|e| e.kind != EventKind::EmptyDetected)
            .count() as u64;
        EnergyTally {
            left,
            right,
            extra: left + right,
            total,
        }
    }
}

impl<K: fmt::Display> ReceiverTrace<K> {
    /// One `slot,index,key,kind` line per event, in slot order.
    pub fn record_lines(&self) -> Vec<String> {
        self.events
            .iter()
            .map(ReceptionEvent::record_line)
            .collect()
    }
}

/// Runs a receiver from slot `s` (reduced mod `n`) through one full
/// cycle. Slots after an empty detection keep the radio off but still
/// extend the recorded histories to their full `n + 1` entries.
pub fn run<K: Ord + Clone>(
    cycle: &BroadcastCycle<K>,
    query: &QueryInterval<K>,
    s: i64,
) -> ReceiverTrace<K> {
    let n = cycle.n();
    let s = s.rem_euclid(n);
    let mut state = ReceiverState::new(n);
    let mut trace = ReceiverTrace {
        k: cycle.k(),
        s,
        lb_history: Vec::with_capacity(n as usize + 1),
        ub_history: Vec::with_capacity(n as usize + 1),
        events: Vec::new(),
        left_changes: Vec::new(),
        right_changes: Vec::new(),
    };
    trace.lb_history.push(state.lb());
    trace.ub_history.push(state.ub());
    for t in s..s + n {
        if !state.is_done() {
            let before = state;
            let event = state.step(t, cycle, query).expect("receiver still live");
            if state.lb() != before.lb() {
                trace.left_changes.push(t);
            }
            if state.ub() != before.ub() {
                trace.right_changes.push(t);
            }
            if let Some(event) = event {
                let emptied = state.is_done();
                let marker = ReceptionEvent {
                    kind: EventKind::EmptyDetected,
                    ..event.clone()
                };
                trace.events.push(event);
                if emptied {
                    trace.events.push(marker);
                }
            }
        }
        trace.lb_history.push(state.lb());
        trace.ub_history.push(state.ub());
    }
    trace
}
