//! Decomposition of a receiver's slot window into aligned segments.
//!
//! Starting from slot `s`, the window `[s, s + n - 1]` splits into
//! maximal intervals `Y_i = [t_i, t_i + 2^{l_i} - 1]` where `l_i` is the
//! alignment of `t_i` (capped at `k`). The levels strictly increase until
//! the first segment aligned to the whole cycle, called `last`; its
//! interval covers `n` slots, so the ladder always ends.
//!
//! The payoff is on the index side. All indices transmitted during `Y_i`
//! share one suffix `beta_i` of length `k - l_i`, so the image
//! `X_i = rev_k(Y_i)` is an arithmetic progression with stride
//! `2^{k - l_i}`. Refining `Y_i` into sublevels `Y_{i,0} = {t_i}`,
//! `Y_{i,j} = [t_i + 2^{j-1}, t_i + 2^j - 1]` pins each transmitted index
//! down to one congruence class per sublevel. How often the receiver's
//! window bounds can move inside a segment reduces to counting which
//! classes contain values near the target boundary, and that is what
//! [`SideQuantities`] computes.

use crate::bitops::{rev_k, trailing_zero_run, BitString};
use crate::error::Error;
use crate::protocol::ReceiverTrace;

/// One aligned slot interval `Y_i` of the ladder, together with the bit
/// structure of its transmitted indices.
///
/// `beta` is the common low-bit suffix: every index sent during the
/// segment reads `(bin(x) beta)_2` for some `x < 2^level`, and the
/// segment's first slot carries `((0)^level beta)_2`, its minimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    k: u32,
    index: usize,
    t_start: i64,
    level: u32,
    beta: BitString,
    alpha: Option<BitString>,
}

impl Segment {
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Position `i` in the ladder.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn t_start(&self) -> i64 {
        self.t_start
    }

    /// Alignment exponent `l_i`; the segment spans `2^level` slots.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// The shared index suffix, `k - level` bits.
    pub fn beta(&self) -> BitString {
        self.beta
    }

    /// For segments at least two below the top: `beta` with its leading
    /// `(1)^gap (0)` stripped, where `gap` is the level jump to the next
    /// segment. The next segment's suffix is then `(1) alpha`.
    pub fn alpha(&self) -> Option<BitString> {
        self.alpha
    }

    /// Number of slots in the segment, `2^{l_i}`.
    pub fn slot_count(&self) -> i64 {
        1i64 << self.level
    }

    /// `[t_i, t_i + 2^{l_i} - 1]`, both ends inclusive.
    pub fn y_interval(&self) -> (i64, i64) {
        (self.t_start, self.t_start + self.slot_count() - 1)
    }

    /// Sublevel `j`: the single slot `t_i` for `j = 0`, otherwise
    /// `[t_i + 2^{j-1}, t_i + 2^j - 1]`.
    pub fn sublevel(&self, j: u32) -> Result<(i64, i64), Error> {
        if j > self.level {
            return Err(Error::SublevelOutOfRange {
                sublevel: j,
                level: self.level,
            });
        }
        if j == 0 {
            Ok((self.t_start, self.t_start))
        } else {
            Ok((
                self.t_start + (1i64 << (j - 1)),
                self.t_start + (1i64 << j) - 1,
            ))
        }
    }

    /// Smallest transmitted index of the segment.
    pub fn min_x(&self) -> i64 {
        self.beta.value() as i64
    }

    /// Largest transmitted index, `((1)^level beta)_2`.
    pub fn max_x(&self) -> i64 {
        let ones = BitString::ones(self.level).expect("level <= k <= 62");
        ones.concat(&self.beta).expect("k + 1 bits at most").value() as i64
    }

    /// All indices transmitted during the segment, ascending.
    pub fn x_image(&self) -> Vec<i64> {
        let (lo, hi) = self.y_interval();
        let mut out: Vec<i64> = (lo..=hi).map(|t| rev_k(t, self.k)).collect();
        out.sort_unstable();
        out
    }

    /// Indices transmitted during sublevel `j`, ascending.
    pub fn sublevel_x_image(&self, j: u32) -> Result<Vec<i64>, Error> {
        let (lo, hi) = self.sublevel(j)?;
        let mut out: Vec<i64> = (lo..=hi).map(|t| rev_k(t, self.k)).collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Membership in the segment's congruence class: all integers, not
    /// just cycle indices, whose low `k - level` bits spell `beta`.
    pub fn in_extension(&self, x: i64) -> bool {
        x.rem_euclid(1i64 << (self.k - self.level)) == self.beta.value() as i64
    }

    /// Membership in the sublevel-`j` congruence class, one modulus step
    /// coarser per sublevel: `x mod 2^{k-j} = (beta)_2`.
    pub fn in_sublevel_extension(&self, x: i64, j: u32) -> Result<bool, Error> {
        if j > self.level {
            return Err(Error::SublevelOutOfRange {
                sublevel: j,
                level: self.level,
            });
        }
        Ok(x.rem_euclid(1i64 << (self.k - j)) == self.beta.value() as i64)
    }

    /// Exact membership in the sublevel-`j` slice of the image: inside
    /// the cycle, in the sublevel's congruence class, and for `j >= 1`
    /// carrying the 1 digit that separates the slice from coarser ones.
    pub fn in_x_sublevel(&self, x: i64, j: u32) -> Result<bool, Error> {
        if j > self.level {
            return Err(Error::SublevelOutOfRange {
                sublevel: j,
                level: self.level,
            });
        }
        if x < 0 || x >= (1i64 << self.k) {
            return Ok(false);
        }
        if !self.in_sublevel_extension(x, j)? {
            return Ok(false);
        }
        Ok(j == 0 || (x >> (self.k - j)) & 1 == 1)
    }
}

/// The whole ladder for one start slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    k: u32,
    s: i64,
    segments: Vec<Segment>,
}

/// Splits the slot axis from `s` onward into maximal aligned segments,
/// stopping at the first one aligned to the full cycle. Requires
/// `0 <= s < 2^k` and `k <= 62`.
pub fn decompose(s: i64, k: u32) -> Decomposition {
    assert!(k <= 62, "decomposition supports k <= 62, got {k}");
    let n = 1i64 << k;
    assert!(0 <= s && s < n, "start slot {s} outside [0, {n})");
    let mut segments = Vec::new();
    let mut t = s;
    loop {
        let level = trailing_zero_run(t, k);
        let beta = BitString::bin_fixed(rev_k(t, k) as u64, k - level).expect("k - level <= 62");
        segments.push(Segment {
            k,
            index: segments.len(),
            t_start: t,
            level,
            beta,
            alpha: None,
        });
        if level == k {
            break;
        }
        t += 1i64 << level;
    }
    let last = segments.len() - 1;
    for i in 0..last.saturating_sub(1) {
        let gap = segments[i + 1].level - segments[i].level;
        let beta = segments[i].beta;
        // Below the top two segments the suffix factors as (1)^gap (0) alpha.
        debug_assert_eq!(beta.prefix(gap).value(), (1u64 << gap) - 1);
        debug_assert_eq!(beta.bit(gap), 0);
        segments[i].alpha = Some(beta.suffix(beta.len() - gap - 1));
    }
    Decomposition { k, s, segments }
}

impl Decomposition {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn n(&self) -> i64 {
        1i64 << self.k
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, i: usize) -> &Segment {
        &self.segments[i]
    }

    /// Index of the final, cycle-aligned segment.
    pub fn last(&self) -> usize {
        self.segments.len() - 1
    }

    /// The filler string `(0)(1)^{gap-1}` for the level jump between
    /// segments `j` and `j + 1`; defined for `j < last`.
    pub fn gamma(&self, j: usize) -> Result<BitString, Error> {
        if j >= self.last() {
            return Err(Error::SegmentOutOfRange {
                index: j,
                last: self.last(),
            });
        }
        let gap = self.segments[j + 1].level - self.segments[j].level;
        Ok(BitString::bin_fixed((1u64 << (gap - 1)) - 1, gap).expect("gap <= k"))
    }
}

/// Which window bound a [`SideQuantities`] tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The lower bound `lb`, pushed up by keys below the query.
    Left,
    /// The upper bound `ub`, pulled down by keys above the query.
    Right,
}

/// Per-sublevel slice of a [`SideQuantities`] ladder.
///
/// Index `j` of each vector belongs to sublevel `j`; the segment-wide
/// values sit at `j = level`. `x` is the segment-stride quotient of the
/// segment-wide `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentQuantities {
    pub p_by_sublevel: Vec<i64>,
    pub m_by_sublevel: Vec<i64>,
    pub x: i64,
}

/// The `p` / `m` / `x` ladder of one side of the window.
///
/// `p_{i,j}` is the best value the bound could reach by the end of
/// sublevel `j` of segment `i` if the schedule cooperated perfectly: the
/// extremal member of the sublevel's congruence class on the outside of
/// the target boundary. It is computed purely arithmetically. `m_{i,j}`
/// is how far the bound actually got, read back from a recorded trace.
/// Comparing the two is the core of the per-segment checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideQuantities {
    side: Side,
    r_bound: i64,
    t_first: Option<i64>,
    per_segment: Vec<SegmentQuantities>,
}

impl SideQuantities {
    pub fn side(&self) -> Side {
        self.side
    }

    /// The target boundary the ladder is measured against: `r_lo` for
    /// the left side, `r_hi` for the right.
    pub fn r_bound(&self) -> i64 {
        self.r_bound
    }

    /// First slot where this side's bound moved in the measured trace.
    pub fn t_first(&self) -> Option<i64> {
        self.t_first
    }

    pub fn per_segment(&self) -> &[SegmentQuantities] {
        &self.per_segment
    }

    /// Segment-wide `p_i`, the sublevel-`level` entry.
    pub fn p(&self, i: usize) -> i64 {
        *self.per_segment[i]
            .p_by_sublevel
            .last()
            .expect("level + 1 entries")
    }

    /// Segment-wide `m_i`.
    pub fn m(&self, i: usize) -> i64 {
        *self.per_segment[i]
            .m_by_sublevel
            .last()
            .expect("level + 1 entries")
    }

    pub fn x(&self, i: usize) -> i64 {
        self.per_segment[i].x
    }

    pub fn p_at(&self, i: usize, j: u32) -> i64 {
        self.per_segment[i].p_by_sublevel[j as usize]
    }

    pub fn m_at(&self, i: usize, j: u32) -> i64 {
        self.per_segment[i].m_by_sublevel[j as usize]
    }
}

/// The largest `x < bound` with `x = residue (mod modulus)`.
pub fn largest_congruent_below(bound: i64, modulus: i64, residue: i64) -> i64 {
    debug_assert!(modulus > 0);
    residue + modulus * (bound - 1 - residue).div_euclid(modulus)
}

/// The smallest `x > bound` with `x = residue (mod modulus)`.
pub fn smallest_congruent_above(bound: i64, modulus: i64, residue: i64) -> i64 {
    debug_assert!(modulus > 0);
    residue + modulus * ((bound - residue).div_euclid(modulus) + 1)
}

/// Builds one side's ladder from a decomposition and a trace of the same
/// `(k, s)`. `r_bound` is the matching target boundary of the trace's
/// query (`r_lo` on the left, `r_hi` on the right).
pub fn side_quantities<K>(
    dec: &Decomposition,
    trace: &ReceiverTrace<K>,
    r_bound: i64,
    side: Side,
) -> Result<SideQuantities, Error> {
    if trace.k() != dec.k() || trace.s() != dec.s() {
        return Err(Error::TraceMismatch {
            trace_k: trace.k(),
            trace_s: trace.s(),
            dec_k: dec.k(),
            dec_s: dec.s(),
        });
    }
    let k = dec.k();
    let mut per_segment = Vec::with_capacity(dec.segments().len());
    for seg in dec.segments() {
        let residue = seg.beta().value() as i64;
        let mut p_by_sublevel = Vec::with_capacity(seg.level() as usize + 1);
        let mut m_by_sublevel = Vec::with_capacity(seg.level() as usize + 1);
        for j in 0..=seg.level() {
            let modulus = 1i64 << (k - j);
            let p = match side {
                Side::Left => largest_congruent_below(r_bound, modulus, residue),
                Side::Right => smallest_congruent_above(r_bound, modulus, residue),
            };
            // The bounds move monotonically, so the extremum over the
            // sublevel is reached right after its final slot.
            let (_, y_hi) = seg.sublevel(j).expect("j <= level");
            let m = match side {
                Side::Left => trace.lb_before(y_hi + 1) - 1,
                Side::Right => trace.ub_before(y_hi + 1) + 1,
            };
            p_by_sublevel.push(p);
            m_by_sublevel.push(m);
        }
        let p_whole = *p_by_sublevel.last().expect("at least sublevel 0");
        let x = p_whole.div_euclid(1i64 << (k - seg.level()));
        per_segment.push(SegmentQuantities {
            p_by_sublevel,
            m_by_sublevel,
            x,
        });
    }
    let t_first = match side {
        Side::Left => trace.t_first_left(),
        Side::Right => trace.t_first_right(),
    };
    Ok(SideQuantities {
        side,
        r_bound,
        t_first,
        per_segment,
    })
}
