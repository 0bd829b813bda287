use thiserror::Error;

/// Everything that can go wrong across cycle construction, receiver
/// stepping, window analysis and sweep configuration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bit width {0} exceeds the 64-bit capacity")]
    WidthExceeded(u32),

    #[error("key count {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("keys must be ascending: order violated at position {0}")]
    UnsortedKeys(usize),

    #[error("query interval is inverted (lo > hi)")]
    InvalidQuery,

    #[error("receiver has already reported an empty result")]
    ReceiverDone,

    #[error("sublevel {sublevel} out of range for a segment of level {level}")]
    SublevelOutOfRange { sublevel: u32, level: u32 },

    #[error("segment index {index} out of range (last = {last})")]
    SegmentOutOfRange { index: usize, last: usize },

    #[error(
        "trace (k={trace_k}, s={trace_s}) does not match decomposition (k={dec_k}, s={dec_s})"
    )]
    TraceMismatch {
        trace_k: u32,
        trace_s: i64,
        dec_k: u32,
        dec_s: i64,
    },

    #[error("target pair (r_lo={r_lo}, r_hi={r_hi}) is infeasible for n={n}")]
    InfeasibleTargets { r_lo: i64, r_hi: i64, n: i64 },

    #[error("{got} keys supplied where the cycle needs {expected}")]
    KeyCountMismatch { expected: usize, got: usize },

    #[error("k range [{k_min}, {k_max}] is empty")]
    EmptyKRange { k_min: u32, k_max: u32 },

    #[error("exhaustive sweep at k={k} exceeds the configured cap of {cap}")]
    ExhaustiveCapExceeded { k: u32, cap: u32 },
}
