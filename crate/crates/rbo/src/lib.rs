//! Simulator and verifier for a broadcast protocol that transmits a
//! sorted key sequence in bit-reversed index order, paired with a
//! receiver that keeps its radio off outside a shrinking index window.
//!
//! The crate splits into four layers:
//!
//! * [`bitops`]: binary strings and the `rev_k` slot-to-index map.
//! * [`protocol`]: the broadcast cycle, the receiver state machine and
//!   full per-run traces with energy accounting.
//! * [`analysis`]: the aligned-segment decomposition of a receiver's
//!   slot window and the per-segment quantities that explain where the
//!   window can move.
//! * [`verifier`]: exhaustive and randomized sweeps that check the
//!   energy bounds, the per-segment window lemmas and the closed-form
//!   window formulas against the state machine, with machine-readable
//!   reports.

pub mod analysis;
pub mod bitops;
mod error;
pub mod protocol;
pub mod verifier;

pub use error::Error;
