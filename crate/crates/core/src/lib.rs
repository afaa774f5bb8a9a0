//! Joint sub-channel assignment and power control for the uplink of a
//! two-cell OFDMA network.
//!
//! Each cell owns `N` orthogonal sub-channels shared by `M == N` users. A
//! sub-channel carries one user per cell, so the two co-channel users form an
//! interfering *pair* and pairs on different sub-channels are independent.
//! The pipeline is:
//!
//! 1. [`scenario`] draws a seeded channel tensor (unit-mean exponential fading
//!    times distance path loss).
//! 2. [`assign`] builds the per-cell log-ratio cost matrix and solves the
//!    assignment with the Hungarian method; exhaustive and random baselines
//!    live there too.
//! 3. [`power`] solves each pair's two-user power problem in closed form:
//!    feasibility from the two rate-floor half-planes, then a small candidate
//!    search over the vertices of the feasible region.
//! 4. [`harness`] runs Monte-Carlo sweeps over an SNR grid.
//!
//! The crate is `no_std` (it needs `alloc`); file formats and the command line
//! live in the `twocell` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod assign;
mod error;
pub mod harness;
pub mod power;
pub mod rate;
pub mod scenario;
mod stream;

pub use assign::{Assignment, CostMatrix};
pub use error::{Error, Result};
pub use harness::{MethodId, SweepPoint, SweepResult, TrialResult};
pub use power::{Candidate, CandidateMode, PairAllocation};
pub use rate::RatePair;
pub use scenario::{ChannelRealization, PairGains, ScenarioConfig, SnrReference};

/// Converts a decibel value to linear scale (`10^(db/10)`).
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * libm::log10(linear)
}
