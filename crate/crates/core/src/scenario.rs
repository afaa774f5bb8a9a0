//! Experiment configuration and seeded channel realizations.

use alloc::vec::Vec;
use rand::RngCore;

use crate::assign::Assignment;
use crate::power::CandidateMode;
use crate::stream;
use crate::{Error, Result};

pub const NUM_CELLS: usize = 2;

/// Largest sub-channel count accepted by the Hungarian solver.
pub const MAX_SUBCHANNELS: usize = 64;

/// What the swept SNR value is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnrReference {
    /// Mean received SNR on a serving link: `p_max * d_serving^-alpha / sigma2`.
    #[default]
    Serving,
    /// Transmit-side ratio `p_max / sigma2`.
    Transmit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub num_cells: usize,
    pub num_users_per_cell: usize,
    pub num_subchannels: usize,
    /// Peak transmit power per user, watts.
    pub p_max: f64,
    /// Noise power, watts.
    pub sigma2: f64,
    /// Minimum rate per user, bits/s/Hz.
    pub r_min: f64,
    pub alpha: f64,
    pub d_serving: f64,
    pub d_cross: f64,
    pub trials: usize,
    pub snr_grid_db: Vec<f64>,
    pub seed: u64,
    pub snr_reference: SnrReference,
    pub power_mode: CandidateMode,
    /// Largest sub-channel count for which exhaustive assignment is allowed.
    pub exhaustive_cap: usize,
}

impl Default for ScenarioConfig {
    /// Two cells with three users and three sub-channels each, 100 m serving
    /// and 500 m cross distances, path-loss exponent 3, noise at -110 dB and
    /// a 0.1 bit/s/Hz rate floor.
    fn default() -> Self {
        ScenarioConfig {
            num_cells: NUM_CELLS,
            num_users_per_cell: 3,
            num_subchannels: 3,
            p_max: crate::db_to_linear(30.0),
            sigma2: crate::db_to_linear(-110.0),
            r_min: 0.1,
            alpha: 3.0,
            d_serving: 100.0,
            d_cross: 500.0,
            trials: 2000,
            snr_grid_db: (0..=6).map(|i| 10.0 * i as f64).collect(),
            seed: 2018,
            snr_reference: SnrReference::Serving,
            power_mode: CandidateMode::Paper,
            exhaustive_cap: 5,
        }
    }
}

fn positive(value: f64, field: &'static str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig {
            field,
            reason: "must be positive and finite",
        })
    }
}

/// Checks every configuration invariant, reporting the first one violated.
pub fn validate_config(raw: ScenarioConfig) -> Result<ScenarioConfig> {
    if raw.num_cells != NUM_CELLS {
        return Err(Error::InvalidConfig {
            field: "num_cells",
            reason: "must be 2",
        });
    }
    if raw.num_users_per_cell == 0 {
        return Err(Error::InvalidConfig {
            field: "num_users_per_cell",
            reason: "must be at least 1",
        });
    }
    if raw.num_subchannels != raw.num_users_per_cell {
        return Err(Error::InvalidConfig {
            field: "num_subchannels",
            reason: "must equal num_users_per_cell",
        });
    }
    if raw.num_subchannels > MAX_SUBCHANNELS {
        return Err(Error::InvalidConfig {
            field: "num_subchannels",
            reason: "must not exceed 64",
        });
    }
    positive(raw.p_max, "p_max")?;
    positive(raw.sigma2, "sigma2")?;
    if !(raw.r_min.is_finite() && raw.r_min >= 0.0) {
        return Err(Error::InvalidConfig {
            field: "r_min",
            reason: "must be non-negative and finite",
        });
    }
    positive(raw.alpha, "alpha")?;
    positive(raw.d_serving, "d_serving")?;
    positive(raw.d_cross, "d_cross")?;
    if raw.trials == 0 {
        return Err(Error::InvalidConfig {
            field: "trials",
            reason: "must be at least 1",
        });
    }
    if raw.snr_grid_db.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidConfig {
            field: "snr_grid_db",
            reason: "values must be finite",
        });
    }
    Ok(raw)
}

/// Linear path loss `distance^-alpha`.
pub fn path_loss(distance: f64, alpha: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::NonPositiveDistance(distance));
    }
    Ok(libm::pow(distance, -alpha))
}

/// Power gains `h[m][j][n][k]` from user `m` of cell `j` to base station `k`
/// on sub-channel `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    users: usize,
    subchannels: usize,
    gains: Vec<f64>,
}

impl ChannelRealization {
    /// Builds a realization from a flat tensor in `[m][j][n][k]` order.
    pub fn new(users: usize, subchannels: usize, gains: Vec<f64>) -> Result<Self> {
        let expected = users * NUM_CELLS * subchannels * NUM_CELLS;
        if gains.len() != expected {
            return Err(Error::DimensionMismatch {
                what: "gain tensor length",
                expected,
                found: gains.len(),
            });
        }
        if let Some((index, &value)) = gains
            .iter()
            .enumerate()
            .find(|(_, g)| !(g.is_finite() && **g > 0.0))
        {
            return Err(Error::InvalidGain { index, value });
        }
        Ok(ChannelRealization {
            users,
            subchannels,
            gains,
        })
    }

    pub fn from_fn(
        users: usize,
        subchannels: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut gains = Vec::with_capacity(users * subchannels * NUM_CELLS * NUM_CELLS);
        for m in 0..users {
            for j in 0..NUM_CELLS {
                for n in 0..subchannels {
                    for k in 0..NUM_CELLS {
                        gains.push(f(m, j, n, k));
                    }
                }
            }
        }
        Self::new(users, subchannels, gains)
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn subchannels(&self) -> usize {
        self.subchannels
    }

    pub fn flat_index(&self, m: usize, j: usize, n: usize, k: usize) -> usize {
        debug_assert!(m < self.users && j < NUM_CELLS && n < self.subchannels && k < NUM_CELLS);
        ((m * NUM_CELLS + j) * self.subchannels + n) * NUM_CELLS + k
    }

    #[inline]
    pub fn gain(&self, m: usize, j: usize, n: usize, k: usize) -> f64 {
        self.gains[self.flat_index(m, j, n, k)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.gains
    }
}

/// Draws the channel tensor of one Monte-Carlo trial.
///
/// Entry `i` of the flat tensor is read from word `2 i` of the trial's
/// stream, so each `(trial, m, j, n, k)` has its own fixed draw.
pub fn generate_realization(config: &ScenarioConfig, trial_index: u64) -> ChannelRealization {
    let serving = libm::pow(config.d_serving, -config.alpha);
    let cross = libm::pow(config.d_cross, -config.alpha);
    let mut rng = stream::fading_stream(config.seed, trial_index, 0);
    let m = config.num_users_per_cell;
    let n = config.num_subchannels;
    let mut gains = Vec::with_capacity(m * n * NUM_CELLS * NUM_CELLS);
    for _m in 0..m {
        for j in 0..NUM_CELLS {
            for _n in 0..n {
                for k in 0..NUM_CELLS {
                    let fading = stream::unit_exponential(rng.next_u64());
                    gains.push(fading * if j == k { serving } else { cross });
                }
            }
        }
    }
    ChannelRealization {
        users: m,
        subchannels: n,
        gains,
    }
}

/// Gains seen by the two users sharing one sub-channel.
///
/// `a` and `d` belong to the cell-1 user (towards base stations 1 and 2),
/// `c` and `b` to the cell-2 user (towards base stations 2 and 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGains {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl PairGains {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        PairGains { a, b, c, d }
    }

    /// The same pair with the roles of the two cells exchanged.
    pub fn swapped(&self) -> Self {
        PairGains {
            a: self.c,
            b: self.d,
            c: self.a,
            d: self.b,
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.a, self.b, self.c, self.d]
            .iter()
            .all(|g| g.is_finite() && *g > 0.0)
    }
}

/// Extracts the pair gains for `subchannel` under `assignment`.
pub fn pair_gains(
    realization: &ChannelRealization,
    assignment: &Assignment,
    subchannel: usize,
) -> Result<PairGains> {
    let n = realization.subchannels();
    if assignment.subchannels() != n || realization.users() != n {
        return Err(Error::DimensionMismatch {
            what: "assignment size",
            expected: n,
            found: assignment.subchannels(),
        });
    }
    if subchannel >= n {
        return Err(Error::IndexOutOfRange {
            what: "sub-channel",
            index: subchannel,
            len: n,
        });
    }
    let m1 = assignment.user(0, subchannel);
    let m2 = assignment.user(1, subchannel);
    Ok(PairGains {
        a: realization.gain(m1, 0, subchannel, 0),
        b: realization.gain(m2, 1, subchannel, 0),
        c: realization.gain(m2, 1, subchannel, 1),
        d: realization.gain(m1, 0, subchannel, 1),
    })
}
