//! Monte-Carlo trials and SNR sweeps.
//!
//! All methods see the same channel draw for a given trial index, so their
//! per-trial results can be compared directly. A trial counts as feasible
//! only if every pair meets its rate floor; otherwise every user is switched
//! off and the trial contributes zero rate.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::assign::{self, assignment_pairs, Assignment};
use crate::power::{self, PairAllocation};
use crate::scenario::{generate_realization, validate_config, ChannelRealization, PairGains};
use crate::scenario::{ScenarioConfig, SnrReference};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    /// Exhaustive joint assignment with closed-form power control.
    ExhaustiveOptimal,
    /// Hungarian assignment with closed-form power control.
    HungarianClosedForm,
    /// Random assignment, both users at full power.
    RandomFullPower,
}

impl MethodId {
    pub const ALL: [MethodId; 3] = [
        MethodId::ExhaustiveOptimal,
        MethodId::HungarianClosedForm,
        MethodId::RandomFullPower,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MethodId::ExhaustiveOptimal => "a",
            MethodId::HungarianClosedForm => "b",
            MethodId::RandomFullPower => "d",
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMethod;

impl fmt::Display for UnknownMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("method must be one of a, b, d")
    }
}

impl core::error::Error for UnknownMethod {}

impl FromStr for MethodId {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s.trim() {
            "a" | "A" => Ok(MethodId::ExhaustiveOptimal),
            "b" | "B" => Ok(MethodId::HungarianClosedForm),
            "d" | "D" => Ok(MethodId::RandomFullPower),
            _ => Err(UnknownMethod),
        }
    }
}

/// Peak power for an SNR grid point, following `config.snr_reference`.
pub fn p_max_for_snr(config: &ScenarioConfig, snr_db: f64) -> f64 {
    let transmit = config.sigma2 * crate::db_to_linear(snr_db);
    match config.snr_reference {
        SnrReference::Transmit => transmit,
        SnrReference::Serving => transmit / libm::pow(config.d_serving, -config.alpha),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub method: MethodId,
    pub snr_db: f64,
    pub trial_index: u64,
    /// Network sum rate; zero unless `feasible`.
    pub sum_rate: f64,
    /// Every pair met its rate floor.
    pub feasible: bool,
}

/// Per-pair allocations of one method on one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub assignment: Assignment,
    pub allocations: Vec<PairAllocation>,
}

impl MethodOutcome {
    pub fn all_feasible(&self) -> bool {
        self.allocations.iter().all(|a| a.feasible)
    }

    /// Sum rate after the network-wide off rule.
    pub fn scored_rate(&self) -> f64 {
        if self.all_feasible() {
            self.allocations.iter().map(|a| a.sum_rate()).sum()
        } else {
            0.0
        }
    }
}

/// Reusable per-trial state: the realization and the SNR-independent
/// assignments.
struct TrialContext {
    realization: ChannelRealization,
    hungarian: Option<Assignment>,
    random: Option<Assignment>,
}

impl TrialContext {
    fn new(config: &ScenarioConfig, methods: &[MethodId], trial_index: u64) -> Result<Self> {
        let realization = generate_realization(config, trial_index);
        let hungarian = if methods.contains(&MethodId::HungarianClosedForm) {
            Some(assign::assign_hungarian(&realization)?)
        } else {
            None
        };
        let random = methods
            .contains(&MethodId::RandomFullPower)
            .then(|| assign::assign_random(config, trial_index));
        Ok(TrialContext {
            realization,
            hungarian,
            random,
        })
    }

    fn run(&self, config: &ScenarioConfig, method: MethodId, p_max: f64) -> Result<MethodOutcome> {
        let sigma2 = config.sigma2;
        let r_min = config.r_min;
        let mode = config.power_mode;
        let closed_form = |g: &PairGains| power::optimize_pair_with(g, sigma2, p_max, r_min, mode);
        match method {
            MethodId::ExhaustiveOptimal => {
                let best = assign::assign_exhaustive(&self.realization, config, closed_form)?;
                Ok(MethodOutcome {
                    assignment: best.assignment,
                    allocations: best.allocations,
                })
            }
            MethodId::HungarianClosedForm => {
                let assignment = self.hungarian.clone().expect("prepared");
                let allocations = assignment_pairs(&self.realization, &assignment)?
                    .iter()
                    .map(closed_form)
                    .collect();
                Ok(MethodOutcome {
                    assignment,
                    allocations,
                })
            }
            MethodId::RandomFullPower => {
                let assignment = self.random.clone().expect("prepared");
                let allocations = assignment_pairs(&self.realization, &assignment)?
                    .iter()
                    .map(|g| power::full_power_pair(g, sigma2, p_max, r_min))
                    .collect();
                Ok(MethodOutcome {
                    assignment,
                    allocations,
                })
            }
        }
    }
}

/// Runs one method on one realization at one SNR and returns the pair
/// allocations.
pub fn run_method(
    config: &ScenarioConfig,
    method: MethodId,
    trial_index: u64,
    snr_db: f64,
) -> Result<MethodOutcome> {
    let ctx = TrialContext::new(config, &[method], trial_index)?;
    ctx.run(config, method, p_max_for_snr(config, snr_db))
}

pub fn run_trial(
    config: &ScenarioConfig,
    method: MethodId,
    trial_index: u64,
    snr_db: f64,
) -> Result<TrialResult> {
    let outcome = run_method(config, method, trial_index, snr_db)?;
    Ok(TrialResult {
        method,
        snr_db,
        trial_index,
        sum_rate: outcome.scored_rate(),
        feasible: outcome.all_feasible(),
    })
}

/// One point of a sweep curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub method: MethodId,
    pub snr_db: f64,
    pub mean_sum_rate: f64,
    pub feasibility_prob: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ascending SNR; within one SNR, methods in the requested order.
    pub points: Vec<SweepPoint>,
    pub seed: u64,
    pub config: ScenarioConfig,
}

impl SweepResult {
    pub fn point(&self, method: MethodId, snr_db: f64) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| p.method == method && p.snr_db == snr_db)
    }

    /// Points of one method in ascending SNR order.
    pub fn curve(&self, method: MethodId) -> Vec<SweepPoint> {
        self.points
            .iter()
            .filter(|p| p.method == method)
            .copied()
            .collect()
    }
}

fn sorted_grid(config: &ScenarioConfig) -> Vec<f64> {
    let mut grid = config.snr_grid_db.clone();
    grid.sort_by(f64::total_cmp);
    grid
}

fn check_inputs(config: &ScenarioConfig, methods: &[MethodId]) -> Result<ScenarioConfig> {
    let config = validate_config(config.clone())?;
    if methods.is_empty() {
        return Err(Error::NoMethods);
    }
    if config.snr_grid_db.is_empty() {
        return Err(Error::EmptySnrGrid);
    }
    Ok(config)
}

/// Every trial result of a sweep, ordered by trial, then SNR (ascending),
/// then method.
pub fn sweep_trials(config: &ScenarioConfig, methods: &[MethodId]) -> Result<Vec<TrialResult>> {
    let config = check_inputs(config, methods)?;
    let grid = sorted_grid(&config);
    let mut out = Vec::with_capacity(config.trials * grid.len() * methods.len());
    for trial_index in 0..config.trials as u64 {
        let ctx = TrialContext::new(&config, methods, trial_index)?;
        for &snr_db in &grid {
            let p_max = p_max_for_snr(&config, snr_db);
            for &method in methods {
                let outcome = ctx.run(&config, method, p_max)?;
                out.push(TrialResult {
                    method,
                    snr_db,
                    trial_index,
                    sum_rate: outcome.scored_rate(),
                    feasible: outcome.all_feasible(),
                });
            }
        }
    }
    Ok(out)
}

/// Averages trial results into sweep points. `trials` must be ordered as
/// [`sweep_trials`] returns them; sums run in trial order.
pub fn aggregate(
    config: &ScenarioConfig,
    methods: &[MethodId],
    trials: &[TrialResult],
) -> SweepResult {
    let grid = sorted_grid(config);
    let per_trial = grid.len() * methods.len();
    let mut rate_sums = alloc::vec![0.0f64; per_trial];
    let mut feasible_counts = alloc::vec![0usize; per_trial];
    let mut counts = alloc::vec![0usize; per_trial];
    for (i, t) in trials.iter().enumerate() {
        let slot = i % per_trial.max(1);
        rate_sums[slot] += t.sum_rate;
        feasible_counts[slot] += t.feasible as usize;
        counts[slot] += 1;
    }
    let mut points = Vec::with_capacity(per_trial);
    for (s, &snr_db) in grid.iter().enumerate() {
        for (k, &method) in methods.iter().enumerate() {
            let slot = s * methods.len() + k;
            let n = counts[slot];
            let denom = n.max(1) as f64;
            points.push(SweepPoint {
                method,
                snr_db,
                mean_sum_rate: rate_sums[slot] / denom,
                feasibility_prob: feasible_counts[slot] as f64 / denom,
                trials: n,
            });
        }
    }
    SweepResult {
        points,
        seed: config.seed,
        config: config.clone(),
    }
}

/// Mean sum rate and feasibility probability per (method, SNR).
pub fn sweep(config: &ScenarioConfig, methods: &[MethodId]) -> Result<SweepResult> {
    let trials = sweep_trials(config, methods)?;
    Ok(aggregate(config, methods, &trials))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityCurve {
    pub r_min: f64,
    pub result: SweepResult,
}

/// One feasibility-versus-SNR sweep per rate floor, on the same draws.
pub fn feasibility_curve(
    config: &ScenarioConfig,
    r_min_values: &[f64],
    method: MethodId,
) -> Result<Vec<FeasibilityCurve>> {
    r_min_values
        .iter()
        .map(|&r_min| {
            let config = ScenarioConfig {
                r_min,
                ..config.clone()
            };
            Ok(FeasibilityCurve {
                r_min,
                result: sweep(&config, &[method])?,
            })
        })
        .collect()
}

/// Closed-form versus grid-oracle comparison over sampled pairs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OracleReport {
    pub pairs_checked: usize,
    pub feasible_pairs: usize,
    /// Largest `oracle - closed_form` sum rate over checked pairs; negative
    /// when the closed form always beats the grid.
    pub max_gap: f64,
    /// Pairs where the grid beat the closed form by more than `tolerance`.
    pub gap_violations: usize,
    /// Pairs where exactly one of the two found a feasible point.
    pub verdict_mismatches: usize,
}

/// Checks the closed-form solver against the grid oracle on the Hungarian
/// pairs of the first `samples` trials, cycling through the SNR grid.
pub fn oracle_check(
    config: &ScenarioConfig,
    samples: usize,
    resolution: usize,
    tolerance: f64,
) -> Result<OracleReport> {
    let config = check_inputs(config, &[MethodId::HungarianClosedForm])?;
    let grid = sorted_grid(&config);
    let mut report = OracleReport {
        max_gap: f64::NEG_INFINITY,
        ..OracleReport::default()
    };
    for trial in 0..samples {
        let snr_db = grid[trial % grid.len()];
        let p_max = p_max_for_snr(&config, snr_db);
        let realization = generate_realization(&config, trial as u64);
        let assignment = assign::assign_hungarian(&realization)?;
        for gains in assignment_pairs(&realization, &assignment)? {
            let closed = power::optimize_pair_with(
                &gains,
                config.sigma2,
                p_max,
                config.r_min,
                config.power_mode,
            );
            let oracle =
                power::grid_oracle_pair(&gains, config.sigma2, p_max, config.r_min, resolution);
            report.pairs_checked += 1;
            if closed.feasible != oracle.feasible {
                report.verdict_mismatches += 1;
            }
            if closed.feasible && oracle.feasible {
                report.feasible_pairs += 1;
                let gap = oracle.sum_rate() - closed.sum_rate();
                report.max_gap = report.max_gap.max(gap);
                if gap > tolerance {
                    report.gap_violations += 1;
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn small_config() -> ScenarioConfig {
        ScenarioConfig {
            trials: 20,
            snr_grid_db: vec![20.0, 0.0, 40.0],
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn method_ids_parse() {
        assert_eq!("a".parse(), Ok(MethodId::ExhaustiveOptimal));
        assert_eq!(" B".parse(), Ok(MethodId::HungarianClosedForm));
        assert_eq!("d".parse(), Ok(MethodId::RandomFullPower));
        assert_eq!("c".parse::<MethodId>(), Err(UnknownMethod));
        for m in MethodId::ALL {
            assert_eq!(m.label().parse(), Ok(m));
        }
    }

    #[test]
    fn snr_reference_sets_p_max() {
        let mut config = ScenarioConfig::default();
        let serving = p_max_for_snr(&config, 60.0);
        assert!((serving - 10.0).abs() < 1e-12);
        config.snr_reference = SnrReference::Transmit;
        assert!((p_max_for_snr(&config, 60.0) - 1e-5).abs() < 1e-18);
    }

    #[test]
    fn trials_are_deterministic() {
        let config = small_config();
        for method in MethodId::ALL {
            let first = run_trial(&config, method, 3, 20.0).unwrap();
            assert_eq!(first, run_trial(&config, method, 3, 20.0).unwrap());
        }
    }

    #[test]
    fn exhaustive_dominates_per_trial() {
        let config = small_config();
        for trial in 0..20 {
            for snr in [0.0, 10.0, 20.0, 40.0] {
                let a = run_trial(&config, MethodId::ExhaustiveOptimal, trial, snr).unwrap();
                let b = run_trial(&config, MethodId::HungarianClosedForm, trial, snr).unwrap();
                assert!(a.sum_rate >= b.sum_rate);
                assert!(b.sum_rate >= 0.0);
            }
        }
    }

    #[test]
    fn single_subchannel_methods_coincide() {
        let config = ScenarioConfig {
            num_users_per_cell: 1,
            num_subchannels: 1,
            ..small_config()
        };
        for trial in 0..10 {
            let a = run_trial(&config, MethodId::ExhaustiveOptimal, trial, 10.0).unwrap();
            let b = run_trial(&config, MethodId::HungarianClosedForm, trial, 10.0).unwrap();
            assert_eq!(a.sum_rate, b.sum_rate);
            assert_eq!(a.feasible, b.feasible);
        }
    }

    #[test]
    fn infeasible_trials_score_zero() {
        let config = small_config();
        let trials = sweep_trials(&config, &MethodId::ALL).unwrap();
        assert!(trials.iter().any(|t| !t.feasible));
        assert!(trials.iter().all(|t| t.feasible || t.sum_rate == 0.0));
    }

    #[test]
    fn sweep_matches_trial_dump() {
        let config = small_config();
        let methods = [MethodId::HungarianClosedForm, MethodId::RandomFullPower];
        let trials = sweep_trials(&config, &methods).unwrap();
        let result = sweep(&config, &methods).unwrap();
        assert_eq!(result.points.len(), 6);
        let snrs: Vec<f64> = result.points.iter().map(|p| p.snr_db).collect();
        assert_eq!(snrs, [0.0, 0.0, 20.0, 20.0, 40.0, 40.0]);
        for p in &result.points {
            let mine: Vec<_> = trials
                .iter()
                .filter(|t| t.method == p.method && t.snr_db == p.snr_db)
                .collect();
            assert_eq!(mine.len(), p.trials);
            let mean = mine.iter().map(|t| t.sum_rate).sum::<f64>() / mine.len() as f64;
            assert!((mean - p.mean_sum_rate).abs() <= 1e-12 * mean.abs().max(1e-300));
            let prob = mine.iter().filter(|t| t.feasible).count() as f64 / mine.len() as f64;
            assert_eq!(prob, p.feasibility_prob);
            assert!((0.0..=1.0).contains(&p.feasibility_prob));
        }
    }

    #[test]
    fn single_trial_sweep_wraps_trial() {
        let config = ScenarioConfig {
            trials: 1,
            snr_grid_db: vec![30.0],
            ..ScenarioConfig::default()
        };
        let result = sweep(&config, &[MethodId::HungarianClosedForm]).unwrap();
        let trial = run_trial(&config, MethodId::HungarianClosedForm, 0, 30.0).unwrap();
        assert_eq!(result.points.len(), 1);
        assert_eq!(result.points[0].mean_sum_rate, trial.sum_rate);
        assert_eq!(
            result.points[0].feasibility_prob,
            trial.feasible as u8 as f64
        );
        assert_eq!(result.seed, config.seed);
    }

    #[test]
    fn sweep_rejects_bad_inputs() {
        let config = small_config();
        assert_eq!(sweep(&config, &[]), Err(Error::NoMethods));
        let empty = ScenarioConfig {
            snr_grid_db: vec![],
            ..small_config()
        };
        assert_eq!(
            sweep(&empty, &[MethodId::RandomFullPower]),
            Err(Error::EmptySnrGrid)
        );
    }

    #[test]
    fn zero_rate_floor_is_always_feasible() {
        let curves =
            feasibility_curve(&small_config(), &[0.0], MethodId::HungarianClosedForm).unwrap();
        assert!(curves[0]
            .result
            .points
            .iter()
            .all(|p| p.feasibility_prob == 1.0));
    }

    #[test]
    fn oracle_check_reports() {
        let config = small_config();
        let report = oracle_check(&config, 6, 201, 5e-3).unwrap();
        assert_eq!(report.pairs_checked, 18);
        assert_eq!(report.gap_violations, 0);
    }
}
