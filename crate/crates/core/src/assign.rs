//! Sub-channel assignment: the log-ratio cost matrix, the Hungarian solver,
//! and the exhaustive and random baselines.

use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;

use crate::power::PairAllocation;
use crate::scenario::{pair_gains, ChannelRealization, PairGains, ScenarioConfig, MAX_SUBCHANNELS};
use crate::stream;
use crate::{Error, Result};

/// Per-cell maps from sub-channel to user. Each map is a bijection.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    per_cell: [Vec<usize>; 2],
}

impl Assignment {
    pub fn new(per_cell: [Vec<usize>; 2]) -> Result<Self> {
        if per_cell[0].len() != per_cell[1].len() {
            return Err(Error::DimensionMismatch {
                what: "per-cell map length",
                expected: per_cell[0].len(),
                found: per_cell[1].len(),
            });
        }
        for (cell, map) in per_cell.iter().enumerate() {
            if !is_permutation(map) {
                return Err(Error::NotABijection { cell });
            }
        }
        Ok(Assignment { per_cell })
    }

    pub fn identity(n: usize) -> Self {
        let id: Vec<usize> = (0..n).collect();
        Assignment {
            per_cell: [id.clone(), id],
        }
    }

    pub fn subchannels(&self) -> usize {
        self.per_cell[0].len()
    }

    /// User of `cell` holding `subchannel`.
    #[inline]
    pub fn user(&self, cell: usize, subchannel: usize) -> usize {
        self.per_cell[cell][subchannel]
    }

    pub fn cell_map(&self, cell: usize) -> &[usize] {
        &self.per_cell[cell]
    }
}

pub(crate) fn is_permutation(map: &[usize]) -> bool {
    let mut seen = vec![false; map.len()];
    for &m in map {
        if m >= map.len() || seen[m] {
            return false;
        }
        seen[m] = true;
    }
    true
}

/// Rearranges `perm` into the next permutation in lexicographic order.
/// Returns `false` (leaving the slice sorted ascending) after the last one.
pub fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        perm.reverse();
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Square cost matrix of one cell: rows are users, columns sub-channels.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    size: usize,
    cell: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_rows(size: usize, cell: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::DimensionMismatch {
                what: "cost matrix entries",
                expected: size * size,
                found: entries.len(),
            });
        }
        Ok(CostMatrix {
            size,
            cell,
            entries,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cell(&self) -> usize {
        self.cell
    }

    #[inline]
    pub fn get(&self, user: usize, subchannel: usize) -> f64 {
        self.entries[user * self.size + subchannel]
    }

    /// Summed entries selected by a sub-channel to user map.
    pub fn value_of(&self, perm: &[usize]) -> f64 {
        perm.iter().enumerate().map(|(n, &m)| self.get(m, n)).sum()
    }
}

/// Cost of giving sub-channel `n` of `cell` to user `m`:
/// `log2(h[m][cell][n][cell] / h[m][cell][n][other])`.
pub fn build_cost_matrix(realization: &ChannelRealization, cell: usize) -> CostMatrix {
    let other = 1 - cell;
    let size = realization.subchannels();
    let mut entries = Vec::with_capacity(size * size);
    for m in 0..realization.users() {
        for n in 0..size {
            let direct = realization.gain(m, cell, n, cell);
            let cross = realization.gain(m, cell, n, other);
            entries.push(libm::log2(direct / cross));
        }
    }
    CostMatrix {
        size,
        cell,
        entries,
    }
}

/// Maximum-weight perfect matching of users to sub-channels.
///
/// Runs the O(n^3) shortest-augmenting-path Hungarian method with row and
/// column potentials on the negated matrix. Returns `perm` with
/// `perm[n]` the user given sub-channel `n`. Users are inserted in index
/// order, so ties resolve the same way on every platform.
pub fn hungarian_max(cost: &CostMatrix) -> Result<Vec<usize>> {
    let n = cost.size;
    if n > MAX_SUBCHANNELS {
        return Err(Error::MatrixTooLarge {
            size: n,
            limit: MAX_SUBCHANNELS,
        });
    }
    for row in 0..n {
        for col in 0..n {
            if !cost.get(row, col).is_finite() {
                return Err(Error::NonFiniteCost { row, col });
            }
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    // 1-based indices; slot 0 is the virtual column that starts each search.
    let weight = |row: usize, col: usize| -cost.get(row - 1, col - 1);
    let mut row_pot = vec![0.0f64; n + 1];
    let mut col_pot = vec![0.0f64; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        col_owner[0] = row;
        let mut col0 = 0usize;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r = col_owner[col0];
            let mut delta = f64::INFINITY;
            let mut next = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = weight(r, col) - row_pot[r] - col_pot[col];
                if reduced < min_slack[col] {
                    min_slack[col] = reduced;
                    way[col] = col0;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    next = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    row_pot[col_owner[col]] += delta;
                    col_pot[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = next;
            if col_owner[col0] == 0 {
                break;
            }
        }
        // Flip the augmenting path.
        loop {
            let prev = way[col0];
            col_owner[col0] = col_owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    Ok((1..=n).map(|col| col_owner[col] - 1).collect())
}

/// Hungarian assignment, solved independently per cell.
pub fn assign_hungarian(realization: &ChannelRealization) -> Result<Assignment> {
    if realization.users() != realization.subchannels() {
        return Err(Error::DimensionMismatch {
            what: "users per cell vs sub-channels",
            expected: realization.subchannels(),
            found: realization.users(),
        });
    }
    let first = hungarian_max(&build_cost_matrix(realization, 0))?;
    let second = hungarian_max(&build_cost_matrix(realization, 1))?;
    Ok(Assignment {
        per_cell: [first, second],
    })
}

/// Result of the exhaustive assignment search.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveOutcome {
    pub assignment: Assignment,
    /// Exact network sum rate of the chosen assignment; off pairs count 0.
    pub sum_rate: f64,
    /// Whether every pair of the chosen assignment met its rate floor.
    pub all_feasible: bool,
    pub allocations: Vec<PairAllocation>,
}

/// Enumerates all `(N!)^2` joint assignments and keeps the best one.
///
/// Assignments in which every pair is feasible rank above those with an off
/// pair; within each class the exact network sum rate decides, and the first
/// one in lexicographic enumeration order wins ties.
pub fn assign_exhaustive<F>(
    realization: &ChannelRealization,
    config: &ScenarioConfig,
    power_solver: F,
) -> Result<ExhaustiveOutcome>
where
    F: Fn(&PairGains) -> PairAllocation,
{
    let n = realization.subchannels();
    if realization.users() != n {
        return Err(Error::DimensionMismatch {
            what: "users per cell vs sub-channels",
            expected: n,
            found: realization.users(),
        });
    }
    if n > config.exhaustive_cap {
        return Err(Error::EnumerationTooLarge {
            size: n,
            cap: config.exhaustive_cap,
        });
    }

    // A pair's allocation only depends on (cell-1 user, cell-2 user, sub-channel).
    let mut table = Vec::with_capacity(n * n * n);
    for m1 in 0..n {
        for m2 in 0..n {
            for sub in 0..n {
                let gains = PairGains {
                    a: realization.gain(m1, 0, sub, 0),
                    b: realization.gain(m2, 1, sub, 0),
                    c: realization.gain(m2, 1, sub, 1),
                    d: realization.gain(m1, 0, sub, 1),
                };
                table.push(power_solver(&gains));
            }
        }
    }
    let entry = |m1: usize, m2: usize, sub: usize| &table[(m1 * n + m2) * n + sub];

    let mut best: Option<(bool, f64, Vec<usize>, Vec<usize>)> = None;
    let mut first: Vec<usize> = (0..n).collect();
    loop {
        let mut second: Vec<usize> = (0..n).collect();
        loop {
            let mut rate = 0.0;
            let mut all_feasible = true;
            for sub in 0..n {
                let alloc = entry(first[sub], second[sub], sub);
                all_feasible &= alloc.feasible;
                rate += alloc.sum_rate();
            }
            let better = match &best {
                None => true,
                Some((f, r, _, _)) => (all_feasible, rate) > (*f, *r),
            };
            if better {
                best = Some((all_feasible, rate, first.clone(), second.clone()));
            }
            if !next_permutation(&mut second) {
                break;
            }
        }
        if !next_permutation(&mut first) {
            break;
        }
    }

    let (all_feasible, sum_rate, first, second) = best.expect("at least one assignment");
    let allocations = (0..n)
        .map(|sub| entry(first[sub], second[sub], sub).clone())
        .collect();
    Ok(ExhaustiveOutcome {
        assignment: Assignment {
            per_cell: [first, second],
        },
        sum_rate,
        all_feasible,
        allocations,
    })
}

/// Uniformly random per-cell bijections from the trial's stream.
pub fn assign_random(config: &ScenarioConfig, trial_index: u64) -> Assignment {
    let mut rng = stream::assignment_stream(config.seed, trial_index);
    let n = config.num_subchannels;
    let mut first: Vec<usize> = (0..n).collect();
    let mut second: Vec<usize> = (0..n).collect();
    first.shuffle(&mut rng);
    second.shuffle(&mut rng);
    Assignment {
        per_cell: [first, second],
    }
}

/// Pair gains for every sub-channel of an assignment, in sub-channel order.
pub fn assignment_pairs(
    realization: &ChannelRealization,
    assignment: &Assignment,
) -> Result<Vec<PairGains>> {
    (0..realization.subchannels())
        .map(|n| pair_gains(realization, assignment, n))
        .collect()
}
