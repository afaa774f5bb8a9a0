//! Closed-form power control for one co-channel user pair.
//!
//! With `a, b, c, d` as in [`PairGains`] and `g = 2^r_min - 1`, the two rate
//! floors are the half-planes
//!
//! ```text
//! l1:  p1 >= a' (b p2 + sigma2)          a' = g / a
//! l2:  p1 <= (c' p2 - sigma2) / d        c' = c / g
//! ```
//!
//! Both boundary lines rise with `p2`; `l1` crosses the `p1` axis above the
//! origin and `l2` below it. They meet in the first quadrant only if `l1` is
//! the flatter one, and the feasible set is then the wedge opening from their
//! junction, clipped by the box `[0, p_max]^2`.
//!
//! For a fixed `p2` the sum rate is increasing in `p1` except between the two
//! roots of a quadratic, where it decreases, so the best `p1` sits at an end
//! of its feasible interval; the same holds with the users swapped. The
//! candidates are therefore: the junction, the `l1` boundary at `p2 = p_max`,
//! the `l2` boundary at `p1 = p_max`, and `(p_max, p_max)`.
//! [`CandidateMode::Extended`] adds the two remaining vertices where a
//! boundary leaves the box through the opposite edge.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::rate::{pair_rates, RatePair};
use crate::scenario::PairGains;

/// Slack on the rate floors when checking a candidate, in bits/s/Hz.
pub const RATE_TOLERANCE: f64 = 1e-9;

/// Relative margin by which `l1` must be flatter than `l2`.
const SLOPE_MARGIN: f64 = 1e-12;

/// Relative slack on the power box before clamping a candidate back into it.
const BOX_SLACK: f64 = 1e-12;

/// SINR needed for rate `r_min`.
pub fn sinr_target(r_min: f64) -> f64 {
    libm::exp2(r_min) - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCoefficients {
    /// `(2^r_min - 1) / a`
    pub a_prime: f64,
    /// `c / (2^r_min - 1)`
    pub c_prime: f64,
    /// `2^r_min - 1`
    pub sinr_target: f64,
}

/// Coefficients of the two boundary lines. `None` when `r_min <= 0`: the
/// rate floors are then vacuous and there are no lines.
pub fn derived_coefficients(gains: &PairGains, r_min: f64) -> Option<DerivedCoefficients> {
    if !(r_min > 0.0) {
        return None;
    }
    let target = sinr_target(r_min);
    Some(DerivedCoefficients {
        a_prime: target / gains.a,
        c_prime: gains.c / target,
        sinr_target: target,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionPoint {
    pub p11_b: f64,
    pub p12_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Present whenever the two lines cross in the first quadrant.
    pub junction: Option<JunctionPoint>,
}

/// Feasibility of the pair problem: the slope condition plus the junction
/// lying inside the power box.
pub fn check_feasible(
    gains: &PairGains,
    coeffs: Option<&DerivedCoefficients>,
    sigma2: f64,
    p_max: f64,
) -> Feasibility {
    let Some(k) = coeffs else {
        return Feasibility {
            feasible: p_max >= 0.0,
            junction: Some(JunctionPoint {
                p11_b: 0.0,
                p12_b: 0.0,
            }),
        };
    };
    let flat = gains.b * k.a_prime;
    let steep = k.c_prime / gains.d;
    if !(flat < steep * (1.0 - SLOPE_MARGIN)) {
        return Feasibility {
            feasible: false,
            junction: None,
        };
    }
    let p12_b = (sigma2 / gains.d + k.a_prime * sigma2) / (steep - flat);
    // On l1; equal to p12_b c'/d - sigma2/d without the cancellation.
    let p11_b = k.a_prime * (gains.b * p12_b + sigma2);
    let inside = |p: f64| (0.0..=p_max).contains(&p);
    Feasibility {
        feasible: inside(p11_b) && inside(p12_b),
        junction: Some(JunctionPoint { p11_b, p12_b }),
    }
}

/// The quadratic in `p1` whose sign is the sign of `df/dp1` at fixed `p2`.
///
/// Clearing the positive denominators of the derivative leaves
/// `A p1^2 + B p1 + C` with `A = a d^2`, `B = 2 a d sigma2` and
/// `C = a sigma2^2 + p2 a c sigma2 - b c d p2^2 - c d sigma2 p2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticRoots {
    pub coeffs: (f64, f64, f64),
    pub discriminant: f64,
    roots: [f64; 2],
    count: usize,
}

impl QuadraticRoots {
    pub fn from_coefficients(a: f64, b: f64, c: f64) -> Self {
        let discriminant = b * b - 4.0 * a * c;
        let (roots, count) = if discriminant > 0.0 {
            let q = -0.5 * (b + libm::copysign(libm::sqrt(discriminant), b));
            let (x, y) = (q / a, c / q);
            ([x.min(y), x.max(y)], 2)
        } else if discriminant == 0.0 {
            ([-b / (2.0 * a), 0.0], 1)
        } else {
            ([0.0; 2], 0)
        };
        QuadraticRoots {
            coeffs: (a, b, c),
            discriminant,
            roots,
            count,
        }
    }

    /// Real roots in ascending order.
    pub fn roots(&self) -> &[f64] {
        &self.roots[..self.count]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b, c) = self.coeffs;
        (a * x + b) * x + c
    }

    /// `|A x^2 + B x + C|` relative to the largest of its three terms.
    pub fn relative_residual(&self, x: f64) -> f64 {
        let (a, b, c) = self.coeffs;
        let scale = (a * x * x).abs().max((b * x).abs()).max(c.abs());
        if scale == 0.0 {
            0.0
        } else {
            self.eval(x).abs() / scale
        }
    }

    /// Sign of the derivative at `x`, read off the roots (`A > 0`): negative
    /// strictly between two roots, zero on a root, positive elsewhere.
    pub fn derivative_sign(&self, x: f64) -> Ordering {
        match self.roots() {
            [lo, hi] if x > *lo && x < *hi => Ordering::Less,
            [lo, hi] if x == *lo || x == *hi => Ordering::Equal,
            [r] if x == *r => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

/// Stationary-point quadratic of the pair sum rate in `p1` at fixed `p2`.
pub fn stationary_points_p1(gains: &PairGains, p2: f64, sigma2: f64) -> QuadraticRoots {
    let PairGains { a, b, c, d } = *gains;
    let s2 = sigma2;
    let qa = a * d * d;
    let qb = 2.0 * a * d * s2;
    let qc = a * s2 * s2 + p2 * a * c * s2 - b * c * d * p2 * p2 - c * d * s2 * p2;
    QuadraticRoots::from_coefficients(qa, qb, qc)
}

/// The same quadratic in `p2` at fixed `p1`; the problem is symmetric under
/// exchanging the cells.
pub fn stationary_points_p2(gains: &PairGains, p1: f64, sigma2: f64) -> QuadraticRoots {
    stationary_points_p1(&gains.swapped(), p1, sigma2)
}

/// Which candidate set the pair solver searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CandidateMode {
    /// Junction, the two boundary points on the `p_max` edges, and the
    /// full-power corner.
    #[default]
    Paper,
    /// Adds the points where `l1` meets `p1 = p_max` and `l2` meets
    /// `p2 = p_max`.
    Extended,
}

/// The point a pair allocation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    Junction,
    /// `p1` on its rate floor, `p2 = p_max`.
    BoundaryP2Max,
    /// `p1 = p_max`, `p2` on its rate floor.
    P1MaxBoundary,
    BothMax,
    /// `p1 = p_max`, `p2` at the largest value the cell-1 floor allows.
    L1AtP1Max,
    /// `p2 = p_max`, `p1` at the largest value the cell-2 floor allows.
    L2AtP2Max,
    GridPoint,
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairAllocation {
    pub feasible: bool,
    pub p1: f64,
    pub p2: f64,
    pub rates: RatePair,
    pub candidate_used: Candidate,
}

impl PairAllocation {
    pub fn off() -> Self {
        PairAllocation {
            feasible: false,
            p1: 0.0,
            p2: 0.0,
            rates: RatePair::default(),
            candidate_used: Candidate::Off,
        }
    }

    pub fn sum_rate(&self) -> f64 {
        self.rates.sum()
    }
}

/// Candidate points in evaluation order, or `None` if the pair is
/// infeasible. Points may lie outside the box; they are filtered later.
pub fn candidate_points(
    gains: &PairGains,
    sigma2: f64,
    p_max: f64,
    r_min: f64,
    mode: CandidateMode,
) -> Option<Vec<(Candidate, f64, f64)>> {
    let coeffs = derived_coefficients(gains, r_min);
    let feasibility = check_feasible(gains, coeffs.as_ref(), sigma2, p_max);
    if !feasibility.feasible {
        return None;
    }
    let junction = feasibility.junction?;
    let mut points = Vec::with_capacity(6);
    points.push((Candidate::Junction, junction.p11_b, junction.p12_b));
    match coeffs {
        None => {
            points.push((Candidate::BoundaryP2Max, 0.0, p_max));
            points.push((Candidate::P1MaxBoundary, p_max, 0.0));
            points.push((Candidate::BothMax, p_max, p_max));
        }
        Some(k) => {
            let PairGains { b, d, .. } = *gains;
            let p1_floor = k.a_prime * (b * p_max + sigma2);
            let p2_floor = (d * p_max + sigma2) / k.c_prime;
            points.push((Candidate::BoundaryP2Max, p1_floor, p_max));
            points.push((Candidate::P1MaxBoundary, p_max, p2_floor));
            points.push((Candidate::BothMax, p_max, p_max));
            if mode == CandidateMode::Extended {
                let p2_ceiling = (p_max / k.a_prime - sigma2) / b;
                let p1_ceiling = (k.c_prime * p_max - sigma2) / d;
                points.push((Candidate::L1AtP1Max, p_max, p2_ceiling));
                points.push((Candidate::L2AtP2Max, p1_ceiling, p_max));
            }
        }
    }
    Some(points)
}

fn in_box(p: f64, p_max: f64) -> Option<f64> {
    let slack = BOX_SLACK * p_max;
    if p.is_finite() && p >= -slack && p <= p_max + slack {
        Some(p.clamp(0.0, p_max))
    } else {
        None
    }
}

/// Rates at `(p1, p2)` if the point meets the box and both rate floors.
fn admissible(
    gains: &PairGains,
    p1: f64,
    p2: f64,
    sigma2: f64,
    p_max: f64,
    r_min: f64,
) -> Option<(f64, f64, RatePair)> {
    let p1 = in_box(p1, p_max)?;
    let p2 = in_box(p2, p_max)?;
    let rates = pair_rates(gains, p1, p2, sigma2);
    let floor = r_min - RATE_TOLERANCE;
    (rates.r1 >= floor && rates.r2 >= floor).then_some((p1, p2, rates))
}

/// Closed-form pair power control with the default candidate set.
pub fn optimize_pair(gains: &PairGains, sigma2: f64, p_max: f64, r_min: f64) -> PairAllocation {
    optimize_pair_with(gains, sigma2, p_max, r_min, CandidateMode::Paper)
}

/// Evaluates each admissible candidate and keeps the largest exact sum rate,
/// first candidate winning ties. Infeasible pairs are switched off.
pub fn optimize_pair_with(
    gains: &PairGains,
    sigma2: f64,
    p_max: f64,
    r_min: f64,
    mode: CandidateMode,
) -> PairAllocation {
    let Some(points) = candidate_points(gains, sigma2, p_max, r_min, mode) else {
        return PairAllocation::off();
    };
    let mut best: Option<PairAllocation> = None;
    for (candidate, p1, p2) in points {
        let Some((p1, p2, rates)) = admissible(gains, p1, p2, sigma2, p_max, r_min) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| rates.sum() > b.sum_rate()) {
            best = Some(PairAllocation {
                feasible: true,
                p1,
                p2,
                rates,
                candidate_used: candidate,
            });
        }
    }
    best.unwrap_or_else(PairAllocation::off)
}

/// Both users at full power, switched off if either misses its floor.
pub fn full_power_pair(gains: &PairGains, sigma2: f64, p_max: f64, r_min: f64) -> PairAllocation {
    match admissible(gains, p_max, p_max, sigma2, p_max, r_min) {
        Some((p1, p2, rates)) => PairAllocation {
            feasible: true,
            p1,
            p2,
            rates,
            candidate_used: Candidate::BothMax,
        },
        None => PairAllocation::off(),
    }
}

/// Brute-force maximum of the exact pair sum rate over a uniform
/// `resolution x resolution` grid on `[0, p_max]^2`, keeping only points that
/// meet both rate floors. Grid point `i` is `p_max * (i / (resolution - 1))`,
/// so the grid for `2k - 1` contains the grid for `k`.
pub fn grid_oracle_pair(
    gains: &PairGains,
    sigma2: f64,
    p_max: f64,
    r_min: f64,
    resolution: usize,
) -> PairAllocation {
    let res = resolution.max(2);
    let denom = (res - 1) as f64;
    // r >= r_min - tol  <=>  sinr >= 2^(r_min - tol) - 1
    let target = sinr_target(r_min - RATE_TOLERANCE);
    let PairGains { a, b, c, d } = *gains;

    let mut best_value = f64::NEG_INFINITY;
    let mut best_idx = None;
    for i in 0..res {
        let p1 = p_max * (i as f64 / denom);
        let signal1 = p1 * a;
        let gain2 = c / (p1 * d + sigma2);
        for j in 0..res {
            let p2 = p_max * (j as f64 / denom);
            let s1 = signal1 / (p2 * b + sigma2);
            let s2 = p2 * gain2;
            // log2 is monotone, so compare the product of (1 + sinr).
            let value = (1.0 + s1) * (1.0 + s2);
            if s1 >= target && s2 >= target && value > best_value {
                best_value = value;
                best_idx = Some((i, j));
            }
        }
    }
    match best_idx {
        None => PairAllocation::off(),
        Some((i, j)) => {
            let p1 = p_max * (i as f64 / denom);
            let p2 = p_max * (j as f64 / denom);
            PairAllocation {
                feasible: true,
                p1,
                p2,
                rates: pair_rates(gains, p1, p2, sigma2),
                candidate_used: Candidate::GridPoint,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: PairGains = PairGains {
        a: 1.0,
        b: 1.0,
        c: 1.0,
        d: 1.0,
    };

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * (1.0 + y.abs())
    }

    #[test]
    fn coefficient_examples() {
        let k = derived_coefficients(&UNIT, 1.0).unwrap();
        assert_eq!((k.a_prime, k.c_prime), (1.0, 1.0));
        let k = derived_coefficients(&PairGains::new(2.0, 1.0, 8.0, 1.0), 1.0).unwrap();
        assert_eq!((k.a_prime, k.c_prime), (0.5, 8.0));
        let k = derived_coefficients(&UNIT, libm::log2(1.5)).unwrap();
        assert!(close(k.a_prime, 0.5, 1e-15) && close(k.c_prime, 2.0, 1e-15));
        assert!(derived_coefficients(&UNIT, 0.0).is_none());
    }

    #[test]
    fn parallel_lines_are_infeasible() {
        let k = derived_coefficients(&UNIT, 1.0);
        let f = check_feasible(&UNIT, k.as_ref(), 1.0, 100.0);
        assert!(!f.feasible);
        assert!(f.junction.is_none());
    }

    #[test]
    fn symmetric_junction() {
        let r_min = libm::log2(1.5);
        let k = derived_coefficients(&UNIT, r_min);
        let f = check_feasible(&UNIT, k.as_ref(), 1.0, 2.0);
        assert!(f.feasible);
        let j = f.junction.unwrap();
        assert!(close(j.p11_b, 1.0, 1e-14) && close(j.p12_b, 1.0, 1e-14));
        let rates = pair_rates(&UNIT, j.p11_b, j.p12_b, 1.0);
        assert!(close(rates.r1, r_min, 1e-12) && close(rates.r2, r_min, 1e-12));

        let f = check_feasible(&UNIT, k.as_ref(), 1.0, 0.5);
        assert!(!f.feasible);
        assert!(f.junction.is_some());
    }

    #[test]
    fn symmetric_pair_prefers_full_power() {
        // Candidates: junction log2(2.25), boundary points log2(2.7), corner log2(25/9).
        let alloc = optimize_pair(&UNIT, 1.0, 2.0, libm::log2(1.5));
        assert!(alloc.feasible);
        assert_eq!(alloc.candidate_used, Candidate::BothMax);
        assert!(close(alloc.sum_rate(), 2.0 * libm::log2(5.0 / 3.0), 1e-14));
    }

    #[test]
    fn boundary_candidates_sit_on_the_floors() {
        let r_min = libm::log2(1.5);
        let pts = candidate_points(&UNIT, 1.0, 2.0, r_min, CandidateMode::Extended).unwrap();
        let get = |c| pts.iter().find(|p| p.0 == c).map(|p| (p.1, p.2)).unwrap();
        let (p1, p2) = get(Candidate::BoundaryP2Max);
        assert!(close(p1, 1.5, 1e-15) && p2 == 2.0);
        assert!(close(pair_rates(&UNIT, p1, p2, 1.0).r1, r_min, 1e-12));
        let (p1, p2) = get(Candidate::P1MaxBoundary);
        assert!(p1 == 2.0 && close(p2, 1.5, 1e-15));
        assert!(close(pair_rates(&UNIT, p1, p2, 1.0).r2, r_min, 1e-12));
        // l1: p2 = (p1 / a' - sigma2) / b = 3 at p1 = 2, outside the box.
        assert!(close(get(Candidate::L1AtP1Max).1, 3.0, 1e-15));
    }

    #[test]
    fn near_interference_free_goes_full_power() {
        let g = PairGains::new(1.0, 1e-9, 1.0, 1e-9);
        let alloc = optimize_pair(&g, 1.0, 10.0, 0.01);
        assert_eq!(alloc.candidate_used, Candidate::BothMax);
        assert_eq!((alloc.p1, alloc.p2), (10.0, 10.0));
    }

    #[test]
    fn infeasible_pair_is_off() {
        let alloc = optimize_pair(&UNIT, 1.0, 2.0, 1.0);
        assert_eq!(alloc, PairAllocation::off());
        assert_eq!(alloc.sum_rate(), 0.0);
    }

    #[test]
    fn zero_rate_floor_searches_box_corners() {
        let pts = candidate_points(&UNIT, 1.0, 3.0, 0.0, CandidateMode::Paper).unwrap();
        let coords: Vec<(f64, f64)> = pts.iter().map(|p| (p.1, p.2)).collect();
        assert_eq!(coords, [(0.0, 0.0), (0.0, 3.0), (3.0, 0.0), (3.0, 3.0)]);
        // Strong interference: one user alone beats both at full power.
        let g = PairGains::new(1.0, 10.0, 1.0, 10.0);
        let alloc = optimize_pair(&g, 1.0, 3.0, 0.0);
        assert!(alloc.feasible);
        assert_eq!(alloc.candidate_used, Candidate::BoundaryP2Max);
        assert!(close(alloc.sum_rate(), 2.0, 1e-15));
    }

    #[test]
    fn full_power_examples() {
        let g = PairGains::new(1.0, 1e-12, 1.0, 1e-12);
        let alloc = full_power_pair(&g, 1.0, 3.0, 1.0);
        assert!(alloc.feasible);
        assert_eq!((alloc.p1, alloc.p2), (3.0, 3.0));
        let off = full_power_pair(&g, 1.0, 3.0, 2.5);
        assert_eq!(off, PairAllocation::off());
        let g = PairGains::new(0.7, 0.2, 1.3, 0.4);
        let alloc = full_power_pair(&g, 0.5, 2.0, 0.1);
        assert_eq!(alloc.rates, pair_rates(&g, 2.0, 2.0, 0.5));
    }

    #[test]
    fn grid_oracle_examples() {
        let g = PairGains::new(1.0, 1e-12, 1.0, 1e-12);
        let alloc = grid_oracle_pair(&g, 1.0, 4.0, 0.5, 11);
        assert_eq!((alloc.p1, alloc.p2), (4.0, 4.0));
        let alloc = grid_oracle_pair(&UNIT, 1.0, 2.0, 1.0, 101);
        assert!(!alloc.feasible);
    }

    #[test]
    fn grid_oracle_improves_with_nested_grids() {
        let g = PairGains::new(1.0, 0.8, 0.6, 0.9);
        let mut previous = f64::NEG_INFINITY;
        let mut res = 3;
        while res < 600 {
            let v = grid_oracle_pair(&g, 0.1, 2.0, 0.3, res).sum_rate();
            assert!(v >= previous);
            previous = v;
            res = 2 * res - 1;
        }
    }

    #[test]
    fn grid_oracle_agrees_on_symmetric_example() {
        let r_min = libm::log2(1.5);
        let closed = optimize_pair(&UNIT, 1.0, 2.0, r_min);
        let grid = grid_oracle_pair(&UNIT, 1.0, 2.0, r_min, 401);
        assert!((closed.sum_rate() - grid.sum_rate()).abs() < 1e-12);
    }

    #[test]
    fn quadratic_without_interference_has_no_positive_root() {
        let g = PairGains::new(0.9, 0.3, 1.1, 0.4);
        let q = stationary_points_p1(&g, 0.0, 0.2);
        let (a, b, c) = q.coeffs;
        assert!(a > 0.0 && b > 0.0 && c > 0.0);
        assert!(q.roots().iter().all(|r| *r < 0.0));
        assert_eq!(q.derivative_sign(0.5), Ordering::Greater);
    }

    #[test]
    fn quadratic_roots_and_discriminant() {
        let g = PairGains::new(1.0, 2.0, 1.0, 1.0);
        let q = stationary_points_p1(&g, 3.0, 0.1);
        let (a, b, c) = q.coeffs;
        assert_eq!(q.discriminant, b * b - 4.0 * a * c);
        assert_eq!(q.roots().len(), 2);
        for &r in q.roots() {
            assert!(q.relative_residual(r) < 1e-9);
        }
        let [lo, hi] = [q.roots()[0], q.roots()[1]];
        assert_eq!(q.derivative_sign((lo + hi) / 2.0), Ordering::Less);
        assert_eq!(q.derivative_sign(hi + 1.0), Ordering::Greater);
        let q = QuadraticRoots::from_coefficients(1.0, 2.0, 1.0);
        assert_eq!(q.roots(), &[-1.0]);
        let q = QuadraticRoots::from_coefficients(1.0, 0.0, 1.0);
        assert!(q.roots().is_empty());
    }

    #[test]
    fn p2_quadratic_mirrors_p1() {
        let g = PairGains::new(1.0, 2.0, 3.0, 0.5);
        let direct = stationary_points_p2(&g, 0.7, 0.2);
        let mirrored = stationary_points_p1(&g.swapped(), 0.7, 0.2);
        assert_eq!(direct, mirrored);
    }
}
