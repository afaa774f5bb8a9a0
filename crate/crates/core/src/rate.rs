//! Exact and high-SINR rate expressions. All rates are in bits/s/Hz.

use crate::assign::Assignment;
use crate::scenario::{pair_gains, ChannelRealization, PairGains};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RatePair {
    /// Rate of the cell-1 user.
    pub r1: f64,
    /// Rate of the cell-2 user.
    pub r2: f64,
}

impl RatePair {
    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// `log2(1 + p_own g_direct / (sigma2 + p_other g_cross))`.
#[inline]
pub fn user_rate(p_own: f64, g_direct: f64, p_other: f64, g_cross: f64, sigma2: f64) -> f64 {
    libm::log2(1.0 + p_own * g_direct / (sigma2 + p_other * g_cross))
}

pub fn pair_rates(gains: &PairGains, p1: f64, p2: f64, sigma2: f64) -> RatePair {
    RatePair {
        r1: user_rate(p1, gains.a, p2, gains.b, sigma2),
        r2: user_rate(p2, gains.c, p1, gains.d, sigma2),
    }
}

/// High-SINR pair sum rate `log2(a c) - log2(b d)`; the powers cancel.
pub fn approx_pair_sum_rate(gains: &PairGains) -> f64 {
    (libm::log2(gains.a) + libm::log2(gains.c)) - (libm::log2(gains.d) + libm::log2(gains.b))
}

/// High-SINR user rate `log2(p_own g_direct) - log2(p_other g_cross)`.
pub fn approx_user_rate(p_own: f64, g_direct: f64, p_other: f64, g_cross: f64) -> Result<f64> {
    let args = [p_own, g_direct, p_other, g_cross];
    if args.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::ApproximationUndefined);
    }
    // One log of the SIR: a common power scale by a power of two leaves the
    // quotient, and hence the result, bit-identical.
    Ok(libm::log2((p_own * g_direct) / (p_other * g_cross)))
}

/// Exact network sum rate. `powers[n]` is the `(cell-1, cell-2)` power pair
/// on sub-channel `n`; an off pair carries `(0, 0)` and contributes nothing.
pub fn network_sum_rate(
    realization: &ChannelRealization,
    assignment: &Assignment,
    powers: &[(f64, f64)],
    sigma2: f64,
) -> Result<f64> {
    let n = realization.subchannels();
    if powers.len() != n {
        return Err(Error::DimensionMismatch {
            what: "power pairs",
            expected: n,
            found: powers.len(),
        });
    }
    let mut total = 0.0;
    for (subchannel, &(p1, p2)) in powers.iter().enumerate() {
        let gains = pair_gains(realization, assignment, subchannel)?;
        total += pair_rates(&gains, p1, p2, sigma2).sum();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn user_rate_examples() {
        assert_eq!(user_rate(1.0, 1.0, 0.0, 123.0, 1.0), 1.0);
        assert_eq!(user_rate(0.0, 2.0, 5.0, 3.0, 0.1), 0.0);
        // 1 + 6/3 = 3
        assert!((user_rate(2.0, 3.0, 1.0, 2.0, 1.0) - 1.584962500721156).abs() < 1e-12);
    }

    #[test]
    fn pair_rate_examples() {
        let g = PairGains::new(2.0, 0.5, 2.0, 0.5);
        let r = pair_rates(&g, 1.3, 1.3, 0.2);
        assert_eq!(r.r1, r.r2);

        let r = pair_rates(&PairGains::new(1.0, 1.0, 1.0, 1.0), 1.0, 1.0, 1.0);
        assert!((r.r1 - libm::log2(1.5)).abs() < 1e-15);
        assert!((r.r2 - libm::log2(1.5)).abs() < 1e-15);

        let r = pair_rates(&PairGains::new(3.0, 1e-300, 5.0, 1e-300), 1.0, 1.0, 1.0);
        assert_eq!(r.r1, 2.0);
        assert!((r.r2 - libm::log2(6.0)).abs() < 1e-15);
    }

    #[test]
    fn approx_pair_examples() {
        assert_eq!(
            approx_pair_sum_rate(&PairGains::new(1.0, 1.0, 1.0, 1.0)),
            0.0
        );
        assert_eq!(
            approx_pair_sum_rate(&PairGains::new(4.0, 1.0, 4.0, 1.0)),
            4.0
        );
        // 1 + 3 - 0 - 2
        assert_eq!(
            approx_pair_sum_rate(&PairGains::new(2.0, 1.0, 8.0, 4.0)),
            2.0
        );
    }

    #[test]
    fn approx_user_examples() {
        assert_eq!(approx_user_rate(1.0, 8.0, 1.0, 2.0).unwrap(), 2.0);
        assert_eq!(
            approx_user_rate(0.0, 8.0, 1.0, 2.0),
            Err(Error::ApproximationUndefined)
        );
        assert!(approx_user_rate(1.0, 8.0, 1.0, -2.0).is_err());
        // SIR = 1e6 with negligible noise.
        let exact = user_rate(1.0, 1e6, 1.0, 1.0, 1e-12);
        let approx = approx_user_rate(1.0, 1e6, 1.0, 1.0).unwrap();
        assert!((exact - approx).abs() < 1e-5);
    }

    #[test]
    fn network_rate_examples() {
        let h = ChannelRealization::from_fn(1, 1, |_, j, _, k| if j == k { 1.0 } else { 1e-300 })
            .unwrap();
        let id = Assignment::identity(1);
        assert_eq!(network_sum_rate(&h, &id, &[(1.0, 1.0)], 1.0).unwrap(), 2.0);
        assert_eq!(network_sum_rate(&h, &id, &[(0.0, 0.0)], 1.0).unwrap(), 0.0);
        assert!(network_sum_rate(&h, &id, &[], 1.0).is_err());
    }

    #[test]
    fn network_rate_decomposes() {
        let h = ChannelRealization::from_fn(2, 2, |m, j, n, k| {
            0.3 + ((m * 7 + j * 5 + n * 3 + k * 11) % 13) as f64 / 4.0
        })
        .unwrap();
        let assignment = Assignment::new([vec![1, 0], vec![0, 1]]).unwrap();
        let powers = [(0.7, 1.9), (2.5, 0.4)];
        let total = network_sum_rate(&h, &assignment, &powers, 0.3).unwrap();
        let g0 = pair_gains(&h, &assignment, 0).unwrap();
        let g1 = pair_gains(&h, &assignment, 1).unwrap();
        let parts = pair_rates(&g0, 0.7, 1.9, 0.3).sum() + pair_rates(&g1, 2.5, 0.4, 0.3).sum();
        assert_eq!(total, parts);
    }

    proptest! {
        #[test]
        fn approximation_is_power_scale_invariant(
            p in 1e-3f64..1e3, q in 1e-3f64..1e3,
            g in 1e-9f64..1.0, h in 1e-9f64..1.0,
            lambda in prop::sample::select(vec![0.5, 2.0, 4.0, 0.125, 1024.0]),
        ) {
            // Powers of two keep the scaled products exact.
            let base = approx_user_rate(p, g, q, h).unwrap();
            let scaled = approx_user_rate(lambda * p, g, lambda * q, h).unwrap();
            prop_assert_eq!(base, scaled);
        }

        #[test]
        fn user_rate_monotone(
            p in 1e-3f64..10.0, q in 1e-3f64..10.0,
            g in 1e-3f64..1.0, h in 1e-3f64..1.0, s in 1e-3f64..1.0,
        ) {
            let step = 1e-3;
            let base = user_rate(p, g, q, h, s);
            prop_assert!(user_rate(p + step, g, q, h, s) > base);
            prop_assert!(user_rate(p, g, q + step, h, s) < base);
        }

        #[test]
        fn exact_meets_approximation_at_high_sir(
            g in 1e-6f64..1e-3, sir_db in 60.0f64..90.0, p in 1e-3f64..1.0,
        ) {
            let cross = g / crate::db_to_linear(sir_db);
            let exact = user_rate(p, g, p, cross, 1e-12 * p * cross);
            let approx = approx_user_rate(p, g, p, cross).unwrap();
            prop_assert!((exact - approx).abs() < 1e-5);
        }
    }
}
