//! Minimum-MSE design under per-sensor (peak) power caps.
//!
//! Comparison baseline for the sum-power policy. For a fixed receiver gain
//! `g > 0` the MSE is separable in the transmit gains and each sensor's exact
//! optimum is the capped inversion `b_k = min(1/(g h_k), sqrt(P0))`, which
//! collapses the problem to the one-dimensional convex function
//!
//! ```text
//! phi(g) = sum_k max(0, 1 - g h_k sqrt(P0))^2 + sigma^2 g^2
//! ```
//!
//! minimized by a coarse log grid plus golden-section refinement.

use crate::model::{self, MsePowerPoint, SystemInstance, TxRxDesign};
use crate::{invalid_param, Result};

/// Per-sensor transmit-power cap `b_k^2 <= P0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakConstraint {
    per_sensor_limit: f64,
}

impl PeakConstraint {
    pub fn new(per_sensor_limit: f64) -> Result<Self> {
        if !per_sensor_limit.is_finite() || per_sensor_limit <= 0.0 {
            return Err(invalid_param(
                "per_sensor_limit",
                format!("{per_sensor_limit} must be finite and > 0"),
            ));
        }
        Ok(Self { per_sensor_limit })
    }

    pub fn limit(&self) -> f64 {
        self.per_sensor_limit
    }
}

/// Result of the peak-constrained MSE minimization.
#[derive(Debug, Clone)]
pub struct PeakSolution {
    pub point: MsePowerPoint,
    pub design: TxRxDesign,
}

/// Minimizes the computation MSE subject to `b_k^2 <= P0` for every sensor.
pub fn solve_min_mse_peak(instance: &SystemInstance, peak: &PeakConstraint) -> Result<PeakSolution> {
    let gains = instance.channels().gains();
    let noise_variance = instance.noise_variance();
    let cap = peak.limit().sqrt();

    // phi(g) with the inner optimum substituted.
    let objective = |g: f64| -> f64 {
        let misalignment: f64 = gains
            .iter()
            .map(|&h| {
                let shortfall = (1.0 - g * h * cap).max(0.0);
                shortfall * shortfall
            })
            .sum();
        misalignment + noise_variance * g * g
    };

    const GRID: usize = 1024;
    let h_min = instance.channels().min_gain();
    let log_lo = (1e-5 / h_min).ln();
    let log_hi = (1e3 / h_min).ln();
    let grid_point =
        |i: usize| -> f64 { (log_lo + (log_hi - log_lo) * i as f64 / (GRID - 1) as f64).exp() };

    let mut best_idx = 0;
    let mut best_val = f64::INFINITY;
    for i in 0..GRID {
        let val = objective(grid_point(i));
        if val < best_val {
            best_val = val;
            best_idx = i;
        }
    }

    let mut a = grid_point(best_idx.saturating_sub(1));
    let mut b = grid_point((best_idx + 1).min(GRID - 1));
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while b - a > 1e-10 * b {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = objective(x2);
        }
    }
    let g = 0.5 * (a + b);

    let tx_gains: Vec<f64> = gains.iter().map(|&h| (1.0 / (g * h)).min(cap)).collect();
    let design = TxRxDesign::new(g, tx_gains)?;
    let point = MsePowerPoint {
        mse: model::mse(instance, &design)?,
        sum_power: model::sum_power(&design),
    };
    Ok(PeakSolution { point, design })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChannelVector;
    use crate::mse_policy;

    fn instance(gains: &[f64], noise_variance: f64) -> SystemInstance {
        SystemInstance::new(ChannelVector::new(gains.to_vec()).unwrap(), noise_variance).unwrap()
    }

    #[test]
    fn single_sensor_matches_sum_power_optimum() {
        // With one sensor, peak and sum constraints coincide.
        let inst = instance(&[1.0], 1.0);
        let peak = PeakConstraint::new(10.0).unwrap();
        let sol = solve_min_mse_peak(&inst, &peak).unwrap();
        assert!(
            (sol.point.mse - 1.0 / 11.0).abs() < 1e-8,
            "got {}",
            sol.point.mse
        );
    }

    #[test]
    fn identical_channels_match_sum_power_optimum() {
        // Symmetric instance: uniform allocation is optimal under both
        // constraint types once P = K * P0.
        let inst = instance(&[1.0; 10], 1.0);
        let peak = PeakConstraint::new(1.0).unwrap();
        let sol = solve_min_mse_peak(&inst, &peak).unwrap();
        let sum = mse_policy::solve_min_mse(&inst, 10.0).unwrap();
        let rel = (sol.point.mse - sum.mse_star).abs() / sum.mse_star;
        assert!(rel < 1e-8, "peak {}, sum {}", sol.point.mse, sum.mse_star);
    }

    #[test]
    fn peak_policy_never_beats_sum_power_policy() {
        // The sum-power feasible set at P = K * P0 contains the peak one.
        let gains: Vec<f64> = [0.1f64, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5, 1.7, 1.9]
            .iter()
            .map(|&p| p.sqrt())
            .collect();
        let inst = instance(&gains, 1.0);
        let peak = PeakConstraint::new(10.0).unwrap();
        let sol = solve_min_mse_peak(&inst, &peak).unwrap();
        let sum = mse_policy::solve_min_mse(&inst, 100.0).unwrap();
        assert!(
            sol.point.mse > sum.mse_star,
            "peak {} should exceed sum {}",
            sol.point.mse,
            sum.mse_star
        );
    }

    #[test]
    fn caps_bind_exactly_where_inversion_exceeds_them() {
        let inst = instance(&[0.2, 1.0, 3.0], 0.7);
        let peak = PeakConstraint::new(2.0).unwrap();
        let sol = solve_min_mse_peak(&inst, &peak).unwrap();
        let cap = 2.0f64.sqrt();
        let g = sol.design.rx_gain();
        for (&h, &b) in inst.channels().gains().iter().zip(sol.design.tx_gains()) {
            assert!(b * b <= 2.0 * (1.0 + 1e-12));
            if 1.0 / (g * h) >= cap {
                assert_eq!(b, cap, "cap should bind exactly for h = {h}");
            } else {
                assert!((b - 1.0 / (g * h)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_limit_is_rejected() {
        assert!(PeakConstraint::new(0.0).is_err());
        assert!(PeakConstraint::new(-2.0).is_err());
        assert!(PeakConstraint::new(f64::NAN).is_err());
    }
}
