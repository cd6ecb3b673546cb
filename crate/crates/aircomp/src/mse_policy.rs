//! Closed-form minimum-MSE design under a sum-power budget.
//!
//! The problem is `min_{g, b} MSE` subject to `sum_k b_k^2 <= P`. The budget
//! constraint is always active, and substituting the combined variables
//! `w_k = g * b_k` turns the problem into the separable convex program
//!
//! ```text
//! min_{w}  sum_k (h_k w_k - 1)^2 + (sigma^2 / P) * sum_k w_k^2
//! ```
//!
//! whose per-sensor stationary point is `w_k = h_k / (sigma^2/P + h_k^2)`.
//! Mapping back through the active constraint gives the optimal design
//!
//! ```text
//! g   = sqrt(sum_k w_k^2 / P)
//! b_k = w_k * sqrt(P / sum_j w_j^2)
//! MSE = sum_k sigma^2 / (sigma^2 + P h_k^2)
//! ```
//!
//! Everything here is a direct O(K) formula evaluation — no iteration.

use crate::model::{sum_power, SystemInstance, TxRxDesign};
use crate::{invalid_param, Result};

/// Solution of the sum-power-constrained MSE minimization.
#[derive(Debug, Clone)]
pub struct MseSolveReport {
    /// The optimal scaling factors.
    pub design: TxRxDesign,
    /// Minimum achievable computation MSE.
    pub mse_star: f64,
    /// Total transmit power of `design`; equals the budget `P`.
    pub power_used: f64,
    /// Combined variables `w_k = g * b_k` from the convex reformulation.
    pub combined_gains: Vec<f64>,
}

fn check_budget(sum_power_limit: f64) -> Result<()> {
    if !sum_power_limit.is_finite() || sum_power_limit <= 0.0 {
        return Err(invalid_param(
            "sum_power_limit",
            format!("{sum_power_limit} must be finite and > 0"),
        ));
    }
    Ok(())
}

/// Minimizer of the convex reformulation: `w_k = h_k / (sigma^2/P + h_k^2)`.
///
/// Written with `sigma^2/P` factored out so the expression stays stable for
/// budgets up to around 1e12.
pub fn reformulated_solution(instance: &SystemInstance, sum_power_limit: f64) -> Result<Vec<f64>> {
    check_budget(sum_power_limit)?;
    let noise_over_p = instance.noise_variance() / sum_power_limit;
    Ok(instance
        .channels()
        .gains()
        .iter()
        .map(|&h| h / (noise_over_p + h * h))
        .collect())
}

/// Closed-form solution of the MSE minimization under `sum_k b_k^2 <= P`.
pub fn solve_min_mse(instance: &SystemInstance, sum_power_limit: f64) -> Result<MseSolveReport> {
    let combined = reformulated_solution(instance, sum_power_limit)?;
    let combined_norm_sq: f64 = combined.iter().map(|&w| w * w).sum();
    // h_k > 0 guarantees w_k > 0, so the norm cannot vanish.
    let rx_gain = (combined_norm_sq / sum_power_limit).sqrt();
    let scale = (sum_power_limit / combined_norm_sq).sqrt();
    let tx_gains: Vec<f64> = combined.iter().map(|&w| w * scale).collect();

    let noise_over_p = instance.noise_variance() / sum_power_limit;
    let mse_star: f64 = instance
        .channels()
        .gains()
        .iter()
        .map(|&h| noise_over_p / (noise_over_p + h * h))
        .sum();

    let design = TxRxDesign::new(rx_gain, tx_gains)?;
    let power_used = sum_power(&design);
    Ok(MseSolveReport {
        design,
        mse_star,
        power_used,
        combined_gains: combined,
    })
}

/// Per-sensor transmit powers `b_k^2` of the optimal design; they sum to `P`.
pub fn power_allocation_profile(
    instance: &SystemInstance,
    sum_power_limit: f64,
) -> Result<Vec<f64>> {
    let report = solve_min_mse(instance, sum_power_limit)?;
    Ok(report.design.tx_gains().iter().map(|&b| b * b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mse, ChannelVector};

    const REL: f64 = 1e-12;

    fn instance(gains: &[f64], noise_variance: f64) -> SystemInstance {
        SystemInstance::new(ChannelVector::new(gains.to_vec()).unwrap(), noise_variance).unwrap()
    }

    fn assert_rel(got: f64, want: f64, tol: f64) {
        let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
        assert!(err <= tol, "got {got}, want {want} (rel err {err:.3e})");
    }

    #[test]
    fn identical_channels_hand_evaluation() {
        // K=10, h=1, sigma^2=1, P=10: w_k = 10/11, g = 10/11, b_k = 1,
        // MSE = 10/11.
        let inst = instance(&[1.0; 10], 1.0);
        let report = solve_min_mse(&inst, 10.0).unwrap();
        assert_rel(report.design.rx_gain(), 10.0 / 11.0, REL);
        for &b in report.design.tx_gains() {
            assert_rel(b, 1.0, REL);
        }
        assert_rel(report.mse_star, 10.0 / 11.0, REL);
        assert_rel(report.power_used, 10.0, 1e-9);
    }

    #[test]
    fn single_sensor_case() {
        let inst = instance(&[1.0], 1.0);
        let report = solve_min_mse(&inst, 10.0).unwrap();
        assert_rel(report.mse_star, 1.0 / 11.0, REL);
    }

    #[test]
    fn large_budget_drives_mse_to_zero() {
        let inst = instance(&[1.0; 10], 1.0);
        let report = solve_min_mse(&inst, 1e9).unwrap();
        assert!(report.mse_star < 1e-6, "mse {}", report.mse_star);
        assert_rel(report.mse_star, 10.0 / (1.0 + 1e9), 1e-9);
    }

    #[test]
    fn report_is_internally_consistent() {
        let inst = instance(&[0.2, 0.9, 1.7, 0.4], 0.8);
        let p = 3.5;
        let report = solve_min_mse(&inst, p).unwrap();
        // Active budget.
        assert_rel(report.power_used, p, 1e-9);
        // Reported optimum matches the exact evaluator.
        assert_rel(report.mse_star, mse(&inst, &report.design).unwrap(), 1e-9);
        // Combined variables really are g * b_k.
        let g = report.design.rx_gain();
        for (&w, &b) in report.combined_gains.iter().zip(report.design.tx_gains()) {
            assert_rel(w, g * b, 1e-12);
        }
    }

    #[test]
    fn reformulated_solution_examples() {
        let inst = instance(&[1.0], 1.0);
        let w = reformulated_solution(&inst, 10.0).unwrap();
        assert_rel(w[0], 10.0 / 11.0, REL);

        let inst2 = instance(&[1.0, 2.0], 1.0);
        let w2 = reformulated_solution(&inst2, 1.0).unwrap();
        assert_rel(w2[0], 0.5, REL);
        assert_rel(w2[1], 0.4, REL);

        // Vanishing noise-to-budget ratio approaches channel inversion.
        let inst3 = instance(&[0.5, 2.0], 1e-12);
        let w3 = reformulated_solution(&inst3, 1.0).unwrap();
        assert_rel(w3[0], 2.0, 1e-9);
        assert_rel(w3[1], 0.5, 1e-9);
    }

    #[test]
    fn profile_sums_to_budget() {
        let inst = instance(&[0.3, 1.1, 0.8], 2.0);
        let profile = power_allocation_profile(&inst, 7.0).unwrap();
        let total: f64 = profile.iter().sum();
        assert_rel(total, 7.0, 1e-9);

        let uniform = instance(&[1.0; 10], 1.0);
        for p in power_allocation_profile(&uniform, 10.0).unwrap() {
            assert_rel(p, 1.0, REL);
        }
    }

    #[test]
    fn allocation_peaks_at_moderate_channels() {
        // The combined-gain map h -> P h / (sigma^2 + P h^2) peaks at
        // h = sigma / sqrt(P); sensors below and above it get less power.
        let p = 4.0f64;
        let noise = 1.0f64;
        let peak_h = (noise / p).sqrt();
        let inst = instance(&[peak_h / 3.0, peak_h, peak_h * 3.0], noise);
        let profile = power_allocation_profile(&inst, p).unwrap();
        assert!(profile[1] > profile[0] && profile[1] > profile[2], "{profile:?}");
    }

    #[test]
    fn invalid_budget_is_rejected() {
        let inst = instance(&[1.0], 1.0);
        assert!(solve_min_mse(&inst, 0.0).is_err());
        assert!(solve_min_mse(&inst, -3.0).is_err());
        assert!(solve_min_mse(&inst, f64::NAN).is_err());
        assert!(solve_min_mse(&inst, f64::INFINITY).is_err());
    }
}
