//! Closed-form minimum-power design under a computation-MSE limit.
//!
//! The problem is `min_{g, b} sum_k b_k^2` subject to `MSE <= eps` with
//! `0 < eps < K` (for `eps >= K` the all-off design is optimal). The MSE
//! constraint holds with equality at the optimum. With the per-sensor
//! variables `tau_k = 1/(1 + M h_k^2)` the whole design reduces to a single
//! scalar `M > 0`, the unique positive root of
//!
//! ```text
//! M = sum_k c_k (M/(c_k+M))^2  /  (eps - sum_k (c_k/(c_k+M))^2),    c_k = 1/h_k^2
//! ```
//!
//! restricted to the region where the denominator is positive. The root is
//! found by two bisection stages: first locate `M_min`, the point where
//! `sum_k tau_k^2 = eps` (the denominator's zero), then bracket and bisect
//! the root function `F(M) = M*(eps - sum tau^2) - sum c_k (1-tau_k)^2` on
//! `(M_min, oo)`, where `F` is negative just above `M_min` and grows without
//! bound. Given `M`, the optimal scalings are
//!
//! ```text
//! g   = sqrt(eps - sum_k tau_k^2) / sigma
//! b_k = sigma M h_k tau_k / sqrt(eps - sum_j tau_j^2)
//! ```

use crate::model::{sum_power, SystemInstance, TxRxDesign};
use crate::{invalid_param, Error, Result};

/// Relative width at which each bisection stage stops.
const BISECT_REL_TOL: f64 = 1e-12;
/// Hard cap per bisection/bracketing stage; exceeding it is a solver error.
const STAGE_ITER_CAP: u32 = 200;

/// Internals of the scalar fixed-point solve, kept for inspection.
#[derive(Debug, Clone)]
pub struct FixedPointDiagnostics {
    /// The fixed-point scalar `M`.
    pub m_value: f64,
    /// `tau_k = 1/(1 + M h_k^2)`, each in (0,1).
    pub taus: Vec<f64>,
    /// KKT multiplier of the MSE constraint, `lambda_2 = M / g^2`.
    pub kkt_multiplier: f64,
    /// `|F(M)|` at the returned root.
    pub residual: f64,
    /// Total bisection/bracketing iterations spent.
    pub iterations: u32,
}

/// Solution of the MSE-constrained power minimization.
#[derive(Debug, Clone)]
pub struct PowerSolveReport {
    pub design: TxRxDesign,
    /// Minimum sum power; equals `sum_power(design)`.
    pub pw_star: f64,
    /// `None` only in the trivial case `eps >= K` (all-off design).
    pub diagnostics: Option<FixedPointDiagnostics>,
}

/// Root of the fixed-point equation plus solve bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct FixedPointRoot {
    pub value: f64,
    /// `|F(value)|`.
    pub residual: f64,
    pub iterations: u32,
}

/// `sum_k tau_k^2` and `sum_k c_k (1 - tau_k)^2` at a given `M`.
fn tau_sums(costs: &[f64], m: f64) -> (f64, f64) {
    let mut tau_sq = 0.0;
    let mut weighted = 0.0;
    for &c in costs {
        let tau = c / (c + m);
        tau_sq += tau * tau;
        let miss = m / (c + m);
        weighted += c * miss * miss;
    }
    (tau_sq, weighted)
}

/// Root function `F(M) = M*(eps - sum tau^2) - sum c_k (1-tau_k)^2`.
fn root_fn(costs: &[f64], mse_limit: f64, m: f64) -> f64 {
    let (tau_sq, weighted) = tau_sums(costs, m);
    m * (mse_limit - tau_sq) - weighted
}

fn solver_failure(detail: String) -> Error {
    Error::SolverFailure {
        context: "fixed-point solve for M",
        detail,
    }
}

/// Solves the scalar fixed-point equation for `M` given the channel costs
/// `c_k = 1/h_k^2` and the MSE limit.
pub fn solve_m(channel_costs: &[f64], mse_limit: f64) -> Result<FixedPointRoot> {
    if channel_costs.is_empty() {
        return Err(invalid_param("channel_costs", "need at least one sensor"));
    }
    for (k, &c) in channel_costs.iter().enumerate() {
        if !c.is_finite() || c <= 0.0 {
            return Err(invalid_param(
                "channel_costs",
                format!("c_{k} = {c} must be finite and > 0"),
            ));
        }
    }
    let sensors = channel_costs.len() as f64;
    if !mse_limit.is_finite() || mse_limit <= 0.0 || mse_limit >= sensors {
        return Err(invalid_param(
            "mse_limit",
            format!("{mse_limit} must lie in (0, K) = (0, {sensors})"),
        ));
    }

    let mut iterations = 0u32;
    let mut spend = |n: &mut u32| -> Result<()> {
        *n += 1;
        iterations += 1;
        if *n > STAGE_ITER_CAP {
            Err(solver_failure(format!(
                "stage exceeded {STAGE_ITER_CAP} iterations"
            )))
        } else {
            Ok(())
        }
    };

    // Stage 1: bracket and bisect M_min, the unique zero of
    // sum tau^2 - eps (sum tau^2 falls strictly from K to 0).
    let tau_sq_at = |m: f64| tau_sums(channel_costs, m).0;
    let mut stage = 0u32;
    let mut hi = 1.0f64;
    while tau_sq_at(hi) >= mse_limit {
        spend(&mut stage)?;
        hi *= 2.0;
    }
    let mut lo = 0.0f64;
    stage = 0;
    while hi - lo > BISECT_REL_TOL * hi {
        spend(&mut stage)?;
        let mid = 0.5 * (lo + hi);
        if tau_sq_at(mid) >= mse_limit {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Invariant here: sum tau^2(lo) >= eps > sum tau^2(hi), so the
    // denominator eps - sum tau^2 is positive at hi and beyond.
    let m_min_lo = lo;
    let m_min_hi = hi;

    // Stage 2: bracket the root of F above M_min by doubling, then bisect.
    // F < 0 just above M_min and F -> +oo, and the root is unique there.
    let f_at = |m: f64| root_fn(channel_costs, mse_limit, m);
    let (mut lo, mut hi) = if f_at(m_min_hi) > 0.0 {
        // Root squeezed against M_min; the stage-1 bracket already spans it.
        (m_min_lo, m_min_hi)
    } else {
        let mut lo = m_min_hi;
        let mut hi = m_min_hi * 2.0;
        stage = 0;
        while f_at(hi) <= 0.0 {
            spend(&mut stage)?;
            lo = hi;
            hi *= 2.0;
        }
        (lo, hi)
    };
    debug_assert!(f_at(lo) <= 0.0 && f_at(hi) > 0.0, "bracket lost the sign change");

    stage = 0;
    while hi - lo > BISECT_REL_TOL * hi {
        spend(&mut stage)?;
        let mid = 0.5 * (lo + hi);
        if f_at(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let value = 0.5 * (lo + hi);
    Ok(FixedPointRoot {
        value,
        residual: f_at(value).abs(),
        iterations,
    })
}

fn check_mse_limit(mse_limit: f64) -> Result<()> {
    if !mse_limit.is_finite() || mse_limit <= 0.0 {
        return Err(invalid_param(
            "mse_limit",
            format!("{mse_limit} must be finite and > 0"),
        ));
    }
    Ok(())
}

/// Closed-form solution of the power minimization under `MSE <= eps`.
///
/// For `eps >= K` the MSE limit is met by transmitting nothing, so the
/// all-off design (with `g = 0`, which also minimizes the unconstrained MSE
/// of that design) is returned with zero power and no diagnostics.
pub fn solve_min_power(instance: &SystemInstance, mse_limit: f64) -> Result<PowerSolveReport> {
    check_mse_limit(mse_limit)?;
    let sensors = instance.sensor_count();
    if mse_limit >= sensors as f64 {
        return Ok(PowerSolveReport {
            design: TxRxDesign::zero(sensors),
            pw_star: 0.0,
            diagnostics: None,
        });
    }

    let gains = instance.channels().gains();
    let costs: Vec<f64> = gains.iter().map(|&h| 1.0 / (h * h)).collect();
    let root = solve_m(&costs, mse_limit)?;
    let m = root.value;

    let taus: Vec<f64> = gains.iter().map(|&h| 1.0 / (1.0 + m * h * h)).collect();
    let tau_sq: f64 = taus.iter().map(|&t| t * t).sum();
    let slack = mse_limit - tau_sq;
    if slack <= 0.0 {
        return Err(solver_failure(format!(
            "returned M = {m} leaves no MSE slack for the receiver gain ({slack})"
        )));
    }

    let sigma = instance.noise_variance().sqrt();
    let scale = slack.sqrt();
    let rx_gain = scale / sigma;
    let tx_gains: Vec<f64> = gains
        .iter()
        .zip(&taus)
        .map(|(&h, &tau)| sigma * m * h * tau / scale)
        .collect();
    let design = TxRxDesign::new(rx_gain, tx_gains)?;
    let pw_star = sum_power(&design);

    Ok(PowerSolveReport {
        design,
        pw_star,
        diagnostics: Some(FixedPointDiagnostics {
            m_value: m,
            taus,
            kkt_multiplier: m / (rx_gain * rx_gain),
            residual: root.residual,
            iterations: root.iterations,
        }),
    })
}

/// Round trip between the two problems: solve for the minimum power at MSE
/// limit `eps`, then minimize MSE under that power budget. The result equals
/// `eps` again — both closed forms trace the same power/MSE frontier.
pub fn duality_check(instance: &SystemInstance, mse_limit: f64) -> Result<f64> {
    let sensors = instance.sensor_count() as f64;
    if !mse_limit.is_finite() || mse_limit <= 0.0 || mse_limit >= sensors {
        return Err(invalid_param(
            "mse_limit",
            format!("{mse_limit} must lie in (0, K) = (0, {sensors})"),
        ));
    }
    let power = solve_min_power(instance, mse_limit)?.pw_star;
    let report = crate::mse_policy::solve_min_mse(instance, power)?;
    Ok(report.mse_star)
}
