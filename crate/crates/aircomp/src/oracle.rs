//! Independent numerical solvers for the two design problems.
//!
//! These exist to validate the closed forms and deliberately share no code
//! with [`crate::mse_policy`] or [`crate::power_policy`]:
//!
//! * [`pg_min_mse`] attacks the MSE minimization directly with projected
//!   gradient descent on `(g, {b_k})`, projecting the transmit gains onto the
//!   sum-power ball, best of several random restarts;
//! * [`nested_min_power`] minimizes the sum power by a scalar search over the
//!   receiver gain: for each candidate `g` it meets the MSE limit exactly by
//!   bisecting the multiplier of the fixed-`g` stationarity condition
//!   `b_k = lam g h_k / (1 + lam g^2 h_k^2)`, then refines the best `g` by
//!   golden section.
//!
//! Both report the best design found together with search bookkeeping, and
//! both recompute their objectives through [`crate::model`] so the reported
//! numbers cannot drift from the definitions.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::model::{self, MsePowerPoint, SystemInstance, TxRxDesign};
use crate::seeding::substream_rng;
use crate::{invalid_param, Error, Result};

/// Knobs for the oracle searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    /// Random restarts for the gradient search (best result wins).
    pub restarts: u32,
    /// Step cap per restart.
    pub max_steps: u32,
    /// Stop once the relative objective decrease falls below this.
    pub step_tolerance: f64,
    /// Master seed; restart `r` draws from substream `(seed, r)`.
    pub seed: u64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_steps: 100_000,
            step_tolerance: 1e-12,
            seed: 0x0a1c_0317,
        }
    }
}

impl OracleSettings {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(invalid_param("restarts", "must be >= 1"));
        }
        if self.max_steps == 0 {
            return Err(invalid_param("max_steps", "must be >= 1"));
        }
        if !(self.step_tolerance > 0.0) {
            return Err(invalid_param("step_tolerance", "must be > 0"));
        }
        Ok(())
    }
}

/// Best design found by an oracle search, plus bookkeeping.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    /// Objective recomputed through [`crate::model`] on `design`.
    pub point: MsePowerPoint,
    pub design: TxRxDesign,
    /// Objective evaluations spent across the whole search.
    pub evaluations: u64,
    /// Search paths that ran to convergence (gradient restarts, or feasible
    /// outer candidates in the nested search).
    pub completed_paths: u32,
    /// Paths cut short: restarts that hit the step cap, or outer candidates
    /// whose inner problem was infeasible.
    pub abandoned_paths: u32,
}

/// The MSE objective, written out locally so this module stays independent
/// of the evaluators it is checking.
fn mse_objective(gains: &[f64], noise_variance: f64, g: f64, b: &[f64]) -> f64 {
    let misalignment: f64 = gains
        .iter()
        .zip(b)
        .map(|(&h, &bk)| {
            let d = g * h * bk - 1.0;
            d * d
        })
        .sum();
    misalignment + noise_variance * g * g
}

struct RestartOutcome {
    g: f64,
    b: Vec<f64>,
    objective: f64,
    evaluations: u64,
    converged: bool,
}

/// One projected-gradient restart.
///
/// Internally the iterates live in the rescaled coordinates
/// `(g * sqrt(P), b / sqrt(P))`, which leave the objective values unchanged
/// while turning the constraint into the unit ball and keeping the landscape
/// well conditioned for any budget; in the raw coordinates the curvature
/// ratio between `g` and `b` grows like `P^2`.
fn run_restart(
    gains: &[f64],
    noise_variance: f64,
    budget: f64,
    settings: &OracleSettings,
    restart: u32,
) -> RestartOutcome {
    let sensors = gains.len();
    let radius = budget.sqrt();
    let scaled_noise = noise_variance / budget;
    let h_min = gains.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rng = substream_rng(settings.seed, restart as u64);

    // b uniform on the power sphere is the unit sphere in scaled coordinates.
    let mut b: Vec<f64>;
    loop {
        let draw: Vec<f64> = (0..sensors).map(|_| rng.sample(StandardNormal)).collect();
        let norm = draw.iter().map(|&x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            b = draw.iter().map(|&x| x / norm).collect();
            break;
        }
    }
    // g uniform in (0, 2/h_min], mapped into the scaled coordinates.
    let u: f64 = rng.random();
    let mut g = (1.0 - u) * 2.0 / h_min * radius;

    let mut objective = mse_objective(gains, scaled_noise, g, &b);
    let mut evaluations = 1u64;
    let mut converged = false;
    let mut b_next = vec![0.0; sensors];

    for _ in 0..settings.max_steps {
        let mut grad_g = 2.0 * scaled_noise * g;
        for (&h, &bk) in gains.iter().zip(&b) {
            grad_g += 2.0 * (g * h * bk - 1.0) * h * bk;
        }
        let grad_b: Vec<f64> = gains
            .iter()
            .zip(&b)
            .map(|(&h, &bk)| 2.0 * (g * h * bk - 1.0) * g * h)
            .collect();

        // Backtracking: halve from a unit step until the objective drops.
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let g_next = g - step * grad_g;
            for ((next, &cur), &d) in b_next.iter_mut().zip(&b).zip(&grad_b) {
                *next = cur - step * d;
            }
            let norm_sq: f64 = b_next.iter().map(|&x| x * x).sum();
            if norm_sq > 1.0 {
                let shrink = 1.0 / norm_sq.sqrt();
                for next in &mut b_next {
                    *next *= shrink;
                }
            }
            let candidate = mse_objective(gains, scaled_noise, g_next, &b_next);
            evaluations += 1;
            if candidate < objective {
                accepted = Some((g_next, candidate));
                break;
            }
            step *= 0.5;
        }
        let Some((g_next, candidate)) = accepted else {
            // No descent direction at floating-point resolution.
            converged = true;
            break;
        };
        let relative_drop = (objective - candidate) / objective.max(f64::MIN_POSITIVE);
        g = g_next;
        std::mem::swap(&mut b, &mut b_next);
        objective = candidate;
        if relative_drop < settings.step_tolerance {
            converged = true;
            break;
        }
    }

    // Canonicalize the sign symmetry (g, b) -> (-g, -b), drop any stray
    // negative coordinates left by the last step, and map back to the raw
    // coordinates.
    if g < 0.0 {
        g = -g;
        for bk in &mut b {
            *bk = -*bk;
        }
    }
    for bk in &mut b {
        *bk = bk.max(0.0) * radius;
    }
    g /= radius;
    objective = mse_objective(gains, noise_variance, g, &b);
    evaluations += 1;

    RestartOutcome {
        g,
        b,
        objective,
        evaluations,
        converged,
    }
}

/// Projected-gradient solve of the MSE minimization under the sum-power
/// budget. Deterministic per `(settings.seed, instance)`; restarts execute
/// in parallel and merge by lowest objective, ties to the lowest restart
/// index.
pub fn pg_min_mse(
    instance: &SystemInstance,
    sum_power_limit: f64,
    settings: &OracleSettings,
) -> Result<OracleSolution> {
    settings.validate()?;
    if !sum_power_limit.is_finite() || sum_power_limit <= 0.0 {
        return Err(invalid_param(
            "sum_power_limit",
            format!("{sum_power_limit} must be finite and > 0"),
        ));
    }

    let gains = instance.channels().gains();
    let noise_variance = instance.noise_variance();
    let outcomes: Vec<RestartOutcome> = (0..settings.restarts)
        .into_par_iter()
        .map(|r| run_restart(gains, noise_variance, sum_power_limit, settings, r))
        .collect();

    let evaluations: u64 = outcomes.iter().map(|o| o.evaluations).sum();
    let completed = outcomes.iter().filter(|o| o.converged).count() as u32;
    let best = outcomes
        .iter()
        .min_by(|a, b| a.objective.total_cmp(&b.objective))
        .expect("restarts >= 1");

    let design = TxRxDesign::new(best.g, best.b.clone())?;
    let point = MsePowerPoint {
        mse: model::mse(instance, &design)?,
        sum_power: model::sum_power(&design),
    };
    Ok(OracleSolution {
        point,
        design,
        evaluations,
        completed_paths: completed,
        abandoned_paths: settings.restarts - completed,
    })
}

/// Inner solve for the nested search: with `g` fixed, bisect the multiplier
/// until the design meets the MSE limit exactly, and return its sum power
/// and gains. `None` when no multiplier can reach the limit at this `g`.
fn power_at_rx_gain(
    gains: &[f64],
    noise_variance: f64,
    mse_limit: f64,
    g: f64,
    evaluations: &mut u64,
) -> Option<(f64, Vec<f64>)> {
    let sensors = gains.len() as f64;
    // MSE(lam; g) = sum_k (1/(1+lam g^2 h_k^2))^2 + sigma^2 g^2 falls from
    // K + sigma^2 g^2 (lam=0) toward sigma^2 g^2, so the target for the
    // first sum must lie in (0, K).
    let target = mse_limit - noise_variance * g * g;
    if target <= 0.0 || target >= sensors {
        return None;
    }
    let sum_tau_sq = |lam: f64| -> f64 {
        gains
            .iter()
            .map(|&h| {
                let tau = 1.0 / (1.0 + lam * g * g * h * h);
                tau * tau
            })
            .sum()
    };

    let mut hi = 1.0f64;
    let mut expansions = 0;
    while sum_tau_sq(hi) >= target {
        *evaluations += 1;
        hi *= 2.0;
        expansions += 1;
        if expansions > 300 {
            return None;
        }
    }
    let mut lo = 0.0f64;
    let mut rounds = 0;
    while hi - lo > 1e-13 * hi {
        *evaluations += 1;
        let mid = 0.5 * (lo + hi);
        if sum_tau_sq(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
        rounds += 1;
        if rounds > 300 {
            break;
        }
    }
    let lam = 0.5 * (lo + hi);
    let b: Vec<f64> = gains
        .iter()
        .map(|&h| lam * g * h / (1.0 + lam * g * g * h * h))
        .collect();
    let power = b.iter().map(|&x| x * x).sum();
    Some((power, b))
}

/// Nested scalar-search solve of the power minimization under the MSE limit:
/// coarse log grid over the receiver gain, exact inner solve per candidate,
/// golden-section refinement around the best candidate. Fully deterministic.
pub fn nested_min_power(
    instance: &SystemInstance,
    mse_limit: f64,
    settings: &OracleSettings,
) -> Result<OracleSolution> {
    settings.validate()?;
    if !mse_limit.is_finite() || mse_limit <= 0.0 {
        return Err(invalid_param(
            "mse_limit",
            format!("{mse_limit} must be finite and > 0"),
        ));
    }

    let sensors = instance.sensor_count();
    if mse_limit >= sensors as f64 {
        // The all-off design already satisfies the limit.
        let design = TxRxDesign::zero(sensors);
        let point = MsePowerPoint {
            mse: model::mse(instance, &design)?,
            sum_power: 0.0,
        };
        return Ok(OracleSolution {
            point,
            design,
            evaluations: 0,
            completed_paths: 0,
            abandoned_paths: 0,
        });
    }

    let gains = instance.channels().gains();
    let noise_variance = instance.noise_variance();
    let h_max = instance.channels().max_gain();

    const GRID: usize = 512;
    let log_lo = (1e-4 / h_max).ln();
    let log_hi = (1e4 / h_max).ln();
    let grid_point = |i: usize| -> f64 {
        (log_lo + (log_hi - log_lo) * i as f64 / (GRID - 1) as f64).exp()
    };

    let mut evaluations = 0u64;
    let mut feasible = 0u32;
    let mut infeasible = 0u32;
    let mut best: Option<(f64, usize)> = None;
    for i in 0..GRID {
        match power_at_rx_gain(gains, noise_variance, mse_limit, grid_point(i), &mut evaluations) {
            Some((power, _)) => {
                feasible += 1;
                if best.map_or(true, |(bp, _)| power < bp) {
                    best = Some((power, i));
                }
            }
            None => infeasible += 1,
        }
    }
    let Some((_, best_idx)) = best else {
        return Err(Error::SolverFailure {
            context: "nested min-power search",
            detail: format!(
                "no feasible receiver gain among {GRID} grid candidates (limit {mse_limit})"
            ),
        });
    };

    // Golden-section refinement on the bracket around the best grid point;
    // infeasible probes count as +inf.
    let mut power_of = |g: f64| -> f64 {
        power_at_rx_gain(gains, noise_variance, mse_limit, g, &mut evaluations)
            .map_or(f64::INFINITY, |(p, _)| p)
    };
    let mut a = grid_point(best_idx.saturating_sub(1));
    let mut b = grid_point((best_idx + 1).min(GRID - 1));
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = power_of(x1);
    let mut f2 = power_of(x2);
    while b - a > 1e-10 * b {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = power_of(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = power_of(x2);
        }
    }
    let g_star = 0.5 * (a + b);
    let (_, tx_gains) = power_at_rx_gain(gains, noise_variance, mse_limit, g_star, &mut evaluations)
        .ok_or(Error::SolverFailure {
            context: "nested min-power search",
            detail: "refined receiver gain became infeasible".to_string(),
        })?;

    let design = TxRxDesign::new(g_star, tx_gains)?;
    let point = MsePowerPoint {
        mse: model::mse(instance, &design)?,
        sum_power: model::sum_power(&design),
    };
    Ok(OracleSolution {
        point,
        design,
        evaluations,
        completed_paths: feasible,
        abandoned_paths: infeasible,
    })
}
