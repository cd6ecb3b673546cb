//! Figure-data generation: closed-form sweeps and fading-ensemble averages
//! over the two reference channel sets, emitted as CSV tables.
//!
//! The reference sets are specified as channel-POWER gains `|h_k|^2`; the
//! magnitudes fed to the solvers are their square roots. The receiver noise
//! variance is 1 throughout, the default operating point of the harness.

use aircomp::model::{self, ChannelVector, SystemInstance};
use aircomp::simulator::{ensemble_average, EnsemblePolicy, EnsembleSpec, FadingModel};
use aircomp::{mse_policy, power_policy, Result};

use crate::table::{num, Table};

/// Identical channel-power gains.
pub const S1_POWER_GAINS: [f64; 10] = [1.0; 10];
/// Spread channel-power gains, ascending.
pub const S2_POWER_GAINS: [f64; 10] = [0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5, 1.7, 1.9];

const NOISE_VARIANCE: f64 = 1.0;

/// Default MSE limits swept by [`fig2`]: straddles the loose/tight boundary.
pub const FIG2_DEFAULT_MSE_LIMITS: [f64; 4] = [1.0, 3.0, 5.0, 7.0];
/// Default mean channel-power gains swept by [`fig4`].
pub const FIG4_DEFAULT_MEAN_GAINS: [f64; 2] = [0.5, 1.0];
/// Default sensor counts swept by [`fig4`].
pub const FIG4_DEFAULT_SENSOR_COUNTS: [usize; 6] = [5, 10, 15, 20, 25, 30];
/// Per-sensor sum-power budget used by the fig4 sum-power policy.
pub const FIG4_SUM_POWER_PER_SENSOR: f64 = 10.0;
/// Per-sensor cap used by the fig4 peak-power baseline.
pub const FIG4_PEAK_LIMIT: f64 = 10.0;

fn reference_sets() -> Vec<(&'static str, SystemInstance)> {
    [("S1", &S1_POWER_GAINS[..]), ("S2", &S2_POWER_GAINS[..])]
        .into_iter()
        .map(|(name, power_gains)| {
            let magnitudes: Vec<f64> = power_gains.iter().map(|&p| p.sqrt()).collect();
            let channels = ChannelVector::new(magnitudes).expect("reference gains are positive");
            let instance = SystemInstance::new(channels, NOISE_VARIANCE)
                .expect("unit noise variance is valid");
            (name, instance)
        })
        .collect()
}

/// Power/MSE frontier, traced from both ends: sweeping the sum-power budget
/// through the min-MSE policy and sweeping the MSE limit through the
/// min-power policy. The two traces land on the same curve.
pub fn fig1() -> Result<Table> {
    let mut table = Table::new(&[
        "channel_set",
        "trace",
        "constraint (signal power)",
        "mse (signal power)",
        "sum_power (signal power)",
    ]);
    for (set, instance) in reference_sets() {
        // Budgets 10^(-2)..10^2, hitting 1 exactly at the midpoint.
        for i in 0..=40u32 {
            let budget = 10f64.powf((i as f64 - 20.0) / 10.0);
            let report = mse_policy::solve_min_mse(&instance, budget)?;
            table.push_row(vec![
                set.to_string(),
                "min_mse_vs_p".to_string(),
                num(budget),
                num(report.mse_star),
                num(report.power_used),
            ]);
        }
        // MSE limits 0.5..9.5 in steps of 0.5, hitting 5 exactly.
        for j in 1..=19u32 {
            let limit = 0.5 * j as f64;
            let report = power_policy::solve_min_power(&instance, limit)?;
            let achieved = model::mse(&instance, &report.design)?;
            table.push_row(vec![
                set.to_string(),
                "min_power_vs_eps".to_string(),
                num(limit),
                num(achieved),
                num(report.pw_star),
            ]);
        }
    }
    Ok(table)
}

/// Transmit scalings of the min-power policy across sensors, one block per
/// (channel set, MSE limit).
pub fn fig2(mse_limits: &[f64]) -> Result<Table> {
    let mut table = Table::new(&[
        "channel_set",
        "mse_limit (signal power)",
        "sensor",
        "channel_power_gain (dimensionless)",
        "b_k (amplitude)",
        "b_k_power (signal power)",
    ]);
    for (set, instance) in reference_sets() {
        for &limit in mse_limits {
            let report = power_policy::solve_min_power(&instance, limit)?;
            for (k, (&h, &b)) in instance
                .channels()
                .gains()
                .iter()
                .zip(report.design.tx_gains())
                .enumerate()
            {
                table.push_row(vec![
                    set.to_string(),
                    num(limit),
                    (k + 1).to_string(),
                    num(h * h),
                    num(b),
                    num(b * b),
                ]);
            }
        }
    }
    Ok(table)
}

/// Receiver scaling of the min-power policy versus the MSE limit.
pub fn fig3() -> Result<Table> {
    let mut table = Table::new(&[
        "channel_set",
        "mse_limit (signal power)",
        "g_star (amplitude)",
    ]);
    let (lo, hi) = (0.1f64.ln(), 9.9f64.ln());
    for (set, instance) in reference_sets() {
        for i in 0..40u32 {
            let limit = (lo + (hi - lo) * i as f64 / 39.0).exp();
            let report = power_policy::solve_min_power(&instance, limit)?;
            table.push_row(vec![
                set.to_string(),
                num(limit),
                num(report.design.rx_gain()),
            ]);
        }
    }
    Ok(table)
}

/// Rayleigh-ensemble average MSE per sensor versus the sensor count, for the
/// sum-power policy (budget `10 K`) and the peak-power baseline (cap 10).
///
/// Both policies at the same (mean gain, sensor count) share a seed, hence
/// the same channel draws, which makes their gap a paired comparison.
pub fn fig4(sensor_counts: &[usize], mean_gains: &[f64], trials: u64, seed: u64) -> Result<Table> {
    let mut table = Table::new(&[
        "policy",
        "mean_power_gain (dimensionless)",
        "sensors",
        "trials",
        "normalized_mean_mse (signal power)",
        "std_error (signal power)",
    ]);
    for (gain_idx, &mean_gain) in mean_gains.iter().enumerate() {
        let model = FadingModel::rayleigh(mean_gain)?;
        for (count_idx, &sensors) in sensor_counts.iter().enumerate() {
            let combo_seed = seed.wrapping_add((gain_idx * 64 + count_idx + 1) as u64);
            for (name, policy) in [
                (
                    "sum_power",
                    EnsemblePolicy::SumPowerMse {
                        sum_power_per_sensor: FIG4_SUM_POWER_PER_SENSOR,
                    },
                ),
                (
                    "peak",
                    EnsemblePolicy::PeakMse {
                        peak_limit: FIG4_PEAK_LIMIT,
                    },
                ),
            ] {
                let spec = EnsembleSpec {
                    sensors,
                    trials,
                    policy,
                    seed: combo_seed,
                };
                let stats = ensemble_average(&spec, &model)?;
                table.push_row(vec![
                    name.to_string(),
                    num(mean_gain),
                    sensors.to_string(),
                    trials.to_string(),
                    num(stats.mean),
                    num(stats.std_error),
                ]);
            }
        }
    }
    Ok(table)
}
