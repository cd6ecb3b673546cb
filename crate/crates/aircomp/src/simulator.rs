//! Signal-level Monte Carlo checks and fading-ensemble experiments.
//!
//! Two jobs live here: estimating the computation MSE of a fixed design by
//! sampling the received superposition (a statistical check of the analytic
//! MSE expression), and averaging the optimal policies over i.i.d. Rayleigh
//! channel draws, normalized per sensor.
//!
//! Every trial or sample draws from its own RNG substream derived from
//! `(seed, index)`, and aggregation reduces the per-index values in index
//! order with pairwise summation, so results are bit-identical no matter how
//! many workers rayon schedules.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::model::{self, ChannelVector, SystemInstance, TxRxDesign};
use crate::seeding::{substream_rng, substream_seed};
use crate::{invalid_param, mse_policy, peak_policy, power_policy, Result};

/// Magnitude distribution of the fading channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingKind {
    Rayleigh,
}

/// A fading-channel model with mean power gain `mu = E[h^2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingModel {
    kind: FadingKind,
    mean_power_gain: f64,
}

impl FadingModel {
    pub fn rayleigh(mean_power_gain: f64) -> Result<Self> {
        if !mean_power_gain.is_finite() || mean_power_gain <= 0.0 {
            return Err(invalid_param(
                "mean_power_gain",
                format!("{mean_power_gain} must be finite and > 0"),
            ));
        }
        Ok(Self {
            kind: FadingKind::Rayleigh,
            mean_power_gain,
        })
    }

    pub fn kind(&self) -> FadingKind {
        self.kind
    }

    pub fn mean_power_gain(&self) -> f64 {
        self.mean_power_gain
    }
}

/// Mean of a set of per-trial values plus its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateStats {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Which per-trial policy an ensemble run applies, with its limit.
///
/// Limits are per sensor where the §-style sweeps scale them with `K`: the
/// sum-power budget becomes `K * sum_power_per_sensor` and the MSE limit
/// `K * mse_limit_per_sensor`; the peak limit applies to each sensor as is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnsemblePolicy {
    /// Minimum MSE under the scaled sum-power budget; averages `MSE*/K`.
    SumPowerMse { sum_power_per_sensor: f64 },
    /// Minimum sum power under the scaled MSE limit; averages `PW*/K`.
    SumPowerPw { mse_limit_per_sensor: f64 },
    /// Minimum MSE under per-sensor caps; averages `MSE/K`.
    PeakMse { peak_limit: f64 },
}

impl EnsemblePolicy {
    fn limit(&self) -> (&'static str, f64) {
        match *self {
            EnsemblePolicy::SumPowerMse { sum_power_per_sensor } => {
                ("sum_power_per_sensor", sum_power_per_sensor)
            }
            EnsemblePolicy::SumPowerPw { mse_limit_per_sensor } => {
                ("mse_limit_per_sensor", mse_limit_per_sensor)
            }
            EnsemblePolicy::PeakMse { peak_limit } => ("peak_limit", peak_limit),
        }
    }
}

/// Description of one fading-ensemble run.
///
/// The receiver noise variance is fixed at 1; the mean channel power gain of
/// the [`FadingModel`] sets the operating SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub sensors: usize,
    pub trials: u64,
    pub policy: EnsemblePolicy,
    pub seed: u64,
}

/// Draws `K` i.i.d. Rayleigh channel magnitudes with `E[h^2]` equal to the
/// model's mean power gain: `h = sqrt(mu/2) * sqrt(u1^2 + u2^2)` for standard
/// Gaussians `u1, u2`. Deterministic per seed.
pub fn sample_channels(model: &FadingModel, sensors: usize, seed: u64) -> ChannelVector {
    assert!(sensors >= 1, "need at least one sensor");
    let FadingKind::Rayleigh = model.kind();
    let scale = (model.mean_power_gain() / 2.0).sqrt();
    let mut rng = substream_rng(seed, 0);
    let mut gains = Vec::with_capacity(sensors);
    while gains.len() < sensors {
        let u1: f64 = rng.sample(StandardNormal);
        let u2: f64 = rng.sample(StandardNormal);
        let h = scale * (u1 * u1 + u2 * u2).sqrt();
        // A zero draw (both Gaussians exactly zero) would break the h > 0
        // invariant; redraw instead.
        if h > 0.0 {
            gains.push(h);
        }
    }
    ChannelVector::new(gains).expect("Rayleigh draws are positive and finite")
}

/// Sum of a slice in a fixed order-independent-of-scheduling way.
fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn aggregate(values: &[f64]) -> AggregateStats {
    let n = values.len();
    let mean = pairwise_sum(values) / n as f64;
    let std_error = if n >= 2 {
        let centered: Vec<f64> = values.iter().map(|&v| (v - mean) * (v - mean)).collect();
        let variance = pairwise_sum(&centered) / (n - 1) as f64;
        (variance / n as f64).sqrt()
    } else {
        0.0
    };
    AggregateStats {
        mean,
        std_error,
        trials: n as u64,
    }
}

/// Estimates the computation MSE of `design` on `instance` by Monte Carlo:
/// each sample draws i.i.d. standard Gaussian sensor signals and Gaussian
/// receiver noise, forms the receiver output, and squares its error against
/// the true sum. The mean converges to [`model::mse`].
pub fn empirical_mse(
    instance: &SystemInstance,
    design: &TxRxDesign,
    samples: u64,
    seed: u64,
) -> Result<AggregateStats> {
    if samples == 0 {
        return Err(invalid_param("samples", "need at least one sample"));
    }
    // Surface dimension mismatches before spawning work.
    model::mse(instance, design)?;

    let sigma = instance.noise_variance().sqrt();
    let sensors = instance.sensor_count();
    let errors: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream_rng(seed, i);
            let signals: Vec<f64> = (0..sensors).map(|_| rng.sample(StandardNormal)).collect();
            let noise: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
            let output = model::received_output(instance, design, &signals, noise)
                .expect("dimensions checked above");
            let target: f64 = signals.iter().sum();
            let err = output - target;
            err * err
        })
        .collect();
    Ok(aggregate(&errors))
}

/// Averages the selected policy's objective over random channel draws,
/// normalized per sensor. Deterministic per seed and worker count.
pub fn ensemble_average(spec: &EnsembleSpec, model: &FadingModel) -> Result<AggregateStats> {
    if spec.sensors == 0 {
        return Err(invalid_param("sensors", "need at least one sensor"));
    }
    if spec.trials == 0 {
        return Err(invalid_param("trials", "need at least one trial"));
    }
    let (limit_name, limit) = spec.policy.limit();
    if !limit.is_finite() || limit <= 0.0 {
        return Err(invalid_param(
            "policy",
            format!("{limit_name} = {limit} must be finite and > 0"),
        ));
    }

    let sensors = spec.sensors;
    let noise_variance = 1.0;
    let values: Vec<f64> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| -> Result<f64> {
            let channels = sample_channels(model, sensors, substream_seed(spec.seed, trial));
            let instance = SystemInstance::new(channels, noise_variance)?;
            let objective = match spec.policy {
                EnsemblePolicy::SumPowerMse { sum_power_per_sensor } => {
                    let budget = sensors as f64 * sum_power_per_sensor;
                    let report = mse_policy::solve_min_mse(&instance, budget)?;
                    assert!(
                        report.power_used <= budget * (1.0 + 1e-9),
                        "budget violated in trial {trial}"
                    );
                    report.mse_star
                }
                EnsemblePolicy::SumPowerPw { mse_limit_per_sensor } => {
                    let limit = sensors as f64 * mse_limit_per_sensor;
                    let report = power_policy::solve_min_power(&instance, limit)?;
                    let achieved = model::mse(&instance, &report.design)?;
                    assert!(
                        achieved <= limit + 1e-8 * limit.max(1.0),
                        "MSE limit violated in trial {trial}: {achieved} > {limit}"
                    );
                    report.pw_star
                }
                EnsemblePolicy::PeakMse { peak_limit } => {
                    let constraint = peak_policy::PeakConstraint::new(peak_limit)?;
                    let solution = peak_policy::solve_min_mse_peak(&instance, &constraint)?;
                    assert!(
                        solution
                            .design
                            .tx_gains()
                            .iter()
                            .all(|&b| b * b <= peak_limit * (1.0 + 1e-12)),
                        "peak cap violated in trial {trial}"
                    );
                    solution.point.mse
                }
            };
            Ok(objective / sensors as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(aggregate(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::mse;

    fn instance(gains: &[f64], noise_variance: f64) -> SystemInstance {
        SystemInstance::new(ChannelVector::new(gains.to_vec()).unwrap(), noise_variance).unwrap()
    }

    #[test]
    fn rayleigh_mean_power_matches_model() {
        for (mu, tol) in [(1.0, 0.01), (0.5, 0.005)] {
            let model = FadingModel::rayleigh(mu).unwrap();
            let draws = 1_000_000usize;
            let channels = sample_channels(&model, draws, 99);
            let mean_power: f64 =
                channels.gains().iter().map(|&h| h * h).sum::<f64>() / draws as f64;
            assert!(
                (mean_power - mu).abs() < tol,
                "mu {mu}: sample mean {mean_power}"
            );
        }
    }

    #[test]
    fn sample_channels_is_deterministic() {
        let model = FadingModel::rayleigh(1.0).unwrap();
        let a = sample_channels(&model, 10, 1234);
        let b = sample_channels(&model, 10, 1234);
        assert_eq!(a, b);
        let c = sample_channels(&model, 10, 1235);
        assert_ne!(a, c);
    }

    #[test]
    fn empirical_mse_noise_only_design() {
        // b_k = 1/h_k, g = 1 leaves only the noise term sigma^2.
        let inst = instance(&[0.5, 1.0, 2.0], 0.25);
        let design = TxRxDesign::new(1.0, vec![2.0, 1.0, 0.5]).unwrap();
        let stats = empirical_mse(&inst, &design, 100_000, 7).unwrap();
        assert!(
            (stats.mean - 0.25).abs() <= 4.0 * stats.std_error,
            "mean {} se {}",
            stats.mean,
            stats.std_error
        );
    }

    #[test]
    fn empirical_mse_all_off_design() {
        let inst = instance(&[1.0; 10], 1.0);
        let design = TxRxDesign::zero(10);
        let stats = empirical_mse(&inst, &design, 100_000, 11).unwrap();
        assert!((stats.mean - 10.0).abs() <= 4.0 * stats.std_error);
        assert_eq!(mse(&inst, &design).unwrap(), 10.0);
    }

    #[test]
    fn empirical_mse_is_deterministic_across_worker_counts() {
        let inst = instance(&[0.8, 1.2], 0.5);
        let design = TxRxDesign::new(0.9, vec![1.0, 0.7]).unwrap();
        let default_pool = empirical_mse(&inst, &design, 20_000, 3).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| empirical_mse(&inst, &design, 20_000, 3).unwrap());
        assert_eq!(default_pool, single);
    }

    #[test]
    fn ensemble_average_is_deterministic_across_worker_counts() {
        let model = FadingModel::rayleigh(1.0).unwrap();
        let spec = EnsembleSpec {
            sensors: 5,
            trials: 2_000,
            policy: EnsemblePolicy::SumPowerMse { sum_power_per_sensor: 10.0 },
            seed: 21,
        };
        let a = ensemble_average(&spec, &model).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(2)
            .build()
            .unwrap()
            .install(|| ensemble_average(&spec, &model).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn ensemble_rejects_bad_specs() {
        let model = FadingModel::rayleigh(1.0).unwrap();
        let spec = EnsembleSpec {
            sensors: 5,
            trials: 10,
            policy: EnsemblePolicy::SumPowerPw { mse_limit_per_sensor: 0.0 },
            seed: 0,
        };
        assert!(ensemble_average(&spec, &model).is_err());
        let spec2 = EnsembleSpec { trials: 0, ..spec };
        assert!(ensemble_average(&spec2, &model).is_err());
        assert!(FadingModel::rayleigh(0.0).is_err());
    }

    #[test]
    fn ensemble_policies_run_end_to_end() {
        let model = FadingModel::rayleigh(1.0).unwrap();
        for policy in [
            EnsemblePolicy::SumPowerMse { sum_power_per_sensor: 10.0 },
            EnsemblePolicy::SumPowerPw { mse_limit_per_sensor: 0.2 },
            EnsemblePolicy::PeakMse { peak_limit: 10.0 },
        ] {
            let spec = EnsembleSpec {
                sensors: 4,
                trials: 200,
                policy,
                seed: 5,
            };
            let stats = ensemble_average(&spec, &model).unwrap();
            assert!(stats.mean > 0.0 && stats.std_error >= 0.0);
            assert_eq!(stats.trials, 200);
        }
    }
}
