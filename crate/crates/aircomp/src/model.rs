//! Domain types and exact evaluation of the AirComp signal model.
//!
//! The receiver output is `y = g * (sum_k h_k b_k x_k + n)` and the
//! computation MSE of estimating `sum_k x_k` from `y` is
//!
//! ```text
//! MSE = sum_k (g h_k b_k - 1)^2 + sigma^2 g^2
//! ```
//!
//! for zero-mean, unit-variance, mutually uncorrelated `x_k` independent of
//! the receiver noise `n ~ (0, sigma^2)`. The sum power spent by the sensors
//! is `PW = sum_k b_k^2`.
//!
//! Channel phases are assumed pre-compensated at the transmitters, so only
//! the magnitudes of `g`, `h_k`, `b_k` matter and all quantities here are
//! nonnegative reals. All values are immutable after construction and safe to
//! share across threads.

use crate::{invalid_param, Error, Result};

/// Ordered channel magnitudes `h_k` between each sensor and the receiver.
///
/// Every entry must be finite and strictly positive: a dead channel makes the
/// target sum unrecoverable, and the min-power policy needs `1/h_k^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    gains: Vec<f64>,
}

impl ChannelVector {
    pub fn new(gains: Vec<f64>) -> Result<Self> {
        if gains.is_empty() {
            return Err(invalid_param("channels", "need at least one sensor"));
        }
        for (k, &h) in gains.iter().enumerate() {
            if !h.is_finite() || h <= 0.0 {
                return Err(invalid_param(
                    "channels",
                    format!("h_{k} = {h} must be finite and > 0"),
                ));
            }
        }
        Ok(Self { gains })
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Number of sensors `K` (always >= 1).
    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn min_gain(&self) -> f64 {
        self.gains.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_gain(&self) -> f64 {
        self.gains.iter().copied().fold(0.0, f64::max)
    }
}

/// A physical problem instance: channels plus receiver noise variance.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemInstance {
    channels: ChannelVector,
    noise_variance: f64,
}

impl SystemInstance {
    pub fn new(channels: ChannelVector, noise_variance: f64) -> Result<Self> {
        if !noise_variance.is_finite() || noise_variance <= 0.0 {
            return Err(invalid_param(
                "noise_variance",
                format!("{noise_variance} must be finite and > 0"),
            ));
        }
        Ok(Self {
            channels,
            noise_variance,
        })
    }

    pub fn channels(&self) -> &ChannelVector {
        &self.channels
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn sensor_count(&self) -> usize {
        self.channels.len()
    }
}

/// A candidate solution: receiver scaling `g` and transmitter scalings `b_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TxRxDesign {
    rx_gain: f64,
    tx_gains: Vec<f64>,
}

impl TxRxDesign {
    pub fn new(rx_gain: f64, tx_gains: Vec<f64>) -> Result<Self> {
        if !rx_gain.is_finite() || rx_gain < 0.0 {
            return Err(invalid_param(
                "rx_gain",
                format!("{rx_gain} must be finite and >= 0"),
            ));
        }
        if tx_gains.is_empty() {
            return Err(invalid_param("tx_gains", "need at least one sensor"));
        }
        for (k, &b) in tx_gains.iter().enumerate() {
            if !b.is_finite() || b < 0.0 {
                return Err(invalid_param(
                    "tx_gains",
                    format!("b_{k} = {b} must be finite and >= 0"),
                ));
            }
        }
        Ok(Self { rx_gain, tx_gains })
    }

    /// The all-off design: `g = 0`, `b_k = 0` for `sensors` sensors.
    pub fn zero(sensors: usize) -> Self {
        Self {
            rx_gain: 0.0,
            tx_gains: vec![0.0; sensors],
        }
    }

    pub fn rx_gain(&self) -> f64 {
        self.rx_gain
    }

    pub fn tx_gains(&self) -> &[f64] {
        &self.tx_gains
    }

    pub fn sensor_count(&self) -> usize {
        self.tx_gains.len()
    }
}

/// An (MSE, sum power) objective pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsePowerPoint {
    pub mse: f64,
    pub sum_power: f64,
}

fn check_dims(instance: &SystemInstance, design: &TxRxDesign) -> Result<()> {
    if instance.sensor_count() != design.sensor_count() {
        return Err(Error::DimensionMismatch {
            expected: instance.sensor_count(),
            actual: design.sensor_count(),
        });
    }
    Ok(())
}

/// Exact computation MSE of a design on an instance.
///
/// `MSE = sum_k (g h_k b_k - 1)^2 + sigma^2 g^2`; equals `K` for the all-off
/// design.
pub fn mse(instance: &SystemInstance, design: &TxRxDesign) -> Result<f64> {
    check_dims(instance, design)?;
    let g = design.rx_gain();
    let misalignment: f64 = instance
        .channels()
        .gains()
        .iter()
        .zip(design.tx_gains())
        .map(|(&h, &b)| {
            let d = g * h * b - 1.0;
            d * d
        })
        .sum();
    Ok(misalignment + instance.noise_variance() * g * g)
}

/// Total transmit power `sum_k b_k^2` of a design.
pub fn sum_power(design: &TxRxDesign) -> f64 {
    design.tx_gains().iter().map(|&b| b * b).sum()
}

/// One receiver output sample `y = g * (sum_k h_k b_k x_k + n)`.
///
/// Used by the simulator to estimate the MSE empirically from signal draws.
pub fn received_output(
    instance: &SystemInstance,
    design: &TxRxDesign,
    signals: &[f64],
    noise_sample: f64,
) -> Result<f64> {
    check_dims(instance, design)?;
    if signals.len() != instance.sensor_count() {
        return Err(Error::DimensionMismatch {
            expected: instance.sensor_count(),
            actual: signals.len(),
        });
    }
    let superposition: f64 = instance
        .channels()
        .gains()
        .iter()
        .zip(design.tx_gains())
        .zip(signals)
        .map(|((&h, &b), &x)| h * b * x)
        .sum();
    Ok(design.rx_gain() * (superposition + noise_sample))
}
