//! Optimal transmitter/receiver scaling for over-the-air computation (AirComp).
//!
//! An AirComp system has `K` single-antenna sensors transmitting simultaneously
//! over a multiple-access channel to one receiver, which estimates the sum of
//! the sensors' signals from the noisy superposition. Each sensor applies a
//! Tx-scaling factor `b_k`, the receiver applies an Rx-scaling factor `g`, and
//! the quality of the estimate is the computation mean-squared error (MSE).
//!
//! This crate solves the two scaling-factor design problems in closed form:
//!
//! * [`mse_policy`] — minimize the computation MSE subject to a sum-power
//!   budget `sum(b_k^2) <= P`;
//! * [`power_policy`] — minimize the sum power subject to a computation-MSE
//!   limit `MSE <= eps`, via a scalar fixed-point root.
//!
//! Supporting modules:
//!
//! * [`model`] — domain types and exact evaluation of MSE, sum power, and the
//!   received superposition;
//! * [`oracle`] — independent numerical solvers (projected gradient, nested
//!   scalar search) used to validate the closed forms;
//! * [`peak_policy`] — the min-MSE design under per-sensor power caps, kept as
//!   a comparison baseline;
//! * [`simulator`] — signal-level Monte Carlo checks and Rayleigh-fading
//!   ensemble averages.

pub mod model;
pub mod mse_policy;
pub mod oracle;
pub mod peak_policy;
pub mod power_policy;
mod seeding;
pub mod simulator;

pub use model::{ChannelVector, MsePowerPoint, SystemInstance, TxRxDesign};

/// Errors shared by all solvers and evaluators in this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An instance and a design (or signal vector) disagree on the number of
    /// sensors.
    DimensionMismatch { expected: usize, actual: usize },
    /// A numeric argument violates its domain (non-finite, wrong sign, out of
    /// range).
    InvalidParameter {
        name: &'static str,
        detail: String,
    },
    /// An iterative solver failed to converge within its iteration budget.
    SolverFailure {
        context: &'static str,
        detail: String,
    },
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected} sensors, got {actual}")
            }
            Error::InvalidParameter { name, detail } => {
                write!(f, "invalid parameter `{name}`: {detail}")
            }
            Error::SolverFailure { context, detail } => {
                write!(f, "solver failure in {context}: {detail}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_param(name: &'static str, detail: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        detail: detail.into(),
    }
}
