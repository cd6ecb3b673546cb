//! Command-line experiment harness for the AirComp solvers.
//!
//! Subcommands solve single instances from flags (`solve-mse`, `solve-power`,
//! `baseline-peak`), run fading-ensemble averages (`simulate`), and emit
//! figure data (`fig`). Every run prints its CSV to stdout and, when `--out`
//! is given, writes the CSV plus a plain-text manifest that reconstructs the
//! run. Same seed, same CSV bytes, regardless of worker count.

pub mod figures;
pub mod manifest;
pub mod table;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use aircomp::model::{ChannelVector, SystemInstance};
use aircomp::peak_policy::{solve_min_mse_peak, PeakConstraint};
use aircomp::simulator::{ensemble_average, EnsemblePolicy, EnsembleSpec, FadingModel};
use aircomp::{mse_policy, power_policy};

use manifest::RunManifest;
use table::{num, Table};

#[derive(Debug, Parser)]
#[command(name = "aircomp", version, about = "AirComp scaling-factor design and experiments")]
pub struct Cli {
    /// Master seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Directory for CSV and manifest output (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Monte Carlo trials for `simulate` and `fig --which 4`.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub trials: u64,

    /// Suppress the CSV echo on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize the computation MSE under a sum-power budget.
    SolveMse {
        /// Channel magnitudes h_k, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        channels: Vec<f64>,
        /// Sum-power budget P.
        #[arg(long)]
        sum_power: f64,
        /// Receiver noise variance.
        #[arg(long)]
        noise_var: f64,
    },
    /// Minimize the sum power under a computation-MSE limit.
    SolvePower {
        /// Channel magnitudes h_k, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        channels: Vec<f64>,
        /// Computation-MSE limit.
        #[arg(long)]
        mse_limit: f64,
        /// Receiver noise variance.
        #[arg(long)]
        noise_var: f64,
    },
    /// Minimize the computation MSE under per-sensor power caps.
    BaselinePeak {
        /// Channel magnitudes h_k, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        channels: Vec<f64>,
        /// Per-sensor power cap.
        #[arg(long)]
        peak_power: f64,
        /// Receiver noise variance.
        #[arg(long)]
        noise_var: f64,
    },
    /// Average a policy over Rayleigh channel draws (noise variance 1).
    Simulate {
        #[arg(long, value_enum)]
        policy: PolicyArg,
        /// Number of sensors per trial.
        #[arg(long)]
        sensors: usize,
        /// Mean channel-power gain of the fading model.
        #[arg(long, default_value_t = 1.0)]
        mean_gain: f64,
        /// Sum-power budget per sensor (policy sum-power-mse).
        #[arg(long)]
        power_per_sensor: Option<f64>,
        /// MSE limit per sensor (policy sum-power-pw).
        #[arg(long)]
        mse_per_sensor: Option<f64>,
        /// Per-sensor power cap (policy peak-mse).
        #[arg(long)]
        peak_limit: Option<f64>,
    },
    /// Emit figure data for the reference channel sets.
    Fig {
        /// Which figure: 1 frontier, 2 transmit profiles, 3 receiver gain,
        /// 4 fading-ensemble comparison.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        /// MSE limits for figure 2 (default 1,3,5,7).
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Mean channel-power gains for figure 4 (default 0.5,1).
        #[arg(long, value_delimiter = ',')]
        mean_gains: Option<Vec<f64>>,
        /// Sensor counts for figure 4 (default 5,10,15,20,25,30).
        #[arg(long, value_delimiter = ',')]
        sensor_counts: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    SumPowerMse,
    SumPowerPw,
    PeakMse,
}

impl PolicyArg {
    fn as_str(&self) -> &'static str {
        match self {
            PolicyArg::SumPowerMse => "sum_power_mse",
            PolicyArg::SumPowerPw => "sum_power_pw",
            PolicyArg::PeakMse => "peak_mse",
        }
    }
}

/// Failures split by exit code: usage errors exit 2, runtime failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Failure(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<aircomp::Error> for CliError {
    fn from(err: aircomp::Error) -> Self {
        CliError::Failure(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {err}"))
    }
}

fn parse_instance(channels: &[f64], noise_var: f64) -> Result<SystemInstance, CliError> {
    let vector = ChannelVector::new(channels.to_vec())?;
    Ok(SystemInstance::new(vector, noise_var)?)
}

fn join_list<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn solve_mse_table(instance: &SystemInstance, budget: f64) -> Result<Table, CliError> {
    let report = mse_policy::solve_min_mse(instance, budget)?;
    let mut table = Table::new(&[
        "sensor",
        "h_k (amplitude)",
        "b_k (amplitude)",
        "b_k_power (signal power)",
        "g_star (amplitude)",
        "mse_star (signal power)",
        "sum_power (signal power)",
    ]);
    for (k, (&h, &b)) in instance
        .channels()
        .gains()
        .iter()
        .zip(report.design.tx_gains())
        .enumerate()
    {
        table.push_row(vec![
            (k + 1).to_string(),
            num(h),
            num(b),
            num(b * b),
            num(report.design.rx_gain()),
            num(report.mse_star),
            num(report.power_used),
        ]);
    }
    Ok(table)
}

fn solve_power_table(instance: &SystemInstance, mse_limit: f64) -> Result<Table, CliError> {
    let report = power_policy::solve_min_power(instance, mse_limit)?;
    let mut table = Table::new(&[
        "sensor",
        "h_k (amplitude)",
        "b_k (amplitude)",
        "tau_k (dimensionless)",
        "g_star (amplitude)",
        "m_value (dimensionless)",
        "kkt_multiplier (dimensionless)",
        "pw_star (signal power)",
        "note",
    ]);
    let note = if report.diagnostics.is_none() {
        "trivial: mse limit >= sensor count, all-off design"
    } else {
        ""
    };
    for (k, (&h, &b)) in instance
        .channels()
        .gains()
        .iter()
        .zip(report.design.tx_gains())
        .enumerate()
    {
        let (tau, m_value, multiplier) = match &report.diagnostics {
            Some(diag) => (
                num(diag.taus[k]),
                num(diag.m_value),
                num(diag.kkt_multiplier),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        table.push_row(vec![
            (k + 1).to_string(),
            num(h),
            num(b),
            tau,
            num(report.design.rx_gain()),
            m_value,
            multiplier,
            num(report.pw_star),
            note.to_string(),
        ]);
    }
    Ok(table)
}

fn baseline_peak_table(instance: &SystemInstance, peak_power: f64) -> Result<Table, CliError> {
    let constraint = PeakConstraint::new(peak_power)?;
    let solution = solve_min_mse_peak(instance, &constraint)?;
    let mut table = Table::new(&[
        "sensor",
        "h_k (amplitude)",
        "b_k (amplitude)",
        "b_k_power (signal power)",
        "g_star (amplitude)",
        "mse (signal power)",
        "sum_power (signal power)",
        "peak_limit (signal power)",
    ]);
    for (k, (&h, &b)) in instance
        .channels()
        .gains()
        .iter()
        .zip(solution.design.tx_gains())
        .enumerate()
    {
        table.push_row(vec![
            (k + 1).to_string(),
            num(h),
            num(b),
            num(b * b),
            num(solution.design.rx_gain()),
            num(solution.point.mse),
            num(solution.point.sum_power),
            num(peak_power),
        ]);
    }
    Ok(table)
}

/// Runs one subcommand: prints the CSV (unless `--quiet`) and writes the CSV
/// plus its manifest when `--out` is set.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let (name, table, run_manifest) = build(cli)?;
    if !cli.quiet {
        print!("{}", table.render());
    }
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{name}.csv"));
        fs::write(&csv_path, table.render())?;
        let manifest_path = dir.join(format!("{name}.manifest.txt"));
        fs::write(&manifest_path, run_manifest.render(&csv_path, started.elapsed()))?;
    }
    Ok(())
}

fn build(cli: &Cli) -> Result<(String, Table, RunManifest), CliError> {
    match &cli.command {
        Command::SolveMse {
            channels,
            sum_power,
            noise_var,
        } => {
            let instance = parse_instance(channels, *noise_var)?;
            let table = solve_mse_table(&instance, *sum_power)?;
            let mut m = RunManifest::new("solve-mse", cli.seed);
            m.param("channels", join_list(channels))
                .param("sum_power", sum_power)
                .param("noise_var", noise_var);
            Ok(("solve_mse".to_string(), table, m))
        }
        Command::SolvePower {
            channels,
            mse_limit,
            noise_var,
        } => {
            let instance = parse_instance(channels, *noise_var)?;
            let table = solve_power_table(&instance, *mse_limit)?;
            let mut m = RunManifest::new("solve-power", cli.seed);
            m.param("channels", join_list(channels))
                .param("mse_limit", mse_limit)
                .param("noise_var", noise_var);
            Ok(("solve_power".to_string(), table, m))
        }
        Command::BaselinePeak {
            channels,
            peak_power,
            noise_var,
        } => {
            let instance = parse_instance(channels, *noise_var)?;
            let table = baseline_peak_table(&instance, *peak_power)?;
            let mut m = RunManifest::new("baseline-peak", cli.seed);
            m.param("channels", join_list(channels))
                .param("peak_power", peak_power)
                .param("noise_var", noise_var);
            Ok(("baseline_peak".to_string(), table, m))
        }
        Command::Simulate {
            policy,
            sensors,
            mean_gain,
            power_per_sensor,
            mse_per_sensor,
            peak_limit,
        } => {
            let (ensemble_policy, limit) = match policy {
                PolicyArg::SumPowerMse => {
                    let value = power_per_sensor.ok_or_else(|| {
                        CliError::Usage(
                            "--power-per-sensor is required for policy sum-power-mse".to_string(),
                        )
                    })?;
                    (EnsemblePolicy::SumPowerMse { sum_power_per_sensor: value }, value)
                }
                PolicyArg::SumPowerPw => {
                    let value = mse_per_sensor.ok_or_else(|| {
                        CliError::Usage(
                            "--mse-per-sensor is required for policy sum-power-pw".to_string(),
                        )
                    })?;
                    (EnsemblePolicy::SumPowerPw { mse_limit_per_sensor: value }, value)
                }
                PolicyArg::PeakMse => {
                    let value = peak_limit.ok_or_else(|| {
                        CliError::Usage("--peak-limit is required for policy peak-mse".to_string())
                    })?;
                    (EnsemblePolicy::PeakMse { peak_limit: value }, value)
                }
            };
            let fading = FadingModel::rayleigh(*mean_gain)?;
            let spec = EnsembleSpec {
                sensors: *sensors,
                trials: cli.trials,
                policy: ensemble_policy,
                seed: cli.seed,
            };
            let stats = ensemble_average(&spec, &fading)?;
            let mut table = Table::new(&[
                "policy",
                "sensors",
                "trials",
                "mean_power_gain (dimensionless)",
                "limit (signal power)",
                "normalized_mean (signal power)",
                "std_error (signal power)",
            ]);
            table.push_row(vec![
                policy.as_str().to_string(),
                sensors.to_string(),
                cli.trials.to_string(),
                num(*mean_gain),
                num(limit),
                num(stats.mean),
                num(stats.std_error),
            ]);
            let mut m = RunManifest::new("simulate", cli.seed);
            m.param("policy", policy.as_str())
                .param("sensors", sensors)
                .param("trials", cli.trials)
                .param("mean_gain", mean_gain)
                .param("limit", limit)
                .param("noise_var", 1.0);
            Ok(("simulate".to_string(), table, m))
        }
        Command::Fig {
            which,
            eps,
            mean_gains,
            sensor_counts,
        } => {
            let mut m = RunManifest::new("fig", cli.seed);
            m.param("which", which)
                .param("channel_set.S1", join_list(&figures::S1_POWER_GAINS))
                .param("channel_set.S2", join_list(&figures::S2_POWER_GAINS))
                .param("noise_var", 1.0);
            let table = match which {
                1 => {
                    m.param("budget_sweep", "10^((i-20)/10), i=0..40")
                        .param("mse_limit_sweep", "0.5..9.5 step 0.5");
                    figures::fig1()?
                }
                2 => {
                    let limits = eps
                        .clone()
                        .unwrap_or_else(|| figures::FIG2_DEFAULT_MSE_LIMITS.to_vec());
                    m.param("mse_limits", join_list(&limits));
                    figures::fig2(&limits)?
                }
                3 => {
                    m.param("mse_limit_sweep", "40 log-spaced in [0.1, 9.9]");
                    figures::fig3()?
                }
                4 => {
                    let counts = sensor_counts
                        .clone()
                        .unwrap_or_else(|| figures::FIG4_DEFAULT_SENSOR_COUNTS.to_vec());
                    let gains = mean_gains
                        .clone()
                        .unwrap_or_else(|| figures::FIG4_DEFAULT_MEAN_GAINS.to_vec());
                    m.param("sensor_counts", join_list(&counts))
                        .param("mean_gains", join_list(&gains))
                        .param("trials", cli.trials)
                        .param("sum_power_per_sensor", figures::FIG4_SUM_POWER_PER_SENSOR)
                        .param("peak_limit", figures::FIG4_PEAK_LIMIT);
                    figures::fig4(&counts, &gains, cli.trials, cli.seed)?
                }
                _ => unreachable!("clap bounds which to 1..=4"),
            };
            Ok((format!("fig{which}"), table, m))
        }
    }
}
