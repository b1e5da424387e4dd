use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kurasync_cli::config::{DtSpec, ExperimentConfig};
use kurasync_cli::{certify_only, parse_config, run, scenario, sweep, Axis, HarnessError};

/// Simulator and synchronization certifier for second-order Kuramoto
/// networks with inertia and frustration.
#[derive(Parser)]
#[command(name = "kurasync", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    Coupling,
    GammaScale,
    Frustration,
    Seed,
}

impl From<AxisArg> for Axis {
    fn from(axis: AxisArg) -> Self {
        match axis {
            AxisArg::Coupling => Axis::Coupling,
            AxisArg::GammaScale => Axis::GammaScale,
            AxisArg::Frustration => Axis::Frustration,
            AxisArg::Seed => Axis::Seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a config file.
    Run {
        config: PathBuf,
        /// Override the integration step.
        #[arg(long)]
        dt: Option<f64>,
        /// Override the integration horizon.
        #[arg(long)]
        horizon: Option<f64>,
        /// Override the seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the bundled four-oscillator reference scenario.
    ReproPaper {
        /// Directory receiving timeseries.csv and report.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run one experiment per value of a swept parameter.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        axis: AxisArg,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate constants and the certificate only; no simulation.
    Certify {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.clone(),
        source,
    })?;
    parse_config(&text)
}

fn apply_overrides(
    config: &mut ExperimentConfig,
    dt: Option<f64>,
    horizon: Option<f64>,
    seed: Option<u64>,
) {
    if let Some(dt) = dt {
        config.integration.dt = DtSpec::Fixed(dt);
    }
    if let Some(horizon) = horizon {
        config.integration.horizon = horizon;
    }
    if let Some(seed) = seed {
        config.seed = seed;
    }
}

const EXIT_OK: u8 = 0;
const EXIT_HARD_ERROR: u8 = 1;
const EXIT_CERTIFICATE_FAILED: u8 = 2;

fn finish(outcome: Result<kurasync_cli::runner::RunOutcome, HarnessError>) -> u8 {
    match outcome {
        Ok(outcome) => {
            println!("{}", outcome.report.digest());
            if outcome.certificate_ok {
                EXIT_OK
            } else {
                println!("certificate verdict: FAIL (exit 2)");
                EXIT_CERTIFICATE_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_HARD_ERROR
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            config,
            dt,
            horizon,
            seed,
        } => match load_config(&config) {
            Ok(mut config) => {
                apply_overrides(&mut config, dt, horizon, seed);
                finish(run(&config))
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_HARD_ERROR
            }
        },
        Command::ReproPaper {
            out,
            dt,
            horizon,
            seed,
        } => {
            let mut config = scenario::reference_config(&out);
            apply_overrides(&mut config, dt, horizon, seed);
            finish(run(&config))
        }
        Command::Sweep {
            config,
            axis,
            values,
            dt,
            horizon,
            seed,
        } => match load_config(&config) {
            Ok(mut config) => {
                apply_overrides(&mut config, dt, horizon, seed);
                let results = sweep(&config, axis.into(), &values);
                let mut any_hard_error = false;
                let mut any_certificate_failure = false;
                for (value, result) in values.iter().zip(results) {
                    println!("=== {} = {value} ===", Axis::from(axis));
                    match result {
                        Ok(outcome) => {
                            println!("{}", outcome.report.digest());
                            any_certificate_failure |= !outcome.certificate_ok;
                        }
                        Err(e) => {
                            eprintln!("error: {e}");
                            any_hard_error = true;
                        }
                    }
                }
                if any_hard_error {
                    EXIT_HARD_ERROR
                } else if any_certificate_failure {
                    EXIT_CERTIFICATE_FAILED
                } else {
                    EXIT_OK
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_HARD_ERROR
            }
        },
        Command::Certify { config, seed } => match load_config(&config) {
            Ok(mut config) => {
                apply_overrides(&mut config, None, None, seed);
                finish(certify_only(&config))
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_HARD_ERROR
            }
        },
    };
    ExitCode::from(code)
}
