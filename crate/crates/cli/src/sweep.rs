//! Parameter sweeps: independent runs over one axis, executed in
//! parallel, results in input order. Per-run failures are recorded and
//! the sweep continues.

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::runner::{run, RunOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Sets the coupling strength K.
    Coupling,
    /// Multiplies every inertia (equivalently the ratio γ) by the value.
    GammaScale,
    /// Sets every off-diagonal frustration angle.
    Frustration,
    /// Sets the seed (value must be a nonnegative integer).
    Seed,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axis::Coupling => "coupling",
            Axis::GammaScale => "gamma-scale",
            Axis::Frustration => "frustration",
            Axis::Seed => "seed",
        };
        f.write_str(name)
    }
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}{ext}"))
}

/// Derives the member configuration for one axis value.
pub fn apply_axis(
    base: &ExperimentConfig,
    axis: Axis,
    value: f64,
) -> Result<ExperimentConfig, HarnessError> {
    let mut config = base.clone();
    match axis {
        Axis::Coupling => {
            if let Some(inline) = &mut config.network.inline {
                inline.coupling = value;
            }
            if let Some(random) = &mut config.network.random {
                random.coupling = value;
            }
        }
        Axis::GammaScale => {
            if !(value > 0.0 && value.is_finite()) {
                return Err(HarnessError::Invalid(format!(
                    "gamma-scale values must be positive, got {value}"
                )));
            }
            if let Some(inline) = &mut config.network.inline {
                for m in &mut inline.inertia {
                    *m *= value;
                }
            }
            if let Some(random) = &mut config.network.random {
                random.gamma *= value;
            }
        }
        Axis::Frustration => {
            if let Some(inline) = &mut config.network.inline {
                let n = inline.frustration.len();
                for (i, row) in inline.frustration.iter_mut().enumerate() {
                    for (k, entry) in row.iter_mut().enumerate().take(n) {
                        if i != k {
                            *entry = value;
                        }
                    }
                }
            }
            if let Some(random) = &mut config.network.random {
                random.frustration = value;
            }
        }
        Axis::Seed => {
            if value < 0.0 || value.fract() != 0.0 {
                return Err(HarnessError::Invalid(format!(
                    "seed values must be nonnegative integers, got {value}"
                )));
            }
            config.seed = value as u64;
        }
    }
    let suffix = format!("{axis}-{value}");
    config.outputs.timeseries = suffixed(&base.outputs.timeseries, &suffix);
    config.outputs.report = suffixed(&base.outputs.report, &suffix);
    Ok(config)
}

/// Runs every axis value concurrently; the result vector is ordered like
/// the input values.
pub fn sweep(
    base: &ExperimentConfig,
    axis: Axis,
    values: &[f64],
) -> Vec<Result<RunOutcome, HarnessError>> {
    values
        .par_iter()
        .map(|&value| apply_axis(base, axis, value).and_then(|config| run(&config)))
        .collect()
}
