//! Experiment configuration: a strict TOML schema with every default
//! materialized into the echoed copy embedded in reports.
//!
//! Exactly one of `network.inline` / `network.random` and one of
//! `initial.inline` / `initial.random` must be present. Unknown keys are
//! rejected.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::HarnessError;

/// Default grid resolution per axis for certificate parameter search.
pub const SEARCH_GRID_RESOLUTION: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for every random draw in the run.
    #[serde(default)]
    pub seed: u64,
    pub network: NetworkSource,
    pub initial: InitialSource,
    pub integration: Integration,
    #[serde(default)]
    pub certificate: CertificateSpec,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<InlineNetwork>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomNetwork>,
}

/// Fully spelled-out instance matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineNetwork {
    pub inertia: Vec<f64>,
    pub damping: Vec<f64>,
    pub natural_frequency: Vec<f64>,
    pub coupling: f64,
    pub weights: Vec<Vec<f64>>,
    pub frustration: Vec<Vec<f64>>,
}

/// Seeded random instance specification. Inertias follow the dampings
/// through the uniform ratio: `m_i = gamma * d_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomNetwork {
    pub n: usize,
    pub coupling: f64,
    pub gamma: f64,
    pub damping_range: [f64; 2],
    pub natural_frequency_range: [f64; 2],
    /// Uniform off-diagonal frustration angle; the diagonal stays 0.
    pub frustration: f64,
    pub weights: WeightPattern,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "pattern", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightPattern {
    /// Unit weight on every ordered pair (diagonal included; it is
    /// dynamically inert).
    AllToAll,
    /// Unit weight on each off-diagonal ordered pair independently with
    /// the given probability.
    Random { edge_probability: f64 },
    /// Explicit 0/1 mask, row i listing the in-edges of oscillator i.
    Mask { mask: Vec<Vec<u8>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<InlineInitial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomInitial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineInitial {
    pub phase: Vec<f64>,
    pub frequency: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomInitial {
    pub phase_range: [f64; 2],
    pub frequency_range: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Integration {
    /// Fixed step, or `"auto"` for γ/10 (min inertia/damping ratio over
    /// 10 when γ is not uniform).
    #[serde(default)]
    pub dt: DtSpec,
    pub horizon: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtSpec {
    Auto,
    Fixed(f64),
}

impl Default for DtSpec {
    fn default() -> Self {
        DtSpec::Auto
    }
}

impl Serialize for DtSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            DtSpec::Auto => serializer.serialize_str("auto"),
            DtSpec::Fixed(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for DtSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) if s == "auto" => Ok(DtSpec::Auto),
            Repr::Text(s) => Err(serde::de::Error::custom(format!(
                "dt must be a number or \"auto\", got \"{s}\""
            ))),
            Repr::Number(v) => Ok(DtSpec::Fixed(v)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CertificateSpec {
    /// Grid-search β and D∞ for the largest certified rate.
    Search,
    Explicit { beta: f64, d_infty: f64 },
}

impl Default for CertificateSpec {
    fn default() -> Self {
        CertificateSpec::Search
    }
}

impl Serialize for CertificateSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            CertificateSpec::Search => serializer.serialize_str("search"),
            CertificateSpec::Explicit { beta, d_infty } => {
                use serde::ser::SerializeStruct;
                let mut s = serializer.serialize_struct("certificate", 2)?;
                s.serialize_field("beta", beta)?;
                s.serialize_field("d_infty", d_infty)?;
                s.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for CertificateSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Explicit {
                beta: f64,
                d_infty: f64,
            },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) if s == "search" => Ok(CertificateSpec::Search),
            Repr::Text(s) => Err(serde::de::Error::custom(format!(
                "certificate must be \"search\" or a {{beta, d_infty}} table, got \"{s}\""
            ))),
            Repr::Explicit { beta, d_infty } => Ok(CertificateSpec::Explicit { beta, d_infty }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_timeseries")]
    pub timeseries: PathBuf,
    #[serde(default = "default_report")]
    pub report: PathBuf,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            timeseries: default_timeseries(),
            report: default_report(),
        }
    }
}

fn default_timeseries() -> PathBuf {
    PathBuf::from("timeseries.csv")
}

fn default_report() -> PathBuf {
    PathBuf::from("report.json")
}

/// Strict parse followed by semantic validation.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let config: ExperimentConfig =
        toml::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

struct FieldErr<'a>(&'a str, String);

impl fmt::Display for FieldErr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.0, self.1)
    }
}

fn bad(path: &str, msg: impl Into<String>) -> HarnessError {
    HarnessError::Invalid(FieldErr(path, msg.into()).to_string())
}

fn check_matrix(path: &str, rows: &[Vec<f64>], n: usize) -> Result<(), HarnessError> {
    if rows.len() != n {
        return Err(bad(path, format!("expected {n} rows, found {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(bad(
                &format!("{path}[{i}]"),
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
    }
    Ok(())
}

fn check_range(path: &str, range: [f64; 2]) -> Result<(), HarnessError> {
    if !(range[0].is_finite() && range[1].is_finite() && range[0] < range[1]) {
        return Err(bad(
            path,
            format!("must be a nonempty finite interval, got [{}, {}]", range[0], range[1]),
        ));
    }
    Ok(())
}

impl ExperimentConfig {
    /// Oscillator count implied by the network source.
    pub fn n(&self) -> usize {
        match (&self.network.inline, &self.network.random) {
            (Some(inline), _) => inline.inertia.len(),
            (_, Some(random)) => random.n,
            _ => 0,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        match (&self.network.inline, &self.network.random) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(bad(
                    "network",
                    "exactly one of `inline` and `random` must be set",
                ))
            }
            _ => {}
        }
        match (&self.initial.inline, &self.initial.random) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(bad(
                    "initial",
                    "exactly one of `inline` and `random` must be set",
                ))
            }
            _ => {}
        }

        let n = self.n();
        if let Some(inline) = &self.network.inline {
            if inline.inertia.is_empty() {
                return Err(bad("network.inline.inertia", "must not be empty"));
            }
            for (path, len) in [
                ("network.inline.damping", inline.damping.len()),
                (
                    "network.inline.natural_frequency",
                    inline.natural_frequency.len(),
                ),
            ] {
                if len != n {
                    return Err(bad(path, format!("expected {n} entries, found {len}")));
                }
            }
            check_matrix("network.inline.weights", &inline.weights, n)?;
            check_matrix("network.inline.frustration", &inline.frustration, n)?;
        }
        if let Some(random) = &self.network.random {
            if random.n == 0 {
                return Err(bad("network.random.n", "must be at least 1"));
            }
            if !(random.gamma > 0.0 && random.gamma.is_finite()) {
                return Err(bad("network.random.gamma", "must be positive"));
            }
            if !(random.coupling >= 0.0 && random.coupling.is_finite()) {
                return Err(bad("network.random.coupling", "must be nonnegative"));
            }
            check_range("network.random.damping_range", random.damping_range)?;
            if random.damping_range[0] <= 0.0 {
                return Err(bad("network.random.damping_range", "must be positive"));
            }
            check_range(
                "network.random.natural_frequency_range",
                random.natural_frequency_range,
            )?;
            if !(random.frustration >= 0.0 && random.frustration < std::f64::consts::FRAC_PI_2) {
                return Err(bad("network.random.frustration", "must lie in [0, π/2)"));
            }
            match &random.weights {
                WeightPattern::AllToAll => {}
                WeightPattern::Random { edge_probability } => {
                    if !(0.0..=1.0).contains(edge_probability) {
                        return Err(bad(
                            "network.random.weights.edge_probability",
                            "must lie in [0, 1]",
                        ));
                    }
                }
                WeightPattern::Mask { mask } => {
                    if mask.len() != random.n
                        || mask.iter().any(|row| row.len() != random.n)
                    {
                        return Err(bad(
                            "network.random.weights.mask",
                            format!("must be {n}x{n}", n = random.n),
                        ));
                    }
                    if mask.iter().flatten().any(|&x| x > 1) {
                        return Err(bad("network.random.weights.mask", "entries must be 0 or 1"));
                    }
                }
            }
        }

        if let Some(inline) = &self.initial.inline {
            for (path, len) in [
                ("initial.inline.phase", inline.phase.len()),
                ("initial.inline.frequency", inline.frequency.len()),
            ] {
                if len != n {
                    return Err(bad(path, format!("expected {n} entries, found {len}")));
                }
            }
        }
        if let Some(random) = &self.initial.random {
            check_range("initial.random.phase_range", random.phase_range)?;
            check_range("initial.random.frequency_range", random.frequency_range)?;
        }

        if let DtSpec::Fixed(dt) = self.integration.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(bad("integration.dt", format!("must be positive, got {dt}")));
            }
        }
        if !(self.integration.horizon > 0.0 && self.integration.horizon.is_finite()) {
            return Err(bad(
                "integration.horizon",
                format!("must be positive, got {}", self.integration.horizon),
            ));
        }
        if self.integration.stride < 1 {
            return Err(bad("integration.stride", "must be ≥ 1"));
        }

        if let CertificateSpec::Explicit { beta, d_infty } = self.certificate {
            if !beta.is_finite() || !d_infty.is_finite() {
                return Err(bad("certificate", "beta and d_infty must be finite"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[network.inline]
inertia = [1.0, 1.0]
damping = [1.0, 1.0]
natural_frequency = [0.0, 0.0]
coupling = 1.0
weights = [[0.0, 1.0], [1.0, 0.0]]
frustration = [[0.0, 0.0], [0.0, 0.0]]

[initial.inline]
phase = [0.0, 1.0]
frequency = [0.0, 0.0]

[integration]
horizon = 1.0
"#;

    #[test]
    fn minimal_config_materializes_defaults() {
        let config = parse_config(MINIMAL).unwrap();
        assert_eq!(config.integration.dt, DtSpec::Auto);
        assert_eq!(config.integration.stride, 1);
        assert_eq!(config.seed, 0);
        assert_eq!(config.certificate, CertificateSpec::Search);
        assert_eq!(config.outputs, Outputs::default());
    }

    #[test]
    fn zero_stride_rejected() {
        let text = MINIMAL.replace("horizon = 1.0", "horizon = 1.0\nstride = 0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("stride"), "{err}");
        assert!(err.to_string().contains("≥ 1"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{MINIMAL}\nunknown_key = 3\n");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, HarnessError::Parse(_)));
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_config("[network\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn both_sources_rejected() {
        let text = MINIMAL.replace(
            "[initial.inline]",
            "[network.random]\nn = 2\ncoupling = 1.0\ngamma = 0.1\ndamping_range = [0.9, 1.0]\nnatural_frequency_range = [-0.1, 0.1]\nfrustration = 0.0\nweights = { pattern = \"all-to-all\" }\n\n[initial.inline]",
        );
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("exactly one"), "{err}");
    }

    #[test]
    fn dt_accepts_auto_and_numbers() {
        let text = MINIMAL.replace("horizon = 1.0", "horizon = 1.0\ndt = \"auto\"");
        assert_eq!(
            parse_config(&text).unwrap().integration.dt,
            DtSpec::Auto
        );
        let text = MINIMAL.replace("horizon = 1.0", "horizon = 1.0\ndt = 1e-3");
        assert_eq!(
            parse_config(&text).unwrap().integration.dt,
            DtSpec::Fixed(1e-3)
        );
        let text = MINIMAL.replace("horizon = 1.0", "horizon = 1.0\ndt = \"fast\"");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn certificate_spec_forms() {
        let text = format!("{MINIMAL}\ncertificate = \"search\"\n");
        assert_eq!(
            parse_config(&text).unwrap().certificate,
            CertificateSpec::Search
        );
        let text = format!("{MINIMAL}\n[certificate]\nbeta = 2.6\nd_infty = 0.1\n");
        assert_eq!(
            parse_config(&text).unwrap().certificate,
            CertificateSpec::Explicit {
                beta: 2.6,
                d_infty: 0.1
            }
        );
    }

    #[test]
    fn ragged_matrix_rejected() {
        let text = MINIMAL.replace(
            "weights = [[0.0, 1.0], [1.0, 0.0]]",
            "weights = [[0.0, 1.0], [1.0]]",
        );
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("weights[1]"), "{err}");
    }

    #[test]
    fn config_round_trips_through_toml() {
        let config = parse_config(MINIMAL).unwrap();
        let text = toml::to_string(&config).unwrap();
        let back = parse_config(&text).unwrap();
        assert_eq!(config, back);
    }
}
