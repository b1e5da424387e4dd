//! Experiment execution: validate → constants → certificate → simulate →
//! diagnostics → fit, with atomic CSV/report emission.

use std::fs;
use std::io;
use std::path::Path;

use kurasync::diagnostics::DEFAULT_RATE_FLOOR;
use kurasync::{
    certifier, detect_capture, diagnostics, dynamics, fit_decay_rate, CertificateParameters,
    CertificateReport, EnergyCoefficients, EnsembleState, NetworkConstants, OscillatorNetwork,
    TrajectoryRecord,
};

use crate::config::{CertificateSpec, DtSpec, ExperimentConfig, SEARCH_GRID_RESOLUTION};
use crate::error::HarnessError;
use crate::generate::{build_instance, RNG_ALGORITHM};
use crate::report::{FinalDiameters, ResidualSummary, SummaryReport};

/// A completed run. `certificate_ok` distinguishes exit code 0 from 2.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: SummaryReport,
    pub certificate_ok: bool,
}

/// Step size used when the config says `auto`: γ/10 when γ is defined,
/// otherwise one tenth of the smallest inertia/damping ratio.
pub fn auto_dt(network: &OscillatorNetwork) -> f64 {
    match network.gamma() {
        Some(gamma) => gamma / 10.0,
        None => {
            let min_ratio = network
                .inertia
                .iter()
                .zip(&network.damping)
                .map(|(&m, &d)| m / d)
                .fold(f64::INFINITY, f64::min);
            min_ratio / 10.0
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes via a temporary file in the same directory plus rename, so
/// readers never observe a half-written file.
fn write_atomic(path: &Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(io_err(path))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

struct CertificateOutcome {
    report: Option<CertificateReport>,
    params: Option<CertificateParameters>,
    note: Option<String>,
}

fn evaluate_certificate(
    spec: &CertificateSpec,
    constants: &NetworkConstants,
    coupling: f64,
    d_theta0: f64,
    d_omega0: f64,
) -> CertificateOutcome {
    match spec {
        CertificateSpec::Explicit { beta, d_infty } => {
            match certifier::certify(constants, coupling, *beta, *d_infty, d_theta0, d_omega0) {
                Ok(report) => CertificateOutcome {
                    report: Some(report),
                    params: CertificateParameters::new(*beta, *d_infty).ok(),
                    note: None,
                },
                Err(e) => CertificateOutcome {
                    report: None,
                    params: None,
                    note: Some(e.to_string()),
                },
            }
        }
        CertificateSpec::Search => {
            match certifier::search_certificate_params(
                constants,
                coupling,
                d_theta0,
                d_omega0,
                SEARCH_GRID_RESOLUTION,
            ) {
                Some((params, report)) => CertificateOutcome {
                    report: Some(report),
                    params: Some(params),
                    note: None,
                },
                None => CertificateOutcome {
                    report: None,
                    params: None,
                    note: Some("search found no passing (beta, d_infty) pair".into()),
                },
            }
        }
    }
}

fn prepared(
    config: &ExperimentConfig,
) -> Result<
    (
        OscillatorNetwork,
        EnsembleState,
        NetworkConstants,
        CertificateOutcome,
        ExperimentConfig,
    ),
    HarnessError,
> {
    config.validate()?;
    let (network, initial) = build_instance(config)?;
    let violations = network.validate();
    if !violations.is_empty() {
        let joined = violations
            .iter()
            .map(|v| format!("  - {v}"))
            .collect::<Vec<_>>()
            .join("\n");
        return Err(HarnessError::Network(joined));
    }
    let constants = network.compute_constants();
    let d_theta0 = diagnostics::diameter(&initial.phase)?;
    let d_omega0 = diagnostics::diameter(&initial.frequency)?;
    let certificate = evaluate_certificate(
        &config.certificate,
        &constants,
        network.coupling,
        d_theta0,
        d_omega0,
    );

    let mut echo = config.clone();
    echo.integration.dt = DtSpec::Fixed(match config.integration.dt {
        DtSpec::Fixed(dt) => dt,
        DtSpec::Auto => auto_dt(&network),
    });
    Ok((network, initial, constants, certificate, echo))
}

fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Constants and certificate only; writes the report file, skips the
/// simulation and the timeseries.
pub fn certify_only(config: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    let (_, _, constants, certificate, echo) = prepared(config)?;
    let certificate_ok = certificate
        .report
        .as_ref()
        .map(|r| r.verdict)
        .unwrap_or(false);
    let report = SummaryReport {
        artifact_version: version(),
        integrator: dynamics::INTEGRATOR_NAME.to_string(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        config: echo,
        constants,
        certificate: certificate.report,
        certificate_note: certificate.note,
        capture_time: None,
        fitted_rate: None,
        final_diameters: None,
        residual_pass_fractions: None,
        stiffness_warnings: Vec::new(),
    };
    write_atomic(&config.outputs.report, &report.to_json())?;
    Ok(RunOutcome {
        report,
        certificate_ok,
    })
}

/// Full pipeline. The simulation runs even when the certificate fails;
/// only hard errors (invalid config/network, blow-up, i/o) abort.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    let (network, initial, constants, certificate, echo) = prepared(config)?;
    let dt = match echo.integration.dt {
        DtSpec::Fixed(dt) => dt,
        DtSpec::Auto => unreachable!("dt resolved during preparation"),
    };
    let stride = echo.integration.stride;
    let horizon = echo.integration.horizon;

    let energy = certificate
        .params
        .as_ref()
        .and_then(|p| EnergyCoefficients::new(&constants, p).ok());
    let trajectory = dynamics::simulate(&network, &initial, dt, horizon, stride, energy.as_ref())?;

    let capture_time = match &certificate.params {
        Some(p) => detect_capture(&trajectory, p.d_infty)?,
        None => None,
    };
    let t_end = trajectory
        .samples
        .last()
        .map(|(s, _)| s.time)
        .unwrap_or(0.0);
    let fitted_rate = capture_time
        .and_then(|t| fit_decay_rate(&trajectory, (t, t_end), DEFAULT_RATE_FLOOR).ok());

    let residual_pass_fractions = certificate.params.as_ref().and_then(|params| {
        let coupling = network.coupling;
        let base = (
            diagnostics::residual_phase_diameter(&trajectory, &constants, params, coupling),
            diagnostics::residual_frequency_diameter(&trajectory, &constants, coupling),
            diagnostics::residual_acceleration_diameter(&trajectory, &constants, coupling),
            diagnostics::gronwall_residual_e1(&trajectory, &constants, params, coupling),
        );
        match base {
            (Ok(phase), Ok(freq), Ok(accel), Ok(e1)) => {
                let post = capture_time.map(|anchor| {
                    let mu = certificate
                        .report
                        .as_ref()
                        .map(|r| r.mu)
                        .unwrap_or_default();
                    (
                        diagnostics::residual_frequency_decay(
                            &trajectory,
                            &constants,
                            params,
                            coupling,
                            anchor,
                        ),
                        diagnostics::residual_jerk_diameter(
                            &trajectory,
                            &constants,
                            coupling,
                            mu,
                            anchor,
                        ),
                        diagnostics::gronwall_residual_e2(
                            &trajectory,
                            &constants,
                            params,
                            coupling,
                            anchor,
                        ),
                    )
                });
                let (freq2, jerk, e2) = match post {
                    Some((a, b, c)) => (
                        a.ok().map(|x| x.pass_fraction()),
                        b.ok().map(|x| x.pass_fraction()),
                        c.ok().map(|x| x.pass_fraction()),
                    ),
                    None => (None, None, None),
                };
                Some(ResidualSummary {
                    phase_diameter: phase.pass_fraction(),
                    frequency_diameter: freq.pass_fraction(),
                    acceleration_diameter: accel.pass_fraction(),
                    energy_phase: e1.pass_fraction(),
                    frequency_diameter_post_capture: freq2,
                    jerk_diameter_post_capture: jerk,
                    energy_frequency_post_capture: e2,
                })
            }
            _ => None,
        }
    });

    // Envelope column: anchored at the observed capture when the
    // certificate verdict passes and E₂ is available there.
    let envelope_anchor = match (&certificate.report, capture_time) {
        (Some(report), Some(anchor)) if report.verdict => trajectory
            .samples
            .iter()
            .find(|(s, _)| s.time >= anchor)
            .and_then(|(s, f)| f.e2.map(|e2| (s.time, e2, report.rate))),
        _ => None,
    };

    let csv = render_csv(&trajectory, envelope_anchor);
    write_atomic(&config.outputs.timeseries, &csv)?;

    let final_diameters = trajectory.samples.last().map(|(s, f)| FinalDiameters {
        time: s.time,
        d_theta: f.d_theta,
        d_omega: f.d_omega,
        d_a: f.d_a,
        d_b: f.d_b,
    });

    let certificate_ok = certificate
        .report
        .as_ref()
        .map(|r| r.verdict)
        .unwrap_or(false);
    let report = SummaryReport {
        artifact_version: version(),
        integrator: trajectory.integrator.to_string(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        config: echo,
        constants,
        certificate: certificate.report,
        certificate_note: certificate.note,
        capture_time,
        fitted_rate,
        final_diameters,
        residual_pass_fractions,
        stiffness_warnings: trajectory.stiffness_warning.iter().cloned().collect(),
    };
    write_atomic(&config.outputs.report, &report.to_json())?;

    Ok(RunOutcome {
        report,
        certificate_ok,
    })
}

/// CSV layout (header is bit-exact):
/// `t,theta_1..theta_N,omega_1..omega_N,D_theta,D_omega,D_a,D_b,E1,E2,envelope`
/// with shortest round-trip decimal formatting, empty energy columns when
/// no certificate parameters were available, and an empty envelope before
/// the anchor time.
pub fn render_csv(
    trajectory: &TrajectoryRecord,
    envelope_anchor: Option<(f64, f64, f64)>,
) -> String {
    let n = trajectory.network.n();
    let mut out = String::new();
    out.push('t');
    for i in 1..=n {
        out.push_str(&format!(",theta_{i}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",omega_{i}"));
    }
    out.push_str(",D_theta,D_omega,D_a,D_b,E1,E2,envelope\n");

    for (state, frame) in &trajectory.samples {
        out.push_str(&format!("{}", state.time));
        for x in &state.phase {
            out.push_str(&format!(",{x}"));
        }
        for x in &state.frequency {
            out.push_str(&format!(",{x}"));
        }
        out.push_str(&format!(
            ",{},{},{},{}",
            frame.d_theta, frame.d_omega, frame.d_a, frame.d_b
        ));
        for e in [frame.e1, frame.e2] {
            match e {
                Some(v) => out.push_str(&format!(",{v}")),
                None => out.push(','),
            }
        }
        match envelope_anchor {
            Some((anchor_time, anchor_e2, rate)) if state.time >= anchor_time => {
                let env = anchor_e2 * (-rate * (state.time - anchor_time)).exp();
                out.push_str(&format!(",{env}"));
            }
            _ => out.push(','),
        }
        out.push('\n');
    }
    out
}
