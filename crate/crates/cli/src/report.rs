//! Structured run summary mirrored into the JSON report file.

use serde::Serialize;

use kurasync::{CertificateReport, NetworkConstants, RateFit};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Serialize)]
pub struct SummaryReport {
    pub artifact_version: String,
    pub integrator: String,
    pub rng_algorithm: String,
    /// The configuration that actually ran, with every default and
    /// override materialized (dt resolved to a number).
    pub config: ExperimentConfig,
    pub constants: NetworkConstants,
    /// Absent when the certificate could not even be evaluated (γ
    /// undefined, zero connectivity) or a search found nothing;
    /// `certificate_note` then says why.
    pub certificate: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_note: Option<String>,
    pub capture_time: Option<f64>,
    pub fitted_rate: Option<RateFit>,
    pub final_diameters: Option<FinalDiameters>,
    pub residual_pass_fractions: Option<ResidualSummary>,
    pub stiffness_warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FinalDiameters {
    pub time: f64,
    pub d_theta: f64,
    pub d_omega: f64,
    pub d_a: f64,
    pub d_b: f64,
}

/// Fraction of interior samples satisfying each differential inequality
/// within the finite-difference tolerance. The post-capture entries are
/// present only when a capture time was observed.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResidualSummary {
    pub phase_diameter: f64,
    pub frequency_diameter: f64,
    pub acceleration_diameter: f64,
    pub energy_phase: f64,
    pub frequency_diameter_post_capture: Option<f64>,
    pub jerk_diameter_post_capture: Option<f64>,
    pub energy_frequency_post_capture: Option<f64>,
}

impl SummaryReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail") + "\n"
    }

    /// Short human-readable digest for the terminal.
    pub fn digest(&self) -> String {
        let mut lines = Vec::new();
        lines.push(format!(
            "n = {}, C = {:.6}, psi_u = {:.6}, D_Omega = {:.6}, alpha_bar = {:.3e}, gamma = {}",
            self.constants.n,
            self.constants.connectivity,
            self.constants.psi_u,
            self.constants.d_omega,
            self.constants.alpha_bar,
            self.constants
                .gamma
                .map(|g| format!("{g:.3e}"))
                .unwrap_or_else(|| "undefined".into()),
        ));
        match &self.certificate {
            Some(cert) => {
                lines.push(format!(
                    "certificate (beta = {:.6}, D_infty = {:.6}): {} | mu = {:.4}, rate = {:.4}, t* bound = {:.4}",
                    cert.beta,
                    cert.d_infty,
                    if cert.verdict { "PASS" } else { "FAIL" },
                    cert.mu,
                    cert.rate,
                    cert.t_star_bound,
                ));
            }
            None => {
                lines.push(format!(
                    "certificate: unavailable{}",
                    self.certificate_note
                        .as_deref()
                        .map(|n| format!(" ({n})"))
                        .unwrap_or_default()
                ));
            }
        }
        if let Some(t) = self.capture_time {
            lines.push(format!("observed capture time: {t}"));
        }
        if let Some(fit) = &self.fitted_rate {
            lines.push(format!(
                "fitted decay rate: {:.4} (r² = {:.4})",
                fit.rate, fit.r_squared
            ));
        }
        if let Some(f) = &self.final_diameters {
            lines.push(format!(
                "final diameters at t = {}: D_theta = {:.3e}, D_omega = {:.3e}",
                f.time, f.d_theta, f.d_omega
            ));
        }
        for w in &self.stiffness_warnings {
            lines.push(format!("warning: {w}"));
        }
        lines.join("\n")
    }
}
