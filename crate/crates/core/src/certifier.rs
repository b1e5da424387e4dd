//! Sufficient conditions for exponential frequency synchronization and
//! the quantitative guarantees they imply.
//!
//! A certificate is parameterized by β ∈ (0, π) (half-circle bound on the
//! initial energy) and D∞ < min(β, π/2) (quarter-circle capture target).
//! It consists of one initial-data condition, one frustration condition,
//! four upper bounds on γK and two lower bounds on K. When everything
//! passes, the frequency diameter is guaranteed to decay like
//! `E₂(t*) e^{−Λ(t−t*)}` with rate `Λ = K𝒞 cos(D∞+ᾱ)/(4N)` once the
//! phase diameter is captured below D∞.
//!
//! All checks are strict floating-point comparisons; a pass whose margin
//! is below 10⁻⁹ of the bound is flagged as fragile. Bounds are
//! recomputed from scratch for every query — nothing is reused across
//! different couplings.

use serde::Serialize;

use crate::diagnostics::{drift, CertificateParameters};
use crate::error::{Error, Result};
use crate::network::NetworkConstants;

/// Relative margin under which a passing comparison is reported fragile.
pub const FRAGILE_MARGIN: f64 = 1e-9;

/// Outcome of one strict inequality, with its margin to violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub bound: f64,
    pub pass: bool,
    /// Distance to violation; positive exactly when the check passes.
    pub margin: f64,
    /// Passing with margin below 10⁻⁹·|bound|.
    pub fragile: bool,
}

impl ConditionCheck {
    /// `lhs < bound`.
    fn upper(name: &'static str, lhs: f64, bound: f64) -> Self {
        let margin = bound - lhs;
        let pass = lhs < bound;
        Self {
            name,
            lhs,
            bound,
            pass,
            margin,
            fragile: pass && margin < FRAGILE_MARGIN * bound.abs(),
        }
    }

    /// `lhs > bound`.
    fn lower(name: &'static str, lhs: f64, bound: f64) -> Self {
        let margin = lhs - bound;
        let pass = lhs > bound;
        Self {
            name,
            lhs,
            bound,
            pass,
            margin,
            fragile: pass && margin < FRAGILE_MARGIN * bound.abs(),
        }
    }
}

/// The frustration condition, the four γK bounds, the two K bounds, and μ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A2Checks {
    pub frustration: ConditionCheck,
    pub gamma_k: [ConditionCheck; 4],
    pub k: [ConditionCheck; 2],
    pub mu: f64,
}

impl A2Checks {
    pub fn all_pass(&self) -> bool {
        self.frustration.pass
            && self.gamma_k.iter().all(|c| c.pass)
            && self.k.iter().all(|c| c.pass)
    }
}

/// Quantitative guarantees available once the conditions hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Guarantees {
    /// Upper bound on the capture time t*.
    pub t_star_bound: f64,
    /// Frequency-diameter bound valid from t* on.
    pub omega_bound: f64,
    /// Exponential decay rate Λ.
    pub rate: f64,
}

/// Full evaluation of one (β, D∞, K) query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub beta: f64,
    pub d_infty: f64,
    pub coupling: f64,
    pub a1: ConditionCheck,
    pub a2_frustration: ConditionCheck,
    pub a2_gamma_k: [ConditionCheck; 4],
    pub a2_k: [ConditionCheck; 2],
    pub mu: f64,
    pub t_star_bound: f64,
    pub omega_bound: f64,
    pub rate: f64,
    pub verdict: bool,
}

fn require_gamma(constants: &NetworkConstants) -> Result<f64> {
    constants.gamma.ok_or(Error::HomogeneousGammaRequired)
}

fn require_connectivity(constants: &NetworkConstants) -> Result<f64> {
    if constants.connectivity > 0.0 {
        Ok(constants.connectivity)
    } else {
        Err(Error::NetworkConditionViolated)
    }
}

/// Initial-data condition: with D_θ(0), D_ω(0) the initial phase and
/// frequency diameters,
/// `2γ(D_Ω + 2Kψ_u sin ᾱ) + (1 + 4γKψ_u) D_θ(0) + 3γ D_ω(0) < β < π`.
pub fn check_a1(
    constants: &NetworkConstants,
    coupling: f64,
    d_theta0: f64,
    d_omega0: f64,
    beta: f64,
) -> Result<ConditionCheck> {
    let gamma = require_gamma(constants)?;
    let lhs = 2.0 * gamma * drift(constants, coupling)
        + (1.0 + 4.0 * gamma * coupling * constants.psi_u) * d_theta0
        + 3.0 * gamma * d_omega0;
    let mut check = ConditionCheck::upper("initial_energy", lhs, beta);
    check.pass = check.pass && beta < std::f64::consts::PI;
    Ok(check)
}

/// The coupling-independent prefactor defect
/// `μ = 64N²ψ_u²β²(D_Ω + 2Kψ_u sin ᾱ)(D∞ + sin ᾱ) / (𝒞² cos²ᾱ sin²β)`.
pub fn mu(constants: &NetworkConstants, coupling: f64, beta: f64, d_infty: f64) -> Result<f64> {
    let c = require_connectivity(constants)?;
    let n = constants.n as f64;
    let cos_a = constants.alpha_bar.cos();
    let sin_b = beta.sin();
    Ok(
        64.0 * n * n * constants.psi_u * constants.psi_u * beta * beta
            * drift(constants, coupling)
            * (d_infty + constants.alpha_bar.sin())
            / (c * c * cos_a * cos_a * sin_b * sin_b),
    )
}

/// Evaluates the frustration condition, the four γK upper bounds and the
/// two K lower bounds for raw (β, D∞). Invalid combinations are reported
/// as failing checks, not errors; only a missing γ or zero connectivity
/// aborts.
pub fn check_a2(
    constants: &NetworkConstants,
    coupling: f64,
    beta: f64,
    d_infty: f64,
) -> Result<A2Checks> {
    let gamma = require_gamma(constants)?;
    let c = require_connectivity(constants)?;
    let n = constants.n as f64;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let cos_a = constants.alpha_bar.cos();
    let sin_b = beta.sin();
    let cos_da = (d_infty + constants.alpha_bar).cos();
    let psi_u = constants.psi_u;

    let frustration = ConditionCheck::upper(
        "frustration_sum",
        d_infty + constants.alpha_bar,
        half_pi,
    );

    let gk = gamma * coupling;
    let gamma_k = [
        ConditionCheck::upper(
            "gammaK < C cos(a) sin(b) / (32 N psi_u^2 b)",
            gk,
            c * cos_a * sin_b / (32.0 * n * psi_u * psi_u * beta),
        ),
        ConditionCheck::upper(
            "gammaK < N b / (C cos(a) sin(b))",
            gk,
            n * beta / (c * cos_a * sin_b),
        ),
        ConditionCheck::upper(
            "gammaK < C cos(D+a) / (32 N psi_u^2)",
            gk,
            c * cos_da / (32.0 * n * psi_u * psi_u),
        ),
        ConditionCheck::upper(
            "gammaK < 2 N / (C cos(D+a))",
            gk,
            2.0 * n / (c * cos_da),
        ),
    ];

    let mu = mu(constants, coupling, beta, d_infty)?;
    let k = [
        ConditionCheck::lower(
            "K > 8 N b (D_Omega + 2 K psi_u sin(a)) / (D C cos(a) sin(b))",
            coupling,
            8.0 * n * beta * drift(constants, coupling) / (d_infty * c * cos_a * sin_b),
        ),
        ConditionCheck::lower(
            "K > 8 N mu / (C cos(D+a))",
            coupling,
            8.0 * n * mu / (c * cos_da),
        ),
    ];

    Ok(A2Checks {
        frustration,
        gamma_k,
        k,
        mu,
    })
}

/// Capture-time bound, post-capture frequency bound, and decay rate.
///
/// Preconditions are re-verified: if any coupling condition fails, the
/// error names it.
pub fn guarantees(
    constants: &NetworkConstants,
    coupling: f64,
    beta: f64,
    d_infty: f64,
) -> Result<Guarantees> {
    let checks = check_a2(constants, coupling, beta, d_infty)?;
    for check in std::iter::once(&checks.frustration)
        .chain(&checks.gamma_k)
        .chain(&checks.k)
    {
        if !check.pass {
            return Err(Error::ConditionFailed {
                name: check.name,
                lhs: check.lhs,
                bound: check.bound,
            });
        }
    }
    Ok(raw_guarantees(constants, coupling, beta, d_infty)?)
}

/// The guarantee formulas without precondition checks.
fn raw_guarantees(
    constants: &NetworkConstants,
    coupling: f64,
    beta: f64,
    d_infty: f64,
) -> Result<Guarantees> {
    let gamma = require_gamma(constants)?;
    let c = require_connectivity(constants)?;
    let n = constants.n as f64;
    let cos_a = constants.alpha_bar.cos();
    let sin_b = beta.sin();
    let d = drift(constants, coupling);
    Ok(Guarantees {
        t_star_bound: beta / (2.0 * d),
        omega_bound: 32.0 * n * n * constants.psi_u * beta * beta * d
            / (gamma * coupling * c * c * cos_a * cos_a * sin_b * sin_b),
        rate: coupling * c * (d_infty + constants.alpha_bar).cos() / (4.0 * n),
    })
}

/// Assembles the full report for one query.
///
/// The capture-time bound follows the two-case estimate: when the initial
/// energy bound (the A₁ left-hand side) already sits at or below
/// `8Nβ(D_Ω + 2Kψ_u sin ᾱ)/(K𝒞 cos ᾱ sin β)` the capture time is 0,
/// otherwise `β/(2(D_Ω + 2Kψ_u sin ᾱ))`.
pub fn certify(
    constants: &NetworkConstants,
    coupling: f64,
    beta: f64,
    d_infty: f64,
    d_theta0: f64,
    d_omega0: f64,
) -> Result<CertificateReport> {
    let a1 = check_a1(constants, coupling, d_theta0, d_omega0, beta)?;
    let a2 = check_a2(constants, coupling, beta, d_infty)?;
    let g = raw_guarantees(constants, coupling, beta, d_infty)?;

    let c = constants.connectivity;
    let n = constants.n as f64;
    let settle_level = 8.0 * n * beta * drift(constants, coupling)
        / (coupling * c * constants.alpha_bar.cos() * beta.sin());
    let t_star_bound = if a1.lhs <= settle_level {
        0.0
    } else {
        g.t_star_bound
    };

    let verdict = a1.pass && a2.all_pass();
    Ok(CertificateReport {
        beta,
        d_infty,
        coupling,
        a1,
        a2_frustration: a2.frustration,
        a2_gamma_k: a2.gamma_k,
        a2_k: a2.k,
        mu: a2.mu,
        t_star_bound,
        omega_bound: g.omega_bound,
        rate: g.rate,
        verdict,
    })
}

/// Decay envelope `anchor_e2 · e^{−Λ(t − anchor_time)}`.
pub fn envelope(
    report: &CertificateReport,
    anchor_time: f64,
    anchor_e2: f64,
    t: f64,
) -> Result<f64> {
    if t < anchor_time {
        return Err(Error::BeforeAnchor {
            time: t,
            anchor: anchor_time,
        });
    }
    Ok(anchor_e2 * (-report.rate * (t - anchor_time)).exp())
}

/// Grid search over β ∈ (D_θ(0), π) and D∞ ∈ (0, min(β, π/2) − ᾱ) for
/// the passing pair with the largest decay rate. Returns `None` when no
/// grid point passes (including γ undefined or zero connectivity).
pub fn search_certificate_params(
    constants: &NetworkConstants,
    coupling: f64,
    d_theta0: f64,
    d_omega0: f64,
    resolution: usize,
) -> Option<(CertificateParameters, CertificateReport)> {
    let resolution = resolution.max(2);
    let pi = std::f64::consts::PI;
    if !(d_theta0 < pi) {
        return None;
    }
    let mut best: Option<(CertificateParameters, CertificateReport)> = None;
    for j in 0..resolution {
        let beta = d_theta0 + (pi - d_theta0) * (j + 1) as f64 / (resolution + 1) as f64;
        let d_upper = beta.min(std::f64::consts::FRAC_PI_2) - constants.alpha_bar;
        if !(d_upper > 0.0) {
            continue;
        }
        for i in 0..resolution {
            let d_infty = d_upper * (i + 1) as f64 / (resolution + 1) as f64;
            let Ok(report) = certify(constants, coupling, beta, d_infty, d_theta0, d_omega0)
            else {
                return None; // γ undefined or zero connectivity: no grid point can pass
            };
            if report.verdict
                && best
                    .as_ref()
                    .map(|(_, b)| report.rate > b.rate)
                    .unwrap_or(true)
            {
                let params = CertificateParameters::new(beta, d_infty)
                    .expect("grid points are inside the admissible ranges");
                best = Some((params, report));
            }
        }
    }
    best
}
