//! Diameter functionals, energy functions, differential-inequality
//! residual checks, and decay-rate fitting.
//!
//! Two energy functions control the ensemble spread:
//!
//! ```text
//! E₁ = D_θ + [𝒞 cos ᾱ sin β / (4 N ψ_u β)] γ D_ω + 2γ² D_a
//! E₂ = D_ω + [𝒞 cos(D∞ + ᾱ) / (4 N ψ_u)] γ D_a + 2γ² D_b
//! ```
//!
//! Along certified trajectories both satisfy first-order Gronwall
//! inequalities; the residual routines here measure those inequalities
//! with central differences at the recording stride. Derivative kinks
//! (where the max/min attaining oscillator switches) form a measure-zero
//! set, so the checks are quantile-style: callers compare the fraction of
//! samples within the finite-difference tolerance rather than demanding
//! every sample pass.

use serde::Serialize;

use crate::dynamics::{self, EnsembleState, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::network::{NetworkConstants, OscillatorNetwork};

/// Default floor under which a frequency diameter counts as numerical
/// noise for rate fitting.
pub const DEFAULT_RATE_FLOOR: f64 = 1e-12;

/// max − min of a nonempty sequence.
pub fn diameter(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for &v in values {
        max = max.max(v);
        min = min.min(v);
    }
    Ok(max - min)
}

/// Per-sample diameters and energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsFrame {
    pub time: f64,
    pub d_theta: f64,
    pub d_omega: f64,
    pub d_a: f64,
    pub d_b: f64,
    /// Phase energy E₁; present only when certificate parameters and a
    /// uniform γ are available.
    pub e1: Option<f64>,
    /// Frequency energy E₂; same availability as `e1`.
    pub e2: Option<f64>,
}

/// Certificate tuning parameters: the half-circle bound β and the
/// quarter-circle capture target D∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateParameters {
    pub beta: f64,
    pub d_infty: f64,
}

impl CertificateParameters {
    /// Requires β ∈ (0, π) and D∞ ∈ (0, min(β, π/2)). The compound
    /// condition D∞ + ᾱ < π/2 is the certifier's to check, not ours.
    pub fn new(beta: f64, d_infty: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < std::f64::consts::PI) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in (0, π), got {beta}"
            )));
        }
        let upper = beta.min(std::f64::consts::FRAC_PI_2);
        if !(d_infty > 0.0 && d_infty < upper) {
            return Err(Error::InvalidParameter(format!(
                "d_infty must lie in (0, {upper}), got {d_infty}"
            )));
        }
        Ok(Self { beta, d_infty })
    }
}

/// Cached energy coefficients so per-frame evaluation is allocation-free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCoefficients {
    pub gamma: f64,
    /// Coefficient of D_ω in E₁ (already includes γ).
    pub e1_frequency: f64,
    /// Coefficient of D_a in E₁ (= 2γ²).
    pub e1_acceleration: f64,
    /// Coefficient of D_a in E₂ (already includes γ).
    pub e2_acceleration: f64,
    /// Coefficient of D_b in E₂ (= 2γ²).
    pub e2_jerk: f64,
}

impl EnergyCoefficients {
    pub fn new(constants: &NetworkConstants, params: &CertificateParameters) -> Result<Self> {
        let gamma = constants.gamma.ok_or(Error::HomogeneousGammaRequired)?;
        if !(constants.connectivity > 0.0) || !(constants.psi_u > 0.0) {
            return Err(Error::NetworkConditionViolated);
        }
        let n = constants.n as f64;
        let e1_frequency = constants.connectivity * constants.alpha_bar.cos() * params.beta.sin()
            / (4.0 * n * constants.psi_u * params.beta)
            * gamma;
        let e2_acceleration = constants.connectivity * (params.d_infty + constants.alpha_bar).cos()
            / (4.0 * n * constants.psi_u)
            * gamma;
        Ok(Self {
            gamma,
            e1_frequency,
            e1_acceleration: 2.0 * gamma * gamma,
            e2_acceleration,
            e2_jerk: 2.0 * gamma * gamma,
        })
    }

    pub fn e1(&self, d_theta: f64, d_omega: f64, d_a: f64) -> f64 {
        d_theta + self.e1_frequency * d_omega + self.e1_acceleration * d_a
    }

    pub fn e2(&self, d_omega: f64, d_a: f64, d_b: f64) -> f64 {
        d_omega + self.e2_acceleration * d_a + self.e2_jerk * d_b
    }
}

/// Phase energy E₁ from raw diameters.
pub fn energy_e1(
    constants: &NetworkConstants,
    params: &CertificateParameters,
    d_theta: f64,
    d_omega: f64,
    d_a: f64,
) -> Result<f64> {
    Ok(EnergyCoefficients::new(constants, params)?.e1(d_theta, d_omega, d_a))
}

/// Frequency energy E₂ from raw diameters.
pub fn energy_e2(
    constants: &NetworkConstants,
    params: &CertificateParameters,
    d_omega: f64,
    d_a: f64,
    d_b: f64,
) -> Result<f64> {
    Ok(EnergyCoefficients::new(constants, params)?.e2(d_omega, d_a, d_b))
}

/// Computes the diagnostics frame for one state: the four diameters plus
/// the energies when coefficients are supplied.
pub fn frame(
    network: &OscillatorNetwork,
    state: &EnsembleState,
    energy: Option<&EnergyCoefficients>,
) -> Result<DiagnosticsFrame> {
    let d_theta = diameter(&state.phase)?;
    let d_omega = diameter(&state.frequency)?;
    let a = dynamics::acceleration(network, state)?;
    let b = dynamics::jerk(network, state)?;
    let d_a = diameter(&a)?;
    let d_b = diameter(&b)?;
    Ok(DiagnosticsFrame {
        time: state.time,
        d_theta,
        d_omega,
        d_a,
        d_b,
        e1: energy.map(|c| c.e1(d_theta, d_omega, d_a)),
        e2: energy.map(|c| c.e2(d_omega, d_a, d_b)),
    })
}

/// Residuals of one differential inequality at the interior samples of a
/// window, with the documented finite-difference tolerance:
/// `tolerance = 10 · h · max |f̈|` where f is the primary differenced
/// series of the check and f̈ is estimated by central second differences
/// over the same window.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualCheck {
    pub name: &'static str,
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub tolerance: f64,
}

impl ResidualCheck {
    /// Fraction of interior samples with residual ≤ tolerance.
    pub fn pass_fraction(&self) -> f64 {
        if self.residuals.is_empty() {
            return 1.0;
        }
        let passing = self
            .residuals
            .iter()
            .filter(|&&r| r <= self.tolerance)
            .count();
        passing as f64 / self.residuals.len() as f64
    }
}

fn central_first(f: &[f64], h: f64, i: usize) -> f64 {
    (f[i + 1] - f[i - 1]) / (2.0 * h)
}

fn central_second(f: &[f64], h: f64, i: usize) -> f64 {
    (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h)
}

fn fd_tolerance(f: &[f64], h: f64) -> f64 {
    let mut max = 0.0_f64;
    for i in 1..f.len().saturating_sub(1) {
        max = max.max(central_second(f, h, i).abs());
    }
    10.0 * h * max
}

/// Selects the sample range starting at the first sample with
/// `time ≥ anchor` and demands at least three samples in it.
fn window_start(trajectory: &TrajectoryRecord, anchor: f64) -> Result<usize> {
    let start = trajectory
        .samples
        .iter()
        .position(|(s, _)| s.time >= anchor)
        .unwrap_or(trajectory.samples.len());
    let available = trajectory.samples.len() - start;
    if available < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            available,
        });
    }
    Ok(start)
}

/// Shared skeleton: extracts the window, differences the primary series,
/// and evaluates `residual(i, d/dt, d²/dt²)` at interior samples.
fn residual_over_window<F>(
    trajectory: &TrajectoryRecord,
    anchor: f64,
    name: &'static str,
    primary: &[f64],
    times: &[f64],
    residual: F,
) -> Result<ResidualCheck>
where
    F: Fn(usize, f64, f64) -> f64,
{
    let start = window_start(trajectory, anchor)?;
    let h = trajectory.sample_step();
    let f = &primary[start..];
    let t = &times[start..];
    let mut out_times = Vec::with_capacity(f.len() - 2);
    let mut residuals = Vec::with_capacity(f.len() - 2);
    for i in 1..f.len() - 1 {
        out_times.push(t[i]);
        residuals.push(residual(
            start + i,
            central_first(f, h, i),
            central_second(f, h, i),
        ));
    }
    Ok(ResidualCheck {
        name,
        times: out_times,
        residuals,
        tolerance: fd_tolerance(f, h),
    })
}

fn require_gamma(constants: &NetworkConstants) -> Result<f64> {
    constants.gamma.ok_or(Error::HomogeneousGammaRequired)
}

/// Drift constant `D_Ω + 2 K ψ_u sin ᾱ` shared by several inequalities.
pub(crate) fn drift(constants: &NetworkConstants, coupling: f64) -> f64 {
    constants.d_omega + 2.0 * coupling * constants.psi_u * constants.alpha_bar.sin()
}

/// Residual of the E₁ Gronwall inequality
/// `Ė₁ ≤ 2(D_Ω + 2Kψ_u sin ᾱ) − [K𝒞 cos ᾱ sin β/(2Nβ)] E₁`.
pub fn gronwall_residual_e1(
    trajectory: &TrajectoryRecord,
    constants: &NetworkConstants,
    params: &CertificateParameters,
    coupling: f64,
) -> Result<ResidualCheck> {
    let coeffs = EnergyCoefficients::new(constants, params)?;
    let (times, e1): (Vec<f64>, Vec<f64>) = {
        let times = trajectory.samples.iter().map(|(s, _)| s.time).collect();
        let e1 = trajectory
            .frames()
            .map(|f| coeffs.e1(f.d_theta, f.d_omega, f.d_a))
            .collect();
        (times, e1)
    };
    let n = constants.n as f64;
    let decay = coupling * constants.connectivity * constants.alpha_bar.cos() * params.beta.sin()
        / (2.0 * n * params.beta);
    let source = 2.0 * drift(constants, coupling);
    residual_over_window(
        trajectory,
        f64::NEG_INFINITY,
        "energy_phase",
        &e1,
        &times,
        |i, de1, _| de1 - (source - decay * e1[i]),
    )
}

/// Residual of the E₂ Gronwall inequality after the anchor time:
/// `Ė₂ ≤ −[K𝒞 cos(D∞+ᾱ)/(4N)] E₂`.
pub fn gronwall_residual_e2(
    trajectory: &TrajectoryRecord,
    constants: &NetworkConstants,
    params: &CertificateParameters,
    coupling: f64,
    anchor: f64,
) -> Result<ResidualCheck> {
    let coeffs = EnergyCoefficients::new(constants, params)?;
    let times: Vec<f64> = trajectory.samples.iter().map(|(s, _)| s.time).collect();
    let e2: Vec<f64> = trajectory
        .frames()
        .map(|f| coeffs.e2(f.d_omega, f.d_a, f.d_b))
        .collect();
    let n = constants.n as f64;
    let rate = coupling * constants.connectivity * (params.d_infty + constants.alpha_bar).cos()
        / (4.0 * n);
    residual_over_window(
        trajectory,
        anchor,
        "energy_frequency",
        &e2,
        &times,
        |i, de2, _| de2 + rate * e2[i],
    )
}

/// Residual of the second-order phase-diameter inequality
/// `γ D̈_θ + Ḋ_θ ≤ D_Ω + 2Kψ_u sin ᾱ − [K𝒞 cos ᾱ sin β/(Nβ)] D_θ`
/// (valid while D_θ < β).
pub fn residual_phase_diameter(
    trajectory: &TrajectoryRecord,
    constants: &NetworkConstants,
    params: &CertificateParameters,
    coupling: f64,
) -> Result<ResidualCheck> {
    let gamma = require_gamma(constants)?;
    let (times, d_theta) = trajectory.series(|f| f.d_theta);
    let n = constants.n as f64;
    let decay = coupling * constants.connectivity * constants.alpha_bar.cos() * params.beta.sin()
        / (n * params.beta);
    let source = drift(constants, coupling);
    residual_over_window(
        trajectory,
        f64::NEG_INFINITY,
        "phase_diameter",
        &d_theta,
        &times,
        |i, d1, d2| gamma * d2 + d1 - (source - decay * d_theta[i]),
    )
}

/// Residual of the acceleration-diameter inequality
/// `γ Ḋ_a + D_a ≤ 2Kψ_u D_ω`.
pub fn residual_acceleration_diameter(
    trajectory: &TrajectoryRecord,
    constants: &NetworkConstants,
    coupling: f64,
) -> Result<ResidualCheck> {
    let gamma = require_gamma(constants)?;
    let (times, d_a) = trajectory.series(|f| f.d_a);
    let d_omega: Vec<f64> = trajectory.frames().map(|f| f.d_omega).collect();
    let bound = 2.0 * coupling * constants.psi_u;
    residual_over_window(
        trajectory,
        f64::NEG_INFINITY,
        "acceleration_diameter",
        &d_a,
        &times,
        |i, d1, _| gamma * d1 + d_a[i] - bound * d_omega[i],
    )
}

/// Residual of the first-order frequency-diameter inequality
/// `γ Ḋ_ω + D_ω ≤ D_Ω + 2Kψ_u sin ᾱ + 2Kψ_u D_θ`.
pub fn residual_frequency_diameter(
    trajectory: &TrajectoryRecord,
    constants: &NetworkConstants,
    coupling: f64,
) -> Result<ResidualCheck> {
    let gamma = require_gamma(constants)?;
    let (times, d_omega) = trajectory.series(|f| f.d_omega);
    let d_theta: Vec<f64> = trajectory.frames().map(|f| f.d_theta).collect();
    let source = drift(constants, coupling);
    let slope = 2.0 * coupling * constants.psi_u;
    residual_over_window(
        trajectory,
        f64::NEG_INFINITY,
        "frequency_diameter",
        &d_omega,
        &times,
        |i, d1, _| gamma * d1 + d_omega[i] - (source + slope * d_theta[i]),
    )
}

/// Residual of the post-capture second-order frequency inequality
/// `γ D̈_ω + Ḋ_ω ≤ −[K𝒞 cos(D∞+ᾱ)/N] D_ω`.
pub fn residual_frequency_decay(
    trajectory: &TrajectoryRecord,
    constants: &NetworkConstants,
    params: &CertificateParameters,
    coupling: f64,
    anchor: f64,
) -> Result<ResidualCheck> {
    let gamma = require_gamma(constants)?;
    let (times, d_omega) = trajectory.series(|f| f.d_omega);
    let n = constants.n as f64;
    let rate =
        coupling * constants.connectivity * (params.d_infty + constants.alpha_bar).cos() / n;
    residual_over_window(
        trajectory,
        anchor,
        "frequency_diameter_post_capture",
        &d_omega,
        &times,
        |i, d1, d2| gamma * d2 + d1 + rate * d_omega[i],
    )
}

/// Residual of the post-capture jerk-diameter inequality
/// `γ Ḋ_b + D_b ≤ 2Kψ_u D_a + (μ/γ) D_ω`.
pub fn residual_jerk_diameter(
    trajectory: &TrajectoryRecord,
    constants: &NetworkConstants,
    coupling: f64,
    mu: f64,
    anchor: f64,
) -> Result<ResidualCheck> {
    let gamma = require_gamma(constants)?;
    let (times, d_b) = trajectory.series(|f| f.d_b);
    let d_a: Vec<f64> = trajectory.frames().map(|f| f.d_a).collect();
    let d_omega: Vec<f64> = trajectory.frames().map(|f| f.d_omega).collect();
    let slope = 2.0 * coupling * constants.psi_u;
    residual_over_window(
        trajectory,
        anchor,
        "jerk_diameter_post_capture",
        &d_b,
        &times,
        |i, d1, _| gamma * d1 + d_b[i] - (slope * d_a[i] + mu / gamma * d_omega[i]),
    )
}

/// Least-squares exponential rate of the frequency diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    /// Negated slope of ln D_ω over the window.
    pub rate: f64,
    /// Coefficient of determination of the log-linear fit.
    pub r_squared: f64,
}

/// Fits `ln D_ω(t)` over `window = (start, end)` inclusive, ignoring
/// samples at or below `floor`; needs at least 10 usable samples.
pub fn fit_decay_rate(
    trajectory: &TrajectoryRecord,
    window: (f64, f64),
    floor: f64,
) -> Result<RateFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (state, frame) in &trajectory.samples {
        if state.time >= window.0 && state.time <= window.1 && frame.d_omega > floor {
            xs.push(state.time);
            ys.push(frame.d_omega.ln());
        }
    }
    if xs.len() < 10 {
        return Err(Error::InsufficientSamples {
            needed: 10,
            available: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let mut ss_res = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        let fit = mean_y + slope * (x - mean_x);
        ss_res += (y - fit) * (y - fit);
    }
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(RateFit {
        rate: -slope,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::INTEGRATOR_NAME;
    use ndarray::Array2;

    fn plain_constants() -> NetworkConstants {
        NetworkConstants {
            n: 4,
            connectivity: 1.0088781275221953,
            psi_u: 1.0911074740861975,
            d_omega: 0.005694353170002079,
            alpha_bar: 1e-6,
            gamma: Some(1e-6),
        }
    }

    fn params() -> CertificateParameters {
        CertificateParameters::new(5.0 * std::f64::consts::PI / 6.0, 0.1).unwrap()
    }

    #[test]
    fn diameter_basics() {
        assert_eq!(diameter(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert!(matches!(diameter(&[]), Err(Error::EmptySequence)));
    }

    #[test]
    fn parameter_ranges() {
        assert!(CertificateParameters::new(3.2, 0.1).is_err());
        assert!(CertificateParameters::new(2.0, 0.0).is_err());
        assert!(CertificateParameters::new(2.0, 1.6).is_err());
        assert!(CertificateParameters::new(0.5, 0.4).is_ok());
        // D∞ must stay below β even when β < π/2.
        assert!(CertificateParameters::new(0.5, 0.6).is_err());
    }

    #[test]
    fn energies_vanish_at_zero_diameters() {
        let c = plain_constants();
        let p = params();
        assert_eq!(energy_e1(&c, &p, 0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(energy_e2(&c, &p, 0.0, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn energy_reduces_to_diameter_for_zero_gamma() {
        let mut c = plain_constants();
        c.gamma = Some(0.0);
        let p = params();
        assert_eq!(energy_e1(&c, &p, 1.7, 5.0, 9.0).unwrap(), 1.7);
        assert_eq!(energy_e2(&c, &p, 0.3, 7.0, 2.0).unwrap(), 0.3);
    }

    #[test]
    fn energy_requires_gamma_and_connectivity() {
        let p = params();
        let mut c = plain_constants();
        c.gamma = None;
        assert!(matches!(
            energy_e1(&c, &p, 1.0, 1.0, 1.0),
            Err(Error::HomogeneousGammaRequired)
        ));
        let mut c = plain_constants();
        c.connectivity = 0.0;
        assert!(matches!(
            energy_e1(&c, &p, 1.0, 1.0, 1.0),
            Err(Error::NetworkConditionViolated)
        ));
    }

    #[test]
    fn energy_coefficient_recovery() {
        let c = plain_constants();
        let p = params();
        let coeffs = EnergyCoefficients::new(&c, &p).unwrap();
        // Unit-diameter evaluations recover each linear coefficient.
        assert_eq!(coeffs.e1(1.0, 0.0, 0.0), 1.0);
        assert_eq!(coeffs.e1(0.0, 1.0, 0.0), coeffs.e1_frequency);
        assert_eq!(coeffs.e1(0.0, 0.0, 1.0), coeffs.e1_acceleration);
        assert_eq!(coeffs.e2(0.0, 1.0, 0.0), coeffs.e2_acceleration);
        assert_eq!(coeffs.e2(0.0, 0.0, 1.0), coeffs.e2_jerk);
        let gamma = 1e-6;
        let n = 4.0;
        let expected_e1_freq = c.connectivity * (1e-6_f64).cos() * p.beta.sin()
            / (4.0 * n * c.psi_u * p.beta)
            * gamma;
        assert!((coeffs.e1_frequency - expected_e1_freq).abs() < 1e-18);
        assert_eq!(coeffs.e1_acceleration, 2.0 * gamma * gamma);
    }

    /// E₁(0) on the reference instance, checked against the frozen
    /// high-precision value and the a-priori initial bound.
    #[test]
    fn reference_initial_energy() {
        let weights = ndarray::arr2(&[
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 1.0, 1.0, 0.0],
            [0.0, 1.0, 1.0, 1.0],
        ]);
        let mut frustration = Array2::from_elem((4, 4), 1e-6);
        for i in 0..4 {
            frustration[[i, i]] = 0.0;
        }
        let net = OscillatorNetwork::new(
            vec![9.775e-7, 9.165e-7, 9.912e-7, 9.319e-7],
            vec![0.9775, 0.9165, 0.9912, 0.9319],
            vec![0.0013, -0.0040, -0.0022, 0.0005],
            780.0,
            weights,
            frustration,
        );
        let state = EnsembleState {
            time: 0.0,
            phase: vec![2.0742, 0.0706, 0.8886, 1.0262],
            frequency: vec![0.0701, 0.0117, 0.0804, -0.0161],
        };
        let constants = net.compute_constants();
        let p = params();
        let coeffs = EnergyCoefficients::new(&constants, &p).unwrap();
        let f = frame(&net, &state, Some(&coeffs)).unwrap();
        let e1 = f.e1.unwrap();
        assert!((e1 - 2.0043854060725452).abs() < 1e-9, "E1(0) = {e1}");
        // a-priori chain: E₁(0) ≤ 2γ(D_Ω + 2Kψ_u sin ᾱ)
        //                        + (1 + 4γKψ_u) D_θ(0) + 3γ D_ω(0) < β.
        let gamma = constants.gamma.unwrap();
        let bound = 2.0 * gamma * drift(&constants, net.coupling)
            + (1.0 + 4.0 * gamma * net.coupling * constants.psi_u) * f.d_theta
            + 3.0 * gamma * f.d_omega;
        assert!((bound - 2.0104210702504085).abs() < 1e-9, "bound = {bound}");
        assert!(e1 <= bound && bound < p.beta);
        assert!(f.e1.unwrap() >= f.d_theta);
        assert!(f.e2.unwrap() >= f.d_omega);
    }

    fn synthetic_record(times: &[f64], d_omega: &[f64]) -> TrajectoryRecord {
        let net = OscillatorNetwork::new(
            vec![1.0],
            vec![1.0],
            vec![0.0],
            1.0,
            Array2::zeros((1, 1)),
            Array2::zeros((1, 1)),
        );
        let h = times[1] - times[0];
        let samples = times
            .iter()
            .zip(d_omega)
            .map(|(&t, &dw)| {
                (
                    EnsembleState {
                        time: t,
                        phase: vec![0.0],
                        frequency: vec![0.0],
                    },
                    DiagnosticsFrame {
                        time: t,
                        d_theta: 0.0,
                        d_omega: dw,
                        d_a: 0.0,
                        d_b: 0.0,
                        e1: None,
                        e2: None,
                    },
                )
            })
            .collect();
        TrajectoryRecord {
            network: net,
            dt: h,
            stride: 1,
            integrator: INTEGRATOR_NAME,
            samples,
            stiffness_warning: None,
        }
    }

    #[test]
    fn stationary_synchronized_residual() {
        let times: Vec<f64> = (0..20).map(|i| i as f64 * 0.01).collect();
        let zeros = vec![0.0; 20];
        let record = synthetic_record(&times, &zeros);
        let c = plain_constants();
        let p = params();
        let check = gronwall_residual_e1(&record, &c, &p, 780.0).unwrap();
        let expected = -2.0 * drift(&c, 780.0);
        assert!(expected < 0.0);
        for r in &check.residuals {
            assert!((r - expected).abs() < 1e-12);
        }
        // Fully synchronized stationary state: E₂ residual is exactly 0.
        let check2 = gronwall_residual_e2(&record, &c, &p, 780.0, 0.0).unwrap();
        for r in &check2.residuals {
            assert_eq!(*r, 0.0);
        }
    }

    #[test]
    fn exponential_e2_residual_is_small() {
        let c = plain_constants();
        let p = params();
        let n = c.n as f64;
        let rate = 780.0 * c.connectivity * (p.d_infty + c.alpha_bar).cos() / (4.0 * n);
        let h = 1e-4;
        let times: Vec<f64> = (0..200).map(|i| i as f64 * h).collect();
        let values: Vec<f64> = times.iter().map(|&t| (-rate * t).exp()).collect();
        let record = synthetic_record(&times, &values);
        let check = gronwall_residual_e2(&record, &c, &p, 780.0, 0.0).unwrap();
        // Central-difference error of e^{−Λt} is ~Λ³h²/6 · e^{−Λt}.
        let budget = rate.powi(3) * h * h / 2.0;
        for r in &check.residuals {
            assert!(r.abs() <= budget, "residual {r} exceeds {budget}");
        }
    }

    #[test]
    fn fit_exact_exponential() {
        let times: Vec<f64> = (0..100).map(|i| i as f64 * 0.01).collect();
        let values: Vec<f64> = times.iter().map(|&t| 3.0 * (-5.0 * t).exp()).collect();
        let record = synthetic_record(&times, &values);
        let fit = fit_decay_rate(&record, (0.0, 1.0), 0.0).unwrap();
        assert!((fit.rate - 5.0).abs() < 1e-6);
        assert!(fit.r_squared > 1.0 - 1e-9);
    }

    #[test]
    fn fit_constant_series() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let values = vec![0.25; 50];
        let record = synthetic_record(&times, &values);
        let fit = fit_decay_rate(&record, (0.0, 5.0), 0.0).unwrap();
        assert!(fit.rate.abs() < 1e-12);
    }

    #[test]
    fn fit_needs_enough_samples_above_floor() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let values = vec![1e-15; 50];
        let record = synthetic_record(&times, &values);
        assert!(matches!(
            fit_decay_rate(&record, (0.0, 5.0), 1e-12),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn residual_needs_three_samples() {
        let times = vec![0.0, 0.1];
        let values = vec![1.0, 1.0];
        let record = synthetic_record(&times, &values);
        let c = plain_constants();
        let p = params();
        assert!(matches!(
            gronwall_residual_e1(&record, &c, &p, 780.0),
            Err(Error::InsufficientSamples { .. })
        ));
    }
}
