//! Vector field evaluation and fixed-step RK4 integration.
//!
//! The first-order form integrated here is the 2n-dimensional system
//!
//! ```text
//! θ̇_i = ω_i
//! ω̇_i = [Ω_i − d_i ω_i + (K/N) Σ_k ψ_ik sin(θ_k − θ_i + α_ik)] / m_i
//! ```
//!
//! Phases are unwrapped reals: no modular reduction is ever applied, so
//! diameters and energies stay meaningful. When the inertia/damping ratio
//! γ is uniform, the frequency relaxation time scale is γ; the explicit
//! integrator needs dt ≲ γ there, and [`simulate`] records a stiffness
//! warning when dt exceeds 2γ.

use crate::diagnostics::{self, DiagnosticsFrame, EnergyCoefficients};
use crate::error::{Error, Result};
use crate::network::OscillatorNetwork;

/// Name of the only integrator implemented.
pub const INTEGRATOR_NAME: &str = "rk4-classic";

/// Dynamic state of the ensemble at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleState {
    pub time: f64,
    /// Unwrapped phases θ_i (radians).
    pub phase: Vec<f64>,
    /// Instantaneous frequencies ω_i = θ̇_i.
    pub frequency: Vec<f64>,
}

/// A recorded trajectory: every `stride`-th integrator state together
/// with its diagnostics frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// The instance that was integrated.
    pub network: OscillatorNetwork,
    /// Fixed integration step.
    pub dt: f64,
    /// Recording stride in steps.
    pub stride: usize,
    /// Integrator identifier.
    pub integrator: &'static str,
    /// Recorded samples, times strictly increasing by `stride * dt`.
    pub samples: Vec<(EnsembleState, DiagnosticsFrame)>,
    /// Set when dt exceeds twice the frequency relaxation scale γ.
    pub stiffness_warning: Option<String>,
}

impl TrajectoryRecord {
    /// Time between recorded samples.
    pub fn sample_step(&self) -> f64 {
        self.dt * self.stride as f64
    }

    pub fn frames(&self) -> impl Iterator<Item = &DiagnosticsFrame> {
        self.samples.iter().map(|(_, f)| f)
    }

    /// Extracts one frame field as a series, paired with sample times.
    pub(crate) fn series<F: Fn(&DiagnosticsFrame) -> f64>(&self, f: F) -> (Vec<f64>, Vec<f64>) {
        let times = self.samples.iter().map(|(s, _)| s.time).collect();
        let values = self.samples.iter().map(|(_, fr)| f(fr)).collect();
        (times, values)
    }
}

fn check_state(network: &OscillatorNetwork, state: &EnsembleState) -> Result<()> {
    let n = network.n();
    if state.phase.len() != n || state.frequency.len() != n {
        return Err(Error::InvalidState(format!(
            "state length {}x{} does not match network size {n}",
            state.phase.len(),
            state.frequency.len()
        )));
    }
    if !state.time.is_finite()
        || state.phase.iter().any(|x| !x.is_finite())
        || state.frequency.iter().any(|x| !x.is_finite())
    {
        return Err(Error::InvalidState("non-finite entry".into()));
    }
    Ok(())
}

/// Evaluates the raw rates without validation or allocation.
fn eval_rates(
    network: &OscillatorNetwork,
    phase: &[f64],
    frequency: &[f64],
    phase_rate: &mut [f64],
    frequency_rate: &mut [f64],
) {
    let n = phase.len();
    let k_over_n = network.coupling / n as f64;
    for i in 0..n {
        let mut coupling_sum = 0.0;
        for k in 0..n {
            coupling_sum += network.weights[[i, k]]
                * (phase[k] - phase[i] + network.frustration[[i, k]]).sin();
        }
        phase_rate[i] = frequency[i];
        frequency_rate[i] = (network.natural_frequency[i] - network.damping[i] * frequency[i]
            + k_over_n * coupling_sum)
            / network.inertia[i];
    }
}

/// Evaluates the vector field `(θ̇, ω̇)` at a state.
pub fn vector_field(
    network: &OscillatorNetwork,
    state: &EnsembleState,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_state(network, state)?;
    let n = network.n();
    let mut phase_rate = vec![0.0; n];
    let mut frequency_rate = vec![0.0; n];
    eval_rates(
        network,
        &state.phase,
        &state.frequency,
        &mut phase_rate,
        &mut frequency_rate,
    );
    Ok((phase_rate, frequency_rate))
}

/// Acceleration vector `a_i = ω̇_i`.
///
/// This is the frequency component of [`vector_field`] under its own name;
/// diagnostics treat the acceleration as a first-class vector.
pub fn acceleration(network: &OscillatorNetwork, state: &EnsembleState) -> Result<Vec<f64>> {
    vector_field(network, state).map(|(_, a)| a)
}

/// Jerk vector `b_i = ȧ_i`, obtained by differentiating the frequency
/// equation in time:
///
/// ```text
/// b_i = [−d_i a_i + (K/N) Σ_k ψ_ik cos(θ_k − θ_i + α_ik)(ω_k − ω_i)] / m_i
/// ```
pub fn jerk(network: &OscillatorNetwork, state: &EnsembleState) -> Result<Vec<f64>> {
    let a = acceleration(network, state)?;
    let n = network.n();
    let k_over_n = network.coupling / n as f64;
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut s = 0.0;
        for k in 0..n {
            s += network.weights[[i, k]]
                * (state.phase[k] - state.phase[i] + network.frustration[[i, k]]).cos()
                * (state.frequency[k] - state.frequency[i]);
        }
        out[i] = (-network.damping[i] * a[i] + k_over_n * s) / network.inertia[i];
    }
    Ok(out)
}

/// Reusable buffers for the RK4 stages.
struct Rk4Scratch {
    k1p: Vec<f64>,
    k1f: Vec<f64>,
    k2p: Vec<f64>,
    k2f: Vec<f64>,
    k3p: Vec<f64>,
    k3f: Vec<f64>,
    k4p: Vec<f64>,
    k4f: Vec<f64>,
    tp: Vec<f64>,
    tf: Vec<f64>,
}

impl Rk4Scratch {
    fn new(n: usize) -> Self {
        Self {
            k1p: vec![0.0; n],
            k1f: vec![0.0; n],
            k2p: vec![0.0; n],
            k2f: vec![0.0; n],
            k3p: vec![0.0; n],
            k3f: vec![0.0; n],
            k4p: vec![0.0; n],
            k4f: vec![0.0; n],
            tp: vec![0.0; n],
            tf: vec![0.0; n],
        }
    }
}

/// One classical RK4 step on `(phase, frequency)` in place.
fn rk4_advance(
    network: &OscillatorNetwork,
    phase: &mut [f64],
    frequency: &mut [f64],
    dt: f64,
    s: &mut Rk4Scratch,
) {
    let n = phase.len();
    let half = 0.5 * dt;
    eval_rates(network, phase, frequency, &mut s.k1p, &mut s.k1f);
    for i in 0..n {
        s.tp[i] = phase[i] + half * s.k1p[i];
        s.tf[i] = frequency[i] + half * s.k1f[i];
    }
    eval_rates(network, &s.tp, &s.tf, &mut s.k2p, &mut s.k2f);
    for i in 0..n {
        s.tp[i] = phase[i] + half * s.k2p[i];
        s.tf[i] = frequency[i] + half * s.k2f[i];
    }
    eval_rates(network, &s.tp, &s.tf, &mut s.k3p, &mut s.k3f);
    for i in 0..n {
        s.tp[i] = phase[i] + dt * s.k3p[i];
        s.tf[i] = frequency[i] + dt * s.k3f[i];
    }
    eval_rates(network, &s.tp, &s.tf, &mut s.k4p, &mut s.k4f);
    let sixth = dt / 6.0;
    for i in 0..n {
        phase[i] += sixth * (s.k1p[i] + 2.0 * s.k2p[i] + 2.0 * s.k3p[i] + s.k4p[i]);
        frequency[i] += sixth * (s.k1f[i] + 2.0 * s.k2f[i] + 2.0 * s.k3f[i] + s.k4f[i]);
    }
}

fn all_finite(values: &[f64]) -> bool {
    values.iter().all(|x| x.is_finite())
}

/// One classical RK4 step; time advances by `dt`.
pub fn rk4_step(
    network: &OscillatorNetwork,
    state: &EnsembleState,
    dt: f64,
) -> Result<EnsembleState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    check_state(network, state)?;
    let mut phase = state.phase.clone();
    let mut frequency = state.frequency.clone();
    let mut scratch = Rk4Scratch::new(network.n());
    rk4_advance(network, &mut phase, &mut frequency, dt, &mut scratch);
    if !all_finite(&phase) || !all_finite(&frequency) {
        return Err(Error::BlowUp { step: 0 });
    }
    Ok(EnsembleState {
        time: state.time + dt,
        phase,
        frequency,
    })
}

/// Number of RK4 steps covering `horizon`; the epsilon shields the count
/// against representation error when horizon/dt is an integer in exact
/// arithmetic (e.g. 0.2 / 1e-7).
pub(crate) fn step_count(horizon: f64, dt: f64) -> usize {
    (horizon / dt + 1e-9).floor() as usize
}

/// Integrates from `initial` over `horizon` with fixed step `dt`,
/// recording every `stride`-th state with its diagnostics frame.
///
/// Energies in the frames are filled only when `energy` coefficients are
/// supplied. Deterministic: identical inputs produce identical records.
pub fn simulate(
    network: &OscillatorNetwork,
    initial: &EnsembleState,
    dt: f64,
    horizon: f64,
    stride: usize,
    energy: Option<&EnergyCoefficients>,
) -> Result<TrajectoryRecord> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be at least 1".into()));
    }
    check_state(network, initial)?;

    let stiffness_warning = network.gamma().and_then(|gamma| {
        (dt > 2.0 * gamma).then(|| {
            format!("dt = {dt} exceeds 2γ = {}; explicit RK4 may be unstable", 2.0 * gamma)
        })
    });

    let total_steps = step_count(horizon, dt);
    let t0 = initial.time;
    let mut phase = initial.phase.clone();
    let mut frequency = initial.frequency.clone();
    let mut scratch = Rk4Scratch::new(network.n());

    let mut samples = Vec::with_capacity(total_steps / stride + 2);
    let record =
        |samples: &mut Vec<(EnsembleState, DiagnosticsFrame)>, state: EnsembleState| -> Result<()> {
            let frame = diagnostics::frame(network, &state, energy)?;
            samples.push((state, frame));
            Ok(())
        };
    record(
        &mut samples,
        EnsembleState {
            time: t0,
            phase: phase.clone(),
            frequency: frequency.clone(),
        },
    )?;

    for step in 0..total_steps {
        rk4_advance(network, &mut phase, &mut frequency, dt, &mut scratch);
        if !all_finite(&phase) || !all_finite(&frequency) {
            return Err(Error::BlowUp { step });
        }
        if (step + 1) % stride == 0 {
            record(
                &mut samples,
                EnsembleState {
                    time: t0 + (step + 1) as f64 * dt,
                    phase: phase.clone(),
                    frequency: frequency.clone(),
                },
            )?;
        }
    }

    Ok(TrajectoryRecord {
        network: network.clone(),
        dt,
        stride,
        integrator: INTEGRATOR_NAME,
        samples,
        stiffness_warning,
    })
}

/// Earliest sample time from which the phase diameter stays below
/// `threshold` for the rest of the record; `None` if no suffix qualifies.
pub fn detect_capture(trajectory: &TrajectoryRecord, threshold: f64) -> Result<Option<f64>> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "capture threshold must be positive, got {threshold}"
        )));
    }
    if trajectory.samples.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let mut start = None;
    for (state, frame) in trajectory.samples.iter().rev() {
        if frame.d_theta < threshold {
            start = Some(state.time);
        } else {
            break;
        }
    }
    Ok(start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr2, Array2};

    fn reference_network() -> OscillatorNetwork {
        let weights = arr2(&[
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 1.0, 1.0, 0.0],
            [0.0, 1.0, 1.0, 1.0],
        ]);
        let mut frustration = Array2::from_elem((4, 4), 1e-6);
        for i in 0..4 {
            frustration[[i, i]] = 0.0;
        }
        OscillatorNetwork::new(
            vec![9.775e-7, 9.165e-7, 9.912e-7, 9.319e-7],
            vec![0.9775, 0.9165, 0.9912, 0.9319],
            vec![0.0013, -0.0040, -0.0022, 0.0005],
            780.0,
            weights,
            frustration,
        )
    }

    fn reference_initial() -> EnsembleState {
        EnsembleState {
            time: 0.0,
            phase: vec![2.0742, 0.0706, 0.8886, 1.0262],
            frequency: vec![0.0701, 0.0117, 0.0804, -0.0161],
        }
    }

    fn two_oscillator() -> (OscillatorNetwork, EnsembleState) {
        let net = OscillatorNetwork::new(
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![0.0, 0.0],
            2.0,
            arr2(&[[0.0, 1.0], [1.0, 0.0]]),
            Array2::zeros((2, 2)),
        );
        let state = EnsembleState {
            time: 0.0,
            phase: vec![0.0, std::f64::consts::FRAC_PI_2],
            frequency: vec![0.0, 0.0],
        };
        (net, state)
    }

    #[test]
    fn identical_phases_decouple() {
        let net = OscillatorNetwork::new(
            vec![2.0, 3.0],
            vec![0.5, 0.25],
            vec![1.0, -1.0],
            4.0,
            Array2::from_elem((2, 2), 1.0),
            Array2::zeros((2, 2)),
        );
        let state = EnsembleState {
            time: 0.0,
            phase: vec![0.7, 0.7],
            frequency: vec![0.2, -0.3],
        };
        let (_, rate) = vector_field(&net, &state).unwrap();
        for i in 0..2 {
            let expected = (net.natural_frequency[i] - net.damping[i] * state.frequency[i])
                / net.inertia[i];
            assert_eq!(rate[i], expected);
        }
    }

    #[test]
    fn two_oscillator_hand_values() {
        let (net, state) = two_oscillator();
        let (_, rate) = vector_field(&net, &state).unwrap();
        assert!((rate[0] - 1.0).abs() < 1e-15);
        assert!((rate[1] + 1.0).abs() < 1e-15);
        let b = jerk(&net, &state).unwrap();
        assert!((b[0] + 1.0).abs() < 1e-15);
        assert!((b[1] - 1.0).abs() < 1e-15);
    }

    /// On the reference instance the general acceleration must agree with
    /// the homogeneous-ratio form
    /// a_i = (1/γ)[−ω_i + Ω_i/d_i + (K/N) Σ_k (ψ_ik/d_i) sin(θ_k−θ_i+α_ik)].
    #[test]
    fn acceleration_matches_homogeneous_form() {
        let net = reference_network();
        let state = reference_initial();
        let gamma = net.gamma().unwrap();
        let a = acceleration(&net, &state).unwrap();
        let n = net.n();
        for i in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += net.weights[[i, k]] / net.damping[i]
                    * (state.phase[k] - state.phase[i] + net.frustration[[i, k]]).sin();
            }
            let alt = (-state.frequency[i]
                + net.natural_frequency[i] / net.damping[i]
                + net.coupling / n as f64 * s)
                / gamma;
            assert!(
                (a[i] - alt).abs() <= 1e-12 * alt.abs().max(1.0),
                "osc {i}: {} vs {}",
                a[i],
                alt
            );
        }
        // Stiffness smoke check: accelerations are enormous at t = 0.
        let max = a.iter().cloned().fold(0.0_f64, |m, x| m.max(x.abs()));
        assert!((1e5..1e9).contains(&max), "max |a(0)| = {max}");
    }

    #[test]
    fn acceleration_is_vector_field_component() {
        let net = reference_network();
        // Cheap deterministic state generator.
        let mut x = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let state = EnsembleState {
                time: 0.0,
                phase: (0..4).map(|_| next() * 6.0 - 3.0).collect(),
                frequency: (0..4).map(|_| next() * 2.0 - 1.0).collect(),
            };
            let (_, rate) = vector_field(&net, &state).unwrap();
            let a = acceleration(&net, &state).unwrap();
            assert_eq!(rate, a);
        }
    }

    #[test]
    fn jerk_vanishing_coupling_term() {
        let net = reference_network();
        let state = EnsembleState {
            time: 0.0,
            phase: vec![0.4, -0.2, 0.9, 1.3],
            frequency: vec![0.25; 4],
        };
        let a = acceleration(&net, &state).unwrap();
        let b = jerk(&net, &state).unwrap();
        for i in 0..4 {
            let expected = -net.damping[i] * a[i] / net.inertia[i];
            assert!((b[i] - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn rk4_matches_exponential_decay() {
        // K = 0, Ω = 0, m = d gives ω̇ = −ω/γ with γ = 1.
        let net = OscillatorNetwork::new(
            vec![0.9775, 0.9165, 0.9912, 0.9319],
            vec![0.9775, 0.9165, 0.9912, 0.9319],
            vec![0.0; 4],
            0.0,
            Array2::from_elem((4, 4), 1.0),
            Array2::zeros((4, 4)),
        );
        let state = EnsembleState {
            time: 0.0,
            phase: vec![0.0; 4],
            frequency: vec![0.3, -0.5, 0.7, 0.1],
        };
        let dt = 0.1; // γ/10
        let next = rk4_step(&net, &state, dt).unwrap();
        for i in 0..4 {
            let exact = state.frequency[i] * (-dt).exp();
            let rel = ((next.frequency[i] - exact) / exact).abs();
            assert!(rel < 1e-7, "relative error {rel}");
        }
    }

    #[test]
    fn zero_field_is_fixed_point() {
        let net = OscillatorNetwork::new(
            vec![1.0; 3],
            vec![1.0; 3],
            vec![0.0; 3],
            0.0,
            Array2::zeros((3, 3)),
            Array2::zeros((3, 3)),
        );
        let state = EnsembleState {
            time: 0.0,
            phase: vec![0.3, 1.4, -0.8],
            frequency: vec![0.0; 3],
        };
        let next = rk4_step(&net, &state, 0.5).unwrap();
        assert_eq!(next.phase, state.phase);
        assert_eq!(next.frequency, state.frequency);
        assert_eq!(next.time, 0.5);
    }

    #[test]
    fn rk4_global_order_is_four() {
        let mut net = reference_network();
        // Nonstiff variant: γ = 0.1, K = 2.
        net.inertia = net.damping.iter().map(|d| 0.1 * d).collect();
        net.coupling = 2.0;
        let initial = reference_initial();
        let run = |dt: f64| {
            simulate(&net, &initial, dt, 1.0, step_count(1.0, dt), None)
                .unwrap()
                .samples
                .last()
                .unwrap()
                .0
                .clone()
        };
        let reference = run(0.02 / 8.0);
        let error = |s: &EnsembleState| {
            s.phase
                .iter()
                .chain(&s.frequency)
                .zip(reference.phase.iter().chain(&reference.frequency))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max)
        };
        let e1 = error(&run(0.02));
        let e2 = error(&run(0.01));
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn simulate_constant_when_uncoupled_and_quiescent() {
        let net = OscillatorNetwork::new(
            vec![1.0; 3],
            vec![1.0; 3],
            vec![0.0; 3],
            0.0,
            Array2::from_elem((3, 3), 1.0),
            Array2::zeros((3, 3)),
        );
        let initial = EnsembleState {
            time: 0.0,
            phase: vec![0.1, 0.9, 2.2],
            frequency: vec![0.0; 3],
        };
        let record = simulate(&net, &initial, 0.01, 1.0, 10, None).unwrap();
        for (state, _) in &record.samples {
            assert_eq!(state.phase, initial.phase);
            assert_eq!(state.frequency, initial.frequency);
        }
    }

    #[test]
    fn simulate_is_deterministic() {
        let net = reference_network();
        let initial = reference_initial();
        let a = simulate(&net, &initial, 1e-7, 1e-4, 10, None).unwrap();
        let b = simulate(&net, &initial, 1e-7, 1e-4, 10, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn simulate_blow_up_reports_step() {
        let net = reference_network();
        let initial = reference_initial();
        // dt at ~10^6 times the stability limit amplifies by ~10^22 per
        // step and overflows within a couple dozen steps.
        match simulate(&net, &initial, 1.0, 40.0, 1, None) {
            Err(Error::BlowUp { step }) => assert!(step < 40),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn simulate_emits_stiffness_warning() {
        let net = reference_network();
        let initial = reference_initial();
        let record = simulate(&net, &initial, 1e-5, 2e-5, 1, None);
        // Either the run blows up (acceptable for such a step) or the
        // warning must be present; with dt = 10γ RK4 is just unstable
        // enough that both outcomes are informative.
        if let Ok(record) = record {
            assert!(record.stiffness_warning.is_some());
        }
    }

    #[test]
    fn step_count_is_robust_near_integers() {
        assert_eq!(step_count(0.2, 1e-7), 2_000_000);
        assert_eq!(step_count(1.0, 0.02), 50);
        assert_eq!(step_count(0.19999, 1e-4), 1999);
    }

    fn synthetic_trajectory(d_thetas: &[f64]) -> TrajectoryRecord {
        let net = reference_network();
        let samples = d_thetas
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let state = EnsembleState {
                    time: i as f64,
                    phase: vec![0.0; 4],
                    frequency: vec![0.0; 4],
                };
                let frame = DiagnosticsFrame {
                    time: i as f64,
                    d_theta: d,
                    d_omega: 0.0,
                    d_a: 0.0,
                    d_b: 0.0,
                    e1: None,
                    e2: None,
                };
                (state, frame)
            })
            .collect();
        TrajectoryRecord {
            network: net,
            dt: 1.0,
            stride: 1,
            integrator: INTEGRATOR_NAME,
            samples,
            stiffness_warning: None,
        }
    }

    #[test]
    fn capture_detection() {
        let t = synthetic_trajectory(&[0.05, 0.05, 0.05]);
        assert_eq!(detect_capture(&t, 0.1).unwrap(), Some(0.0));

        let t = synthetic_trajectory(&[0.5, 0.3, 0.09, 0.05, 0.02]);
        assert_eq!(detect_capture(&t, 0.1).unwrap(), Some(2.0));

        let t = synthetic_trajectory(&[0.5, 0.05, 0.5, 0.4]);
        assert_eq!(detect_capture(&t, 0.1).unwrap(), None);

        let empty = TrajectoryRecord {
            samples: Vec::new(),
            ..synthetic_trajectory(&[0.1])
        };
        assert!(matches!(
            detect_capture(&empty, 0.1),
            Err(Error::EmptyTrajectory)
        ));
    }
}
