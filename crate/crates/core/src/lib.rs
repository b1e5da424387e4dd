//! Simulation and synchronization certificates for second-order Kuramoto
//! oscillators with inertia and phase frustration on weighted digraphs.
//!
//! The model integrated here is
//!
//! ```text
//! m_i θ̈_i + d_i θ̇_i = Ω_i + (K/N) Σ_k ψ_ik sin(θ_k − θ_i + α_ik)
//! ```
//!
//! with per-oscillator inertia `m_i > 0`, damping `d_i > 0`, natural
//! frequency `Ω_i`, coupling strength `K`, nonnegative directed weights
//! `ψ_ik` (from oscillator k to i), and frustration angles
//! `α_ik ∈ [0, π/2)` with zero diagonal.
//!
//! The crate is organized around four pieces:
//!
//! * [`network`] — the static problem instance and the derived scalar
//!   constants (pairwise connectivity, damping-normalized weight maximum,
//!   normalized natural-frequency spread, frustration maximum, and the
//!   homogeneous inertia/damping ratio γ when it exists).
//! * [`dynamics`] — the vector field, its acceleration and jerk
//!   extensions, a classical fixed-step RK4 integrator, and trajectory
//!   recording.
//! * [`diagnostics`] — diameter functionals, the two energy functions
//!   that control phase and frequency spread, finite-difference residual
//!   checks of the governing differential inequalities, and log-linear
//!   decay-rate fitting.
//! * [`certifier`] — evaluation of the sufficient conditions for
//!   exponential frequency synchronization and the quantitative
//!   guarantees they imply (capture-time bound, frequency bound, decay
//!   rate, and decay envelope).

pub mod certifier;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod network;

pub use certifier::{
    certify, check_a1, check_a2, envelope, guarantees, mu, search_certificate_params, A2Checks,
    CertificateReport, ConditionCheck, Guarantees,
};
pub use diagnostics::{
    diameter, energy_e1, energy_e2, fit_decay_rate, frame, gronwall_residual_e1,
    gronwall_residual_e2, residual_acceleration_diameter, residual_frequency_decay,
    residual_frequency_diameter, residual_jerk_diameter, residual_phase_diameter,
    CertificateParameters, DiagnosticsFrame, EnergyCoefficients, RateFit, ResidualCheck,
};
pub use dynamics::{
    acceleration, detect_capture, jerk, rk4_step, simulate, vector_field, EnsembleState,
    TrajectoryRecord,
};
pub use error::{Error, Result};
pub use network::{NetworkConstants, OscillatorNetwork, Violation};
