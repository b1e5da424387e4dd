use thiserror::Error;

/// Errors surfaced by simulation, diagnostics and certification routines.
///
/// Invariant violations of a network instance are *not* errors; they are
/// reported as data by [`crate::network::OscillatorNetwork::validate`].
#[derive(Debug, Error)]
pub enum Error {
    /// A state vector failed validation (wrong length or non-finite entry).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// The integrator produced a non-finite state.
    #[error("blow-up at step {step} (step too large for stiffness; require dt ≲ γ)")]
    BlowUp { step: usize },

    /// An operation that needs data received an empty sequence.
    #[error("empty sequence")]
    EmptySequence,

    /// An operation that needs samples received an empty trajectory.
    #[error("empty trajectory")]
    EmptyTrajectory,

    /// The inertia/damping ratios are not uniform, so γ is undefined.
    #[error("homogeneous damping required: inertia/damping ratios are not uniform")]
    HomogeneousGammaRequired,

    /// The pairwise connectivity constant is zero; certificates need it
    /// strictly positive.
    #[error("network condition violated: pairwise connectivity constant is zero")]
    NetworkConditionViolated,

    /// A scalar argument is out of its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Not enough usable samples for the requested computation.
    #[error("insufficient samples: need at least {needed}, found {available}")]
    InsufficientSamples { needed: usize, available: usize },

    /// The envelope was queried before its anchor time.
    #[error("time {time} precedes the envelope anchor {anchor}")]
    BeforeAnchor { time: f64, anchor: f64 },

    /// A certificate precondition does not hold.
    #[error("certificate condition failed: {name} (lhs {lhs}, bound {bound})")]
    ConditionFailed {
        name: &'static str,
        lhs: f64,
        bound: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
