//! Static problem instances and the derived network constants.
//!
//! An [`OscillatorNetwork`] bundles everything that does not change during
//! a run: inertias, dampings, natural frequencies, the coupling strength,
//! the directed weight matrix and the frustration matrix.
//! [`OscillatorNetwork::compute_constants`] reduces an instance to the
//! handful of scalars the synchronization certificates are built from.

use std::fmt;

use ndarray::Array2;
use serde::Serialize;

/// Relative tolerance under which the inertia/damping ratios count as
/// uniform and γ is defined.
pub const GAMMA_HOMOGENEITY_TOL: f64 = 1e-12;

/// A second-order Kuramoto instance on a weighted digraph.
///
/// `weights[[i, k]]` is the weight of the edge *from k to i*, i.e. the
/// strength with which oscillator `i` listens to oscillator `k`.
/// Diagonal weights are accepted but dynamically inert (the coupling term
/// `sin(θ_i − θ_i + α_ii) = sin 0` vanishes) and they are excluded from
/// the derived constants, which range over ordered pairs `i ≠ k` only.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorNetwork {
    /// Inertia `m_i > 0` per oscillator.
    pub inertia: Vec<f64>,
    /// Damping `d_i > 0` per oscillator.
    pub damping: Vec<f64>,
    /// Natural frequency `Ω_i` per oscillator.
    pub natural_frequency: Vec<f64>,
    /// Coupling strength `K ≥ 0`.
    pub coupling: f64,
    /// Nonnegative directed weights, entry `[[i, k]]` from k to i.
    pub weights: Array2<f64>,
    /// Frustration angles `α_ik ∈ [0, π/2)`, zero on the diagonal.
    pub frustration: Array2<f64>,
}

/// Scalar constants derived from a network instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkConstants {
    /// Number of oscillators.
    pub n: usize,
    /// Pairwise connectivity constant
    /// `min_{i≠j} [ψ_ij/d_i + ψ_ji/d_j + Σ_{k≠i,j} min(ψ_ik/d_i, ψ_jk/d_j)]`.
    /// Zero means the certificates reject the instance.
    pub connectivity: f64,
    /// `ψ_u = max_{i≠j} ψ_ij/d_i`.
    pub psi_u: f64,
    /// `D_Ω = max_i Ω_i/d_i − min_i Ω_i/d_i`.
    pub d_omega: f64,
    /// `ᾱ = max_{i,j} α_ij`.
    pub alpha_bar: f64,
    /// Common inertia/damping ratio `γ = m_i/d_i`, present only when the
    /// ratios agree up to [`GAMMA_HOMOGENEITY_TOL`] (relative).
    pub gamma: Option<f64>,
}

/// One violated instance invariant, with index information.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyNetwork,
    DimensionMismatch {
        field: &'static str,
        expected: String,
        actual: String,
    },
    NonPositiveInertia {
        index: usize,
        value: f64,
    },
    NonPositiveDamping {
        index: usize,
        value: f64,
    },
    NonFiniteNaturalFrequency {
        index: usize,
        value: f64,
    },
    InvalidCoupling {
        value: f64,
    },
    InvalidWeight {
        to: usize,
        from: usize,
        value: f64,
    },
    FrustrationOutOfRange {
        to: usize,
        from: usize,
        value: f64,
    },
    NonzeroDiagonalFrustration {
        index: usize,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyNetwork => write!(f, "network must contain at least one oscillator"),
            Violation::DimensionMismatch {
                field,
                expected,
                actual,
            } => write!(f, "{field} has shape {actual}, expected {expected}"),
            Violation::NonPositiveInertia { index, value } => {
                write!(f, "inertia must be strictly positive (index {index}, value {value})")
            }
            Violation::NonPositiveDamping { index, value } => {
                write!(f, "damping must be strictly positive (index {index}, value {value})")
            }
            Violation::NonFiniteNaturalFrequency { index, value } => {
                write!(f, "natural frequency must be finite (index {index}, value {value})")
            }
            Violation::InvalidCoupling { value } => {
                write!(f, "coupling must be nonnegative and finite (value {value})")
            }
            Violation::InvalidWeight { to, from, value } => write!(
                f,
                "weight must be nonnegative and finite (to {to}, from {from}, value {value})"
            ),
            Violation::FrustrationOutOfRange { to, from, value } => write!(
                f,
                "frustration must lie in [0, π/2) (to {to}, from {from}, value {value})"
            ),
            Violation::NonzeroDiagonalFrustration { index, value } => {
                write!(f, "diagonal frustration nonzero at {index} (value {value})")
            }
        }
    }
}

impl OscillatorNetwork {
    /// Assembles an instance.
    ///
    /// # Panics
    ///
    /// Panics if the per-oscillator sequences disagree in length or the
    /// matrices are not n×n; value-level invariants are *not* checked
    /// here — run [`validate`](Self::validate) for those.
    pub fn new(
        inertia: Vec<f64>,
        damping: Vec<f64>,
        natural_frequency: Vec<f64>,
        coupling: f64,
        weights: Array2<f64>,
        frustration: Array2<f64>,
    ) -> Self {
        let n = inertia.len();
        assert_eq!(damping.len(), n, "damping length must equal inertia length");
        assert_eq!(
            natural_frequency.len(),
            n,
            "natural frequency length must equal inertia length"
        );
        assert_eq!(weights.dim(), (n, n), "weights must be n×n");
        assert_eq!(frustration.dim(), (n, n), "frustration must be n×n");
        Self {
            inertia,
            damping,
            natural_frequency,
            coupling,
            weights,
            frustration,
        }
    }

    /// Number of oscillators.
    pub fn n(&self) -> usize {
        self.inertia.len()
    }

    /// Checks every instance invariant and returns the violations found;
    /// an empty list means the instance is valid. Violations are data,
    /// not failures.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n();
        if n == 0 {
            out.push(Violation::EmptyNetwork);
        }
        for (field, len) in [
            ("damping", self.damping.len()),
            ("natural_frequency", self.natural_frequency.len()),
        ] {
            if len != n {
                out.push(Violation::DimensionMismatch {
                    field,
                    expected: format!("{n}"),
                    actual: format!("{len}"),
                });
            }
        }
        for (field, dim) in [
            ("weights", self.weights.dim()),
            ("frustration", self.frustration.dim()),
        ] {
            if dim != (n, n) {
                out.push(Violation::DimensionMismatch {
                    field,
                    expected: format!("{n}x{n}"),
                    actual: format!("{}x{}", dim.0, dim.1),
                });
            }
        }
        if !out.is_empty() {
            // Entry checks below assume consistent shapes.
            return out;
        }

        for (index, &value) in self.inertia.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                out.push(Violation::NonPositiveInertia { index, value });
            }
        }
        for (index, &value) in self.damping.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                out.push(Violation::NonPositiveDamping { index, value });
            }
        }
        for (index, &value) in self.natural_frequency.iter().enumerate() {
            if !value.is_finite() {
                out.push(Violation::NonFiniteNaturalFrequency { index, value });
            }
        }
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            out.push(Violation::InvalidCoupling {
                value: self.coupling,
            });
        }
        for ((to, from), &value) in self.weights.indexed_iter() {
            if !(value >= 0.0 && value.is_finite()) {
                out.push(Violation::InvalidWeight { to, from, value });
            }
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        for ((to, from), &value) in self.frustration.indexed_iter() {
            if to == from {
                if value != 0.0 {
                    out.push(Violation::NonzeroDiagonalFrustration { index: to, value });
                }
            } else if !(value >= 0.0 && value < half_pi) {
                out.push(Violation::FrustrationOutOfRange { to, from, value });
            }
        }
        out
    }

    /// Common inertia/damping ratio, if the ratios are uniform up to
    /// [`GAMMA_HOMOGENEITY_TOL`] relative spread.
    pub fn gamma(&self) -> Option<f64> {
        if self.n() == 0 {
            return None;
        }
        let ratios: Vec<f64> = self
            .inertia
            .iter()
            .zip(&self.damping)
            .map(|(&m, &d)| m / d)
            .collect();
        let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(max.is_finite() && min.is_finite()) {
            return None;
        }
        if max - min <= GAMMA_HOMOGENEITY_TOL * max {
            Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
        } else {
            None
        }
    }

    /// Computes every scalar constant the certificates depend on.
    ///
    /// The pairwise connectivity is an exhaustive enumeration; the
    /// defining expression is symmetric in the pair, so unordered pairs
    /// suffice. Connectivity 0 is a legal output (the instance simply
    /// fails the network condition downstream).
    pub fn compute_constants(&self) -> NetworkConstants {
        let n = self.n();
        // Damping-normalized weights w[i][k] = ψ_ik / d_i.
        let w = |i: usize, k: usize| self.weights[[i, k]] / self.damping[i];

        let mut connectivity = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut term = w(i, j) + w(j, i);
                for k in 0..n {
                    if k != i && k != j {
                        term += w(i, k).min(w(j, k));
                    }
                }
                connectivity = connectivity.min(term);
            }
        }
        if !connectivity.is_finite() {
            connectivity = 0.0; // fewer than two oscillators
        }

        let mut psi_u: f64 = 0.0;
        for i in 0..n {
            for k in 0..n {
                if i != k {
                    psi_u = psi_u.max(w(i, k));
                }
            }
        }

        let d_omega = if n == 0 {
            0.0
        } else {
            let ratios = self
                .natural_frequency
                .iter()
                .zip(&self.damping)
                .map(|(&om, &d)| om / d);
            let mut max = f64::NEG_INFINITY;
            let mut min = f64::INFINITY;
            for r in ratios {
                max = max.max(r);
                min = min.min(r);
            }
            max - min
        };

        let alpha_bar = self
            .frustration
            .iter()
            .cloned()
            .fold(0.0_f64, f64::max);

        NetworkConstants {
            n,
            connectivity,
            psi_u,
            d_omega,
            alpha_bar,
            gamma: self.gamma(),
        }
    }
}
