//! The bundled four-oscillator reference scenario: a depth-two digraph
//! with near-critical coupling whose certificate passes by a narrow,
//! deliberate margin. `repro-paper` runs exactly this instance.

use std::path::Path;

use ndarray::{arr2, Array2};

use kurasync::{CertificateParameters, EnsembleState, OscillatorNetwork};

use crate::config::{
    CertificateSpec, DtSpec, ExperimentConfig, InitialSource, InlineInitial, InlineNetwork,
    Integration, NetworkSource, Outputs,
};

pub const REFERENCE_COUPLING: f64 = 780.0;
pub const REFERENCE_GAMMA: f64 = 1e-6;
pub const REFERENCE_FRUSTRATION: f64 = 1e-6;
pub const REFERENCE_DT: f64 = 1e-7;
pub const REFERENCE_HORIZON: f64 = 0.2;
pub const REFERENCE_STRIDE: usize = 200;

const DAMPING: [f64; 4] = [0.9775, 0.9165, 0.9912, 0.9319];
// γ · d_i, spelled as literals so configs and code parse to identical bits.
const INERTIA: [f64; 4] = [9.775e-7, 9.165e-7, 9.912e-7, 9.319e-7];
const NATURAL_FREQUENCY: [f64; 4] = [0.0013, -0.0040, -0.0022, 0.0005];
const PHASE0: [f64; 4] = [2.0742, 0.0706, 0.8886, 1.0262];
const FREQUENCY0: [f64; 4] = [0.0701, 0.0117, 0.0804, -0.0161];

pub fn reference_weights() -> Array2<f64> {
    arr2(&[
        [1.0, 1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0],
        [0.0, 1.0, 1.0, 0.0],
        [0.0, 1.0, 1.0, 1.0],
    ])
}

pub fn reference_frustration() -> Array2<f64> {
    let mut frustration = Array2::from_elem((4, 4), REFERENCE_FRUSTRATION);
    for i in 0..4 {
        frustration[[i, i]] = 0.0;
    }
    frustration
}

pub fn reference_network() -> OscillatorNetwork {
    OscillatorNetwork::new(
        INERTIA.to_vec(),
        DAMPING.to_vec(),
        NATURAL_FREQUENCY.to_vec(),
        REFERENCE_COUPLING,
        reference_weights(),
        reference_frustration(),
    )
}

pub fn reference_initial() -> EnsembleState {
    EnsembleState {
        time: 0.0,
        phase: PHASE0.to_vec(),
        frequency: FREQUENCY0.to_vec(),
    }
}

/// β = 5π/6, D∞ = 0.1.
pub fn reference_certificate() -> CertificateParameters {
    CertificateParameters::new(5.0 * std::f64::consts::PI / 6.0, 0.1)
        .expect("reference parameters are admissible")
}

/// Full run configuration with outputs rooted at `out_dir`.
pub fn reference_config(out_dir: &Path) -> ExperimentConfig {
    let params = reference_certificate();
    ExperimentConfig {
        seed: 0,
        network: NetworkSource {
            inline: Some(InlineNetwork {
                inertia: INERTIA.to_vec(),
                damping: DAMPING.to_vec(),
                natural_frequency: NATURAL_FREQUENCY.to_vec(),
                coupling: REFERENCE_COUPLING,
                weights: reference_weights()
                    .rows()
                    .into_iter()
                    .map(|r| r.to_vec())
                    .collect(),
                frustration: reference_frustration()
                    .rows()
                    .into_iter()
                    .map(|r| r.to_vec())
                    .collect(),
            }),
            random: None,
        },
        initial: InitialSource {
            inline: Some(InlineInitial {
                phase: PHASE0.to_vec(),
                frequency: FREQUENCY0.to_vec(),
            }),
            random: None,
        },
        integration: Integration {
            dt: DtSpec::Fixed(REFERENCE_DT),
            horizon: REFERENCE_HORIZON,
            stride: REFERENCE_STRIDE,
        },
        certificate: CertificateSpec::Explicit {
            beta: params.beta,
            d_infty: params.d_infty,
        },
        outputs: Outputs {
            timeseries: out_dir.join("timeseries.csv"),
            report: out_dir.join("report.json"),
        },
    }
}
