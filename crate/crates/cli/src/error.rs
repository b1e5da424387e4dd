use std::path::PathBuf;

use thiserror::Error;

/// Hard errors of the experiment harness. A failing certificate is *not*
/// an error — runs proceed and report it (exit code 2).
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Invalid(String),

    #[error("invalid network:\n{0}")]
    Network(String),

    #[error(transparent)]
    Model(#[from] kurasync::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}
