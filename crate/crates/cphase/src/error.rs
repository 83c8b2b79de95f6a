//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by solvers, generators and table emitters.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unknown scheme identifier `{0}`")]
    UnknownScheme(String),

    #[error("scheme {scheme} expects {expected} photon mode(s), got {got}")]
    InvalidModeCount {
        scheme: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    #[error("{0} is a perfect square; its square root has no continued fraction")]
    PerfectSquare(u64),

    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("{check} violated at t = {t}: magnitude {magnitude:.3e}")]
    Physicality {
        check: &'static str,
        t: f64,
        magnitude: f64,
    },

    #[error("ground amplitude below the phase floor; gate phases are undefined")]
    PhaseFloor,

    #[error("gamma/g = {0} lies outside the tabulated operating regimes")]
    OutsideRegimes(f64),

    #[error("objective evaluation failed at {coords:?}: {source}")]
    Evaluation {
        coords: Vec<f64>,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
