//! Gaussian intrinsic entanglement (GIE) for two-mode Gaussian states.
//!
//! The crate works with covariance matrices in vacuum-normalized units: the
//! vacuum state has CM equal to the identity and a state is pure exactly when
//! all of its symplectic eigenvalues equal 1. First moments are ignored
//! throughout (they carry no entanglement).
//!
//! Layout:
//!
//! * [`gaussian`] — standard-form states, physicality/entanglement tests,
//!   symplectic spectra, Williamson diagonalization, purification.
//! * [`conditioning`] — Gaussian measurement CMs, conditional states after a
//!   measurement on the purifying mode, standard-form extraction.
//! * [`engine`] — the GIE machinery: homodyne-optimality criterion, upper
//!   bound via h-minimization, lower bound via the K_h(Q) minimization, and
//!   closed-form dispatch for the solved state classes.
//! * [`measures`] — logarithmic negativity and Gaussian Renyi-2 entanglement
//!   of formation for states with three-mode purifications.
//! * [`oracle`] — brute-force grid/refinement evaluation of the sup-inf
//!   defining GIE, used as ground truth for every closed form.
//! * [`catalog`], [`scan`] — reference states with expected values and the
//!   seeded conjecture scan.
//!
//! All logarithms are natural; every quantity is in nats.

pub mod catalog;
pub mod conditioning;
pub mod engine;
pub mod expr;
pub mod gaussian;
pub mod measures;
pub mod oracle;
pub mod report;
pub mod scan;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state parameters: {0}")]
    InvalidState(String),
    #[error("state is not physical")]
    NonPhysical,
    #[error("state is not in restricted standard form (requires kx >= kp > 0)")]
    NonStandard,
    #[error("operation requires a GLEMS state (nu2 = 1)")]
    NotGlems,
    #[error("no closed-form bound for this state; use the oracle")]
    NoClosedForm,
    #[error("measurement limit tag has no finite covariance matrix")]
    LimitTag,
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use conditioning::{CondStdParams, MeasLimit, SingleModeMeasurement};
pub use engine::{GieMethod, GieReport};
pub use gaussian::{
    PurificationCM, StateClass, StdTwoModeState, SymplecticDecomposition, SymplecticInvariants,
    WilliamsonCase,
};
pub use report::Analysis;
