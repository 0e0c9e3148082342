//! Crate-wide error type.

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid affine type {0}")]
    InvalidType(String),
    #[error("weight {0} is not antidominant; use weyl::length for general elements")]
    NotAntidominant(String),
    #[error("weight {0} is not in the lattice M-hat")]
    NotInLattice(String),
    #[error("word is not reduced: {0}")]
    NotReduced(String),
    #[error("imaginary root has no reflection or gamma class")]
    ImaginaryRoot,
    #[error("couplings are not constant on root classes: {0}")]
    Couplings(String),
    #[error("series truncated: tail bound {bound:.3e} exceeds tolerance {tol:.3e} at {terms} terms")]
    Truncation { bound: f64, tol: f64, terms: usize },
    #[error("pole: |theta_1| = {magnitude:.3e} below guard {guard:.3e}")]
    Pole { magnitude: f64, guard: f64 },
    #[error("tau must have Im(tau) >= {floor}, got {im}")]
    TauFloor { im: f64, floor: f64 },
    #[error("h_vee_mu vanishes; bar representation undefined")]
    DegenerateHVee,
    #[error("{0}")]
    Unsupported(String),
    #[error("rank-deficient sample matrix after {0} attempts")]
    RankDeficient(usize),
    #[error("configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for errors produced by series truncation or pole guards.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Truncation { .. } | Error::Pole { .. } | Error::TauFloor { .. } | Error::RankDeficient(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
