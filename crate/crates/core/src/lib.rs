//! Affine root systems, extended affine Weyl groups, theta-function numerics
//! and elliptic R-matrix / Dunkl-type operators, with a numerical
//! verification harness.

pub mod error;
pub mod harness;
pub mod linalg;
pub mod operator;
pub mod root_system;
pub mod theta;
pub mod weyl;

pub use error::{Error, Result};
