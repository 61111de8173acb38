//! Swap-test variational classifier with pluggable classical-to-quantum
//! encodings, a dense state-vector / density-matrix simulator, parametric
//! noise channels and dynamical-decoupling insertion.
//!
//! Qubit convention: qubit 0 is the least significant bit of a basis-state
//! index, so `|q4 q3 q2 q1 q0>` has index `q0 + 2 q1 + 4 q2 + ...`.

pub mod data;
pub mod encoders;
pub mod error;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod sim;
pub mod train;

pub use error::{Error, ErrorCategory, Result};
