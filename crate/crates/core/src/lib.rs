//! Sorted L-One Penalized Estimation (SLOPE).
//!
//! The crate is organised bottom-up:
//!
//! * [`sorted_l1`] — the sorted-ℓ1 norm, its exact proximal mapping and the
//!   pool-adjacent-violators primitive it is built on.
//! * [`solver`] — proximal gradient and accelerated (FISTA) solvers with a
//!   duality-gap stopping rule.
//! * [`lambda`] — regularization sequences (BH, Gaussian-corrected, Monte Carlo,
//!   OSCAR) and the inverse normal CDF they rely on.
//! * [`inference`] — scaled SLOPE for unknown noise level, least-squares refits
//!   and multiple-testing procedures for orthogonal designs.
//! * [`simlab`] — reproducible simulation harness measuring FDP, power and
//!   prediction error.

pub mod error;
pub mod inference;
pub mod lambda;
pub mod linalg;
pub mod rng;
pub mod simlab;
pub mod solver;
pub mod sorted_l1;

pub use error::{Result, SlopeError};
pub use sorted_l1::{
    isotonic_regression, prox_sorted_l1, prox_sorted_l1_sorted_nonneg, sorted_l1_norm,
    LambdaSequence, ProxWorkspace,
};
