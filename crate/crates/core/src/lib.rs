//! Beta and gamma processes built from Lévy measure decompositions.
//!
//! Each process is written as a countable superposition of finite Poisson
//! processes whose jumps follow proper beta or gamma laws. The crate
//! simulates those superpositions round by round, evaluates their exact
//! moments and truncation errors, runs the beta-process posterior updates,
//! and ships independent numerical oracles that check every decomposition.
//!
//! Modules:
//! - [`measures`]: domains, finite measures, point measures, random streams
//! - [`beta`]: beta and stable-beta processes, finite-`N` IBP densities
//! - [`gamma`]: gamma, generalized-gamma and symmetric-gamma processes
//! - [`truncation`]: closed-form truncation errors and bounds
//! - [`posterior`]: Bernoulli-process data and the beta-process posterior
//! - [`verify`]: Lévy densities, quadrature, Monte Carlo and KS oracles

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beta;
pub mod error;
pub mod gamma;
pub mod measures;
pub mod posterior;
pub mod sampling;
pub mod truncation;
pub mod verify;

pub use error::{Error, Result};

/// Mean and variance of a random mass `X(A)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}
