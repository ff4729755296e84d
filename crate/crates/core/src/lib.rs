//! Nonparametric estimation of the mean function of a random process from
//! `n` noisy curves observed on a common grid, with approximate simultaneous
//! confidence bands and a Gaussian-process Monte Carlo harness.
//!
//! The crate is `no_std` (with `alloc`). Enable `std` for `std::error::Error`
//! integration, `parallel` to run Monte Carlo replications on rayon, and
//! `serde` to derive (de)serialization for the public value types.
//!
//! Module map:
//! - [`kernels`]: kernel densities, closed-form CDFs, boundary normalization.
//! - [`design`]: design grid validation, cross-sectional means, interpolant.
//! - [`estimators`]: boundary-corrected convolution and local linear trend estimators.
//! - [`covariance`]: noise variance and pointwise process variance estimates.
//! - [`bands`]: simultaneous and pointwise confidence bands.
//! - [`simulation`]: Gaussian-process generator and Monte Carlo experiments.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![warn(rust_2018_idioms, missing_debug_implementations)]
// NaN must fail these checks, so `!(x > 0.0)` is intended
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bands;
pub mod covariance;
pub mod design;
mod error;
pub mod estimators;
mod float;
pub mod kernels;
pub mod linalg;
pub mod simulation;
pub mod stats;

pub use bands::{pointwise_band, simultaneous_band, tail_bound, BandKind, ConfidenceBand};
pub use covariance::{estimate_noise_variance, estimate_pointwise_variance, VarianceEstimate};
pub use design::{DesignGrid, FunctionalSample, MeshReport};
pub use error::{Error, Result};
pub use estimators::{
    clark_estimate, effective_weights, estimate, local_linear_estimate, Bandwidth, EstimatorConfig, LinearSmoother,
    Method, TrendEstimate,
};
pub use kernels::Kernel;
