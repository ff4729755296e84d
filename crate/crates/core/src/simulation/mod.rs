//! Gaussian-process data generator and Monte Carlo experiments.
//!
//! Every random draw is derived from a `u64` seed through [`rng::stream_rng`]:
//! replication `r` of an experiment seeded with `s` uses seed `s + r`
//! (wrapping), with the sample paths on stream 0 and the measurement noise on
//! stream 1. Replications therefore never share a generator and produce the
//! same numbers whether they run serially or in parallel.

mod experiments;
mod gp;
mod noise;
pub mod rng;

pub use experiments::{
    coverage_experiment, normality_diagnostic, rate_check, CoverageConfig, CoverageReport, NormalityConfig,
    NormalityReport, RateCheckConfig, RateCheckReport, RateEntry,
};
pub use gp::{sample_gp, Covariance, GPModel, GpSampler, MeanFunction, PathRegularity};
pub use noise::{add_noise, NoiseKind, NoiseModel};

use crate::design::{DesignGrid, FunctionalSample};
use crate::error::Result;

/// Simulates `n` noisy curves `Y_ij = X_i(t_j) + ε_ij` on `grid`.
pub fn simulate_sample(
    model: &GPModel,
    noise: &NoiseModel,
    grid: &DesignGrid,
    n: usize,
    seed: u64,
) -> Result<FunctionalSample> {
    let paths = sample_gp(model, grid, n, seed)?;
    let data = add_noise(&paths, noise, seed)?;
    FunctionalSample::new(data.into_vec(), grid.clone())
}
