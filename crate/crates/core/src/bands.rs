//! Confidence bands for the trend.
//!
//! The simultaneous band is `μ̂(t) ± λ_γ (R̂(t, t) / n)^{1/2}` with
//! `λ_γ = (-2 log(γ/2))^{1/2}`, the radius at which the Gaussian-supremum tail
//! approximation [`tail_bound`] equals `γ`. Simultaneity holds over the
//! evaluation grid only; the continuum is approximated by that grid.

use alloc::vec::Vec;
use core::fmt;

use crate::covariance::VarianceEstimate;
use crate::error::{Error, Result};
use crate::estimators::TrendEstimate;
use crate::float::{exp, ln, sqrt};
use crate::stats::normal_quantile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum BandKind {
    Simultaneous,
    Pointwise,
}

impl fmt::Display for BandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BandKind::Simultaneous => "simultaneous",
            BandKind::Pointwise => "pointwise",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfidenceBand {
    pub eval_grid: Vec<f64>,
    pub center: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Nominal coverage `1 - γ`.
    pub level: f64,
    pub gamma: f64,
    pub n: usize,
    pub kind: BandKind,
}

impl ConfidenceBand {
    pub fn half_widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.upper.iter().zip(&self.center).map(|(u, c)| u - c)
    }

    /// Whether `truth` (sampled on the band's grid) lies inside the band everywhere.
    pub fn contains_all(&self, truth: &[f64]) -> bool {
        truth
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }
}

/// `2 exp(-λ²/2)`: two-sided tail approximation for the supremum of a
/// standardized Gaussian process.
pub fn tail_bound(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(2.0 * exp(-0.5 * lambda * lambda))
}

/// Radius `λ_γ = (-2 log(γ/2))^{1/2}`, the inverse of [`tail_bound`].
pub fn simultaneous_radius(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(sqrt(-2.0 * ln(gamma / 2.0)))
}

/// Normal quantile `z_{1-γ/2}`.
pub fn pointwise_radius(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(normal_quantile(1.0 - gamma / 2.0))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLevel(gamma))
    }
}

/// Simultaneous band `μ̂(t) ± (-2 log(γ/2) R̂(t,t) / n)^{1/2}`.
pub fn simultaneous_band(trend: &TrendEstimate, variance: &VarianceEstimate, gamma: f64) -> Result<ConfidenceBand> {
    let radius = simultaneous_radius(gamma)?;
    build(trend, variance, gamma, radius, BandKind::Simultaneous)
}

/// Pointwise band `μ̂(t) ± z_{1-γ/2} (R̂(t,t) / n)^{1/2}`.
pub fn pointwise_band(trend: &TrendEstimate, variance: &VarianceEstimate, gamma: f64) -> Result<ConfidenceBand> {
    let radius = pointwise_radius(gamma)?;
    build(trend, variance, gamma, radius, BandKind::Pointwise)
}

fn build(
    trend: &TrendEstimate,
    variance: &VarianceEstimate,
    gamma: f64,
    radius: f64,
    kind: BandKind,
) -> Result<ConfidenceBand> {
    if trend.eval_grid != variance.eval_grid || trend.values.len() != variance.values.len() {
        return Err(Error::GridMismatch);
    }
    if trend.n == 0 {
        return Err(Error::InsufficientReplicates(0));
    }
    let nf = trend.n as f64;
    let (lower, upper) = trend
        .values
        .iter()
        .zip(&variance.values)
        .map(|(&c, &r)| {
            let half = radius * sqrt(r.max(0.0) / nf);
            (c - half, c + half)
        })
        .unzip();
    Ok(ConfidenceBand {
        eval_grid: trend.eval_grid.clone(),
        center: trend.values.clone(),
        lower,
        upper,
        level: 1.0 - gamma,
        gamma,
        n: trend.n,
        kind,
    })
}
