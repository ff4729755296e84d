//! File formats, the estimate-and-band pipeline, and the `trendband`
//! command line on top of [`trendband_core`].

pub mod cli;
mod error;
pub mod io;

pub use error::{Error, Result};
pub use trendband_core as core;

use trendband_core::design::uniform_eval_grid;
use trendband_core::{
    estimate, estimate_pointwise_variance, pointwise_band, simultaneous_band, BandKind, ConfidenceBand,
    EstimatorConfig, FunctionalSample, TrendEstimate, VarianceEstimate,
};

use crate::io::BandHeader;

/// Trend estimate on `eval_points` equispaced points spanning `[0, T]`.
pub fn estimate_trend(
    sample: &FunctionalSample,
    config: &EstimatorConfig,
    eval_points: usize,
) -> Result<TrendEstimate> {
    let eval = uniform_eval_grid(eval_points, sample.grid().horizon());
    Ok(estimate(sample, config, &eval)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandRequest {
    pub estimator: EstimatorConfig,
    pub gamma: f64,
    pub eval_points: usize,
    pub kind: BandKind,
}

#[derive(Clone, Debug)]
pub struct BandOutput {
    pub trend: TrendEstimate,
    pub variance: VarianceEstimate,
    pub band: ConfidenceBand,
    pub header: BandHeader,
}

/// Trend, pointwise variance and band for `sample`, all on the same grid.
pub fn build_band(sample: &FunctionalSample, request: &BandRequest) -> Result<BandOutput> {
    let trend = estimate_trend(sample, &request.estimator, request.eval_points)?;
    let variance = estimate_pointwise_variance(sample, &request.estimator, &trend.eval_grid)?;
    let band = match request.kind {
        BandKind::Simultaneous => simultaneous_band(&trend, &variance, request.gamma)?,
        BandKind::Pointwise => pointwise_band(&trend, &variance, request.gamma)?,
    };
    let header = BandHeader::new(&trend, &band);
    Ok(BandOutput {
        trend,
        variance,
        band,
        header,
    })
}
