use alloc::format;

use rand_core::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::rng::{stream_rng, NOISE_STREAM};
use crate::error::{Error, Result};
use crate::float::sqrt;
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum NoiseKind {
    #[default]
    Iid,
    /// Stationary AR(1) along each curve with lag-one correlation `rho`.
    Ar1 { rho: f64 },
}

/// Measurement error model; the marginal variance is `sigma²` for both kinds.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseModel {
    pub sigma: f64,
    pub kind: NoiseKind,
}

impl NoiseModel {
    pub fn none() -> Self {
        NoiseModel::default()
    }

    pub fn iid(sigma: f64) -> Self {
        NoiseModel {
            sigma,
            kind: NoiseKind::Iid,
        }
    }

    pub fn ar1(sigma: f64, rho: f64) -> Self {
        NoiseModel {
            sigma,
            kind: NoiseKind::Ar1 { rho },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise sigma must be non-negative, got {}",
                self.sigma
            )));
        }
        if let NoiseKind::Ar1 { rho } = self.kind {
            if !(rho > -1.0 && rho < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "AR(1) coefficient must lie in (-1, 1), got {rho}"
                )));
            }
        }
        Ok(())
    }

    /// Adds noise to every row of `paths` in place.
    pub(crate) fn apply<R: RngCore>(&self, paths: &mut Matrix, rng: &mut R) {
        if self.sigma == 0.0 {
            return;
        }
        let sigma = self.sigma;
        for i in 0..paths.rows() {
            let row = paths.row_mut(i);
            match self.kind {
                NoiseKind::Iid => {
                    for x in row.iter_mut() {
                        let z: f64 = StandardNormal.sample(rng);
                        *x += sigma * z;
                    }
                }
                NoiseKind::Ar1 { rho } => {
                    let innovation = sigma * sqrt(1.0 - rho * rho);
                    let mut e = 0.0;
                    for (j, x) in row.iter_mut().enumerate() {
                        let z: f64 = StandardNormal.sample(rng);
                        e = if j == 0 { sigma * z } else { rho * e + innovation * z };
                        *x += e;
                    }
                }
            }
        }
    }
}

/// Returns `paths` plus measurement noise drawn from `seed`.
pub fn add_noise(paths: &Matrix, noise: &NoiseModel, seed: u64) -> Result<Matrix> {
    noise.validate()?;
    let mut out = paths.clone();
    noise.apply(&mut out, &mut stream_rng(seed, NOISE_STREAM));
    Ok(out)
}
