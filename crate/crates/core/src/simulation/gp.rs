use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_core::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::rng::{stream_rng, PATH_STREAM};
use crate::design::DesignGrid;
use crate::error::{Error, Result};
use crate::float::{abs, exp, sin};
use crate::linalg::{Cholesky, Matrix};

/// Mean function `μ` of a simulated process.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum MeanFunction {
    Zero,
    /// `sin(2πt/T)`
    Sine,
    /// `a + b t + c t²`
    Quadratic {
        a: f64,
        b: f64,
        c: f64,
    },
}

impl MeanFunction {
    pub fn eval(&self, t: f64, horizon: f64) -> f64 {
        match *self {
            MeanFunction::Zero => 0.0,
            MeanFunction::Sine => sin(2.0 * PI * t / horizon),
            MeanFunction::Quadratic { a, b, c } => a + t * (b + c * t),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "zero" => Ok(MeanFunction::Zero),
            "sine" | "sin" => Ok(MeanFunction::Sine),
            "quadratic" => Ok(MeanFunction::Quadratic {
                a: 0.0,
                b: 1.0,
                c: -1.0,
            }),
            other => Err(Error::InvalidArgument(format!(
                "unknown mean function '{other}' (expected zero, sine or quadratic)"
            ))),
        }
    }
}

/// Covariance function `R(s, t)` of a simulated process.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Covariance {
    /// `R ≡ 0`: deterministic paths equal to the mean.
    Zero,
    /// `scale · min(s, t)`
    Brownian { scale: f64 },
    /// `scale · (min(s, t) - s t / T)`
    BrownianBridge { scale: f64 },
    /// `scale · exp(-|s - t| / range)`
    OrnsteinUhlenbeck { scale: f64, range: f64 },
    /// `scale · exp(-(s - t)² / (2 range²))`
    SquaredExponential { scale: f64, range: f64 },
}

impl Covariance {
    pub fn eval(&self, s: f64, t: f64, horizon: f64) -> f64 {
        match *self {
            Covariance::Zero => 0.0,
            Covariance::Brownian { scale } => scale * s.min(t),
            Covariance::BrownianBridge { scale } => scale * (s.min(t) - s * t / horizon),
            Covariance::OrnsteinUhlenbeck { scale, range } => scale * exp(-abs(s - t) / range),
            Covariance::SquaredExponential { scale, range } => {
                let d = s - t;
                scale * exp(-0.5 * d * d / (range * range))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let (scale, range) = match *self {
            Covariance::Zero => return Ok(()),
            Covariance::Brownian { scale } | Covariance::BrownianBridge { scale } => (scale, 1.0),
            Covariance::OrnsteinUhlenbeck { scale, range } | Covariance::SquaredExponential { scale, range } => {
                (scale, range)
            }
        };
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "covariance scale must be positive, got {scale}"
            )));
        }
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "covariance range must be positive, got {range}"
            )));
        }
        Ok(())
    }
}

/// Documented sample-path regularity of a model.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PathRegularity {
    VariationBounded,
    /// Hölder continuous with exponent `beta`.
    Holder {
        beta: f64,
    },
}

/// Gaussian process `X` with mean `μ` and covariance `R` on `[0, T]`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GPModel {
    pub name: String,
    pub mean: MeanFunction,
    pub covariance: Covariance,
    pub regularity: PathRegularity,
    pub horizon: f64,
}

impl GPModel {
    /// Ornstein–Uhlenbeck workhorse: scale 1, range 0.5, `μ(t) = sin(2πt/T)`.
    pub fn ou(horizon: f64) -> Self {
        GPModel {
            name: "ou".into(),
            mean: MeanFunction::Sine,
            covariance: Covariance::OrnsteinUhlenbeck { scale: 1.0, range: 0.5 },
            // locally Brownian: any exponent below 1/2
            regularity: PathRegularity::Holder { beta: 0.49 },
            horizon,
        }
    }

    /// Named preset with `μ(t) = sin(2πt/T)`: `ou`, `brownian`, `bridge`,
    /// `se` (squared exponential, range 0.2) or `deterministic` (`R ≡ 0`).
    pub fn preset(name: &str, horizon: f64) -> Result<Self> {
        let key = name.trim().to_ascii_lowercase();
        let (covariance, regularity) = match key.as_str() {
            "ou" => return Ok(Self::ou(horizon)),
            "brownian" => (
                Covariance::Brownian { scale: 1.0 },
                PathRegularity::Holder { beta: 0.49 },
            ),
            "bridge" => (
                Covariance::BrownianBridge { scale: 1.0 },
                PathRegularity::Holder { beta: 0.49 },
            ),
            "se" => (
                Covariance::SquaredExponential { scale: 1.0, range: 0.2 },
                PathRegularity::Holder { beta: 1.0 },
            ),
            "deterministic" => (Covariance::Zero, PathRegularity::VariationBounded),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown model '{name}' (expected ou, brownian, bridge, se or deterministic)"
                )))
            }
        };
        GPModel {
            name: key,
            mean: MeanFunction::Sine,
            covariance,
            regularity,
            horizon,
        }
        .validated()
    }

    pub fn with_mean(mut self, mean: MeanFunction) -> Self {
        self.mean = mean;
        self
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        self.covariance.validate()?;
        Ok(self)
    }

    pub fn mean_at(&self, t: f64) -> f64 {
        self.mean.eval(t, self.horizon)
    }

    pub fn covariance_at(&self, s: f64, t: f64) -> f64 {
        self.covariance.eval(s, t, self.horizon)
    }

    /// `R(t, t)`.
    pub fn variance_at(&self, t: f64) -> f64 {
        self.covariance_at(t, t)
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.covariance, Covariance::Zero)
    }

    pub fn covariance_matrix(&self, grid: &DesignGrid) -> Matrix {
        let pts = grid.points();
        Matrix::from_fn(pts.len(), pts.len(), |i, j| self.covariance_at(pts[i], pts[j]))
    }
}

/// Factorized model on a fixed grid, reusable across many draws.
#[derive(Clone, Debug)]
pub struct GpSampler {
    mean: Vec<f64>,
    factor: Option<Cholesky>,
}

impl GpSampler {
    pub fn new(model: &GPModel, grid: &DesignGrid) -> Result<Self> {
        let model = model.clone().validated()?;
        if model.horizon != grid.horizon() {
            return Err(Error::InvalidArgument(format!(
                "model horizon {} differs from grid horizon {}",
                model.horizon,
                grid.horizon()
            )));
        }
        let mean = grid.points().iter().map(|&t| model.mean_at(t)).collect();
        let factor = if model.is_degenerate() {
            None
        } else {
            Some(Cholesky::with_jitter(&model.covariance_matrix(grid))?)
        };
        Ok(GpSampler { mean, factor })
    }

    pub fn p(&self) -> usize {
        self.mean.len()
    }

    /// Draws `n` independent paths as the rows of an `n × p` matrix.
    pub fn sample<R: RngCore>(&self, rng: &mut R, n: usize) -> Matrix {
        let p = self.p();
        let mut out = Matrix::zeros(n, p);
        let mut z = vec![0.0; p];
        for i in 0..n {
            let row = out.row_mut(i);
            match &self.factor {
                Some(chol) => {
                    for v in z.iter_mut() {
                        *v = StandardNormal.sample(rng);
                    }
                    chol.mul_vec(&z, row);
                    for (x, m) in row.iter_mut().zip(&self.mean) {
                        *x += m;
                    }
                }
                None => row.copy_from_slice(&self.mean),
            }
        }
        out
    }
}

/// `n` independent draws of the model's process on `grid`, as rows.
pub fn sample_gp(model: &GPModel, grid: &DesignGrid, n: usize, seed: u64) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("at least one path is required".into()));
    }
    let sampler = GpSampler::new(model, grid)?;
    Ok(sampler.sample(&mut stream_rng(seed, PATH_STREAM), n))
}
