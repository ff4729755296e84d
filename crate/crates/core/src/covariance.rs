//! Plug-in estimates of the noise variance `σ²` and of the pointwise process
//! variance `R(t, t)`.
//!
//! `R(t, t)` is estimated by smoothing each curve with the trend estimator and
//! taking the sample variance of the smoothed curves at every evaluation time.
//! Smoothing removes the measurement noise, so no subtraction of `σ̂²` is
//! performed; `σ̂²` is reported for diagnostics only.

use alloc::vec;
use alloc::vec::Vec;

use crate::design::FunctionalSample;
use crate::error::{Error, Result};
use crate::estimators::{EstimatorConfig, LinearSmoother};

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarianceEstimate {
    pub eval_grid: Vec<f64>,
    /// `R̂(t, t)`, clamped at zero.
    pub values: Vec<f64>,
    /// First-difference estimate of the measurement-noise variance.
    pub noise_variance: f64,
    /// Smoother used on each curve.
    pub smoother: EstimatorConfig,
    /// Bandwidth the smoother resolved to.
    pub bandwidth: f64,
}

/// Rice-type first-difference estimate
/// `σ̂² = Σ_i Σ_j (Y_{i,j+1} - Y_{ij})² / (2 n (p - 1))`.
///
/// Biased upwards by the increments of the mean and of the process itself;
/// the bias vanishes as the grid refines when the paths are smooth.
pub fn estimate_noise_variance(sample: &FunctionalSample) -> Result<f64> {
    let p = sample.p();
    if p < 3 {
        return Err(Error::InsufficientGrid(p));
    }
    let ss: f64 = sample
        .rows()
        .map(|r| r.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum::<f64>())
        .sum();
    Ok((ss / (2.0 * sample.n() as f64 * (p - 1) as f64)).max(0.0))
}

/// Estimates `R(t, t)` on `eval_grid` from the spread of individually
/// smoothed curves. The smoother's automatic bandwidth is resolved for the
/// full sample size `n`, not for a single curve.
pub fn estimate_pointwise_variance(
    sample: &FunctionalSample,
    smoother: &EstimatorConfig,
    eval_grid: &[f64],
) -> Result<VarianceEstimate> {
    let n = sample.n();
    if n < 2 {
        return Err(Error::InsufficientReplicates(n));
    }
    let lin = LinearSmoother::new(smoother, sample.grid(), n, eval_grid)?;
    let noise_variance = if sample.p() >= 3 {
        estimate_noise_variance(sample)?
    } else {
        0.0
    };
    Ok(VarianceEstimate {
        eval_grid: eval_grid.to_vec(),
        values: smoothed_curve_variance(&lin, sample.rows(), n),
        noise_variance,
        smoother: *smoother,
        bandwidth: lin.bandwidth(),
    })
}

/// Sample variance (divisor `n - 1`) across curves of the smoothed curves.
pub(crate) fn smoothed_curve_variance<'a>(
    lin: &LinearSmoother,
    rows: impl Iterator<Item = &'a [f64]>,
    n: usize,
) -> Vec<f64> {
    let m = lin.eval_grid().len();
    let mut smoothed = vec![0.0; n * m];
    for (row, out) in rows.zip(smoothed.chunks_exact_mut(m)) {
        lin.apply_into(row, out);
    }
    let nf = n as f64;
    let mut mean = vec![0.0; m];
    for curve in smoothed.chunks_exact(m) {
        for (a, v) in mean.iter_mut().zip(curve) {
            *a += v;
        }
    }
    for a in &mut mean {
        *a /= nf;
    }
    let mut var = vec![0.0; m];
    for curve in smoothed.chunks_exact(m) {
        for ((s, v), mu) in var.iter_mut().zip(curve).zip(&mean) {
            let d = v - mu;
            *s += d * d;
        }
    }
    for s in &mut var {
        *s = (*s / (nf - 1.0)).max(0.0);
    }
    var
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{uniform_eval_grid, DesignGrid};
    use crate::estimators::{Bandwidth, Method};
    use crate::kernels::Kernel;
    use crate::simulation::rng::stream_rng;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn grid(p: usize) -> DesignGrid {
        DesignGrid::equispaced(p, 1.0).unwrap()
    }

    #[test]
    fn noiseless_constant_curves_have_zero_noise() {
        let s = FunctionalSample::from_rows(&[[1.0; 5], [3.0; 5]], grid(5)).unwrap();
        assert_eq!(estimate_noise_variance(&s).unwrap(), 0.0);
    }

    #[test]
    fn rice_formula_single_curve() {
        let s = FunctionalSample::from_rows(&[[0.0, 1.0, 0.0, 1.0, 0.0]], grid(5)).unwrap();
        assert_eq!(estimate_noise_variance(&s).unwrap(), 0.5);
    }

    #[test]
    fn rice_requires_three_points() {
        let s = FunctionalSample::from_rows(&[[0.0, 1.0]], grid(2)).unwrap();
        assert_eq!(estimate_noise_variance(&s), Err(Error::InsufficientGrid(2)));
    }

    #[test]
    fn rice_recovers_white_noise_variance() {
        // X ≡ 0, ε ~ N(0, 0.04), n = 50, p = 200, 200 replications
        let (n, p, reps) = (50, 200, 200);
        let g = grid(p);
        let mut total = 0.0;
        for r in 0..reps {
            let mut rng = stream_rng(1234 + r as u64, 0);
            let data: Vec<f64> = (0..n * p)
                .map(|_| 0.2 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
                .collect();
            let s = FunctionalSample::new(data, g.clone()).unwrap();
            total += estimate_noise_variance(&s).unwrap();
        }
        let mean = total / reps as f64;
        assert!((mean - 0.04).abs() <= 0.05 * 0.04, "{mean}");
    }

    #[test]
    fn identical_curves_have_zero_variance() {
        let g = grid(30);
        let row: Vec<f64> = g.points().iter().map(|t| crate::float::sin(5.0 * t)).collect();
        let s = FunctionalSample::from_rows(&[row.clone(), row.clone(), row], g).unwrap();
        let v = estimate_pointwise_variance(&s, &EstimatorConfig::default(), &uniform_eval_grid(21, 1.0)).unwrap();
        assert!(v.values.iter().all(|&x| x.abs() < 1e-28));
    }

    #[test]
    fn random_constants_give_their_sample_variance() {
        let g = grid(40);
        let levels = [0.3, -1.2, 2.5, 0.0, 4.1];
        let rows: Vec<Vec<f64>> = levels.iter().map(|&a| vec![a; 40]).collect();
        let s = FunctionalSample::from_rows(&rows, g).unwrap();
        let mean = levels.iter().sum::<f64>() / 5.0;
        let expected = levels.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / 4.0;
        let v = estimate_pointwise_variance(
            &s,
            &EstimatorConfig::local_linear(Bandwidth::Fixed(0.15)),
            &uniform_eval_grid(33, 1.0),
        )
        .unwrap();
        for x in v.values {
            assert!((x - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn needs_two_curves() {
        let s = FunctionalSample::from_rows(&[[0.0; 10]], grid(10)).unwrap();
        assert_eq!(
            estimate_pointwise_variance(&s, &EstimatorConfig::default(), &[0.5]),
            Err(Error::InsufficientReplicates(1))
        );
    }

    fn random_sample() -> impl Strategy<Value = FunctionalSample> {
        (2usize..8, 6usize..20).prop_flat_map(|(n, p)| {
            proptest::collection::vec(-5.0f64..5.0, n * p)
                .prop_map(move |data| FunctionalSample::new(data, grid(p)).unwrap())
        })
    }

    proptest! {
        #[test]
        fn variance_nonnegative_and_scales(s in random_sample(), c in 0.1f64..10.0, clark in any::<bool>()) {
            let method = if clark { Method::Clark } else { Method::LocalLinear };
            let cfg = EstimatorConfig::new(method, Kernel::Epanechnikov, Bandwidth::Fixed(0.6));
            let eval = uniform_eval_grid(11, 1.0);
            let v = estimate_pointwise_variance(&s, &cfg, &eval).unwrap();
            prop_assert!(v.values.iter().all(|&x| x >= 0.0));

            let scaled = FunctionalSample::new(s.data().iter().map(|x| c * x).collect(), s.grid().clone()).unwrap();
            let vs = estimate_pointwise_variance(&scaled, &cfg, &eval).unwrap();
            for (a, b) in v.values.iter().zip(&vs.values) {
                prop_assert!((b - c * c * a).abs() <= 1e-10 * (1.0 + b.abs()));
            }
            prop_assert!((vs.noise_variance - c * c * v.noise_variance).abs() <= 1e-10 * (1.0 + vs.noise_variance));
        }

        #[test]
        fn common_shift_leaves_variance_unchanged(s in random_sample(), shift_scale in -3.0f64..3.0) {
            let p = s.p();
            let shift: Vec<f64> = (0..p).map(|j| shift_scale * (j as f64).sqrt()).collect();
            let data: Vec<f64> = s.rows().flat_map(|r| r.iter().zip(&shift).map(|(x, d)| x + d).collect::<Vec<_>>()).collect();
            let shifted = FunctionalSample::new(data, s.grid().clone()).unwrap();
            let cfg = EstimatorConfig::local_linear(Bandwidth::Fixed(0.6));
            let eval = uniform_eval_grid(9, 1.0);
            let a = estimate_pointwise_variance(&s, &cfg, &eval).unwrap();
            let b = estimate_pointwise_variance(&shifted, &cfg, &eval).unwrap();
            for (x, y) in a.values.iter().zip(&b.values) {
                prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
            }
        }
    }
}
