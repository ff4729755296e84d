//! Monte Carlo experiments: band coverage, normality of the normalized
//! estimation error at a fixed time, and the insensitivity of its variance to
//! the grid size.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use super::gp::{GPModel, GpSampler};
use super::noise::NoiseModel;
use super::rng::{replication_seed, stream_rng, NOISE_STREAM, PATH_STREAM};
use crate::bands::{pointwise_radius, simultaneous_radius};
use crate::covariance::smoothed_curve_variance;
use crate::design::{uniform_eval_grid, DesignGrid, FunctionalSample};
use crate::error::{Error, Result};
use crate::estimators::{EstimatorConfig, LinearSmoother, DEFAULT_EVAL_POINTS};
use crate::float::sqrt;
use crate::stats::{ks_distance_normal, Moments};

/// Minimum replication count for [`normality_diagnostic`].
pub const MIN_NORMALITY_REPLICATIONS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverageConfig {
    pub model: GPModel,
    pub noise: NoiseModel,
    pub n: usize,
    pub p: usize,
    pub estimator: EstimatorConfig,
    pub gamma: f64,
    pub replications: usize,
    pub eval_points: usize,
    pub seed: u64,
}

impl CoverageConfig {
    pub fn new(
        model: GPModel,
        noise: NoiseModel,
        n: usize,
        p: usize,
        gamma: f64,
        replications: usize,
        seed: u64,
    ) -> Self {
        CoverageConfig {
            model,
            noise,
            n,
            p,
            estimator: EstimatorConfig::default(),
            gamma,
            replications,
            eval_points: DEFAULT_EVAL_POINTS,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverageReport {
    pub config: CoverageConfig,
    pub replications: usize,
    pub bandwidth: f64,
    pub simultaneous_radius: f64,
    pub pointwise_radius: f64,
    /// Fraction of replications whose simultaneous band covers `μ` at every evaluation time.
    pub simultaneous_coverage: f64,
    /// Coverage of the simultaneous band averaged over evaluation times and replications.
    pub pointwise_coverage: f64,
    /// Fraction of replications whose pointwise band covers `μ` at every evaluation time.
    pub pointwise_band_simultaneous_coverage: f64,
    /// Coverage of the pointwise band averaged over evaluation times and replications.
    pub pointwise_band_pointwise_coverage: f64,
    /// Simultaneous-band half-width averaged over evaluation times and replications.
    pub mean_half_width: f64,
    /// Per replication, `sup_t |μ̂(t) - μ(t)| / (R̂(t,t)/n)^{1/2}`.
    pub sup_deviations: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalityConfig {
    pub model: GPModel,
    pub noise: NoiseModel,
    pub n: usize,
    pub p: usize,
    pub estimator: EstimatorConfig,
    pub t0: f64,
    pub replications: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalityReport {
    pub config: NormalityConfig,
    pub bandwidth: f64,
    /// `R(t0, t0)` of the model.
    pub model_variance: f64,
    /// Sample moments of `n^{1/2} (μ̂(t0) - μ(t0))`.
    pub mean: f64,
    pub variance: f64,
    pub variance_ratio: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// Kolmogorov–Smirnov distance to `N(0, R(t0, t0))`.
    pub ks_distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateCheckConfig {
    pub model: GPModel,
    pub noise: NoiseModel,
    pub n: usize,
    pub p_list: Vec<usize>,
    pub estimator: EstimatorConfig,
    pub t0: f64,
    pub replications: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateEntry {
    pub p: usize,
    pub bandwidth: f64,
    /// Empirical variance of `μ̂(t0)`.
    pub variance: f64,
    /// `n` times the empirical variance.
    pub scaled_variance: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateCheckReport {
    pub config: RateCheckConfig,
    pub entries: Vec<RateEntry>,
    /// Largest over smallest empirical variance across `p_list`.
    pub variance_ratio: f64,
    /// Variance ratio a `1/(n p h)` rate would predict across `p_list`.
    pub nph_predicted_ratio: f64,
}

/// Runs `job(r)` for `r in 0..count`, returning results in replication order.
/// The first failing replication (by index) is reported.
fn run_replications<T, F>(count: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    let results: Vec<Result<T>> = {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(&job).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<T>> = (0..count).map(&job).collect();

    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::Replication {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Shared per-experiment state: the factorized model and the design grid.
struct Simulator<'a> {
    grid: DesignGrid,
    sampler: GpSampler,
    noise: &'a NoiseModel,
    n: usize,
}

impl<'a> Simulator<'a> {
    fn new(model: &GPModel, noise: &'a NoiseModel, n: usize, p: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        noise.validate()?;
        let grid = DesignGrid::equispaced(p, model.horizon)?;
        let sampler = GpSampler::new(model, &grid)?;
        Ok(Simulator {
            grid,
            sampler,
            noise,
            n,
        })
    }

    fn sample(&self, seed: u64) -> Result<FunctionalSample> {
        let mut data = self.sampler.sample(&mut stream_rng(seed, PATH_STREAM), self.n);
        self.noise.apply(&mut data, &mut stream_rng(seed, NOISE_STREAM));
        FunctionalSample::new(data.into_vec(), self.grid.clone())
    }
}

fn check_replications(m: usize) -> Result<()> {
    if m == 0 {
        Err(Error::InvalidArgument("at least one replication is required".into()))
    } else {
        Ok(())
    }
}

struct ReplicationCoverage {
    simultaneous: bool,
    pointwise_band_simultaneous: bool,
    covered_points: usize,
    pointwise_band_covered_points: usize,
    half_width_sum: f64,
    sup_deviation: f64,
}

/// Simulate, estimate, band, and check coverage of the true mean, `M` times.
pub fn coverage_experiment(config: &CoverageConfig) -> Result<CoverageReport> {
    if config.model.is_degenerate() {
        return Err(Error::DegenerateModel(format!(
            "model '{}' has zero covariance; the band requires a non-degenerate R",
            config.model.name
        )));
    }
    check_replications(config.replications)?;
    let lambda = simultaneous_radius(config.gamma)?;
    let z = pointwise_radius(config.gamma)?;
    if config.n < 2 {
        return Err(Error::InsufficientReplicates(config.n));
    }
    let sim = Simulator::new(&config.model, &config.noise, config.n, config.p)?;
    let eval = uniform_eval_grid(config.eval_points, config.model.horizon);
    let smoother = LinearSmoother::new(&config.estimator, &sim.grid, config.n, &eval)?;
    let truth: Vec<f64> = eval.iter().map(|&t| config.model.mean_at(t)).collect();
    let nf = config.n as f64;

    let per_rep = run_replications(config.replications, |r| {
        let sample = sim.sample(replication_seed(config.seed, r))?;
        let center = smoother.apply(&sample.cross_sectional_means());
        let variance = smoothed_curve_variance(&smoother, sample.rows(), sample.n());
        let mut out = ReplicationCoverage {
            simultaneous: true,
            pointwise_band_simultaneous: true,
            covered_points: 0,
            pointwise_band_covered_points: 0,
            half_width_sum: 0.0,
            sup_deviation: 0.0,
        };
        for ((c, v), mu) in center.iter().zip(&variance).zip(&truth) {
            let se = sqrt(v / nf);
            let dev = if c > mu { c - mu } else { mu - c };
            let inside = |radius: f64| {
                let half = radius * se;
                c - half <= *mu && *mu <= c + half
            };
            if inside(lambda) {
                out.covered_points += 1;
            } else {
                out.simultaneous = false;
            }
            if inside(z) {
                out.pointwise_band_covered_points += 1;
            } else {
                out.pointwise_band_simultaneous = false;
            }
            out.half_width_sum += lambda * se;
            let standardized = if se > 0.0 {
                dev / se
            } else if dev == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            out.sup_deviation = out.sup_deviation.max(standardized);
        }
        Ok(out)
    })?;

    let m = config.replications as f64;
    let points = (config.replications * eval.len()) as f64;
    let count = |f: fn(&ReplicationCoverage) -> bool| per_rep.iter().filter(|r| f(r)).count() as f64;
    Ok(CoverageReport {
        config: config.clone(),
        replications: config.replications,
        bandwidth: smoother.bandwidth(),
        simultaneous_radius: lambda,
        pointwise_radius: z,
        simultaneous_coverage: count(|r| r.simultaneous) / m,
        pointwise_coverage: per_rep.iter().map(|r| r.covered_points as f64).sum::<f64>() / points,
        pointwise_band_simultaneous_coverage: count(|r| r.pointwise_band_simultaneous) / m,
        pointwise_band_pointwise_coverage: per_rep
            .iter()
            .map(|r| r.pointwise_band_covered_points as f64)
            .sum::<f64>()
            / points,
        mean_half_width: per_rep.iter().map(|r| r.half_width_sum).sum::<f64>() / points,
        sup_deviations: per_rep.iter().map(|r| r.sup_deviation).collect(),
    })
}

/// Estimates at `t0` in each of `M` replications, using `smoother`.
fn estimates_at_t0(sim: &Simulator<'_>, smoother: &LinearSmoother, replications: usize, seed: u64) -> Result<Vec<f64>> {
    run_replications(replications, |r| {
        let sample = sim.sample(replication_seed(seed, r))?;
        Ok(smoother.apply(&sample.cross_sectional_means())[0])
    })
}

fn check_t0(t0: f64, horizon: f64) -> Result<()> {
    if (0.0..=horizon).contains(&t0) {
        Ok(())
    } else {
        Err(Error::Domain { t: t0, horizon })
    }
}

/// Distribution of `n^{1/2}(μ̂(t0) - μ(t0))` across `M` replications,
/// compared with `N(0, R(t0, t0))`.
pub fn normality_diagnostic(config: &NormalityConfig) -> Result<NormalityReport> {
    if config.replications < MIN_NORMALITY_REPLICATIONS {
        return Err(Error::InvalidArgument(format!(
            "normality diagnostic needs at least {MIN_NORMALITY_REPLICATIONS} replications, got {}",
            config.replications
        )));
    }
    check_t0(config.t0, config.model.horizon)?;
    let sim = Simulator::new(&config.model, &config.noise, config.n, config.p)?;
    let smoother = LinearSmoother::new(&config.estimator, &sim.grid, config.n, &[config.t0])?;
    let mu = config.model.mean_at(config.t0);
    let root_n = sqrt(config.n as f64);
    let stats: Vec<f64> = estimates_at_t0(&sim, &smoother, config.replications, config.seed)?
        .into_iter()
        .map(|v| root_n * (v - mu))
        .collect();
    let moments = Moments::of(&stats).expect("at least 100 replications");
    let model_variance = config.model.variance_at(config.t0);
    Ok(NormalityReport {
        config: config.clone(),
        bandwidth: smoother.bandwidth(),
        model_variance,
        mean: moments.mean,
        variance: moments.variance,
        variance_ratio: moments.variance / model_variance,
        skewness: moments.skewness,
        excess_kurtosis: moments.excess_kurtosis,
        ks_distance: ks_distance_normal(&stats, 0.0, model_variance),
    })
}

/// Empirical variance of `μ̂(t0)` for a fixed `n` across increasing grid sizes.
pub fn rate_check(config: &RateCheckConfig) -> Result<RateCheckReport> {
    check_replications(config.replications)?;
    if config.replications < 2 {
        return Err(Error::InvalidArgument(
            "rate check needs at least 2 replications".into(),
        ));
    }
    if config.p_list.is_empty() || config.p_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "p_list must be non-empty and strictly increasing".into(),
        ));
    }
    check_t0(config.t0, config.model.horizon)?;

    let mut entries = Vec::with_capacity(config.p_list.len());
    for &p in &config.p_list {
        let sim = Simulator::new(&config.model, &config.noise, config.n, p)?;
        let smoother = LinearSmoother::new(&config.estimator, &sim.grid, config.n, &[config.t0])?;
        let values = estimates_at_t0(&sim, &smoother, config.replications, config.seed)?;
        let variance = Moments::of(&values).expect("at least 2 replications").variance;
        entries.push(RateEntry {
            p,
            bandwidth: smoother.bandwidth(),
            variance,
            scaled_variance: config.n as f64 * variance,
        });
    }

    let ratio = |f: fn(&RateEntry) -> f64| {
        let hi = entries.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        let lo = entries.iter().map(f).fold(f64::INFINITY, f64::min);
        hi / lo
    };
    Ok(RateCheckReport {
        config: config.clone(),
        variance_ratio: ratio(|e| e.variance),
        nph_predicted_ratio: ratio(|e| e.p as f64 * e.bandwidth),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Bandwidth;
    use crate::simulation::gp::MeanFunction;
    use alloc::vec;

    fn small_coverage(seed: u64) -> CoverageConfig {
        let mut c = CoverageConfig::new(GPModel::ou(1.0), NoiseModel::iid(0.25), 30, 40, 0.1, 40, seed);
        c.eval_points = 51;
        c
    }

    #[test]
    fn coverage_is_deterministic() {
        let a = coverage_experiment(&small_coverage(3)).unwrap();
        let b = coverage_experiment(&small_coverage(3)).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a.simultaneous_coverage));
        assert_eq!(a.sup_deviations.len(), 40);
        let hits = a.sup_deviations.iter().filter(|&&d| d <= a.simultaneous_radius).count();
        assert_eq!(hits as f64 / 40.0, a.simultaneous_coverage);
    }

    #[test]
    fn coverage_monotone_in_gamma() {
        let mut wide = small_coverage(9);
        wide.gamma = 0.05;
        let mut narrow = small_coverage(9);
        narrow.gamma = 0.2;
        let a = coverage_experiment(&wide).unwrap();
        let b = coverage_experiment(&narrow).unwrap();
        assert!(a.simultaneous_coverage >= b.simultaneous_coverage);
        assert!(a.simultaneous_coverage >= a.pointwise_band_simultaneous_coverage);
    }

    #[test]
    fn degenerate_model_is_rejected() {
        let mut c = small_coverage(1);
        c.model = GPModel::preset("deterministic", 1.0).unwrap();
        c.noise = NoiseModel::none();
        assert!(matches!(coverage_experiment(&c), Err(Error::DegenerateModel(_))));
    }

    #[test]
    fn replication_errors_carry_index() {
        let mut c = small_coverage(1);
        c.estimator = EstimatorConfig::local_linear(Bandwidth::Fixed(0.001));
        // the degenerate window is caught before any replication runs
        assert!(matches!(coverage_experiment(&c), Err(Error::DegenerateWindow { .. })));

        let err = run_replications(5, |r| if r >= 2 { Err(Error::GridMismatch) } else { Ok(r) }).unwrap_err();
        assert_eq!(
            err,
            Error::Replication {
                index: 2,
                source: Box::new(Error::GridMismatch)
            }
        );
    }

    #[test]
    fn normality_argument_checks() {
        let c = NormalityConfig {
            model: GPModel::ou(1.0),
            noise: NoiseModel::none(),
            n: 10,
            p: 20,
            estimator: EstimatorConfig::default(),
            t0: 0.5,
            replications: 99,
            seed: 1,
        };
        assert!(matches!(normality_diagnostic(&c), Err(Error::InvalidArgument(_))));
        let c = NormalityConfig {
            replications: 100,
            t0: 2.0,
            ..c
        };
        assert!(matches!(normality_diagnostic(&c), Err(Error::Domain { .. })));
    }

    #[test]
    fn normality_without_noise_small() {
        let c = NormalityConfig {
            model: GPModel::ou(1.0).with_mean(MeanFunction::Zero),
            noise: NoiseModel::none(),
            n: 20,
            p: 50,
            estimator: EstimatorConfig::default(),
            t0: 0.5,
            replications: 400,
            seed: 17,
        };
        let r = normality_diagnostic(&c).unwrap();
        assert_eq!(r.model_variance, 1.0);
        assert!(r.variance_ratio > 0.6 && r.variance_ratio < 1.3, "{r:?}");
        assert!(r.ks_distance < 0.15);
    }

    #[test]
    fn rate_check_rejects_unordered_list() {
        let c = RateCheckConfig {
            model: GPModel::ou(1.0),
            noise: NoiseModel::none(),
            n: 10,
            p_list: vec![50, 20],
            estimator: EstimatorConfig::default(),
            t0: 0.5,
            replications: 10,
            seed: 1,
        };
        assert!(rate_check(&c).is_err());
    }
}
