//! Monte Carlo checks against known covariances. Seeds are fixed up front.

use trendband_core::simulation::rng::stream_rng;
use trendband_core::simulation::{
    normality_diagnostic, rate_check, simulate_sample, GPModel, GpSampler, MeanFunction, NoiseModel, NormalityConfig,
    RateCheckConfig,
};
use trendband_core::{estimate_pointwise_variance, tail_bound, Bandwidth, DesignGrid, EstimatorConfig, Kernel, Method};

fn loclin() -> EstimatorConfig {
    EstimatorConfig::new(Method::LocalLinear, Kernel::Epanechnikov, Bandwidth::Auto)
}

#[test]
fn sup_of_smooth_gaussian_vector_respects_tail_bound() {
    let model = GPModel::preset("se", 1.0).unwrap().with_mean(MeanFunction::Zero);
    let grid = DesignGrid::equispaced(101, 1.0).unwrap();
    let sampler = GpSampler::new(&model, &grid).unwrap();
    let lambdas = [2.5, 3.0, 3.5];
    let mut exceed = [0usize; 3];
    let (chunks, per_chunk) = (10, 10_000);
    for c in 0..chunks {
        let z = sampler.sample(&mut stream_rng(1000 + c, 0), per_chunk);
        for i in 0..per_chunk {
            let sup = z.row(i).iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (k, &l) in lambdas.iter().enumerate() {
                if sup > l {
                    exceed[k] += 1;
                }
            }
        }
    }
    let m = (chunks * per_chunk as u64) as f64;
    for (k, &l) in lambdas.iter().enumerate() {
        let freq = exceed[k] as f64 / m;
        let bound = tail_bound(l).unwrap();
        println!("lambda {l}: frequency {freq:.5}, bound {bound:.5}");
        assert!(freq <= bound * 1.25, "lambda {l}: {freq} > 1.25 * {bound}");
    }
}

#[test]
fn brownian_variance_at_midpoint() {
    let model = GPModel::preset("brownian", 1.0).unwrap();
    let grid = DesignGrid::equispaced(200, 1.0).unwrap();
    let reps = 100;
    let mut hits = 0;
    for r in 0..reps {
        let sample = simulate_sample(&model, &NoiseModel::none(), &grid, 400, 500 + r).unwrap();
        let v = estimate_pointwise_variance(&sample, &loclin(), &[0.5]).unwrap().values[0];
        if (v - 0.5).abs() <= 0.15 * 0.5 {
            hits += 1;
        }
    }
    println!("within 15%: {hits}/{reps}");
    assert!(hits as f64 / reps as f64 >= 0.95, "{hits}/{reps}");
}

fn normality(noise: NoiseModel) -> NormalityConfig {
    NormalityConfig {
        model: GPModel::ou(1.0),
        noise,
        n: 200,
        p: 200,
        estimator: loclin(),
        t0: 0.5,
        replications: 1000,
        seed: 11,
    }
}

#[test]
fn noiseless_normality_arm() {
    let r = normality_diagnostic(&normality(NoiseModel::none())).unwrap();
    println!(
        "ratio {:.4} skew {:.4} kurt {:.4}",
        r.variance_ratio, r.skewness, r.excess_kurtosis
    );
    assert!((r.variance_ratio - 1.0).abs() <= 0.15);
    assert!(r.skewness.abs() <= 0.15);
    assert!(r.excess_kurtosis.abs() <= 0.3);
}

fn rate(n: usize, p_list: Vec<usize>, noise: NoiseModel) -> RateCheckConfig {
    RateCheckConfig {
        model: GPModel::ou(1.0),
        noise,
        n,
        p_list,
        estimator: loclin(),
        t0: 0.5,
        replications: 500,
        seed: 11,
    }
}

#[test]
fn noiseless_rate_arm_is_insensitive_to_p() {
    let r = rate_check(&rate(100, vec![50, 100, 200, 400], NoiseModel::none())).unwrap();
    println!("variance ratio {:.4}", r.variance_ratio);
    assert!(r.variance_ratio <= 1.3);
}

#[test]
fn doubling_n_halves_variance() {
    let small = rate_check(&rate(100, vec![100], NoiseModel::iid(0.25))).unwrap();
    let large = rate_check(&rate(200, vec![100], NoiseModel::iid(0.25))).unwrap();
    let ratio = large.entries[0].variance / small.entries[0].variance;
    println!("variance ratio n=200 / n=100: {ratio:.4}");
    assert!((ratio - 0.5).abs() <= 0.2 * 0.5, "{ratio}");
}
