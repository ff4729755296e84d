use proptest::prelude::*;
use rand::Rng;
use trendband_core::design::uniform_eval_grid;
use trendband_core::simulation::rng::stream_rng;
use trendband_core::{
    clark_estimate, effective_weights, estimate, local_linear_estimate, Bandwidth, DesignGrid, EstimatorConfig,
    FunctionalSample, Kernel, Method,
};

/// Midpoint-rule evaluation of the boundary-corrected convolution, both
/// numerator and normalizer, with its own interpolation.
fn riemann_clark(means: &[f64], pts: &[f64], horizon: f64, h: f64, t: f64, points: usize) -> f64 {
    let step = horizon / points as f64;
    let (mut num, mut den) = (0.0, 0.0);
    let mut k = 0;
    for i in 0..points {
        let u = (i as f64 + 0.5) * step;
        let w = Kernel::Epanechnikov.eval((t - u) / h) / h;
        if w == 0.0 {
            continue;
        }
        while k < pts.len() && pts[k] <= u {
            k += 1;
        }
        let y = if k == 0 {
            means[0]
        } else if k == pts.len() {
            means[pts.len() - 1]
        } else {
            let l = (u - pts[k - 1]) / (pts[k] - pts[k - 1]);
            means[k - 1] * (1.0 - l) + means[k] * l
        };
        num += w * y;
        den += w;
    }
    num / den
}

fn random_grid(rng: &mut impl Rng, p: usize, horizon: f64) -> DesignGrid {
    let mut pts: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..horizon)).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    DesignGrid::new(pts, horizon).unwrap()
}

#[test]
fn clark_matches_riemann_oracle() {
    let mut rng = stream_rng(2024, 0);
    for _ in 0..20 {
        let horizon = rng.random_range(0.5..2.0);
        let p = rng.random_range(5..60);
        let grid = random_grid(&mut rng, p, horizon);
        let means: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let h = rng.random_range(0.02..0.5) * horizon;
        let sample = FunctionalSample::new(means.clone(), grid.clone()).unwrap();
        let ts: Vec<f64> = {
            let mut v: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..horizon)).collect();
            v.extend([0.0, horizon]);
            v.sort_by(f64::total_cmp);
            v
        };
        let est = clark_estimate(&sample, &EstimatorConfig::clark(Bandwidth::Fixed(h)), &ts).unwrap();
        for (&t, &v) in ts.iter().zip(&est.values) {
            let oracle = riemann_clark(&means, grid.points(), horizon, h, t, 1_000_000);
            assert!((v - oracle).abs() <= 1e-6, "t = {t}, h = {h}: {v} vs {oracle}");
        }
    }
}

#[test]
fn clark_linear_interior_and_oracle() {
    let grid = DesignGrid::equispaced(201, 1.0).unwrap();
    let sample = FunctionalSample::new(grid.points().to_vec(), grid.clone()).unwrap();
    let est = clark_estimate(&sample, &EstimatorConfig::clark(Bandwidth::Fixed(0.05)), &[0.5]).unwrap();
    assert!((est.values[0] - 0.5).abs() <= 1e-10);
    let oracle = riemann_clark(grid.points(), grid.points(), 1.0, 0.05, 0.5, 1_000_000);
    assert!((est.values[0] - oracle).abs() <= 1e-9);
}

#[test]
fn weights_reproduce_estimates() {
    let mut rng = stream_rng(77, 0);
    for method in [Method::Clark, Method::LocalLinear] {
        for kernel in Kernel::ALL {
            let grid = random_grid(&mut rng, 40, 1.0);
            let means: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-5.0..5.0)).collect();
            let sample = FunctionalSample::new(means.clone(), grid.clone()).unwrap();
            let config = EstimatorConfig::new(method, kernel, Bandwidth::Fixed(0.25));
            let mut ts: Vec<f64> = (0..100).map(|_| rng.random_range(0.0..1.0)).collect();
            ts.sort_by(f64::total_cmp);
            let est = estimate(&sample, &config, &ts).unwrap();
            for (&t, &v) in ts.iter().zip(&est.values) {
                let w = effective_weights(&config, &grid, 1, t).unwrap();
                let via: f64 = w.iter().zip(&means).map(|(a, b)| a * b).sum();
                assert!((v - via).abs() <= 1e-10, "{method} {kernel} t = {t}");
            }
        }
    }
}

#[test]
fn clark_interior_weights_match_quadrature_on_random_data() {
    let grid = DesignGrid::equispaced(101, 1.0).unwrap();
    let config = EstimatorConfig::clark(Bandwidth::Fixed(0.08));
    let mut rng = stream_rng(5, 0);
    for &t in &[0.3, 0.4237, 0.5, 0.61] {
        let w = effective_weights(&config, &grid, 1, t).unwrap();
        for _ in 0..5 {
            let means: Vec<f64> = (0..101).map(|_| rng.random_range(-1.0..1.0)).collect();
            let sample = FunctionalSample::new(means.clone(), grid.clone()).unwrap();
            let v = clark_estimate(&sample, &config, &[t]).unwrap().values[0];
            let via: f64 = w.iter().zip(&means).map(|(a, b)| a * b).sum();
            assert!((v - via).abs() <= 1e-12);
        }
    }
}

#[test]
fn local_linear_reproduces_lines_including_boundaries() {
    let grid = DesignGrid::equispaced(101, 1.0).unwrap();
    let means: Vec<f64> = grid.points().iter().map(|t| 2.0 + 3.0 * t).collect();
    let sample = FunctionalSample::new(means, grid).unwrap();
    let eval = uniform_eval_grid(401, 1.0);
    for kernel in Kernel::ALL {
        let config = EstimatorConfig::new(Method::LocalLinear, kernel, Bandwidth::Fixed(0.1));
        let est = local_linear_estimate(&sample, &config, &eval).unwrap();
        for (t, v) in eval.iter().zip(&est.values) {
            assert!((v - (2.0 + 3.0 * t)).abs() <= 1e-10, "{kernel} t = {t}");
        }
    }
}

fn nondecreasing_means() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..40).prop_flat_map(|p| {
        (
            proptest::collection::vec(0.001f64..1.0, p),
            proptest::collection::vec(0.0f64..2.0, p),
        )
            .prop_map(|(gaps, incs)| {
                let total: f64 = gaps.iter().sum::<f64>() + 0.2;
                let mut t = 0.1;
                let pts: Vec<f64> = gaps
                    .iter()
                    .map(|g| {
                        let x = t;
                        t += g;
                        x / total
                    })
                    .collect();
                let mut acc = -1.0;
                let means = incs
                    .iter()
                    .map(|d| {
                        acc += d;
                        acc
                    })
                    .collect();
                (pts, means)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clark_preserves_monotonicity((pts, means) in nondecreasing_means(), h in 0.01f64..1.0) {
        let grid = DesignGrid::new(pts, 1.0).unwrap();
        let sample = FunctionalSample::new(means, grid).unwrap();
        let eval = uniform_eval_grid(201, 1.0);
        let est = clark_estimate(&sample, &EstimatorConfig::clark(Bandwidth::Fixed(h)), &eval).unwrap();
        for w in est.values.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn estimators_are_linear(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        seed in any::<u64>(),
        clark in any::<bool>(),
    ) {
        let mut rng = stream_rng(seed, 0);
        let grid = DesignGrid::equispaced(25, 1.0).unwrap();
        let n = 4;
        let da: Vec<f64> = (0..n * 25).map(|_| rng.random_range(-2.0..2.0)).collect();
        let db: Vec<f64> = (0..n * 25).map(|_| rng.random_range(-2.0..2.0)).collect();
        let dc: Vec<f64> = da.iter().zip(&db).map(|(x, y)| a * x + b * y).collect();
        let method = if clark { Method::Clark } else { Method::LocalLinear };
        let config = EstimatorConfig::new(method, Kernel::Biweight, Bandwidth::Fixed(0.2));
        let eval = uniform_eval_grid(33, 1.0);
        let run = |d: Vec<f64>| estimate(&FunctionalSample::new(d, grid.clone()).unwrap(), &config, &eval).unwrap().values;
        let (ea, eb, ec) = (run(da), run(db), run(dc));
        for i in 0..eval.len() {
            prop_assert!((ec[i] - (a * ea[i] + b * eb[i])).abs() <= 1e-10);
        }
    }

    #[test]
    fn permuting_curves_changes_nothing(seed in any::<u64>(), clark in any::<bool>()) {
        let mut rng = stream_rng(seed, 0);
        let p = 30;
        let n = 9;
        let grid = DesignGrid::equispaced(p, 1.0).unwrap();
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random_range(-1e3..1e3)).collect()).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let shuffled: Vec<Vec<f64>> = perm.iter().map(|&i| rows[i].clone()).collect();
        let method = if clark { Method::Clark } else { Method::LocalLinear };
        let config = EstimatorConfig::new(method, Kernel::Epanechnikov, Bandwidth::Auto);
        let eval = uniform_eval_grid(41, 1.0);
        let a = estimate(&FunctionalSample::from_rows(&rows, grid.clone()).unwrap(), &config, &eval).unwrap();
        let b = estimate(&FunctionalSample::from_rows(&shuffled, grid).unwrap(), &config, &eval).unwrap();
        prop_assert_eq!(a.fingerprint, b.fingerprint);
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}
