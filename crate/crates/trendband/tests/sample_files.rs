use proptest::prelude::*;
use trendband::core::{DesignGrid, FunctionalSample};
use trendband::io::{parse_sample, write_sample};

fn sample_strategy() -> impl Strategy<Value = FunctionalSample> {
    (2usize..12, 1usize..6, 0.5f64..10.0, any::<bool>()).prop_flat_map(|(p, n, horizon, open_right)| {
        (
            proptest::collection::vec(0.0f64..1.0, p),
            proptest::collection::vec(
                prop_oneof![
                    -1e6f64..1e6,
                    -1e-9f64..1e-9,
                    any::<f64>().prop_filter("finite", |x| x.is_finite())
                ],
                n * p,
            ),
        )
            .prop_filter_map("distinct grid", move |(mut u, data)| {
                u.sort_by(f64::total_cmp);
                u.dedup();
                if u.len() < 2 {
                    return None;
                }
                let last = *u.last().unwrap();
                let pts: Vec<f64> = u
                    .iter()
                    .map(|x| x / last * horizon * if open_right { 0.9 } else { 1.0 })
                    .collect();
                if pts.windows(2).any(|w| w[1] <= w[0]) {
                    return None;
                }
                let p = pts.len();
                let grid = DesignGrid::new(pts, horizon).ok()?;
                FunctionalSample::new(data[..(data.len() / p.max(1)).min(n) * p].to_vec(), grid).ok()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sample_round_trip_is_bit_exact(sample in sample_strategy()) {
        let mut buf = Vec::new();
        write_sample(&mut buf, &sample).unwrap();
        let back = parse_sample(&buf[..]).unwrap();
        prop_assert_eq!(back.grid().horizon().to_bits(), sample.grid().horizon().to_bits());
        prop_assert_eq!(back.grid().points(), sample.grid().points());
        let bits = |s: &FunctionalSample| s.data().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&back), bits(&sample));
    }
}
