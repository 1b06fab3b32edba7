mod common;

use common::{oracle, pairs};
use proptest::prelude::*;
use swe_period::persistence::{rips_persistence_full, DistanceMatrix};
use swe_period::{rips_persistence, Cap, PointCloud};

fn cloud(rows: &[Vec<f64>]) -> PointCloud {
    PointCloud::from_rows(rows).unwrap()
}

fn random_cloud() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..=4)
        .prop_flat_map(|dim| prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), 1..=8))
}

/// Integer coordinates force many equal filtration values.
fn grid_cloud() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..=3).prop_flat_map(|dim| {
        prop::collection::vec(
            prop::collection::vec((0i32..3).prop_map(f64::from), dim),
            1..=8,
        )
    })
}

fn assert_matches_oracle(rows: &[Vec<f64>], cap: Cap) -> Result<(), TestCaseError> {
    let diag = rips_persistence(&cloud(rows), cap).unwrap();
    let c = match cap {
        Cap::Auto => oracle::enclosing_radius(rows),
        Cap::Value(c) => c,
    };
    let (h0, h1) = oracle::diagram(rows, c);
    prop_assert_eq!(pairs(&diag, 0), h0);
    prop_assert_eq!(pairs(&diag, 1), h1);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_oracle_at_enclosing_radius(rows in random_cloud()) {
        assert_matches_oracle(&rows, Cap::Auto)?;
    }

    #[test]
    fn matches_oracle_at_any_cap(rows in random_cloud(), cap in 0.05f64..4.0) {
        assert_matches_oracle(&rows, Cap::Value(cap))?;
    }

    #[test]
    fn matches_oracle_with_ties(rows in grid_cloud(), cap in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0])) {
        assert_matches_oracle(&rows, Cap::Value(cap))?;
        assert_matches_oracle(&rows, Cap::Auto)?;
    }

    #[test]
    fn permutation_invariance(rows in random_cloud(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let c = cloud(&rows);
        let mut perm: Vec<usize> = (0..c.len()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = rips_persistence(&c, Cap::Auto).unwrap();
        let b = rips_persistence(&c.select(&perm), Cap::Auto).unwrap();
        prop_assert_eq!(pairs(&a, 0), pairs(&b, 0));
        prop_assert_eq!(pairs(&a, 1), pairs(&b, 1));
    }

    #[test]
    fn isometry_invariance(
        rows in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 3..=12),
        angle in 0.0f64..std::f64::consts::TAU,
        shift in prop::collection::vec(-5.0f64..5.0, 2),
    ) {
        let (s, c) = angle.sin_cos();
        let moved: Vec<Vec<f64>> = rows
            .iter()
            .map(|p| vec![c * p[0] - s * p[1] + shift[0], s * p[0] + c * p[1] + shift[1]])
            .collect();
        // fixed cap keeps both filtrations on the same simplices
        let a = rips_persistence_full(&cloud(&rows), Cap::Value(10.0)).unwrap();
        let b = rips_persistence_full(&cloud(&moved), Cap::Value(10.0)).unwrap();
        for dim in 0..2 {
            let (pa, pb) = (pairs(&a, dim), pairs(&b, dim));
            let la: Vec<f64> = pa.iter().map(|(b, d)| d - b).filter(|l| l.is_finite() && *l > 1e-9).collect();
            let lb: Vec<f64> = pb.iter().map(|(b, d)| d - b).filter(|l| l.is_finite() && *l > 1e-9).collect();
            prop_assert_eq!(la.len(), lb.len());
            let (mut la, mut lb) = (la, lb);
            la.sort_by(f64::total_cmp);
            lb.sort_by(f64::total_cmp);
            for (x, y) in la.iter().zip(&lb) {
                prop_assert!((x - y).abs() < 1e-9, "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn scaling_scales_every_interval(rows in random_cloud(), factor in 0.1f64..10.0) {
        let scaled: Vec<Vec<f64>> = rows.iter().map(|p| p.iter().map(|x| x * factor).collect()).collect();
        let a = rips_persistence_full(&cloud(&rows), Cap::Auto).unwrap();
        let b = rips_persistence_full(&cloud(&scaled), Cap::Auto).unwrap();
        for dim in 0..2 {
            let (pa, pb) = (pairs(&a, dim), pairs(&b, dim));
            prop_assert_eq!(pa.len(), pb.len());
            for ((b0, d0), (b1, d1)) in pa.iter().zip(&pb) {
                prop_assert!((b0 * factor - b1).abs() <= 1e-9 * (1.0 + b1.abs()));
                if d0.is_finite() {
                    prop_assert!((d0 * factor - d1).abs() <= 1e-9 * (1.0 + d1.abs()));
                } else {
                    prop_assert!(d1.is_infinite());
                }
            }
        }
    }

    #[test]
    fn full_h0_has_one_interval_per_point(rows in random_cloud()) {
        let diag = rips_persistence_full(&cloud(&rows), Cap::Auto).unwrap();
        prop_assert_eq!(diag.h0.len(), rows.len());
        prop_assert_eq!(diag.h0.iter().filter(|iv| !iv.is_finite()).count(), 1);
        prop_assert!(diag.h0.iter().chain(&diag.h1).all(|iv| iv.death >= iv.birth));
    }

    #[test]
    fn h1_dies_by_enclosing_radius(rows in random_cloud()) {
        let c = cloud(&rows);
        let r = DistanceMatrix::from_cloud(&c).enclosing_radius();
        let diag = rips_persistence(&c, Cap::Auto).unwrap();
        prop_assert!(diag.h1.iter().all(|iv| iv.death <= r));
    }
}

#[test]
fn regular_polygons_have_one_cycle() {
    for n in [5usize, 8, 13, 40] {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let diag = rips_persistence(&cloud(&rows), Cap::Auto).unwrap();
        assert_eq!(diag.h1.len(), 1, "n = {n}");
        let side = 2.0 * (std::f64::consts::PI / n as f64).sin();
        assert!((diag.h1[0].birth - side).abs() < 1e-12);
    }
}

#[test]
fn larger_cloud_matches_oracle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let rows: Vec<Vec<f64>> = (0..24)
        .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
        .collect();
    let diag = rips_persistence(&cloud(&rows), Cap::Auto).unwrap();
    let (h0, h1) = oracle::diagram(&rows, oracle::enclosing_radius(&rows));
    assert_eq!(pairs(&diag, 0), h0);
    assert_eq!(pairs(&diag, 1), h1);
}
