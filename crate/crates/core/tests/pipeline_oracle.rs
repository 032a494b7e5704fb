mod common;

use metricdim::discretization::{discretize, random_sparse_tuple, DiscretizationParams};
use metricdim::formats::DiscretizationFile;
use metricdim::geometry::NormedSpace;
use metricdim::seeding::derive_rng;

fn compare(x: &[Vec<f64>], space: &NormedSpace, params: &DiscretizationParams, seed: u64) {
    let dt = discretize(x, space, params, seed).unwrap();
    let flat: Vec<f64> = x.iter().map(|p| p[0]).collect();
    let o = common::oracle(&flat, params, seed);
    assert_eq!(dt.scales, o.scales);
    let draws: Vec<Vec<usize>> = dt.seed_sets.iter().map(|s| s.draws.clone()).collect();
    assert_eq!(draws, o.draws);
    let attempts: Vec<usize> = dt.seed_sets.iter().map(|s| s.attempts).collect();
    assert_eq!(attempts, o.attempts);
    let hats: Vec<Vec<f64>> = dt
        .projected_seeds
        .iter()
        .map(|h| h.iter().map(|p| p[0]).collect())
        .collect();
    assert_eq!(hats, o.projected_seeds);
    let seeds: Vec<f64> = dt.seed_points.iter().map(|p| p[0]).collect();
    assert_eq!(seeds, o.seed_points);
    let points: Vec<f64> = dt.points.iter().map(|p| p[0]).collect();
    assert_eq!(points, o.points);
}

#[test]
fn fixture_matches_oracle() {
    let (x, space, params) = common::fixture();
    compare(&x, &space, &params, common::FIXTURE_SEED);
}

#[test]
fn random_line_tuples_match_oracle() {
    let space = NormedSpace::linf(1);
    for trial in 0..20u64 {
        let n = 16 + 4 * (trial as usize % 5);
        let big_d = 16.0 * n as f64;
        let params = DiscretizationParams::relaxed(1.0, big_d, 3.0);
        let x = random_sparse_tuple(n, &space, 1.0, params.eps, big_d, &mut derive_rng(trial, &["line"]));
        compare(&x, &space, &params, 1000 + trial);
    }
}

#[test]
fn fixture_serializes_identically() {
    let (x, space, params) = common::fixture();
    let runs: Vec<String> = (0..3)
        .map(|_| {
            let dt = discretize(&x, &space, &params, common::FIXTURE_SEED).unwrap();
            serde_json::to_string(&DiscretizationFile::from(&dt)).unwrap()
        })
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    let back: DiscretizationFile = serde_json::from_str(&runs[0]).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), runs[0]);
}
