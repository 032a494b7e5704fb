//! Shared fixtures and a step-by-step reimplementation of the discretization
//! map for one-dimensional `ℓ∞` tuples. The reimplementation shares only the
//! seed stream derivation with the library; nets are listed explicitly and
//! searched exhaustively.

#![allow(dead_code)]

use metricdim::discretization::{random_sparse_tuple, DiscretizationParams};
use metricdim::geometry::NormedSpace;
use metricdim::seeding::derive_rng;
use rand::Rng;

pub const FIXTURE_SEED: u64 = 20_161_016;

/// The hand-sized fixture: 16 points of `[-64, 64]`, `λ = 1`, `L = 4`.
pub fn fixture() -> (Vec<Vec<f64>>, NormedSpace, DiscretizationParams) {
    let space = NormedSpace::linf(1);
    let params = DiscretizationParams::relaxed(1.0, 64.0, 4.0);
    let x = random_sparse_tuple(16, &space, 1.0, params.eps, 64.0, &mut derive_rng(FIXTURE_SEED, &["fixture"]));
    (x, space, params)
}

#[derive(Debug, PartialEq)]
pub struct OracleOutput {
    pub scales: Vec<i64>,
    pub draws: Vec<Vec<usize>>,
    pub attempts: Vec<usize>,
    pub projected_seeds: Vec<Vec<f64>>,
    pub seed_points: Vec<f64>,
    pub points: Vec<f64>,
}

/// All points `c + s·k` with `|s·k| <= r + ρ`, in increasing `k`.
fn line_net(c: f64, r: f64, rho: f64) -> Vec<f64> {
    let s = 2.0 * rho;
    let mut out = Vec::new();
    let mut k: i64 = -((r + rho) / s).ceil() as i64 - 1;
    while (s * k as f64) <= r + rho + 1e-9 {
        if (s * k as f64).abs() <= r + rho + 1e-9 {
            out.push(c + s * k as f64);
        }
        k += 1;
    }
    out
}

/// First nearest element.
fn nearest(y: f64, candidates: &[f64]) -> f64 {
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        if (y - c).abs() < (y - best).abs() {
            best = c;
        }
    }
    best
}

pub fn oracle(x: &[f64], params: &DiscretizationParams, seed: u64) -> OracleOutput {
    let n = x.len();
    let k = (params.l * (n as f64).powf(params.eps)).ceil() as usize;

    let scales: Vec<i64> = x
        .iter()
        .map(|&xi| {
            let mut d: Vec<f64> = x.iter().map(|&xj| (xi - xj).abs()).collect();
            d.sort_by(f64::total_cmp);
            let kth = d[k - 1];
            let mut l = -64i64;
            while 2f64.powi(l as i32) < kth {
                l += 1;
            }
            l
        })
        .collect();

    let lo = params.lambda.log2().floor() as i64 + 1;
    let hi = (2.0 * params.big_d).log2().ceil() as i64;
    let count = ((n as f64).powf(1.0 - params.eps) * (n as f64).ln().powi(2)).floor() as usize;
    let coarse = line_net(0.0, params.big_d, 1.0);

    let mut draws_all = Vec::new();
    let mut attempts_all = Vec::new();
    let mut hats = Vec::new();
    for l in lo..=hi {
        let r = 2f64.powi(l as i32);
        let mut attempt = 1usize;
        let draws = loop {
            let mut rng = derive_rng(seed, &["seeds", &l.to_string(), &attempt.to_string()]);
            let draws: Vec<usize> = (0..count).map(|_| rng.random_range(0..n)).collect();
            let ok = (0..n)
                .filter(|&i| scales[i] == l)
                .all(|i| draws.iter().any(|&j| (x[i] - x[j]).abs() <= r));
            if ok {
                break draws;
            }
            attempt += 1;
            assert!(attempt <= params.retry_budget, "oracle ran out of attempts");
        };
        let mut hat: Vec<f64> = Vec::new();
        for &j in &draws {
            let p = nearest(x[j], &coarse);
            if !hat.contains(&p) {
                hat.push(p);
            }
        }
        draws_all.push(draws);
        attempts_all.push(attempt);
        hats.push(hat);
    }

    let mut seed_points = Vec::new();
    let mut points = Vec::new();
    for i in 0..n {
        let s = nearest(x[i], &hats[(scales[i] - lo) as usize]);
        let r = 2f64.powi(scales[i] as i32);
        points.push(nearest(x[i], &line_net(s, r, params.c0 * r)));
        seed_points.push(s);
    }

    OracleOutput {
        scales,
        draws: draws_all,
        attempts: attempts_all,
        projected_seeds: hats,
        seed_points,
        points,
    }
}
