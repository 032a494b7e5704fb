//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; the page parses it and draws. The
//! `*_json` functions hold the logic and are what the native tests call.

use metricdim::discretization::{discretize, long_distances, random_sparse_tuple, DiscretizationParams};
use metricdim::discretization::{check_expansion, check_remark_bounds, check_scale_preservation};
use metricdim::embedding::{
    distortion, frechet_subset_embed, local_search_min_distortion, DistanceMatrix, SearchOptions,
};
use metricdim::geometry::NormedSpace;
use metricdim::graph::{check_structural_inclusions, BfsWorkspace, SparseGraph};
use metricdim::seeding::derive_rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_GROWTH_N: usize = 200_000;
const MAX_PLANE_N: usize = 400;
const MAX_CURVE_N: usize = 128;

fn seed_of(seed: f64) -> u64 {
    seed.max(0.0) as u64
}

/// Ball, sphere and frontier sizes around one vertex of a fresh model graph.
pub fn ball_growth_json(n: usize, m: usize, seed: u64, vertex: usize, max_radius: usize) -> Result<Value, String> {
    if n > MAX_GROWTH_N {
        return Err(format!("n is limited to {MAX_GROWTH_N} in the browser"));
    }
    let g = SparseGraph::generate(n, m, &mut derive_rng(seed, &["web", "graph"])).map_err(|e| e.to_string())?;
    if vertex == 0 || vertex > n {
        return Err(format!("vertex must be in 1..={n}"));
    }
    let v = vertex - 1;
    let mut ws = BfsWorkspace::new(n);
    let p = ws.profile(&g, v, max_radius, false);
    let bound: Vec<usize> = (0..=p.radius())
        .map(|l| 2 * (0..=l).map(|j| p.frontier_size(j) * (l - j + 1)).sum::<usize>())
        .collect();
    let report = check_structural_inclusions(&g, v, max_radius.min(60));
    Ok(json!({
        "n": n,
        "m": m,
        "vertex": vertex,
        "ball": p.ball_sizes,
        "sphere": p.sphere_sizes,
        "frontier": p.frontier_sizes,
        "ball_bound": bound,
        "inclusions": report,
    }))
}

/// A random `λ`-sparse tuple in the plane and its discretization.
pub fn discretize_plane_json(
    n: usize,
    norm: &str,
    lambda: f64,
    big_d: f64,
    l: f64,
    c0: f64,
    seed: u64,
) -> Result<Value, String> {
    if n > MAX_PLANE_N {
        return Err(format!("n is limited to {MAX_PLANE_N} in the browser"));
    }
    let space = NormedSpace::parse(norm, 2).map_err(|e| e.to_string())?;
    let mut params = DiscretizationParams::relaxed(lambda, big_d, l);
    params.c0 = c0;
    params.validate(n, 2).map_err(|e| e.to_string())?;
    let x = random_sparse_tuple(n, &space, lambda, params.eps, big_d, &mut derive_rng(seed, &["web", "tuple"]));
    let dt = discretize(&x, &space, &params, seed).map_err(|e| e.to_string())?;
    let remark = check_remark_bounds(&x, &dt, &space);
    let expansion = check_expansion(&x, &dt.points, &dt.scales, &space, c0);
    let preservation = check_scale_preservation(&dt.points, &dt.scales, &space, l, params.eps);
    Ok(json!({
        "norm": space.label(),
        "points": x,
        "discretized": dt.points,
        "seeds": dt.seed_points,
        "scales": dt.scales,
        "long_distances": long_distances(&dt.points, &dt.scales, &space).len(),
        "checks": {
            "remark_violations": remark.seed_violations.len() + remark.point_violations.len(),
            "expansion_violations": expansion.violations,
            "preservation_violations": preservation.violations,
            "max_count_ratio": preservation.max_ratio(),
        },
    }))
}

/// Best distortion found by local search into `ℓ∞^d` for `d = 1..=max_dim`,
/// each dimension warm-started from the previous one, next to a random
/// Fréchet embedding of the same dimension.
pub fn distortion_curve_json(n: usize, m: usize, seed: u64, max_dim: usize, iterations: usize) -> Result<Value, String> {
    if n > MAX_CURVE_N {
        return Err(format!("n is limited to {MAX_CURVE_N} in the browser"));
    }
    if max_dim == 0 {
        return Err("max_dim must be positive".into());
    }
    let g = SparseGraph::generate(n, m, &mut derive_rng(seed, &["web", "graph"])).map_err(|e| e.to_string())?;
    let dm = DistanceMatrix::new(&g);
    let mut rng = derive_rng(seed, &["web", "frechet"]);
    let mut rows = Vec::new();
    let mut warm: Option<Vec<Vec<f64>>> = None;
    for d in 1..=max_dim {
        let space = NormedSpace::linf(d);
        let opts = SearchOptions {
            iterations,
            restarts: 1,
            warm_start: warm.take().map(|x| {
                x.into_iter()
                    .map(|mut p| {
                        p.resize(d, 0.0);
                        p
                    })
                    .collect()
            }),
        };
        let res = local_search_min_distortion(&g, &space, &opts, seed).map_err(|e| e.to_string())?;
        let f = frechet_subset_embed(&g, d, &mut rng).map_err(|e| e.to_string())?;
        let fd = distortion(&dm, &space, &f.points).map_err(|e| e.to_string())?;
        rows.push(json!({
            "dim": d,
            "search": res.alpha,
            // Infinite when two vertices share an image; JSON has no infinity.
            "frechet": if fd.alpha.is_finite() { Some(fd.alpha) } else { None },
        }));
        warm = Some(res.points);
    }
    Ok(json!({ "n": n, "m": m, "diameter": dm.diameter(), "rows": rows }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn ball_growth(n: usize, m: usize, seed: f64, vertex: usize, max_radius: usize) -> Result<String, JsError> {
    to_js(ball_growth_json(n, m, seed_of(seed), vertex, max_radius))
}

#[wasm_bindgen]
pub fn discretize_plane(
    n: usize,
    norm: &str,
    lambda: f64,
    big_d: f64,
    l: f64,
    c0: f64,
    seed: f64,
) -> Result<String, JsError> {
    to_js(discretize_plane_json(n, norm, lambda, big_d, l, c0, seed_of(seed)))
}

#[wasm_bindgen]
pub fn distortion_curve(n: usize, m: usize, seed: f64, max_dim: usize, iterations: usize) -> Result<String, JsError> {
    to_js(distortion_curve_json(n, m, seed_of(seed), max_dim, iterations))
}
