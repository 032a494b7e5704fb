use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{distortion, frechet_from, DistanceMatrix};
use crate::error::{invalid, Error, Result};
use crate::geometry::NormedSpace;
use crate::graph::Graph;
use crate::seeding::derive_rng;

/// Vertex limit for the local search.
pub const MAX_SEARCH_VERTICES: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Proposals per restart.
    pub iterations: usize,
    pub restarts: usize,
    /// Used as the first starting point when given.
    #[serde(default)]
    pub warm_start: Option<Vec<Vec<f64>>>,
}

impl SearchOptions {
    pub fn new(iterations: usize, restarts: usize) -> Self {
        Self {
            iterations,
            restarts,
            warm_start: None,
        }
    }
}

/// Best embedding found. `alpha` is an upper bound on the least distortion
/// into the space, never a certified optimum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub points: Vec<Vec<f64>>,
    pub alpha: f64,
    /// Best distortion so far after each proposal, over all restarts in order.
    pub trace: Vec<f64>,
    /// Starting point name and final distortion of each restart.
    pub restarts: Vec<(String, f64)>,
}

/// Per-row two largest values with their column.
type Top2 = [(f64, usize); 2];

struct State<'a> {
    dm: &'a DistanceMatrix,
    space: &'a NormedSpace,
    n: usize,
    x: Vec<Vec<f64>>,
    e: Vec<f64>,
    contraction: Vec<Top2>,
    expansion: Vec<Top2>,
}

fn push_top(top: &mut Top2, v: f64, j: usize) {
    if v > top[0].0 {
        top[1] = top[0];
        top[0] = (v, j);
    } else if v > top[1].0 {
        top[1] = (v, j);
    }
}

fn excluding(top: &Top2, v: usize) -> f64 {
    if top[0].1 == v {
        top[1].0
    } else {
        top[0].0
    }
}

fn ratios(d: u32, e: f64) -> (f64, f64) {
    let d = d as f64;
    let c = if e == 0.0 { f64::INFINITY } else { d / e };
    (c, e / d)
}

fn objective(c: f64, e: f64) -> f64 {
    if c.is_infinite() {
        f64::INFINITY
    } else {
        c * e
    }
}

impl<'a> State<'a> {
    fn new(dm: &'a DistanceMatrix, space: &'a NormedSpace, x: Vec<Vec<f64>>) -> Self {
        let n = dm.n();
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = space.dist(&x[i], &x[j]);
                e[i * n + j] = v;
                e[j * n + i] = v;
            }
        }
        let mut s = Self {
            dm,
            space,
            n,
            x,
            e,
            contraction: vec![[(f64::NEG_INFINITY, usize::MAX); 2]; n],
            expansion: vec![[(f64::NEG_INFINITY, usize::MAX); 2]; n],
        };
        for u in 0..n {
            s.refresh_row(u);
        }
        s
    }

    fn refresh_row(&mut self, u: usize) {
        let mut c = [(f64::NEG_INFINITY, usize::MAX); 2];
        let mut x = c;
        let row = self.dm.row(u);
        for w in (0..self.n).filter(|&w| w != u) {
            let (rc, re) = ratios(row[w], self.e[u * self.n + w]);
            push_top(&mut c, rc, w);
            push_top(&mut x, re, w);
        }
        self.contraction[u] = c;
        self.expansion[u] = x;
    }

    fn maxima(&self) -> (f64, f64) {
        let c = self.contraction.iter().fold(0.0f64, |m, t| m.max(t[0].0));
        let e = self.expansion.iter().fold(0.0f64, |m, t| m.max(t[0].0));
        (c, e)
    }

    fn alpha(&self) -> f64 {
        let (c, e) = self.maxima();
        objective(c, e)
    }

    /// Distortion after moving `v` to `p`, and the new distances from `v`.
    fn evaluate(&self, v: usize, p: &[f64]) -> (f64, Vec<f64>) {
        let row = self.dm.row(v);
        let mut c = 0.0f64;
        let mut e = 0.0f64;
        let mut dist = vec![0.0; self.n];
        for w in (0..self.n).filter(|&w| w != v) {
            let d = self.space.dist(p, &self.x[w]);
            dist[w] = d;
            let (rc, re) = ratios(row[w], d);
            c = c.max(rc).max(excluding(&self.contraction[w], v));
            e = e.max(re).max(excluding(&self.expansion[w], v));
        }
        (objective(c, e), dist)
    }

    fn accept(&mut self, v: usize, p: Vec<f64>, dist: Vec<f64>) {
        let n = self.n;
        self.x[v] = p;
        for w in (0..n).filter(|&w| w != v) {
            self.e[v * n + w] = dist[w];
            self.e[w * n + v] = dist[w];
        }
        for w in (0..n).filter(|&w| w != v) {
            let (rc, re) = ratios(self.dm.row(w)[v], dist[w]);
            let c = self.contraction[w];
            let x = self.expansion[w];
            let stale = c[0].1 == v || c[1].1 == v || x[0].1 == v || x[1].1 == v;
            if stale {
                self.refresh_row(w);
            } else {
                push_top(&mut self.contraction[w], rc, v);
                push_top(&mut self.expansion[w], re, v);
            }
        }
        self.refresh_row(v);
    }

    /// Endpoints of the pairs realizing the two maxima.
    fn worst_vertices(&self) -> [usize; 4] {
        let arg = |tops: &[Top2]| {
            let u = (0..self.n)
                .max_by(|&a, &b| tops[a][0].0.total_cmp(&tops[b][0].0))
                .unwrap_or(0);
            (u, tops[u][0].1.min(self.n - 1))
        };
        let (a, b) = arg(&self.contraction);
        let (c, d) = arg(&self.expansion);
        [a, b, c, d]
    }
}

/// Classical multidimensional scaling of the graph metric into `dim`
/// coordinates; missing eigenvectors are padded with zeros.
pub(crate) fn mds_layout(dm: &DistanceMatrix, dim: usize) -> Vec<Vec<f64>> {
    let n = dm.n();
    let sq = DMatrix::from_fn(n, n, |i, j| {
        let d = dm.row(i)[j] as f64;
        d * d
    });
    let row_mean: Vec<f64> = (0..n).map(|i| sq.row(i).mean()).collect();
    let total = sq.mean();
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_mean[i] - row_mean[j] + total));
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut x = vec![vec![0.0; dim]; n];
    for (k, &col) in order.iter().take(dim).enumerate() {
        let lambda = eig.eigenvalues[col];
        if lambda <= 1e-9 {
            break;
        }
        let s = lambda.sqrt();
        for (v, p) in x.iter_mut().enumerate() {
            p[k] = eig.eigenvectors[(v, col)] * s;
        }
    }
    x
}

fn starting_points<R: Rng + ?Sized>(
    dm: &DistanceMatrix,
    dim: usize,
    opts: &SearchOptions,
    rng: &mut R,
) -> Vec<(String, Vec<Vec<f64>>)> {
    let n = dm.n();
    let mut inits = Vec::new();
    if let Some(w) = &opts.warm_start {
        inits.push(("warm".to_string(), w.clone()));
    }
    if dim >= n {
        let k = super::kuratowski_from(dm)
            .into_iter()
            .map(|mut p| {
                p.resize(dim, 0.0);
                p
            })
            .collect();
        inits.push(("kuratowski".to_string(), k));
    }
    inits.push(("mds".to_string(), mds_layout(dm, dim)));
    let levels = (usize::BITS - n.leading_zeros()) as usize;
    let subsets = (0..dim)
        .map(|j| {
            let size = (1usize << (j % levels)).min(n);
            let mut s = rand::seq::index::sample(rng, n, size).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    inits.push(("frechet".to_string(), frechet_from(dm, subsets).points));
    while inits.len() < opts.restarts {
        let x = (0..n)
            .map(|_| (0..dim).map(|_| StandardNormal.sample(rng)).collect())
            .collect();
        inits.push(("random".to_string(), x));
    }
    inits.truncate(opts.restarts.max(1));
    inits
}

/// Accept-only-improving coordinate perturbation search for a low-distortion
/// image of the graph in `space`. Restart `r` draws from
/// `derive_rng(seed, ["search", r])`.
pub fn local_search_min_distortion<G: Graph + ?Sized>(
    g: &G,
    space: &NormedSpace,
    opts: &SearchOptions,
    seed: u64,
) -> Result<SearchResult> {
    let n = g.vertex_count();
    if n > MAX_SEARCH_VERTICES {
        return Err(invalid(format!(
            "local search is limited to {MAX_SEARCH_VERTICES} vertices, got {n}"
        )));
    }
    let dm = DistanceMatrix::new(g);
    search_with_matrix(&dm, space, opts, seed)
}

pub(crate) fn search_with_matrix(
    dm: &DistanceMatrix,
    space: &NormedSpace,
    opts: &SearchOptions,
    seed: u64,
) -> Result<SearchResult> {
    let n = dm.n();
    let dim = space.dim();
    if !dm.is_connected() {
        return Err(Error::Disconnected);
    }
    if n < 2 {
        return Err(invalid("need at least two vertices"));
    }
    if let Some(w) = &opts.warm_start {
        if w.len() != n || w.iter().any(|p| p.len() != dim) {
            return Err(invalid("warm start has the wrong shape"));
        }
    }
    let mut init_rng = derive_rng(seed, &["search", "init"]);
    let inits = starting_points(dm, dim, opts, &mut init_rng);

    let mut best: Option<(Vec<Vec<f64>>, f64)> = None;
    let mut trace = Vec::with_capacity(inits.len() * opts.iterations);
    let mut summary = Vec::new();
    for (r, (name, x)) in inits.into_iter().enumerate() {
        let mut rng = derive_rng(seed, &["search", &r.to_string()]);
        let mut state = State::new(dm, space, x);
        let mut current = state.alpha();
        let mut sigma = 0.5f64;
        let mut best_so_far = best.as_ref().map_or(f64::INFINITY, |b| b.1).min(current);
        for _ in 0..opts.iterations {
            if n >= 3 {
                let v = if rng.random_bool(0.5) {
                    state.worst_vertices()[rng.random_range(0..4)]
                } else {
                    rng.random_range(0..n)
                };
                let (c, _) = state.maxima();
                let unit = if c.is_finite() && c > 0.0 { 1.0 / c } else { 1.0 };
                let mut p = state.x[v].clone();
                if rng.random_bool(0.2) {
                    for coord in p.iter_mut() {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        *coord += sigma * unit * z;
                    }
                } else {
                    let k = rng.random_range(0..dim);
                    let z: f64 = StandardNormal.sample(&mut rng);
                    p[k] += sigma * unit * z;
                }
                let (alpha, dist) = state.evaluate(v, &p);
                if alpha < current {
                    state.accept(v, p, dist);
                    current = alpha;
                    sigma = (sigma * 1.5).min(4.0);
                } else {
                    sigma *= 0.995;
                    if sigma < 1e-6 {
                        sigma = 0.5;
                    }
                }
            }
            best_so_far = best_so_far.min(current);
            trace.push(best_so_far);
        }
        let exact = distortion(dm, space, &state.x)?.alpha;
        summary.push((name, exact));
        if best.as_ref().is_none_or(|b| exact < b.1) {
            best = Some((state.x, exact));
        }
    }
    let (points, alpha) = best.expect("at least one restart");
    Ok(SearchResult {
        points,
        alpha,
        trace,
        restarts: summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::kuratowski_embed;
    use crate::graph::SimpleGraph;

    #[test]
    fn incremental_state_matches_full_recompute() {
        let g = SimpleGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
        let dm = DistanceMatrix::new(&g);
        let space = NormedSpace::l2(2);
        let mut rng = derive_rng(0, &["state"]);
        let x: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let mut st = State::new(&dm, &space, x);
        for _ in 0..200 {
            let v = rng.random_range(0..6);
            let p: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (alpha, dist) = st.evaluate(v, &p);
            st.accept(v, p, dist);
            let full = distortion(&dm, &space, &st.x).unwrap().alpha;
            assert!((alpha - full).abs() <= 1e-12 * full);
            assert!((st.alpha() - full).abs() <= 1e-12 * full);
        }
    }

    #[test]
    fn mds_of_a_cycle_is_a_regular_polygon() {
        let g = SimpleGraph::cycle(6);
        let dm = DistanceMatrix::new(&g);
        let x = mds_layout(&dm, 2);
        let s = NormedSpace::l2(2);
        let side = s.dist(&x[0], &x[1]);
        for i in 0..6 {
            assert!((s.dist(&x[i], &x[(i + 1) % 6]) - side).abs() < 1e-9);
        }
    }

    #[test]
    fn isometric_warm_start_stays_isometric() {
        let g = SimpleGraph::cycle(8);
        let x = kuratowski_embed(&g).unwrap();
        let mut opts = SearchOptions::new(300, 2);
        opts.warm_start = Some(x);
        let r = local_search_min_distortion(&g, &NormedSpace::linf(8), &opts, 1).unwrap();
        assert!(r.alpha <= 1.0 + 1e-6);
    }

    #[test]
    fn guard_and_trace() {
        let big = SimpleGraph::path(MAX_SEARCH_VERTICES + 1);
        assert!(local_search_min_distortion(&big, &NormedSpace::linf(2), &SearchOptions::new(1, 1), 0).is_err());
        let g = SimpleGraph::cycle(9);
        let r = local_search_min_distortion(&g, &NormedSpace::linf(2), &SearchOptions::new(500, 3), 4).unwrap();
        assert_eq!(r.trace.len(), 1500);
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(r.alpha <= r.trace[r.trace.len() - 1] * (1.0 + 1e-12));
    }
}
