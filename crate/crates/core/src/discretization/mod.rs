//! Seeded multiscale discretization of sparse point tuples.
//!
//! A tuple `x` in `B(0, D)^n` is mapped to `x̂` as follows. Each point gets a
//! local scale `ℓ_i`, the least integer such that the ball of radius `2^ℓ`
//! around `x_i` holds at least `L n^ε` points of the tuple. For every scale a
//! random seed multiset `S_ℓ` is drawn from the tuple until it covers the
//! points of that scale, and projected onto the coarse 1-net `N₀` of
//! `B(0, D)`. Then `ŝ_i` is the nearest projected seed of scale `ℓ_i` and `x̂_i`
//! the nearest point of the fine net of `B(ŝ_i, 2^ℓ_i)` at mesh `c₀ 2^ℓ_i`.
//!
//! Nets are [`GridNet`]s and are never materialized.

mod checks;

pub use checks::{
    cardinality_bound, check_expansion, check_remark_bounds, check_scale_lower_bound,
    check_scale_preservation, distinct_discretization_count, long_distances, CardinalityBound,
    DistinctCount, ExpansionReport, RemarkReport, ScaleLowerBoundReport, ScalePreservationReport,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{project, GridNet, NormedSpace, GEOM_TOL, MAX_NET_DIM};
use crate::seeding::derive_rng;

/// Largest dimension accepted in relaxed mode.
pub const RELAXED_MAX_DIM: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationParams {
    /// Sparsity exponent `ε`.
    pub eps: f64,
    /// Net fineness `c₀`.
    pub c0: f64,
    /// Sparsity scale `λ`.
    pub lambda: f64,
    /// Domain radius `D`.
    pub big_d: f64,
    /// Scale multiplier `L`.
    pub l: f64,
    /// `K` in the per-net cardinality `(K / c₀)^d` used by the cardinality bound.
    pub net_constant: f64,
    /// Desk-scale mode: `c₀ <= 0.25`, `L >= 1`, `d <= 3`.
    pub relaxed: bool,
    pub retry_budget: usize,
}

impl DiscretizationParams {
    /// `ε = 0.1`, `c₀ = 0.01`, `L = 2·300^d`.
    pub fn strict(d: usize, lambda: f64, big_d: f64) -> Self {
        Self {
            eps: 0.1,
            c0: 0.01,
            lambda,
            big_d,
            l: 2.0 * 300f64.powi(d as i32),
            net_constant: 3.0,
            relaxed: false,
            retry_budget: 100,
        }
    }

    pub fn relaxed(lambda: f64, big_d: f64, l: f64) -> Self {
        Self {
            l,
            relaxed: true,
            ..Self::strict(1, lambda, big_d)
        }
    }

    pub fn validate(&self, n: usize, d: usize) -> Result<()> {
        let nf = n as f64;
        if n < 2 {
            return Err(invalid("need at least two points"));
        }
        if !(nf * nf >= self.big_d && self.big_d >= 2.0 * self.lambda && 2.0 * self.lambda >= 1.0) {
            return Err(invalid(format!(
                "need n^2 >= D >= 2 lambda >= 1, got n = {n}, D = {}, lambda = {}",
                self.big_d, self.lambda
            )));
        }
        let (c0_max, eps_max) = if self.relaxed { (0.25, 1.0) } else { (0.01, 0.1) };
        if !(self.eps > 0.0 && self.eps <= eps_max && self.eps < 1.0) {
            return Err(invalid(format!("need 0 < eps <= {eps_max}, got {}", self.eps)));
        }
        if !(self.c0 > 0.0 && self.c0 <= c0_max) {
            return Err(invalid(format!("need 0 < c0 <= {c0_max}, got {}", self.c0)));
        }
        let l_max = nf.powf(1.0 - self.eps);
        if !(self.l >= 1.0 && self.l <= l_max * (1.0 + 1e-12)) {
            return Err(invalid(format!(
                "need 1 <= L <= n^(1-eps) = {l_max:.4}, got L = {}",
                self.l
            )));
        }
        if self.relaxed && d > RELAXED_MAX_DIM {
            return Err(invalid(format!("relaxed mode is limited to d <= {RELAXED_MAX_DIM}")));
        }
        if d > MAX_NET_DIM {
            return Err(invalid(format!("nets are limited to d <= {MAX_NET_DIM}, got {d}")));
        }
        if !(self.net_constant > 0.0) || self.retry_budget == 0 {
            return Err(invalid("net constant and retry budget must be positive"));
        }
        Ok(())
    }

    /// `L n^ε`.
    pub fn scale_target(&self, n: usize) -> f64 {
        self.l * (n as f64).powf(self.eps)
    }

    /// `[⌊log₂ λ⌋ + 1, ⌈log₂ 2D⌉]`.
    pub fn scale_range(&self) -> (i64, i64) {
        (
            self.lambda.log2().floor() as i64 + 1,
            (2.0 * self.big_d).log2().ceil() as i64,
        )
    }
}

/// `⌊n^(1-ε) ln² n⌋`.
pub fn seed_count(n: usize, eps: f64) -> usize {
    let nf = n as f64;
    (nf.powf(1.0 - eps) * nf.ln().powi(2)).floor() as usize
}

/// `2^ℓ`.
pub fn scale_radius(l: i64) -> f64 {
    2f64.powi(l as i32)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sparsity {
    pub sparse: bool,
    /// First index with too many close neighbors.
    pub witness: Option<usize>,
    /// Its neighbor count within `λ`.
    pub neighbors: usize,
}

/// Whether every point has fewer than `n^ε` others within distance `λ`.
pub fn is_lambda_sparse(x: &[Vec<f64>], lambda: f64, eps: f64, space: &NormedSpace) -> Sparsity {
    let bound = (x.len() as f64).powf(eps);
    for (i, xi) in x.iter().enumerate() {
        let close = x
            .iter()
            .enumerate()
            .filter(|&(j, xj)| j != i && space.dist(xi, xj) <= lambda)
            .count();
        if close as f64 >= bound {
            return Sparsity {
                sparse: false,
                witness: Some(i),
                neighbors: close,
            };
        }
    }
    Sparsity {
        sparse: true,
        witness: None,
        neighbors: 0,
    }
}

fn check_dims(x: &[Vec<f64>], space: &NormedSpace) -> Result<()> {
    for p in x {
        if p.len() != space.dim() {
            return Err(Error::SizeMismatch {
                expected: space.dim(),
                found: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(invalid("points must be finite"));
        }
    }
    Ok(())
}

/// Checks that `x` lies in `B(0, D)` and is `λ`-sparse.
pub fn check_domain(x: &[Vec<f64>], space: &NormedSpace, params: &DiscretizationParams) -> Result<()> {
    check_dims(x, space)?;
    let zero = vec![0.0; space.dim()];
    if let Some(i) = x.iter().position(|p| space.dist(p, &zero) > params.big_d + GEOM_TOL) {
        return Err(Error::OutsideDomain {
            index: i,
            radius: params.big_d,
        });
    }
    let s = is_lambda_sparse(x, params.lambda, params.eps, space);
    if let Some(w) = s.witness {
        return Err(Error::NotSparse {
            witness: w,
            neighbors: s.neighbors,
            lambda: params.lambda,
        });
    }
    Ok(())
}

/// Least `ℓ` with `2^ℓ >= r`.
fn ceil_log2(r: f64) -> i64 {
    let mut l = r.log2().ceil() as i64;
    while scale_radius(l - 1) >= r {
        l -= 1;
    }
    while scale_radius(l) < r {
        l += 1;
    }
    l
}

/// Local scales of separation, counting `j = i`. Errors when the input is
/// outside the domain or a scale falls outside [`DiscretizationParams::scale_range`].
pub fn local_scales(x: &[Vec<f64>], space: &NormedSpace, params: &DiscretizationParams) -> Result<Vec<i64>> {
    check_domain(x, space, params)?;
    local_scales_unchecked(x, space, params)
}

fn local_scales_unchecked(
    x: &[Vec<f64>],
    space: &NormedSpace,
    params: &DiscretizationParams,
) -> Result<Vec<i64>> {
    let n = x.len();
    let target = params.scale_target(n);
    let k = target.ceil() as usize;
    if k > n {
        return Err(invalid(format!("L n^eps = {target:.3} exceeds n = {n}")));
    }
    let (lo, hi) = params.scale_range();
    let mut dist = vec![0.0; n];
    x.iter()
        .enumerate()
        .map(|(i, xi)| {
            for (d, xj) in dist.iter_mut().zip(x) {
                *d = space.dist(xi, xj);
            }
            let (_, kth, _) = dist.select_nth_unstable_by(k - 1, f64::total_cmp);
            let l = if *kth > 0.0 { ceil_log2(*kth) } else { i64::MIN };
            if l < lo || l > hi {
                return Err(Error::ScaleOutOfRange {
                    index: i,
                    scale: l,
                    low: lo,
                    high: hi,
                });
            }
            Ok(l)
        })
        .collect()
}

/// Seed multiset of one scale, as indices into the tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSet {
    pub scale: i64,
    /// Number of draws until the coverage check passed.
    pub attempts: usize,
    pub draws: Vec<usize>,
}

/// Draws `⌊n^(1-ε) ln² n⌋` indices uniformly with replacement until every
/// `i` with `ℓ_i = scale` has a drawn point within `2^scale`. Attempt `a`
/// uses the stream `derive_rng(seed, ["seeds", scale, a])`.
pub fn select_seeds(
    x: &[Vec<f64>],
    space: &NormedSpace,
    scales: &[i64],
    scale: i64,
    eps: f64,
    seed: u64,
    retry_budget: usize,
) -> Result<SeedSet> {
    let n = x.len();
    let count = seed_count(n, eps);
    let r = scale_radius(scale);
    let targets: Vec<usize> = (0..n).filter(|&i| scales[i] == scale).collect();
    let label = scale.to_string();
    for attempt in 1..=retry_budget {
        let mut rng = derive_rng(seed, &["seeds", &label, &attempt.to_string()]);
        let draws: Vec<usize> = (0..count).map(|_| rng.random_range(0..n)).collect();
        let mut drawn = vec![false; n];
        for &j in &draws {
            drawn[j] = true;
        }
        let unique: Vec<usize> = (0..n).filter(|&j| drawn[j]).collect();
        let covered = targets
            .iter()
            .all(|&i| drawn[i] || unique.iter().any(|&j| space.dist(&x[i], &x[j]) <= r));
        if covered {
            return Ok(SeedSet {
                scale,
                attempts: attempt,
                draws,
            });
        }
    }
    Err(Error::SeedRetriesExhausted {
        scale,
        attempts: retry_budget,
    })
}

/// Output of [`discretize`] with everything needed to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedTuple {
    pub norm: String,
    pub dim: usize,
    pub params: DiscretizationParams,
    pub seed: u64,
    /// `ℓ_i`.
    pub scales: Vec<i64>,
    /// `x̂_i`.
    pub points: Vec<Vec<f64>>,
    /// `ŝ_i`.
    pub seed_points: Vec<Vec<f64>>,
    pub seed_sets: Vec<SeedSet>,
    /// `Ŝ_ℓ` per entry of `seed_sets`: projections onto `N₀` in first-draw
    /// order, duplicates removed.
    pub projected_seeds: Vec<Vec<Vec<f64>>>,
}

impl DiscretizedTuple {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn radius(&self, i: usize) -> f64 {
        scale_radius(self.scales[i])
    }
}

/// Runs the full discretization map on `x`.
pub fn discretize(
    x: &[Vec<f64>],
    space: &NormedSpace,
    params: &DiscretizationParams,
    seed: u64,
) -> Result<DiscretizedTuple> {
    let n = x.len();
    let d = space.dim();
    params.validate(n, d)?;
    if !space.is_lp() {
        return Err(invalid("discretization needs an lp norm"));
    }
    let scales = local_scales(x, space, params)?;
    let coarse = GridNet::new(space, &vec![0.0; d], params.big_d, 1.0)?;

    // N₀ projections are shared by all scales, so cache them per tuple index.
    let mut coarse_of: Vec<Option<(Vec<i64>, Vec<f64>)>> = vec![None; n];
    let (lo, hi) = params.scale_range();
    let mut seed_sets = Vec::new();
    let mut projected_seeds = Vec::new();
    for l in lo..=hi {
        let set = select_seeds(x, space, &scales, l, params.eps, seed, params.retry_budget)?;
        let mut seen = std::collections::HashSet::new();
        let mut hat = Vec::new();
        for &j in &set.draws {
            let (k, p) = coarse_of[j].get_or_insert_with(|| {
                let (k, p, _) = coarse.project(&x[j]);
                (k, p)
            });
            if seen.insert(k.clone()) {
                hat.push(p.clone());
            }
        }
        seed_sets.push(set);
        projected_seeds.push(hat);
    }

    let mut points = Vec::with_capacity(n);
    let mut seed_points = Vec::with_capacity(n);
    for (i, xi) in x.iter().enumerate() {
        let hat = &projected_seeds[(scales[i] - lo) as usize];
        let (s, _) = project(xi, hat, space)?;
        let s = hat[s].clone();
        let r = scale_radius(scales[i]);
        let (_, p, _) = GridNet::new(space, &s, r, params.c0 * r)?.project(xi);
        points.push(p);
        seed_points.push(s);
    }

    Ok(DiscretizedTuple {
        norm: space.label(),
        dim: d,
        params: params.clone(),
        seed,
        scales,
        points,
        seed_points,
        seed_sets,
        projected_seeds,
    })
}

/// Uniform points of `B(0, D)`, resampling any point that breaks sparsity
/// until the tuple is `λ`-sparse.
pub fn random_sparse_tuple<R: Rng + ?Sized>(
    n: usize,
    space: &NormedSpace,
    lambda: f64,
    eps: f64,
    big_d: f64,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let origin = vec![0.0; space.dim()];
    let mut x: Vec<Vec<f64>> = (0..n).map(|_| space.sample_ball(&origin, big_d, rng)).collect();
    loop {
        let s = is_lambda_sparse(&x, lambda, eps, space);
        match s.witness {
            None => return x,
            Some(i) => x[i] = space.sample_ball(&origin, big_d, rng),
        }
    }
}
