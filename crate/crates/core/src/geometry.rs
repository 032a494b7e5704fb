//! Norm oracles on `R^d`, projections and finite nets.
//!
//! Grid nets are axis-aligned lattices `center + s·Z^d` with spacing
//! `s = 2ρ / d^(1/p)`, which makes every point of `R^d` lie within `ρ` of the
//! lattice in `ℓ_p`. A lattice point is kept when its offset from the center
//! has norm at most `r + ρ`, so the kept points cover `B(center, r)`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Absolute tolerance for geometric inequality checks.
pub const GEOM_TOL: f64 = 1e-9;

/// Largest dimension for which nets are built.
pub const MAX_NET_DIM: usize = 6;

type OracleFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Norm {
    /// `ℓ_p` with `p ∈ [1, ∞]`; `p = f64::INFINITY` is the max norm.
    Lp(f64),
    Oracle { name: String, f: OracleFn },
}

impl fmt::Debug for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Lp(p) => write!(f, "Lp({p})"),
            Norm::Oracle { name, .. } => write!(f, "Oracle({name})"),
        }
    }
}

/// `R^d` with a norm.
#[derive(Clone, Debug)]
pub struct NormedSpace {
    dim: usize,
    norm: Norm,
}

impl NormedSpace {
    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if !(p >= 1.0) {
            return Err(invalid(format!("need p >= 1, got {p}")));
        }
        Ok(Self {
            dim,
            norm: Norm::Lp(p),
        })
    }

    pub fn l1(dim: usize) -> Self {
        Self::lp(dim, 1.0).expect("valid p")
    }

    pub fn l2(dim: usize) -> Self {
        Self::lp(dim, 2.0).expect("valid p")
    }

    pub fn linf(dim: usize) -> Self {
        Self::lp(dim, f64::INFINITY).expect("valid p")
    }

    /// A user-supplied norm. Its axioms are only spot-checked, see
    /// [`NormedSpace::check_axioms`].
    pub fn oracle<F>(dim: usize, name: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        Ok(Self {
            dim,
            norm: Norm::Oracle {
                name: name.into(),
                f: Arc::new(f),
            },
        })
    }

    /// Parses `lp:P` with `P` one of `1`, `2`, `inf`, a decimal or a
    /// fraction such as `3/2`.
    pub fn parse(spec: &str, dim: usize) -> Result<Self> {
        let p = spec
            .strip_prefix("lp:")
            .ok_or_else(|| invalid(format!("norm must look like lp:P, got {spec:?}")))?;
        Self::lp(dim, parse_p(p)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> Option<f64> {
        match self.norm {
            Norm::Lp(p) => Some(p),
            Norm::Oracle { .. } => None,
        }
    }

    pub fn is_lp(&self) -> bool {
        self.p().is_some()
    }

    /// `lp:2`, `lp:inf`, `lp:1.5`, or `oracle:<name>`.
    pub fn label(&self) -> String {
        match &self.norm {
            Norm::Lp(p) if p.is_infinite() => "lp:inf".into(),
            Norm::Lp(p) => format!("lp:{p}"),
            Norm::Oracle { name, .. } => format!("oracle:{name}"),
        }
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.norm {
            Norm::Lp(p) => lp_norm(x, *p),
            Norm::Oracle { f, .. } => f(x),
        }
    }

    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.norm {
            Norm::Lp(p) => lp_dist(a, b, *p),
            Norm::Oracle { f, .. } => {
                let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                f(&diff)
            }
        }
    }

    /// Spot-checks `‖0‖ = 0`, positivity, homogeneity and the triangle
    /// inequality on `pairs` random vectors with entries in `[-1, 1]`.
    pub fn check_axioms<R: Rng + ?Sized>(&self, pairs: usize, rng: &mut R) -> Result<()> {
        let d = self.dim;
        let zero = vec![0.0; d];
        if self.norm(&zero).abs() > GEOM_TOL {
            return Err(invalid(format!("{}: norm of zero is {}", self.label(), self.norm(&zero))));
        }
        let draw = |rng: &mut R| -> Vec<f64> { (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect() };
        for _ in 0..pairs {
            let x = draw(rng);
            let y = draw(rng);
            let c: f64 = rng.random_range(-3.0..=3.0);
            let (nx, ny) = (self.norm(&x), self.norm(&y));
            if !(nx >= 0.0) || (nx == 0.0 && x.iter().any(|&v| v != 0.0)) {
                return Err(invalid(format!("{}: not positive at {x:?}", self.label())));
            }
            let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
            if (self.norm(&cx) - c.abs() * nx).abs() > GEOM_TOL {
                return Err(invalid(format!("{}: homogeneity fails at {x:?}, c = {c}", self.label())));
            }
            let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            if self.norm(&sum) > nx + ny + GEOM_TOL {
                return Err(invalid(format!(
                    "{}: triangle inequality fails at {x:?}, {y:?}",
                    self.label()
                )));
            }
        }
        Ok(())
    }

    /// Half-width of a box around the origin containing the unit ball.
    fn box_factor(&self) -> f64 {
        match self.norm {
            Norm::Lp(_) => 1.0,
            Norm::Oracle { .. } => {
                // min of the norm over the ℓ∞ unit sphere, estimated on the
                // sign patterns and coordinate vectors, with a safety margin.
                let d = self.dim;
                let mut min = f64::INFINITY;
                for i in 0..d {
                    let mut e = vec![0.0; d];
                    e[i] = 1.0;
                    min = min.min(self.norm(&e));
                }
                if d <= 12 {
                    for mask in 0u32..(1 << d) {
                        let v: Vec<f64> = (0..d)
                            .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                            .collect();
                        min = min.min(self.norm(&v));
                    }
                }
                2.0 / min
            }
        }
    }

    /// Uniform point of `B(center, r)` by rejection from a bounding box.
    pub fn sample_ball<R: Rng + ?Sized>(&self, center: &[f64], r: f64, rng: &mut R) -> Vec<f64> {
        let half = r * self.box_factor();
        loop {
            let offset: Vec<f64> = (0..self.dim)
                .map(|_| rng.random_range(-half..=half))
                .collect();
            if self.norm(&offset) <= r {
                return center.iter().zip(&offset).map(|(c, o)| c + o).collect();
            }
        }
    }
}

/// Parses the exponent of an `ℓ_p` norm.
pub fn parse_p(s: &str) -> Result<f64> {
    let s = s.trim();
    let p = match s {
        "inf" | "Inf" | "infinity" | "∞" => f64::INFINITY,
        _ => match s.split_once('/') {
            Some((a, b)) => {
                let a: f64 = a.trim().parse().map_err(|_| invalid(format!("bad exponent {s:?}")))?;
                let b: f64 = b.trim().parse().map_err(|_| invalid(format!("bad exponent {s:?}")))?;
                a / b
            }
            None => s.parse().map_err(|_| invalid(format!("bad exponent {s:?}")))?,
        },
    };
    if !(p >= 1.0) {
        return Err(invalid(format!("need p >= 1, got {s}")));
    }
    Ok(p)
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m == 0.0 {
            return 0.0;
        }
        m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn lp_dist(a: &[f64], b: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    } else if p == 2.0 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    } else if p.is_infinite() {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    } else {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        lp_norm(&diff, p)
    }
}

/// Nearest candidate to `point`; ties go to the lowest index. Returns the
/// index and the distance.
pub fn project(point: &[f64], candidates: &[Vec<f64>], space: &NormedSpace) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.iter().enumerate() {
        let d = space.dist(point, c);
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((i, d));
        }
    }
    best.ok_or(Error::EmptyCandidates)
}

/// A grid net that is never stored; membership and projection work on
/// integer lattice indices.
#[derive(Clone, Debug)]
pub struct GridNet {
    space: NormedSpace,
    center: Vec<f64>,
    radius: f64,
    rho: f64,
    spacing: f64,
    limit: i64,
}

impl GridNet {
    /// `ρ`-net of `B(center, r)` in an `ℓ_p` space.
    pub fn new(space: &NormedSpace, center: &[f64], r: f64, rho: f64) -> Result<Self> {
        let p = space
            .p()
            .ok_or_else(|| invalid("grid nets need an lp norm; use greedy_net for oracles"))?;
        if center.len() != space.dim() {
            return Err(Error::SizeMismatch {
                expected: space.dim(),
                found: center.len(),
            });
        }
        if !(rho > 0.0) || !(r >= 0.0) || !r.is_finite() {
            return Err(invalid(format!("need r >= 0 and rho > 0, got r = {r}, rho = {rho}")));
        }
        let spacing = if p.is_infinite() {
            2.0 * rho
        } else {
            2.0 * rho / (space.dim() as f64).powf(1.0 / p)
        };
        let limit = ((r + rho + GEOM_TOL) / spacing).floor() as i64;
        Ok(Self {
            space: space.clone(),
            center: center.to_vec(),
            radius: r,
            rho,
            spacing,
            limit,
        })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn point(&self, k: &[i64]) -> Vec<f64> {
        self.center
            .iter()
            .zip(k)
            .map(|(c, &k)| c + self.spacing * k as f64)
            .collect()
    }

    pub fn contains_index(&self, k: &[i64]) -> bool {
        if k.iter().any(|k| k.abs() > self.limit) {
            return false;
        }
        let offset: Vec<f64> = k.iter().map(|&k| self.spacing * k as f64).collect();
        self.space.norm(&offset) <= self.radius + self.rho + GEOM_TOL
    }

    /// Size of the bounding index box, an upper bound on the net size.
    pub fn predicted_size(&self) -> f64 {
        ((2 * self.limit + 1) as f64).powi(self.space.dim() as i32)
    }

    /// Nearest net point to `y` with ties to the lexicographically smallest
    /// index, which is also the first one in [`GridNet::materialize`] order.
    /// Returns the index, the point and the distance.
    pub fn project(&self, y: &[f64]) -> (Vec<i64>, Vec<f64>, f64) {
        let d = self.space.dim();
        let k0: Vec<i64> = y
            .iter()
            .zip(&self.center)
            .map(|(y, c)| ((y - c) / self.spacing).round() as i64)
            .collect();
        let mut best: Option<(Vec<i64>, f64)> = None;
        let mut k = vec![0i64; d];
        for shell in 0i64.. {
            // Every point of this shell has some coordinate at least
            // shell - 1/2 spacings away, and ℓ_p dominates ℓ∞.
            if let Some((_, b)) = &best {
                let lower = self.spacing * (shell as f64 - 0.5) * (1.0 - 1e-12);
                if lower > *b {
                    break;
                }
            }
            for_each_in_shell(&k0, shell, &mut k, &mut |k| {
                if !self.contains_index(k) {
                    return;
                }
                let dist = self.space.dist(y, &self.point(k));
                let better = match &best {
                    None => true,
                    Some((bk, bd)) => dist < *bd || (dist == *bd && k < bk.as_slice()),
                };
                if better {
                    best = Some((k.to_vec(), dist));
                }
            });
        }
        let (k, dist) = best.expect("the center index is always a member");
        let p = self.point(&k);
        (k, p, dist)
    }

    /// All net points in lexicographic index order.
    pub fn materialize(&self, cap: usize) -> Result<FiniteNet> {
        let predicted = self.predicted_size();
        if predicted > cap as f64 {
            return Err(Error::NetTooLarge { predicted, cap });
        }
        let d = self.space.dim();
        let mut points = Vec::new();
        let mut k = vec![-self.limit; d];
        loop {
            if self.contains_index(&k) {
                points.push(self.point(&k));
            }
            let mut i = d;
            loop {
                if i == 0 {
                    return Ok(FiniteNet {
                        center: self.center.clone(),
                        radius: self.radius,
                        rho: self.rho,
                        points,
                    });
                }
                i -= 1;
                if k[i] < self.limit {
                    k[i] += 1;
                    break;
                }
                k[i] = -self.limit;
            }
        }
    }
}

/// Calls `f` on every index at Chebyshev distance exactly `shell` from `k0`,
/// in lexicographic order.
fn for_each_in_shell(k0: &[i64], shell: i64, k: &mut [i64], f: &mut impl FnMut(&[i64])) {
    fn rec(k0: &[i64], shell: i64, k: &mut [i64], i: usize, on_shell: bool, f: &mut impl FnMut(&[i64])) {
        if i == k0.len() {
            if on_shell || shell == 0 {
                f(k);
            }
            return;
        }
        for off in -shell..=shell {
            k[i] = k0[i] + off;
            rec(k0, shell, k, i + 1, on_shell || off.abs() == shell, f);
        }
    }
    rec(k0, shell, k, 0, false, f);
}

/// An explicit list of net points for `B(center, radius)` at mesh `rho`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteNet {
    pub center: Vec<f64>,
    pub radius: f64,
    pub rho: f64,
    pub points: Vec<Vec<f64>>,
}

impl FiniteNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn project(&self, y: &[f64], space: &NormedSpace) -> Result<(usize, f64)> {
        project(y, &self.points, space)
    }
}

/// Default cap on materialized net sizes.
pub const DEFAULT_NET_CAP: usize = 5_000_000;

/// A `ρ`-net of `B(center, r)`: a grid net for `ℓ_p`, a greedy net built
/// from `samples` rejection samples otherwise.
pub fn build_net<R: Rng + ?Sized>(
    space: &NormedSpace,
    center: &[f64],
    r: f64,
    rho: f64,
    cap: usize,
    rng: &mut R,
) -> Result<FiniteNet> {
    if space.dim() > MAX_NET_DIM {
        return Err(invalid(format!(
            "nets are limited to dimension {MAX_NET_DIM}, got {}",
            space.dim()
        )));
    }
    if !(rho > 0.0 && rho <= r) {
        return Err(invalid(format!("need 0 < rho <= r, got rho = {rho}, r = {r}")));
    }
    if space.is_lp() {
        GridNet::new(space, center, r, rho)?.materialize(cap)
    } else {
        let samples = 2000 * (1usize << space.dim());
        greedy_net(space, center, r, rho, samples, cap, rng)
    }
}

/// Greedy net over random points of the ball; the center comes first. The
/// covering radius is only guaranteed on the sampled points.
pub fn greedy_net<R: Rng + ?Sized>(
    space: &NormedSpace,
    center: &[f64],
    r: f64,
    rho: f64,
    samples: usize,
    cap: usize,
    rng: &mut R,
) -> Result<FiniteNet> {
    let mut points = vec![center.to_vec()];
    for _ in 0..samples {
        let y = space.sample_ball(center, r, rng);
        if points.iter().all(|p| space.dist(p, &y) > rho) {
            points.push(y);
            if points.len() > cap {
                return Err(Error::NetTooLarge {
                    predicted: points.len() as f64,
                    cap,
                });
            }
        }
    }
    Ok(FiniteNet {
        center: center.to_vec(),
        radius: r,
        rho,
        points,
    })
}

/// Largest distance from a sample point to its nearest net point.
pub fn max_gap(net: &[Vec<f64>], samples: &[Vec<f64>], space: &NormedSpace) -> f64 {
    samples
        .iter()
        .map(|s| project(s, net, space).map(|(_, d)| d).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

/// [`max_gap`] over `samples` uniform points of the net's ball.
pub fn validate_covering<R: Rng + ?Sized>(
    net: &FiniteNet,
    space: &NormedSpace,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let pts: Vec<Vec<f64>> = (0..samples)
        .map(|_| space.sample_ball(&net.center, net.radius, rng))
        .collect();
    max_gap(&net.points, &pts, space)
}
