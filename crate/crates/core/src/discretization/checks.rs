use std::collections::HashSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{discretize, scale_radius, DiscretizationParams, DiscretizedTuple};
use crate::error::{invalid, Result};
use crate::geometry::{NormedSpace, GEOM_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemarkReport {
    /// Indices with `‖x_i − ŝ_i‖ > r_i + 1`.
    pub seed_violations: Vec<usize>,
    /// Indices with `‖x_i − x̂_i‖ > c₀ r_i + 1`.
    pub point_violations: Vec<usize>,
    /// `max_i ‖x_i − x̂_i‖ − (c₀ r_i + 1)`.
    pub max_excess: f64,
}

impl RemarkReport {
    pub fn passed(&self) -> bool {
        self.seed_violations.is_empty() && self.point_violations.is_empty()
    }
}

/// Checks `‖x_i − ŝ_i‖ <= r_i + 1` and `‖x_i − x̂_i‖ <= c₀ r_i + 1`.
pub fn check_remark_bounds(x: &[Vec<f64>], dt: &DiscretizedTuple, space: &NormedSpace) -> RemarkReport {
    let c0 = dt.params.c0;
    let mut report = RemarkReport {
        seed_violations: Vec::new(),
        point_violations: Vec::new(),
        max_excess: f64::NEG_INFINITY,
    };
    for (i, xi) in x.iter().enumerate() {
        let r = dt.radius(i);
        if space.dist(xi, &dt.seed_points[i]) > r + 1.0 + GEOM_TOL {
            report.seed_violations.push(i);
        }
        let excess = space.dist(xi, &dt.points[i]) - (c0 * r + 1.0);
        report.max_excess = report.max_excess.max(excess);
        if excess > GEOM_TOL {
            report.point_violations.push(i);
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub pairs: usize,
    pub violations: usize,
    pub first_violation: Option<(usize, usize)>,
    /// Smallest `rhs − lhs` over ordered pairs `i != j`.
    pub min_slack: f64,
}

/// `‖x̂_i − x̂_j‖ <= (1 + 2c₀)‖x_i − x_j‖ + 3c₀ r_i + 2` over all ordered pairs.
pub fn check_expansion(
    x: &[Vec<f64>],
    x_hat: &[Vec<f64>],
    scales: &[i64],
    space: &NormedSpace,
    c0: f64,
) -> ExpansionReport {
    let n = x.len();
    let mut report = ExpansionReport {
        pairs: n * n,
        violations: 0,
        first_violation: None,
        min_slack: f64::INFINITY,
    };
    for i in 0..n {
        let ri = scale_radius(scales[i]);
        for j in 0..n {
            let lhs = space.dist(&x_hat[i], &x_hat[j]);
            let rhs = (1.0 + 2.0 * c0) * space.dist(&x[i], &x[j]) + 3.0 * c0 * ri + 2.0;
            if i != j {
                report.min_slack = report.min_slack.min(rhs - lhs);
            }
            if lhs > rhs + GEOM_TOL {
                report.violations += 1;
                report.first_violation.get_or_insert((i, j));
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalePreservationReport {
    pub violations: usize,
    pub first_violation: Option<usize>,
    pub max_count: usize,
    /// `L n^ε`.
    pub target: f64,
}

impl ScalePreservationReport {
    pub fn max_ratio(&self) -> f64 {
        self.max_count as f64 / self.target
    }
}

/// `|{j : ‖x̂_i − x̂_j‖ <= (4/9) r_i − 2}| <= L n^ε` for every `i`.
pub fn check_scale_preservation(
    x_hat: &[Vec<f64>],
    scales: &[i64],
    space: &NormedSpace,
    l: f64,
    eps: f64,
) -> ScalePreservationReport {
    let n = x_hat.len();
    let target = l * (n as f64).powf(eps);
    let mut report = ScalePreservationReport {
        violations: 0,
        first_violation: None,
        max_count: 0,
        target,
    };
    for i in 0..n {
        let radius = 4.0 / 9.0 * scale_radius(scales[i]) - 2.0;
        let count = (0..n)
            .filter(|&j| space.dist(&x_hat[i], &x_hat[j]) <= radius + GEOM_TOL)
            .count();
        report.max_count = report.max_count.max(count);
        if count as f64 > target {
            report.violations += 1;
            report.first_violation.get_or_insert(i);
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleLowerBoundReport {
    /// Indices with at least `L n^ε` points within `72λ`.
    pub count_violations: Vec<usize>,
    /// Indices with `r_i < 72λ`.
    pub radius_violations: Vec<usize>,
    pub max_count: usize,
    pub target: f64,
    /// Whether `300^d <= L/2` held; false only in relaxed mode.
    pub in_strict_regime: bool,
}

impl ScaleLowerBoundReport {
    pub fn passed(&self) -> bool {
        self.count_violations.is_empty() && self.radius_violations.is_empty()
    }
}

/// `|{j : ‖x_i − x_j‖ <= 72λ}| < L n^ε` and `r_i >= 72λ` for every `i`.
/// Requires `300^d <= L/2` unless `relaxed`.
pub fn check_scale_lower_bound(
    x: &[Vec<f64>],
    scales: &[i64],
    space: &NormedSpace,
    lambda: f64,
    l: f64,
    eps: f64,
    relaxed: bool,
) -> Result<ScaleLowerBoundReport> {
    let in_strict_regime = 300f64.powi(space.dim() as i32) <= l / 2.0;
    if !in_strict_regime && !relaxed {
        return Err(invalid(format!(
            "need 300^d <= L/2, got d = {}, L = {l}",
            space.dim()
        )));
    }
    let n = x.len();
    let target = l * (n as f64).powf(eps);
    let radius = 72.0 * lambda;
    let mut report = ScaleLowerBoundReport {
        count_violations: Vec::new(),
        radius_violations: Vec::new(),
        max_count: 0,
        target,
        in_strict_regime,
    };
    for i in 0..n {
        let count = (0..n)
            .filter(|&j| space.dist(&x[i], &x[j]) <= radius + GEOM_TOL)
            .count();
        report.max_count = report.max_count.max(count);
        if count as f64 >= target {
            report.count_violations.push(i);
        }
        if scale_radius(scales[i]) < radius {
            report.radius_violations.push(i);
        }
    }
    Ok(report)
}

/// Pairs `i < j` with `‖x̂_i − x̂_j‖ > min(r_i, r_j) / 3`.
pub fn long_distances(x_hat: &[Vec<f64>], scales: &[i64], space: &NormedSpace) -> Vec<(usize, usize)> {
    let n = x_hat.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let r = scale_radius(scales[i].min(scales[j]));
            if space.dist(&x_hat[i], &x_hat[j]) > r / 3.0 {
                out.push((i, j));
            }
        }
    }
    out
}

/// `((K/c₀)^d)^n · (n^(1−ε) ln⁴ n)^n · n^(n^(1−ε/2))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CardinalityBound {
    /// Natural log of the bound.
    pub log_bound: f64,
    /// A lower estimate of the bound: each non-integer factor and exponent
    /// is rounded down, so counts below it are below the true bound.
    pub floor_bound: BigUint,
}

pub fn cardinality_bound(n: usize, d: usize, params: &DiscretizationParams) -> CardinalityBound {
    let nf = n as f64;
    let per_net = (params.net_constant / params.c0).powi(d as i32);
    let per_seed = nf.powf(1.0 - params.eps) * nf.ln().powi(4);
    let exponent = nf.powf(1.0 - params.eps / 2.0);
    let log_bound = nf * per_net.ln() + nf * per_seed.ln() + exponent * nf.ln();
    // Values within rounding noise of an integer count as that integer.
    let floor_tol = |v: f64| {
        if (v - v.round()).abs() <= 1e-9 * v.abs().max(1.0) {
            v.round()
        } else {
            v.floor()
        }
    };
    let floor = |v: f64| BigUint::from(floor_tol(v) as u128);
    let floor_bound = floor(per_net).pow(n as u32)
        * floor(per_seed).pow(n as u32)
        * BigUint::from(n).pow(floor_tol(exponent) as u32);
    CardinalityBound {
        log_bound,
        floor_bound,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinctCount {
    pub samples: usize,
    pub distinct: usize,
    pub bound: CardinalityBound,
}

impl DistinctCount {
    pub fn within_bound(&self) -> bool {
        BigUint::from(self.distinct) <= self.bound.floor_bound
    }
}

/// Discretizes every tuple with the same seed and counts distinct
/// `(x̂, ℓ)` pairs. Limited to `n <= 16` and `d <= 2`.
pub fn distinct_discretization_count(
    tuples: &[Vec<Vec<f64>>],
    space: &NormedSpace,
    params: &DiscretizationParams,
    seed: u64,
) -> Result<DistinctCount> {
    let n = tuples.first().map_or(0, Vec::len);
    if n > 16 || space.dim() > 2 {
        return Err(invalid("distinct counts are limited to n <= 16 and d <= 2"));
    }
    let mut seen = HashSet::new();
    for x in tuples {
        if x.len() != n {
            return Err(invalid("all tuples must have the same length"));
        }
        let dt = discretize(x, space, params, seed)?;
        let key: (Vec<u64>, Vec<i64>) = (
            dt.points.iter().flatten().map(|v| v.to_bits()).collect(),
            dt.scales,
        );
        seen.insert(key);
    }
    let bound = cardinality_bound(n, space.dim(), params);
    Ok(DistinctCount {
        samples: tuples.len(),
        distinct: seen.len(),
        bound,
    })
}
