use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::{BfsWorkspace, SparseGraph};
use crate::error::{invalid, Result};
use crate::seeding::{derive_rng, derive_seed};

/// `C` from the parameter block of the growth estimate.
pub const GROWTH_C: f64 = 50.0;
/// `c = 1 / (20 C)`.
pub const GROWTH_CONSTANT: f64 = 1.0 / (20.0 * GROWTH_C);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    pub graphs: usize,
    /// Vertices sampled per graph without replacement; ignored with `full_sweep`.
    pub vertices: usize,
    #[serde(default)]
    pub full_sweep: bool,
    /// Number of geometrically spaced `t` values in `[n^eps, n^(2 eps)]`.
    #[serde(default = "default_t_points")]
    pub t_points: usize,
    /// Explicit `t` values; overrides `t_points`.
    #[serde(default)]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default = "default_constant")]
    pub constant: f64,
}

fn default_t_points() -> usize {
    10
}

fn default_constant() -> f64 {
    GROWTH_CONSTANT
}

impl GrowthConfig {
    pub fn new(n: usize, m: usize, eps: f64, graphs: usize, vertices: usize) -> Self {
        Self {
            n,
            m,
            eps,
            graphs,
            vertices,
            full_sweep: false,
            t_points: default_t_points(),
            t_grid: None,
            constant: GROWTH_CONSTANT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(invalid(format!("need n >= 3, got {}", self.n)));
        }
        if self.m == 0 || 2 * self.m > self.n {
            return Err(invalid(format!(
                "need 1 <= M <= n/2, got M = {} for n = {}",
                self.m, self.n
            )));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(invalid(format!("need 0 < eps < 1, got {}", self.eps)));
        }
        if !self.full_sweep && self.vertices > self.n {
            return Err(invalid("more sampled vertices than the graph has"));
        }
        if self.constant <= 0.0 {
            return Err(invalid("growth constant must be positive"));
        }
        for &t in &self.t_values() {
            if !(t >= 1.0 && t <= self.n as f64) {
                return Err(invalid(format!("t = {t} outside [1, n]")));
            }
        }
        Ok(())
    }

    pub fn theta(&self) -> f64 {
        self.eps / 100.0
    }

    pub fn t_values(&self) -> Vec<f64> {
        if let Some(grid) = &self.t_grid {
            return grid.clone();
        }
        let n = self.n as f64;
        let (lo, hi) = (self.eps * n.ln(), 2.0 * self.eps * n.ln());
        match self.t_points {
            0 => Vec::new(),
            1 => vec![lo.exp()],
            k => (0..k)
                .map(|i| (lo + (hi - lo) * i as f64 / (k - 1) as f64).exp())
                .collect(),
        }
    }

    /// `c (n / M) ln t`.
    pub fn threshold(&self, t: f64) -> f64 {
        self.constant * (self.n as f64 / self.m as f64) * t.ln()
    }

    pub fn range(&self) -> GrowthRange {
        let n = self.n as f64;
        let m_low = n.powf(1.0 - self.theta());
        let m_high = n / 100.0;
        let m = self.m as f64;
        let (t_low, t_high) = (n.powf(self.eps), n.powf(2.0 * self.eps));
        let tol = 1e-9 * t_high;
        GrowthRange {
            theta: self.theta(),
            m_low,
            m_high,
            m_in_range: m >= m_low && m <= m_high,
            t_low,
            t_high,
            t_in_range: self
                .t_values()
                .iter()
                .all(|&t| t >= t_low - tol && t <= t_high + tol),
        }
    }
}

/// Where the configuration sits relative to the theorem's parameter range.
/// Out-of-range runs are allowed and flagged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRange {
    pub theta: f64,
    pub m_low: f64,
    pub m_high: f64,
    pub m_in_range: bool,
    pub t_low: f64,
    pub t_high: f64,
    pub t_in_range: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub graph_seed: u64,
    /// 1-based.
    pub vertex: usize,
    pub t: f64,
    pub radius: usize,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthOutcome {
    pub records: Vec<GrowthRecord>,
    pub violations: usize,
    pub range: GrowthRange,
}

/// Samples `graphs` model graphs and records growth radii against the
/// threshold `c (n / M) ln t` for each sampled vertex and each `t`.
pub fn growth_experiment(cfg: &GrowthConfig, master_seed: u64) -> Result<GrowthOutcome> {
    cfg.validate()?;
    let ts = cfg.t_values();
    let per_graph = |g_idx: usize| -> Result<Vec<GrowthRecord>> {
        let graph_seed = derive_seed(master_seed, &["growth", "graph", &g_idx.to_string()]);
        let g = SparseGraph::generate(cfg.n, cfg.m, &mut derive_rng(graph_seed, &["graph"]))?;
        let vertices: Vec<usize> = if cfg.full_sweep {
            (0..cfg.n).collect()
        } else {
            let mut rng = derive_rng(graph_seed, &["vertices"]);
            let mut vs = index::sample(&mut rng, cfg.n, cfg.vertices).into_vec();
            vs.sort_unstable();
            vs
        };
        let mut ws = BfsWorkspace::new(cfg.n);
        let mut out = Vec::with_capacity(vertices.len() * ts.len());
        for &v in &vertices {
            for &t in &ts {
                let radius = ws
                    .growth_radius(&g, v, t)
                    .expect("model graphs are connected");
                let threshold = cfg.threshold(t);
                out.push(GrowthRecord {
                    graph_seed,
                    vertex: v + 1,
                    t,
                    radius,
                    threshold,
                    pass: radius as f64 >= threshold,
                });
            }
        }
        Ok(out)
    };

    #[cfg(feature = "parallel")]
    let chunks: Vec<Vec<GrowthRecord>> = {
        use rayon::prelude::*;
        (0..cfg.graphs)
            .into_par_iter()
            .map(per_graph)
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let chunks: Vec<Vec<GrowthRecord>> = (0..cfg.graphs).map(per_graph).collect::<Result<_>>()?;

    let records: Vec<GrowthRecord> = chunks.into_iter().flatten().collect();
    let violations = records.iter().filter(|r| !r.pass).count();
    Ok(GrowthOutcome {
        records,
        violations,
        range: cfg.range(),
    })
}
