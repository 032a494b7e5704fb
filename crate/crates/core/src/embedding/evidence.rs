use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::search::search_with_matrix;
use super::{DistanceMatrix, SearchOptions};
use crate::error::{invalid, Result};
use crate::geometry::NormedSpace;
use crate::graph::{sparsity_witness, SparseGraph, GROWTH_CONSTANT};
use crate::seeding::{derive_rng, derive_seed};

use super::search::MAX_SEARCH_VERTICES;

/// Model graphs with `α = β ln n` and `M = ⌈c ε n ln n / α⌉`, searched for
/// low-distortion images in `ℓ∞^d` for each `d` in `dims`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvidenceConfig {
    pub n: usize,
    pub beta: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    pub dims: Vec<usize>,
    pub graphs: usize,
    pub iterations: usize,
    pub restarts: usize,
}

fn default_eps() -> f64 {
    0.1
}

fn default_c() -> f64 {
    GROWTH_CONSTANT
}

impl EvidenceConfig {
    pub fn alpha(&self) -> f64 {
        self.beta * (self.n as f64).ln()
    }

    pub fn m(&self) -> usize {
        let n = self.n as f64;
        (self.c * self.eps * n * n.ln() / self.alpha()).ceil() as usize
    }

    /// `c ε n ln n / M`, the radius in the volume-growth corollary.
    pub fn corollary_radius(&self) -> f64 {
        let n = self.n as f64;
        self.c * self.eps * n * n.ln() / self.m() as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 || self.n > MAX_SEARCH_VERTICES {
            return Err(invalid(format!(
                "need 3 <= n <= {MAX_SEARCH_VERTICES}, got {}",
                self.n
            )));
        }
        if !(self.beta > 0.0 && self.eps > 0.0 && self.eps < 1.0 && self.c > 0.0) {
            return Err(invalid("need beta > 0, 0 < eps < 1 and c > 0"));
        }
        if 2 * self.m() > self.n {
            return Err(invalid(format!("M = {} exceeds n/2", self.m())));
        }
        if self.dims.is_empty() || self.dims.contains(&0) || !self.dims.windows(2).all(|w| w[0] < w[1]) {
            return Err(invalid("dims must be positive and strictly increasing"));
        }
        if self.restarts == 0 {
            return Err(invalid("need at least one restart"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub graph: usize,
    pub n: usize,
    pub beta: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub dim: usize,
    /// Upper bound on the least distortion into `ℓ∞^dim`.
    pub best_alpha: f64,
    pub seed: u64,
    pub wall_time_ms: u64,
    /// Whether the graph is `(α, n^ε)`-sparse.
    pub sparse_event: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceOutcome {
    pub records: Vec<EvidenceRecord>,
    pub alpha: f64,
    pub m: usize,
    /// Fraction of graphs where every vertex has fewer than `n^ε` others
    /// within graph distance `α`.
    pub sparse_event_frequency: f64,
    /// Fraction of graphs where every ball of radius `c ε n ln n / M` holds
    /// fewer than `n^ε` vertices.
    pub corollary_event_frequency: f64,
    pub corollary_radius: f64,
    /// Whether best-found distortion never increases with the dimension.
    pub monotone: bool,
}

/// Runs the evidence experiment. Dimensions are searched in order, each one
/// warm-started from the previous best padded with zero coordinates.
pub fn evidence_experiment(cfg: &EvidenceConfig, master_seed: u64) -> Result<EvidenceOutcome> {
    cfg.validate()?;
    let (n, m, alpha) = (cfg.n, cfg.m(), cfg.alpha());
    let bound = (n as f64).powf(cfg.eps);
    let radius = cfg.corollary_radius();

    let per_graph = |gi: usize| -> Result<(Vec<EvidenceRecord>, bool, bool)> {
        let seed = derive_seed(master_seed, &["evidence", "graph", &gi.to_string()]);
        let g = SparseGraph::generate(n, m, &mut derive_rng(seed, &["graph"]))?;
        let sparse_event = sparsity_witness(&g, alpha, bound).is_none();
        // Balls count their center, so "fewer than n^ε vertices" means fewer
        // than n^ε − 1 others.
        let corollary_event = sparsity_witness(&g, radius, bound - 1.0).is_none();
        let dm = DistanceMatrix::new(&g);
        let mut records = Vec::new();
        let mut previous: Option<Vec<Vec<f64>>> = None;
        for &dim in &cfg.dims {
            let start = Instant::now();
            let space = NormedSpace::linf(dim);
            let opts = SearchOptions {
                iterations: cfg.iterations,
                restarts: cfg.restarts,
                warm_start: previous.take().map(|x| {
                    x.into_iter()
                        .map(|mut p| {
                            p.resize(dim, 0.0);
                            p
                        })
                        .collect()
                }),
            };
            let res = search_with_matrix(&dm, &space, &opts, derive_seed(seed, &["dim", &dim.to_string()]))?;
            records.push(EvidenceRecord {
                graph: gi,
                n,
                beta: cfg.beta,
                m,
                dim,
                best_alpha: res.alpha,
                seed,
                wall_time_ms: start.elapsed().as_millis() as u64,
                sparse_event,
            });
            previous = Some(res.points);
        }
        Ok((records, sparse_event, corollary_event))
    };

    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        (0..cfg.graphs)
            .into_par_iter()
            .map(per_graph)
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = (0..cfg.graphs).map(per_graph).collect::<Result<_>>()?;

    let graphs = cfg.graphs.max(1) as f64;
    let sparse = results.iter().filter(|r| r.1).count() as f64 / graphs;
    let corollary = results.iter().filter(|r| r.2).count() as f64 / graphs;
    let monotone = results
        .iter()
        .all(|r| r.0.windows(2).all(|w| w[1].best_alpha <= w[0].best_alpha));
    Ok(EvidenceOutcome {
        records: results.into_iter().flat_map(|r| r.0).collect(),
        alpha,
        m,
        sparse_event_frequency: sparse,
        corollary_event_frequency: corollary,
        corollary_radius: radius,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_arithmetic() {
        let cfg = EvidenceConfig {
            n: 256,
            beta: 1.0,
            eps: 0.1,
            c: GROWTH_CONSTANT,
            dims: vec![2, 4],
            graphs: 1,
            iterations: 10,
            restarts: 1,
        };
        assert!((cfg.alpha() - 5.545177444479562).abs() < 1e-12);
        assert_eq!(cfg.m(), 1);
        cfg.validate().unwrap();
        let mut bad = cfg.clone();
        bad.dims = vec![4, 2];
        assert!(bad.validate().is_err());
    }

    #[test]
    fn small_run_is_monotone_and_deterministic() {
        let cfg = EvidenceConfig {
            n: 40,
            beta: 1.0,
            eps: 0.1,
            c: 1.0,
            dims: vec![1, 2, 4],
            graphs: 2,
            iterations: 200,
            restarts: 2,
        };
        let a = evidence_experiment(&cfg, 3).unwrap();
        let b = evidence_experiment(&cfg, 3).unwrap();
        assert!(a.monotone);
        assert_eq!(a.records.len(), 6);
        let strip = |o: &EvidenceOutcome| o.records.iter().map(|r| (r.dim, r.best_alpha)).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
    }
}
