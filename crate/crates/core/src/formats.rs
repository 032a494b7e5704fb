//! JSON file formats. Every vertex and point index in a file is 1-based;
//! conversions to and from the in-memory types shift by one.

use serde::{Deserialize, Serialize};

use crate::discretization::{DiscretizationParams, DiscretizedTuple, SeedSet};
use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::matchings::{Matching, PartialMatching};

fn to_zero(i: usize, n: usize, what: &str) -> Result<usize> {
    if i == 0 || i > n {
        return Err(Error::InvalidParameter(format!("{what} index {i} outside 1..={n}")));
    }
    Ok(i - 1)
}

/// A partial matching: committed edges plus committed non-edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub non_edges: Vec<usize>,
}

impl MatchingFile {
    pub fn from_partial(pm: &PartialMatching) -> Self {
        Self {
            n: pm.n(),
            edges: pm.committed_edges().into_iter().map(|(a, b)| [a + 1, b + 1]).collect(),
            non_edges: pm.non_edges().into_iter().map(|i| i + 1).collect(),
        }
    }

    pub fn from_matching(m: &Matching) -> Self {
        Self {
            n: m.n(),
            edges: m.edges().into_iter().map(|(a, b)| [a + 1, b + 1]).collect(),
            non_edges: Vec::new(),
        }
    }

    pub fn to_partial(&self) -> Result<PartialMatching> {
        let edges = self
            .edges
            .iter()
            .map(|&[a, b]| Ok((to_zero(a, self.n, "vertex")?, to_zero(b, self.n, "vertex")?)))
            .collect::<Result<Vec<_>>>()?;
        let non_edges = self
            .non_edges
            .iter()
            .map(|&i| to_zero(i, self.n, "vertex"))
            .collect::<Result<Vec<_>>>()?;
        PartialMatching::from_edges(self.n, &edges, &non_edges)
    }

    /// Non-edges are ignored.
    pub fn to_matching(&self) -> Result<Matching> {
        let pm = self.to_partial()?;
        Matching::from_edges(self.n, &pm.committed_edges())
    }
}

/// `cycle_perm[k]` is the vertex at position `k` along the Hamiltonian cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub cycle_perm: Vec<usize>,
    pub matching_edges: Vec<[usize; 2]>,
}

impl GraphFile {
    pub fn from_graph(g: &SparseGraph) -> Self {
        Self {
            n: g.n(),
            cycle_perm: g.cycle().iter().map(|&v| v as usize + 1).collect(),
            matching_edges: g
                .matching()
                .edges()
                .into_iter()
                .map(|(a, b)| [a + 1, b + 1])
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<SparseGraph> {
        if self.cycle_perm.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: self.cycle_perm.len(),
            });
        }
        let cycle = self
            .cycle_perm
            .iter()
            .map(|&v| to_zero(v, self.n, "vertex").map(|v| v as u32))
            .collect::<Result<Vec<_>>>()?;
        let edges = self
            .matching_edges
            .iter()
            .map(|&[a, b]| Ok((to_zero(a, self.n, "vertex")?, to_zero(b, self.n, "vertex")?)))
            .collect::<Result<Vec<_>>>()?;
        SparseGraph::from_parts(cycle, Matching::from_edges(self.n, &edges)?)
    }
}

/// A tuple of points in `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointsFile {
    pub d: usize,
    pub points: Vec<Vec<f64>>,
}

impl PointsFile {
    pub fn new(d: usize, points: Vec<Vec<f64>>) -> Self {
        Self { d, points }
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.points {
            if p.len() != self.d {
                return Err(Error::SizeMismatch {
                    expected: self.d,
                    found: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter("non-finite coordinate".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSetFile {
    pub scale: i64,
    pub attempts: usize,
    /// 1-based point indices in draw order.
    pub draws: Vec<usize>,
}

/// Output of a discretization run with 1-based seed draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationFile {
    pub norm: String,
    pub dim: usize,
    pub params: DiscretizationParams,
    pub seed: u64,
    pub scales: Vec<i64>,
    pub points: Vec<Vec<f64>>,
    pub seed_points: Vec<Vec<f64>>,
    pub seed_sets: Vec<SeedSetFile>,
    pub projected_seeds: Vec<Vec<Vec<f64>>>,
}

impl From<&DiscretizedTuple> for DiscretizationFile {
    fn from(t: &DiscretizedTuple) -> Self {
        Self {
            norm: t.norm.clone(),
            dim: t.dim,
            params: t.params.clone(),
            seed: t.seed,
            scales: t.scales.clone(),
            points: t.points.clone(),
            seed_points: t.seed_points.clone(),
            seed_sets: t
                .seed_sets
                .iter()
                .map(|s| SeedSetFile {
                    scale: s.scale,
                    attempts: s.attempts,
                    draws: s.draws.iter().map(|&i| i + 1).collect(),
                })
                .collect(),
            projected_seeds: t.projected_seeds.clone(),
        }
    }
}

impl DiscretizationFile {
    pub fn to_tuple(&self) -> Result<DiscretizedTuple> {
        let n = self.scales.len();
        let seed_sets = self
            .seed_sets
            .iter()
            .map(|s| {
                Ok(SeedSet {
                    scale: s.scale,
                    attempts: s.attempts,
                    draws: s
                        .draws
                        .iter()
                        .map(|&i| to_zero(i, n, "point"))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DiscretizedTuple {
            norm: self.norm.clone(),
            dim: self.dim,
            params: self.params.clone(),
            seed: self.seed,
            scales: self.scales.clone(),
            points: self.points.clone(),
            seed_points: self.seed_points.clone(),
            seed_sets,
            projected_seeds: self.projected_seeds.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::derive_rng;

    #[test]
    fn graph_round_trip() {
        let g = SparseGraph::generate(12, 3, &mut derive_rng(1, &["fmt"])).unwrap();
        let f = GraphFile::from_graph(&g);
        assert!(f.cycle_perm.iter().all(|&v| (1..=12).contains(&v)));
        let back = f.to_graph().unwrap();
        assert_eq!(back.cycle(), g.cycle());
        assert_eq!(back.matching(), g.matching());
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<GraphFile>(&json).unwrap(), f);
    }

    #[test]
    fn matching_rejects_zero_index() {
        let f = MatchingFile {
            n: 4,
            edges: vec![[0, 2]],
            non_edges: vec![],
        };
        assert!(f.to_partial().is_err());
        let ok = MatchingFile {
            n: 4,
            edges: vec![[1, 3]],
            non_edges: vec![4],
        };
        let pm = ok.to_partial().unwrap();
        assert_eq!(pm.value(0), Some(Some(2)));
        assert_eq!(pm.value(3), Some(None));
        assert_eq!(MatchingFile::from_partial(&pm), ok);
    }
}
