use rand::seq::SliceRandom;
use rand::Rng;

use super::{is_connected, Graph, SimpleGraph};
use crate::error::{invalid, Error, Result};
use crate::matchings::{sample_uniform, Matching};

/// The multigraph `E(π, M) = E(C_π) ⊎ E(M)`: a Hamiltonian cycle visiting
/// `π(0), π(1), …, π(n-1)` plus the edges of a matching, kept with
/// multiplicity.
#[derive(Clone, Debug)]
pub struct SparseGraph {
    cycle: Vec<u32>,
    position: Vec<u32>,
    matching: Matching,
    adjacency: SimpleGraph,
}

impl SparseGraph {
    /// Uniform cycle (Fisher–Yates) and an independent uniform matching of
    /// size `m`.
    pub fn generate<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Self> {
        if n < 3 {
            return Err(invalid(format!("need n >= 3, got {n}")));
        }
        if 2 * m > n {
            return Err(invalid(format!("need M <= n/2, got M = {m} for n = {n}")));
        }
        if n >= u32::MAX as usize {
            return Err(invalid("vertex count does not fit the index type"));
        }
        let mut cycle: Vec<u32> = (0..n as u32).collect();
        cycle.shuffle(rng);
        let matching = sample_uniform(n, m, rng)?;
        Ok(Self::assemble(cycle, matching))
    }

    pub fn from_parts(cycle: Vec<u32>, matching: Matching) -> Result<Self> {
        let n = cycle.len();
        if n < 3 {
            return Err(Error::InvalidGraph(format!("need n >= 3, got {n}")));
        }
        if matching.n() != n {
            return Err(Error::InvalidGraph(format!(
                "matching on {} vertices for a cycle on {n}",
                matching.n()
            )));
        }
        let mut seen = vec![false; n];
        for &v in &cycle {
            let v = v as usize;
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidGraph("cycle is not a permutation of [n]".into()));
            }
        }
        Ok(Self::assemble(cycle, matching))
    }

    fn assemble(cycle: Vec<u32>, matching: Matching) -> Self {
        let n = cycle.len();
        let mut position = vec![0u32; n];
        for (i, &v) in cycle.iter().enumerate() {
            position[v as usize] = i as u32;
        }
        let cycle_edges = {
            let cycle = &cycle;
            (0..n).map(move |i| (cycle[i] as usize, cycle[(i + 1) % n] as usize))
        };
        let matching_edges = matching.edges();
        let adjacency = SimpleGraph::from_edges_unchecked(
            n,
            cycle_edges.chain(matching_edges.iter().copied()),
        );
        Self {
            cycle,
            position,
            matching,
            adjacency,
        }
    }

    pub fn n(&self) -> usize {
        self.cycle.len()
    }

    /// Matching size `M`.
    pub fn m(&self) -> usize {
        self.matching.size()
    }

    /// The cycle as the vertex sequence `π`.
    pub fn cycle(&self) -> &[u32] {
        &self.cycle
    }

    pub fn matching(&self) -> &Matching {
        &self.matching
    }

    pub fn position(&self, v: usize) -> usize {
        self.position[v] as usize
    }

    /// Predecessor and successor of `v` along the cycle.
    pub fn cycle_neighbors(&self, v: usize) -> [usize; 2] {
        let n = self.n();
        let p = self.position[v] as usize;
        [
            self.cycle[(p + n - 1) % n] as usize,
            self.cycle[(p + 1) % n] as usize,
        ]
    }

    pub fn cycle_distance(&self, a: usize, b: usize) -> usize {
        let n = self.n();
        let d = (self.position[a] as isize - self.position[b] as isize).unsigned_abs();
        d.min(n - d)
    }

    /// Edge multiset: cycle edges in cycle order, then matching edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .map(|i| (self.cycle[i] as usize, self.cycle[(i + 1) % n] as usize))
            .chain(self.matching.edges())
            .collect()
    }

    /// Degree counted with multiplicity.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency.neighbors(v).len()
    }

    /// Checks edge count `n + M`, the degree histogram and connectivity.
    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.n(), self.m());
        if self.adjacency.edge_count() != n + m {
            return Err(Error::InvalidGraph(format!(
                "edge multiset has {} edges, expected {}",
                self.adjacency.edge_count(),
                n + m
            )));
        }
        let mut threes = 0;
        for v in 0..n {
            match self.degree(v) {
                2 => {}
                3 => threes += 1,
                d => return Err(Error::InvalidGraph(format!("vertex {v} has degree {d}"))),
            }
        }
        if threes != 2 * m {
            return Err(Error::InvalidGraph(format!(
                "{threes} vertices of degree 3, expected {}",
                2 * m
            )));
        }
        if !is_connected(self) {
            return Err(Error::Disconnected);
        }
        Ok(())
    }
}

impl Graph for SparseGraph {
    fn vertex_count(&self) -> usize {
        self.cycle.len()
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        self.adjacency.neighbors(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::derive_rng;

    #[test]
    fn triangle_without_matching() {
        let mut rng = derive_rng(0, &["tri"]);
        let g = SparseGraph::generate(3, 0, &mut rng).unwrap();
        for v in 0..3 {
            let mut nb = g.neighbors(v).to_vec();
            nb.sort();
            let expected: Vec<u32> = (0..3).filter(|&w| w != v as u32).collect();
            assert_eq!(nb, expected);
        }
        g.validate().unwrap();
    }

    #[test]
    fn duplicated_cycle_edge_keeps_multiplicity() {
        let m = Matching::from_edges(4, &[(0, 1)]).unwrap();
        let g = SparseGraph::from_parts(vec![0, 1, 2, 3], m).unwrap();
        assert_eq!(g.neighbors(0), &[1, 1, 3]);
        assert_eq!(g.edges().len(), 5);
        g.validate().unwrap();
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = derive_rng(0, &["bad"]);
        assert!(SparseGraph::generate(2, 0, &mut rng).is_err());
        assert!(SparseGraph::generate(10, 6, &mut rng).is_err());
        assert!(SparseGraph::from_parts(vec![0, 1, 1], Matching::empty(3)).is_err());
    }

    #[test]
    fn cycle_geometry() {
        let g = SparseGraph::from_parts(vec![4, 2, 0, 1, 3], Matching::empty(5)).unwrap();
        assert_eq!(g.cycle_neighbors(4), [3, 2]);
        assert_eq!(g.cycle_distance(4, 1), 2);
        assert_eq!(g.cycle_distance(2, 3), 2);
    }
}
