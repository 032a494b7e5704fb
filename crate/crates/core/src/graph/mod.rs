//! Graphs: the cycle-plus-matching random multigraph and BFS statistics.

mod bfs;
mod growth;
mod inclusions;
mod model;

pub use bfs::{
    bfs_profile, distances_from, growth_radius, sparsity_witness, BallProfile, BfsWorkspace,
    UNREACHED,
};
pub use growth::{
    growth_experiment, GrowthConfig, GrowthOutcome, GrowthRecord, GrowthRange, GROWTH_C,
    GROWTH_CONSTANT,
};
pub use inclusions::{check_structural_inclusions, Inclusion, InclusionReport};
pub use model::SparseGraph;

use crate::error::{Error, Result};

/// Read access to an undirected multigraph on `0..vertex_count()`.
///
/// Neighbor lists include repeated entries for parallel edges.
pub trait Graph {
    fn vertex_count(&self) -> usize;
    fn neighbors(&self, v: usize) -> &[u32];
}

/// Adjacency built from an explicit edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl SimpleGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) outside [n]")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
        }
        Ok(Self::from_edges_unchecked(n, edges.iter().copied()))
    }

    pub(crate) fn from_edges_unchecked(
        n: usize,
        edges: impl Iterator<Item = (usize, usize)> + Clone,
    ) -> Self {
        let mut degree = vec![0usize; n];
        for (a, b) in edges.clone() {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        for (a, b) in edges {
            targets[cursor[a]] = b as u32;
            cursor[a] += 1;
            targets[cursor[b]] = a as u32;
            cursor[b] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Self { offsets, targets }
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges_unchecked(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least three vertices");
        Self::from_edges_unchecked(n, (0..n).map(move |i| (i, (i + 1) % n)))
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }
}

impl Graph for SimpleGraph {
    fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// Whether every vertex is reachable from vertex 0.
pub fn is_connected<G: Graph + ?Sized>(g: &G) -> bool {
    let n = g.vertex_count();
    n == 0 || distances_from(g, 0).iter().all(|&d| d != UNREACHED)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_graph_adjacency() {
        let g = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (0, 1)]).unwrap();
        assert_eq!(g.neighbors(0), &[1, 1]);
        assert_eq!(g.neighbors(1), &[0, 0, 2]);
        assert_eq!(g.edge_count(), 3);
        assert!(!is_connected(&g));
        assert!(is_connected(&SimpleGraph::cycle(5)));
        assert!(SimpleGraph::from_edges(2, &[(0, 0)]).is_err());
    }
}
