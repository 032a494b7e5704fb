use serde::{Deserialize, Serialize};

use super::{Graph, SparseGraph};
use crate::error::{invalid, Error, Result};

/// Distance marker for vertices not reached by a search.
pub const UNREACHED: u32 = u32::MAX;

/// Single-source hop distances; unreachable vertices get [`UNREACHED`].
pub fn distances_from<G: Graph + ?Sized>(g: &G, source: usize) -> Vec<u32> {
    let n = g.vertex_count();
    let mut dist = vec![UNREACHED; n];
    let mut queue = Vec::with_capacity(n);
    dist[source] = 0;
    queue.push(source as u32);
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head] as usize;
        head += 1;
        let du = dist[u];
        for &w in g.neighbors(u) {
            if dist[w as usize] == UNREACHED {
                dist[w as usize] = du + 1;
                queue.push(w);
            }
        }
    }
    dist
}

/// Layered BFS statistics around one vertex.
///
/// Index `l` of each vector refers to radius `l`. Layers are recorded up to
/// the requested radius or until the sphere becomes empty, whichever comes
/// first; missing trailing layers are empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallProfile {
    pub center: usize,
    /// `|B(v, l)|`.
    pub ball_sizes: Vec<usize>,
    /// `|S(v, l)|`.
    pub sphere_sizes: Vec<usize>,
    /// `|N_l(v)|`: sphere vertices with no cycle edge into `B(v, l-1)`;
    /// `N_0 = {v}`.
    pub frontier_sizes: Vec<usize>,
    /// Sorted spheres, only in full mode.
    pub spheres: Option<Vec<Vec<u32>>>,
    /// Sorted frontier sets, only in full mode.
    pub frontiers: Option<Vec<Vec<u32>>>,
}

impl BallProfile {
    /// Largest radius with a recorded layer.
    pub fn radius(&self) -> usize {
        self.ball_sizes.len() - 1
    }

    /// `|B(v, l)|` for any `l`, extending past the recorded layers.
    pub fn ball_size(&self, l: usize) -> usize {
        self.ball_sizes[l.min(self.radius())]
    }

    pub fn frontier_size(&self, l: usize) -> usize {
        self.frontier_sizes.get(l).copied().unwrap_or(0)
    }

    pub fn sphere_size(&self, l: usize) -> usize {
        self.sphere_sizes.get(l).copied().unwrap_or(0)
    }
}

/// Reusable BFS buffers; only touched entries are reset between searches, so
/// many small searches on a large graph stay cheap.
#[derive(Clone, Debug)]
pub struct BfsWorkspace {
    dist: Vec<u32>,
    touched: Vec<u32>,
}

impl BfsWorkspace {
    pub fn new(n: usize) -> Self {
        Self {
            dist: vec![UNREACHED; n],
            touched: Vec::new(),
        }
    }

    fn reset(&mut self, n: usize) {
        if self.dist.len() != n {
            self.dist = vec![UNREACHED; n];
            self.touched.clear();
            return;
        }
        for &v in &self.touched {
            self.dist[v as usize] = UNREACHED;
        }
        self.touched.clear();
    }

    /// Distance of `v` in the last search, if it was reached.
    pub fn distance(&self, v: usize) -> Option<u32> {
        match self.dist[v] {
            UNREACHED => None,
            d => Some(d),
        }
    }

    /// Runs a layered search from `source`. `visit(l, layer)` sees each
    /// completed layer (with layer 0 = `[source]`) and returns `false` to stop.
    pub fn layers<G, F>(&mut self, g: &G, source: usize, max_radius: usize, mut visit: F)
    where
        G: Graph + ?Sized,
        F: FnMut(&Self, usize, &[u32]) -> bool,
    {
        self.reset(g.vertex_count());
        self.dist[source] = 0;
        self.touched.push(source as u32);
        let mut layer = vec![source as u32];
        let mut next = Vec::new();
        let mut l = 0usize;
        loop {
            if !visit(self, l, &layer) || l == max_radius {
                return;
            }
            next.clear();
            for &u in &layer {
                for &w in g.neighbors(u as usize) {
                    if self.dist[w as usize] == UNREACHED {
                        self.dist[w as usize] = (l + 1) as u32;
                        self.touched.push(w);
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return;
            }
            std::mem::swap(&mut layer, &mut next);
            l += 1;
        }
    }

    /// Ball, sphere and frontier statistics around `v` up to `max_radius`.
    /// With `keep_sets = false` only cardinalities are stored.
    pub fn profile(
        &mut self,
        g: &SparseGraph,
        v: usize,
        max_radius: usize,
        keep_sets: bool,
    ) -> BallProfile {
        let mut profile = BallProfile {
            center: v,
            ball_sizes: Vec::new(),
            sphere_sizes: Vec::new(),
            frontier_sizes: Vec::new(),
            spheres: keep_sets.then(Vec::new),
            frontiers: keep_sets.then(Vec::new),
        };
        let mut ball = 0usize;
        let mut frontier = Vec::new();
        self.layers(g, v, max_radius, |ws, l, layer| {
            ball += layer.len();
            frontier.clear();
            if l == 0 {
                frontier.push(v as u32);
            } else {
                // The cycle test uses positions along the cycle, so a matching
                // edge that duplicates a cycle edge does not blur it.
                let inside = |c: usize| ws.dist[c] != UNREACHED && (ws.dist[c] as usize) < l;
                frontier.extend(layer.iter().copied().filter(|&w| {
                    let [a, b] = g.cycle_neighbors(w as usize);
                    !inside(a) && !inside(b)
                }));
            }
            profile.ball_sizes.push(ball);
            profile.sphere_sizes.push(layer.len());
            profile.frontier_sizes.push(frontier.len());
            if let (Some(spheres), Some(frontiers)) =
                (profile.spheres.as_mut(), profile.frontiers.as_mut())
            {
                let mut s = layer.to_vec();
                s.sort_unstable();
                spheres.push(s);
                let mut f = frontier.clone();
                f.sort_unstable();
                frontiers.push(f);
            }
            true
        });
        profile
    }

    /// `min{x > 0 : |B(v, x)| >= t}`; `None` when the component of `v` holds
    /// fewer than `t` vertices.
    pub fn growth_radius<G: Graph + ?Sized>(&mut self, g: &G, v: usize, t: f64) -> Option<usize> {
        let mut ball = 0usize;
        let mut found = None;
        self.layers(g, v, usize::MAX, |_, l, layer| {
            ball += layer.len();
            if l >= 1 && ball as f64 >= t {
                found = Some(l);
                return false;
            }
            true
        });
        found
    }

    /// Number of vertices `w != v` with `d(v, w) <= radius`, counting stops
    /// once `stop_at` is reached.
    pub fn count_within<G: Graph + ?Sized>(
        &mut self,
        g: &G,
        v: usize,
        radius: usize,
        stop_at: usize,
    ) -> usize {
        let mut count = 0usize;
        self.layers(g, v, radius, |_, l, layer| {
            if l > 0 {
                count += layer.len();
            }
            count < stop_at
        });
        count
    }
}

/// Full-set profile; see [`BfsWorkspace::profile`].
pub fn bfs_profile(g: &SparseGraph, v: usize, max_radius: usize) -> BallProfile {
    BfsWorkspace::new(g.n()).profile(g, v, max_radius, true)
}

/// `min{x > 0 : |B(v, x)| >= t}` for `1 <= t <= n`.
pub fn growth_radius<G: Graph + ?Sized>(g: &G, v: usize, t: f64) -> Result<usize> {
    let n = g.vertex_count();
    if !(t >= 1.0 && t <= n as f64) {
        return Err(invalid(format!("need 1 <= t <= n = {n}, got t = {t}")));
    }
    BfsWorkspace::new(n)
        .growth_radius(g, v, t)
        .ok_or(Error::Disconnected)
}

/// First vertex with at least `bound` other vertices within graph distance
/// `radius`, or `None` when the graph is `(radius, bound)`-sparse.
pub fn sparsity_witness<G: Graph + ?Sized>(g: &G, radius: f64, bound: f64) -> Option<usize> {
    let n = g.vertex_count();
    let hops = radius.floor().max(0.0) as usize;
    let stop_at = bound.ceil().max(0.0) as usize;
    let mut ws = BfsWorkspace::new(n);
    (0..n).find(|&v| (ws.count_within(g, v, hops, stop_at) as f64) >= bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimpleGraph;
    use crate::matchings::Matching;

    fn pure_cycle(n: usize) -> SparseGraph {
        SparseGraph::from_parts((0..n as u32).collect(), Matching::empty(n)).unwrap()
    }

    /// Cycle 1..8 with the matching edge {1, 5} (0-based: cycle 0..7, edge {0, 4}).
    fn eight_vertex_fixture() -> SparseGraph {
        SparseGraph::from_parts(
            (0..8).collect(),
            Matching::from_edges(8, &[(0, 4)]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn pure_cycle_has_empty_frontiers() {
        let g = pure_cycle(10);
        let p = bfs_profile(&g, 3, 4);
        assert_eq!(p.frontier_sizes, vec![1, 0, 0, 0, 0]);
        assert_eq!(p.ball_sizes[2], 5);
    }

    #[test]
    fn eight_vertex_fixture_layers() {
        let g = eight_vertex_fixture();
        let p = bfs_profile(&g, 0, 3);
        assert_eq!(p.ball_sizes[1], 4);
        assert_eq!(p.spheres.as_ref().unwrap()[2], vec![2, 3, 5, 6]);
        assert_eq!(p.frontiers.as_ref().unwrap()[1], vec![4]);
        assert!(p.frontiers.as_ref().unwrap()[2].is_empty());
        assert_eq!(p.ball_sizes[2], 8);
        assert_eq!(growth_radius(&g, 0, 7.0).unwrap(), 2);
    }

    #[test]
    fn growth_radius_edge_cases() {
        let g = pure_cycle(10);
        assert_eq!(growth_radius(&g, 0, 5.0).unwrap(), 2);
        assert_eq!(growth_radius(&g, 0, 1.0).unwrap(), 1);
        assert_eq!(growth_radius(&g, 0, 10.0).unwrap(), 5);
        assert!(growth_radius(&g, 0, 11.0).is_err());
        assert!(growth_radius(&g, 0, 0.5).is_err());
    }

    #[test]
    fn streaming_profile_matches_full_counts() {
        let g = eight_vertex_fixture();
        let mut ws = BfsWorkspace::new(8);
        let a = ws.profile(&g, 5, 10, false);
        let b = bfs_profile(&g, 5, 10);
        assert_eq!(a.ball_sizes, b.ball_sizes);
        assert_eq!(a.frontier_sizes, b.frontier_sizes);
        assert!(a.spheres.is_none());
        assert_eq!(b.ball_size(100), 8);
    }

    #[test]
    fn sparsity_of_paths() {
        let g = SimpleGraph::path(6);
        // Inner vertices have two others within distance 1.
        assert_eq!(sparsity_witness(&g, 1.0, 2.0), Some(1));
        assert_eq!(sparsity_witness(&g, 1.0, 3.0), None);
        assert_eq!(sparsity_witness(&g, 0.5, 1.0), None);
    }
}
