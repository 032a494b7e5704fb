//! Graph metrics against point tuples: the embedding relation
//! `d_G(i, j) <= ‖x_i − x_j‖ <= α d_G(i, j)`, distortion, baseline
//! embeddings into `ℓ∞` and a local-search heuristic.

mod evidence;
mod search;

pub use evidence::{evidence_experiment, EvidenceConfig, EvidenceOutcome, EvidenceRecord};
pub use search::{local_search_min_distortion, SearchOptions, SearchResult, MAX_SEARCH_VERTICES};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::NormedSpace;
use crate::graph::{distances_from, Graph, UNREACHED};

/// Relative tolerance of the embedding relation.
pub const EMBED_TOL: f64 = 1e-9;

/// All-pairs hop distances from `n` BFS runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u32>,
}

impl DistanceMatrix {
    pub fn new<G: Graph + ?Sized>(g: &G) -> Self {
        let n = g.vertex_count();
        let mut dist = Vec::with_capacity(n * n);
        for v in 0..n {
            dist.extend(distances_from(g, v));
        }
        Self { n, dist }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `None` when `j` is unreachable from `i`.
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        match self.dist[i * self.n + j] {
            UNREACHED => None,
            d => Some(d),
        }
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn is_connected(&self) -> bool {
        !self.dist.contains(&UNREACHED)
    }

    pub fn diameter(&self) -> Option<u32> {
        self.is_connected()
            .then(|| self.dist.iter().copied().max().unwrap_or(0))
    }
}

fn check_len(n: usize, x: &[Vec<f64>], space: &NormedSpace) -> Result<()> {
    if x.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: x.len(),
        });
    }
    if let Some(p) = x.iter().find(|p| p.len() != space.dim()) {
        return Err(Error::SizeMismatch {
            expected: space.dim(),
            found: p.len(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedCheck {
    pub holds: bool,
    /// First pair `(i, j)`, `i < j`, breaking the relation. `None` also when
    /// the graph is disconnected.
    pub violation: Option<(usize, usize)>,
    pub connected: bool,
}

/// Whether `d_G(i, j) <= ‖x_i − x_j‖ <= α d_G(i, j)` for all `i != j`, up to
/// a relative tolerance of [`EMBED_TOL`]. Disconnected graphs never embed.
pub fn embeds_with_alpha<G: Graph + ?Sized>(
    g: &G,
    space: &NormedSpace,
    x: &[Vec<f64>],
    alpha: f64,
) -> Result<EmbedCheck> {
    check_len(g.vertex_count(), x, space)?;
    Ok(embeds_with_matrix(&DistanceMatrix::new(g), space, x, alpha))
}

pub fn embeds_with_matrix(dm: &DistanceMatrix, space: &NormedSpace, x: &[Vec<f64>], alpha: f64) -> EmbedCheck {
    if !dm.is_connected() {
        return EmbedCheck {
            holds: false,
            violation: None,
            connected: false,
        };
    }
    for i in 0..dm.n() {
        let row = dm.row(i);
        for j in i + 1..dm.n() {
            let d = row[j] as f64;
            let e = space.dist(&x[i], &x[j]);
            if e < d * (1.0 - EMBED_TOL) || e > alpha * d * (1.0 + EMBED_TOL) {
                return EmbedCheck {
                    holds: false,
                    violation: Some((i, j)),
                    connected: true,
                };
            }
        }
    }
    EmbedCheck {
        holds: true,
        violation: None,
        connected: true,
    }
}

/// Distortion of `x` as an image of the graph metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distortion {
    /// `c = max d_G / ‖·‖`; scaling `x` by `c` makes it non-contracting.
    pub contraction: f64,
    /// `max ‖·‖ / d_G` before scaling.
    pub expansion: f64,
    /// `c · expansion`, the least `α` for which `c·x` satisfies the relation.
    pub alpha: f64,
    /// Set when two points coincide at positive graph distance.
    pub coincident: Option<(usize, usize)>,
}

/// Classical distortion: contraction times expansion. Infinite when images
/// coincide at positive graph distance.
pub fn min_alpha<G: Graph + ?Sized>(g: &G, space: &NormedSpace, x: &[Vec<f64>]) -> Result<Distortion> {
    check_len(g.vertex_count(), x, space)?;
    distortion(&DistanceMatrix::new(g), space, x)
}

pub fn distortion(dm: &DistanceMatrix, space: &NormedSpace, x: &[Vec<f64>]) -> Result<Distortion> {
    if !dm.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut contraction = 0.0f64;
    let mut expansion = 0.0f64;
    let mut coincident = None;
    for i in 0..dm.n() {
        let row = dm.row(i);
        for j in i + 1..dm.n() {
            let d = row[j] as f64;
            let e = space.dist(&x[i], &x[j]);
            if e == 0.0 {
                coincident.get_or_insert((i, j));
                continue;
            }
            contraction = contraction.max(d / e);
            expansion = expansion.max(e / d);
        }
    }
    let alpha = if coincident.is_some() {
        f64::INFINITY
    } else if dm.n() < 2 {
        1.0
    } else {
        contraction * expansion
    };
    Ok(Distortion {
        contraction: if coincident.is_some() { f64::INFINITY } else { contraction },
        expansion,
        alpha,
        coincident,
    })
}

/// `x_v = (d_G(v, w))_w`, an isometry into `ℓ∞^n`.
pub fn kuratowski_embed<G: Graph + ?Sized>(g: &G) -> Result<Vec<Vec<f64>>> {
    let dm = DistanceMatrix::new(g);
    if !dm.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(kuratowski_from(&dm))
}

pub(crate) fn kuratowski_from(dm: &DistanceMatrix) -> Vec<Vec<f64>> {
    (0..dm.n())
        .map(|v| dm.row(v).iter().map(|&d| d as f64).collect())
        .collect()
}

/// Random-subset embedding `v ↦ (d_G(v, A_j))_j` into `ℓ∞^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrechetEmbedding {
    pub points: Vec<Vec<f64>>,
    pub subsets: Vec<Vec<usize>>,
}

/// `k` coordinates; subset `j` is uniform of size `2^(j mod (⌊log₂ n⌋ + 1))`.
pub fn frechet_subset_embed<G: Graph + ?Sized, R: Rng + ?Sized>(
    g: &G,
    k: usize,
    rng: &mut R,
) -> Result<FrechetEmbedding> {
    let n = g.vertex_count();
    if k == 0 || n == 0 {
        return Err(crate::error::invalid("need k >= 1 and a non-empty graph"));
    }
    let levels = (usize::BITS - n.leading_zeros()) as usize;
    let subsets: Vec<Vec<usize>> = (0..k)
        .map(|j| {
            let size = (1usize << (j % levels)).min(n);
            let mut s = index::sample(rng, n, size).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    frechet_embed_with_subsets(g, subsets)
}

/// Coordinates `d_G(v, A_j)` for the given subsets.
pub fn frechet_embed_with_subsets<G: Graph + ?Sized>(g: &G, subsets: Vec<Vec<usize>>) -> Result<FrechetEmbedding> {
    let dm = DistanceMatrix::new(g);
    if !dm.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(frechet_from(&dm, subsets))
}

pub(crate) fn frechet_from(dm: &DistanceMatrix, subsets: Vec<Vec<usize>>) -> FrechetEmbedding {
    let points = (0..dm.n())
        .map(|v| {
            let row = dm.row(v);
            subsets
                .iter()
                .map(|a| a.iter().map(|&u| row[u]).min().unwrap_or(0) as f64)
                .collect()
        })
        .collect();
    FrechetEmbedding { points, subsets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimpleGraph;
    use crate::seeding::derive_rng;

    fn line(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&v| vec![v]).collect()
    }

    #[test]
    fn path_on_a_line() {
        let g = SimpleGraph::path(3);
        let s = NormedSpace::linf(1);
        let x = line(&[0.0, 1.0, 2.0]);
        assert!(embeds_with_alpha(&g, &s, &x, 1.0).unwrap().holds);
        let scaled = line(&[0.0, 0.99, 1.98]);
        let r = embeds_with_alpha(&g, &s, &scaled, 0.99).unwrap();
        assert!(!r.holds);
        assert_eq!(r.violation, Some((0, 1)));
        assert_eq!(min_alpha(&g, &s, &x).unwrap().alpha, 1.0);
    }

    #[test]
    fn triangle_on_a_line() {
        let g = SimpleGraph::cycle(3);
        let s = NormedSpace::linf(1);
        let x = line(&[0.0, 1.0, 1.5]);
        // Points 2 and 3 are only 0.5 apart, below the graph distance 1.
        let r = embeds_with_alpha(&g, &s, &x, 1.5).unwrap();
        assert!(!r.holds);
        assert_eq!(r.violation, Some((1, 2)));
        let d = min_alpha(&g, &s, &x).unwrap();
        assert_eq!(d.contraction, 2.0);
        assert_eq!(d.alpha, 3.0);
        let y: Vec<Vec<f64>> = x.iter().map(|p| vec![p[0] * 2.0]).collect();
        assert!(embeds_with_alpha(&g, &s, &y, 3.0).unwrap().holds);
    }

    #[test]
    fn four_cycle_on_a_line() {
        let g = SimpleGraph::cycle(4);
        let s = NormedSpace::linf(1);
        let folded = min_alpha(&g, &s, &line(&[0.0, 1.0, 2.0, 1.0])).unwrap();
        assert!(folded.alpha.is_infinite());
        assert_eq!(folded.coincident, Some((1, 3)));
        // Brute force over the six pairs of 0, 1, 2, 3.
        let x = line(&[0.0, 1.0, 2.0, 3.0]);
        let dm = DistanceMatrix::new(&g);
        let mut c = 0.0f64;
        let mut e = 0.0f64;
        for i in 0..4 {
            for j in i + 1..4 {
                let d = dm.get(i, j).unwrap() as f64;
                let dx = (x[i][0] - x[j][0]).abs();
                c = c.max(d / dx);
                e = e.max(dx / d);
            }
        }
        assert_eq!(c * e, 3.0);
        assert_eq!(min_alpha(&g, &s, &x).unwrap().alpha, 3.0);
    }

    #[test]
    fn kuratowski_small_cases() {
        let edge = SimpleGraph::path(2);
        assert_eq!(kuratowski_embed(&edge).unwrap(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let tri = SimpleGraph::cycle(3);
        let x = kuratowski_embed(&tri).unwrap();
        let s = NormedSpace::linf(3);
        for i in 0..3 {
            for j in i + 1..3 {
                assert_eq!(s.dist(&x[i], &x[j]), 1.0);
            }
        }
        assert_eq!(min_alpha(&tri, &s, &x).unwrap().alpha, 1.0);
    }

    #[test]
    fn disconnected_never_embeds() {
        let g = SimpleGraph::from_edges(3, &[(0, 1)]).unwrap();
        let s = NormedSpace::linf(1);
        let r = embeds_with_alpha(&g, &s, &line(&[0.0, 1.0, 5.0]), 1e9).unwrap();
        assert!(!r.holds && !r.connected);
        assert!(matches!(min_alpha(&g, &s, &line(&[0.0, 1.0, 5.0])), Err(Error::Disconnected)));
        assert!(embeds_with_alpha(&g, &s, &line(&[0.0]), 1.0).is_err());
    }

    #[test]
    fn frechet_singletons_are_kuratowski() {
        let g = SimpleGraph::cycle(7);
        let f = frechet_embed_with_subsets(&g, (0..7).map(|j| vec![j]).collect()).unwrap();
        assert_eq!(f.points, kuratowski_embed(&g).unwrap());
        let mut rng = derive_rng(0, &["frechet"]);
        let f = frechet_subset_embed(&g, 5, &mut rng).unwrap();
        assert_eq!(f.subsets.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 4, 1, 2]);
        assert!(min_alpha(&g, &NormedSpace::linf(5), &f.points).unwrap().expansion <= 1.0);
    }
}
