use serde::{Deserialize, Serialize};

use super::{BallProfile, BfsWorkspace, SparseGraph};

/// The three almost-sure facts about BFS balls in the cycle-plus-matching model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Inclusion {
    /// `B_G(v, l)` is covered by the cycle balls `B_C(N_j(v), l - j)`, `j <= l`.
    H1,
    /// `|S_G(v, l) \ N_l(v)| <= 2 sum_{j<l} |N_j(v)|`.
    H2,
    /// `|B_G(v, l)| <= 2 sum_{j<=l} |N_j(v)| (l - j + 1)`.
    BallBound,
}

/// Outcome per inclusion; each field holds the first radius where the
/// inclusion fails, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub center: usize,
    pub max_radius: usize,
    pub h1: Option<usize>,
    pub h2: Option<usize>,
    pub ball_bound: Option<usize>,
}

impl InclusionReport {
    pub fn passed(&self) -> bool {
        self.h1.is_none() && self.h2.is_none() && self.ball_bound.is_none()
    }

    pub fn failures(&self) -> Vec<(Inclusion, usize)> {
        [
            (Inclusion::H1, self.h1),
            (Inclusion::H2, self.h2),
            (Inclusion::BallBound, self.ball_bound),
        ]
        .into_iter()
        .filter_map(|(k, l)| l.map(|l| (k, l)))
        .collect()
    }
}

/// Checks H1, H2 and the ball bound around `v` for every radius up to
/// `max_radius`.
pub fn check_structural_inclusions(g: &SparseGraph, v: usize, max_radius: usize) -> InclusionReport {
    let mut ws = BfsWorkspace::new(g.n());
    let profile = ws.profile(g, v, max_radius, true);
    check_profile(g, &profile, max_radius)
}

/// Same checks on a precomputed full-mode profile.
///
/// # Panics
/// If the profile was computed in counts-only mode.
pub fn check_profile(g: &SparseGraph, profile: &BallProfile, max_radius: usize) -> InclusionReport {
    let spheres = profile.spheres.as_ref().expect("profile needs vertex sets");
    let frontiers = profile.frontiers.as_ref().expect("profile needs vertex sets");

    // H1 for every l <= R holds iff each w in the ball has
    // min_{j, u in N_j} (j + d_C(u, w)) <= d_G(v, w); the first failing
    // radius is then d_G(v, w).
    let sources: Vec<(usize, usize)> = frontiers
        .iter()
        .enumerate()
        .flat_map(|(j, f)| f.iter().map(move |&u| (j, u as usize)))
        .collect();
    let h1 = spheres.iter().enumerate().find_map(|(l, sphere)| {
        sphere
            .iter()
            .any(|&w| {
                !sources
                    .iter()
                    .any(|&(j, u)| j + g.cycle_distance(u, w as usize) <= l)
            })
            .then_some(l)
    });

    let mut prefix = 0usize;
    let mut h2 = None;
    for l in 0..=profile.radius() {
        if l > 0 && profile.sphere_size(l) - profile.frontier_size(l) > 2 * prefix {
            h2 = Some(l);
            break;
        }
        prefix += profile.frontier_size(l);
    }

    // Past the last recorded layer the left side is constant and the right
    // side grows, so checking the recorded layers is enough.
    let ball_bound = (0..=profile.radius().min(max_radius)).find(|&l| {
        let rhs: usize = (0..=l)
            .map(|j| profile.frontier_size(j) * (l - j + 1))
            .sum();
        profile.ball_size(l) > 2 * rhs
    });

    InclusionReport {
        center: profile.center,
        max_radius,
        h1,
        h2,
        ball_bound,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use proptest::prelude::*;

    use super::*;
    use crate::graph::{bfs_profile, distances_from};
    use crate::matchings::Matching;
    use crate::seeding::derive_rng;

    /// Literal set version of H1: builds each union of cycle balls.
    fn h1_by_sets(g: &SparseGraph, v: usize, max_radius: usize) -> bool {
        let n = g.n();
        let p = bfs_profile(g, v, max_radius);
        let dist = distances_from(g, v);
        let frontiers = p.frontiers.unwrap();
        (0..=max_radius).all(|l| {
            let mut union = BTreeSet::new();
            for (j, f) in frontiers.iter().enumerate().take(l + 1) {
                for &u in f {
                    let pu = g.position(u as usize) as isize;
                    let r = (l - j) as isize;
                    for off in -r..=r {
                        let pos = (pu + off).rem_euclid(n as isize) as usize;
                        union.insert(g.cycle()[pos] as usize);
                    }
                }
            }
            (0..n)
                .filter(|&w| dist[w] as usize <= l)
                .all(|w| union.contains(&w))
        })
    }

    #[test]
    fn pure_cycle_h2_is_tight() {
        let g = SparseGraph::from_parts((0..12).collect(), Matching::empty(12)).unwrap();
        let p = bfs_profile(&g, 0, 4);
        assert_eq!(p.sphere_sizes[2], 2);
        assert!(check_structural_inclusions(&g, 0, 4).passed());
    }

    #[test]
    fn radius_zero_passes() {
        let g = SparseGraph::from_parts((0..5).collect(), Matching::from_edges(5, &[(0, 2)]).unwrap())
            .unwrap();
        let r = check_structural_inclusions(&g, 3, 0);
        assert!(r.passed());
    }

    #[test]
    fn tampered_profile_is_caught() {
        let g = SparseGraph::from_parts((0..8).collect(), Matching::from_edges(8, &[(0, 4)]).unwrap())
            .unwrap();
        let mut p = bfs_profile(&g, 0, 3);
        p.frontiers.as_mut().unwrap()[1].clear();
        p.frontier_sizes[1] = 0;
        let r = check_profile(&g, &p, 3);
        assert_eq!(r.h1, Some(1));
        assert!(r.failures().iter().any(|&(k, _)| k == Inclusion::H1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_set_oracle(n in 3usize..40, frac in 0.0f64..0.5, seed in any::<u64>(), r in 0usize..8) {
            let m = ((n as f64) * frac) as usize;
            let g = SparseGraph::generate(n, m, &mut derive_rng(seed, &["incl"])).unwrap();
            for v in 0..n {
                let rep = check_structural_inclusions(&g, v, r);
                prop_assert_eq!(rep.h1.is_none(), h1_by_sets(&g, v, r));
                prop_assert!(rep.passed());
            }
        }
    }
}
