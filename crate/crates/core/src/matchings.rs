//! Matchings on `[n]` viewed as functions `[n] -> [n] ∪ {NONE}`.
//!
//! A [`Matching`] is stored as a flat array of mates with the sentinel
//! [`NONE`] for unmatched vertices. A [`PartialMatching`] additionally
//! records a domain `I`: vertices in `I` have a committed value, which may be
//! a mate or a committed non-edge (`NONE`). Completions of a partial matching
//! to a target size are counted exactly, enumerated for small instances and
//! sampled uniformly.
//!
//! Counts use the pairing number `(2m)!/(2^m m!)`, written `(2m)!!` in some
//! texts even though it equals the odd double factorial `(2m-1)!!`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::seeding;
use crate::stats::clopper_pearson_upper;

/// Sentinel for "not matched".
pub const NONE: u32 = u32::MAX;

/// A matching as an involution on the matched vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching {
    mate: Vec<u32>,
}

impl Matching {
    pub fn empty(n: usize) -> Self {
        Self {
            mate: vec![NONE; n],
        }
    }

    /// Validates `mate(mate(i)) = i` and `mate(i) != i` for matched `i`.
    pub fn from_assignment(mate: Vec<u32>) -> Result<Self> {
        let n = mate.len();
        if n >= NONE as usize {
            return Err(invalid("vertex count does not fit the index type"));
        }
        for (i, &j) in mate.iter().enumerate() {
            if j == NONE {
                continue;
            }
            let j = j as usize;
            if j >= n {
                return Err(Error::InvalidMatching(format!("vertex {i} mapped outside [n]")));
            }
            if j == i {
                return Err(Error::InvalidMatching(format!("vertex {i} matched to itself")));
            }
            if mate[j] as usize != i {
                return Err(Error::InvalidMatching(format!(
                    "vertex {i} maps to {j} but {j} does not map back"
                )));
            }
        }
        Ok(Self { mate })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut mate = vec![NONE; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidMatching(format!("edge ({a}, {b}) outside [n]")));
            }
            if a == b {
                return Err(Error::InvalidMatching(format!("self-loop at {a}")));
            }
            if mate[a] != NONE || mate[b] != NONE {
                return Err(Error::InvalidMatching(format!(
                    "edge ({a}, {b}) reuses a matched vertex"
                )));
            }
            mate[a] = b as u32;
            mate[b] = a as u32;
        }
        Ok(Self { mate })
    }

    pub fn n(&self) -> usize {
        self.mate.len()
    }

    pub fn mate(&self, i: usize) -> Option<usize> {
        match self.mate[i] {
            NONE => None,
            j => Some(j as usize),
        }
    }

    pub fn assignment(&self) -> &[u32] {
        &self.mate
    }

    pub fn size(&self) -> usize {
        self.mate.iter().filter(|&&j| j != NONE).count() / 2
    }

    /// Edge set as `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.mate
            .iter()
            .enumerate()
            .filter(|&(i, &j)| j != NONE && i < j as usize)
            .map(|(i, &j)| (i, j as usize))
            .collect()
    }

    pub fn unmatched(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.mate[i] == NONE).collect()
    }

    /// The restriction `M|_I`.
    pub fn restrict(&self, domain: &[usize]) -> PartialMatching {
        let n = self.n();
        let mut in_domain = vec![false; n];
        let mut assignment = vec![NONE; n];
        for &i in domain {
            in_domain[i] = true;
            assignment[i] = self.mate[i];
        }
        PartialMatching {
            n,
            in_domain,
            assignment,
        }
    }

    /// Whether `pm` is a restriction of this matching.
    pub fn extends(&self, pm: &PartialMatching) -> bool {
        pm.n == self.n()
            && (0..pm.n)
                .filter(|&i| pm.in_domain[i])
                .all(|i| pm.assignment[i] == self.mate[i])
    }
}

impl PartialOrd for Matching {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order of the sorted edge lists.
impl Ord for Matching {
    fn cmp(&self, other: &Self) -> Ordering {
        self.edges()
            .cmp(&other.edges())
            .then_with(|| self.n().cmp(&other.n()))
    }
}

/// A function from a domain `I ⊆ [n]` into `[n] ∪ {NONE}` that is the
/// restriction of some matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialMatching {
    n: usize,
    in_domain: Vec<bool>,
    assignment: Vec<u32>,
}

impl PartialMatching {
    /// Empty domain.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            in_domain: vec![false; n],
            assignment: vec![NONE; n],
        }
    }

    /// Builds from `(i, value)` entries; `value = None` commits `i` as
    /// unmatched.
    pub fn from_entries(n: usize, entries: &[(usize, Option<usize>)]) -> Result<Self> {
        let mut pm = Self::new(n);
        for &(i, value) in entries {
            if i >= n {
                return Err(Error::InvalidMatching(format!("vertex {i} outside [n]")));
            }
            if pm.in_domain[i] {
                return Err(Error::InvalidMatching(format!("vertex {i} listed twice")));
            }
            pm.in_domain[i] = true;
            pm.assignment[i] = match value {
                Some(j) if j >= n => {
                    return Err(Error::InvalidMatching(format!("vertex {i} mapped outside [n]")))
                }
                Some(j) => j as u32,
                None => NONE,
            };
        }
        pm.validate()?;
        Ok(pm)
    }

    /// Both endpoints of every edge and every non-edge vertex join the domain.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], non_edges: &[usize]) -> Result<Self> {
        let mut entries = Vec::with_capacity(2 * edges.len() + non_edges.len());
        for &(a, b) in edges {
            entries.push((a, Some(b)));
            entries.push((b, Some(a)));
        }
        entries.extend(non_edges.iter().map(|&i| (i, None)));
        Self::from_entries(n, &entries)
    }

    fn validate(&self) -> Result<()> {
        let mut preimage = vec![NONE; self.n];
        for i in 0..self.n {
            if !self.in_domain[i] || self.assignment[i] == NONE {
                continue;
            }
            let j = self.assignment[i] as usize;
            if j == i {
                return Err(Error::InvalidMatching(format!("vertex {i} matched to itself")));
            }
            if preimage[j] != NONE {
                return Err(Error::InvalidMatching(format!("vertex {j} matched twice")));
            }
            preimage[j] = i as u32;
            if self.in_domain[j] && self.assignment[j] as usize != i {
                return Err(Error::InvalidMatching(format!(
                    "vertex {i} maps to {j} but {j} does not map back"
                )));
            }
        }
        for i in 0..self.n {
            if self.in_domain[i] && self.assignment[i] == NONE && preimage[i] != NONE {
                return Err(Error::InvalidMatching(format!(
                    "vertex {i} is committed unmatched but is the image of {}",
                    preimage[i]
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.in_domain[i]).collect()
    }

    pub fn in_domain(&self, i: usize) -> bool {
        self.in_domain[i]
    }

    /// `None` when `i` is outside the domain, `Some(None)` for a committed
    /// non-edge.
    pub fn value(&self, i: usize) -> Option<Option<usize>> {
        if !self.in_domain[i] {
            return None;
        }
        Some(match self.assignment[i] {
            NONE => None,
            j => Some(j as usize),
        })
    }

    /// Vertices known to be matched: `{i ∈ I : M0(i) ≠ NONE} ∪ Image(M0)`.
    fn matched_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for i in 0..self.n {
            if self.in_domain[i] && self.assignment[i] != NONE {
                mask[i] = true;
                mask[self.assignment[i] as usize] = true;
            }
        }
        mask
    }

    pub fn size(&self) -> usize {
        self.matched_mask().iter().filter(|&&m| m).count() / 2
    }

    /// Committed edges as sorted `(min, max)` pairs.
    pub fn committed_edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = (0..self.n)
            .filter(|&i| self.in_domain[i] && self.assignment[i] != NONE)
            .map(|i| {
                let j = self.assignment[i] as usize;
                (i.min(j), i.max(j))
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    pub fn non_edges(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.in_domain[i] && self.assignment[i] == NONE)
            .collect()
    }

    /// `J`: vertices outside the domain that are not an image of it.
    pub fn free_vertices(&self) -> Vec<usize> {
        let matched = self.matched_mask();
        (0..self.n)
            .filter(|&w| !self.in_domain[w] && !matched[w])
            .collect()
    }

    /// Whether some matching of size `target` restricts to this function.
    pub fn is_extendable(&self, target: usize) -> bool {
        let k = self.size();
        k <= target && 2 * (target - k) <= self.free_vertices().len()
    }
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= BigUint::from(n - k + i);
        acc /= BigUint::from(i);
    }
    acc
}

/// Number of ways to pair `2m` labelled items: `(2m)! / (2^m m!)`.
pub fn pairings(m: usize) -> BigUint {
    (1..=m).fold(BigUint::one(), |acc, i| acc * BigUint::from(2 * i - 1))
}

/// `|Π(M0)| = C(|J|, 2(M-k)) · (2(M-k))!!`, or zero when no completion
/// exists.
pub fn completions_count(pm: &PartialMatching, target: usize) -> BigUint {
    if !pm.is_extendable(target) {
        return BigUint::zero();
    }
    let m = target - pm.size();
    binomial(pm.free_vertices().len(), 2 * m) * pairings(m)
}

fn matchings_on(
    pool: &[usize],
    used: &mut [bool],
    start: usize,
    pairs_left: usize,
    acc: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if pairs_left == 0 {
        out.push(acc.clone());
        return;
    }
    let free = used[start..].iter().filter(|&&u| !u).count();
    if free < 2 * pairs_left {
        return;
    }
    // Edges are produced in increasing order of their smaller endpoint, so
    // every matching appears exactly once.
    for a in start..pool.len() {
        if used[a] {
            continue;
        }
        used[a] = true;
        for b in a + 1..pool.len() {
            if used[b] {
                continue;
            }
            used[b] = true;
            acc.push((pool[a], pool[b]));
            matchings_on(pool, used, a + 1, pairs_left - 1, acc, out);
            acc.pop();
            used[b] = false;
        }
        used[a] = false;
    }
}

/// All completions of `pm` to size `target`, in lexicographic order of their
/// sorted edge lists. Refuses when there are more than `limit`.
pub fn enumerate_completions(
    pm: &PartialMatching,
    target: usize,
    limit: usize,
) -> Result<Vec<Matching>> {
    let count = completions_count(pm, target);
    if count > BigUint::from(limit) {
        return Err(Error::EnumerationLimit {
            count: count.to_string(),
            limit,
        });
    }
    if count.is_zero() {
        return Ok(Vec::new());
    }
    let free = pm.free_vertices();
    let pairs = target - pm.size();
    let mut raw = Vec::new();
    matchings_on(
        &free,
        &mut vec![false; free.len()],
        0,
        pairs,
        &mut Vec::with_capacity(pairs),
        &mut raw,
    );
    let committed = pm.committed_edges();
    let mut out: Vec<Matching> = raw
        .into_iter()
        .map(|extra| {
            let mut edges = committed.clone();
            edges.extend(extra);
            Matching::from_edges(pm.n, &edges).expect("completion edges are disjoint")
        })
        .collect();
    out.sort();
    debug_assert_eq!(BigUint::from(out.len()), count);
    Ok(out)
}

/// Uniform `2·pairs`-subset of `0..pool` in uniformly random order.
fn choose_endpoints<R: Rng + ?Sized>(pool: usize, pairs: usize, rng: &mut R) -> Vec<usize> {
    let mut chosen = index::sample(rng, pool, 2 * pairs).into_vec();
    chosen.shuffle(rng);
    chosen
}

/// Uniform sample from `Π([n], target)`: a uniform `2·target`-subset paired
/// consecutively after a shuffle.
pub fn sample_uniform<R: Rng + ?Sized>(n: usize, target: usize, rng: &mut R) -> Result<Matching> {
    if 2 * target > n {
        return Err(invalid(format!("matching size {target} exceeds n/2 for n = {n}")));
    }
    let chosen = choose_endpoints(n, target, rng);
    let mut mate = vec![NONE; n];
    for pair in chosen.chunks_exact(2) {
        mate[pair[0]] = pair[1] as u32;
        mate[pair[1]] = pair[0] as u32;
    }
    Ok(Matching { mate })
}

/// Uniform sample from `Π(M0)`: a uniform matching of size `target - k` on the
/// free vertices merged with the committed edges.
pub fn sample_conditional<R: Rng + ?Sized>(
    pm: &PartialMatching,
    target: usize,
    rng: &mut R,
) -> Result<Matching> {
    if !pm.is_extendable(target) {
        return Err(Error::NotExtendable { target });
    }
    let free = pm.free_vertices();
    let chosen = choose_endpoints(free.len(), target - pm.size(), rng);
    let mut mate = vec![NONE; pm.n];
    for (a, b) in pm.committed_edges() {
        mate[a] = b as u32;
        mate[b] = a as u32;
    }
    for pair in chosen.chunks_exact(2) {
        let (a, b) = (free[pair[0]], free[pair[1]]);
        mate[a] = b as u32;
        mate[b] = a as u32;
    }
    Ok(Matching { mate })
}

/// The event `|{w ∈ S : M(w) ≠ NONE}| ≥ 12μ` under the conditional law of a
/// uniform matching given a partial construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailQuery {
    pub n: usize,
    pub target: usize,
    pub partial_size: usize,
    pub free: Vec<usize>,
    pub subset: Vec<usize>,
    pub mu: f64,
}

/// Multiplier in front of `μ` in the tail event.
pub const TAIL_MULTIPLIER: f64 = 12.0;

impl TailQuery {
    pub fn new(pm: &PartialMatching, target: usize, subset: Vec<usize>, mu: f64) -> Result<Self> {
        if !pm.is_extendable(target) {
            return Err(Error::NotExtendable { target });
        }
        let free = pm.free_vertices();
        let mut is_free = vec![false; pm.n];
        for &w in &free {
            is_free[w] = true;
        }
        let mut seen = vec![false; pm.n];
        for &w in &subset {
            if w >= pm.n || !is_free[w] {
                return Err(invalid(format!("subset vertex {w} is not a free vertex")));
            }
            if std::mem::replace(&mut seen[w], true) {
                return Err(invalid(format!("subset vertex {w} listed twice")));
            }
        }
        if free.len() <= 4 * target {
            return Err(invalid(format!(
                "need |J| > 4M, got |J| = {} and M = {target}",
                free.len()
            )));
        }
        if subset.len() > target {
            return Err(invalid(format!(
                "need |S| <= M, got |S| = {} and M = {target}",
                subset.len()
            )));
        }
        let partial_size = pm.size();
        let q = Self {
            n: pm.n,
            target,
            partial_size,
            free,
            subset,
            mu,
        };
        if !mu.is_finite() || mu < q.min_mu() {
            return Err(invalid(format!(
                "need mu >= 2(M-k)|S|/|J| = {}, got {mu}",
                q.min_mu()
            )));
        }
        Ok(q)
    }

    /// `2(M-k)|S|/|J|`.
    pub fn min_mu(&self) -> f64 {
        2.0 * (self.target - self.partial_size) as f64 * self.subset.len() as f64
            / self.free.len() as f64
    }

    pub fn threshold(&self) -> f64 {
        TAIL_MULTIPLIER * self.mu
    }

    /// `2 · 2^(-μ)`.
    pub fn bound(&self) -> f64 {
        2.0 * (-self.mu).exp2()
    }

    /// Smallest matched count that triggers the event.
    fn first_hit(&self) -> usize {
        self.threshold().ceil().max(0.0) as usize
    }

    /// The event cannot occur when the threshold exceeds `|S|`.
    pub fn is_impossible(&self) -> bool {
        self.first_hit() > self.subset.len()
    }

    /// Exact probability from the hypergeometric law of `|S ∩ endpoints|`.
    pub fn exact_probability(&self) -> f64 {
        let pool = self.free.len();
        let draws = 2 * (self.target - self.partial_size);
        let s = self.subset.len();
        let num = (self.first_hit()..=s.min(draws)).fold(BigUint::zero(), |acc, t| {
            acc + binomial(s, t) * binomial(pool - s, draws - t)
        });
        big_ratio(&num, &binomial(pool, draws))
    }
}

/// `num / den` as a float without overflowing the intermediate values.
pub fn big_ratio(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "division by zero");
    if num.is_zero() {
        return 0.0;
    }
    let shift = (den.bits() + 64).saturating_sub(num.bits());
    let q: BigUint = (num << shift) / den;
    q.to_f64().unwrap_or(f64::INFINITY) * (-(shift as f64)).exp2()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailEstimate {
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    /// One-sided 99% Clopper–Pearson upper limit; zero when the event is
    /// impossible.
    pub upper_99: f64,
    pub bound: f64,
    pub impossible: bool,
}

/// Monte Carlo estimate of the tail probability. Trial `t` draws from stream
/// `t` of the key derived from `master_seed`.
///
/// Only the set of newly matched free vertices matters for the event, so each
/// trial draws just the endpoint set, the first stage of
/// [`sample_conditional`]; the pairing stage does not affect the count.
pub fn incidence_tail_estimate(q: &TailQuery, trials: u64, master_seed: u64) -> TailEstimate {
    assert!(trials > 0, "no trials");
    let bound = q.bound();
    if q.is_impossible() {
        return TailEstimate {
            trials,
            hits: 0,
            estimate: 0.0,
            upper_99: 0.0,
            bound,
            impossible: true,
        };
    }
    let mut in_subset = vec![false; q.free.len()];
    let mut pos = vec![usize::MAX; q.n];
    for (idx, &w) in q.free.iter().enumerate() {
        pos[w] = idx;
    }
    for &w in &q.subset {
        in_subset[pos[w]] = true;
    }
    let key = seeding::derive_key(master_seed, &["incidence-tail"]);
    let pairs = q.target - q.partial_size;
    let first_hit = q.first_hit();
    let trial = |t: u64| -> u64 {
        let mut rng = seeding::stream_from_key(key, t);
        let endpoints = index::sample(&mut rng, q.free.len(), 2 * pairs);
        let count = endpoints.iter().filter(|&i| in_subset[i]).count();
        u64::from(count >= first_hit)
    };
    #[cfg(feature = "parallel")]
    let hits: u64 = {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(trial).sum()
    };
    #[cfg(not(feature = "parallel"))]
    let hits: u64 = (0..trials).map(trial).sum();
    TailEstimate {
        trials,
        hits,
        estimate: hits as f64 / trials as f64,
        upper_99: clopper_pearson_upper(hits, trials, 0.99),
        bound,
        impossible: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::derive_rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn pm(n: usize, edges: &[(usize, usize)], non_edges: &[usize]) -> PartialMatching {
        PartialMatching::from_edges(n, edges, non_edges).unwrap()
    }

    #[test]
    fn free_vertices_examples() {
        // 1-based {1 -> 2} on n = 4, domain {1}.
        let a = PartialMatching::from_entries(4, &[(0, Some(1))]).unwrap();
        assert_eq!(a.free_vertices(), vec![2, 3]);
        let b = PartialMatching::from_entries(4, &[(0, None)]).unwrap();
        assert_eq!(b.free_vertices(), vec![1, 2, 3]);
        let c = pm(6, &[(0, 1)], &[]);
        assert_eq!(c.free_vertices(), vec![2, 3, 4, 5]);
    }

    #[test]
    fn size_counts_images_outside_domain() {
        let a = PartialMatching::from_entries(6, &[(0, Some(3)), (1, None)]).unwrap();
        assert_eq!(a.size(), 1);
        assert_eq!(a.committed_edges(), vec![(0, 3)]);
        assert_eq!(a.non_edges(), vec![1]);
    }

    #[test]
    fn rejects_inconsistent_partial_matchings() {
        assert!(PartialMatching::from_entries(4, &[(0, Some(0))]).is_err());
        assert!(PartialMatching::from_entries(4, &[(0, Some(2)), (1, Some(2))]).is_err());
        assert!(PartialMatching::from_entries(4, &[(0, Some(2)), (2, Some(1))]).is_err());
        assert!(PartialMatching::from_entries(4, &[(0, Some(2)), (2, None)]).is_err());
        assert!(PartialMatching::from_entries(4, &[(0, None), (0, None)]).is_err());
        assert!(Matching::from_assignment(vec![1, 2, 0]).is_err());
    }

    #[test]
    fn counts_small_cases() {
        assert_eq!(completions_count(&PartialMatching::new(4), 2), BigUint::from(3u32));
        assert_eq!(completions_count(&PartialMatching::new(6), 1), BigUint::from(15u32));
        let full = pm(4, &[(0, 1), (2, 3)], &[]);
        assert_eq!(completions_count(&full, 2), BigUint::one());
        // Three committed non-edges leave one free vertex: no second edge.
        let blocked = pm(6, &[(0, 1)], &[2, 3, 4]);
        assert_eq!(completions_count(&blocked, 2), BigUint::zero());
        assert_eq!(pairings(3), BigUint::from(15u32));
    }

    #[test]
    fn enumerate_small_cases() {
        let all = enumerate_completions(&PartialMatching::new(4), 1, 100).unwrap();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0].edges(), vec![(0, 1)]);
        assert_eq!(all[5].edges(), vec![(2, 3)]);
        let single = enumerate_completions(&PartialMatching::new(2), 1, 10).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].edges(), vec![(0, 1)]);
        let blocked = pm(6, &[(0, 1)], &[2, 3, 4]);
        assert!(enumerate_completions(&blocked, 2, 10).unwrap().is_empty());
        assert!(matches!(
            enumerate_completions(&PartialMatching::new(10), 5, 100),
            Err(Error::EnumerationLimit { .. })
        ));
    }

    #[test]
    fn uniform_sample_edge_cases() {
        let mut rng = derive_rng(1, &["t"]);
        assert_eq!(sample_uniform(7, 0, &mut rng).unwrap().size(), 0);
        assert!(sample_uniform(5, 3, &mut rng).is_err());
        assert_eq!(sample_uniform(6, 3, &mut rng).unwrap().unmatched(), Vec::<usize>::new());
    }

    #[test]
    fn conditional_sample_respects_commitments() {
        let mut rng = derive_rng(2, &["t"]);
        let full = pm(4, &[(0, 2), (1, 3)], &[]);
        let m = sample_conditional(&full, 2, &mut rng).unwrap();
        assert_eq!(m.edges(), vec![(0, 2), (1, 3)]);
        let with_none = pm(8, &[], &[0]);
        for _ in 0..200 {
            let m = sample_conditional(&with_none, 3, &mut rng).unwrap();
            assert_eq!(m.mate(0), None);
        }
        let blocked = pm(6, &[(0, 1)], &[2, 3, 4]);
        assert!(matches!(
            sample_conditional(&blocked, 2, &mut rng),
            Err(Error::NotExtendable { .. })
        ));
    }

    #[test]
    fn tail_query_validation() {
        let empty = PartialMatching::new(100);
        let s: Vec<usize> = (0..10).collect();
        let q = TailQuery::new(&empty, 10, s.clone(), 2.0).unwrap();
        assert_eq!(q.bound(), 0.5);
        assert!(q.is_impossible());
        assert!(TailQuery::new(&empty, 10, s.clone(), 1.9).is_err());
        assert!(TailQuery::new(&empty, 25, s.clone(), 10.0).is_err());
        assert!(TailQuery::new(&empty, 5, s, 10.0).is_err());
        let est = incidence_tail_estimate(&q, 1000, 3);
        assert_eq!(est.hits, 0);
        assert_eq!(est.upper_99, 0.0);
        assert!(est.impossible);
    }

    #[test]
    fn big_ratio_handles_huge_operands() {
        let den = BigUint::one() << 5000u32;
        let num = BigUint::from(3u32) << 4998u32;
        assert!((big_ratio(&num, &den) - 0.75).abs() < 1e-15);
        assert_eq!(big_ratio(&BigUint::zero(), &den), 0.0);
    }

    fn arb_partial() -> impl Strategy<Value = (usize, usize, PartialMatching, u64)> {
        (2usize..=10)
            .prop_flat_map(|n| (Just(n), 0..=n / 2, any::<u64>()))
            .prop_map(|(n, target, seed)| {
                let mut rng = derive_rng(seed, &["arb-partial"]);
                let full = sample_uniform(n, target, &mut rng).unwrap();
                let domain: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.4)).collect();
                (n, target, full.restrict(&domain), seed)
            })
    }

    proptest! {
        #[test]
        fn sampled_matchings_are_involutions((n, target, _pm, seed) in arb_partial()) {
            let mut rng = derive_rng(seed, &["prop-uniform"]);
            let m = sample_uniform(n, target, &mut rng).unwrap();
            prop_assert_eq!(m.size(), target);
            prop_assert!(Matching::from_assignment(m.assignment().to_vec()).is_ok());
        }

        #[test]
        fn conditional_samples_restrict_to_the_partial((_n, target, pm, seed) in arb_partial()) {
            let mut rng = derive_rng(seed, &["prop-conditional"]);
            let m = sample_conditional(&pm, target, &mut rng).unwrap();
            prop_assert_eq!(m.size(), target);
            prop_assert!(m.extends(&pm));
        }
    }
}
