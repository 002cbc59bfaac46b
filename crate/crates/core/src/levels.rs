//! Sampled level hierarchies `V = A_0 ⊇ A_1 ⊇ … ⊇ A_{k-1}`, pivots and
//! bunches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::paths::{dijkstra, LocalSearch};

/// Resamples allowed when the top level comes out empty.
pub const MAX_RESAMPLES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSampling {
    k: usize,
    /// Highest `i` with `v ∈ A_i`.
    level_of: Vec<usize>,
    seed: u64,
}

fn derived_seed(seed: u64, attempt: usize) -> u64 {
    seed ^ (attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Draws `A_i` from `A_{i-1}` by independent coin flips with probability `p`.
/// Deterministic for a fixed seed (ChaCha8 stream, nodes visited in id order).
pub fn sample_levels(n: usize, k: usize, p: f64, seed: u64) -> Result<LevelSampling> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "sampling probability {p} not in (0, 1]"
        )));
    }
    if n == 0 {
        return Err(Error::DegenerateSampling(0));
    }
    for attempt in 0..=MAX_RESAMPLES {
        let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(seed, attempt));
        let mut level_of = vec![0usize; n];
        for i in 1..k {
            for lvl in level_of.iter_mut() {
                if *lvl == i - 1 && rng.gen::<f64>() < p {
                    *lvl = i;
                }
            }
        }
        if level_of.iter().any(|&l| l == k - 1) {
            return Ok(LevelSampling { k, level_of, seed });
        }
    }
    Err(Error::DegenerateSampling(MAX_RESAMPLES + 1))
}

impl LevelSampling {
    /// Rebuilds a sampling from explicit per-node levels.
    pub fn from_levels(k: usize, level_of: Vec<usize>, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if let Some(&bad) = level_of.iter().find(|&&l| l >= k) {
            return Err(Error::InvalidParameter(format!("level {bad} >= k = {k}")));
        }
        if !level_of.iter().any(|&l| l == k - 1) {
            return Err(Error::DegenerateSampling(0));
        }
        Ok(LevelSampling { k, level_of, seed })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn node_count(&self) -> usize {
        self.level_of.len()
    }

    pub fn level_of(&self, v: NodeId) -> usize {
        self.level_of[v]
    }

    pub fn contains(&self, i: usize, v: NodeId) -> bool {
        self.level_of[v] >= i
    }

    /// Members of `A_i` in id order; empty for `i >= k`.
    pub fn level(&self, i: usize) -> Vec<NodeId> {
        (0..self.level_of.len())
            .filter(|&v| self.level_of[v] >= i)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pivot {
    pub node: NodeId,
    pub dist: f64,
}

/// Pivots `p_i(v)` for all levels and bunches `B(v)` over a prefix of levels.
#[derive(Debug, Clone, PartialEq)]
pub struct BunchSet {
    k: usize,
    pivots: Vec<Option<Pivot>>,
    /// `B(v)` as `(u, dist(v, u))`, sorted by `u`.
    bunches: Vec<Vec<(NodeId, f64)>>,
}

/// Computes pivots for levels `0..k` and bunches restricted to levels
/// `0..bunch_levels`:
///
/// `B(v) = ∪_{i < bunch_levels} { u ∈ A_i \ A_{i+1} : dist(v,u) < dist(v, A_{i+1}) }`
///
/// with `dist(v, A_k) = ∞`. Each `w ∈ A_i \ A_{i+1}` grows its cluster with a
/// Dijkstra that only labels `v` while `dist(w,v) < dist(v, A_{i+1})`; the
/// cluster is closed under shortest-path prefixes so the pruned search is
/// exact.
pub fn build_bunches(g: &Graph, sampling: &LevelSampling, bunch_levels: usize) -> BunchSet {
    let n = g.node_count();
    let k = sampling.k();
    assert_eq!(sampling.node_count(), n, "sampling does not match graph");
    assert!(bunch_levels <= k);

    let mut pivots = vec![None; n * k];
    let mut level_dist = vec![vec![f64::INFINITY; n]; k + 1];
    for i in 0..k {
        let members = sampling.level(i);
        let dm = dijkstra(g, &members, f64::INFINITY).expect("levels are non-empty");
        for v in 0..n {
            if let Some(p) = dm.source_of[v] {
                pivots[v * k + i] = Some(Pivot {
                    node: p,
                    dist: dm.dist[v],
                });
            }
        }
        level_dist[i] = dm.dist;
    }

    let mut bunches: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); n];
    let mut search = LocalSearch::new(n);
    for i in 0..bunch_levels {
        let next = &level_dist[i + 1];
        for w in (0..n).filter(|&w| sampling.level_of(w) == i) {
            search.search(
                g,
                None,
                w,
                |v, d| d < next[v],
                |v, d| {
                    bunches[v].push((w, d));
                    true
                },
            );
        }
    }
    for b in &mut bunches {
        b.sort_unstable_by_key(|&(u, _)| u);
    }
    BunchSet { k, pivots, bunches }
}

impl BunchSet {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pivot(&self, v: NodeId, i: usize) -> Option<Pivot> {
        self.pivots[v * self.k + i]
    }

    pub fn bunch(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.bunches[v]
    }

    /// `dist(v, u)` when `u ∈ B(v)`.
    pub fn get(&self, v: NodeId, u: NodeId) -> Option<f64> {
        let b = &self.bunches[v];
        b.binary_search_by_key(&u, |&(x, _)| x).ok().map(|i| b[i].1)
    }

    pub fn total_size(&self) -> usize {
        self.bunches.iter().map(Vec::len).sum()
    }

    pub fn max_size(&self) -> usize {
        self.bunches.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn mean_size(&self) -> f64 {
        if self.bunches.is_empty() {
            0.0
        } else {
            self.total_size() as f64 / self.bunches.len() as f64
        }
    }

    pub fn pivot_entries(&self) -> usize {
        self.pivots.iter().filter(|p| p.is_some()).count()
    }

    pub(crate) fn from_parts(
        k: usize,
        pivots: Vec<Option<Pivot>>,
        mut bunches: Vec<Vec<(NodeId, f64)>>,
    ) -> Self {
        for b in &mut bunches {
            b.sort_unstable_by_key(|&(u, _)| u);
        }
        BunchSet { k, pivots, bunches }
    }
}
