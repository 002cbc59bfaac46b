//! Vertex-label distance oracle supporting label changes.
//!
//! Uses full Thorup–Zwick bunches (no level omitted) sampled with
//! `p = (n / ln n)^{-1/k}`, which keeps every bunch small with high
//! probability. For each label `λ` and each node `x ∈ B(λ)` the oracle keeps
//! `Heap(x, λ)`: the `λ`-labeled nodes whose bunch contains `x`, keyed by
//! their distance to `x`. Relabeling `v` touches only the heaps of `B(v)`.

use std::collections::{BTreeSet, HashMap};

use ordered_float::OrderedFloat;

use crate::error::{Error, Result};
use crate::graph::{Graph, LabelAssignment, LabelId, NodeId};
use crate::levels::{build_bunches, sample_levels, BunchSet, LevelSampling};

/// Ordered set of `(key, node)`; the minimum breaks key ties by node id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelHeap {
    entries: BTreeSet<(OrderedFloat<f64>, NodeId)>,
}

impl LabelHeap {
    pub fn insert(&mut self, key: f64, x: NodeId) -> bool {
        self.entries.insert((OrderedFloat(key), x))
    }

    pub fn remove(&mut self, key: f64, x: NodeId) -> bool {
        self.entries.remove(&(OrderedFloat(key), x))
    }

    pub fn minimum(&self) -> Option<(f64, NodeId)> {
        self.entries.first().map(|&(k, x)| (k.0, x))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, NodeId)> + '_ {
        self.entries.iter().map(|&(k, x)| (k.0, x))
    }
}

/// Heap operations performed by one relabeling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    pub removals: usize,
    pub insertions: usize,
}

/// `(n / ln n)^{-1/k}`.
pub fn dynamic_sampling_probability(n: usize, k: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "dynamic oracle needs n >= 2".into(),
        ));
    }
    let n = n as f64;
    Ok((n / n.ln()).powf(-1.0 / k as f64).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicOracle {
    sampling: LevelSampling,
    bunches: BunchSet,
    labels: LabelAssignment,
    /// `label_index[λ][x] = Heap(x, λ)`; keys are exactly `B(λ)`.
    label_index: Vec<HashMap<NodeId, LabelHeap>>,
}

impl DynamicOracle {
    pub fn build(g: &Graph, labels: &LabelAssignment, k: usize, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if labels.node_count() != g.node_count() {
            return Err(Error::InvalidParameter(
                "labeling does not match graph".into(),
            ));
        }
        let p = dynamic_sampling_probability(g.node_count(), k)?;
        let sampling = sample_levels(g.node_count(), k, p, seed)?;
        Ok(Self::build_with_sampling(g, labels, sampling))
    }

    /// Builds on fixed levels; two oracles built on the same levels and
    /// labeling are identical.
    pub fn build_with_sampling(
        g: &Graph,
        labels: &LabelAssignment,
        sampling: LevelSampling,
    ) -> Self {
        let bunches = build_bunches(g, &sampling, sampling.k());
        let mut label_index: Vec<HashMap<NodeId, LabelHeap>> =
            vec![HashMap::new(); labels.label_count()];
        for v in 0..g.node_count() {
            let index = &mut label_index[labels.label(v)];
            for &(x, d) in bunches.bunch(v) {
                index.entry(x).or_default().insert(d, v);
            }
        }
        DynamicOracle {
            sampling,
            bunches,
            labels: labels.clone(),
            label_index,
        }
    }

    pub fn k(&self) -> usize {
        self.sampling.k()
    }

    pub fn sampling(&self) -> &LevelSampling {
        &self.sampling
    }

    pub fn bunches(&self) -> &BunchSet {
        &self.bunches
    }

    pub fn labels(&self) -> &LabelAssignment {
        &self.labels
    }

    pub fn heap(&self, x: NodeId, label: LabelId) -> Option<&LabelHeap> {
        self.label_index.get(label)?.get(&x)
    }

    /// `B(λ)` in id order.
    pub fn label_bunch(&self, label: LabelId) -> Vec<NodeId> {
        let mut members: Vec<NodeId> = self.label_index[label].keys().copied().collect();
        members.sort_unstable();
        members
    }

    /// Changes the label of `v`: for every `x ∈ B(v)`, moves `v` from
    /// `Heap(x, old)` to `Heap(x, new)`, dropping emptied heaps.
    pub fn update_label(&mut self, v: NodeId, label: LabelId) -> Result<UpdateStats> {
        if v >= self.labels.node_count() {
            return Err(Error::NodeOutOfRange(v, self.labels.node_count()));
        }
        self.labels.check_label(label)?;
        let old = self.labels.label(v);
        let mut stats = UpdateStats::default();
        if old == label {
            return Ok(stats);
        }
        for &(x, d) in self.bunches.bunch(v) {
            let old_index = &mut self.label_index[old];
            let heap = old_index
                .get_mut(&x)
                .expect("x ∈ B(v) implies Heap(x, λ(v)) exists");
            let removed = heap.remove(d, v);
            debug_assert!(removed);
            if heap.is_empty() {
                old_index.remove(&x);
            }
            stats.removals += 1;

            self.label_index[label].entry(x).or_default().insert(d, v);
            stats.insertions += 1;
        }
        self.labels.set(v, label)?;
        Ok(stats)
    }

    /// Minimum over all levels `i` of `dist(v, p_i(v)) + Heap(p_i(v), λ).minimum()`.
    pub fn query(&self, v: NodeId, label: LabelId) -> Result<f64> {
        Ok(self
            .query_witness(v, label)?
            .map_or(f64::INFINITY, |(d, _)| d))
    }

    /// The answer together with the `λ`-labeled node realizing it.
    pub fn query_witness(&self, v: NodeId, label: LabelId) -> Result<Option<(f64, NodeId)>> {
        if v >= self.labels.node_count() {
            return Err(Error::NodeOutOfRange(v, self.labels.node_count()));
        }
        self.labels.check_label(label)?;
        let index = &self.label_index[label];
        let mut best: Option<(f64, NodeId)> = None;
        for i in 0..self.k() {
            let Some(p) = self.bunches.pivot(v, i) else {
                break;
            };
            let Some((key, w)) = index.get(&p.node).and_then(LabelHeap::minimum) else {
                continue;
            };
            let cand = p.dist + key;
            if best.is_none_or(|(b, bw)| cand < b || (cand == b && w < bw)) {
                best = Some((cand, w));
            }
        }
        Ok(best)
    }

    pub fn heap_entries(&self) -> usize {
        self.label_index
            .iter()
            .flat_map(HashMap::values)
            .map(LabelHeap::len)
            .sum()
    }

    /// Bunch entries, pivots, `B(λ)` keys and heap entries.
    pub fn stored_entries(&self) -> usize {
        self.bunches.total_size()
            + self.bunches.pivot_entries()
            + self.label_index.iter().map(HashMap::len).sum::<usize>()
            + self.heap_entries()
    }

    /// Checks that every heap holds exactly the `λ`-labeled nodes whose bunch
    /// contains its owner, with the bunch distance as key, and that no empty
    /// heap is kept.
    pub fn check_index(&self) -> bool {
        let mut expected: Vec<HashMap<NodeId, LabelHeap>> =
            vec![HashMap::new(); self.label_index.len()];
        for v in 0..self.labels.node_count() {
            for &(x, d) in self.bunches.bunch(v) {
                expected[self.labels.label(v)]
                    .entry(x)
                    .or_default()
                    .insert(d, v);
            }
        }
        expected == self.label_index
            && self
                .label_index
                .iter()
                .all(|idx| idx.values().all(|h| !h.is_empty()))
    }
}
