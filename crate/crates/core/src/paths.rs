//! Shortest-path primitives: multi-source Dijkstra with radius truncation,
//! hop-bounded relaxation, balls, path extraction, and residual views with
//! node deletion.
//!
//! All searches break ties the same way so that shortest-path trees are
//! reproducible: a node keeps the lexicographically smallest
//! `(distance, source id, predecessor id)` label, and equal keys are settled
//! in node-id order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};

/// Result of a (possibly truncated or hop-bounded) shortest-path run.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    pub dist: Vec<f64>,
    /// Predecessor on the witnessing path. For hop-bounded runs this is the
    /// last hop of the final witness; use [`extract_path`] to walk it.
    pub parent: Vec<Option<NodeId>>,
    pub source_of: Vec<Option<NodeId>>,
    parent_edge: Vec<Option<EdgeId>>,
    hops: Option<HopLayers>,
}

/// Per-round predecessors of a hop-bounded run. `rounds[r][v]` is set when
/// round `r + 1` improved `v`, pointing at the round-`r` predecessor.
#[derive(Debug, Clone, PartialEq)]
struct HopLayers {
    limit: usize,
    rounds: Vec<Vec<Option<(NodeId, EdgeId)>>>,
}

impl DistanceMap {
    fn unreached(n: usize) -> Self {
        DistanceMap {
            dist: vec![f64::INFINITY; n],
            parent: vec![None; n],
            source_of: vec![None; n],
            parent_edge: vec![None; n],
            hops: None,
        }
    }

    pub fn is_reached(&self, v: NodeId) -> bool {
        self.dist[v].is_finite()
    }

    /// Nodes with finite distance, in id order.
    pub fn reached(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.dist.len()).filter(move |&v| self.dist[v].is_finite())
    }

    pub fn hop_limit(&self) -> Option<usize> {
        self.hops.as_ref().map(|h| h.limit)
    }

    /// Edges of the shortest-path forest: the parent edge of every reached
    /// non-source node.
    pub fn tree_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.parent_edge.iter().filter_map(|e| *e)
    }
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    d: f64,
    src: NodeId,
    node: NodeId,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .d
            .total_cmp(&self.d)
            .then_with(|| other.src.cmp(&self.src))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn is_alive(alive: Option<&[bool]>, v: NodeId) -> bool {
    alive.is_none_or(|a| a[v])
}

fn check_sources(g: &Graph, alive: Option<&[bool]>, sources: &[NodeId]) -> Result<Vec<NodeId>> {
    if sources.is_empty() {
        return Err(Error::NoSources);
    }
    let mut s = sources.to_vec();
    s.sort_unstable();
    s.dedup();
    for &v in &s {
        g.check_node(v)?;
        if !is_alive(alive, v) {
            return Err(Error::DeletedNode(v));
        }
    }
    Ok(s)
}

fn dijkstra_masked(g: &Graph, alive: Option<&[bool]>, sources: &[NodeId], cap: f64) -> DistanceMap {
    let n = g.node_count();
    let mut dm = DistanceMap::unreached(n);
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dm.dist[s] = 0.0;
        dm.source_of[s] = Some(s);
        heap.push(Entry {
            d: 0.0,
            src: s,
            node: s,
        });
    }
    while let Some(Entry { d, src, node: u }) = heap.pop() {
        if settled[u] || d != dm.dist[u] || Some(src) != dm.source_of[u] {
            continue;
        }
        settled[u] = true;
        for nb in g.neighbors(u) {
            let v = nb.to;
            if settled[v] || !is_alive(alive, v) {
                continue;
            }
            let nd = d + nb.w;
            if nd > cap {
                continue;
            }
            let cur = dm.dist[v];
            let key_better = nd < cur || (nd == cur && Some(src) < dm.source_of[v]);
            let parent_better = nd == cur && Some(src) == dm.source_of[v] && Some(u) < dm.parent[v];
            if key_better {
                dm.dist[v] = nd;
                dm.source_of[v] = Some(src);
                dm.parent[v] = Some(u);
                dm.parent_edge[v] = Some(nb.edge);
                heap.push(Entry {
                    d: nd,
                    src,
                    node: v,
                });
            } else if parent_better {
                dm.parent[v] = Some(u);
                dm.parent_edge[v] = Some(nb.edge);
            }
        }
    }
    dm
}

/// Multi-source Dijkstra truncated at `radius_cap` (pass `f64::INFINITY` for
/// no truncation). Equivalent to a single run from a virtual super-source
/// joined to every source by a zero-weight edge.
pub fn dijkstra(g: &Graph, sources: &[NodeId], radius_cap: f64) -> Result<DistanceMap> {
    let s = check_sources(g, None, sources)?;
    Ok(dijkstra_masked(g, None, &s, radius_cap))
}

/// Nodes within distance `r` of `v`, in id order.
pub fn ball(g: &Graph, v: NodeId, r: f64) -> Result<Vec<NodeId>> {
    Ok(dijkstra(g, &[v], r)?.reached().collect())
}

/// Shortest paths using at most `hop_limit` edges (round-based Bellman-Ford).
pub fn hop_bounded_distances(
    g: &Graph,
    sources: &[NodeId],
    hop_limit: usize,
) -> Result<DistanceMap> {
    let s = check_sources(g, None, sources)?;
    let n = g.node_count();
    let mut dm = DistanceMap::unreached(n);
    for &v in &s {
        dm.dist[v] = 0.0;
        dm.source_of[v] = Some(v);
    }
    let mut rounds = Vec::new();
    let mut prev = dm.dist.clone();
    let mut prev_src = dm.source_of.clone();
    for _ in 0..hop_limit {
        let mut next = prev.clone();
        let mut next_src = prev_src.clone();
        let mut step: Vec<Option<(NodeId, EdgeId)>> = vec![None; n];
        let mut changed = false;
        for u in 0..n {
            if !prev[u].is_finite() {
                continue;
            }
            for nb in g.neighbors(u) {
                let nd = prev[u] + nb.w;
                // nodes are scanned in id order, so strict improvement keeps
                // the smallest predecessor among equal candidates
                if nd < next[nb.to] {
                    next[nb.to] = nd;
                    next_src[nb.to] = prev_src[u];
                    step[nb.to] = Some((u, nb.edge));
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        for (v, &s) in step.iter().enumerate() {
            if let Some((u, e)) = s {
                dm.parent[v] = Some(u);
                dm.parent_edge[v] = Some(e);
            }
        }
        rounds.push(step);
        prev = next;
        prev_src = next_src;
    }
    dm.dist = prev;
    dm.source_of = prev_src;
    dm.hops = Some(HopLayers {
        limit: hop_limit,
        rounds,
    });
    Ok(dm)
}

/// Edges of the witnessing path from a source to `target`, in order from the
/// source. For hop-bounded runs the path has at most `hop_limit` edges.
pub fn extract_path(dm: &DistanceMap, target: NodeId) -> Result<Vec<EdgeId>> {
    if target >= dm.dist.len() {
        return Err(Error::NodeOutOfRange(target, dm.dist.len()));
    }
    if !dm.is_reached(target) {
        return Err(Error::NoPath(target));
    }
    let mut path = Vec::new();
    match &dm.hops {
        None => {
            let mut v = target;
            while let (Some(u), Some(e)) = (dm.parent[v], dm.parent_edge[v]) {
                path.push(e);
                v = u;
            }
        }
        Some(h) => {
            let mut v = target;
            let mut r = h.rounds.len();
            while r > 0 {
                if let Some((u, e)) = h.rounds[r - 1][v] {
                    path.push(e);
                    v = u;
                }
                r -= 1;
            }
        }
    }
    path.reverse();
    Ok(path)
}

/// A shrinking view of a graph from which nodes can be deleted.
#[derive(Debug, Clone)]
pub struct Residual<'g> {
    graph: &'g Graph,
    alive: Vec<bool>,
    alive_count: usize,
}

impl<'g> Residual<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Residual {
            graph,
            alive: vec![true; graph.node_count()],
            alive_count: graph.node_count(),
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn is_alive(&self, v: NodeId) -> bool {
        self.alive[v]
    }

    pub fn alive_mask(&self) -> &[bool] {
        &self.alive
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    pub fn alive_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.alive.len()).filter(move |&v| self.alive[v])
    }

    /// Marks nodes as deleted. Already deleted nodes are ignored.
    pub fn remove_nodes(&mut self, victims: &[NodeId]) {
        for &v in victims {
            if self.alive[v] {
                self.alive[v] = false;
                self.alive_count -= 1;
            }
        }
    }

    pub fn dijkstra(&self, sources: &[NodeId], radius_cap: f64) -> Result<DistanceMap> {
        let s = check_sources(self.graph, Some(&self.alive), sources)?;
        Ok(dijkstra_masked(
            self.graph,
            Some(&self.alive),
            &s,
            radius_cap,
        ))
    }

    pub fn ball(&self, v: NodeId, r: f64) -> Result<Vec<NodeId>> {
        Ok(self.dijkstra(&[v], r)?.reached().collect())
    }
}

/// Reusable scratch space for many small single-source searches.
///
/// Each search touches only the nodes it reaches, so the cost is proportional
/// to the explored region rather than to `n`.
pub(crate) struct LocalSearch {
    dist: Vec<f64>,
    parent: Vec<NodeId>,
    settled: Vec<bool>,
    touched: Vec<NodeId>,
    heap: BinaryHeap<Entry>,
}

impl LocalSearch {
    pub(crate) fn new(n: usize) -> Self {
        LocalSearch {
            dist: vec![f64::INFINITY; n],
            parent: vec![usize::MAX; n],
            settled: vec![false; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v] = f64::INFINITY;
            self.parent[v] = usize::MAX;
            self.settled[v] = false;
        }
        self.touched.clear();
        self.heap.clear();
    }

    /// Runs Dijkstra from `source`, labelling a node only while
    /// `admit(node, tentative)` holds, and calls `visit(node, dist)` on every
    /// settled node in settle order. `visit` returns `false` to stop early.
    pub(crate) fn search(
        &mut self,
        g: &Graph,
        alive: Option<&[bool]>,
        source: NodeId,
        admit: impl Fn(NodeId, f64) -> bool,
        mut visit: impl FnMut(NodeId, f64) -> bool,
    ) {
        self.reset();
        if !is_alive(alive, source) || !admit(source, 0.0) {
            return;
        }
        self.dist[source] = 0.0;
        self.touched.push(source);
        self.heap.push(Entry {
            d: 0.0,
            src: source,
            node: source,
        });
        while let Some(Entry { d, node: u, .. }) = self.heap.pop() {
            if self.settled[u] || d != self.dist[u] {
                continue;
            }
            self.settled[u] = true;
            if !visit(u, d) {
                return;
            }
            for nb in g.neighbors(u) {
                let v = nb.to;
                if self.settled[v] || !is_alive(alive, v) {
                    continue;
                }
                let nd = d + nb.w;
                if !admit(v, nd) {
                    continue;
                }
                if self.dist[v].is_infinite() {
                    self.touched.push(v);
                }
                if nd < self.dist[v] {
                    self.dist[v] = nd;
                    self.parent[v] = u;
                    self.heap.push(Entry {
                        d: nd,
                        src: source,
                        node: v,
                    });
                } else if nd == self.dist[v] && u < self.parent[v] {
                    self.parent[v] = u;
                }
            }
        }
    }

    /// `min(|B(v, r)|, cap)` in the (optionally masked) graph.
    pub(crate) fn ball_size(
        &mut self,
        g: &Graph,
        alive: Option<&[bool]>,
        v: NodeId,
        r: f64,
        cap: usize,
    ) -> usize {
        let mut count = 0;
        if cap == 0 {
            return 0;
        }
        self.search(
            g,
            alive,
            v,
            |_, d| d <= r,
            |_, _| {
                count += 1;
                count < cap
            },
        );
        count
    }
}
