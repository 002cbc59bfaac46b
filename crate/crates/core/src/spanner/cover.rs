//! One cover invocation: ball carving in sparse regions, then a separated
//! net of centers whose Voronoi cells receive shortest-path trees and
//! short paths to nearby labels.

use std::collections::BTreeMap;

use crate::graph::{EdgeId, Graph, NodeId};
use crate::paths::{extract_path, DistanceMap, LocalSearch, Residual};

use super::Stage;

#[derive(Debug, Clone, PartialEq)]
pub struct CoverOutput {
    pub d: f64,
    /// Relevance threshold for weighted covers; `None` for unweighted ones.
    pub x: Option<usize>,
    /// Edges with the stage that first added them.
    pub edges: BTreeMap<EdgeId, Stage>,
    /// Edges first added by carving, cluster trees and label paths.
    pub stage_counts: [usize; 3],
    /// `(v, i)` for every carved ball, in carving order.
    pub carved: Vec<(NodeId, usize)>,
    pub centers: Vec<NodeId>,
    /// Residual membership after carving.
    pub survivors: Vec<bool>,
}

impl CoverOutput {
    fn add(&mut self, e: EdgeId, stage: Stage) {
        if let std::collections::btree_map::Entry::Vacant(slot) = self.edges.entry(e) {
            slot.insert(stage);
            self.stage_counts[stage as usize] += 1;
        }
    }
}

pub(crate) struct CoverInput<'a> {
    pub graph: &'a Graph,
    pub label_count: usize,
    pub k: usize,
    pub d: f64,
    pub x: Option<usize>,
    /// Per label, distances and witness paths from the label class: plain
    /// shortest paths (unweighted) or `2x`-hop-bounded ones (weighted).
    pub label_maps: &'a [Option<DistanceMap>],
}

/// Smallest count `c` with `c >= t`, clamped to `n + 1`, so that
/// `size < t ⇔ size < threshold_cap(t)` for integer sizes.
fn threshold_cap(t: f64, n: usize) -> usize {
    if t > (n + 1) as f64 {
        n + 1
    } else {
        t.ceil().max(0.0) as usize
    }
}

pub(crate) fn run_cover(input: &CoverInput<'_>) -> CoverOutput {
    let g = input.graph;
    let n = g.node_count();
    let k = input.k;
    let d = input.d;
    let ell = input.label_count.max(1) as f64;
    let weighted = input.x.is_some();
    let base = input.x.map_or(d, |x| x as f64);
    // thresholds base · ℓ^{(i-1)/k} for i = 1..=k; the guard uses i = k
    let threshold = |i: usize| base * ell.powf((i as f64 - 1.0) / k as f64);
    let guard_cap = threshold_cap(threshold(k), n);
    let kd = k as f64 * d;

    let mut out = CoverOutput {
        d,
        x: input.x,
        edges: BTreeMap::new(),
        stage_counts: [0; 3],
        carved: Vec::new(),
        centers: Vec::new(),
        survivors: Vec::new(),
    };
    let mut res = Residual::new(g);
    let mut search = LocalSearch::new(n);

    let relevant = |search: &mut LocalSearch, alive: &[bool], v: NodeId| match input.x {
        Some(x) => search.ball_size(g, Some(alive), v, d, x) >= x,
        None => true,
    };

    // Stage 1: carve balls around nodes whose kd-ball is small.
    let mut status: Vec<Option<bool>> = vec![None; n];
    loop {
        let mut picked = None;
        for (v, cached) in status.iter_mut().enumerate() {
            if !res.is_alive(v) {
                continue;
            }
            let q = match *cached {
                Some(q) => q,
                None => {
                    let alive = res.alive_mask();
                    let q = relevant(&mut search, alive, v)
                        && search.ball_size(g, Some(alive), v, kd, guard_cap) < guard_cap;
                    *cached = Some(q);
                    q
                }
            };
            if q {
                picked = Some(v);
                break;
            }
        }
        let Some(v) = picked else { break };

        let i = (1..=k)
            .find(|&i| {
                let cap = threshold_cap(threshold(i), n);
                search.ball_size(g, Some(res.alive_mask()), v, i as f64 * d, cap) < cap
            })
            .expect("the guard makes i = k qualify");
        if weighted {
            assert!(i > 1, "relevant node carved with i = 1");
        }
        out.carved.push((v, i));

        let tree = res.dijkstra(&[v], i as f64 * d).expect("v is alive");
        for e in tree.tree_edges() {
            out.add(e, Stage::Carve);
        }
        let radius = if i > 1 { (i - 1) as f64 * d } else { d };
        let victims: Vec<NodeId> = if radius == i as f64 * d {
            tree.reached().collect()
        } else {
            res.ball(v, radius).expect("v is alive")
        };
        // only nodes within kd of a victim can see their balls shrink
        let near = res.dijkstra(&victims, kd).expect("victims are alive");
        for u in near.reached() {
            status[u] = None;
        }
        res.remove_nodes(&victims);
    }
    out.survivors = res.alive_mask().to_vec();

    // Stage 2: greedy 2kd-separated centers, scanned in id order.
    let mut covered = vec![false; n];
    for v in 0..n {
        if !res.is_alive(v) || covered[v] || !relevant(&mut search, res.alive_mask(), v) {
            continue;
        }
        out.centers.push(v);
        let alive = res.alive_mask();
        search.search(
            g,
            Some(alive),
            v,
            |_, dd| dd <= 2.0 * kd,
            |u, _| {
                covered[u] = true;
                true
            },
        );
    }
    if out.centers.is_empty() {
        return out;
    }

    let voronoi = res
        .dijkstra(&out.centers, f64::INFINITY)
        .expect("centers are alive");
    for e in voronoi.tree_edges() {
        out.add(e, Stage::ClusterTree);
    }
    // cell members close enough to their center to reach it within 2kd
    let mut cells: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for u in voronoi.reached() {
        if voronoi.dist[u] <= 2.0 * kd {
            cells[voronoi.source_of[u].expect("reached nodes have a source")].push(u);
        }
    }
    for c in out.centers.clone() {
        for lm in input.label_maps.iter().flatten() {
            if let Some(&y) = cells[c].iter().find(|&&y| lm.dist[y] <= d) {
                for e in extract_path(lm, y).expect("finite distance has a path") {
                    out.add(e, Stage::LabelPath);
                }
            }
        }
    }
    out
}
