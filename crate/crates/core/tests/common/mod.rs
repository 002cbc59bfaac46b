//! Reference oracles for integration tests. None of them call into the
//! algorithms under test; they only read graphs and labelings.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use rand::Rng;
use vlabel_core::{Graph, LabelAssignment, NodeId};

pub const INF: f64 = f64::INFINITY;

/// All-pairs distances.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<f64>> {
    floyd_warshall_hops(g).0
}

/// All-pairs distances and, per pair, the fewest edges on any shortest path.
pub fn floyd_warshall_hops(g: &Graph) -> (Vec<Vec<f64>>, Vec<Vec<usize>>) {
    let n = g.node_count();
    let mut d = vec![vec![INF; n]; n];
    let mut h = vec![vec![usize::MAX; n]; n];
    for v in 0..n {
        d[v][v] = 0.0;
        h[v][v] = 0;
    }
    for e in g.edges() {
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            if (e.w, 1) < (d[a][b], h[a][b]) {
                d[a][b] = e.w;
                h[a][b] = 1;
            }
        }
    }
    for m in 0..n {
        for i in 0..n {
            let dim = d[i][m];
            if dim == INF {
                continue;
            }
            let him = h[i][m];
            for j in 0..n {
                let cand = dim + d[m][j];
                if cand < d[i][j] || (cand == d[i][j] && cand < INF && him + h[m][j] < h[i][j]) {
                    d[i][j] = cand;
                    h[i][j] = him + h[m][j];
                }
            }
        }
    }
    (d, h)
}

/// `dist(v, λ)` for every node and label from an all-pairs matrix.
pub fn label_distances(apsp: &[Vec<f64>], labels: &LabelAssignment) -> Vec<Vec<f64>> {
    let n = apsp.len();
    let mut out = vec![vec![INF; labels.label_count()]; n];
    for v in 0..n {
        for u in 0..n {
            let l = labels.label(u);
            out[v][l] = out[v][l].min(apsp[v][u]);
        }
    }
    out
}

/// Distance from the nearest source using at most `limit` edges, by the
/// textbook `dp[h][v] = min(dp[h-1][v], min_u dp[h-1][u] + w(u, v))`.
pub fn hop_dp(g: &Graph, sources: &[NodeId], limit: usize) -> Vec<f64> {
    let mut dp = vec![INF; g.node_count()];
    for &s in sources {
        dp[s] = 0.0;
    }
    for _ in 0..limit {
        let prev = dp.clone();
        for e in g.edges() {
            dp[e.v] = dp[e.v].min(prev[e.u] + e.w);
            dp[e.u] = dp[e.u].min(prev[e.v] + e.w);
        }
    }
    dp
}

/// `B(v)` straight from the definition: `u ∈ A_i \ A_{i+1}` with
/// `dist(v, u) < dist(v, A_{i+1})` for `i < bunch_levels`, where
/// `A_i = {w : level_of[w] >= i}` and `A_k` is empty.
pub fn brute_bunch(
    apsp: &[Vec<f64>],
    level_of: &[usize],
    bunch_levels: usize,
    v: NodeId,
) -> BTreeSet<NodeId> {
    let n = apsp.len();
    let dist_to_level = |i: usize| {
        (0..n)
            .filter(|&w| level_of[w] >= i)
            .map(|w| apsp[v][w])
            .fold(INF, f64::min)
    };
    let mut out = BTreeSet::new();
    for i in 0..bunch_levels {
        let limit = dist_to_level(i + 1);
        for u in 0..n {
            if level_of[u] == i && apsp[v][u] < limit {
                out.insert(u);
            }
        }
    }
    out
}

/// Random simple graph with integer weights in `0..=max_w` (so path sums
/// are exact in floating point).
pub fn random_graph(rng: &mut impl Rng, n: usize, m: usize, max_w: u32) -> Graph {
    let mut g = Graph::new(n);
    let max = n * n.saturating_sub(1) / 2;
    let mut tries = 0;
    while g.edge_count() < m.min(max) && tries < 100 * (m + 1) {
        tries += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && g.edge_id(u, v).is_none() {
            g.add_edge(u, v, rng.gen_range(0..=max_w) as f64).unwrap();
        }
    }
    g
}

pub fn random_labels(rng: &mut impl Rng, n: usize, label_count: usize) -> LabelAssignment {
    LabelAssignment::new(
        (0..n).map(|_| rng.gen_range(0..label_count)).collect(),
        label_count,
    )
    .unwrap()
}

/// Copy of `g` with every weight rounded to the nearest integer.
pub fn rounded(g: &Graph) -> Graph {
    Graph::from_edges(
        g.node_count(),
        g.edges().iter().map(|e| (e.u, e.v, e.w.round())),
    )
    .unwrap()
}

/// `exact <= answer <= bound · exact`, up to relative rounding slack; an
/// infinite exact distance requires an infinite answer.
pub fn within(exact: f64, answer: f64, bound: f64) -> bool {
    const TOL: f64 = 1e-9;
    if exact == INF {
        return answer == INF;
    }
    answer >= exact * (1.0 - TOL) && answer <= bound * exact * (1.0 + TOL)
}
