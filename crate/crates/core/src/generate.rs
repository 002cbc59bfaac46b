//! Seeded graph and labeling generators.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, LabelAssignment, NodeId};

/// Draws before a uniform labeling with an empty class is given up on.
const LABEL_REDRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub enum GraphModel {
    /// `m` distinct edges drawn uniformly among all `n(n-1)/2` pairs.
    Gnm {
        n: usize,
        m: usize,
    },
    Grid {
        w: usize,
        h: usize,
    },
    Path {
        n: usize,
    },
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightModel {
    Unit,
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LabelModel {
    /// Independent uniform labels, redrawn until every class is non-empty.
    Uniform { labels: usize },
    /// Connected patches of about `patch` nodes, labels assigned round-robin.
    Clustered { labels: usize, patch: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphModel,
    pub weights: WeightModel,
    pub labels: LabelModel,
    pub k: usize,
    pub eps: f64,
    pub seeds: Vec<u64>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn fields<const N: usize>(s: &str, name: &str) -> Result<[usize; N]> {
    let parts: Vec<&str> = s.split(':').skip(1).collect();
    if parts.len() != N {
        return Err(bad(format!("`{s}`: {name} takes {N} parameter(s)")));
    }
    let mut out = [0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p
            .parse()
            .map_err(|_| bad(format!("`{s}`: bad number `{p}`")))?;
    }
    Ok(out)
}

impl FromStr for GraphModel {
    type Err = Error;

    /// `gnm:N:M`, `grid:W:H`, `path:N` or `file:PATH`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split(':').next().unwrap_or_default() {
            "gnm" => fields::<2>(s, "gnm").map(|[n, m]| GraphModel::Gnm { n, m }),
            "grid" => fields::<2>(s, "grid").map(|[w, h]| GraphModel::Grid { w, h }),
            "path" => fields::<1>(s, "path").map(|[n]| GraphModel::Path { n }),
            "file" => Ok(GraphModel::File(PathBuf::from(&s[5..]))),
            _ => Err(bad(format!("unknown graph model `{s}`"))),
        }
    }
}

impl FromStr for WeightModel {
    type Err = Error;

    /// `unit` or `uniform:LO:HI`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "unit" {
            return Ok(WeightModel::Unit);
        }
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() == 3 && parts[0] == "uniform" {
            let lo: f64 = parts[1]
                .parse()
                .map_err(|_| bad(format!("bad weight bound in `{s}`")))?;
            let hi: f64 = parts[2]
                .parse()
                .map_err(|_| bad(format!("bad weight bound in `{s}`")))?;
            if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
                return Err(bad(format!(
                    "weight range `{s}` must satisfy 0 <= lo <= hi"
                )));
            }
            return Ok(WeightModel::Uniform { lo, hi });
        }
        Err(bad(format!("unknown weight model `{s}`")))
    }
}

impl FromStr for LabelModel {
    type Err = Error;

    /// `uniform:L` or `clustered:L:PATCH`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split(':').next().unwrap_or_default() {
            "uniform" => fields::<1>(s, "uniform").map(|[labels]| LabelModel::Uniform { labels }),
            "clustered" => fields::<2>(s, "clustered")
                .map(|[labels, patch]| LabelModel::Clustered { labels, patch }),
            _ => Err(bad(format!("unknown label model `{s}`"))),
        }
    }
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphModel::Gnm { n, m } => write!(f, "gnm:{n}:{m}"),
            GraphModel::Grid { w, h } => write!(f, "grid:{w}:{h}"),
            GraphModel::Path { n } => write!(f, "path:{n}"),
            GraphModel::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

pub fn gnm_edges(n: usize, m: usize, rng: &mut impl Rng) -> Result<Vec<(NodeId, NodeId)>> {
    let max = n * n.saturating_sub(1) / 2;
    if m > max {
        return Err(bad(format!("gnm: m = {m} exceeds n(n-1)/2 = {max}")));
    }
    if 2 * m > max {
        let mut all: Vec<(NodeId, NodeId)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        all.shuffle(rng);
        all.truncate(m);
        return Ok(all);
    }
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && seen.insert((u.min(v), u.max(v))) {
            edges.push((u.min(v), u.max(v)));
        }
    }
    Ok(edges)
}

fn topology(model: &GraphModel, rng: &mut impl Rng) -> Result<(usize, Vec<(NodeId, NodeId)>)> {
    Ok(match *model {
        GraphModel::Gnm { n, m } => (n, gnm_edges(n, m, rng)?),
        GraphModel::Grid { w, h } => {
            let mut edges = Vec::new();
            for r in 0..h {
                for c in 0..w {
                    let v = r * w + c;
                    if c + 1 < w {
                        edges.push((v, v + 1));
                    }
                    if r + 1 < h {
                        edges.push((v, v + w));
                    }
                }
            }
            (w * h, edges)
        }
        GraphModel::Path { n } => (n, (1..n).map(|v| (v - 1, v)).collect()),
        GraphModel::File(_) => unreachable!("file models are read, not generated"),
    })
}

pub fn uniform_labels(n: usize, labels: usize, rng: &mut impl Rng) -> Result<LabelAssignment> {
    if labels == 0 || labels > n {
        return Err(bad(format!("need 1 <= l <= n, got l = {labels}, n = {n}")));
    }
    for _ in 0..LABEL_REDRAWS {
        let label_of: Vec<usize> = (0..n).map(|_| rng.gen_range(0..labels)).collect();
        let la = LabelAssignment::new(label_of, labels)?;
        if la.non_empty_classes() == labels {
            return Ok(la);
        }
    }
    Err(bad(format!(
        "could not draw {labels} non-empty classes on {n} nodes"
    )))
}

pub fn clustered_labels(
    g: &Graph,
    labels: usize,
    patch: usize,
    rng: &mut impl Rng,
) -> Result<LabelAssignment> {
    let n = g.node_count();
    if labels == 0 || labels > n || patch == 0 {
        return Err(bad("clustered labels need 1 <= l <= n and patch >= 1"));
    }
    let mut palette: Vec<usize> = (0..labels).collect();
    palette.shuffle(rng);
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);

    let mut label_of = vec![usize::MAX; n];
    let mut patches = 0;
    let mut queue = VecDeque::new();
    for &seed in &order {
        if label_of[seed] != usize::MAX {
            continue;
        }
        let label = palette[patches % labels];
        patches += 1;
        let mut size = 0;
        queue.clear();
        queue.push_back(seed);
        label_of[seed] = label;
        while let Some(u) = queue.pop_front() {
            size += 1;
            if size >= patch {
                break;
            }
            for nb in g.neighbors(u) {
                if label_of[nb.to] == usize::MAX && size + queue.len() < patch {
                    label_of[nb.to] = label;
                    queue.push_back(nb.to);
                }
            }
        }
        // nodes claimed but not expanded keep their label
    }
    if patches < labels {
        return Err(bad(format!(
            "only {patches} patches for {labels} labels; use a smaller patch"
        )));
    }
    LabelAssignment::new(label_of, labels)
}

/// Builds the graph and labeling for one seed. File models ignore the
/// weight and label models.
pub fn generate(config: &ExperimentConfig, seed: u64) -> Result<(Graph, LabelAssignment)> {
    if let GraphModel::File(path) = &config.graph {
        let text =
            std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        return crate::io::read_graph(&text);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, pairs) = topology(&config.graph, &mut rng)?;
    let mut g = Graph::new(n);
    for (u, v) in pairs {
        let w = match config.weights {
            WeightModel::Unit => 1.0,
            WeightModel::Uniform { lo, hi } => rng.gen_range(lo..=hi),
        };
        g.add_edge(u, v, w)?;
    }
    let labels = match config.labels {
        LabelModel::Uniform { labels } => uniform_labels(n, labels, &mut rng)?,
        LabelModel::Clustered { labels, patch } => clustered_labels(&g, labels, patch, &mut rng)?,
    };
    Ok((g, labels))
}

/// Convenience for a single generated instance.
pub fn instance(
    graph: GraphModel,
    weights: WeightModel,
    labels: LabelModel,
    seed: u64,
) -> Result<(Graph, LabelAssignment)> {
    let config = ExperimentConfig {
        graph,
        weights,
        labels,
        k: 2,
        eps: 0.5,
        seeds: vec![seed],
    };
    generate(&config, seed)
}
