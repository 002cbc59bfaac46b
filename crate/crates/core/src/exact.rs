//! Exact `n × ℓ` node-to-label distance table.

use crate::error::{Error, Result};
use crate::graph::{Graph, LabelAssignment, LabelId, NodeId};
use crate::paths::{dijkstra, DistanceMap};

#[derive(Debug, Clone, PartialEq)]
pub struct ExactLabelTable {
    n: usize,
    label_count: usize,
    dist: Vec<f64>,
    witness: Vec<Option<NodeId>>,
}

/// One multi-source Dijkstra per non-empty label class.
pub fn label_distance_maps(g: &Graph, labels: &LabelAssignment) -> Vec<Option<DistanceMap>> {
    (0..labels.label_count())
        .map(|l| {
            let class: Vec<NodeId> = labels.class(l).iter().copied().collect();
            if class.is_empty() {
                None
            } else {
                Some(dijkstra(g, &class, f64::INFINITY).expect("class members are valid sources"))
            }
        })
        .collect()
}

impl ExactLabelTable {
    pub fn build(g: &Graph, labels: &LabelAssignment) -> Self {
        let maps = label_distance_maps(g, labels);
        Self::from_maps(g.node_count(), &maps)
    }

    pub(crate) fn from_maps(n: usize, maps: &[Option<DistanceMap>]) -> Self {
        let label_count = maps.len();
        let mut dist = vec![f64::INFINITY; n * label_count];
        let mut witness = vec![None; n * label_count];
        for (l, dm) in maps.iter().enumerate() {
            let Some(dm) = dm else { continue };
            for v in 0..n {
                dist[v * label_count + l] = dm.dist[v];
                witness[v * label_count + l] = dm.source_of[v];
            }
        }
        ExactLabelTable {
            n,
            label_count,
            dist,
            witness,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn label_count(&self) -> usize {
        self.label_count
    }

    /// Distance from `v` to the nearest `label` node and that node.
    pub fn query(&self, v: NodeId, label: LabelId) -> Result<(f64, Option<NodeId>)> {
        if v >= self.n {
            return Err(Error::NodeOutOfRange(v, self.n));
        }
        if label >= self.label_count {
            return Err(Error::LabelOutOfRange(label, self.label_count));
        }
        let i = v * self.label_count + label;
        Ok((self.dist[i], self.witness[i]))
    }

    /// Unchecked distance lookup.
    pub fn dist(&self, v: NodeId, label: LabelId) -> f64 {
        self.dist[v * self.label_count + label]
    }

    /// Largest finite entry, or 0 when there is none.
    pub fn max_finite(&self) -> f64 {
        self.dist
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }

    /// Writes the table as `v,label,dist` CSV rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("v,label,dist\n");
        for v in 0..self.n {
            for l in 0..self.label_count {
                out.push_str(&format!("{v},{l},{}\n", self.dist(v, l)));
            }
        }
        out
    }
}
