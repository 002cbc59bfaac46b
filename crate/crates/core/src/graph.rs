//! Undirected weighted graphs and node labelings.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type LabelId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub w: f64,
}

impl Edge {
    /// Endpoints with the smaller id first.
    pub fn endpoints(&self) -> (NodeId, NodeId) {
        if self.u <= self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }
}

/// One adjacency entry: the far endpoint, the weight and the edge it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub to: NodeId,
    pub w: f64,
    pub edge: EdgeId,
}

/// Undirected graph on nodes `0..n` with non-negative edge weights.
///
/// Self-loops and parallel edges are rejected on insertion, so an unordered
/// node pair identifies at most one edge.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<Neighbor>>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            index: HashMap::new(),
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut g = Graph::new(n);
        for (u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, w: f64) -> Result<EdgeId> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeight(w));
        }
        let key = (u.min(v), u.max(v));
        if self.index.contains_key(&key) {
            return Err(Error::DuplicateEdge(key.0, key.1));
        }
        let id = self.edges.len();
        self.edges.push(Edge { u, v, w });
        self.adj[u].push(Neighbor { to: v, w, edge: id });
        self.adj[v].push(Neighbor { to: u, w, edge: id });
        self.index.insert(key, id);
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn neighbors(&self, v: NodeId) -> &[Neighbor] {
        &self.adj[v]
    }

    pub fn edge_id(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.index.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange(v, self.n))
        }
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::min)
    }

    pub fn is_unit_weighted(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }

    /// The graph on the same node set containing only the given edges.
    pub fn subgraph<'a, I>(&self, edges: I) -> Graph
    where
        I: IntoIterator<Item = &'a EdgeId>,
    {
        let mut ids: Vec<EdgeId> = edges.into_iter().copied().collect();
        ids.sort_unstable();
        ids.dedup();
        let mut h = Graph::new(self.n);
        for id in ids {
            let e = self.edges[id];
            h.add_edge(e.u, e.v, e.w)
                .expect("edge of a valid graph is valid in a subgraph");
        }
        h
    }
}

/// Node labeling `λ: V -> {0..ℓ}` together with its inverse.
///
/// Classes may become empty after relabeling; a query to an empty class has
/// infinite distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelAssignment {
    label_of: Vec<LabelId>,
    classes: Vec<BTreeSet<NodeId>>,
}

impl LabelAssignment {
    pub fn new(label_of: Vec<LabelId>, label_count: usize) -> Result<Self> {
        let mut classes = vec![BTreeSet::new(); label_count];
        for (v, &l) in label_of.iter().enumerate() {
            if l >= label_count {
                return Err(Error::LabelOutOfRange(l, label_count));
            }
            classes[l].insert(v);
        }
        Ok(LabelAssignment { label_of, classes })
    }

    /// Every node carries the same single label.
    pub fn uniform(n: usize) -> Self {
        LabelAssignment::new(vec![0; n], 1).expect("label 0 of 1 is in range")
    }

    pub fn node_count(&self) -> usize {
        self.label_of.len()
    }

    pub fn label_count(&self) -> usize {
        self.classes.len()
    }

    pub fn label(&self, v: NodeId) -> LabelId {
        self.label_of[v]
    }

    pub fn labels(&self) -> &[LabelId] {
        &self.label_of
    }

    pub fn class(&self, label: LabelId) -> &BTreeSet<NodeId> {
        &self.classes[label]
    }

    pub fn check_label(&self, label: LabelId) -> Result<()> {
        if label < self.classes.len() {
            Ok(())
        } else {
            Err(Error::LabelOutOfRange(label, self.classes.len()))
        }
    }

    /// Relabels `v` and returns its previous label.
    pub fn set(&mut self, v: NodeId, label: LabelId) -> Result<LabelId> {
        if v >= self.label_of.len() {
            return Err(Error::NodeOutOfRange(v, self.label_of.len()));
        }
        self.check_label(label)?;
        let old = self.label_of[v];
        if old != label {
            self.classes[old].remove(&v);
            self.classes[label].insert(v);
            self.label_of[v] = label;
        }
        Ok(old)
    }

    pub fn non_empty_classes(&self) -> usize {
        self.classes.iter().filter(|c| !c.is_empty()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_edges() {
        let mut g = Graph::new(3);
        assert_eq!(g.add_edge(1, 1, 1.0), Err(Error::SelfLoop(1)));
        g.add_edge(0, 1, 1.0).unwrap();
        assert_eq!(g.add_edge(1, 0, 2.0), Err(Error::DuplicateEdge(0, 1)));
        assert!(matches!(
            g.add_edge(0, 2, -1.0),
            Err(Error::InvalidWeight(_))
        ));
        assert!(matches!(
            g.add_edge(0, 3, 1.0),
            Err(Error::NodeOutOfRange(3, 3))
        ));
    }

    #[test]
    fn adjacency_is_symmetric() {
        let g = Graph::from_edges(4, [(0, 1, 2.0), (1, 2, 3.5), (3, 0, 1.0)]).unwrap();
        for (id, e) in g.edges().iter().enumerate() {
            assert!(g
                .neighbors(e.u)
                .iter()
                .any(|a| a.to == e.v && a.w == e.w && a.edge == id));
            assert!(g
                .neighbors(e.v)
                .iter()
                .any(|a| a.to == e.u && a.w == e.w && a.edge == id));
        }
        assert_eq!(g.edge_id(2, 1), Some(1));
    }

    #[test]
    fn classes_track_relabeling() {
        let mut labels = LabelAssignment::new(vec![0, 1, 0, 2], 3).unwrap();
        assert_eq!(
            labels.class(0).iter().copied().collect::<Vec<_>>(),
            vec![0, 2]
        );
        assert_eq!(labels.set(0, 2).unwrap(), 0);
        assert_eq!(labels.class(0).iter().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(
            labels.class(2).iter().copied().collect::<Vec<_>>(),
            vec![0, 3]
        );
        for (v, &l) in labels.labels().iter().enumerate() {
            assert!(labels.class(l).contains(&v));
        }
        assert!(LabelAssignment::new(vec![0, 3], 3).is_err());
    }
}
