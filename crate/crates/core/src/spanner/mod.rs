//! Vertex-label spanners: subgraphs `H` with
//! `dist(u, λ, H) <= (4k + 1)(1 + ε) · dist(u, λ, G)` for every node `u` and
//! label `λ`.
//!
//! A cover for distance scale `d` guarantees stretch `(4k + 1)d` for pairs at
//! distance at most `d`; the spanner is the union of covers over geometric
//! scales `d = (1 + ε)^i`. Weighted graphs additionally sweep hop budgets
//! `x = 2^j`, and each weighted cover only serves pairs joined by a path with
//! between `x` and `2x` edges.

mod cover;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::label_distance_maps;
use crate::graph::{EdgeId, Graph, LabelAssignment, NodeId};
use crate::paths::{hop_bounded_distances, DistanceMap};

pub use cover::CoverOutput;
use cover::{run_cover, CoverInput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stage {
    Carve = 0,
    ClusterTree = 1,
    LabelPath = 2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Provenance {
    pub d: f64,
    pub x: Option<usize>,
    pub stage: Stage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpannerResult {
    pub k: usize,
    pub eps: f64,
    pub weighted: bool,
    pub edges: BTreeSet<EdgeId>,
    /// The first cover (in invocation order) that added each edge.
    pub provenance: BTreeMap<EdgeId, Provenance>,
    pub covers: Vec<CoverOutput>,
}

impl SpannerResult {
    fn from_covers(k: usize, eps: f64, weighted: bool, covers: Vec<CoverOutput>) -> Self {
        let mut edges = BTreeSet::new();
        let mut provenance = BTreeMap::new();
        for c in &covers {
            for (&e, &stage) in &c.edges {
                edges.insert(e);
                provenance.entry(e).or_insert(Provenance {
                    d: c.d,
                    x: c.x,
                    stage,
                });
            }
        }
        SpannerResult {
            k,
            eps,
            weighted,
            edges,
            provenance,
            covers,
        }
    }

    pub fn subgraph(&self, g: &Graph) -> Graph {
        g.subgraph(&self.edges)
    }
}

/// `(1 + ε)^i` for `i = 0, 1, …` up to and including the first value
/// `>= max_dist`.
pub fn distance_scales(eps: f64, max_dist: f64) -> Vec<f64> {
    let mut scales = vec![1.0];
    let mut i = 0;
    while scales[i] < max_dist {
        i += 1;
        scales.push((1.0 + eps).powi(i as i32));
    }
    scales
}

/// `2^j` for `j = 0..=⌈log₂ n⌉`.
pub fn hop_scales(n: usize) -> Vec<usize> {
    let top = n.max(1).next_power_of_two().trailing_zeros() as usize;
    (0..=top).map(|j| 1usize << j).collect()
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidParameter("k must be >= 1".into()))
    } else {
        Ok(())
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "eps must be > 0, got {eps}"
        )))
    }
}

fn check_scale(d: f64) -> Result<()> {
    if d >= 1.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("d must be >= 1, got {d}")))
    }
}

fn check_weights_at_least_one(g: &Graph) -> Result<()> {
    match g.min_weight() {
        Some(w) if w < 1.0 => Err(Error::WeightBelowOne),
        _ => Ok(()),
    }
}

fn hop_label_maps(
    g: &Graph,
    labels: &LabelAssignment,
    hop_limit: usize,
) -> Vec<Option<DistanceMap>> {
    (0..labels.label_count())
        .map(|l| {
            let class: Vec<NodeId> = labels.class(l).iter().copied().collect();
            if class.is_empty() {
                None
            } else {
                Some(
                    hop_bounded_distances(g, &class, hop_limit)
                        .expect("class members are valid sources"),
                )
            }
        })
        .collect()
}

/// Unweighted cover for scale `d`: every `(u, λ)` with `dist(u, λ) <= d`
/// gets `dist(u, λ, H_d) <= (4k + 1)d`.
pub fn vl_cover(g: &Graph, labels: &LabelAssignment, d: f64, k: usize) -> Result<CoverOutput> {
    check_k(k)?;
    check_scale(d)?;
    if !g.is_unit_weighted() {
        return Err(Error::UnweightedRequired);
    }
    let maps = label_distance_maps(g, labels);
    Ok(run_cover(&CoverInput {
        graph: g,
        label_count: labels.label_count(),
        k,
        d,
        x: None,
        label_maps: &maps,
    }))
}

/// Weighted cover for scale `d` and hop budget `x`: every `(u, λ)` joined by
/// a path with `x..=2x` edges and length at most `d` gets
/// `dist(u, λ, H_{d,x}) <= (4k + 1)d`.
pub fn wvl_cover(
    g: &Graph,
    labels: &LabelAssignment,
    d: f64,
    x: usize,
    k: usize,
) -> Result<CoverOutput> {
    check_k(k)?;
    check_scale(d)?;
    check_weights_at_least_one(g)?;
    if x == 0 {
        return Err(Error::InvalidParameter("x must be >= 1".into()));
    }
    let maps = hop_label_maps(g, labels, 2 * x);
    Ok(run_cover(&CoverInput {
        graph: g,
        label_count: labels.label_count(),
        k,
        d,
        x: Some(x),
        label_maps: &maps,
    }))
}

pub fn build_unweighted_spanner(
    g: &Graph,
    labels: &LabelAssignment,
    k: usize,
    eps: f64,
) -> Result<SpannerResult> {
    check_k(k)?;
    check_eps(eps)?;
    if !g.is_unit_weighted() {
        return Err(Error::UnweightedRequired);
    }
    let maps = label_distance_maps(g, labels);
    let max_dist = max_finite(&maps);
    let covers: Vec<CoverOutput> = distance_scales(eps, max_dist)
        .into_par_iter()
        .map(|d| {
            run_cover(&CoverInput {
                graph: g,
                label_count: labels.label_count(),
                k,
                d,
                x: None,
                label_maps: &maps,
            })
        })
        .collect();
    Ok(SpannerResult::from_covers(k, eps, false, covers))
}

pub fn build_weighted_spanner(
    g: &Graph,
    labels: &LabelAssignment,
    k: usize,
    eps: f64,
) -> Result<SpannerResult> {
    check_k(k)?;
    check_eps(eps)?;
    check_weights_at_least_one(g)?;
    let max_dist = max_finite(&label_distance_maps(g, labels));
    let scales = distance_scales(eps, max_dist);
    let hops = hop_scales(g.node_count());
    let hop_maps: Vec<Vec<Option<DistanceMap>>> = hops
        .par_iter()
        .map(|&x| hop_label_maps(g, labels, 2 * x))
        .collect();
    let cells: Vec<(usize, f64)> = (0..hops.len())
        .flat_map(|j| scales.iter().map(move |&d| (j, d)))
        .collect();
    let covers: Vec<CoverOutput> = cells
        .into_par_iter()
        .map(|(j, d)| {
            run_cover(&CoverInput {
                graph: g,
                label_count: labels.label_count(),
                k,
                d,
                x: Some(hops[j]),
                label_maps: &hop_maps[j],
            })
        })
        .collect();
    Ok(SpannerResult::from_covers(k, eps, true, covers))
}

fn max_finite(maps: &[Option<DistanceMap>]) -> f64 {
    maps.iter()
        .flatten()
        .flat_map(|m| m.dist.iter().copied())
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max)
}
