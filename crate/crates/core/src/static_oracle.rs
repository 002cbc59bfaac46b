//! Compact vertex-label distance oracle with stretch `4k - 3`.
//!
//! Levels are sampled with `p = ℓ^{-1/k}` and bunches omit the last level.
//! For every label `λ` the oracle keeps `B(λ) = ∪_{v ∈ V_λ} B(v)` together
//! with the exact `dist(x, λ)` of each member, plus a full distance row for
//! every node of the top level `A_{k-1}`. A query walks the pivots of `v`
//! and stops at the first one found in `B(λ)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{parse_err, Error, Result};
use crate::exact::ExactLabelTable;
use crate::graph::{Graph, LabelAssignment, LabelId, NodeId};
use crate::io::{content_lines, parse_field};
use crate::levels::{build_bunches, sample_levels, BunchSet, LevelSampling, Pivot};

const DUMP_MAGIC: &str = "vl-static-oracle";
const DUMP_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct StaticOracle {
    sampling: LevelSampling,
    bunches: BunchSet,
    label_of: Vec<LabelId>,
    label_bunch: Vec<HashMap<NodeId, f64>>,
    top: BTreeMap<NodeId, Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct OracleSize {
    pub pivot_entries: usize,
    pub bunch_entries: usize,
    pub label_bunch_entries: usize,
    pub top_entries: usize,
    pub total: usize,
}

/// `ℓ^{-1/k}`.
pub fn static_sampling_probability(label_count: usize, k: usize) -> f64 {
    (label_count.max(1) as f64).powf(-1.0 / k as f64)
}

impl StaticOracle {
    pub fn build(g: &Graph, labels: &LabelAssignment, k: usize, seed: u64) -> Result<Self> {
        if labels.node_count() != g.node_count() {
            return Err(Error::InvalidParameter(
                "labeling does not match graph".into(),
            ));
        }
        let p = static_sampling_probability(labels.label_count(), k);
        let sampling = sample_levels(g.node_count(), k, p, seed)?;
        Ok(Self::build_with_sampling(g, labels, sampling))
    }

    pub fn build_with_sampling(
        g: &Graph,
        labels: &LabelAssignment,
        sampling: LevelSampling,
    ) -> Self {
        let exact = ExactLabelTable::build(g, labels);
        let k = sampling.k();
        let bunches = build_bunches(g, &sampling, k - 1);
        let ell = labels.label_count();

        let mut label_bunch = vec![HashMap::new(); ell];
        for v in 0..g.node_count() {
            let l = labels.label(v);
            for &(x, _) in bunches.bunch(v) {
                label_bunch[l].entry(x).or_insert_with(|| exact.dist(x, l));
            }
        }
        let top = sampling
            .level(k - 1)
            .into_iter()
            .map(|v| (v, (0..ell).map(|l| exact.dist(v, l)).collect()))
            .collect();

        StaticOracle {
            sampling,
            bunches,
            label_of: labels.labels().to_vec(),
            label_bunch,
            top,
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

    pub fn node_count(&self) -> usize {
        self.label_of.len()
    }

    pub fn label_count(&self) -> usize {
        self.label_bunch.len()
    }

    /// Members of `B(λ)` with their stored `dist(x, λ)`.
    pub fn label_bunch(&self, label: LabelId) -> &HashMap<NodeId, f64> {
        &self.label_bunch[label]
    }

    pub fn top_row(&self, v: NodeId) -> Option<&[f64]> {
        self.top.get(&v).map(Vec::as_slice)
    }

    /// Approximate `dist(v, λ)`; never below the true distance and at most
    /// `(4k - 3)` times it.
    pub fn query(&self, v: NodeId, label: LabelId) -> Result<f64> {
        if v >= self.node_count() {
            return Err(Error::NodeOutOfRange(v, self.node_count()));
        }
        if label >= self.label_count() {
            return Err(Error::LabelOutOfRange(label, self.label_count()));
        }
        if self.label_of[v] == label {
            return Ok(0.0);
        }
        let k = self.k();
        let members = &self.label_bunch[label];
        for i in 0..k - 1 {
            let Some(p) = self.bunches.pivot(v, i) else {
                break;
            };
            if let Some(&d) = members.get(&p.node) {
                return Ok(p.dist + d);
            }
        }
        Ok(match self.bunches.pivot(v, k - 1) {
            Some(p) => p.dist + self.top[&p.node][label],
            None => f64::INFINITY,
        })
    }

    pub fn size(&self) -> OracleSize {
        let pivot_entries = self.bunches.pivot_entries();
        let bunch_entries = self.bunches.total_size();
        let label_bunch_entries = self.label_bunch.iter().map(HashMap::len).sum();
        let top_entries = self.top.values().map(Vec::len).sum();
        OracleSize {
            pivot_entries,
            bunch_entries,
            label_bunch_entries,
            top_entries,
            total: pivot_entries + bunch_entries + label_bunch_entries + top_entries,
        }
    }

    /// Versioned text dump. Every section is sorted so two oracles built from
    /// the same levels produce identical bytes.
    ///
    /// ```text
    /// vl-static-oracle 1
    /// k K n N l L seed S
    /// labeling λ(0) … λ(n-1)
    /// level i v…          one line per level, members of A_i
    /// pivot v i p d
    /// bunch v u d
    /// lbunch λ x d
    /// top v λ d
    /// ```
    pub fn dump(&self) -> String {
        let n = self.node_count();
        let k = self.k();
        let mut out = String::new();
        writeln!(out, "{DUMP_MAGIC} {DUMP_VERSION}").unwrap();
        writeln!(
            out,
            "k {k} n {n} l {} seed {}",
            self.label_count(),
            self.sampling.seed()
        )
        .unwrap();
        out.push_str("labeling");
        for l in &self.label_of {
            write!(out, " {l}").unwrap();
        }
        out.push('\n');
        for i in 0..k {
            write!(out, "level {i}").unwrap();
            for v in self.sampling.level(i) {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        for v in 0..n {
            for i in 0..k {
                if let Some(p) = self.bunches.pivot(v, i) {
                    writeln!(out, "pivot {v} {i} {} {}", p.node, p.dist).unwrap();
                }
            }
        }
        for v in 0..n {
            for &(u, d) in self.bunches.bunch(v) {
                writeln!(out, "bunch {v} {u} {d}").unwrap();
            }
        }
        for (l, members) in self.label_bunch.iter().enumerate() {
            let mut rows: Vec<_> = members.iter().collect();
            rows.sort_unstable_by_key(|(x, _)| **x);
            for (x, d) in rows {
                writeln!(out, "lbunch {l} {x} {d}").unwrap();
            }
        }
        for (v, row) in &self.top {
            for (l, d) in row.iter().enumerate() {
                writeln!(out, "top {v} {l} {d}").unwrap();
            }
        }
        out
    }

    pub fn load(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (ln, magic) = lines.next().ok_or_else(|| parse_err(0, "empty dump"))?;
        let mut it = magic.split_whitespace();
        if it.next() != Some(DUMP_MAGIC) {
            return Err(parse_err(ln, "not a static oracle dump"));
        }
        let version: u32 = parse_field(ln, it.next(), "version")?;
        if version != DUMP_VERSION {
            return Err(parse_err(ln, format!("unsupported version {version}")));
        }

        let (ln, header) = lines
            .next()
            .ok_or_else(|| parse_err(ln, "missing header"))?;
        let tok: Vec<&str> = header.split_whitespace().collect();
        if tok.len() != 8 || tok[0] != "k" || tok[2] != "n" || tok[4] != "l" || tok[6] != "seed" {
            return Err(parse_err(ln, "malformed header"));
        }
        let k: usize = parse_field(ln, Some(tok[1]), "k")?;
        let n: usize = parse_field(ln, Some(tok[3]), "n")?;
        let ell: usize = parse_field(ln, Some(tok[5]), "l")?;
        let seed: u64 = parse_field(ln, Some(tok[7]), "seed")?;
        if k == 0 {
            return Err(parse_err(ln, "k must be >= 1"));
        }

        let mut label_of = None;
        let mut level_of = vec![0usize; n];
        let mut pivots = vec![None; n * k];
        let mut bunches = vec![Vec::new(); n];
        let mut label_bunch = vec![HashMap::new(); ell];
        let mut top: BTreeMap<NodeId, Vec<f64>> = BTreeMap::new();

        let node = |ln: usize, t: Option<&str>| -> Result<NodeId> {
            let v: usize = parse_field(ln, t, "node")?;
            if v < n {
                Ok(v)
            } else {
                Err(parse_err(ln, format!("node {v} out of range")))
            }
        };
        let label = |ln: usize, t: Option<&str>| -> Result<LabelId> {
            let l: usize = parse_field(ln, t, "label")?;
            if l < ell {
                Ok(l)
            } else {
                Err(parse_err(ln, format!("label {l} out of range")))
            }
        };

        for (ln, line) in lines {
            let mut it = line.split_whitespace();
            match it.next() {
                Some("labeling") => {
                    let ls = it.map(|t| label(ln, Some(t))).collect::<Result<Vec<_>>>()?;
                    if ls.len() != n {
                        return Err(parse_err(ln, "labeling length mismatch"));
                    }
                    label_of = Some(ls);
                }
                Some("level") => {
                    let i: usize = parse_field(ln, it.next(), "level")?;
                    if i >= k {
                        return Err(parse_err(ln, "level out of range"));
                    }
                    for t in it {
                        let v = node(ln, Some(t))?;
                        level_of[v] = level_of[v].max(i);
                    }
                }
                Some("pivot") => {
                    let v = node(ln, it.next())?;
                    let i: usize = parse_field(ln, it.next(), "level")?;
                    if i >= k {
                        return Err(parse_err(ln, "level out of range"));
                    }
                    let p = node(ln, it.next())?;
                    let d: f64 = parse_field(ln, it.next(), "dist")?;
                    pivots[v * k + i] = Some(Pivot { node: p, dist: d });
                }
                Some("bunch") => {
                    let v = node(ln, it.next())?;
                    let u = node(ln, it.next())?;
                    let d: f64 = parse_field(ln, it.next(), "dist")?;
                    bunches[v].push((u, d));
                }
                Some("lbunch") => {
                    let l = label(ln, it.next())?;
                    let x = node(ln, it.next())?;
                    let d: f64 = parse_field(ln, it.next(), "dist")?;
                    label_bunch[l].insert(x, d);
                }
                Some("top") => {
                    let v = node(ln, it.next())?;
                    let l = label(ln, it.next())?;
                    let d: f64 = parse_field(ln, it.next(), "dist")?;
                    top.entry(v).or_insert_with(|| vec![f64::INFINITY; ell])[l] = d;
                }
                Some(other) => return Err(parse_err(ln, format!("unknown record `{other}`"))),
                None => {}
            }
        }

        let label_of = label_of.ok_or_else(|| parse_err(0, "missing labeling"))?;
        let sampling = LevelSampling::from_levels(k, level_of, seed)?;
        for v in sampling.level(k - 1) {
            if !top.contains_key(&v) {
                return Err(parse_err(0, format!("missing top row for node {v}")));
            }
        }
        Ok(StaticOracle {
            sampling,
            bunches: BunchSet::from_parts(k, pivots, bunches),
            label_of,
            label_bunch,
            top,
        })
    }
}
