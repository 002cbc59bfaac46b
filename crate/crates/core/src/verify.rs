//! Checks oracles and spanners against the exact label table and collects
//! the results in a serializable report.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamic_oracle::{dynamic_sampling_probability, DynamicOracle};
use crate::error::{Error, Result};
use crate::exact::{label_distance_maps, ExactLabelTable};
use crate::graph::{Graph, LabelAssignment, LabelId, NodeId};
use crate::levels::sample_levels;
use crate::paths::{dijkstra, extract_path};
use crate::script::ScriptOp;
use crate::spanner::{
    build_unweighted_spanner, build_weighted_spanner, distance_scales, SpannerResult,
};
use crate::static_oracle::StaticOracle;

/// Above this many `(v, λ)` pairs only a seeded sample is checked.
pub const EXHAUSTIVE_PAIR_LIMIT: usize = 1_000_000;
pub const SAMPLED_PAIRS: usize = 100_000;
/// Per-cover edge budget `C · n · ℓ^{1/k}` for unweighted covers.
pub const UNWEIGHTED_COVER_CONSTANT: f64 = 3.0;
/// Per-cover edge budget constant for weighted covers and the weighted total.
pub const WEIGHTED_COVER_CONSTANT: f64 = 4.0;
/// `max_v |B(v)| <= C · n^{1/k} (ln n)^{1-1/k}` for the dynamic oracle.
pub const DYNAMIC_BUNCH_CONSTANT: f64 = 8.0;
/// Relative slack for comparing sums of floating-point weights.
const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryRecord {
    pub v: NodeId,
    pub label: LabelId,
    pub exact: f64,
    pub answer: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub limit: f64,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            pass: value <= limit,
            value,
            limit,
        }
    }

    fn flag(name: &str, ok: bool) -> Self {
        Check {
            name: name.into(),
            pass: ok,
            value: if ok { 1.0 } else { 0.0 },
            limit: 1.0,
        }
    }
}

/// Edge counts of one cover invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverSummary {
    pub d: f64,
    pub x: Option<usize>,
    pub edges: usize,
    pub carve_edges: usize,
    pub tree_edges: usize,
    pub label_path_edges: usize,
    pub carved_balls: usize,
    pub centers: usize,
    /// `edges / (n · ℓ^{1/k})`.
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub mode: String,
    pub n: usize,
    pub m: usize,
    pub label_count: usize,
    pub k: usize,
    pub eps: Option<f64>,
    pub seeds: Vec<u64>,
    pub bound: f64,
    pub pairs_checked: usize,
    pub sampled: bool,
    pub violations: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub stats: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub covers: Vec<CoverSummary>,
    pub pass: bool,
    pub wall_ms: Option<u64>,
    pub records: Vec<QueryRecord>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Keep one record per checked query.
    pub records: bool,
    /// Record wall time; reports are then no longer byte-reproducible.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleMode {
    Static { k: usize },
    Dynamic { k: usize, script: Vec<ScriptOp> },
}

/// `answer / exact`, with `1` whenever they coincide (including `0/0` and
/// `∞/∞`).
pub fn stretch_ratio(exact: f64, answer: f64) -> f64 {
    if answer == exact {
        1.0
    } else if exact == 0.0 {
        f64::INFINITY
    } else {
        answer / exact
    }
}

/// Pairs to check: all of them, or a seeded sample when there are too many.
pub fn query_pairs(n: usize, label_count: usize, seed: u64) -> (Vec<(NodeId, LabelId)>, bool) {
    if n * label_count <= EXHAUSTIVE_PAIR_LIMIT {
        let all = (0..n)
            .flat_map(|v| (0..label_count).map(move |l| (v, l)))
            .collect();
        return (all, false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = (0..SAMPLED_PAIRS)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..label_count)))
        .collect();
    (sample, true)
}

struct Tally {
    bound: f64,
    checked: usize,
    violations: usize,
    max_ratio: f64,
    finite_ratios: usize,
    ratio_sum: f64,
    records: Option<Vec<QueryRecord>>,
}

impl Tally {
    fn new(bound: f64, keep_records: bool) -> Self {
        Tally {
            bound,
            checked: 0,
            violations: 0,
            max_ratio: 1.0,
            finite_ratios: 0,
            ratio_sum: 0.0,
            records: keep_records.then(Vec::new),
        }
    }

    /// Counts a violation unless `exact <= answer <= bound · exact`.
    fn observe(&mut self, v: NodeId, label: LabelId, exact: f64, answer: f64) {
        let ratio = stretch_ratio(exact, answer);
        let under = answer < exact * (1.0 - REL_TOL);
        let over = if exact.is_finite() {
            answer > self.bound * exact * (1.0 + REL_TOL)
        } else {
            answer.is_finite()
        };
        self.checked += 1;
        if under || over {
            self.violations += 1;
        }
        if !ratio.is_nan() {
            self.max_ratio = self.max_ratio.max(ratio);
        }
        if ratio.is_finite() && exact.is_finite() {
            self.finite_ratios += 1;
            self.ratio_sum += ratio;
        }
        if let Some(r) = &mut self.records {
            r.push(QueryRecord {
                v,
                label,
                exact,
                answer,
                ratio,
            });
        }
    }

    fn mean(&self) -> f64 {
        if self.finite_ratios == 0 {
            1.0
        } else {
            self.ratio_sum / self.finite_ratios as f64
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn report(
    mode: &str,
    g: &Graph,
    labels: &LabelAssignment,
    k: usize,
    eps: Option<f64>,
    seeds: &[u64],
    tally: Tally,
    sampled: bool,
) -> VerifyReport {
    let checks = vec![Check::at_most(
        "stretch_violations",
        tally.violations as f64,
        0.0,
    )];
    VerifyReport {
        mode: mode.into(),
        n: g.node_count(),
        m: g.edge_count(),
        label_count: labels.label_count(),
        k,
        eps,
        seeds: seeds.to_vec(),
        bound: tally.bound,
        pairs_checked: tally.checked,
        sampled,
        violations: tally.violations,
        max_ratio: tally.max_ratio,
        mean_ratio: tally.mean(),
        stats: BTreeMap::new(),
        checks,
        covers: Vec::new(),
        pass: false,
        wall_ms: None,
        records: tally.records.unwrap_or_default(),
    }
}

fn finish(mut r: VerifyReport, start: Instant, opts: VerifyOptions) -> VerifyReport {
    r.pass = r.checks.iter().all(|c| c.pass);
    if opts.timing {
        r.wall_ms = Some(start.elapsed().as_millis() as u64);
    }
    r
}

fn check_inputs(g: &Graph, labels: &LabelAssignment, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if labels.node_count() != g.node_count() {
        return Err(Error::InvalidParameter(
            "labeling does not match graph".into(),
        ));
    }
    Ok(())
}

/// Runs every seed and checks `exact <= answer <= (4k - 3) · exact` for the
/// selected pairs; dynamic mode also replays the script, checking rebuild
/// equivalence and the update cost after every update.
pub fn verify_oracle(
    g: &Graph,
    labels: &LabelAssignment,
    mode: &OracleMode,
    seeds: &[u64],
    opts: VerifyOptions,
) -> Result<VerifyReport> {
    let start = Instant::now();
    let k = match mode {
        OracleMode::Static { k } | OracleMode::Dynamic { k, .. } => *k,
    };
    check_inputs(g, labels, k)?;
    let bound = (4 * k - 3) as f64;
    let (pairs, sampled) = query_pairs(
        g.node_count(),
        labels.label_count(),
        seeds.first().copied().unwrap_or(0),
    );
    let mut tally = Tally::new(bound, opts.records);
    let exact = ExactLabelTable::build(g, labels);
    let r = match mode {
        OracleMode::Static { .. } => {
            let mut stats = StaticStats::default();
            for &seed in seeds {
                let o = StaticOracle::build(g, labels, k, seed)?;
                for &(v, l) in &pairs {
                    tally.observe(v, l, exact.dist(v, l), o.query(v, l)?);
                }
                stats.add(&o);
            }
            let mut r = report("static", g, labels, k, None, seeds, tally, sampled);
            stats.write(
                &mut r.stats,
                g.node_count(),
                labels.label_count(),
                k,
                seeds.len(),
            );
            r
        }
        OracleMode::Dynamic { script, .. } => {
            let mut replay = Replay {
                equivalent: true,
                cost_exact: true,
                ..Replay::default()
            };
            for &seed in seeds {
                replay.run(g, labels, k, seed, script, &pairs, &mut tally)?;
            }
            let n = g.node_count() as f64;
            let bunch_limit =
                DYNAMIC_BUNCH_CONSTANT * n.powf(1.0 / k as f64) * n.ln().powf(1.0 - 1.0 / k as f64);
            let mut r = report("dynamic", g, labels, k, None, seeds, tally, sampled);
            r.checks
                .push(Check::flag("rebuild_equivalence", replay.equivalent));
            r.checks.push(Check::flag(
                "update_cost_equals_bunch_size",
                replay.cost_exact,
            ));
            r.checks.push(Check::at_most(
                "max_bunch_size",
                replay.max_bunch as f64,
                bunch_limit,
            ));
            r.stats.insert("updates".into(), replay.updates as f64);
            r.stats.insert("queries".into(), replay.queries as f64);
            r.stats
                .insert("max_stored_entries".into(), replay.max_entries as f64);
            r.stats
                .insert("max_bunch_size".into(), replay.max_bunch as f64);
            r.stats.insert(
                "bunch_constant".into(),
                replay.max_bunch as f64 / (bunch_limit / DYNAMIC_BUNCH_CONSTANT),
            );
            r
        }
    };
    Ok(finish(r, start, opts))
}

#[derive(Default)]
struct StaticStats {
    mean_bunch_sum: f64,
    max_total: usize,
    total_sum: usize,
}

impl StaticStats {
    fn add(&mut self, o: &StaticOracle) {
        let size = o.size();
        self.mean_bunch_sum += o.bunches().mean_size();
        self.max_total = self.max_total.max(size.total);
        self.total_sum += size.total;
    }

    fn write(
        &self,
        stats: &mut BTreeMap<String, f64>,
        n: usize,
        label_count: usize,
        k: usize,
        runs: usize,
    ) {
        let runs = runs.max(1) as f64;
        let root = (label_count.max(1) as f64).powf(1.0 / k as f64);
        stats.insert("mean_bunch_size".into(), self.mean_bunch_sum / runs);
        stats.insert("expected_bunch_scale".into(), (k - 1) as f64 * root);
        stats.insert("mean_total_entries".into(), self.total_sum as f64 / runs);
        stats.insert("max_total_entries".into(), self.max_total as f64);
        stats.insert(
            "entries_constant".into(),
            self.max_total as f64 / (k as f64 * n as f64 * root),
        );
    }
}

#[derive(Default)]
struct Replay {
    equivalent: bool,
    cost_exact: bool,
    max_bunch: usize,
    max_entries: usize,
    updates: usize,
    queries: usize,
}

impl Replay {
    #[allow(clippy::too_many_arguments)]
    fn run(
        &mut self,
        g: &Graph,
        labels: &LabelAssignment,
        k: usize,
        seed: u64,
        script: &[ScriptOp],
        pairs: &[(NodeId, LabelId)],
        tally: &mut Tally,
    ) -> Result<()> {
        let p = dynamic_sampling_probability(g.node_count(), k)?;
        let sampling = sample_levels(g.node_count(), k, p, seed)?;
        let mut oracle = DynamicOracle::build_with_sampling(g, labels, sampling.clone());
        self.max_bunch = self.max_bunch.max(oracle.bunches().max_size());
        let mut current = labels.clone();
        let mut exact = ExactLabelTable::build(g, &current);
        let mut rebuilt = oracle.clone();
        for &(v, l) in pairs {
            tally.observe(v, l, exact.dist(v, l), oracle.query(v, l)?);
        }
        for &op in script {
            match op {
                ScriptOp::Update(v, l) => {
                    g.check_node(v)?;
                    current.check_label(l)?;
                    self.updates += 1;
                    let expected = if current.label(v) == l {
                        0
                    } else {
                        oracle.bunches().bunch(v).len()
                    };
                    let stats = oracle.update_label(v, l)?;
                    current.set(v, l)?;
                    self.cost_exact &= stats.removals == expected && stats.insertions == expected;
                    rebuilt = DynamicOracle::build_with_sampling(g, &current, sampling.clone());
                    self.equivalent &= rebuilt == oracle && oracle.check_index();
                    exact = ExactLabelTable::build(g, &current);
                    for &(v, l) in pairs {
                        let answer = oracle.query(v, l)?;
                        self.equivalent &= answer == rebuilt.query(v, l)?;
                        tally.observe(v, l, exact.dist(v, l), answer);
                    }
                    self.max_entries = self.max_entries.max(oracle.stored_entries());
                }
                ScriptOp::Query(v, l) => {
                    self.queries += 1;
                    let answer = oracle.query(v, l)?;
                    self.equivalent &= answer == rebuilt.query(v, l)?;
                    tally.observe(v, l, exact.dist(v, l), answer);
                }
            }
        }
        self.max_entries = self.max_entries.max(oracle.stored_entries());
        Ok(())
    }
}

/// Builds the spanner and checks subgraph membership, the global stretch
/// `(4k + 1)(1 + ε)`, the per-cover `(4k + 1)d` guarantee and per-cover
/// edge counts.
pub fn verify_spanner(
    g: &Graph,
    labels: &LabelAssignment,
    k: usize,
    eps: f64,
    weighted: bool,
    opts: VerifyOptions,
) -> Result<VerifyReport> {
    let start = Instant::now();
    check_inputs(g, labels, k)?;
    let spanner = if weighted {
        build_weighted_spanner(g, labels, k, eps)?
    } else {
        build_unweighted_spanner(g, labels, k, eps)?
    };
    Ok(finish(
        spanner_report(g, labels, &spanner, opts),
        start,
        opts,
    ))
}

/// The checks of [`verify_spanner`] for an already built spanner.
pub fn spanner_report(
    g: &Graph,
    labels: &LabelAssignment,
    spanner: &SpannerResult,
    opts: VerifyOptions,
) -> VerifyReport {
    let k = spanner.k;
    let eps = spanner.eps;
    let n = g.node_count();
    let ell = labels.label_count();
    let per_node = n as f64 * (ell.max(1) as f64).powf(1.0 / k as f64);
    let cover_bound = (4 * k + 1) as f64;

    let h = spanner.subgraph(g);
    let is_subgraph = h
        .edges()
        .iter()
        .all(|e| g.edge_id(e.u, e.v).is_some_and(|id| g.edge(id).w == e.w));

    let exact_g = ExactLabelTable::build(g, labels);
    let exact_h = ExactLabelTable::build(&h, labels);
    let (pairs, sampled) = query_pairs(n, ell, 0);
    let mut tally = Tally::new(cover_bound * (1.0 + eps), opts.records);
    for &(v, l) in &pairs {
        tally.observe(v, l, exact_g.dist(v, l), exact_h.dist(v, l));
    }

    let cover_tables: Vec<ExactLabelTable> = spanner
        .covers
        .par_iter()
        .map(|c| ExactLabelTable::build(&g.subgraph(c.edges.keys()), labels))
        .collect();

    // worst dist(u, λ, H_cover) / ((4k + 1)d) over the pairs each cover serves
    let mut cover_excess: f64 = 0.0;
    let mut served = 0usize;
    if spanner.weighted {
        let maps = label_distance_maps(g, labels);
        let scales = distance_scales(eps, exact_g.max_finite());
        let index: HashMap<(u64, usize), usize> = spanner
            .covers
            .iter()
            .enumerate()
            .map(|(i, c)| ((c.d.to_bits(), c.x.unwrap_or(0)), i))
            .collect();
        for (l, map) in maps.iter().enumerate() {
            let Some(map) = map else { continue };
            for &(u, pl) in &pairs {
                let dist = map.dist[u];
                if pl != l || dist == 0.0 || !dist.is_finite() {
                    continue;
                }
                let hops = extract_path(map, u).expect("reached").len();
                let i = scales
                    .iter()
                    .position(|&s| s >= dist)
                    .expect("scales cover every finite distance");
                let x = 1usize << hops.ilog2();
                let Some(&ci) = index.get(&(scales[i].to_bits(), x)) else {
                    cover_excess = f64::INFINITY;
                    continue;
                };
                served += 1;
                cover_excess =
                    cover_excess.max(cover_tables[ci].dist(u, l) / (cover_bound * scales[i]));
            }
        }
    } else {
        for (c, table) in spanner.covers.iter().zip(&cover_tables) {
            for &(u, l) in &pairs {
                if exact_g.dist(u, l) <= c.d {
                    served += 1;
                    cover_excess = cover_excess.max(table.dist(u, l) / (cover_bound * c.d));
                }
            }
        }
    }

    let covers: Vec<CoverSummary> = spanner
        .covers
        .iter()
        .map(|c| CoverSummary {
            d: c.d,
            x: c.x,
            edges: c.edges.len(),
            carve_edges: c.stage_counts[0],
            tree_edges: c.stage_counts[1],
            label_path_edges: c.stage_counts[2],
            carved_balls: c.carved.len(),
            centers: c.centers.len(),
            constant: c.edges.len() as f64 / per_node,
        })
        .collect();
    let cover_constant = covers.iter().map(|c| c.constant).fold(0.0, f64::max);
    let scale_count = spanner
        .covers
        .iter()
        .map(|c| c.d.to_bits())
        .collect::<std::collections::BTreeSet<_>>()
        .len();

    let mode = if spanner.weighted {
        "spanner-weighted"
    } else {
        "spanner-unweighted"
    };
    let mut r = report(mode, g, labels, k, Some(eps), &[], tally, sampled);
    r.checks.insert(0, Check::flag("subgraph", is_subgraph));
    r.checks.push(Check::at_most(
        "cover_stretch_excess",
        cover_excess,
        1.0 + REL_TOL,
    ));
    let (cover_limit, total) = if spanner.weighted {
        let diameter = max_pairwise_distance(g).max(1.0);
        let log_n = (n.max(2) as f64).log2().ceil();
        let log_d = (diameter.ln() / (1.0 + eps).ln()).ceil().max(1.0);
        r.stats.insert("diameter".into(), diameter);
        (WEIGHTED_COVER_CONSTANT, log_n * log_d * per_node)
    } else {
        (UNWEIGHTED_COVER_CONSTANT, scale_count as f64 * per_node)
    };
    r.checks.push(Check::at_most(
        "cover_size_constant",
        cover_constant,
        cover_limit,
    ));
    let total_constant = spanner.edges.len() as f64 / total;
    if spanner.weighted {
        r.checks.push(Check::at_most(
            "total_size_constant",
            total_constant,
            WEIGHTED_COVER_CONSTANT,
        ));
    }
    r.stats.insert("edges".into(), spanner.edges.len() as f64);
    r.stats.insert("graph_edges".into(), g.edge_count() as f64);
    r.stats.insert("covers".into(), spanner.covers.len() as f64);
    r.stats.insert("distance_scales".into(), scale_count as f64);
    r.stats.insert("cover_pairs_checked".into(), served as f64);
    r.stats.insert("cover_size_constant".into(), cover_constant);
    r.stats.insert("total_size_constant".into(), total_constant);
    r.covers = covers;
    r.pass = r.checks.iter().all(|c| c.pass);
    r
}

/// Largest finite distance between two nodes.
pub fn max_pairwise_distance(g: &Graph) -> f64 {
    (0..g.node_count())
        .into_par_iter()
        .map(|s| {
            dijkstra(g, &[s], f64::INFINITY)
                .expect("valid source")
                .dist
                .into_iter()
                .filter(|d| d.is_finite())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}
