//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Ground truth comes from the reference oracles in
//! `common`, never from the library's own exact table.

#![allow(clippy::needless_range_loop)]

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vlabel_core::dynamic_oracle::dynamic_sampling_probability;
use vlabel_core::generate::instance;
use vlabel_core::levels::sample_levels;
use vlabel_core::script::random_script;
use vlabel_core::spanner::distance_scales;
use vlabel_core::{
    ball, build_unweighted_spanner, build_weighted_spanner, dijkstra, extract_path,
    hop_bounded_distances, DynamicOracle, Graph, GraphModel, LabelAssignment, LabelModel, ScriptOp,
    StaticOracle, WeightModel,
};

type Outcome = Result<String, String>;

/// Name, check and runtime budget in seconds (0 for none).
type Criterion = (&'static str, fn() -> Outcome, u64);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gnm(
    n: usize,
    m: usize,
    weights: WeightModel,
    labels: usize,
    seed: u64,
) -> (Graph, LabelAssignment) {
    instance(
        GraphModel::Gnm { n, m },
        weights,
        LabelModel::Uniform { labels },
        seed,
    )
    .unwrap()
}

fn grid(w: usize, h: usize, labels: usize, seed: u64) -> (Graph, LabelAssignment) {
    instance(
        GraphModel::Grid { w, h },
        WeightModel::Unit,
        LabelModel::Uniform { labels },
        seed,
    )
    .unwrap()
}

const W1_10: WeightModel = WeightModel::Uniform { lo: 1.0, hi: 10.0 };

fn check_static_stretch(
    g: &Graph,
    labels: &LabelAssignment,
    k: usize,
    seed: u64,
    worst: &mut f64,
) -> Result<usize, String> {
    let exact = label_distances(&floyd_warshall(g), labels);
    let o = StaticOracle::build(g, labels, k, seed).map_err(|e| e.to_string())?;
    let bound = (4 * k - 3) as f64;
    let mut checked = 0;
    for v in 0..g.node_count() {
        for l in 0..labels.label_count() {
            let (e, a) = (exact[v][l], o.query(v, l).unwrap());
            ensure(within(e, a, bound), || {
                format!("k={k} seed={seed} v={v} l={l}: exact {e}, answer {a}")
            })?;
            if e > 0.0 && e < INF {
                *worst = worst.max(a / e);
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 1.0;
    let mut pairs = 0;
    for seed in 0..10 {
        let instances = [gnm(300, 1500, W1_10, 16, seed), grid(20, 20, 16, seed)];
        for (g, labels) in &instances {
            for k in [2, 3] {
                pairs += check_static_stretch(g, labels, k, seed, &mut worst)?;
            }
        }
    }
    Ok(format!(
        "{pairs} pairs, zero violations, max observed ratio {worst:.3}"
    ))
}

fn criterion_2() -> Outcome {
    let (k, ell, n, seeds) = (3usize, 16usize, 500usize, 100u64);
    let root = (ell as f64).powf(1.0 / k as f64);
    let scale = (k - 1) as f64 * root;
    let entry_limit = 6.0 * k as f64 * n as f64 * root;
    let (mut lo, mut hi, mut sum, mut max_entries): (f64, f64, f64, usize) = (INF, 0.0, 0.0, 0);
    for seed in 0..seeds {
        let (g, labels) = gnm(n, 2500, W1_10, ell, seed);
        let o = StaticOracle::build(&g, &labels, k, seed).map_err(|e| e.to_string())?;
        let mean = o.bunches().mean_size();
        lo = lo.min(mean);
        hi = hi.max(mean);
        sum += mean;
        max_entries = max_entries.max(o.size().total);
        ensure(o.size().total as f64 <= entry_limit, || {
            format!("seed {seed}: {} entries > {entry_limit:.0}", o.size().total)
        })?;
    }
    // the mean is taken over all nodes of all seeds
    let mean = sum / seeds as f64;
    ensure(mean >= 0.5 * scale && mean <= 2.0 * scale, || {
        format!(
            "mean bunch {mean:.3} outside [{:.3}, {:.3}]",
            0.5 * scale,
            2.0 * scale
        )
    })?;
    Ok(format!(
        "mean |B(v)| {mean:.3} in [{:.2}, {:.2}] (per-seed range {lo:.2}..{hi:.2}); max entries {max_entries} <= {entry_limit:.0}",
        0.5 * scale,
        2.0 * scale
    ))
}

fn criterion_3() -> Outcome {
    let mut pairs = 0;
    for seed in 0..5 {
        let (g, labels16) = gnm(200, 800, W1_10, 16, seed);
        let g = rounded(&g);
        let (grid_g, grid_labels) = grid(15, 15, 16, seed);
        for (g, labels) in [(&g, &labels16), (&grid_g, &grid_labels)] {
            let apsp = floyd_warshall(g);
            let single = LabelAssignment::uniform(g.node_count());
            let cases = [(single.clone(), 1usize), (single, 3), (labels.clone(), 1)];
            for (labels, k) in cases {
                let exact = label_distances(&apsp, &labels);
                let o = StaticOracle::build(g, &labels, k, seed).map_err(|e| e.to_string())?;
                for v in 0..g.node_count() {
                    for l in 0..labels.label_count() {
                        let a = o.query(v, l).unwrap();
                        ensure(a == exact[v][l], || {
                            format!(
                                "k={k} l={} v={v}: {a} != {}",
                                labels.label_count(),
                                exact[v][l]
                            )
                        })?;
                        pairs += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{pairs} pairs equal the exact distance"))
}

struct DynamicRun {
    queries: usize,
    updates: usize,
    max_bunch: usize,
    cost_exact: bool,
}

fn replay_dynamic(
    g: &Graph,
    labels: &LabelAssignment,
    apsp: &[Vec<f64>],
    k: usize,
    seed: u64,
    script: &[ScriptOp],
) -> Result<DynamicRun, String> {
    let p = dynamic_sampling_probability(g.node_count(), k).unwrap();
    let sampling = sample_levels(g.node_count(), k, p, seed).map_err(|e| e.to_string())?;
    let mut o = DynamicOracle::build_with_sampling(g, labels, sampling.clone());
    let mut current = labels.clone();
    let mut exact = label_distances(apsp, &current);
    let mut rebuilt = o.clone();
    let bound = (4 * k - 3) as f64;
    let mut run = DynamicRun {
        queries: 0,
        updates: 0,
        max_bunch: (0..g.node_count())
            .map(|v| o.bunches().bunch(v).len())
            .max()
            .unwrap_or(0),
        cost_exact: true,
    };
    for (step, &op) in script.iter().enumerate() {
        match op {
            ScriptOp::Update(v, l) => {
                let expected = if current.label(v) == l {
                    0
                } else {
                    o.bunches().bunch(v).len()
                };
                let stats = o.update_label(v, l).unwrap();
                run.cost_exact &= stats.removals == expected && stats.insertions == expected;
                current.set(v, l).unwrap();
                exact = label_distances(apsp, &current);
                rebuilt = DynamicOracle::build_with_sampling(g, &current, sampling.clone());
                ensure(rebuilt == o, || {
                    format!("step {step}: incremental state differs from rebuild")
                })?;
                for u in 0..g.node_count() {
                    for l in 0..current.label_count() {
                        let a = o.query(u, l).unwrap();
                        ensure(a == rebuilt.query(u, l).unwrap(), || {
                            format!("step {step}: ({u},{l}) differs from rebuild")
                        })?;
                        ensure(within(exact[u][l], a, bound), || {
                            format!("step {step}: ({u},{l}) exact {} answer {a}", exact[u][l])
                        })?;
                    }
                }
                run.updates += 1;
            }
            ScriptOp::Query(v, l) => {
                let a = o.query(v, l).unwrap();
                ensure(a == rebuilt.query(v, l).unwrap(), || {
                    format!("step {step}: query differs from rebuild")
                })?;
                ensure(within(exact[v][l], a, bound), || {
                    format!("step {step}: exact {} answer {a}", exact[v][l])
                })?;
                run.queries += 1;
            }
        }
    }
    Ok(run)
}

fn criterion_4() -> Outcome {
    let (mut queries, mut updates) = (0, 0);
    for (seed, k) in [(0u64, 2usize), (1, 3)] {
        let (g, labels) = gnm(300, 1500, W1_10, 16, seed);
        let apsp = floyd_warshall(&g);
        let script = random_script(300, 16, 200, seed + 100);
        let run = replay_dynamic(&g, &labels, &apsp, k, seed, &script)?;
        queries += run.queries;
        updates += run.updates;
    }
    Ok(format!("{updates} updates, {queries} scripted queries; all answers equal the rebuild and stay within 4k-3"))
}

fn criterion_5() -> Outcome {
    let mut worst_constant: f64 = 0.0;
    let mut cost_exact = true;
    let mut updates = 0;
    for seed in 0..6u64 {
        for k in [2usize, 3] {
            let (g, labels) = gnm(300, 1500, W1_10, 16, seed);
            let apsp = floyd_warshall(&g);
            let script: Vec<ScriptOp> = random_script(300, 16, 60, seed)
                .into_iter()
                .filter(|op| matches!(op, ScriptOp::Update(..)))
                .collect();
            let run = replay_dynamic(&g, &labels, &apsp, k, seed, &script)?;
            let n = g.node_count() as f64;
            let scale = n.powf(1.0 / k as f64) * n.ln().powf(1.0 - 1.0 / k as f64);
            worst_constant = worst_constant.max(run.max_bunch as f64 / scale);
            cost_exact &= run.cost_exact;
            updates += run.updates;
        }
    }
    ensure(worst_constant <= 8.0, || {
        format!("max |B(v)| constant {worst_constant:.3} > 8")
    })?;
    ensure(cost_exact, || {
        "an update touched a heap count other than |B(v)|".into()
    })?;
    Ok(format!(
        "max |B(v)| / (n^(1/k) ln(n)^(1-1/k)) = {worst_constant:.3} <= 8; {updates} updates each cost exactly |B(v)| remove/insert pairs"
    ))
}

fn subgraph_of(g: &Graph, edges: impl IntoIterator<Item = usize>) -> Graph {
    Graph::from_edges(
        g.node_count(),
        edges.into_iter().map(|e| {
            let e = g.edge(e);
            (e.u, e.v, e.w)
        }),
    )
    .unwrap()
}

fn criterion_6() -> Outcome {
    let (k, eps, ell) = (2usize, 0.5, 16usize);
    let bound = (4 * k + 1) as f64 * (1.0 + eps);
    let mut c_max: f64 = 0.0;
    let mut covers = 0;
    for seed in 0..3u64 {
        for (g, labels) in [
            grid(20, 20, ell, seed),
            gnm(400, 1600, WeightModel::Unit, ell, seed),
        ] {
            let s = build_unweighted_spanner(&g, &labels, k, eps).map_err(|e| e.to_string())?;
            let h = subgraph_of(&g, s.edges.iter().copied());
            // (a) every spanner edge is a graph edge with its weight
            for e in h.edges() {
                ensure(
                    g.edge_id(e.u, e.v).is_some_and(|id| g.edge(id).w == e.w),
                    || format!("edge {:?} not in G", e),
                )?;
            }
            // (b)
            let dg = label_distances(&floyd_warshall(&g), &labels);
            let dh = label_distances(&floyd_warshall(&h), &labels);
            for v in 0..g.node_count() {
                for l in 0..ell {
                    ensure(within(dg[v][l], dh[v][l], bound), || {
                        format!("seed {seed} ({v},{l}): G {} H {}", dg[v][l], dh[v][l])
                    })?;
                }
            }
            // (c) and (d)
            let per_node = g.node_count() as f64 * (ell as f64).powf(1.0 / k as f64);
            for c in &s.covers {
                c_max = c_max.max(c.edges.len() as f64 / per_node);
                let dc = label_distances(
                    &floyd_warshall(&subgraph_of(&g, c.edges.keys().copied())),
                    &labels,
                );
                for v in 0..g.node_count() {
                    for l in 0..ell {
                        if dg[v][l] <= c.d {
                            ensure(dc[v][l] <= (4 * k + 1) as f64 * c.d, || {
                                format!(
                                    "seed {seed} d={} ({v},{l}): {} > {}",
                                    c.d,
                                    dc[v][l],
                                    9.0 * c.d
                                )
                            })?;
                        }
                    }
                }
                covers += 1;
            }
        }
    }
    ensure(c_max <= 3.0, || {
        format!("per-cover constant {c_max:.3} > 3")
    })?;
    Ok(format!(
        "{covers} covers checked; stretch <= {bound}; per-cover C = {c_max:.3} (limit 3)"
    ))
}

fn criterion_7() -> Outcome {
    let (k, eps, ell) = (2usize, 0.5, 8usize);
    let bound = (4 * k + 1) as f64 * (1.0 + eps);
    let mut worst_total: f64 = 0.0;
    let mut cells_checked = 0;
    for seed in 0..3u64 {
        let (g, labels) = gnm(
            200,
            800,
            WeightModel::Uniform { lo: 1.0, hi: 100.0 },
            ell,
            seed,
        );
        let s = build_weighted_spanner(&g, &labels, k, eps)
            .map_err(|e| format!("build failed: {e}"))?;
        let h = subgraph_of(&g, s.edges.iter().copied());
        let (apsp, hops) = floyd_warshall_hops(&g);
        let dg = label_distances(&apsp, &labels);
        let dh = label_distances(&floyd_warshall(&h), &labels);
        for v in 0..g.node_count() {
            for l in 0..ell {
                ensure(within(dg[v][l], dh[v][l], bound), || {
                    format!("seed {seed} ({v},{l}): G {} H {}", dg[v][l], dh[v][l])
                })?;
            }
        }
        // size against C · ⌈log₂ n⌉ · ⌈log_{1+ε} D⌉ · n · ℓ^{1/k}
        let diameter = apsp
            .iter()
            .flatten()
            .filter(|d| d.is_finite())
            .fold(0.0f64, |a, &b| a.max(b));
        let n = g.node_count() as f64;
        let budget = n.log2().ceil()
            * (diameter.ln() / (1.0 + eps).ln()).ceil()
            * n
            * (ell as f64).powf(1.0 / k as f64);
        let total = s.edges.len() as f64 / budget;
        worst_total = worst_total.max(total);

        // per-cell guarantee for the cell of a fewest-hop shortest path
        let max_label = dg
            .iter()
            .flatten()
            .filter(|d| d.is_finite())
            .fold(0.0f64, |a, &b| a.max(b));
        let mut cell_tables = std::collections::HashMap::new();
        for u in 0..g.node_count() {
            for l in 0..ell {
                let dist = dg[u][l];
                if dist == 0.0 || dist == INF {
                    continue;
                }
                let hop = labels
                    .class(l)
                    .iter()
                    .filter(|&&w| apsp[u][w] == dist)
                    .map(|&w| hops[u][w])
                    .min()
                    .unwrap();
                let i = (0..).find(|&i| 1.5f64.powi(i) >= dist).unwrap();
                let d = 1.5f64.powi(i);
                let x = 1usize << hop.ilog2();
                let ci = s
                    .covers
                    .iter()
                    .position(|c| c.d == d && c.x == Some(x))
                    .ok_or_else(|| format!("no cover for d={d} x={x}"))?;
                let table = cell_tables.entry(ci).or_insert_with(|| {
                    label_distances(
                        &floyd_warshall(&subgraph_of(&g, s.covers[ci].edges.keys().copied())),
                        &labels,
                    )
                });
                ensure(table[u][l] <= (4 * k + 1) as f64 * d * (1.0 + 1e-9), || {
                    format!(
                        "seed {seed} ({u},{l}) d={d} x={x}: {} > {}",
                        table[u][l],
                        9.0 * d
                    )
                })?;
                cells_checked += 1;
            }
        }
        ensure(
            distance_scales(eps, max_label).len()
                * (g.node_count().next_power_of_two().ilog2() as usize + 1)
                == s.covers.len(),
            || "unexpected cell count".into(),
        )?;
    }
    ensure(worst_total <= 4.0, || {
        format!("total size constant {worst_total:.4} > 4")
    })?;
    Ok(format!(
        "stretch <= {bound}; {cells_checked} per-cell checks; total size constant {worst_total:.4} (limit 4); no false i = 1 carve"
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut comparisons = 0usize;
    for round in 0..200 {
        let n = rng.gen_range(1..=64);
        let max_m = n * (n - 1) / 2;
        let m = rng.gen_range(0..=max_m.min(4 * n));
        let g = random_graph(&mut rng, n, m, 10);
        let apsp = floyd_warshall(&g);
        let sources: Vec<usize> = {
            let count = rng.gen_range(1..=n.min(4));
            (0..count).map(|_| rng.gen_range(0..n)).collect()
        };
        let multi: Vec<f64> = (0..n)
            .map(|v| sources.iter().map(|&s| apsp[s][v]).fold(INF, f64::min))
            .collect();

        let dm = dijkstra(&g, &sources, INF).unwrap();
        ensure(dm.dist == multi, || {
            format!("round {round}: dijkstra != Floyd-Warshall")
        })?;
        let r = rng.gen_range(0..=20) as f64;
        let capped = dijkstra(&g, &sources, r).unwrap();
        for v in 0..n {
            let want = if multi[v] <= r { multi[v] } else { INF };
            ensure(capped.dist[v] == want, || {
                format!("round {round}: capped dijkstra at {v}")
            })?;
        }
        let v = rng.gen_range(0..n);
        let want: Vec<usize> = (0..n).filter(|&u| apsp[v][u] <= r).collect();
        let mut got = ball(&g, v, r).unwrap();
        got.sort_unstable();
        ensure(got == want, || format!("round {round}: ball({v}, {r})"))?;

        for limit in [0, 1, 2, 3, n / 2, n] {
            let hb = hop_bounded_distances(&g, &sources, limit).unwrap();
            let want = hop_dp(&g, &sources, limit);
            ensure(hb.dist == want, || {
                format!("round {round}: hop limit {limit}")
            })?;
            for u in 0..n {
                if hb.dist[u] < INF {
                    let path = extract_path(&hb, u).unwrap();
                    let len: f64 = path.iter().map(|&e| g.edge(e).w).sum();
                    ensure(path.len() <= limit && len == hb.dist[u], || {
                        format!("round {round}: path to {u} under limit {limit}")
                    })?;
                }
            }
            comparisons += 1;
        }
        comparisons += 3;
    }
    Ok(format!(
        "{comparisons} primitive outputs equal the reference oracles on 200 graphs"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 static stretch", criterion_1, 60),
        ("2 static size", criterion_2, 0),
        ("3 exactness degenerations", criterion_3, 0),
        ("4 dynamic rebuild equivalence", criterion_4, 120),
        ("5 dynamic bunch/update bounds", criterion_5, 0),
        ("6 unweighted spanner", criterion_6, 120),
        ("7 weighted spanner", criterion_7, 300),
        ("8 primitive oracle equivalence", criterion_8, 0),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if budget > 0 && elapsed > Duration::from_secs(budget) => {
                Err(format!("{detail}; exceeded {budget} s budget"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!(
                "criterion {name}: PASS ({:.1} s) {detail}",
                elapsed.as_secs_f64()
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {name}: FAIL ({:.1} s) {detail}",
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
