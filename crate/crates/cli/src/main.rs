use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use vlabel_core::generate::{instance, GraphModel, LabelModel, WeightModel};
use vlabel_core::io::{parse_inline_labels, read_graph, write_graph};
use vlabel_core::script::parse_script;
use vlabel_core::verify::spanner_report;
use vlabel_core::{
    build_unweighted_spanner, build_weighted_spanner, verify_oracle, verify_spanner, DynamicOracle,
    ExactLabelTable, Graph, LabelAssignment, OracleMode, ScriptOp, StaticOracle, VerifyOptions,
    VerifyReport,
};

#[derive(Parser)]
#[command(
    name = "vlabel",
    version,
    about = "Vertex-label distance oracles and spanners"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph file, or a generator: gnm:N:M, grid:W:H, path:N.
    #[arg(long)]
    graph: String,
    /// Comma-separated label per node; replaces the labels of the input.
    #[arg(long)]
    labels_inline: Option<String>,
    /// Weight model for generated graphs: unit or uniform:LO:HI.
    #[arg(long, default_value = "unit")]
    weights: String,
    /// Label model for generated graphs: uniform:L or clustered:L:PATCH.
    #[arg(long, default_value = "uniform:1")]
    label_model: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and labeling in the text format.
    Gen {
        #[command(flatten)]
        input: GraphArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the static oracle and write its dump.
    BuildStatic {
        #[command(flatten)]
        input: GraphArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Answer a query from a static oracle dump.
    Query {
        #[arg(long)]
        oracle: PathBuf,
        #[arg(long)]
        node: usize,
        #[arg(long)]
        label: usize,
    },
    /// Replay a `U v label` / `Q v label` script on the dynamic oracle.
    Dynamic {
        #[command(flatten)]
        input: GraphArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a vertex-label spanner.
    Spanner {
        #[command(flatten)]
        input: GraphArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        weighted: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check oracle answers against exact distances.
    VerifyOracle {
        #[command(flatten)]
        input: GraphArgs,
        #[arg(long)]
        k: usize,
        /// Seeds to build oracles with; defaults to --seed.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        /// Verify the dynamic oracle by replaying this script.
        #[arg(long)]
        script: Option<PathBuf>,
        #[command(flatten)]
        report: ReportArgs,
        /// Also write the exact table as `v,label,dist` rows.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build a spanner and check it against exact distances.
    VerifySpanner {
        #[command(flatten)]
        input: GraphArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        weighted: bool,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Structure sizes of both oracles.
    Stats {
        #[command(flatten)]
        input: GraphArgs,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include one record per checked query.
    #[arg(long)]
    records: bool,
    /// Include wall time (reports are then not reproducible).
    #[arg(long)]
    timing: bool,
}

impl ReportArgs {
    fn options(&self) -> VerifyOptions {
        VerifyOptions {
            records: self.records,
            timing: self.timing,
        }
    }
}

fn load(input: &GraphArgs) -> Result<(Graph, LabelAssignment)> {
    let generated = !input.graph.starts_with("file:") && input.graph.parse::<GraphModel>().is_ok();
    let (g, labels) = if generated {
        let model: GraphModel = input.graph.parse()?;
        let weights: WeightModel = input.weights.parse()?;
        let labels: LabelModel = input.label_model.parse()?;
        instance(model, weights, labels, input.seed)?
    } else {
        let path = input.graph.strip_prefix("file:").unwrap_or(&input.graph);
        let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        read_graph(&text).with_context(|| format!("parsing {path}"))?
    };
    let labels = match &input.labels_inline {
        Some(spec) => {
            let inline = parse_inline_labels(spec, None)?;
            if inline.node_count() != g.node_count() {
                bail!(
                    "--labels-inline has {} labels for {} nodes",
                    inline.node_count(),
                    g.node_count()
                );
            }
            inline
        }
        None => labels,
    };
    Ok((g, labels))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn emit_report(report: &VerifyReport, out: Option<&Path>) -> Result<bool> {
    emit(out, &json(report)?)?;
    eprintln!(
        "{}: max ratio {} (bound {}), {} violation(s), {}",
        report.mode,
        report.max_ratio,
        report.bound,
        report.violations,
        if report.pass { "pass" } else { "FAIL" }
    );
    Ok(report.pass)
}

fn format_dist(d: f64) -> String {
    if d.is_finite() {
        format!("{d}")
    } else {
        "inf".into()
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen { input, out } => {
            let (g, labels) = load(&input)?;
            emit(out.as_deref(), &write_graph(&g, &labels))?;
        }
        Command::BuildStatic { input, k, out } => {
            let (g, labels) = load(&input)?;
            let oracle = StaticOracle::build(&g, &labels, k, input.seed)?;
            emit(out.as_deref(), &oracle.dump())?;
        }
        Command::Query {
            oracle,
            node,
            label,
        } => {
            let text = fs::read_to_string(&oracle)
                .with_context(|| format!("reading {}", oracle.display()))?;
            let oracle = StaticOracle::load(&text)?;
            println!("{}", format_dist(oracle.query(node, label)?));
        }
        Command::Dynamic {
            input,
            k,
            script,
            out,
        } => {
            let (g, labels) = load(&input)?;
            let ops = parse_script(
                &fs::read_to_string(&script)
                    .with_context(|| format!("reading {}", script.display()))?,
            )?;
            let mut oracle = DynamicOracle::build(&g, &labels, k, input.seed)?;
            let mut answers = String::new();
            for op in ops {
                match op {
                    ScriptOp::Update(v, l) => {
                        oracle.update_label(v, l)?;
                    }
                    ScriptOp::Query(v, l) => {
                        answers += &format_dist(oracle.query(v, l)?);
                        answers.push('\n');
                    }
                }
            }
            emit(out.as_deref(), &answers)?;
        }
        Command::Spanner {
            input,
            k,
            eps,
            weighted,
            out,
            report,
        } => {
            let (g, labels) = load(&input)?;
            let spanner = if weighted {
                build_weighted_spanner(&g, &labels, k, eps)?
            } else {
                build_unweighted_spanner(&g, &labels, k, eps)?
            };
            emit(out.as_deref(), &write_graph(&spanner.subgraph(&g), &labels))?;
            eprintln!(
                "spanner: {} of {} edges",
                spanner.edges.len(),
                g.edge_count()
            );
            if let Some(path) = report {
                let r = spanner_report(&g, &labels, &spanner, VerifyOptions::default());
                return emit_report(&r, Some(&path));
            }
        }
        Command::VerifyOracle {
            input,
            k,
            seeds,
            script,
            report,
            csv,
        } => {
            let (g, labels) = load(&input)?;
            if let Some(path) = csv {
                fs::write(&path, ExactLabelTable::build(&g, &labels).to_csv())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let seeds = if seeds.is_empty() {
                vec![input.seed]
            } else {
                seeds
            };
            let mode = match script {
                Some(path) => OracleMode::Dynamic {
                    k,
                    script: parse_script(
                        &fs::read_to_string(&path)
                            .with_context(|| format!("reading {}", path.display()))?,
                    )?,
                },
                None => OracleMode::Static { k },
            };
            let r = verify_oracle(&g, &labels, &mode, &seeds, report.options())?;
            return emit_report(&r, report.report.as_deref());
        }
        Command::VerifySpanner {
            input,
            k,
            eps,
            weighted,
            report,
        } => {
            let (g, labels) = load(&input)?;
            let r = verify_spanner(&g, &labels, k, eps, weighted, report.options())?;
            return emit_report(&r, report.report.as_deref());
        }
        Command::Stats { input, k } => {
            let (g, labels) = load(&input)?;
            let s = StaticOracle::build(&g, &labels, k, input.seed)?;
            let d = DynamicOracle::build(&g, &labels, k, input.seed)?;
            let stats = serde_json::json!({
                "n": g.node_count(),
                "m": g.edge_count(),
                "labels": labels.label_count(),
                "k": k,
                "static": {
                    "size": s.size(),
                    "mean_bunch": s.bunches().mean_size(),
                    "max_bunch": s.bunches().max_size(),
                },
                "dynamic": {
                    "stored_entries": d.stored_entries(),
                    "heap_entries": d.heap_entries(),
                    "mean_bunch": d.bunches().mean_size(),
                    "max_bunch": d.bunches().max_size(),
                },
            });
            print!("{}", json(&stats)?);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
