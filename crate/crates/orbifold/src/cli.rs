//! Command-line driver.
//!
//! Exit codes: 0 on success, 1 when a validation or verification fails (a
//! JSON report goes to stdout), 2 on usage errors such as bad flags or
//! unreadable input.

use std::fmt::Debug;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use orbifold_core::complex::VertexKind;
use orbifold_core::constructions::{
    cliquegraph_span, median_complex, rectilinear_cone_patch, tess45, validate_squaregraph,
    wheel_span, BuiltComplex,
};
use orbifold_core::dyadic::{GreedyEmbedding, Route};
use orbifold_core::geodesic::DistanceField;
use orbifold_core::grid::Lattice;
use orbifold_core::helly::{lattice_points, run_trial, Trial};
use orbifold_core::hyperbolic::{distortion_all_pairs, distortion_sampled, DistortionReport};
use orbifold_core::rational::to_f64;
use orbifold_core::tightspan::{span_report, FiniteMetric};
use orbifold_core::{Orbifold, Q};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::json::{
    self, parse_point, rat, rat_string, Backend, ComplexJson, DistanceJson, EmbeddingJson,
    FormatError, GraphJson, LoadError, OracleJson, SpanReportJson,
};
use crate::svg;

#[derive(Debug, Parser)]
#[command(
    name = "orbifold",
    version,
    about = "Manhattan orbifolds: build, validate, measure, export"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a complex file describes a Manhattan orbifold.
    Validate { complex: PathBuf },
    /// Build a complex and write it as JSON.
    Build {
        #[command(subcommand)]
        what: BuildCommand,
        /// Output file (stdout when omitted).
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Exact distance between two points, with a witness path.
    Dist {
        #[arg(long)]
        complex: PathBuf,
        /// `cell,x,y` or `wN,offset`.
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Also report the grid oracle at these resolutions.
        #[arg(long, num_args = 1..)]
        oracle: Vec<usize>,
    },
    /// Tight span of a finite metric.
    Tightspan {
        /// JSON n×n distance matrix.
        #[arg(long, conflicts_with = "cycle", required_unless_present = "cycle")]
        metric: Option<PathBuf>,
        /// Use the unit-length n-cycle instead of a file.
        #[arg(long)]
        cycle: Option<usize>,
    },
    /// Randomized Helly witnesses for pairwise-intersecting ball triples.
    Helly {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Initial lattice resolution.
        #[arg(long, default_value_t = 8)]
        grid: usize,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Distortion of the {4,5} patch against the hyperbolic plane.
    Distortion {
        #[arg(long)]
        rings: usize,
        /// Random pairs to sample; 0 measures every pair.
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV of the sampled pairs.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Greedy embeddings.
    Greedy {
        #[command(subcommand)]
        what: GreedyCommand,
    },
    /// Draw a plane graph or the net of a complex.
    ExportSvg {
        #[arg(long, conflicts_with = "complex", required_unless_present = "complex")]
        graph: Option<PathBuf>,
        #[arg(long)]
        complex: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum BuildCommand {
    /// Median complex of a squaregraph.
    Squaregraph(GraphInput),
    /// Span of a cliquegraph: one square per internal edge.
    Cliquegraph(GraphInput),
    /// Span of the wheel with `rim` spokes.
    Wheel {
        #[arg(long)]
        rim: usize,
    },
    /// Patch of the rectilinear cone of the given order.
    Cone {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "1")]
        extent: String,
    },
    /// Median complex of the {4,5} tessellation patch.
    Tess45 {
        #[arg(long)]
        rings: usize,
        /// Also write the patch graph here.
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct GraphInput {
    #[arg(long)]
    pub graph: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum GreedyCommand {
    /// Check the greedy condition for every ordered pair.
    Verify {
        #[arg(long)]
        embedding: PathBuf,
    },
    /// Route greedily between two vertices.
    Route {
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Exit 2.
    Usage(String),
    /// Exit 1, with this JSON report on stdout.
    Failed(Value),
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Format(f) => f.into(),
            LoadError::Invalid(report) => CliError::Failed(validation_json(&report, None)),
        }
    }
}

/// Variant name of an error, used as its machine-readable code.
fn code_of(e: &impl Debug) -> String {
    format!("{e:?}")
        .chars()
        .take_while(|c| c.is_alphanumeric())
        .collect()
}

fn failure(e: impl Debug + std::fmt::Display) -> CliError {
    CliError::Failed(json!({ "error": code_of(&e), "message": e.to_string() }))
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn validation_json(
    report: &orbifold_core::complex::ValidationReport,
    orb: Option<&Orbifold>,
) -> Value {
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| json!({ "code": v.code(), "message": v.to_string() }))
        .collect();
    let mut out = json!({ "valid": report.is_valid(), "violations": violations });
    if let Some(orb) = orb {
        let vertices: Vec<Value> = orb
            .vertex_classes()
            .iter()
            .map(|v| {
                let kind = match v.kind {
                    VertexKind::Regular => "interior-regular".to_string(),
                    VertexKind::Cone(k) => format!("cone({k})"),
                    VertexKind::Boundary => "boundary".to_string(),
                };
                json!({
                    "id": v.id,
                    "kind": kind,
                    "order": v.order,
                    "angular_excess_over_pi": v.angular_excess_over_pi().map(rat_string),
                })
            })
            .collect();
        out["euler_characteristic"] = json!(orb.euler_characteristic());
        out["vertices"] = json!(vertices);
    }
    out
}

fn load_graph(path: &Path) -> Result<orbifold_core::graph::EmbeddedGraph, CliError> {
    Ok(GraphJson::parse(&json::read_file(path)?)?.to_graph()?.0)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.write_all(b"\n"))
                .map_err(usage)
        }
    }
}

fn built_json(b: &BuiltComplex) -> String {
    let j = ComplexJson::from_complex(b.orbifold.complex(), &b.points);
    serde_json::to_string_pretty(&j).expect("serializable")
}

/// Runs one command. `Ok` carries the JSON printed on stdout (if any).
pub fn run(cli: Cli) -> Result<Option<Value>, CliError> {
    match cli.command {
        Command::Validate { complex } => {
            let c = match ComplexJson::parse(&json::read_file(&complex)?)?.to_complex() {
                Ok(c) => c,
                Err(FormatError::Complex(e)) => return Err(failure(e)),
                Err(e) => return Err(e.into()),
            };
            let report = c.validate();
            if !report.is_valid() {
                return Err(CliError::Failed(validation_json(&report, None)));
            }
            let orb = Orbifold::new(c).expect("validated");
            Ok(Some(validation_json(&report, Some(&orb))))
        }
        Command::Build { what, output } => {
            let built = match what {
                BuildCommand::Squaregraph(g) => {
                    let g = load_graph(&g.graph)?;
                    let bad = validate_squaregraph(&g);
                    if !bad.is_empty() {
                        let v: Vec<Value> = bad
                            .iter()
                            .map(|b| json!({ "code": b.code(), "message": b.to_string() }))
                            .collect();
                        return Err(CliError::Failed(
                            json!({ "error": "NotSquaregraph", "violations": v }),
                        ));
                    }
                    median_complex(&g).map_err(failure)?
                }
                BuildCommand::Cliquegraph(g) => {
                    cliquegraph_span(&load_graph(&g.graph)?).map_err(failure)?
                }
                BuildCommand::Wheel { rim } => wheel_span(rim).map_err(failure)?,
                BuildCommand::Cone { order, extent } => {
                    rectilinear_cone_patch(order, rat(&extent).map_err(usage)?).map_err(failure)?
                }
                BuildCommand::Tess45 { rings, graph_out } => {
                    let t = tess45(rings);
                    if let Some(p) = graph_out {
                        let text = serde_json::to_string_pretty(&GraphJson::from_graph(&t.graph))
                            .expect("serializable");
                        write_output(Some(&p), &text)?;
                    }
                    median_complex(&t.graph).map_err(failure)?
                }
            };
            write_output(output.as_deref(), &built_json(&built))?;
            Ok(None)
        }
        Command::Dist {
            complex,
            from,
            to,
            oracle,
        } => {
            let (orb, _) = json::load_orbifold(&complex)?;
            let p = parse_point(&from)?;
            let q = parse_point(&to)?;
            for pt in [&p, &q] {
                if !orb.in_bounds(pt) {
                    return Err(usage(format!("point {pt:?} is outside the complex")));
                }
            }
            let field = DistanceField::new(&orb, &p).map_err(failure)?;
            let result = field.witness(&q).map_err(failure)?;
            let mut out = DistanceJson::from(&result);
            for m in oracle {
                if m < 2 {
                    return Err(usage("oracle resolution must be at least 2"));
                }
                let g = Lattice::build(&orb, m)
                    .distance(&p, &q)
                    .expect("points are in bounds");
                out.oracle.push(OracleJson {
                    m,
                    value: rat_string(g.value),
                    cells_traversed: g.cells_traversed,
                    snap_error: rat_string(g.snap_error),
                });
            }
            Ok(Some(serde_json::to_value(out).expect("serializable")))
        }
        Command::Tightspan { metric, cycle } => {
            let m = match (metric, cycle) {
                (Some(path), _) => FiniteMetric::new(json::parse_metric(&json::read_file(&path)?)?)
                    .map_err(failure)?,
                (None, Some(n)) => FiniteMetric::cycle(n).map_err(failure)?,
                (None, None) => unreachable!("clap requires one of the inputs"),
            };
            let report = span_report(&m).map_err(failure)?;
            Ok(Some(
                serde_json::to_value(SpanReportJson::from(&report)).expect("serializable"),
            ))
        }
        Command::Helly {
            complex,
            trials,
            grid,
            levels,
            seed,
            threads,
        } => {
            if grid == 0 {
                return Err(usage("--grid must be positive"));
            }
            let (orb, _) = json::load_orbifold(&complex)?;
            let report = helly_report(&orb, trials, grid, levels, seed, threads)?;
            if report["failures"].as_u64() != Some(0) {
                return Err(CliError::Failed(report));
            }
            Ok(Some(report))
        }
        Command::Distortion {
            rings,
            pairs,
            seed,
            csv,
        } => {
            let report: DistortionReport = if pairs == 0 {
                if csv.is_some() {
                    return Err(usage("--csv needs sampled pairs (--pairs > 0)"));
                }
                distortion_all_pairs(rings).map_err(failure)?
            } else {
                let (report, samples) = distortion_sampled(rings, pairs, seed).map_err(failure)?;
                if let Some(path) = csv {
                    let mut text = String::from("pair,d_graph,d_hyp,ratio\n");
                    for (i, s) in samples.iter().enumerate() {
                        text.push_str(&format!(
                            "{i},{},{:.12},{:.12}\n",
                            s.graph,
                            s.hyperbolic,
                            s.ratio()
                        ));
                    }
                    write_output(Some(&path), &text)?;
                }
                report
            };
            Ok(Some(json!({
                "rings": report.rings,
                "seed": seed,
                "vertices": report.vertices,
                "pairs": report.pairs,
                "all_pairs": pairs == 0,
                "scale": report.scale,
                "ratio_min": report.ratio_min,
                "ratio_max": report.ratio_max,
                "spread": report.spread(),
                "edge_length": orbifold_core::hyperbolic::tile_side(),
                "edge_error": report.edge_error,
            })))
        }
        Command::Greedy { what } => match what {
            GreedyCommand::Verify { embedding } => {
                let emb = greedy_embedding(&embedding)?;
                let report = emb.verify().map_err(failure)?;
                let out = json!({
                    "greedy": report.is_greedy(),
                    "pairs_checked": report.pairs_checked,
                    "violations": report.violations,
                });
                if report.is_greedy() {
                    Ok(Some(out))
                } else {
                    Err(CliError::Failed(out))
                }
            }
            GreedyCommand::Route {
                embedding,
                from,
                to,
            } => {
                let emb = greedy_embedding(&embedding)?;
                if from >= emb.vertex_count() || to >= emb.vertex_count() {
                    return Err(usage(format!(
                        "vertices must be below {}",
                        emb.vertex_count()
                    )));
                }
                match emb.route(from, to).map_err(failure)? {
                    Route::Delivered(path) => Ok(Some(json!({
                        "delivered": true,
                        "hops": path.len() - 1,
                        "path": path,
                    }))),
                    Route::Stuck { path, at } => Err(CliError::Failed(json!({
                        "delivered": false,
                        "stuck_at": at,
                        "path": path,
                    }))),
                }
            }
        },
        Command::ExportSvg {
            graph,
            complex,
            output,
        } => {
            let text = match (graph, complex) {
                (Some(g), _) => svg::graph_svg(&load_graph(&g)?),
                (None, Some(c)) => svg::complex_net_svg(&json::load_orbifold(&c)?.0),
                (None, None) => unreachable!("clap requires one of the inputs"),
            };
            write_output(Some(&output), &text)?;
            Ok(None)
        }
    }
}

fn greedy_embedding(path: &Path) -> Result<GreedyEmbedding, CliError> {
    let emb = EmbeddingJson::load(path)?;
    match emb.backend {
        Backend::Dyadic(points) => GreedyEmbedding::dyadic(emb.adjacency, &points).map_err(failure),
        Backend::Complex(orb, points) => {
            if let Some(p) = points.iter().find(|p| !orb.in_bounds(p)) {
                return Err(usage(format!("placement {p:?} is outside the complex")));
            }
            GreedyEmbedding::in_complex(emb.adjacency, &orb, &points).map_err(failure)
        }
    }
}

/// Runs `trials` seeded Helly trials and summarizes them by trial index.
pub fn helly_trials(
    orb: &Orbifold,
    trials: u64,
    m0: usize,
    levels: usize,
    seed: u64,
) -> Result<Vec<Trial>, orbifold_core::helly::HellyError> {
    let lattice = lattice_points(orb, m0);
    (0..trials)
        .into_par_iter()
        .map(|i| run_trial(orb, &lattice, seed, i, m0, levels))
        .collect()
}

fn helly_report(
    orb: &Orbifold,
    trials: u64,
    m0: usize,
    levels: usize,
    seed: u64,
    threads: usize,
) -> Result<Value, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(usage)?;
    let results = pool
        .install(|| helly_trials(orb, trials, m0, levels, seed))
        .map_err(failure)?;
    let failures: Vec<u64> = results
        .iter()
        .filter(|t| !t.report.is_witness())
        .map(|t| t.index)
        .collect();
    let non_monotone = results
        .iter()
        .filter(|t| t.report.level_excess.windows(2).any(|w| w[1] > w[0]))
        .count();
    let excess: Vec<f64> = results.iter().map(|t| to_f64(t.report.excess)).collect();
    let margin: Vec<Q> = results
        .iter()
        .map(|t| t.report.tau - t.report.excess)
        .collect();
    let quantile = |p: f64| -> Option<f64> {
        let mut v = excess.clone();
        v.sort_by(f64::total_cmp);
        (!v.is_empty()).then(|| v[((v.len() - 1) as f64 * p).round() as usize])
    };
    Ok(json!({
        "seed": seed,
        "trials": trials,
        "m0": m0,
        "levels": levels,
        "m_final": m0 << levels,
        "failures": failures.len(),
        "failed_trials": failures,
        "non_monotone_trials": non_monotone,
        "excess": {
            "min": quantile(0.0),
            "median": quantile(0.5),
            "max": quantile(1.0),
        },
        "min_margin": margin.iter().min().map(|&m| rat_string(m)),
        "max_tau": results.iter().map(|t| t.report.tau).max().map(rat_string),
    }))
}

/// Parses arguments, runs, prints, and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(Some(v)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&v).expect("serializable")
            );
            0
        }
        Ok(None) => 0,
        Err(CliError::Failed(v)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&v).expect("serializable")
            );
            1
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
