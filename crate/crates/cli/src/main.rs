//! `rsub`: generate instances, run the pipeline stages, verify
//! certificates, and benchmark over parameter grids.
//!
//! Exit codes: 0 for success (including "none" determinations), 1 for an
//! honest algorithmic failure (a transcript says where the search gave
//! up), 2 for input or usage errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use rsub_core::density::extract_d_minimal;
use rsub_core::expander::{cover_by_expanders, paper_lambda, Certification};
use rsub_core::graph::{ColouredGraph, VertexId};
use rsub_core::instances::{
    gen_hypercube, gen_one_factorized_complete, gen_rainbow_complete, gen_random_proper,
    ColouringRule,
};
use rsub_core::oracle::{brute_rainbow_cycle, verify_subdivision};
use rsub_core::rational::{fmt_rational, parse_rational, ratio, Rational};
use rsub_core::search::{rainbow_connect, AvoidSet, ConnectParams, ConnectTranscript};
use rsub_core::subdivision::{
    compute_ladder, default_c, find_rainbow_subdivision, DriverFailure, SearchMode,
    SubdivisionCertificate,
};
use rsub_core::SCHEMA_VERSION;

#[derive(Parser)]
#[command(name = "rsub", version, about = "Rainbow subdivision toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and write it in the text graph format
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Load a graph and report its basic statistics
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Extract a d-minimal subgraph at the given threshold
    ExtractMinimal {
        file: PathBuf,
        /// Density threshold (rational, e.g. 5/2); needs avg degree >= d
        #[arg(long)]
        d: String,
        #[arg(long)]
        json: bool,
    },
    /// Cover the graph's edges by edge-disjoint expander pieces
    Cover {
        file: PathBuf,
        #[arg(long, default_value = "1/4")]
        eps: String,
        /// Expansion parameter; omit with --paper-mode
        #[arg(long, conflicts_with = "paper_mode")]
        lambda: Option<String>,
        /// Use lambda = eps / (2 ln n)
        #[arg(long)]
        paper_mode: bool,
        #[arg(long)]
        json: bool,
    },
    /// Find a rainbow path between two vertices under avoid sets
    Connect {
        file: PathBuf,
        #[arg(long)]
        x: u32,
        #[arg(long)]
        y: u32,
        #[arg(long)]
        seed: u64,
        /// Reach radius per stage; defaults to n - 1
        #[arg(long)]
        max_len: Option<usize>,
        /// Comma-separated forbidden vertices
        #[arg(long, value_delimiter = ',')]
        avoid_vertices: Vec<u32>,
        /// Comma-separated forbidden colours
        #[arg(long, value_delimiter = ',')]
        avoid_colours: Vec<u32>,
        #[arg(long, default_value = "1/4")]
        eps: String,
        /// Defaults to eps / (2 ln n)
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Search for a rainbow K_t-subdivision end to end
    FindSubdivision {
        file: PathBuf,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        seed: u64,
        /// Ladder-derived reach radius and budget enforcement
        #[arg(long, conflicts_with = "max_len")]
        paper_mode: bool,
        /// Practical reach radius cap
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long, default_value = "1/40")]
        eps: String,
        /// Density-hypothesis constant; defaults from eps
        #[arg(long)]
        c: Option<f64>,
        /// Use these branch vertices instead of the top-degree choice
        #[arg(long, value_delimiter = ',')]
        branch: Vec<u32>,
        /// Write the certificate JSON here as well
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check a subdivision certificate against a graph
    Verify {
        file: PathBuf,
        cert: PathBuf,
        #[arg(long)]
        t: u32,
        /// Per-path length bound; defaults to n - 1
        #[arg(long)]
        max_path_len: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive rainbow-cycle search (the hypercube control says "none")
    RainbowCycle {
        file: PathBuf,
        /// Cycle length cap; defaults to n
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Run a benchmark grid from a JSON spec and emit CSV
    Bench {
        spec: PathBuf,
        /// Append a wall_ms column (off by default so output is stable)
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Dimension-m hypercube with the bit-flip colouring
    Hypercube {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// G(n, p) with a proper edge colouring
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "greedy")]
        rule: ColouringRule,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complete graph, every edge its own colour
    RainbowComplete {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complete graph coloured by a round-robin 1-factorization
    OneFactorized {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_graph(path: &Path) -> Result<ColouredGraph> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    ColouredGraph::load(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_rat(name: &str, s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| anyhow!("--{name}: {e}"))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Gen { what } => run_gen(what),
        Command::Check { file, json } => run_check(&file, json),
        Command::ExtractMinimal { file, d, json } => run_extract(&file, &d, json),
        Command::Cover {
            file,
            eps,
            lambda,
            paper_mode,
            json,
        } => run_cover(&file, &eps, lambda.as_deref(), paper_mode, json),
        Command::Connect {
            file,
            x,
            y,
            seed,
            max_len,
            avoid_vertices,
            avoid_colours,
            eps,
            lambda,
            json,
        } => run_connect(
            &file,
            x,
            y,
            seed,
            max_len,
            &avoid_vertices,
            &avoid_colours,
            &eps,
            lambda.as_deref(),
            json,
        ),
        Command::FindSubdivision {
            file,
            t,
            seed,
            paper_mode,
            max_len,
            eps,
            c,
            branch,
            out,
            json,
        } => run_find(
            &file,
            t,
            seed,
            paper_mode,
            max_len,
            &eps,
            c,
            &branch,
            out.as_deref(),
            json,
        ),
        Command::Verify {
            file,
            cert,
            t,
            max_path_len,
            json,
        } => run_verify(&file, &cert, t, max_path_len, json),
        Command::RainbowCycle {
            file,
            max_len,
            json,
        } => run_rainbow_cycle(&file, max_len, json),
        Command::Bench { spec, timing, out } => run_bench(&spec, timing, out.as_deref()),
    }
}

fn run_gen(what: GenCommand) -> Result<u8> {
    let (graph, header, out) = match what {
        GenCommand::Hypercube { m, out } => {
            (gen_hypercube(m)?, format!("hypercube m={m}"), out)
        }
        GenCommand::Random {
            n,
            p,
            rule,
            seed,
            out,
        } => (
            gen_random_proper(n, p, rule, seed)?,
            format!("random n={n} p={p} rule={rule:?} seed={seed}"),
            out,
        ),
        GenCommand::RainbowComplete { n, out } => (
            gen_rainbow_complete(n)?,
            format!("rainbow-complete n={n}"),
            out,
        ),
        GenCommand::OneFactorized { n, out } => (
            gen_one_factorized_complete(n)?,
            format!("one-factorized n={n}"),
            out,
        ),
    };
    emit(out.as_deref(), &graph.to_text(&[&header]))?;
    Ok(0)
}

#[derive(Serialize)]
struct CheckReport {
    schema: &'static str,
    n: usize,
    m: usize,
    k: usize,
    min_degree: usize,
    max_degree: usize,
    avg_degree: String,
}

fn run_check(file: &Path, json: bool) -> Result<u8> {
    let g = load_graph(file)?;
    let view = g.full_view();
    let (min_d, max_d) = (0..g.n())
        .map(|v| g.degree(VertexId(v as u32)))
        .fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)));
    let avg = view.avg_degree().unwrap_or_else(|| ratio(0, 1));
    let report = CheckReport {
        schema: SCHEMA_VERSION,
        n: g.n(),
        m: g.m(),
        k: g.k(),
        min_degree: if g.n() == 0 { 0 } else { min_d },
        max_degree: max_d,
        avg_degree: fmt_rational(avg),
    };
    if json {
        print!("{}", json_line(&report)?);
    } else {
        println!(
            "n={} m={} k={} degrees min={} max={} avg={}",
            report.n, report.m, report.k, report.min_degree, report.max_degree, report.avg_degree
        );
    }
    Ok(0)
}

#[derive(Serialize)]
struct ExtractReport {
    schema: &'static str,
    d: String,
    v: usize,
    e: usize,
    avg_degree: String,
    vertices: Vec<VertexId>,
}

fn run_extract(file: &Path, d: &str, json: bool) -> Result<u8> {
    let g = load_graph(file)?;
    let d = parse_rat("d", d)?;
    let cert = extract_d_minimal(&g.full_view(), d)?;
    let report = ExtractReport {
        schema: SCHEMA_VERSION,
        d: fmt_rational(d),
        v: cert.subgraph.v(),
        e: cert.subgraph.e(),
        avg_degree: fmt_rational(cert.subgraph.avg_degree().unwrap_or_else(|| ratio(0, 1))),
        vertices: cert.subgraph.vertex_vec(),
    };
    if json {
        print!("{}", json_line(&report)?);
    } else {
        println!(
            "minimal at d={}: v={} e={} avg={}",
            report.d, report.v, report.e, report.avg_degree
        );
        println!("vertices: {}", join_display(&report.vertices));
    }
    Ok(0)
}

#[derive(Serialize)]
struct CoverPieceReport {
    v: usize,
    e: usize,
    d: String,
    certification: Certification,
}

#[derive(Serialize)]
struct CoverReport {
    schema: &'static str,
    eps: String,
    lambda: String,
    pieces: Vec<CoverPieceReport>,
    uncovered_edges: usize,
    covered_fraction: String,
}

fn cover_report(g: &ColouredGraph, eps: Rational, lambda: Rational) -> Result<CoverReport> {
    let view = g.full_view();
    let cover = cover_by_expanders(&view, eps, lambda)?;
    let covered = ratio((view.e() - cover.uncovered.len()) as i128, view.e() as i128);
    Ok(CoverReport {
        schema: SCHEMA_VERSION,
        eps: fmt_rational(eps),
        lambda: fmt_rational(lambda),
        pieces: cover
            .pieces
            .iter()
            .map(|p| CoverPieceReport {
                v: p.subgraph.v(),
                e: p.subgraph.e(),
                d: fmt_rational(p.params.d),
                certification: p.certification,
            })
            .collect(),
        uncovered_edges: cover.uncovered.len(),
        covered_fraction: fmt_rational(covered),
    })
}

fn run_cover(
    file: &Path,
    eps: &str,
    lambda: Option<&str>,
    paper_mode: bool,
    json: bool,
) -> Result<u8> {
    let g = load_graph(file)?;
    let eps = parse_rat("eps", eps)?;
    let lambda = match (lambda, paper_mode) {
        (Some(l), false) => parse_rat("lambda", l)?,
        (None, true) => {
            if g.n() < 2 {
                bail!("--paper-mode needs n >= 2");
            }
            paper_lambda(eps, g.n() as u64)
        }
        (None, false) => bail!("pass --lambda R or --paper-mode"),
        (Some(_), true) => unreachable!("clap rejects the combination"),
    };
    let report = cover_report(&g, eps, lambda)?;
    if json {
        print!("{}", json_line(&report)?);
    } else {
        for (i, p) in report.pieces.iter().enumerate() {
            println!(
                "piece {i}: v={} e={} d={} {:?}",
                p.v, p.e, p.d, p.certification
            );
        }
        println!(
            "covered {} of edges, {} uncovered (eps={}, lambda={})",
            report.covered_fraction, report.uncovered_edges, report.eps, report.lambda
        );
    }
    Ok(0)
}

#[derive(Serialize)]
struct ConnectReport {
    schema: &'static str,
    path: Option<PathReport>,
    transcript: ConnectTranscript,
}

#[derive(Serialize)]
struct PathReport {
    length: usize,
    vertices: Vec<VertexId>,
    colours: Vec<rsub_core::graph::ColourId>,
}

#[allow(clippy::too_many_arguments)]
fn run_connect(
    file: &Path,
    x: u32,
    y: u32,
    seed: u64,
    max_len: Option<usize>,
    avoid_vertices: &[u32],
    avoid_colours: &[u32],
    eps: &str,
    lambda: Option<&str>,
    json: bool,
) -> Result<u8> {
    let g = load_graph(file)?;
    let view = g.full_view();
    let eps = parse_rat("eps", eps)?;
    let lambda = match lambda {
        Some(l) => parse_rat("lambda", l)?,
        None => {
            if g.n() < 2 {
                bail!("graph too small to connect anything");
            }
            paper_lambda(eps, g.n() as u64)
        }
    };
    let (x, y) = (VertexId(x), VertexId(y));
    let avoid = AvoidSet::from_sets(
        &g,
        &avoid_vertices.iter().map(|&v| VertexId(v)).collect::<Vec<_>>(),
        &avoid_colours
            .iter()
            .map(|&c| rsub_core::graph::ColourId(c))
            .collect::<Vec<_>>(),
    );
    let reach_len = max_len.unwrap_or_else(|| g.n().saturating_sub(1));
    let params = ConnectParams::new(reach_len, lambda, eps);
    let out = rainbow_connect(&view, x, y, &avoid, &params, seed)?;
    // never trust the pipeline: replay the path before reporting success
    if let Some(p) = &out.path {
        let mut check = avoid.clone();
        check.allow_vertex(x);
        check.allow_vertex(y);
        p.validate(&view, Some(&check))
            .map_err(|e| anyhow!("pipeline returned an invalid path: {e}"))?;
    }
    let report = ConnectReport {
        schema: SCHEMA_VERSION,
        path: out.path.as_ref().map(|p| PathReport {
            length: p.len(),
            vertices: p.vertices.clone(),
            colours: p.colours.clone(),
        }),
        transcript: out.transcript,
    };
    if json {
        print!("{}", json_line(&report)?);
    } else if let Some(p) = &report.path {
        println!("path of length {}: {}", p.length, join_display(&p.vertices));
        println!("colours: {}", join_display(&p.colours));
    } else {
        println!(
            "no path: gave up at stage {:?} (source ball {}, target ball {})",
            report.transcript.failure, report.transcript.source_reach, report.transcript.target_reach
        );
    }
    Ok(if report.path.is_some() { 0 } else { 1 })
}

#[derive(Serialize)]
struct FindReport {
    schema: &'static str,
    t: u32,
    mode: String,
    seed: u64,
    trace: rsub_core::subdivision::IncrementTrace,
    expander: rsub_core::subdivision::ExpanderSummary,
    branch: Vec<VertexId>,
    certificate: Option<SubdivisionCertificate>,
    failure: Option<String>,
}

#[allow(clippy::too_many_arguments)]
fn run_find(
    file: &Path,
    t: u32,
    seed: u64,
    paper_mode: bool,
    max_len: Option<usize>,
    eps: &str,
    c: Option<f64>,
    branch: &[u32],
    out: Option<&Path>,
    json: bool,
) -> Result<u8> {
    let g = load_graph(file)?;
    let view = g.full_view();
    let eps = parse_rat("eps", eps)?;
    let c = c.unwrap_or_else(|| default_c(eps));
    let mode = if paper_mode {
        SearchMode::Paper
    } else {
        let ladder = compute_ladder(g.n().max(2) as u64, t, eps, c)?;
        SearchMode::Practical {
            max_len: max_len.unwrap_or_else(|| ladder.default_max_len(g.n())),
        }
    };
    let branch_ids: Vec<VertexId> = branch.iter().map(|&v| VertexId(v)).collect();
    let override_ref = (!branch_ids.is_empty()).then_some(branch_ids.as_slice());
    let outcome = find_rainbow_subdivision(&view, t, eps, c, mode, seed, override_ref)?;

    let (certificate, failure) = match outcome.result {
        Ok(cert) => {
            // re-verify through the oracle before claiming success
            let params = outcome.ladder.connect_params(mode, outcome.expander.v);
            let bound = (4 * params.reach_len).max(1);
            verify_subdivision(&g, &cert, t as usize, bound)
                .map_err(|e| anyhow!("pipeline produced a bad certificate: {e}"))?;
            (Some(cert), None)
        }
        Err(f) => (None, Some(describe_failure(&f))),
    };
    let report = FindReport {
        schema: SCHEMA_VERSION,
        t,
        mode: match mode {
            SearchMode::Paper => "paper".into(),
            SearchMode::Practical { max_len } => format!("practical:{max_len}"),
        },
        seed,
        trace: outcome.trace,
        expander: outcome.expander,
        branch: outcome.branch,
        certificate,
        failure,
    };
    if let (Some(cert), Some(path)) = (&report.certificate, out) {
        std::fs::write(path, json_line(cert)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if json {
        print!("{}", json_line(&report)?);
    } else if let Some(cert) = &report.certificate {
        println!(
            "found a rainbow K_{t} subdivision: branch {}, {} paths",
            join_display(&cert.branch),
            cert.paths.len()
        );
        for p in &cert.paths {
            println!("  {} - {}: {}", p.a, p.b, join_display(&p.path.vertices));
        }
    } else {
        println!(
            "no subdivision: {}",
            report.failure.as_deref().unwrap_or("unknown")
        );
        for (i, s) in report.trace.steps.iter().enumerate() {
            println!("  scale {i}: v={} e={} avg={}", s.v, s.e, fmt_rational(s.avg));
        }
    }
    Ok(if report.certificate.is_some() { 0 } else { 1 })
}

fn describe_failure(f: &DriverFailure) -> String {
    match f {
        DriverFailure::ExpanderTooSmall { v, t } => {
            format!("expander kept {v} vertices, fewer than t = {t}")
        }
        DriverFailure::BranchOutsideExpander { missing } => {
            format!("branch vertices outside the expander: {}", join_display(missing))
        }
        DriverFailure::Build(b) => format!(
            "pair ({}, {}) failed after {} pairs, stage {:?}",
            b.failed_pair.0, b.failed_pair.1, b.completed_pairs, b.transcript.failure
        ),
    }
}

#[derive(Serialize)]
struct VerifyReport {
    schema: &'static str,
    valid: bool,
    reason: Option<String>,
}

fn run_verify(
    file: &Path,
    cert_path: &Path,
    t: u32,
    max_path_len: Option<usize>,
    json: bool,
) -> Result<u8> {
    let g = load_graph(file)?;
    let text = std::fs::read_to_string(cert_path)
        .with_context(|| format!("reading {}", cert_path.display()))?;
    let cert: SubdivisionCertificate =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", cert_path.display()))?;
    let bound = max_path_len.unwrap_or_else(|| g.n().saturating_sub(1).max(1));
    let verdict = verify_subdivision(&g, &cert, t as usize, bound);
    let report = VerifyReport {
        schema: SCHEMA_VERSION,
        valid: verdict.is_ok(),
        reason: verdict.as_ref().err().map(|e| e.to_string()),
    };
    if json {
        print!("{}", json_line(&report)?);
    } else if report.valid {
        println!("valid");
    } else {
        println!("invalid: {}", report.reason.as_deref().unwrap_or(""));
    }
    Ok(if report.valid { 0 } else { 1 })
}

#[derive(Serialize)]
struct CycleReport {
    schema: &'static str,
    cycle: Option<CycleFound>,
}

#[derive(Serialize)]
struct CycleFound {
    length: usize,
    vertices: Vec<VertexId>,
    colours: Vec<rsub_core::graph::ColourId>,
}

fn run_rainbow_cycle(file: &Path, max_len: Option<usize>, json: bool) -> Result<u8> {
    let g = load_graph(file)?;
    let cap = max_len.unwrap_or(g.n());
    let found = brute_rainbow_cycle(&g, cap);
    let report = CycleReport {
        schema: SCHEMA_VERSION,
        cycle: found.map(|c| CycleFound {
            length: c.vertices.len(),
            vertices: c.vertices,
            colours: c.colours,
        }),
    };
    if json {
        print!("{}", json_line(&report)?);
    } else if let Some(c) = &report.cycle {
        println!("cycle of length {}: {}", c.length, join_display(&c.vertices));
    } else {
        println!("none");
    }
    Ok(0)
}

fn join_display<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

// ---- bench ----

#[derive(Deserialize)]
struct BenchSpec {
    #[serde(default)]
    #[allow(dead_code)]
    schema: Option<String>,
    grids: Vec<GridSpec>,
}

#[derive(Deserialize)]
struct GridSpec {
    name: String,
    generator: GenSpec,
    task: TaskSpec,
    seeds: Vec<u64>,
}

#[derive(Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum GenSpec {
    Hypercube {
        m: OneOrMany<u32>,
    },
    Random {
        n: OneOrMany<usize>,
        p: OneOrMany<f64>,
        #[serde(default = "default_rule")]
        rule: ColouringRule,
    },
    RainbowComplete {
        n: OneOrMany<usize>,
    },
    OneFactorized {
        n: OneOrMany<usize>,
    },
}

fn default_rule() -> ColouringRule {
    ColouringRule::Greedy
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum TaskSpec {
    Check,
    RainbowCycle {
        max_len: usize,
    },
    Cover {
        eps: String,
        lambda: Option<String>,
    },
    Connect {
        x: u32,
        y: u32,
        max_len: usize,
        #[serde(default = "default_eps")]
        eps: String,
    },
    Subdivision {
        t: u32,
        max_len: usize,
        #[serde(default = "default_build_eps")]
        eps: String,
    },
}

fn default_eps() -> String {
    "1/4".into()
}

fn default_build_eps() -> String {
    "1/40".into()
}

/// One instance to run: a fully resolved generator cell plus a seed.
struct BenchJob {
    grid: usize,
    cell: usize,
    seed: u64,
    cell_label: String,
}

type GraphMaker = Box<dyn Fn(u64) -> Result<ColouredGraph> + Sync + Send>;

/// (grid index, cell index, seed): the deterministic output order.
type JobKey = (usize, usize, u64);

impl GenSpec {
    /// Resolved cells in declaration order, as (label, builder) pairs.
    fn cells(&self) -> Vec<(String, GraphMaker)> {
        match self {
            GenSpec::Hypercube { m } => m
                .values()
                .into_iter()
                .map(|m| {
                    let label = format!("m={m}");
                    let f: GraphMaker = Box::new(move |_| Ok(gen_hypercube(m)?));
                    (label, f)
                })
                .collect(),
            GenSpec::Random { n, p, rule } => {
                let rule = *rule;
                let mut cells = Vec::new();
                for n in n.values() {
                    for p in p.values() {
                        let label = format!("n={n};p={p}");
                        let f: GraphMaker =
                            Box::new(move |seed| Ok(gen_random_proper(n, p, rule, seed)?));
                        cells.push((label, f));
                    }
                }
                cells
            }
            GenSpec::RainbowComplete { n } => n
                .values()
                .into_iter()
                .map(|n| {
                    let label = format!("n={n}");
                    let f: GraphMaker = Box::new(move |_| Ok(gen_rainbow_complete(n)?));
                    (label, f)
                })
                .collect(),
            GenSpec::OneFactorized { n } => n
                .values()
                .into_iter()
                .map(|n| {
                    let label = format!("n={n}");
                    let f: GraphMaker = Box::new(move |_| Ok(gen_one_factorized_complete(n)?));
                    (label, f)
                })
                .collect(),
        }
    }
}

impl TaskSpec {
    fn name(&self) -> &'static str {
        match self {
            TaskSpec::Check => "check",
            TaskSpec::RainbowCycle { .. } => "rainbow-cycle",
            TaskSpec::Cover { .. } => "cover",
            TaskSpec::Connect { .. } => "connect",
            TaskSpec::Subdivision { .. } => "subdivision",
        }
    }

    /// Runs the task; returns (outcome, detail).
    fn run(&self, g: &ColouredGraph, seed: u64) -> Result<(String, String)> {
        match self {
            TaskSpec::Check => Ok(("ok".into(), format!("k={}", g.k()))),
            TaskSpec::RainbowCycle { max_len } => Ok(match brute_rainbow_cycle(g, *max_len) {
                Some(c) => ("cycle".into(), format!("len={}", c.vertices.len())),
                None => ("none".into(), String::new()),
            }),
            TaskSpec::Cover { eps, lambda } => {
                let eps = parse_rat("eps", eps)?;
                let lambda = match lambda {
                    Some(l) => parse_rat("lambda", l)?,
                    None => paper_lambda(eps, g.n().max(2) as u64),
                };
                let report = cover_report(g, eps, lambda)?;
                Ok((
                    "ok".into(),
                    format!(
                        "pieces={};covered={}",
                        report.pieces.len(),
                        report.covered_fraction
                    ),
                ))
            }
            TaskSpec::Connect { x, y, max_len, eps } => {
                let eps = parse_rat("eps", eps)?;
                let lambda = paper_lambda(eps, g.n().max(2) as u64);
                let view = g.full_view();
                let avoid = AvoidSet::empty(g);
                let params = ConnectParams::new(*max_len, lambda, eps);
                let out = rainbow_connect(&view, VertexId(*x), VertexId(*y), &avoid, &params, seed)?;
                Ok(match out.path {
                    Some(p) => ("ok".into(), format!("len={}", p.len())),
                    None => (
                        "fail".into(),
                        format!("stage={:?}", out.transcript.failure),
                    ),
                })
            }
            TaskSpec::Subdivision { t, max_len, eps } => {
                let eps = parse_rat("eps", eps)?;
                let c = default_c(eps);
                let view = g.full_view();
                let out = find_rainbow_subdivision(
                    &view,
                    *t,
                    eps,
                    c,
                    SearchMode::Practical { max_len: *max_len },
                    seed,
                    None,
                )?;
                Ok(match out.result {
                    Ok(cert) => {
                        verify_subdivision(g, &cert, *t as usize, (4 * *max_len).max(1))
                            .map_err(|e| anyhow!("bad certificate from the pipeline: {e}"))?;
                        ("ok".into(), format!("paths={}", cert.paths.len()))
                    }
                    Err(f) => ("fail".into(), describe_failure(&f).replace(',', ";")),
                })
            }
        }
    }
}

fn bench_threads(jobs: usize) -> usize {
    let avail = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cap = std::env::var("RS_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(avail);
    cap.min(jobs).max(1)
}

fn run_bench(spec_path: &Path, timing: bool, out: Option<&Path>) -> Result<u8> {
    let text = std::fs::read_to_string(spec_path)
        .with_context(|| format!("reading {}", spec_path.display()))?;
    let spec: BenchSpec =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", spec_path.display()))?;

    // resolve all cells up front, in declaration order
    let mut jobs: Vec<BenchJob> = Vec::new();
    let mut grids = Vec::new();
    for (gi, grid) in spec.grids.iter().enumerate() {
        let cells = grid.generator.cells();
        for (ci, (label, make)) in cells.into_iter().enumerate() {
            for &seed in &grid.seeds {
                jobs.push(BenchJob {
                    grid: gi,
                    cell: ci,
                    seed,
                    cell_label: label.clone(),
                });
            }
            grids.push(((gi, ci), make));
        }
    }
    let makers: std::collections::HashMap<(usize, usize), _> = grids.into_iter().collect();

    let results: Mutex<Vec<(JobKey, String)>> = Mutex::new(Vec::new());
    let next: Mutex<usize> = Mutex::new(0);
    let workers = bench_threads(jobs.len());
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for _ in 0..workers {
            handles.push(scope.spawn(|| -> Result<()> {
                loop {
                    let i = {
                        let mut guard = next.lock().expect("queue lock");
                        let i = *guard;
                        *guard += 1;
                        i
                    };
                    if i >= jobs.len() {
                        return Ok(());
                    }
                    let job = &jobs[i];
                    let grid = &spec.grids[job.grid];
                    let make = &makers[&(job.grid, job.cell)];
                    let started = Instant::now();
                    let g = make(job.seed)?;
                    let view = g.full_view();
                    let avg = view.avg_degree().unwrap_or_else(|| ratio(0, 1));
                    let (outcome, detail) = grid.task.run(&g, job.seed)?;
                    let mut row = format!(
                        "{},{},{},{},{},{},{},{},{}",
                        grid.name,
                        job.cell_label,
                        job.seed,
                        g.n(),
                        g.m(),
                        fmt_rational(avg),
                        grid.task.name(),
                        outcome,
                        detail
                    );
                    if timing {
                        write!(row, ",{}", started.elapsed().as_millis()).expect("string write");
                    }
                    results
                        .lock()
                        .expect("results lock")
                        .push(((job.grid, job.cell, job.seed), row));
                }
            }));
        }
        for h in handles {
            h.join().expect("bench worker panicked")?;
        }
        Ok(())
    })?;

    let mut rows = results.into_inner().expect("results lock");
    rows.sort_by_key(|row| row.0);
    let mut csv = String::from("grid,cell,seed,n,e,avg_degree,task,outcome,detail");
    if timing {
        csv.push_str(",wall_ms");
    }
    csv.push('\n');
    for (_, row) in rows {
        csv.push_str(&row);
        csv.push('\n');
    }
    emit(out, &csv)?;
    Ok(0)
}
