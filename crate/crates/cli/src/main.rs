//! `hopset`: generate graphs, build and verify hopsets, answer queries.
//!
//! Exit codes: 0 success, 1 contract violation, 2 usage error, 3 I/O or
//! parse error, 4 rejected parameters.

mod bench;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hopset_core::asp::{
    asp_for_each, extract_path_from_row, write_csv_row, write_path, CSV_HEADER,
};
use hopset_core::hopset::validate_witnesses;
use hopset_core::weight::format_ratio;
use hopset_core::{
    build_hopset_with_report, generate_graph, load_graph, parse_ratio, read_hopset, size_stats,
    verify_stretch, write_graph, write_hopset, Error, Graph, GraphModel, Hopset, HopsetParams,
    PairMode, VerificationReport, VertexId,
};
use rand::{Rng, SeedableRng};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "hopset",
    version,
    about = "Hopsets for weighted graphs: build, verify, query"
)]
struct Cli {
    /// Worker threads for per-scale builds and per-source sweeps.
    #[arg(long, global = true, env = "HOPSET_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded synthetic graph in DIMACS format.
    Gen(GenArgs),
    /// Build a hopset for a DIMACS graph.
    Build(BuildArgs),
    /// Check a hopset's (beta, eps) contract against exact distances.
    Verify(VerifyArgs),
    /// Approximate distances (and paths) from a set of sources.
    Query(QueryArgs),
    /// Size accounting for a hopset file.
    Stats(StatsArgs),
    /// Sweep parameter grids from a TOML config and emit a CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelKind {
    Er,
    Path,
    Grid,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Vertex count (er, path).
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability (er).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 1)]
    wmin: u64,
    #[arg(long, default_value_t = 1)]
    wmax: u64,
    /// Weight growth base of the path model, e.g. `2` or `3/2`.
    #[arg(long, default_value = "1")]
    base: String,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout if omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// Target stretch slack.
    #[arg(long, default_value = "0.3")]
    eps: String,
    #[arg(long, default_value_t = 2)]
    kappa: u32,
    #[arg(long, default_value = "0.5")]
    rho: String,
    #[arg(long, default_value = "reduced")]
    mode: String,
    /// Degree sequence: basic or refined.
    #[arg(long, default_value = "basic")]
    degree_mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record a witness path for every hopset edge.
    #[arg(long)]
    paths: bool,
    /// Upper bound on any finite distance (direct mode).
    #[arg(long)]
    lambda: Option<u128>,
}

impl ParamArgs {
    fn to_params(&self) -> Result<HopsetParams, Failure> {
        Ok(HopsetParams {
            kappa: self.kappa,
            rho: parse_ratio(&self.rho)?,
            eps: parse_ratio(&self.eps)?,
            seed: self.seed,
            mode: self.mode.parse()?,
            degree_mode: self.degree_mode.parse()?,
            path_reporting: self.paths,
            lambda_hint: self.lambda,
        })
    }
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(short, long)]
    graph: PathBuf,
    /// Output hopset file (stdout if omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
    /// Write the per-scale build report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum, PartialEq, Eq)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(short, long)]
    graph: PathBuf,
    #[arg(short = 'H', long)]
    hopset: PathBuf,
    /// all | sample:M[:SEED] | band:K
    #[arg(long, default_value = "all")]
    pairs: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[arg(short, long)]
    graph: PathBuf,
    #[arg(short = 'H', long)]
    hopset: PathBuf,
    /// Comma-separated 1-based vertices, `all`, or `random:K[:SEED]`.
    #[arg(long)]
    sources: String,
    /// CSV output (stdout if omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also write one extracted path per reachable (source, vertex) pair.
    #[arg(long)]
    paths: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(short = 'H', long)]
    hopset: PathBuf,
    /// Override kappa used for normalization (defaults to the recorded one).
    #[arg(long)]
    kappa: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// TOML sweep configuration.
    #[arg(short, long)]
    config: PathBuf,
    /// CSV output (stdout if omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// A failed run: message plus exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    msg: String,
}

pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_PARAM: u8 = 4;

impl Failure {
    pub fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure {
            code,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_)
            | Error::Parse { .. }
            | Error::NonPositiveWeight { .. }
            | Error::VertexOutOfRange { .. } => EXIT_IO,
            Error::Mismatch(_) => EXIT_IO,
            _ => EXIT_PARAM,
        };
        Failure::new(code, e.to_string())
    }
}

fn io_fail(path: &Path, e: io::Error) -> Failure {
    Failure::new(EXIT_IO, format!("{}: {e}", path.display()))
}

fn open_graph(path: &Path) -> Result<Graph, Failure> {
    let f = File::open(path).map_err(|e| io_fail(path, e))?;
    load_graph(BufReader::new(f)).map_err(|e| {
        let mut f: Failure = e.into();
        f.msg = format!("{}: {}", path.display(), f.msg);
        f
    })
}

fn open_hopset(path: &Path) -> Result<Hopset, Failure> {
    let f = File::open(path).map_err(|e| io_fail(path, e))?;
    read_hopset(BufReader::new(f))
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_fail(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_err(e: io::Error) -> Failure {
    Failure::new(EXIT_IO, format!("write failed: {e}"))
}

fn cmd_gen(a: &GenArgs) -> Result<(), Failure> {
    let need = |v: Option<usize>, name: &str| {
        v.ok_or_else(|| Failure::new(EXIT_USAGE, format!("--{name} is required")))
    };
    let model = match a.model {
        ModelKind::Er => GraphModel::Er {
            n: need(a.n, "n")?,
            p: a.p
                .ok_or_else(|| Failure::new(EXIT_USAGE, "--p is required for er"))?,
            wmin: a.wmin,
            wmax: a.wmax,
        },
        ModelKind::Path => GraphModel::Path {
            n: need(a.n, "n")?,
            base: parse_ratio(&a.base)?,
        },
        ModelKind::Grid => GraphModel::Grid {
            rows: need(a.rows, "rows")?,
            cols: need(a.cols, "cols")?,
            wmin: a.wmin,
            wmax: a.wmax,
        },
    };
    let g = generate_graph(&model, a.seed)?;
    let comments = vec![
        format!("model {}", model.describe()),
        format!("seed {}", a.seed),
        format!("graph {}", g.digest()),
    ];
    write_graph(&g, &comments, output(&a.out)?)?;
    Ok(())
}

fn cmd_build(a: &BuildArgs) -> Result<(), Failure> {
    let params = a.params.to_params()?;
    params.validate()?;
    let g = open_graph(&a.graph)?;
    let (h, report) = build_hopset_with_report(&g, &params)?;
    write_hopset(&h, output(&a.out)?)?;
    if let Some(p) = &a.report {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(p, json + "\n").map_err(|e| io_fail(p, e))?;
    }
    eprintln!(
        "built {} edges ({} star-set) over {} scales; effective beta {}, eps {}",
        h.len(),
        report.s_edges,
        report.scales.iter().filter(|s| !s.trivial).count(),
        h.effective_beta,
        format_ratio(&h.effective_eps)
    );
    Ok(())
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    version: u32,
    graph: String,
    graph_digest: String,
    hopset: String,
    hopset_params: Option<String>,
    witness_issues: usize,
    passed: bool,
    report: &'a VerificationReport,
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8, Failure> {
    let mode: PairMode = a.pairs.parse()?;
    let g = open_graph(&a.graph)?;
    let h = open_hopset(&a.hopset)?;
    let digest = g.digest();
    if let Some(p) = &h.provenance {
        if p.graph_digest != digest {
            return Err(Failure::new(
                EXIT_IO,
                "hopset was built for a different graph (digest mismatch)",
            ));
        }
    }
    let report = verify_stretch(&g, &h, mode)?;
    let witness_issues = if h.edges.iter().any(|e| e.witness.is_some()) {
        validate_witnesses(&g, &h).len()
    } else {
        0
    };
    let passed = report.passed() && witness_issues == 0;
    let mut out = output(&a.out)?;
    match a.format {
        Format::Json => {
            let doc = VerifyOutput {
                version: 1,
                graph: a.graph.display().to_string(),
                graph_digest: digest,
                hopset: a.hopset.display().to_string(),
                hopset_params: h.provenance.as_ref().map(|p| p.params.to_header()),
                witness_issues,
                passed,
                report: &report,
            };
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializes")
            )
            .map_err(write_err)?;
        }
        Format::Text => {
            let rows = [
                (
                    "graph",
                    format!(
                        "{} ({} vertices, {} edges)",
                        a.graph.display(),
                        g.n(),
                        g.m()
                    ),
                ),
                ("graph digest", digest),
                (
                    "params",
                    h.provenance
                        .as_ref()
                        .map_or("-".into(), |p| p.params.to_header()),
                ),
                ("pairs", report.pair_mode.clone()),
                (
                    "contract",
                    format!(
                        "beta={} eps={}",
                        report.effective_beta, report.effective_eps
                    ),
                ),
                ("pairs checked", report.pairs_checked.to_string()),
                (
                    "max stretch",
                    report.max_stretch.clone().unwrap_or("-".into()),
                ),
                ("violations", report.violations.len().to_string()),
                (
                    "empirical hopbound",
                    report
                        .empirical_hopbound
                        .map_or("> beta".into(), |x| x.to_string()),
                ),
                ("hopset edges", report.sizes.total.to_string()),
                ("witness issues", witness_issues.to_string()),
                ("wall time", format!("{:.1} ms", report.wall_time_ms)),
                ("result", if passed { "PASS".into() } else { "FAIL".into() }),
            ];
            for (k, v) in rows {
                writeln!(out, "{k:<20} {v}").map_err(write_err)?;
            }
            for v in report.violations.iter().take(20) {
                writeln!(
                    out,
                    "violation {} {} d_G={} d_beta={} stretch={}",
                    v.u + 1,
                    v.v + 1,
                    v.d_g,
                    v.d_limited.as_deref().unwrap_or("inf"),
                    v.stretch.as_deref().unwrap_or("inf")
                )
                .map_err(write_err)?;
            }
        }
    }
    out.flush().map_err(write_err)?;
    Ok(if passed { 0 } else { EXIT_VIOLATION })
}

fn parse_sources(spec: &str, n: usize) -> Result<Vec<VertexId>, Failure> {
    let bad = |m: String| Failure::new(EXIT_PARAM, m);
    if spec == "all" {
        return Ok((0..n as VertexId).collect());
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        let mut it = rest.split(':');
        let k: usize = it
            .next()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| bad(format!("bad source spec `{spec}`")))?;
        let seed: u64 = it
            .next()
            .map_or(Ok(0), |x| x.parse())
            .map_err(|_| bad(format!("bad source spec `{spec}`")))?;
        if k > n {
            return Err(bad(format!(
                "cannot draw {k} distinct sources from {n} vertices"
            )));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<VertexId> = Vec::with_capacity(k);
        while out.len() < k {
            let s = rng.gen_range(0..n) as VertexId;
            if !out.contains(&s) {
                out.push(s);
            }
        }
        return Ok(out);
    }
    spec.split(',')
        .map(|t| {
            let v: usize = t
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad source `{t}`")))?;
            if v == 0 || v > n {
                return Err(bad(format!("source {v} outside [1, {n}]")));
            }
            Ok(v as VertexId - 1)
        })
        .collect()
}

fn cmd_query(a: &QueryArgs) -> Result<(), Failure> {
    let g = open_graph(&a.graph)?;
    let h = open_hopset(&a.hopset)?;
    let sources = parse_sources(&a.sources, g.n())?;
    if a.paths.is_some() && !h.is_path_reporting() {
        return Err(Error::NotPathReporting.into());
    }
    let mut out = output(&a.out)?;
    let mut paths_out = match &a.paths {
        Some(p) => Some(BufWriter::new(File::create(p).map_err(|e| io_fail(p, e))?)),
        None => None,
    };
    writeln!(
        out,
        "# graph {} hopset {}",
        g.digest(),
        h.provenance
            .as_ref()
            .map_or("-".into(), |p| p.params.to_header())
    )
    .map_err(write_err)?;
    writeln!(out, "{CSV_HEADER}").map_err(write_err)?;
    asp_for_each(&g, &h, &sources, |row| {
        write_csv_row(row, h.denom, &mut out)?;
        if let Some(po) = paths_out.as_mut() {
            for v in 0..g.n() as VertexId {
                if row.dist[v as usize].is_finite() {
                    let (p, _) = extract_path_from_row(&g, &h, row, v)?;
                    write_path(&p, po)?;
                }
            }
        }
        Ok(())
    })?;
    out.flush().map_err(write_err)?;
    if let Some(mut po) = paths_out {
        po.flush().map_err(write_err)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct StatsOutput {
    n: usize,
    effective_beta: u64,
    effective_eps: String,
    params: Option<String>,
    sizes: hopset_core::verify::SizeStats,
    s_within_bound: bool,
}

fn cmd_stats(a: &StatsArgs) -> Result<u8, Failure> {
    let h = open_hopset(&a.hopset)?;
    let kappa = a
        .kappa
        .or(h.provenance.as_ref().map(|p| p.params.kappa))
        .unwrap_or(2);
    let sizes = size_stats(&h, h.n, kappa);
    let doc = StatsOutput {
        n: h.n,
        effective_beta: h.effective_beta,
        effective_eps: format_ratio(&h.effective_eps),
        params: h.provenance.as_ref().map(|p| p.params.to_header()),
        s_within_bound: sizes.s_edges as f64 <= sizes.s_bound,
        sizes,
    };
    let mut out = io::stdout().lock();
    match a.format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&doc).expect("serializes")
        )
        .map_err(write_err)?,
        Format::Text => {
            writeln!(out, "vertices           {}", doc.n).map_err(write_err)?;
            writeln!(
                out,
                "contract           beta={} eps={}",
                doc.effective_beta, doc.effective_eps
            )
            .map_err(write_err)?;
            writeln!(
                out,
                "params             {}",
                doc.params.as_deref().unwrap_or("-")
            )
            .map_err(write_err)?;
            writeln!(out, "edges              {}", doc.sizes.total).map_err(write_err)?;
            writeln!(
                out,
                "normalized size    {:.6}  (|H| / n^(1+1/kappa) ln n, kappa={kappa})",
                doc.sizes.normalized
            )
            .map_err(write_err)?;
            writeln!(
                out,
                "star-set edges     {} (bound n log2 n = {:.1})",
                doc.sizes.s_edges, doc.sizes.s_bound
            )
            .map_err(write_err)?;
            for (kind, c) in &doc.sizes.per_kind {
                writeln!(out, "kind {kind:<13} {c}").map_err(write_err)?;
            }
            for (k, c) in &doc.sizes.per_scale {
                writeln!(out, "scale {k:<12} {c}").map_err(write_err)?;
            }
        }
    }
    Ok(if doc.s_within_bound {
        0
    } else {
        EXIT_VIOLATION
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(Failure::new(EXIT_USAGE, "--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    }
    match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| 0),
        Command::Build(a) => cmd_build(a).map(|_| 0),
        Command::Verify(a) => cmd_verify(a),
        Command::Query(a) => cmd_query(a).map(|_| 0),
        Command::Stats(a) => cmd_stats(a),
        Command::Bench(a) => bench::run(&a.config, output(&a.out)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
