//! `dynareg`: preprocess, replay, benchmark and verify sketched regressions
//! over dynamic graphs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use dynareg::engine::{Backend, EngineConfig, DEFAULT_VERIFY_TOLERANCE};
use dynareg::harness::{self, BenchSpec, ReplayError, ReplayOptions};
use dynareg::io;
use dynareg::sketch::SizingMode;
use dynareg::{F64Session, Vector};

#[derive(Parser)]
#[command(name = "dynareg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the embedding, sketch it and solve; write a state file.
    Preprocess(PreprocessArgs),
    /// Apply an update stream to a state file.
    Replay(ReplayArgs),
    /// Compare backends and seeds over one update stream.
    Bench(BenchArgs),
    /// Recompute a state from scratch and compare.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SketchArgs {
    #[arg(long, default_value = "countsketch")]
    backend: Backend,
    #[arg(long, default_value_t = 0.3)]
    eps: f64,
    #[arg(long, default_value = "practical")]
    mode: SizingMode,
    /// Embedding width; defaults to the graph file header.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args)]
struct PreprocessArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    values: PathBuf,
    #[command(flatten)]
    sketch: SketchArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    updates: PathBuf,
    #[arg(long, default_value_t = 0)]
    verify_every: usize,
    /// Where to write the updated state; defaults to `--state`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report path prefix; writes `<prefix>.jsonl` and `<prefix>.csv`.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Record the residual ratio against the exact solve every N updates.
    #[arg(long, default_value_t = 0)]
    residual_every: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    values: PathBuf,
    #[arg(long)]
    updates: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "srht,countsketch,exact")]
    backends: Vec<Backend>,
    #[arg(long, default_value_t = 0.3)]
    eps: f64,
    #[arg(long, default_value = "practical")]
    mode: SizingMode,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "seed", value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    verify_every: usize,
    #[arg(long, default_value_t = 1)]
    residual_every: usize,
    /// Report path prefix; writes `.jsonl`, `.csv` and `.summary.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long, default_value_t = DEFAULT_VERIFY_TOLERANCE)]
    tolerance: f64,
}

enum Failure {
    Validation(anyhow::Error),
    Consistency(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Validation(e)
    }
}

impl From<dynareg::Error> for Failure {
    fn from(e: dynareg::Error) -> Self {
        Failure::Validation(e.into())
    }
}

impl From<ReplayError> for Failure {
    fn from(e: ReplayError) -> Self {
        match e {
            ReplayError::Consistency { .. } => Failure::Consistency(e.to_string()),
            other => Failure::Validation(other.into()),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DYNAREG_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Preprocess(a) => preprocess(a),
        Command::Replay(a) => replay(a),
        Command::Bench(a) => bench(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Consistency(msg)) => {
            eprintln!("consistency failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Graph, values and embedding width, checked against each other.
fn load_problem(
    graph: &Path,
    values: &Path,
    m: Option<usize>,
) -> anyhow::Result<(dynareg::graphstore::DynamicGraph, Vec<f64>, usize)> {
    let (g, header_m) =
        io::read_graph(open(graph)?).with_context(|| format!("reading {}", graph.display()))?;
    let b = io::read_values(open(values)?).with_context(|| format!("reading {}", values.display()))?;
    if b.len() != g.len() {
        bail!("{} measured values for {} nodes", b.len(), g.len());
    }
    let m = m.unwrap_or(header_m);
    if m == 0 {
        bail!("--m must be positive");
    }
    Ok((g, b, m))
}

fn format_vector(x: &Vector) -> String {
    let parts: Vec<String> = x.iter().map(|&v| io::fmt_real(v)).collect();
    format!("[{}]", parts.join(", "))
}

fn save(session: &F64Session, path: &Path) -> anyhow::Result<()> {
    let mut w = create(path)?;
    io::write_session(session, &mut w)?;
    w.flush()?;
    Ok(())
}

fn load(path: &Path) -> anyhow::Result<F64Session> {
    io::read_session(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn preprocess(a: PreprocessArgs) -> Result<(), Failure> {
    let (g, b, m) = load_problem(&a.graph, &a.values, a.sketch.m)?;
    let config = EngineConfig::new(a.sketch.backend, a.sketch.eps, a.seed).with_mode(a.sketch.mode);
    let start = Instant::now();
    let session = F64Session::new(g, Vector::from_vec(b), m, &config)?;
    let elapsed = start.elapsed();
    save(&session, &a.out)?;
    let st = session.state();
    println!("backend      {}", st.backend());
    println!("n            {}", st.n());
    println!("m            {m}");
    println!("sketch rows  {}", st.sketch_rows());
    println!("preprocess   {} ns", elapsed.as_nanos());
    println!("x            {}", format_vector(st.x_approx()));
    Ok(())
}

fn write_reports(prefix: &Path, reports: &[harness::BenchReport]) -> anyhow::Result<()> {
    let mut jsonl = create(&with_suffix(prefix, ".jsonl"))?;
    let mut csv = create(&with_suffix(prefix, ".csv"))?;
    for (i, r) in reports.iter().enumerate() {
        harness::write_jsonl(r, &mut jsonl)?;
        harness::write_csv(r, &mut csv, i == 0)?;
    }
    if reports.is_empty() {
        writeln!(csv, "{}", harness::CSV_HEADER)?;
    }
    jsonl.flush()?;
    csv.flush()?;
    Ok(())
}

fn replay(a: ReplayArgs) -> Result<(), Failure> {
    let mut session = load(&a.state)?;
    let records = io::read_updates(open(&a.updates)?)
        .with_context(|| format!("reading {}", a.updates.display()))?;
    let opts = ReplayOptions {
        verify_every: a.verify_every,
        residual_every: a.residual_every,
        ..ReplayOptions::default()
    };
    let report = harness::replay(&mut session, &records, &opts, 0)?;
    save(&session, a.out.as_deref().unwrap_or(&a.state))?;
    if let Some(prefix) = &a.report {
        write_reports(prefix, std::slice::from_ref(&report))?;
    }
    println!("updates      {}", report.updates.len());
    println!("rebuilds     {}", report.rebuilds());
    println!("checks       {} passed", report.verifications.len());
    if let Some(t) = report.median_update_ns() {
        println!("median       {t:.0} ns");
    }
    println!("x            {}", format_vector(session.state().x_approx()));
    Ok(())
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let (g, b, m) = load_problem(&a.graph, &a.values, a.m)?;
    let records = io::read_updates(open(&a.updates)?)
        .with_context(|| format!("reading {}", a.updates.display()))?;
    if a.backends.is_empty() || a.seeds.is_empty() {
        return Err(anyhow::anyhow!("need at least one backend and one seed").into());
    }
    let spec = BenchSpec {
        backends: a.backends,
        seeds: a.seeds,
        base: EngineConfig::new(Backend::Exact, a.eps, 0).with_mode(a.mode),
        options: ReplayOptions {
            verify_every: a.verify_every,
            residual_every: a.residual_every,
            ..ReplayOptions::default()
        },
    };
    let summary = harness::bench(&g, &b, m, &records, &spec)?;
    if let Some(prefix) = &a.out {
        write_reports(prefix, &summary.runs)?;
        let mut w = create(&with_suffix(prefix, ".summary.json"))?;
        write_summary(&mut w, &summary)?;
    }
    println!("backend      runs  rows   median_ns     ratio_min    ratio_median  ratio_max  rebuilds");
    let cell = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into());
    for s in &summary.backends {
        println!(
            "{:<12} {:>4}  {:>5}  {:>10}  {:>12}  {:>12}  {:>9}  {:>8}",
            s.backend.name(),
            s.runs,
            s.sketch_rows,
            s.median_update_ns.map(|t| format!("{t:.0}")).unwrap_or_else(|| "-".into()),
            cell(s.ratio_min),
            cell(s.ratio_median),
            cell(s.ratio_max),
            s.rebuilds
        );
    }
    let c = &summary.crossover;
    println!(
        "ln n = {:.3}, 1/eps = {:.3}: rule favours {}; observed {}",
        c.ln_n,
        c.inv_eps,
        c.predicted_faster,
        c.observed_faster
            .map(|b| b.to_string())
            .unwrap_or_else(|| "n/a (needs srht and countsketch)".into())
    );
    Ok(())
}

fn write_summary(w: &mut impl Write, summary: &harness::BenchSummary) -> anyhow::Result<()> {
    let text = harness::summary_json(summary)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let session = load(&a.state)?;
    let rep = session.verify(a.tolerance)?;
    println!("sm           {:e}", rep.sm);
    println!("sm_pinv      {:e}", rep.sm_pinv);
    println!("sb           {:e}", rep.sb);
    println!("x_approx     {:e}", rep.x_approx);
    println!("penrose      {:e}", rep.penrose);
    if rep.passed {
        println!("pass");
        Ok(())
    } else {
        Err(Failure::Consistency(format!(
            "worst deviation {:e} exceeds {:e}",
            rep.worst(),
            rep.tolerance
        )))
    }
}
