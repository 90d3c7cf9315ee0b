//! Replay of update streams and backend comparisons, with timing and
//! residual bookkeeping.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::engine::{exact_solve, residual, residual_ratio, Backend, ConsistencyReport, EngineConfig};
use crate::error::{Error, Result};
use crate::graphstore::DynamicGraph;
use crate::io::fmt_real;
use crate::numkit::DenseVector;
use crate::session::{Session, UpdateRecord};

#[derive(Debug, Clone, Copy)]
pub struct ReplayOptions {
    /// Run the consistency check after every this many updates (0 = never).
    pub verify_every: usize,
    pub verify_tolerance: f64,
    /// Compare against the exact solution after every this many updates
    /// (0 = never). Costs a full SVD each time.
    pub residual_every: usize,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        Self {
            verify_every: 0,
            verify_tolerance: crate::engine::DEFAULT_VERIFY_TOLERANCE,
            residual_every: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateMetric {
    pub index: usize,
    pub op: String,
    /// Graph delta plus engine update.
    pub wall_ns: u64,
    pub pairs: usize,
    pub sketch_rows: usize,
    pub rebuilt: bool,
    pub residual_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyEvent {
    pub index: usize,
    pub report: ConsistencyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: EngineConfig,
    pub m: usize,
    pub n_initial: usize,
    pub preprocess_ns: u64,
    pub updates: Vec<UpdateMetric>,
    pub verifications: Vec<VerifyEvent>,
}

impl BenchReport {
    pub fn median_update_ns(&self) -> Option<f64> {
        median(self.updates.iter().map(|u| u.wall_ns as f64).collect())
    }

    pub fn rebuilds(&self) -> usize {
        self.updates.iter().filter(|u| u.rebuilt).count()
    }

    pub fn residual_ratios(&self) -> Vec<f64> {
        self.updates.iter().filter_map(|u| u.residual_ratio).collect()
    }
}

#[derive(Debug)]
pub enum ReplayError {
    /// Building the initial session failed.
    Setup(Error),
    /// Record `index` could not be applied.
    Update { index: usize, source: Error },
    /// The consistency check after record `index` failed.
    Consistency {
        index: usize,
        report: ConsistencyReport,
    },
}

impl std::fmt::Display for ReplayError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReplayError::Setup(e) => write!(f, "setup: {e}"),
            ReplayError::Update { index, source } => write!(f, "record {index}: {source}"),
            ReplayError::Consistency { index, report } => write!(
                f,
                "consistency check after record {index} failed: worst deviation {:e} > {:e}",
                report.worst(),
                report.tolerance
            ),
        }
    }
}

impl std::error::Error for ReplayError {}

fn op_name(rec: &UpdateRecord) -> &'static str {
    match rec {
        UpdateRecord::EdgeInsert { .. } => "edge_insert",
        UpdateRecord::EdgeDelete { .. } => "edge_delete",
        UpdateRecord::NodeInsert { .. } => "node_insert",
        UpdateRecord::NodeDelete { .. } => "node_delete",
    }
}

fn current_ratio(s: &Session<f64>) -> Result<f64> {
    let m = s.design();
    let b = s.measured();
    let x = exact_solve(&m, b)?;
    let opt = residual(&m, b, &x)?;
    let got = residual(&m, b, s.state().x_approx())?;
    Ok(residual_ratio(got, opt, b.norm()))
}

/// Applies `records` in order. Indices in errors and metrics are 0-based.
pub fn replay(
    session: &mut Session<f64>,
    records: &[UpdateRecord],
    opts: &ReplayOptions,
    preprocess_ns: u64,
) -> std::result::Result<BenchReport, ReplayError> {
    let mut report = BenchReport {
        config: session.state().config().clone(),
        m: session.store().m(),
        n_initial: session.graph().len(),
        preprocess_ns,
        updates: Vec::with_capacity(records.len()),
        verifications: Vec::new(),
    };
    for (index, rec) in records.iter().enumerate() {
        let start = Instant::now();
        let applied = session
            .apply(rec)
            .map_err(|source| ReplayError::Update { index, source })?;
        let wall_ns = start.elapsed().as_nanos() as u64;
        let count = index + 1;
        let residual_ratio = if opts.residual_every > 0 && count % opts.residual_every == 0 {
            Some(current_ratio(session).map_err(|source| ReplayError::Update { index, source })?)
        } else {
            None
        };
        report.updates.push(UpdateMetric {
            index,
            op: op_name(rec).to_string(),
            wall_ns,
            pairs: applied.delta.k(),
            sketch_rows: session.state().sketch_rows(),
            rebuilt: applied.outcome.rebuilt,
            residual_ratio,
        });
        if opts.verify_every > 0 && count % opts.verify_every == 0 {
            let rep = session
                .verify(opts.verify_tolerance)
                .map_err(|source| ReplayError::Update { index, source })?;
            report.verifications.push(VerifyEvent { index, report: rep });
            if !rep.passed {
                return Err(ReplayError::Consistency { index, report: rep });
            }
        }
    }
    Ok(report)
}

/// Builds a session and replays `records`, timing the preprocessing.
pub fn run(
    graph: &DynamicGraph,
    b: &[f64],
    m: usize,
    config: &EngineConfig,
    records: &[UpdateRecord],
    opts: &ReplayOptions,
) -> std::result::Result<(Session<f64>, BenchReport), ReplayError> {
    let start = Instant::now();
    let mut session = Session::new(graph.clone(), DenseVector::from_vec(b.to_vec()), m, config)
        .map_err(ReplayError::Setup)?;
    let pre = start.elapsed().as_nanos() as u64;
    let report = replay(&mut session, records, opts, pre)?;
    Ok((session, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendSummary {
    pub backend: Backend,
    pub runs: usize,
    pub median_update_ns: Option<f64>,
    pub median_preprocess_ns: Option<f64>,
    pub sketch_rows: usize,
    pub rebuilds: usize,
    pub ratio_min: Option<f64>,
    pub ratio_median: Option<f64>,
    pub ratio_max: Option<f64>,
}

/// The `ln n` against `1/ε` rule for which sketch should update faster,
/// next to what the timings showed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub ln_n: f64,
    pub inv_eps: f64,
    pub predicted_faster: Backend,
    pub observed_faster: Option<Backend>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub runs: Vec<BenchReport>,
    pub backends: Vec<BackendSummary>,
    pub crossover: Crossover,
}

pub struct BenchSpec {
    pub backends: Vec<Backend>,
    pub seeds: Vec<u64>,
    pub base: EngineConfig,
    pub options: ReplayOptions,
}

/// Runs every `(backend, seed)` pair over the same stream, one after the
/// other so timings do not compete for cores.
pub fn bench(
    graph: &DynamicGraph,
    b: &[f64],
    m: usize,
    records: &[UpdateRecord],
    spec: &BenchSpec,
) -> std::result::Result<BenchSummary, ReplayError> {
    let mut runs = Vec::new();
    for &backend in &spec.backends {
        for &seed in &spec.seeds {
            let config = EngineConfig {
                backend,
                seed,
                ..spec.base.clone()
            };
            let (_, report) = run(graph, b, m, &config, records, &spec.options)?;
            runs.push(report);
        }
    }
    let backends: Vec<BackendSummary> = spec
        .backends
        .iter()
        .map(|&backend| summarize(backend, &runs))
        .collect();
    let ln_n = (graph.len().max(1) as f64).ln();
    let inv_eps = 1.0 / spec.base.eps;
    let time_of = |b: Backend| {
        backends
            .iter()
            .find(|s| s.backend == b)
            .and_then(|s| s.median_update_ns)
    };
    let observed_faster = match (time_of(Backend::Srht), time_of(Backend::CountSketch)) {
        (Some(s), Some(c)) => Some(if s <= c {
            Backend::Srht
        } else {
            Backend::CountSketch
        }),
        _ => None,
    };
    Ok(BenchSummary {
        runs,
        backends,
        crossover: Crossover {
            ln_n,
            inv_eps,
            predicted_faster: if ln_n < inv_eps {
                Backend::Srht
            } else {
                Backend::CountSketch
            },
            observed_faster,
        },
    })
}

fn summarize(backend: Backend, runs: &[BenchReport]) -> BackendSummary {
    let mine: Vec<&BenchReport> = runs.iter().filter(|r| r.config.backend == backend).collect();
    let times = mine
        .iter()
        .flat_map(|r| r.updates.iter().map(|u| u.wall_ns as f64))
        .collect();
    let mut ratios: Vec<f64> = mine.iter().flat_map(|r| r.residual_ratios()).collect();
    ratios.sort_by(f64::total_cmp);
    BackendSummary {
        backend,
        runs: mine.len(),
        median_update_ns: median(times),
        median_preprocess_ns: median(mine.iter().map(|r| r.preprocess_ns as f64).collect()),
        sketch_rows: mine
            .first()
            .and_then(|r| r.updates.first().map(|u| u.sketch_rows))
            .unwrap_or(0),
        rebuilds: mine.iter().map(|r| r.rebuilds()).sum(),
        ratio_min: ratios.first().copied(),
        ratio_median: median(ratios.clone()),
        ratio_max: ratios.last().copied(),
    }
}

pub fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    })
}

/// Pretty JSON for a bench summary.
pub fn summary_json(summary: &BenchSummary) -> Result<String> {
    serde_json::to_string_pretty(summary).map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn opt_real(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

pub const CSV_HEADER: &str =
    "backend,seed,index,op,wall_ns,pairs,sketch_rows,rebuilt,residual_ratio";

/// One JSON object per update, each tagged with backend and seed.
pub fn write_jsonl(report: &BenchReport, mut w: impl Write) -> Result<()> {
    for u in &report.updates {
        let line = serde_json::json!({
            "backend": report.config.backend,
            "seed": report.config.seed,
            "index": u.index,
            "op": u.op,
            "wall_ns": u.wall_ns,
            "pairs": u.pairs,
            "sketch_rows": u.sketch_rows,
            "rebuilt": u.rebuilt,
            "residual_ratio": u.residual_ratio.map(fmt_real),
        });
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_csv(report: &BenchReport, mut w: impl Write, header: bool) -> Result<()> {
    if header {
        writeln!(w, "{CSV_HEADER}")?;
    }
    for u in &report.updates {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            report.config.backend,
            report.config.seed,
            u.index,
            u.op,
            u.wall_ns,
            u.pairs,
            u.sketch_rows,
            u.rebuilt,
            opt_real(u.residual_ratio)
        )?;
    }
    Ok(())
}

/// Mix of operations drawn by [`random_stream`], as relative weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamMix {
    pub edge_insert: u32,
    pub edge_delete: u32,
    pub node_insert: u32,
    pub node_delete: u32,
}

impl StreamMix {
    pub const EDGES_ONLY: StreamMix = StreamMix {
        edge_insert: 1,
        edge_delete: 1,
        node_insert: 0,
        node_delete: 0,
    };
    pub const MIXED: StreamMix = StreamMix {
        edge_insert: 4,
        edge_delete: 4,
        node_insert: 1,
        node_delete: 1,
    };
}

/// A seeded stream of `count` records, each valid against the graph left by
/// the ones before it. Inserted nodes get fresh ids above the current
/// maximum and up to three neighbours; deleted nodes have degree at most
/// `max_node_edges`. A draw that is impossible (no edge to delete, say)
/// falls back to an edge insertion, or is skipped when that is impossible
/// too.
pub fn random_stream(
    graph: &DynamicGraph,
    count: usize,
    seed: u64,
    mix: StreamMix,
    max_node_edges: usize,
) -> Vec<UpdateRecord> {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut g = graph.clone();
    let mut next_id = g.node_ids().max().unwrap_or(0) + 1;
    let mut out = Vec::with_capacity(count);
    let total = mix.edge_insert + mix.edge_delete + mix.node_insert + mix.node_delete;
    assert!(total > 0, "empty stream mix");
    let mut attempts = 0;
    while out.len() < count && attempts < 50 * count + 100 {
        attempts += 1;
        let ids: Vec<u64> = g.node_ids().collect();
        let weights = [mix.edge_insert, mix.edge_delete, mix.node_insert, mix.node_delete];
        let mut roll = rng.gen_range(0..total);
        let mut kind = 0;
        while roll >= weights[kind] {
            roll -= weights[kind];
            kind += 1;
        }
        let rec = match kind {
            1 => {
                let edges: Vec<(u64, u64)> = g.edges().collect();
                edges
                    .choose(&mut rng)
                    .map(|&(u, v)| UpdateRecord::EdgeDelete { u, v })
            }
            2 => {
                let k = rng.gen_range(0..=3.min(ids.len()));
                let neighbors: Vec<u64> = ids.choose_multiple(&mut rng, k).copied().collect();
                let value = rng.gen_range(-1.0..1.0);
                next_id += 1;
                Some(UpdateRecord::NodeInsert {
                    id: next_id - 1,
                    value,
                    neighbors,
                })
            }
            3 if ids.len() > 2 => {
                let small: Vec<u64> = ids
                    .iter()
                    .copied()
                    .filter(|&id| g.degree(id).is_ok_and(|d| d <= max_node_edges))
                    .collect();
                small.choose(&mut rng).map(|&id| UpdateRecord::NodeDelete { id })
            }
            _ => None,
        };
        let rec = match rec {
            Some(r) => r,
            None => {
                if ids.len() < 2 {
                    continue;
                }
                let u = *ids.choose(&mut rng).expect("non-empty");
                let v = *ids.choose(&mut rng).expect("non-empty");
                if u == v || g.has_edge(u, v) {
                    continue;
                }
                UpdateRecord::EdgeInsert { u, v }
            }
        };
        match &rec {
            UpdateRecord::EdgeInsert { u, v } => g.add_edge(*u, *v),
            UpdateRecord::EdgeDelete { u, v } => g.remove_edge(*u, *v),
            UpdateRecord::NodeInsert { id, neighbors, .. } => g.add_node(*id).and_then(|_| {
                neighbors.iter().try_for_each(|&n| g.add_edge(*id, n))
            }),
            UpdateRecord::NodeDelete { id } => g.remove_node(*id).map(|_| ()),
        }
        .expect("generated record is valid");
        out.push(rec);
    }
    out
}
