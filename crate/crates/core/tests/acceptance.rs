//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. All tolerances and budgets are fixed below.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use common::*;
use dynareg::engine::{exact_solve, residual, Backend, EngineConfig, RegressionState};
use dynareg::graphstore::{build_embedding, generators, DynamicGraph, GraphStore, NodeId};
use dynareg::harness::{random_stream, run, ReplayOptions, StreamMix};
use dynareg::io::write_session;
use dynareg::numkit::{
    fwht_normalized, meyer_update_with_case, numerical_rank, penrose_defects, svd, DenseMatrix,
    MeyerCase,
};
use dynareg::session::{Session, UpdateRecord};
use dynareg::sketch::CountSketch;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MEYER_PER_CASE: usize = 100;
const MEYER_RTOL: f64 = 1e-8;

const EMBED_GRAPHS: u64 = 200;
const EMBED_MAX_N: usize = 200;
const EMBED_OPS: usize = 50;

const CONSISTENCY_N: usize = 256;
const CONSISTENCY_UPDATES: usize = 500;
const CONSISTENCY_EVERY: usize = 10;
const CONSISTENCY_TOL: f64 = 1e-8;

const QUALITY_N: usize = 1024;
const QUALITY_M: usize = 4;
const QUALITY_EPS: f64 = 0.3;
const QUALITY_TRIALS: usize = 100;
const SRHT_NEEDED: usize = 80;
const COUNTSKETCH_NEEDED: usize = 67;
const MAX_DOUBLINGS: u32 = 4;

const SCALING_SMALL: usize = 1 << 10;
const SCALING_LARGE: usize = 1 << 14;
const SCALING_CS_UPDATES: usize = 300;
const SCALING_EXACT_UPDATES: usize = 40;
const CS_GROWTH_MAX: f64 = 3.0;
const EXACT_GROWTH_MIN: f64 = 8.0;

const PENROSE_TOL: f64 = 1e-8;
const INVARIANT_TOL: f64 = 1e-12;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 6] = [
        ("meyer update against svd pseudoinverse", Duration::from_secs(10), meyer_oracle),
        ("embedding patches against full rebuild", Duration::from_secs(120), embedding_oracle),
        ("incremental against from-scratch state", Duration::from_secs(300), consistency),
        ("residual quality rates", Duration::from_secs(600), residual_quality),
        ("update cost scaling", Duration::from_secs(600), scaling),
        ("structural invariants", Duration::from_secs(60), invariants),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let passed = out.passed && took <= *budget;
        failed += usize::from(!passed);
        println!(
            "criterion {}: {} {name}: {} [{:.1}s of {}s]",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn meyer_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4d45_5945);
    let mut seen: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut worst = 0.0f64;
    let mut wrong_case = 0;
    for case in MeyerCase::ALL {
        for _ in 0..MEYER_PER_CASE {
            let (a, c, d) = meyer_instance(&mut rng, case);
            let ap = na_pinv(&a);
            let (got, took) = meyer_update_with_case(&a, &ap, &c, &d).expect("meyer update");
            let sum = rank_one_sum(&a, &c, &d);
            let want = na_pinv(&sum);
            let err = got.sub(&want).unwrap().frobenius_norm() / (1.0 + sum.frobenius_norm());
            worst = worst.max(err);
            *seen.entry(case_name(took)).or_default() += 1;
            wrong_case += usize::from(took != case);
        }
    }
    let total: usize = seen.values().sum();
    outcome(
        worst <= MEYER_RTOL && seen.len() == 6 && wrong_case == 0 && total >= 500,
        format!("{total} instances, cases {seen:?}, worst scaled error {worst:.2e} (limit {MEYER_RTOL:e})"),
    )
}

fn case_name(case: MeyerCase) -> &'static str {
    match case {
        MeyerCase::BothOutside => "both_outside",
        MeyerCase::ColumnInside => "column_inside",
        MeyerCase::ColumnInsideSingular => "column_inside_singular",
        MeyerCase::RowInside => "row_inside",
        MeyerCase::RowInsideSingular => "row_inside_singular",
        MeyerCase::BothInsideSingular => "both_inside_singular",
    }
}

fn rows_by_id(g: &DynamicGraph, m: usize) -> BTreeMap<NodeId, Vec<NodeId>> {
    let e = build_embedding(g, m);
    g.node_ids().enumerate().map(|(i, id)| (id, e.row(i).to_vec())).collect()
}

fn apply_to_store(store: &mut GraphStore, rec: &UpdateRecord) -> dynareg::graphstore::GraphDelta {
    match rec {
        UpdateRecord::EdgeInsert { u, v } => store.insert_edge(*u, *v),
        UpdateRecord::EdgeDelete { u, v } => store.delete_edge(*u, *v),
        UpdateRecord::NodeInsert { id, value, neighbors } => store.insert_node(*id, neighbors, *value),
        UpdateRecord::NodeDelete { id } => store.delete_node(*id),
    }
    .expect("generated record applies")
}

fn embedding_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x454d_4245);
    let (mut ops, mut mismatches, mut escapes, mut changed_total) = (0usize, 0usize, 0usize, 0usize);
    for trial in 0..EMBED_GRAPHS {
        let n = rng.gen_range(2..=EMBED_MAX_N);
        let m = rng.gen_range(1..=3);
        let edges = rng.gen_range(0..=3 * n);
        let g = generators::erdos_renyi(n, edges, trial);
        let mut store = GraphStore::new(g.clone(), m).unwrap();
        let records = random_stream(&g, EMBED_OPS, trial, StreamMix::MIXED, store.max_node_edges());
        for rec in &records {
            let before = rows_by_id(store.graph(), m);
            let delta = apply_to_store(&mut store, rec);
            ops += 1;
            if store.embedding() != &build_embedding(store.graph(), m) {
                mismatches += 1;
            }
            let after = rows_by_id(store.graph(), m);
            let q: BTreeSet<NodeId> = delta.candidates.iter().copied().collect();
            let changed: BTreeSet<NodeId> = before
                .iter()
                .filter(|(id, row)| after.get(id).is_some_and(|r| r != *row))
                .map(|(id, _)| *id)
                .collect();
            changed_total += changed.len();
            if !changed.is_subset(&q) {
                escapes += 1;
            }
        }
    }
    outcome(
        mismatches == 0 && escapes == 0 && ops >= (EMBED_GRAPHS as usize) * EMBED_OPS,
        format!(
            "{EMBED_GRAPHS} graphs, {ops} ops, {changed_total} changed rows; {mismatches} rebuild mismatches, {escapes} rows outside Q"
        ),
    )
}

fn gaussian_values(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gaussian_vec(&mut rng, n).into_vec()
}

fn consistency() -> Outcome {
    let g = generators::erdos_renyi(CONSISTENCY_N, 2 * CONSISTENCY_N, 31);
    let b = gaussian_values(CONSISTENCY_N, 32);
    let records = random_stream(&g, CONSISTENCY_UPDATES, 33, StreamMix::MIXED, 16);
    let opts = ReplayOptions {
        verify_every: CONSISTENCY_EVERY,
        verify_tolerance: CONSISTENCY_TOL,
        residual_every: 0,
    };
    let mut passed = records.len() == CONSISTENCY_UPDATES;
    let mut parts = Vec::new();
    for backend in [Backend::Srht, Backend::CountSketch] {
        let config = EngineConfig::new(backend, 0.5, 34);
        match run(&g, &b, 4, &config, &records, &opts) {
            Ok((_, report)) => {
                let worst = report
                    .verifications
                    .iter()
                    .map(|v| v.report.worst())
                    .fold(0.0, f64::max);
                passed &= report.verifications.len() == CONSISTENCY_UPDATES / CONSISTENCY_EVERY;
                parts.push(format!(
                    "{backend}: {} checks, worst {worst:.2e}, {} rebuilds",
                    report.verifications.len(),
                    report.rebuilds()
                ));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("{backend}: {e}"));
            }
        }
    }
    outcome(passed, format!("{} updates, tol {CONSISTENCY_TOL:e}; {}", records.len(), parts.join("; ")))
}

/// Trial inputs: an embedding of full column rank and a Gaussian `b`.
fn quality_inputs(trials: usize) -> (Vec<(DenseMatrix<f64>, dynareg::Vector)>, usize) {
    let mut out = Vec::with_capacity(trials);
    let mut skipped = 0;
    let mut seed = 0u64;
    while out.len() < trials {
        seed += 1;
        let g = generators::erdos_renyi(QUALITY_N, 2 * QUALITY_N, 1000 + seed);
        let m = build_embedding(&g, QUALITY_M).to_dense::<f64>();
        if numerical_rank(&svd(&m).unwrap().sigma) < QUALITY_M {
            skipped += 1;
            continue;
        }
        let b = dynareg::Vector::from_vec(gaussian_values(QUALITY_N, 5000 + seed));
        out.push((m, b));
    }
    (out, skipped)
}

fn successes(inputs: &[(DenseMatrix<f64>, dynareg::Vector)], backend: Backend, rows: Option<usize>) -> (usize, usize) {
    let mut hits = 0;
    let mut size = 0;
    for (t, (m, b)) in inputs.iter().enumerate() {
        let mut config = EngineConfig::new(backend, QUALITY_EPS, 7000 + t as u64);
        if let Some(r) = rows {
            config = config.with_rows(r);
        }
        let state = RegressionState::preprocess(m, b, &config).unwrap();
        size = state.sketch_rows();
        let opt = residual(m, b, &exact_solve(m, b).unwrap()).unwrap();
        let got = residual(m, b, state.x_approx()).unwrap();
        hits += usize::from(got <= (1.0 + QUALITY_EPS) * opt);
    }
    (hits, size)
}

fn residual_quality() -> Outcome {
    let (inputs, skipped) = quality_inputs(QUALITY_TRIALS);
    let mut passed = true;
    let mut parts = vec![format!("{skipped} rank-deficient draws skipped")];
    for (backend, needed) in [(Backend::Srht, SRHT_NEEDED), (Backend::CountSketch, COUNTSKETCH_NEEDED)] {
        let (mut hits, mut size) = successes(&inputs, backend, None);
        let practical = size;
        let mut doublings = 0;
        while hits < needed && doublings < MAX_DOUBLINGS {
            doublings += 1;
            (hits, size) = successes(&inputs, backend, Some(practical << doublings));
        }
        passed &= hits >= needed;
        parts.push(format!(
            "{backend}: {hits}/{QUALITY_TRIALS} (need {needed}) at {size} rows, practical size {practical}, {doublings} doublings"
        ));
    }
    outcome(passed, parts.join("; "))
}

fn median_update_ns(n: usize, backend: Backend, updates: usize) -> f64 {
    let g = generators::erdos_renyi(n, 2 * n, 40 + n as u64);
    let b = gaussian_values(n, 41);
    let records = random_stream(&g, updates, 42, StreamMix::EDGES_ONLY, 16);
    let config = EngineConfig::new(backend, QUALITY_EPS, 43);
    let (_, report) = run(&g, &b, QUALITY_M, &config, &records, &ReplayOptions::default()).unwrap();
    report.median_update_ns().unwrap()
}

fn scaling() -> Outcome {
    let cs_small = median_update_ns(SCALING_SMALL, Backend::CountSketch, SCALING_CS_UPDATES);
    let cs_large = median_update_ns(SCALING_LARGE, Backend::CountSketch, SCALING_CS_UPDATES);
    let ex_small = median_update_ns(SCALING_SMALL, Backend::Exact, SCALING_EXACT_UPDATES);
    let ex_large = median_update_ns(SCALING_LARGE, Backend::Exact, SCALING_EXACT_UPDATES);
    let cs_growth = cs_large / cs_small;
    let ex_growth = ex_large / ex_small;
    outcome(
        cs_growth < CS_GROWTH_MAX && ex_growth > EXACT_GROWTH_MIN,
        format!(
            "countsketch {:.1}us -> {:.1}us ({cs_growth:.2}x, limit {CS_GROWTH_MAX}x); exact {:.1}us -> {:.1}us ({ex_growth:.2}x, need {EXACT_GROWTH_MIN}x)",
            cs_small / 1e3,
            cs_large / 1e3,
            ex_small / 1e3,
            ex_large / 1e3
        ),
    )
}

fn invariants() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x494e_5601);

    let mut fwht_worst = 0.0f64;
    for exp in 0..=10 {
        let v = gaussian_vec(&mut rng, 1 << exp);
        let back = fwht_normalized(&fwht_normalized(&v).unwrap()).unwrap();
        fwht_worst = fwht_worst.max(back.max_abs_diff(&v) / v.max_abs().max(1.0));
    }
    if fwht_worst > INVARIANT_TOL {
        failures.push(format!("fwht involution {fwht_worst:.1e}"));
    }

    let g = generators::erdos_renyi(96, 200, 50);
    let b = gaussian_values(96, 51);
    let records = random_stream(&g, 200, 52, StreamMix::MIXED, 16);
    let mut penrose_worst = 0.0f64;
    let mut steps = 0;
    for backend in Backend::ALL {
        let config = EngineConfig::new(backend, 0.5, 53);
        let mut s = Session::new(g.clone(), dynareg::Vector::from_vec(b.clone()), 3, &config).unwrap();
        for rec in &records {
            s.apply(rec).unwrap();
            let p = penrose_defects(s.state().sm(), s.state().sm_pinv()).unwrap();
            penrose_worst = penrose_worst.max(p.worst());
            steps += 1;
        }
    }
    if penrose_worst > PENROSE_TOL {
        failures.push(format!("penrose {penrose_worst:.1e}"));
    }

    let m = gaussian(&mut rng, 50, 4);
    let bv = gaussian_vec(&mut rng, 50);
    let x = exact_solve(&m, &bv).unwrap();
    let xp = exact_solve(&m.pad_rows(14), &bv.pad(14)).unwrap();
    let pad_err = x.max_abs_diff(&xp);
    if pad_err > INVARIANT_TOL {
        failures.push(format!("zero padding {pad_err:.1e}"));
    }

    let mut cs = CountSketch::new(40, 9, 54).unwrap();
    for _ in 0..500 {
        if cs.n() > 0 && rng.gen_bool(0.45) {
            let at = rng.gen_range(0..cs.n());
            cs.remove_column(at).unwrap();
        } else {
            cs.add_column(cs.n()).unwrap();
        }
        let dense = cs.to_dense::<f64>();
        let bad = (0..cs.n())
            .filter(|&j| (0..cs.rows()).filter(|&i| dense[(i, j)] != 0.0).count() != 1)
            .count();
        if bad > 0 {
            failures.push(format!("{bad} countsketch columns without exactly one nonzero"));
            break;
        }
    }

    let bytes = |backend: Backend| {
        let config = EngineConfig::new(backend, 0.5, 55);
        let mut s = Session::new(g.clone(), dynareg::Vector::from_vec(b.clone()), 3, &config).unwrap();
        for rec in &records[..50] {
            s.apply(rec).unwrap();
        }
        let mut out = Vec::new();
        write_session(&s, &mut out).unwrap();
        out
    };
    for backend in Backend::ALL {
        if bytes(backend) != bytes(backend) {
            failures.push(format!("{backend} state bytes differ across runs"));
        }
    }

    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "fwht {fwht_worst:.1e}, penrose worst {penrose_worst:.1e} over {steps} updates (limit {PENROSE_TOL:e}), padding {pad_err:.1e}, countsketch columns ok, state bytes identical"
            )
        } else {
            failures.join("; ")
        },
    )
}
