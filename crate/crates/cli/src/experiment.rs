use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Result;
use metricdim::discretization::{
    check_expansion, check_remark_bounds, check_scale_lower_bound, check_scale_preservation, discretize,
    random_sparse_tuple,
};
use metricdim::embedding::evidence_experiment;
use metricdim::graph::growth_experiment;
use metricdim::seeding::{derive_rng, derive_seed};
use serde::Serialize;

use crate::config::{DiscretizationExperiment, ExperimentConfig, Kind};
use crate::io::{csv_bytes, json_bytes, write_atomic};

#[derive(Serialize)]
struct GrowthRow {
    fingerprint: String,
    graph_seed: u64,
    vertex: usize,
    t: f64,
    radius: usize,
    threshold: f64,
    pass: bool,
}

#[derive(Serialize)]
struct EvidenceRow {
    fingerprint: String,
    n: usize,
    beta: f64,
    #[serde(rename = "M")]
    m: usize,
    dim: usize,
    best_alpha: f64,
    seed: u64,
    wall_time_ms: u64,
    graph: usize,
    sparse_event: bool,
}

#[derive(Serialize)]
struct DiscretizationRow {
    fingerprint: String,
    trial: usize,
    seed: u64,
    remark_violations: usize,
    expansion_violations: usize,
    preservation_violations: usize,
    lower_bound_violations: usize,
    max_count_ratio: f64,
    wall_time_ms: u64,
    pass: bool,
}

/// Written next to the CSV; holds no timing so reruns are byte-identical.
#[derive(Serialize)]
struct Summary {
    fingerprint: String,
    kind: &'static str,
    config: ExperimentConfig,
    rows: usize,
    violations: usize,
    log_base: &'static str,
    details: serde_json::Value,
}

pub struct RunReport {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub violations: usize,
}

/// Default output location: one directory per config fingerprint.
pub fn default_csv(out_dir: &Path, cfg: &ExperimentConfig) -> Result<PathBuf> {
    let fp = cfg.fingerprint();
    Ok(out_dir
        .join(format!("{}-{}", cfg.kind()?.name(), &fp[..12]))
        .join("results.csv"))
}

pub fn run(cfg: &ExperimentConfig, csv_path: &Path) -> Result<RunReport> {
    cfg.validate()?;
    let fp = cfg.fingerprint();
    let kind = cfg.kind()?;
    let (csv, rows, violations, details) = match kind {
        Kind::Growth => {
            let g = cfg.growth.as_ref().unwrap();
            eprintln!("growth: {} graphs at n = {}, M = {}", g.graphs, g.n, g.m);
            let out = growth_experiment(g, cfg.seed)?;
            let rows: Vec<GrowthRow> = out
                .records
                .iter()
                .map(|r| GrowthRow {
                    fingerprint: fp.clone(),
                    graph_seed: r.graph_seed,
                    vertex: r.vertex,
                    t: r.t,
                    radius: r.radius,
                    threshold: r.threshold,
                    pass: r.pass,
                })
                .collect();
            let details = serde_json::json!({ "range": out.range });
            (csv_bytes(&rows)?, rows.len(), out.violations, details)
        }
        Kind::Evidence => {
            let e = cfg.evidence.as_ref().unwrap();
            eprintln!("evidence: {} graphs at n = {}, dims {:?}", e.graphs, e.n, e.dims);
            let out = evidence_experiment(e, cfg.seed)?;
            let rows: Vec<EvidenceRow> = out
                .records
                .iter()
                .map(|r| EvidenceRow {
                    fingerprint: fp.clone(),
                    n: r.n,
                    beta: r.beta,
                    m: r.m,
                    dim: r.dim,
                    best_alpha: r.best_alpha,
                    seed: r.seed,
                    wall_time_ms: r.wall_time_ms,
                    graph: r.graph,
                    sparse_event: r.sparse_event,
                })
                .collect();
            let details = serde_json::json!({
                "alpha": out.alpha,
                "M": out.m,
                "best_alpha_is": "upper bound on the least distortion, not a certified optimum",
                "sparse_event_frequency": out.sparse_event_frequency,
                "corollary_event_frequency": out.corollary_event_frequency,
                "corollary_radius": out.corollary_radius,
                "monotone": out.monotone,
            });
            (csv_bytes(&rows)?, rows.len(), usize::from(!out.monotone), details)
        }
        Kind::Discretization => {
            let d = cfg.discretization.as_ref().unwrap();
            let rows = discretization_trials(d, cfg.seed, &fp)?;
            let violations = rows.iter().filter(|r| !r.pass).count();
            let max_ratio = rows.iter().map(|r| r.max_count_ratio).fold(0.0, f64::max);
            let details = serde_json::json!({ "max_count_ratio": max_ratio, "params": d.params()? });
            (csv_bytes(&rows)?, rows.len(), violations, details)
        }
    };
    let summary_path = csv_path.with_extension("summary.json");
    let summary = Summary {
        fingerprint: fp,
        kind: kind.name(),
        config: cfg.clone(),
        rows,
        violations,
        log_base: "e",
        details,
    };
    write_atomic(csv_path, &csv)?;
    write_atomic(&summary_path, &json_bytes(&summary)?)?;
    Ok(RunReport {
        csv: csv_path.to_path_buf(),
        summary: summary_path,
        violations,
    })
}

fn discretization_trials(d: &DiscretizationExperiment, seed: u64, fp: &str) -> Result<Vec<DiscretizationRow>> {
    let space = d.space()?;
    let params = d.params()?;
    eprintln!("discretization: {} tuples of {} points in {}", d.trials, d.n, space.label());
    (0..d.trials)
        .map(|trial| {
            let start = Instant::now();
            let trial_seed = derive_seed(seed, &["discretization", &trial.to_string()]);
            let x = random_sparse_tuple(
                d.n,
                &space,
                params.lambda,
                params.eps,
                params.big_d,
                &mut derive_rng(trial_seed, &["tuple"]),
            );
            let dt = discretize(&x, &space, &params, trial_seed)?;
            let remark = check_remark_bounds(&x, &dt, &space);
            let expansion = check_expansion(&x, &dt.points, &dt.scales, &space, params.c0);
            let sp = check_scale_preservation(&dt.points, &dt.scales, &space, params.l, params.eps);
            let lb = check_scale_lower_bound(&x, &dt.scales, &space, params.lambda, params.l, params.eps, params.relaxed)?;
            let remark_violations = remark.seed_violations.len() + remark.point_violations.len();
            let lower_bound_violations = lb.count_violations.len() + lb.radius_violations.len();
            Ok(DiscretizationRow {
                fingerprint: fp.to_string(),
                trial,
                seed: trial_seed,
                remark_violations,
                expansion_violations: expansion.violations,
                preservation_violations: sp.violations,
                lower_bound_violations,
                max_count_ratio: sp.max_ratio(),
                wall_time_ms: start.elapsed().as_millis() as u64,
                pass: remark_violations + expansion.violations + sp.violations + lower_bound_violations == 0,
            })
        })
        .collect()
}
