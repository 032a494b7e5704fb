//! `metricdim`: command-line entry point for the matching, graph,
//! discretization and embedding tools and the batch experiments.
//!
//! Data goes to files (or stdout when no `--out` is given), progress to
//! stderr. Exit status is 0 on success, 1 when a check or experiment found
//! violations and 2 on usage or input errors. Vertex and point indices are
//! 1-based in every file and flag.

mod config;
mod experiment;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use metricdim::discretization::{
    check_expansion, check_remark_bounds, check_scale_lower_bound, check_scale_preservation, discretize,
    DiscretizationParams,
};
use metricdim::embedding::{
    embeds_with_alpha, kuratowski_embed, local_search_min_distortion, min_alpha, SearchOptions,
};
use metricdim::formats::{DiscretizationFile, GraphFile, MatchingFile, PointsFile};
use metricdim::geometry::NormedSpace;
use metricdim::graph::{check_structural_inclusions, growth_radius, SparseGraph};
use metricdim::matchings::{
    completions_count, incidence_tail_estimate, sample_conditional, sample_uniform, PartialMatching, TailQuery,
};
use metricdim::seeding::derive_rng;
use serde_json::json;

use crate::config::{ExperimentConfig, Kind};
use crate::io::{emit_json, read_json};

#[derive(Parser)]
#[command(name = "metricdim", version, about = "Sparse random graphs, multiscale discretization and distortion experiments")]
struct Cli {
    /// Master seed; for experiments it overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "METRICDIM_THREADS")]
    threads: Option<usize>,
    /// Root for per-run experiment directories.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Matchings and partial matchings.
    #[command(subcommand)]
    Matching(MatchingCmd),
    /// Cycle-plus-matching graphs.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Discretize a point tuple.
    Discretize(DiscretizeArgs),
    /// Embeddings of graph metrics.
    #[command(subcommand)]
    Embed(EmbedCmd),
    /// Run a batch experiment from a TOML config.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum MatchingCmd {
    /// Number of completions of a partial matching to size `target`.
    Count {
        #[arg(long)]
        partial: PathBuf,
        #[arg(long)]
        target: usize,
    },
    /// Uniform matching of size `target`, optionally conditioned on a partial one.
    Sample {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        partial: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the incidence tail for a subset of free vertices.
    Tail {
        #[arg(long)]
        partial: PathBuf,
        #[arg(long)]
        target: usize,
        /// Comma-separated 1-based vertices.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Generate a model graph.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest radius whose ball around `vertex` holds at least `t` vertices.
    Growth {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        vertex: usize,
        #[arg(long)]
        t: f64,
    },
    /// Check the ball-growth inclusions around every vertex (or one).
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 20)]
        max_radius: usize,
        #[arg(long)]
        vertex: Option<usize>,
    },
}

#[derive(Args)]
struct DiscretizeArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long, default_value = "lp:2")]
    norm: String,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    big_d: f64,
    /// Scale multiplier; defaults to 2·300^d unless `--relaxed`.
    #[arg(long)]
    l: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    relaxed: bool,
    /// Also run the distance checks and fail on violations.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EmbedCmd {
    /// Whether `d(i,j) <= ‖x_i − x_j‖ <= α d(i,j)` for all pairs.
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value = "lp:inf")]
        norm: String,
        #[arg(long)]
        alpha: f64,
    },
    /// Isometric embedding into ℓ∞^n.
    Kuratowski {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Local search for a low-distortion image; reports an upper bound.
    Search {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "lp:inf")]
        norm: String,
        #[arg(long, default_value_t = 5000)]
        iters: usize,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Growth,
    Evidence,
    Discretization,
}

#[derive(Args)]
struct ExperimentArgs {
    kind: ExperimentKind,
    #[arg(long)]
    config: PathBuf,
    /// CSV path; defaults to `<out-dir>/<kind>-<fingerprint>/results.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn zero_based(v: usize, n: usize) -> Result<usize> {
    if v == 0 || v > n {
        bail!("vertex {v} outside 1..={n}");
    }
    Ok(v - 1)
}

fn load_graph(path: &Path) -> Result<SparseGraph> {
    Ok(read_json::<GraphFile>(path)?.to_graph()?)
}

fn load_partial(path: &Path) -> Result<PartialMatching> {
    Ok(read_json::<MatchingFile>(path)?.to_partial()?)
}

/// Returns whether the command found no violations.
fn run(cli: Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Matching(cmd) => matching(cmd, seed),
        Command::Graph(cmd) => graph(cmd, seed),
        Command::Discretize(args) => discretize_cmd(args, seed),
        Command::Embed(cmd) => embed(cmd, seed),
        Command::Experiment(args) => experiment_cmd(args, cli.seed, &cli.out_dir),
    }
}

fn matching(cmd: MatchingCmd, seed: u64) -> Result<bool> {
    match cmd {
        MatchingCmd::Count { partial, target } => {
            let pm = load_partial(&partial)?;
            let count = completions_count(&pm, target);
            emit_json(&json!({ "n": pm.n(), "target": target, "count": count.to_string() }), None)?;
        }
        MatchingCmd::Sample { n, target, partial, out } => {
            let mut rng = derive_rng(seed, &["cli", "matching"]);
            let m = match (partial, n) {
                (Some(p), _) => sample_conditional(&load_partial(&p)?, target, &mut rng)?,
                (None, Some(n)) => sample_uniform(n, target, &mut rng)?,
                (None, None) => bail!("give --n or --partial"),
            };
            emit_json(&MatchingFile::from_matching(&m), out.as_deref())?;
        }
        MatchingCmd::Tail { partial, target, subset, mu, trials } => {
            let pm = load_partial(&partial)?;
            let subset = subset
                .iter()
                .map(|&v| zero_based(v, pm.n()))
                .collect::<Result<Vec<_>>>()?;
            let q = TailQuery::new(&pm, target, subset, mu)?;
            let est = incidence_tail_estimate(&q, trials, seed);
            let within = est.upper_99 <= est.bound;
            emit_json(
                &json!({
                    "mu": mu,
                    "threshold": q.threshold(),
                    "estimate": est,
                    "exact": q.exact_probability(),
                    "within_bound": within,
                }),
                None,
            )?;
            return Ok(within);
        }
    }
    Ok(true)
}

fn graph(cmd: GraphCmd, seed: u64) -> Result<bool> {
    match cmd {
        GraphCmd::Gen { n, m, out } => {
            let g = SparseGraph::generate(n, m, &mut derive_rng(seed, &["cli", "graph"]))?;
            emit_json(&GraphFile::from_graph(&g), out.as_deref())?;
        }
        GraphCmd::Growth { graph, vertex, t } => {
            let g = load_graph(&graph)?;
            let r = growth_radius(&g, zero_based(vertex, g.n())?, t)?;
            emit_json(&json!({ "vertex": vertex, "t": t, "radius": r }), None)?;
        }
        GraphCmd::Check { graph, max_radius, vertex } => {
            let g = load_graph(&graph)?;
            let vertices: Vec<usize> = match vertex {
                Some(v) => vec![zero_based(v, g.n())?],
                None => (0..g.n()).collect(),
            };
            let mut failures = Vec::new();
            for &v in &vertices {
                let report = check_structural_inclusions(&g, v, max_radius);
                for (inclusion, radius) in report.failures() {
                    failures.push(json!({ "vertex": v + 1, "inclusion": inclusion, "radius": radius }));
                }
            }
            let ok = failures.is_empty();
            emit_json(
                &json!({ "vertices_checked": vertices.len(), "max_radius": max_radius, "failures": failures }),
                None,
            )?;
            return Ok(ok);
        }
    }
    Ok(true)
}

fn discretize_cmd(a: DiscretizeArgs, seed: u64) -> Result<bool> {
    let pts: PointsFile = read_json(&a.points)?;
    pts.validate()?;
    let space = NormedSpace::parse(&a.norm, pts.d)?;
    let mut params = if a.relaxed {
        let Some(l) = a.l else {
            bail!("--relaxed needs --l");
        };
        DiscretizationParams::relaxed(a.lambda, a.big_d, l)
    } else {
        let mut p = DiscretizationParams::strict(pts.d, a.lambda, a.big_d);
        if let Some(l) = a.l {
            p.l = l;
        }
        p
    };
    if let Some(c0) = a.c0 {
        params.c0 = c0;
    }
    if let Some(eps) = a.eps {
        params.eps = eps;
    }
    let x = &pts.points;
    let dt = discretize(x, &space, &params, seed)?;
    emit_json(&DiscretizationFile::from(&dt), a.out.as_deref())?;
    if !a.check {
        return Ok(true);
    }
    let remark = check_remark_bounds(x, &dt, &space);
    let expansion = check_expansion(x, &dt.points, &dt.scales, &space, params.c0);
    let sp = check_scale_preservation(&dt.points, &dt.scales, &space, params.l, params.eps);
    let lb = check_scale_lower_bound(x, &dt.scales, &space, params.lambda, params.l, params.eps, params.relaxed)?;
    eprintln!(
        "remark {} expansion {} preservation {} (max ratio {:.3}) lower bound {}",
        remark.seed_violations.len() + remark.point_violations.len(),
        expansion.violations,
        sp.violations,
        sp.max_ratio(),
        lb.count_violations.len() + lb.radius_violations.len()
    );
    Ok(remark.passed() && expansion.violations == 0 && sp.violations == 0 && lb.passed())
}

fn embed(cmd: EmbedCmd, seed: u64) -> Result<bool> {
    match cmd {
        EmbedCmd::Check { graph, points, norm, alpha } => {
            let g = load_graph(&graph)?;
            let pts: PointsFile = read_json(&points)?;
            pts.validate()?;
            let space = NormedSpace::parse(&norm, pts.d)?;
            let check = embeds_with_alpha(&g, &space, &pts.points, alpha)?;
            let dist = min_alpha(&g, &space, &pts.points).ok();
            emit_json(
                &json!({
                    "holds": check.holds,
                    "violation": check.violation.map(|(i, j)| [i + 1, j + 1]),
                    "connected": check.connected,
                    "distortion": dist.map(|d| d.alpha),
                }),
                None,
            )?;
            Ok(check.holds)
        }
        EmbedCmd::Kuratowski { graph, out } => {
            let g = load_graph(&graph)?;
            let x = kuratowski_embed(&g)?;
            emit_json(&PointsFile::new(g.n(), x), out.as_deref())?;
            Ok(true)
        }
        EmbedCmd::Search { graph, dim, norm, iters, restarts, out } => {
            let g = load_graph(&graph)?;
            let space = NormedSpace::parse(&norm, dim)?;
            let res = local_search_min_distortion(&g, &space, &SearchOptions::new(iters, restarts), seed)?;
            eprintln!("best alpha {:.6} (upper bound on the least distortion)", res.alpha);
            emit_json(
                &json!({
                    "norm": space.label(),
                    "d": dim,
                    "best_alpha_upper_bound": res.alpha,
                    "restarts": res.restarts,
                    "points": res.points,
                }),
                out.as_deref(),
            )?;
            Ok(true)
        }
    }
}

fn experiment_cmd(a: ExperimentArgs, seed: Option<u64>, out_dir: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let mut cfg = ExperimentConfig::parse(&text).with_context(|| format!("invalid config {}", a.config.display()))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let wanted = match a.kind {
        ExperimentKind::Growth => Kind::Growth,
        ExperimentKind::Evidence => Kind::Evidence,
        ExperimentKind::Discretization => Kind::Discretization,
    };
    if cfg.kind()? != wanted {
        bail!("config describes a {} experiment, not {}", cfg.kind()?.name(), wanted.name());
    }
    let csv = match a.out {
        Some(p) => p,
        None => experiment::default_csv(out_dir, &cfg)?,
    };
    let report = experiment::run(&cfg, &csv)?;
    eprintln!(
        "wrote {} and {}; {} violations",
        report.csv.display(),
        report.summary.display(),
        report.violations
    );
    Ok(report.violations == 0)
}
