use std::path::Path;
use std::process::{Command, Output};

fn metricdim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metricdim"))
        .args(args)
        .current_dir(dir)
        .env_remove("METRICDIM_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const GROWTH: &str = "seed = 11\n\n[growth]\nn = 2000\nm = 20\neps = 0.1\ngraphs = 3\nvertices = 10\n";
const EVIDENCE: &str =
    "seed = 5\n\n[evidence]\nn = 48\nbeta = 1.0\nc = 1.0\ndims = [1, 2, 4]\ngraphs = 2\niterations = 200\nrestarts = 1\n";

#[test]
fn growth_experiment_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.toml", GROWTH);
    for out in ["a.csv", "b.csv"] {
        let o = metricdim(&["experiment", "growth", "--config", "g.toml", "--out", out], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = read(dir.path(), "a.csv");
    assert_eq!(a, read(dir.path(), "b.csv"));
    assert_eq!(read(dir.path(), "a.summary.json"), read(dir.path(), "b.summary.json"));
    assert!(a.starts_with("fingerprint,graph_seed,vertex,t,radius,threshold,pass"));
    assert_eq!(a.lines().count(), 1 + 3 * 10 * 10);
    assert!(!a.contains(",false"));
}

#[test]
fn evidence_rows_differ_only_in_timing() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "e.toml", EVIDENCE);
    for out in ["a.csv", "b.csv"] {
        let o = metricdim(&["experiment", "evidence", "--config", "e.toml", "--out", out], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let strip = |text: String| -> Vec<Vec<String>> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let headers = r.headers().unwrap().clone();
        let t = headers.iter().position(|h| h == "wall_time_ms").unwrap();
        r.records()
            .map(|rec| {
                rec.unwrap()
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != t)
                    .map(|(_, v)| v.to_string())
                    .collect()
            })
            .collect()
    };
    let a = read(dir.path(), "a.csv");
    assert!(a.starts_with("fingerprint,n,beta,M,dim,best_alpha,seed,wall_time_ms"));
    assert_eq!(strip(a), strip(read(dir.path(), "b.csv")));
    assert_eq!(read(dir.path(), "a.summary.json"), read(dir.path(), "b.summary.json"));
}

#[test]
fn default_output_goes_to_a_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.toml", GROWTH);
    let o = metricdim(&["--out-dir", "runs", "experiment", "growth", "--config", "g.toml"], dir.path());
    assert!(o.status.success());
    let runs: Vec<_> = std::fs::read_dir(dir.path().join("runs")).unwrap().collect();
    assert_eq!(runs.len(), 1);
    let run = runs[0].as_ref().unwrap().path();
    assert!(run.file_name().unwrap().to_string_lossy().starts_with("growth-"));
    assert!(run.join("results.csv").exists());
    assert!(run.join("results.summary.json").exists());
}

#[test]
fn malformed_config_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.toml", "seed = \n[growth\n");
    let o = metricdim(&["experiment", "growth", "--config", "bad.toml", "--out", "r.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("r.csv").exists());

    write(dir.path(), "invalid.toml", &GROWTH.replace("m = 20", "m = 1500"));
    let o = metricdim(&["experiment", "growth", "--config", "invalid.toml", "--out", "r.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n/2"), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join("r.csv").exists());

    let o = metricdim(&["experiment", "evidence", "--config", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    write(dir.path(), "g.toml", GROWTH);
    let o = metricdim(&["experiment", "evidence", "--config", "g.toml", "--out", "r.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("r.csv").exists());
}

#[test]
fn graph_and_embedding_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = metricdim(&["--seed", "3", "graph", "gen", "--n", "30", "--m", "4", "--out", "g.json"], p);
    assert!(o.status.success());
    let o2 = metricdim(&["--seed", "3", "graph", "gen", "--n", "30", "--m", "4", "--out", "g2.json"], p);
    assert!(o2.status.success());
    assert_eq!(read(p, "g.json"), read(p, "g2.json"));
    let g: serde_json::Value = serde_json::from_str(&read(p, "g.json")).unwrap();
    assert_eq!(g["matching_edges"].as_array().unwrap().len(), 4);
    assert!(g["cycle_perm"].as_array().unwrap().iter().all(|v| v.as_u64().unwrap() >= 1));

    let o = metricdim(&["graph", "check", "--graph", "g.json", "--max-radius", "10"], p);
    assert!(o.status.success());

    let o = metricdim(&["embed", "kuratowski", "--graph", "g.json", "--out", "k.json"], p);
    assert!(o.status.success());
    let o = metricdim(
        &["embed", "check", "--graph", "g.json", "--points", "k.json", "--norm", "lp:inf", "--alpha", "1"],
        p,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["holds"], true);

    let o = metricdim(
        &["embed", "search", "--graph", "g.json", "--dim", "2", "--iters", "300", "--restarts", "1", "--out", "s.json"],
        p,
    );
    assert!(o.status.success());
    let s: serde_json::Value = serde_json::from_str(&read(p, "s.json")).unwrap();
    assert!(s["best_alpha_upper_bound"].as_f64().unwrap() >= 1.0);
}

#[test]
fn matching_commands() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write(p, "pm.json", r#"{"n": 6, "edges": [], "non_edges": []}"#);
    let o = metricdim(&["matching", "count", "--partial", "pm.json", "--target", "2"], p);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], "45");

    write(p, "pm.json", r#"{"n": 8, "edges": [[1, 2]], "non_edges": [3]}"#);
    let o = metricdim(&["matching", "sample", "--partial", "pm.json", "--target", "3", "--out", "m.json"], p);
    assert!(o.status.success());
    let m: serde_json::Value = serde_json::from_str(&read(p, "m.json")).unwrap();
    let edges = m["edges"].as_array().unwrap();
    assert_eq!(edges.len(), 3);
    assert!(edges.iter().any(|e| e == &serde_json::json!([1, 2])));
    assert!(edges.iter().flat_map(|e| e.as_array().unwrap()).all(|v| v != 3));

    let o = metricdim(&["matching", "count", "--partial", "missing.json", "--target", "2"], p);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn discretize_with_checks() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let run = |points: Vec<Vec<f64>>, big_d: &str| {
        write(p, "x.json", &serde_json::json!({ "d": 1, "points": points }).to_string());
        let args = [
            "--seed", "9", "discretize", "--points", "x.json", "--norm", "lp:inf", "--lambda", "1", "--big-d",
            big_d, "--relaxed", "--l", "4", "--check", "--out", "dt.json",
        ];
        metricdim(&args, p)
    };
    // Spacing 30: five points within 72 of each other at most.
    let sparse: Vec<Vec<f64>> = (0..16).map(|k| vec![-225.0 + 30.0 * k as f64]).collect();
    let o = run(sparse.clone(), "256");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = read(p, "dt.json");
    assert!(run(sparse, "256").status.success());
    assert_eq!(first, read(p, "dt.json"));
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 16);

    // Too crowded for the lower-bound lemma at this L: the check must fail.
    let dense: Vec<Vec<f64>> = (0..40).map(|k| vec![-60.0 + 3.1 * k as f64]).collect();
    let o = run(dense, "64");
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lower bound"));
}
