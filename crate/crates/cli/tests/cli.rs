use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn hopset() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hopset"));
    c.env_remove("HOPSET_JOBS");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    hopset()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn setup_path_pipeline() -> (TempDir, PathBuf, PathBuf) {
    let dir = TempDir::new().unwrap();
    let o = run(
        dir.path(),
        &[
            "gen", "--model", "path", "--n", "8", "--base", "1", "--seed", "1", "-o", "g.gr",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(
        dir.path(),
        &[
            "build", "-g", "g.gr", "--eps", "0.3", "--kappa", "2", "--rho", "0.5", "--mode",
            "reduced", "--paths", "-o", "h.hop",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let g = dir.path().join("g.gr");
    let h = dir.path().join("h.hop");
    (dir, g, h)
}

#[test]
fn gen_build_verify_pipeline() {
    let (dir, _, _) = setup_path_pipeline();
    let o = run(
        dir.path(),
        &["verify", "-g", "g.gr", "-H", "h.hop", "--pairs", "all"],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn corrupted_hopset_is_a_violation() {
    let (dir, _, h) = setup_path_pipeline();
    let text = std::fs::read_to_string(&h).unwrap();
    let line = text
        .lines()
        .find(|l| l.starts_with("e 1 3 "))
        .expect("star-set edge from 1 to 3");
    let fields: Vec<&str> = line.split_whitespace().collect();
    let lowered = format!("e 1 3 1/1 {} {}", fields[4], fields[5]);
    std::fs::write(&h, text.replace(line, &lowered)).unwrap();
    let before = std::fs::read(&h).unwrap();
    let o = run(dir.path(), &["verify", "-g", "g.gr", "-H", "h.hop"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("FAIL"));
    assert!(
        out.contains("violation 1 3 d_G=2 d_beta=1/1 stretch=1/2"),
        "{out}"
    );
    assert_eq!(std::fs::read(&h).unwrap(), before);
}

#[test]
fn parameter_rejection_exit_code() {
    let (dir, _, _) = setup_path_pipeline();
    let o = run(
        dir.path(),
        &[
            "build", "-g", "g.gr", "--rho", "0.25", "--kappa", "2", "-o", "x.hop",
        ],
    );
    assert_eq!(code(&o), 4);
    let o = run(
        dir.path(),
        &["build", "-g", "g.gr", "--eps", "0.5", "-o", "x.hop"],
    );
    assert_eq!(code(&o), 4);
}

#[test]
fn io_and_usage_exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&run(
            dir.path(),
            &["verify", "-g", "missing.gr", "-H", "missing.hop"]
        )),
        3
    );
    std::fs::write(dir.path().join("bad.gr"), "p sp 2 1\na 1 3 4\n").unwrap();
    assert_eq!(code(&run(dir.path(), &["build", "-g", "bad.gr"])), 3);
    assert_eq!(code(&run(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&run(dir.path(), &["build"])), 2);
    assert_eq!(code(&run(dir.path(), &["--help"])), 0);
}

#[test]
fn wrong_graph_is_rejected() {
    let (dir, _, _) = setup_path_pipeline();
    run(
        dir.path(),
        &[
            "gen", "--model", "path", "--n", "8", "--base", "2", "--seed", "1", "-o", "other.gr",
        ],
    );
    assert_eq!(
        code(&run(
            dir.path(),
            &["verify", "-g", "other.gr", "-H", "h.hop"]
        )),
        3
    );
}

#[test]
fn query_writes_csv_and_paths() {
    let (dir, _, _) = setup_path_pipeline();
    let o = run(
        dir.path(),
        &[
            "query",
            "-g",
            "g.gr",
            "-H",
            "h.hop",
            "--sources",
            "1,8",
            "-o",
            "q.csv",
            "--paths",
            "p.txt",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("q.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "source,vertex,estimate_num,estimate_den");
    assert_eq!(rows.len(), 1 + 16);
    assert!(rows.contains(&"8,1,7,1"));
    let paths = std::fs::read_to_string(dir.path().join("p.txt")).unwrap();
    assert_eq!(paths.lines().count(), 16);
    assert!(paths.lines().any(|l| l == "8 7 6 5 4 3 2 1"));
}

#[test]
fn query_needs_witnesses_for_paths() {
    let dir = TempDir::new().unwrap();
    run(
        dir.path(),
        &[
            "gen", "--model", "er", "--n", "20", "--p", "0.3", "--wmax", "9", "--seed", "2", "-o",
            "g.gr",
        ],
    );
    assert_eq!(
        code(&run(dir.path(), &["build", "-g", "g.gr", "-o", "h.hop"])),
        0
    );
    let o = run(
        dir.path(),
        &[
            "query",
            "-g",
            "g.gr",
            "-H",
            "h.hop",
            "--sources",
            "random:3:1",
            "--paths",
            "p.txt",
        ],
    );
    assert_eq!(code(&o), 4);
    let o = run(
        dir.path(),
        &["query", "-g", "g.gr", "-H", "h.hop", "--sources", "21"],
    );
    assert_eq!(code(&o), 4);
}

#[test]
fn builds_are_reproducible_across_job_counts() {
    let dir = TempDir::new().unwrap();
    let args = [
        "gen",
        "--model",
        "er",
        "--n",
        "60",
        "--p",
        "0.1",
        "--wmax",
        "4294967296",
        "--seed",
        "4",
        "-o",
        "g.gr",
    ];
    assert_eq!(code(&run(dir.path(), &args)), 0);
    assert_eq!(
        code(&run(
            dir.path(),
            &["--jobs", "1", "build", "-g", "g.gr", "--seed", "9", "--paths", "-o", "a.hop"]
        )),
        0
    );
    let o = hopset()
        .current_dir(dir.path())
        .env("HOPSET_JOBS", "3")
        .args([
            "build", "-g", "g.gr", "--seed", "9", "--paths", "-o", "b.hop",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let a = std::fs::read(dir.path().join("a.hop")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.hop")).unwrap());
    // the provenance header alone reproduces the build
    let text = String::from_utf8(a).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("c params ") && l.contains("seed=9")));
    assert_eq!(
        code(&run(
            dir.path(),
            &[
                "verify",
                "-g",
                "g.gr",
                "-H",
                "a.hop",
                "--pairs",
                "sample:500:3"
            ]
        )),
        0
    );
}

#[test]
fn json_reports() {
    let (dir, _, _) = setup_path_pipeline();
    let o = run(
        dir.path(),
        &["verify", "-g", "g.gr", "-H", "h.hop", "--format", "json"],
    );
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["pairs_checked"], 56);
    let o = run(dir.path(), &["stats", "-H", "h.hop", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["sizes"]["total"], 7);
    assert_eq!(v["s_within_bound"], true);
}

#[test]
fn build_report_lists_scales() {
    let dir = TempDir::new().unwrap();
    run(
        dir.path(),
        &[
            "gen", "--model", "path", "--n", "32", "--base", "2", "--seed", "1", "-o", "g.gr",
        ],
    );
    let o = run(
        dir.path(),
        &[
            "build", "-g", "g.gr", "--mode", "direct", "-o", "h.hop", "--report", "r.json",
        ],
    );
    assert_eq!(code(&o), 0);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert!(v["scales"]
        .as_array()
        .unwrap()
        .iter()
        .any(|s| s["trivial"] == false));
}

#[test]
fn bench_sweep_emits_fixed_columns() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("b.toml"),
        r#"
[graph]
model = "er"
avg_degree = 6.0
wmin = 1
wmax = 1000000

[grid]
n = [32, 48]
kappa = [2, 3]
rho = ["1/2"]
eps = ["0.3"]
mode = ["reduced", "direct"]
seeds = [1]

[verify]
pairs = "all"
"#,
    )
    .unwrap();
    let o = run(dir.path(), &["bench", "-c", "b.toml", "-o", "out.csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        rows[0],
        "n,m,kappa,rho,eps,mode,seed,ell,beta,hopset_edges,s_edges,build_ms,verify_max_stretch"
    );
    assert_eq!(rows.len(), 1 + 8);
    assert!(rows[1..].iter().all(|r| r.split(',').count() == 13));
    std::fs::write(dir.path().join("bad.toml"), "[graph]\nmodel = 3\n").unwrap();
    assert_eq!(code(&run(dir.path(), &["bench", "-c", "bad.toml"])), 3);
}
