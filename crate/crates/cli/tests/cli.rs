use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const LOSSLESS_N: f64 = 0.015_388_203_202_207_57;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vacuum-census"));
    cmd.env_remove("VACUUM_CENSUS_JOBS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

struct Csv {
    meta: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Csv {
        let text = fs::read_to_string(path).unwrap();
        let meta = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(String::from)
            .collect();
        let body: String = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect();
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let header = reader.headers().unwrap().iter().map(String::from).collect();
        let rows = reader
            .records()
            .map(|r| r.unwrap().iter().map(String::from).collect())
            .collect();
        Csv { meta, header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name} in {:?}", self.header))
    }

    fn num(&self, row: usize, name: &str) -> f64 {
        self.rows[row][self.col(name)].parse().unwrap()
    }

    fn find(&self, pred: impl Fn(&Self, usize) -> bool) -> usize {
        (0..self.rows.len()).find(|&i| pred(self, i)).expect("row")
    }
}

fn write_spec(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("spec.json");
    fs::write(&path, text).unwrap();
    path
}

fn sweep(dir: &Path, spec: &str, extra: &[&str]) -> Output {
    let spec = write_spec(dir, spec);
    let out = dir.join("out.csv");
    let mut args = vec![
        "sweep",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn lossless_population() {
    let v = stdout_json(&run(&["nk", "--wc", "0.5", "--gl", "0", "--ck", "1"]));
    assert_eq!(v["method"], "hopfield_lossless");
    assert!((v["n_k"].as_f64().unwrap() - LOSSLESS_N).abs() < 1e-12);
}

#[test]
fn decoupled_population_is_zero() {
    let v = stdout_json(&run(&["nk", "--wc", "0", "--gl", "1", "--ck", "1"]));
    assert_eq!(v["n_k"].as_f64().unwrap(), 0.0);
}

#[test]
fn verify_prints_both_methods() {
    let v = stdout_json(&run(&[
        "nk", "--wc", "0.5", "--gl", "2", "--ck", "1", "--verify",
    ]));
    let cf = v["verify"]["closed_form"]["n_k"].as_f64().unwrap();
    let q = v["verify"]["quadrature"]["n_k"].as_f64().unwrap();
    assert!((cf - q).abs() <= 1e-4 * cf);
    assert_eq!(v["verify"]["agree"], true);
    assert_eq!(v["method"], "closed_form");
}

#[test]
fn auto_method_selection() {
    let v = stdout_json(&run(&["nk", "--wc", "0.5", "--gl", "1", "--ck", "1"]));
    assert_eq!(v["method"], "closed_form");
    let v = stdout_json(&run(&[
        "nk", "--wc", "0.5", "--gl", "1", "--gp", "1", "--ck", "1", "--tol", "1e-4",
    ]));
    assert_eq!(v["method"], "dual_loss");
}

#[test]
fn exit_codes() {
    let out = run(&["nk", "--wc", "0.5", "--gl", "3", "--ck", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["error"], "invalid_parameter");
    assert!(e["message"].as_str().unwrap().contains("gamma_L"));

    let out = run(&["roots", "--wc", "0", "--gl", "1", "--ck", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "decoupled");

    assert_eq!(run(&["nk", "--wc", "0.5"]).status.code(), Some(2));
    assert_eq!(
        run(&["nk", "--wc", "0.5", "--gl", "1", "--gp", "1", "--ck", "1", "--verify"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn eps_and_roots() {
    let v = stdout_json(&run(&["eps", "--wc", "0.5", "--gl", "1", "--omega", "1"]));
    assert!((v["eps"]["im"].as_f64().unwrap() - 0.25).abs() < 1e-15);
    let v = stdout_json(&run(&["roots", "--wc", "0.5", "--gl", "0", "--ck", "1"]));
    let lo = v["roots"][0]["re"].as_f64().unwrap();
    let hi = v["roots"][1]["re"].as_f64().unwrap();
    assert!((lo - 0.780_776_4).abs() < 1e-7 && (hi - 1.280_776_4).abs() < 1e-7);
}

#[test]
fn one_axis_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = sweep(
        dir.path(),
        r#"{"quantity":"nk","fixed":{"gamma_L":1,"ck":1},
            "axes":[{"param":"omega_c","min":0,"max":1,"count":3}]}"#,
        &[],
    );
    let report = stdout_json(&out);
    assert_eq!(report["rows"], 3);
    let t = Csv::read(&dir.path().join("out.csv"));
    assert_eq!(t.rows.len(), 3);
    assert!(t.meta.iter().any(|m| m.starts_with("# quantity: nk")));
    for c in ["omega_c", "gamma_L", "ck", "n_k", "est_error", "status"] {
        t.col(c);
    }
    assert_eq!(t.num(0, "n_k"), 0.0);
    assert_eq!(t.num(1, "omega_c"), 0.5);
    let sidecar: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out.json")).unwrap()).unwrap();
    assert_eq!(sidecar["rows"], 3);
    assert_eq!(sidecar["ok_rows"], 3);
    assert_eq!(sidecar["spec"]["quantity"], "nk");
}

#[test]
fn dual_loss_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = sweep(
        dir.path(),
        r#"{"quantity":"nk_dual","fixed":{"omega_c":0.5,"ck":1},"tol":1e-4,
            "axes":[{"param":"gamma_L","min":0.1,"max":2,"count":5},
                    {"param":"gamma_P","min":0.1,"max":2,"count":5}]}"#,
        &[],
    );
    stdout_json(&out);
    let t = Csv::read(&dir.path().join("out.csv"));
    assert_eq!(t.rows.len(), 25);
    let status = t.col("status");
    assert!(t.rows.iter().all(|r| r[status] == "ok"));
    assert!(t.rows.iter().all(|r| r[t.col("method")] == "dual_loss"));
    // row-major: gamma_P varies fastest
    assert_eq!(t.num(0, "gamma_P"), 0.1);
    assert_eq!(t.num(1, "gamma_L"), 0.1);
    assert_eq!(t.num(5, "gamma_L"), 0.575);
}

#[test]
fn invalid_sweeps_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = sweep(
        dir.path(),
        r#"{"quantity":"nk","fixed":{"gamma_L":3,"ck":1},
            "axes":[{"param":"omega_c","min":0,"max":1,"count":3}]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["path"], "fixed.gamma_L");
    assert!(e["message"].as_str().unwrap().contains("gamma_L"));
    assert!(!dir.path().join("out.csv").exists());

    let out = sweep(
        dir.path(),
        r#"{"quantity":"nk","fixed":{"gamma_L":1,"ck":1},
            "axes":[{"param":"omega_c","min":0,"max":1,"count":3,"step":2}]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["path"], "axes[0].step");

    let out = sweep(
        dir.path(),
        r#"{"quantity":"nk","fixed":{"gamma_L":1,"ck":1},
            "axes":[{"param":"gamma_L","min":0,"max":2.5,"count":3}]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rows_fail_individually() {
    let dir = tempfile::tempdir().unwrap();
    let out = sweep(
        dir.path(),
        r#"{"quantity":"roots","fixed":{"gamma_L":1,"ck":1},
            "axes":[{"param":"omega_c","min":0,"max":1,"count":3}]}"#,
        &[],
    );
    stdout_json(&out);
    let t = Csv::read(&dir.path().join("out.csv"));
    assert_eq!(t.rows[0][t.col("status")], "decoupled");
    assert_eq!(t.rows[0][t.col("root0_re")], "");
    assert_eq!(t.rows[1][t.col("status")], "ok");
}

#[test]
fn output_independent_of_jobs() {
    let spec = r#"{"quantity":"ek","fixed":{"omega_c":0.5,"gamma_L":0.7},"method":"quadrature",
        "axes":[{"param":"ck","min":0.01,"max":100,"count":17,"scale":"log"}]}"#;
    let one = tempfile::tempdir().unwrap();
    stdout_json(&sweep(one.path(), spec, &["--jobs", "1"]));
    let many = tempfile::tempdir().unwrap();
    let spec_path = write_spec(many.path(), spec);
    let out_path = many.path().join("out.csv");
    let out = bin()
        .env("VACUUM_CENSUS_JOBS", "4")
        .args([
            "sweep",
            spec_path.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    stdout_json(&out);
    assert_eq!(
        fs::read(one.path().join("out.csv")).unwrap(),
        fs::read(out_path).unwrap()
    );
}

fn figure(name: &str, dir: &Path) -> Value {
    stdout_json(&run(&["figure", name, "--outdir", dir.to_str().unwrap()]))
}

#[test]
fn fig1_datasets() {
    let dir = tempfile::tempdir().unwrap();
    figure("fig1", dir.path());
    let d = Csv::read(&dir.path().join("fig1_dispersion.csv"));
    assert_eq!(d.rows.len(), 5 * 200);
    assert!(d.meta.iter().any(|m| m == "# figure: fig1"));
    let t = Csv::read(&dir.path().join("fig1_trajectory.csv"));
    assert_eq!(t.rows.len(), 201);
    let i = t.find(|t, i| t.num(i, "gamma_L") == 0.0);
    assert!((t.num(i, "root0_re") - 0.780_776_4).abs() < 1e-7);
    assert!((t.num(i, "root1_re") - 1.280_776_4).abs() < 1e-7);
    let status = t.col("status");
    assert!(t.rows.iter().all(|r| r[status] == "ok"));
}

#[test]
fn fig2_datasets_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    figure("fig2", a.path());
    figure("fig2", b.path());
    for f in ["fig2_population.csv", "fig2_trajectory.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let p = Csv::read(&a.path().join("fig2_population.csv"));
    assert_eq!(p.rows.len(), 5 * 101);
    let i = p.find(|p, i| p.num(i, "gamma_L") == 0.0 && p.num(i, "omega_c") == 0.5);
    assert!((p.num(i, "n_k") - LOSSLESS_N).abs() < 1e-12);
    let t = Csv::read(&a.path().join("fig2_trajectory.csv"));
    assert_eq!(t.rows[0][t.col("status")], "decoupled");
    assert_eq!(t.rows.len(), 101);
}

#[test]
fn fig3_datasets() {
    let dir = tempfile::tempdir().unwrap();
    figure("fig3", dir.path());
    let a = Csv::read(&dir.path().join("fig3_asymptotes.csv"));
    assert_eq!(a.rows.len(), 81);
    let last = a.rows.len() - 1;
    assert_eq!(a.num(last, "ck"), 100.0);
    assert!((a.num(last, "n_large_k") - 6.25e-8).abs() < 1e-20);
    let p = Csv::read(&dir.path().join("fig3_population.csv"));
    assert_eq!(p.rows.len(), 5 * 81);
    for c in ["n_k", "e_k", "est_error", "e_k_est_error", "status"] {
        p.col(c);
    }
    let status = p.col("status");
    assert!(p.rows.iter().all(|r| r[status] == "ok"));
}

#[test]
fn suppfig1_dataset() {
    let dir = tempfile::tempdir().unwrap();
    figure("suppfig1", dir.path());
    let t = Csv::read(&dir.path().join("suppfig1_dual_loss.csv"));
    assert_eq!(t.rows.len(), 4 * 21 * 21);
    let status = t.col("status");
    assert!(t.rows.iter().all(|r| r[status] == "ok"));
    let (lo, hi) = (t.num(0, "gamma_L"), t.num(t.rows.len() - 1, "gamma_P"));
    assert_eq!((lo, hi), (0.05, 2.0));
}
