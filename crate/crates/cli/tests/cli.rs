use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ht-extremes"));
    c.env_remove("HT_EXTREMES_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn experiment(dir: &Path, name: &str, alpha: f64, ladder: &str, reps: usize, seed: u64) -> PathBuf {
    let path = dir.join(name);
    let body = format!(
        r#"{{"config": {{"spec": {{"family": "pareto", "alpha": {alpha}}}, "n_ladder": {ladder}, "reps": {reps}, "seed": {seed}}}}}"#
    );
    fs::write(&path, body).unwrap();
    path
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn phi_table() {
    let o = run(&["phi", "--alpha", "0", "--s", "1,2,3"]);
    assert!(o.status.success());
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(String::from).collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(r.split('\t').nth(1).unwrap(), "0");
    }

    let o = run(&["phi", "--alpha", "0.5", "--s", "1"]);
    let v: f64 = stdout(&o).lines().nth(1).unwrap().split('\t').nth(1).unwrap().parse().unwrap();
    assert!((v - 0.861527706796296).abs() < 1e-12);

    let o = run(&["phi", "--alpha", "1.5", "--s", "1"]);
    assert_eq!(stdout(&o).lines().nth(1).unwrap().split('\t').nth(1).unwrap(), "inf");
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        vec!["phi", "--alpha", "0.5"],
        vec!["phi", "--alpha", "x", "--s", "1"],
        vec!["phi", "--alpha", "0.5", "--s", "-1"],
        vec!["phi", "--alpha", "-0.5", "--s", "1"],
        vec!["nonsense"],
        vec!["invert", "--alpha", "1.5"],
        vec!["invert", "--alpha", "0.5", "--x-grid", "1:2"],
    ] {
        assert_eq!(run(&args).status.code(), Some(64), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn simulate_is_deterministic_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let exp = experiment(tmp.path(), "e.json", 0.5, "[10, 100, 1000]", 200, 42);
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let out = tmp.path().join(format!("out{i}"));
        let o = run(&["simulate", exp.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(dir_bytes(&out));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let csvs: Vec<_> = outputs[0].iter().filter(|(n, _)| n.ends_with(".csv")).collect();
    assert_eq!(csvs.len(), 3);
    for (_, bytes) in csvs {
        let text = String::from_utf8(bytes.clone()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("rep,r_value"));
        let rows: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert_eq!(rows.len(), 200);
        assert!(rows.iter().all(|&r| r >= 1.0));
    }
}

#[test]
fn thread_env_var_is_honoured() {
    let tmp = tempfile::tempdir().unwrap();
    let exp = experiment(tmp.path(), "e.json", 0.7, "[500]", 150, 1);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let o = bin()
        .args(["simulate", exp.to_str().unwrap(), "--out", a.to_str().unwrap()])
        .env("HT_EXTREMES_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = bin()
        .args(["simulate", exp.to_str().unwrap(), "--out", b.to_str().unwrap()])
        .env("HT_EXTREMES_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(64));
    assert!(run(&["simulate", exp.to_str().unwrap(), "--out", b.to_str().unwrap(), "--threads", "4"]).status.success());
    assert_eq!(dir_bytes(&a), dir_bytes(&b));
}

#[test]
fn bad_experiment_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();
    let unknown = tmp.path().join("u.json");
    fs::write(
        &unknown,
        r#"{"config": {"spec": {"family": "pareto", "alpha": 0.5}, "n_ladder": [10], "reps": 100, "seed": 1}, "extra": 1}"#,
    )
    .unwrap();
    assert_eq!(run(&["simulate", unknown.to_str().unwrap(), "--out", out]).status.code(), Some(65));
    let bad_ladder = experiment(tmp.path(), "b.json", 0.5, "[100, 10]", 100, 1);
    assert_eq!(run(&["simulate", bad_ladder.to_str().unwrap(), "--out", out]).status.code(), Some(65));
    let bad_alpha = experiment(tmp.path(), "a.json", -1.0, "[10]", 100, 1);
    assert_eq!(run(&["simulate", bad_alpha.to_str().unwrap(), "--out", out]).status.code(), Some(65));
    let missing = tmp.path().join("missing.json");
    assert_eq!(run(&["simulate", missing.to_str().unwrap(), "--out", out]).status.code(), Some(74));
    let ok = experiment(tmp.path(), "ok.json", 0.5, "[10]", 100, 1);
    assert_eq!(run(&["simulate", ok.to_str().unwrap()]).status.code(), Some(64));
}

#[test]
fn order_exit_status_follows_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (name, alpha) in [("lo", 0.3), ("hi", 0.7)] {
        let exp = experiment(tmp.path(), &format!("{name}.json"), alpha, "[10000]", 2000, 5);
        let out = tmp.path().join(name);
        assert!(run(&["simulate", exp.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());
        files.push(out.join("samples_n10000.csv"));
    }
    let (lo, hi) = (files[0].to_str().unwrap(), files[1].to_str().unwrap());
    assert_eq!(run(&["order", lo, lo]).status.code(), Some(2));
    let report_path = tmp.path().join("report.json");
    let o = run(&["order", lo, hi, "--confidence", "0.95", "--out", report_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(&report_path).unwrap()).unwrap();
    assert_eq!(report["verdict"], "Ordered");
    assert_eq!(report["evidence"], "asymptotic-regime evidence");
    assert_eq!(run(&["order", hi, lo]).status.code(), Some(3));
    assert_eq!(run(&["order", lo, hi, "--confidence", "1.5"]).status.code(), Some(64));
}

#[test]
fn sir_sweep_files() {
    let tmp = tempfile::tempdir().unwrap();
    let exp = tmp.path().join("sir.json");
    fs::write(
        &exp,
        r#"{"config": {"spec": {"family": "pareto", "alpha": 0.5}, "n_ladder": [1000], "reps": 500, "seed": 3, "s_grid": [0.5, 1.0]},
            "out_dir": "OUT", "sir": {"alphas": [0.2, 0.5, 0.8]}}"#
            .replace("OUT", tmp.path().join("res").to_str().unwrap()),
    )
    .unwrap();
    let o = run(&["sir", exp.to_str().unwrap(), "--bits"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("n\talpha\tmean_capacity_bits"));
    let csv = fs::read_to_string(tmp.path().join("res/sir_sweep_n1000.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha,mean_sir,sir_stderr,mean_capacity,cap_stderr,median_sir,q90_sir,exclusions"
    );
    let caps: Vec<f64> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(caps.len(), 3);
    assert!(caps[0] > caps[1] && caps[1] > caps[2]);
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("res/sir_n1000.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 3);
}

#[test]
fn invert_writes_cdf_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("cdf.csv");
    let o = run(&["invert", "--alpha", "0.5", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,prob"));
    let probs: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(probs.len(), 200);
    assert!(probs.windows(2).all(|w| w[0] <= w[1]));
    let again = run(&["invert", "--alpha", "0.5"]);
    assert_eq!(stdout(&again), text);
}
