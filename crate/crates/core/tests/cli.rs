use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_levelbound"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(cmd: &mut Command) -> (i32, Output) {
    let out = cmd.output().expect("binary runs");
    (out.status.code().expect("exit code"), out)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn without_timings(text: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn verify_exit_zero_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, o) = run(bin().args(["verify", "--config"]).arg(config("zero.json")).arg("--out").arg(&out));
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["status"], "complete");
    assert_eq!(r["verdicts"]["bound_state_exists"], "false");
    assert_eq!(r["bug"], false);
    assert!(r["tolerances"]["zero_mean"].is_number());
}

#[test]
fn grid_overrides_reach_the_report() {
    let (code, o) = run(bin()
        .args(["verify", "--config"])
        .arg(config("gaussian_well.json"))
        .args(["--grid-n", "24", "--grid-L", "5.5", "--seed", "9"]));
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["settings"]["grid"]["n"], 24);
    assert_eq!(r["settings"]["grid"]["L"], 5.5);
    assert_eq!(r["settings"]["seed"], 9);
    assert_eq!(r["verdicts"]["ground"]["verdict"], "holds");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(run(bin().args(["verify", "--config"]).arg(&missing)).0, 2);

    let unknown = write(
        dir.path(),
        "unknown.json",
        r#"{"dimension": 3, "family": "anisotropic_harmonic", "parameters": {"omega": [1, 1, 2]},
            "grid": {"L": 8, "n": 32}, "colour": "blue"}"#,
    );
    let (code, o) = run(bin().args(["verify", "--config"]).arg(&unknown));
    assert_eq!(code, 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));

    let arity = write(
        dir.path(),
        "arity.json",
        r#"{"dimension": 3, "family": "anisotropic_harmonic", "parameters": {"omega": [1, 2]},
            "grid": {"L": 8, "n": 32}}"#,
    );
    assert_eq!(run(bin().args(["verify", "--config"]).arg(&arity)).0, 2);

    let (code, _) = run(bin().args(["verify", "--config"]).arg(config("zero.json")).args(["--grid-n", "0"]));
    assert_eq!(code, 2);

    let scan = write(
        dir.path(),
        "scan.json",
        r#"{"count": 2, "ranges": {"wells": [3, 1], "depth": [-8, -6], "width": [1, 1.2], "offset": [0.3, 0.6]},
            "grid": {"L": 6, "n": 24}}"#,
    );
    assert_eq!(run(bin().args(["scan", "--config"]).arg(&scan)).0, 2);
}

#[test]
fn non_convergence_exits_three_with_partial_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "nc.json",
        r#"{"dimension": 3, "family": "gaussian_well_sum",
            "parameters": {"wells": [{"depth": -6.0, "width": 1.0}]},
            "radial": {"n_points": 400},
            "grid": {"L": 5.0, "n": 10, "tol": 1e-30}}"#,
    );
    let out = dir.path().join("partial.json");
    let (code, o) = run(bin().args(["verify", "--config"]).arg(&cfg).arg("--out").arg(&out));
    assert_eq!(code, 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("did not converge"));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["status"], "failed");
    assert!(r["error"].as_str().unwrap().contains("did not converge"));
    // Stages before the grid solve are kept.
    assert!(r["isotropic"].is_object());
    assert!(r["verdicts"].is_null());
}

#[test]
fn verify_is_deterministic() {
    let run_once = || {
        let (code, o) = run(bin().args(["verify", "--config"]).arg(config("gaussian_well.json")).args(["--grid-n", "20"]));
        assert_eq!(code, 0);
        without_timings(&String::from_utf8(o.stdout).unwrap())
    };
    assert_eq!(run_once(), run_once());
}

#[test]
fn scan_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "scan.json",
        r#"{"count": 2, "construction": "inversion_symmetric",
            "ranges": {"wells": [1, 2], "depth": [-9, -6], "width": [0.9, 1.2], "offset": [0.3, 0.8]},
            "radial": {"n_points": 800}, "grid": {"L": 6, "n": 20}}"#,
    );
    let mut outputs = Vec::new();
    for (tag, jobs) in [("a", "1"), ("b", "2")] {
        let out = dir.path().join(tag);
        let (code, o) = run(bin()
            .args(["scan", "--config"])
            .arg(&cfg)
            .args(["--seed", "42", "--jobs", jobs, "--out"])
            .arg(&out));
        assert_eq!(code, 0, "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(out);
    }
    let read = |p: PathBuf| std::fs::read_to_string(p).unwrap();
    assert_eq!(read(outputs[0].join("summary.csv")), read(outputs[1].join("summary.csv")));
    for i in 0..2 {
        let name = format!("reports/spec_{i:04}.json");
        assert_eq!(
            without_timings(&read(outputs[0].join(&name))),
            without_timings(&read(outputs[1].join(&name)))
        );
    }
    let summary = read(outputs[0].join("summary.csv"));
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.starts_with("index,status,"));
}

#[test]
fn empty_scan_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "scan.json",
        r#"{"count": 0, "ranges": {"wells": [1, 2], "depth": [-9, -6], "width": [0.9, 1.2], "offset": [0.3, 0.8]},
            "grid": {"L": 6, "n": 20}}"#,
    );
    let (code, o) = run(bin().args(["scan", "--config"]).arg(&cfg));
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1);
}

#[test]
fn average_table() {
    let (code, o) = run(bin()
        .args(["average", "--config"])
        .arg(config("harmonic_112.json"))
        .args(["--radii", "0.5,1,2"]));
    assert_eq!(code, 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert!((row[1] - row[0] * row[0]).abs() < 1e-12);
        assert!(row[2] <= 1e-9);
    }
    assert_eq!(run(bin().args(["average", "--config"]).arg(config("zero.json")).arg("--radii=-1")).0, 2);
}
