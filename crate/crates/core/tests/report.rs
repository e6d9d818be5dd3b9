use std::path::PathBuf;

use levelbound::report::{run_scan, run_verify, InequalityReport, RunConfig, ScanConfig};
use levelbound::variational::Verdict;

fn load(name: &str) -> RunConfig {
    RunConfig::from_path(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).unwrap()
}

fn verify(name: &str) -> InequalityReport {
    run_verify(&load(name)).unwrap_or_else(|f| panic!("{name}: {}", f.error))
}

#[test]
fn violated_ground_sets_exit_one() {
    let mut r = verify("zero.json");
    assert_eq!(r.exit_code(), 0);
    r.verdicts.as_mut().unwrap().ground.verdict = Verdict::Violated;
    assert!(r.violated());
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn report_json_round_trips() {
    let r = verify("zero.json");
    let text = r.to_json();
    let back: InequalityReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_json(), text);
    assert!(r.to_json_without_timings().contains("\"timings\": {}"));
}

#[test]
fn isotropic_equalities() {
    let r = verify("isotropic.json");
    let v = r.verdicts.as_ref().unwrap();
    assert_eq!(v.ground.verdict, Verdict::Holds);
    assert_eq!(v.excited.overall.verdict, Verdict::Holds);
    for m in [v.ground.margin.unwrap(), v.excited.overall.margin.unwrap()] {
        assert!(m.value.abs() <= m.error_bar, "{m:?}");
    }
    let var = r.variational.as_ref().unwrap();
    assert!(var.coupling.as_ref().unwrap().norm < 1e-10);
}

#[test]
fn low_symmetry_well_is_not_applicable() {
    let r = verify("cs_well.json");
    let v = r.verdicts.as_ref().unwrap();
    assert_eq!(v.ground.verdict, Verdict::Holds);
    assert_eq!(v.excited.overall.verdict, Verdict::NotApplicable);
    assert!(!r.symmetry.as_ref().unwrap().gate.open());
}

#[test]
fn broken_symmetry_scan() {
    let mut cfg = ScanConfig::from_path(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/scan_broken.json")).unwrap();
    cfg.count = 4;
    let outcome = run_scan(&cfg, None).unwrap();
    assert_eq!(outcome.exit_code(), 0);
    assert_eq!(outcome.count(|r| r.verdicts.as_ref().unwrap().ground.verdict, Verdict::Holds), 4);
    assert_eq!(
        outcome.count(|r| r.verdicts.as_ref().unwrap().excited.overall.verdict, Verdict::NotApplicable),
        4
    );
}
