//! Full pipeline on a tilted Gaussian well, printing the verdicts and
//! writing the JSON report next to the target directory.

use levelbound::report::{run_verify, RunConfig};

const CONFIG: &str = r#"{
  "dimension": 3,
  "family": "gaussian_well_sum",
  "parameters": {
    "wells": [ { "depth": -6.0, "widths": [1.0, 1.3, 0.8], "angles": [0.3, 0.7, 0.0] } ]
  },
  "symmetry": "Ci",
  "radial": { "n_points": 1200 },
  "grid": { "L": 6.0, "n": 32 }
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig::from_json(CONFIG)?;
    let report = match run_verify(&cfg) {
        Ok(r) => r,
        Err(f) => return Err(f.error.into()),
    };
    let v = report.verdicts.as_ref().ok_or("no verdicts")?;
    println!("ground:  {:?} ({})", v.ground.verdict, v.ground.reason);
    println!("excited: {:?} ({})", v.excited.overall.verdict, v.excited.overall.reason);
    println!("bound state exists: {:?}", v.bound_state_exists);
    println!("exit code {}", report.exit_code());
    let path = std::env::temp_dir().join("levelbound_verify_report.json");
    std::fs::write(&path, report.to_json())?;
    println!("report written to {}", path.display());
    Ok(())
}
