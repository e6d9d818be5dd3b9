//! A small reproducible scan of inversion-symmetric Gaussian sums.

use levelbound::report::{run_scan, ScanConfig};
use levelbound::variational::Verdict;

const CONFIG: &str = r#"{
  "count": 3,
  "seed": 7,
  "construction": "inversion_symmetric",
  "ranges": { "wells": [1, 2], "depth": [-10.0, -6.0], "width": [0.9, 1.3], "offset": [0.3, 1.0] },
  "radial": { "n_points": 1200 },
  "grid": { "L": 6.0, "n": 48 }
}"#;

fn main() -> levelbound::Result<()> {
    let cfg = ScanConfig::from_json(CONFIG)?;
    let outcome = run_scan(&cfg, Some(1))?;
    outcome.write_summary(std::io::stdout())?;
    println!(
        "ground holds {}/{}, excited holds {}/{}",
        outcome.count(|r| r.verdicts.as_ref().map_or(Verdict::Inconclusive, |v| v.ground.verdict), Verdict::Holds),
        outcome.reports.len(),
        outcome.count(|r| r.verdicts.as_ref().map_or(Verdict::Inconclusive, |v| v.excited.overall.verdict), Verdict::Holds),
        outcome.reports.len()
    );
    Ok(())
}
