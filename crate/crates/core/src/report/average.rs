use std::io::Write;

use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::error::{input_err, Error, Result};
use crate::potential::{PotentialField, PotentialSpec};

/// One row of the averaging table: V̄(r) and |∮ΔV dΩ| at that radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageRow {
    pub r: f64,
    pub mean: f64,
    pub residual: f64,
}

/// V̄ and the zero-mean residual at each radius, using the configured
/// quadrature. Radii beyond the interpolation table are averaged directly.
pub fn run_average(cfg: &RunConfig, radii: &[f64]) -> Result<Vec<AverageRow>> {
    let spec = PotentialSpec::from_config(&cfg.potential()).map_err(|e| match e {
        Error::Input(m) => Error::Config(m),
        other => other,
    })?;
    if radii.is_empty() {
        return input_err("need at least one radius");
    }
    if let Some(r) = radii.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return input_err(format!("radii must be finite and ≥ 0, got {r}"));
    }
    let dim = spec.dimension();
    let quad = cfg.quadrature.build(dim)?;
    let r_max = radii.iter().copied().fold(0.0, f64::max).max(1e-3);
    let field = PotentialField::new(spec, quad, r_max, r_max / 4096.0)?;
    Ok(radii
        .iter()
        .map(|&r| AverageRow {
            r,
            mean: field.mean(r),
            residual: field.delta_integral(field.quadrature(), r).abs(),
        })
        .collect())
}

/// Writes `r,mean,residual` rows.
pub fn write_average_csv(rows: &[AverageRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
