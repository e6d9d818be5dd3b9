use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    error_exit_code, run_verify, Failure, InequalityReport, PerturbationConfig, RadialConfig,
    RunConfig, Status,
};
use crate::error::{input_err, Error, Result};
use crate::grid::GridConfig;
use crate::potential::{GaussianSumParams, GaussianWellParams, QuadratureConfig};
use crate::variational::Verdict;

/// How the random Gaussian sums are put together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// Independent wells anywhere; no symmetry declared.
    #[default]
    Generic,
    /// One well at the origin plus mirror pairs at ±c; declares inversion.
    InversionSymmetric,
    /// One well at the origin plus shallower unpaired wells off-centre.
    BrokenSymmetry,
}

/// Closed ranges the random parameters are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRanges {
    /// Total number of wells.
    pub wells: [usize; 2],
    /// Well depth (negative for attraction).
    pub depth: [f64; 2],
    /// Per-axis width σ.
    pub width: [f64; 2],
    /// Distance of off-centre wells from the origin.
    pub offset: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub count: usize,
    #[serde(default = "super::default_seed")]
    pub seed: u64,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default)]
    pub construction: Construction,
    pub ranges: ScanRanges,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub radial: RadialConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub perturbation: PerturbationConfig,
}

fn default_dimension() -> usize {
    3
}

impl ScanConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<()> {
        let r = &self.ranges;
        let ordered = |a: [f64; 2]| a[0].is_finite() && a[1].is_finite() && a[0] <= a[1];
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::Config("dimension must be 1, 2 or 3".into()));
        }
        if r.wells[0] == 0 || r.wells[0] > r.wells[1] {
            return Err(Error::Config("ranges.wells must satisfy 1 ≤ lo ≤ hi".into()));
        }
        if !ordered(r.depth) || !ordered(r.width) || !ordered(r.offset) {
            return Err(Error::Config("every range needs finite lo ≤ hi".into()));
        }
        if r.width[0] <= 0.0 || r.offset[0] < 0.0 {
            return Err(Error::Config("widths must be > 0 and offsets ≥ 0".into()));
        }
        self.grid
            .validate(self.dimension)
            .map_err(|e| Error::Config(e.to_string()))
    }
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn draw(rng: &mut ChaCha8Rng, range: [f64; 2]) -> f64 {
    if range[0] == range[1] {
        range[0]
    } else {
        round4(rng.gen_range(range[0]..=range[1]))
    }
}

/// A uniformly random direction scaled to a length drawn from `offset`.
fn draw_center(rng: &mut ChaCha8Rng, dim: usize, offset: [f64; 2]) -> Vec<f64> {
    let len = draw(rng, offset);
    let dir: Vec<f64> = match dim {
        1 => vec![if rng.gen_bool(0.5) { 1.0 } else { -1.0 }],
        2 => {
            let phi = rng.gen_range(0.0..2.0 * PI);
            vec![phi.cos(), phi.sin()]
        }
        _ => {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let phi = rng.gen_range(0.0..2.0 * PI);
            let s = (1.0 - z * z).sqrt();
            vec![s * phi.cos(), s * phi.sin(), z]
        }
    };
    dir.into_iter().map(|d| round4(len * d)).collect()
}

fn draw_well(rng: &mut ChaCha8Rng, dim: usize, ranges: &ScanRanges, depth_scale: f64) -> GaussianWellParams {
    let depth = round4(depth_scale * draw(rng, ranges.depth));
    let widths = (0..dim).map(|_| draw(rng, ranges.width)).collect();
    let angles = match dim {
        3 => Some((0..3).map(|_| round4(rng.gen_range(0.0..2.0 * PI))).collect()),
        2 => Some(vec![round4(rng.gen_range(0.0..2.0 * PI))]),
        _ => None,
    };
    GaussianWellParams {
        depth,
        width: None,
        widths: Some(widths),
        center: None,
        angles,
    }
}

fn inversion_group(dim: usize) -> &'static str {
    if dim == 2 {
        "C2(2d)"
    } else {
        "Ci"
    }
}

/// Draws `count` run configs in a fixed order from `seed`.
pub fn generate_specs(cfg: &ScanConfig) -> Result<Vec<RunConfig>> {
    cfg.validate()?;
    let dim = cfg.dimension;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.count);
    for index in 0..cfg.count {
        let n = rng.gen_range(cfg.ranges.wells[0]..=cfg.ranges.wells[1]);
        let mut wells = Vec::with_capacity(n);
        let mut symmetry = None;
        match cfg.construction {
            Construction::Generic => {
                for _ in 0..n {
                    let mut w = draw_well(&mut rng, dim, &cfg.ranges, 1.0);
                    w.center = Some(draw_center(&mut rng, dim, cfg.ranges.offset));
                    wells.push(w);
                }
            }
            Construction::InversionSymmetric => {
                wells.push(draw_well(&mut rng, dim, &cfg.ranges, 1.0));
                for _ in 0..(n - 1) / 2 {
                    let w = draw_well(&mut rng, dim, &cfg.ranges, 1.0);
                    let c = draw_center(&mut rng, dim, cfg.ranges.offset);
                    let mirrored = c.iter().map(|x| -x).collect();
                    wells.push(GaussianWellParams {
                        center: Some(c),
                        ..w.clone()
                    });
                    wells.push(GaussianWellParams {
                        center: Some(mirrored),
                        ..w
                    });
                }
                symmetry = Some(inversion_group(dim).to_string());
            }
            Construction::BrokenSymmetry => {
                wells.push(draw_well(&mut rng, dim, &cfg.ranges, 1.0));
                for _ in 1..n.max(2) {
                    let mut w = draw_well(&mut rng, dim, &cfg.ranges, 0.5);
                    w.center = Some(draw_center(&mut rng, dim, cfg.ranges.offset));
                    wells.push(w);
                }
            }
        }
        let parameters = serde_json::to_value(GaussianSumParams { wells })?;
        out.push(RunConfig {
            dimension: dim,
            family: "gaussian_well_sum".into(),
            parameters,
            symmetry,
            axis: None,
            kinetic_coefficient: None,
            quadrature: cfg.quadrature,
            radial: cfg.radial,
            grid: Some(cfg.grid),
            perturbation: cfg.perturbation,
            seed: cfg.seed.wrapping_add(index as u64),
            dump: None,
        });
    }
    Ok(out)
}

/// One CSV line per spec. Empty cells mean "not computed".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub index: usize,
    pub status: String,
    pub n_wells: usize,
    pub symmetry: String,
    pub parameters: String,
    pub ebar0: Option<f64>,
    pub ebar0_err: Option<f64>,
    pub e0: Option<f64>,
    pub e0_err: Option<f64>,
    pub ground_margin: Option<f64>,
    pub ground_margin_err: Option<f64>,
    pub ebar1: Option<f64>,
    pub ebar1_err: Option<f64>,
    pub e1: Option<f64>,
    pub e1_err: Option<f64>,
    pub excited_margin: Option<f64>,
    pub excited_margin_err: Option<f64>,
    pub first_excited_kind: String,
    pub ground: String,
    pub excited: String,
    pub bound_state_exists: String,
    pub max_cross_element: Option<f64>,
    pub lambda1: Option<f64>,
    pub trace: Option<f64>,
    pub second_order: Option<f64>,
}

fn tag<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

impl SummaryRow {
    fn from_report(index: usize, spec: &RunConfig, report: Option<&InequalityReport>) -> Self {
        let n_wells = spec.parameters["wells"].as_array().map_or(0, Vec::len);
        let mut row = SummaryRow {
            index,
            status: "failed".into(),
            n_wells,
            symmetry: spec.symmetry.clone().unwrap_or_default(),
            parameters: spec.parameters.to_string(),
            ebar0: None,
            ebar0_err: None,
            e0: None,
            e0_err: None,
            ground_margin: None,
            ground_margin_err: None,
            ebar1: None,
            ebar1_err: None,
            e1: None,
            e1_err: None,
            excited_margin: None,
            excited_margin_err: None,
            first_excited_kind: String::new(),
            ground: String::new(),
            excited: String::new(),
            bound_state_exists: String::new(),
            max_cross_element: None,
            lambda1: None,
            trace: None,
            second_order: None,
        };
        let Some(r) = report else { return row };
        row.status = tag(&r.status);
        if let Some(iso) = &r.isotropic {
            row.ebar0 = Some(iso.lowest.value);
            row.ebar0_err = Some(iso.lowest.error_bar);
            row.ebar1 = iso.first_excited.map(|m| m.value);
            row.ebar1_err = iso.first_excited.map(|m| m.error_bar);
            row.first_excited_kind = iso.first_excited_kind.map(|k| tag(&k)).unwrap_or_default();
        }
        if let Some(full) = &r.full {
            row.e0 = Some(full.ground.value);
            row.e0_err = Some(full.ground.error_bar);
            row.e1 = full.first_excited.map(|m| m.value);
            row.e1_err = full.first_excited.map(|m| m.error_bar);
        }
        if let Some(v) = &r.verdicts {
            row.ground_margin = v.ground.margin.map(|m| m.value);
            row.ground_margin_err = v.ground.margin.map(|m| m.error_bar);
            row.excited_margin = v.excited.overall.margin.map(|m| m.value);
            row.excited_margin_err = v.excited.overall.margin.map(|m| m.error_bar);
            row.ground = tag(&v.ground.verdict);
            row.excited = tag(&v.excited.overall.verdict);
            row.bound_state_exists = tag(&v.bound_state_exists);
        }
        if let Some(var) = &r.variational {
            row.max_cross_element = var.max_cross_element;
            row.lambda1 = var.coupling.as_ref().map(|m| m.lowest());
            row.trace = var.coupling.as_ref().map(|m| m.trace);
        }
        if let Some(p) = &r.perturbation {
            row.second_order = p.second_order.as_ref().map(|s| s.value);
        }
        row
    }
}

/// The reports of a scan, in spec order.
#[derive(Debug)]
pub struct ScanOutcome {
    pub specs: Vec<RunConfig>,
    pub reports: Vec<std::result::Result<InequalityReport, Failure>>,
    pub rows: Vec<SummaryRow>,
}

impl ScanOutcome {
    /// 1 if any verdict is violated, else 3 (or 2) if any run failed, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.reports.iter().any(|r| r.as_ref().is_ok_and(|r| r.violated())) {
            return 1;
        }
        self.reports
            .iter()
            .filter_map(|r| r.as_ref().err())
            .map(|f| error_exit_code(&f.error))
            .max()
            .unwrap_or(0)
    }

    pub fn count(&self, pick: impl Fn(&InequalityReport) -> Verdict, verdict: Verdict) -> usize {
        self.completed().filter(|r| pick(r) == verdict).count()
    }

    pub fn completed(&self) -> impl Iterator<Item = &InequalityReport> {
        self.reports.iter().filter_map(|r| r.as_ref().ok())
    }

    pub fn write_summary(&self, out: impl Write) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(SUMMARY_HEADER)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// `summary.csv` plus `reports/spec_NNNN.json` under `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let reports = dir.join("reports");
        std::fs::create_dir_all(&reports)?;
        self.write_summary(std::fs::File::create(dir.join("summary.csv"))?)?;
        for (i, r) in self.reports.iter().enumerate() {
            let text = match r {
                Ok(rep) => rep.to_json(),
                Err(Failure {
                    partial: Some(p), ..
                }) => p.to_json(),
                Err(f) => serde_json::to_string_pretty(&serde_json::json!({
                    "schema_version": super::SCHEMA_VERSION,
                    "status": Status::Failed,
                    "error": f.error.to_string(),
                }))? + "\n",
            };
            std::fs::write(reports.join(format!("spec_{i:04}.json")), text)?;
        }
        Ok(())
    }
}

const SUMMARY_HEADER: [&str; 25] = [
    "index",
    "status",
    "n_wells",
    "symmetry",
    "parameters",
    "ebar0",
    "ebar0_err",
    "e0",
    "e0_err",
    "ground_margin",
    "ground_margin_err",
    "ebar1",
    "ebar1_err",
    "e1",
    "e1_err",
    "excited_margin",
    "excited_margin_err",
    "first_excited_kind",
    "ground",
    "excited",
    "bound_state_exists",
    "max_cross_element",
    "lambda1",
    "trace",
    "second_order",
];

/// Draws the specs and verifies each, at most `jobs` at a time (all
/// available cores when `None`). Output order follows the draw order.
pub fn run_scan(cfg: &ScanConfig, jobs: Option<usize>) -> Result<ScanOutcome> {
    let specs = generate_specs(cfg)?;
    if jobs == Some(0) {
        return input_err("--jobs must be ≥ 1");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let reports: Vec<_> = pool.install(|| specs.par_iter().map(run_verify).collect());
    let rows = specs
        .iter()
        .zip(&reports)
        .enumerate()
        .map(|(i, (spec, r))| {
            let report = match r {
                Ok(rep) => Some(rep),
                Err(f) => f.partial.as_deref(),
            };
            SummaryRow::from_report(i, spec, report)
        })
        .collect();
    Ok(ScanOutcome {
        specs,
        reports,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(construction: Construction, count: usize) -> ScanConfig {
        ScanConfig {
            count,
            seed: 42,
            dimension: 3,
            construction,
            ranges: ScanRanges {
                wells: [1, 3],
                depth: [-12.0, -6.0],
                width: [0.8, 1.4],
                offset: [0.5, 1.5],
            },
            quadrature: QuadratureConfig::default(),
            radial: RadialConfig::default(),
            grid: GridConfig::new(6.0, 24),
            perturbation: PerturbationConfig::default(),
        }
    }

    #[test]
    fn draws_are_reproducible() {
        let a = generate_specs(&config(Construction::Generic, 5)).unwrap();
        let b = generate_specs(&config(Construction::Generic, 5)).unwrap();
        assert_eq!(a, b);
        let mut other = config(Construction::Generic, 5);
        other.seed = 43;
        assert_ne!(a, generate_specs(&other).unwrap());
    }

    #[test]
    fn inversion_pairs_mirror() {
        for spec in generate_specs(&config(Construction::InversionSymmetric, 10)).unwrap() {
            let p: GaussianSumParams = serde_json::from_value(spec.parameters).unwrap();
            assert_eq!(p.wells.len() % 2, 1);
            assert!(p.wells[0].center.is_none());
            for pair in p.wells[1..].chunks(2) {
                let c0 = pair[0].center.as_ref().unwrap();
                let c1 = pair[1].center.as_ref().unwrap();
                assert!(c0.iter().zip(c1).all(|(a, b)| *a == -*b));
                assert_eq!(pair[0].widths, pair[1].widths);
            }
            assert_eq!(spec.symmetry.as_deref(), Some("Ci"));
        }
    }

    #[test]
    fn broken_construction_has_unpaired_wells() {
        for spec in generate_specs(&config(Construction::BrokenSymmetry, 5)).unwrap() {
            let p: GaussianSumParams = serde_json::from_value(spec.parameters).unwrap();
            assert!(p.wells.len() >= 2);
            assert!(spec.symmetry.is_none());
        }
    }

    #[test]
    fn empty_scan_exits_zero() {
        let out = run_scan(&config(Construction::Generic, 0), Some(1)).unwrap();
        assert!(out.reports.is_empty());
        assert_eq!(out.exit_code(), 0);
        let mut buf = Vec::new();
        out.write_summary(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
    }

    #[test]
    fn bad_ranges_rejected() {
        let mut c = config(Construction::Generic, 1);
        c.ranges.width = [1.0, 0.5];
        assert!(matches!(generate_specs(&c), Err(Error::Config(_))));
        c.ranges.width = [0.5, 1.0];
        c.ranges.wells = [0, 2];
        assert!(generate_specs(&c).is_err());
    }
}
