//! Config files, the verify pipeline, scans over random potentials and
//! the averaging table, with their JSON and CSV outputs.

mod average;
mod pipeline;
mod scan;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::{CartesianGrid, Existence, ExistenceEvidence, GridConfig, GridLevel};
use crate::perturbation::{FirstOrderShifts, PerturbationConfig, SecondOrder};
use crate::potential::{PotentialConfig, QuadratureConfig};
use crate::radial::FirstExcitedKind;
use crate::symmetry::{InvarianceCheck, SelectionVerdict};
use crate::variational::{
    CouplingMatrix, ExcitedVerdict, HUMatrix, InequalityVerdict, Measured, SymmetryGate, Verdict,
};

pub use average::{run_average, write_average_csv, AverageRow};
pub use pipeline::{run_verify, Failure};
pub use scan::{
    generate_specs, run_scan, Construction, ScanConfig, ScanOutcome, ScanRanges, SummaryRow,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Radial solver settings. `r_max` defaults to the grid half-width so that
/// the ball sits inside the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialConfig {
    #[serde(default)]
    pub r_max: Option<f64>,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default = "default_n_channels")]
    pub n_channels: usize,
    #[serde(default = "default_n_states")]
    pub n_states: usize,
}

fn default_n_points() -> usize {
    2000
}

fn default_n_channels() -> usize {
    3
}

fn default_n_states() -> usize {
    3
}

fn default_seed() -> u64 {
    42
}

impl Default for RadialConfig {
    fn default() -> Self {
        Self {
            r_max: None,
            n_points: default_n_points(),
            n_channels: default_n_channels(),
            n_states: default_n_states(),
        }
    }
}

/// One `verify` run: the potential keys plus solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    pub family: String,
    pub parameters: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinetic_coefficient: Option<f64>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub radial: RadialConfig,
    /// Required by `verify`, ignored by `average`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub perturbation: PerturbationConfig,
    /// Seeds the symmetry-invariance sampling.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Directory for binary dumps of the two lowest grid wavefunctions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(potential: PotentialConfig, grid: GridConfig) -> Self {
        Self {
            dimension: potential.dimension,
            family: potential.family,
            parameters: potential.parameters,
            symmetry: potential.symmetry,
            axis: potential.axis,
            kinetic_coefficient: potential.kinetic_coefficient,
            quadrature: QuadratureConfig::default(),
            radial: RadialConfig::default(),
            grid: Some(grid),
            perturbation: PerturbationConfig::default(),
            seed: default_seed(),
            dump: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn potential(&self) -> PotentialConfig {
        PotentialConfig {
            dimension: self.dimension,
            family: self.family.clone(),
            parameters: self.parameters.clone(),
            symmetry: self.symmetry.clone(),
            axis: self.axis.clone(),
            kinetic_coefficient: self.kinetic_coefficient,
        }
    }

    /// Applies `--grid-n` / `--grid-L`. A new n drops an explicit coarse n
    /// so the default 3n/4 pairing follows.
    pub fn override_grid(&mut self, n: Option<usize>, half_width: Option<f64>) -> Result<()> {
        if n.is_none() && half_width.is_none() {
            return Ok(());
        }
        let grid = self
            .grid
            .as_mut()
            .ok_or_else(|| Error::Config("grid overrides need a grid block".into()))?;
        if let Some(n) = n {
            grid.n = n;
            grid.n_coarse = None;
        }
        if let Some(l) = half_width {
            grid.half_width = l;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Complete,
    Failed,
}

/// Solver settings as actually used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Settings {
    pub quadrature: QuadratureConfig,
    pub radial: RadialConfig,
    pub grid: GridConfig,
    pub perturbation: PerturbationConfig,
    pub seed: u64,
}

/// Every tolerance a verdict depends on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    pub zero_mean: Option<f64>,
    pub degeneracy_relative: f64,
    pub radial_tail: f64,
    pub grid_boundary: f64,
    pub eigen_residual_relative: f64,
    pub eigen_residual_absolute: Option<f64>,
    pub symmetry_invariance: f64,
    pub cross_element_zero: Option<f64>,
    pub ground_expectation_zero: Option<f64>,
    pub trace_relative: f64,
    /// The trace bound actually applied, including the rounding floor.
    pub trace_absolute: Option<f64>,
    pub lambda_relative: f64,
    pub hylleraas_undheim_diagonal: f64,
    pub second_order_sign: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroMeanReport {
    pub n_radii: usize,
    pub max_residual: f64,
    pub worst_radius: f64,
    pub tolerance: f64,
    /// Same measurement under a quadrature of twice the order, not gated.
    pub refined_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelRow {
    pub channel: usize,
    pub radial_index: usize,
    pub energy: f64,
    pub error_bar: f64,
    pub bound: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsotropicReport {
    pub r_max: f64,
    pub n_points: usize,
    pub box_doublings: usize,
    pub box_converged: bool,
    /// V̄ at the wall; states below it minus their bar count as bound.
    pub continuum_threshold: f64,
    pub lowest: Measured,
    pub ground: Option<Measured>,
    pub first_excited: Option<Measured>,
    pub first_excited_kind: Option<FirstExcitedKind>,
    pub bound_count: usize,
    pub states: Vec<LevelRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FullReport {
    pub grid: CartesianGrid,
    pub n_coarse: usize,
    pub enlargements: usize,
    pub box_converged: bool,
    pub boundary_ratio: f64,
    pub spectral_scale: f64,
    pub continuum_threshold: f64,
    pub ground: Measured,
    pub ground_degeneracy: usize,
    pub first_excited: Option<Measured>,
    pub first_excited_degeneracy: usize,
    pub bound_count: usize,
    pub levels: Vec<GridLevel>,
    pub residual_norms: Vec<f64>,
    pub existence: ExistenceEvidence,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub dumps: Vec<PathBuf>,
}

/// A 2×2 Hylleraas–Undheim matrix with its trial space and the two bound
/// checks E₀ ≤ E′₁ + ε and E₁ ≤ E′₂ + ε.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HUReport {
    pub trial: String,
    pub matrix: HUMatrix,
    pub tolerance: f64,
    pub ground_bound_ok: bool,
    pub excited_bound_ok: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariationalReport {
    /// ⟨u₀|ΔV|u₀⟩, zero in the continuum. Absent when V̄ does not bind.
    pub ground_expectation: Option<f64>,
    pub ground_expectation_ok: Option<bool>,
    pub cross_elements: Vec<f64>,
    pub max_cross_element: Option<f64>,
    pub p_orthonormality_error: Option<f64>,
    pub p_overlap_with_ground: Option<f64>,
    pub coupling: Option<CouplingMatrix>,
    pub trace_ok: Option<bool>,
    pub lambda1_ok: Option<bool>,
    pub hylleraas_undheim: Vec<HUReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub declared: Option<String>,
    pub selection: Option<SelectionVerdict>,
    pub invariance: Option<InvarianceCheck>,
    pub gate: SymmetryGate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub first_order: FirstOrderShifts,
    pub target: String,
    pub second_order: Option<SecondOrder>,
    pub gated: bool,
    /// ΔE₁⁽²⁾ ≤ guard; asserted only when gated.
    pub sign_ok: Option<bool>,
    /// The full sum is not above the half-cutoff sum.
    pub cutoff_monotone: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdicts {
    pub ground: InequalityVerdict,
    pub excited: ExcitedVerdict,
    pub bound_state_exists: Existence,
}

/// Everything `verify` learned about one potential.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityReport {
    pub schema_version: u32,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub potential: PotentialConfig,
    pub settings: Settings,
    pub tolerances: Tolerances,
    pub zero_mean: Option<ZeroMeanReport>,
    pub isotropic: Option<IsotropicReport>,
    pub full: Option<FullReport>,
    pub variational: Option<VariationalReport>,
    pub symmetry: Option<SymmetryReport>,
    pub perturbation: Option<PerturbationReport>,
    pub verdicts: Option<Verdicts>,
    /// Set when Ē₀ ≥ E₀ comes out violated; that inequality has no
    /// preconditions, so this always points at a defect.
    pub bug: bool,
    /// Wall-clock seconds per stage. Not reproducible; excluded from
    /// determinism comparisons.
    pub timings: BTreeMap<String, f64>,
}

impl InequalityReport {
    /// True if any verdict is "violated".
    pub fn violated(&self) -> bool {
        self.verdicts.as_ref().is_some_and(|v| {
            v.ground.verdict == Verdict::Violated || v.excited.overall.verdict == Verdict::Violated
        })
    }

    /// 0 if nothing is violated, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.violated() {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize") + "\n"
    }

    /// The JSON with the timings blanked, for reproducibility checks.
    pub fn to_json_without_timings(&self) -> String {
        let mut copy = self.clone();
        copy.timings.clear();
        copy.to_json()
    }
}

/// Exit code for a failed run: 2 for bad input, 3 for solver trouble.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } | Error::Diagnostic(_) => 3,
        _ => 2,
    }
}
