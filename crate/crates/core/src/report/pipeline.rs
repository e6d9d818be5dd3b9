use std::collections::BTreeMap;
use std::time::Instant;

use super::{
    FullReport, HUReport, InequalityReport, IsotropicReport, LevelRow, PerturbationReport,
    RunConfig, Settings, Status, SymmetryReport, Tolerances, VariationalReport, Verdicts,
    ZeroMeanReport, SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::grid::{
    bound_state_exists, clusters, solve_grid, write_wavefunction, GridConfig, GridSpectrum,
    BOUNDARY_TOLERANCE, DEGENERACY_TOLERANCE,
};
use crate::perturbation::{first_order_shifts, second_order_excited, Target};
use crate::potential::field::zero_mean_residuals;
use crate::potential::{
    verify_zero_mean, PotentialField, PotentialSpec, QuadratureConfig, QuadratureScheme,
};
use crate::radial::{
    isotropic_spectrum, IsotropicSpectrum, RadialEigenstate, RadialGrid, MAX_BOX_DOUBLINGS,
    RADIAL_TAIL_TOLERANCE,
};
use crate::symmetry::{selection_rule, verify_invariance, INVARIANCE_TOLERANCE};
use crate::variational::{
    coupling_matrix_from, delta_on_grid, hylleraas_undheim_bounds, matrix_element,
    transfer_isotropic, verify_excited_inequality, verify_ground_inequality, CouplingMatrix,
    ExcitedInputs, Measured, PBasis, SymmetryGate, Verdict,
};

const ZERO_MEAN_RELATIVE: f64 = 1e-8;
const ZERO_MEAN_RADII: usize = 64;
const CROSS_RELATIVE: f64 = 1e-6;
const EXPECTATION_RELATIVE: f64 = 1e-6;
const TRACE_RELATIVE: f64 = 1e-8;
const LAMBDA_RELATIVE: f64 = 1e-12;
const ROUNDOFF_FLOOR: f64 = 16.0 * f64::EPSILON;
const HU_DIAGONAL: f64 = 1e-10;
const SECOND_ORDER_GUARD: f64 = 1e-10;
const INVARIANCE_SAMPLES: usize = 2000;

/// A run that stopped early. `partial` holds whatever was computed before
/// the failure, or nothing if the config itself was rejected.
#[derive(Debug)]
pub struct Failure {
    pub error: Error,
    pub partial: Option<Box<InequalityReport>>,
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        super::error_exit_code(&self.error)
    }
}

struct Prepared {
    spec: PotentialSpec,
    grid: GridConfig,
    radial: RadialGrid,
    n_channels: usize,
}

fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let config_err = |e: Error| match e {
        Error::Input(m) => Error::Config(m),
        other => other,
    };
    let spec = PotentialSpec::from_config(&cfg.potential()).map_err(config_err)?;
    let dim = spec.dimension();
    let grid = cfg
        .grid
        .ok_or_else(|| Error::Config("verify needs a `grid` block".into()))?;
    grid.validate(dim).map_err(config_err)?;
    let r_max = cfg.radial.r_max.unwrap_or(grid.half_width);
    let radial = RadialGrid::new(dim, r_max, cfg.radial.n_points).map_err(config_err)?;
    let n_channels = if dim == 1 { 2 } else { cfg.radial.n_channels };
    cfg.quadrature.build(dim).map_err(config_err)?;
    Ok(Prepared {
        spec,
        grid,
        radial,
        n_channels,
    })
}

fn measured(s: &RadialEigenstate) -> Measured {
    Measured::new(s.energy, s.error_bar)
}

/// Runs the whole pipeline for one config: angular average and its
/// zero-mean gate, the isotropic spectrum, the grid spectrum, the matrix
/// elements, symmetry, perturbation theory and the verdicts.
pub fn run_verify(cfg: &RunConfig) -> std::result::Result<InequalityReport, Failure> {
    let prep = prepare(cfg).map_err(|error| Failure {
        error,
        partial: None,
    })?;
    let mut report = InequalityReport {
        schema_version: SCHEMA_VERSION,
        status: Status::Complete,
        error: None,
        potential: prep.spec.to_config(),
        settings: Settings {
            quadrature: cfg.quadrature,
            radial: super::RadialConfig {
                r_max: Some(prep.radial.r_max),
                n_channels: prep.n_channels,
                ..cfg.radial
            },
            grid: prep.grid,
            perturbation: cfg.perturbation,
            seed: cfg.seed,
        },
        tolerances: Tolerances {
            zero_mean: None,
            degeneracy_relative: DEGENERACY_TOLERANCE,
            radial_tail: RADIAL_TAIL_TOLERANCE,
            grid_boundary: BOUNDARY_TOLERANCE,
            eigen_residual_relative: prep.grid.tol,
            eigen_residual_absolute: None,
            symmetry_invariance: INVARIANCE_TOLERANCE,
            cross_element_zero: None,
            ground_expectation_zero: None,
            trace_relative: TRACE_RELATIVE,
            trace_absolute: None,
            lambda_relative: LAMBDA_RELATIVE,
            hylleraas_undheim_diagonal: HU_DIAGONAL,
            second_order_sign: SECOND_ORDER_GUARD,
        },
        zero_mean: None,
        isotropic: None,
        full: None,
        variational: None,
        symmetry: None,
        perturbation: None,
        verdicts: None,
        bug: false,
        timings: BTreeMap::new(),
    };
    let start = Instant::now();
    let outcome = execute(cfg, prep, &mut report);
    report
        .timings
        .insert("total".into(), start.elapsed().as_secs_f64());
    match outcome {
        Ok(()) => Ok(report),
        Err(error) => {
            report.status = Status::Failed;
            report.error = Some(error.to_string());
            Err(Failure {
                error,
                partial: Some(Box::new(report)),
            })
        }
    }
}

struct Stopwatch<'a> {
    timings: &'a mut BTreeMap<String, f64>,
    last: Instant,
}

impl Stopwatch<'_> {
    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.timings
            .insert(name.into(), (now - self.last).as_secs_f64());
        self.last = now;
    }
}

fn execute(cfg: &RunConfig, prep: Prepared, report: &mut InequalityReport) -> Result<()> {
    let mut timings = BTreeMap::new();
    let result = stages(cfg, prep, report, &mut timings);
    report.timings.extend(timings);
    result
}

fn stages(
    cfg: &RunConfig,
    prep: Prepared,
    report: &mut InequalityReport,
    timings: &mut BTreeMap<String, f64>,
) -> Result<()> {
    let mut clock = Stopwatch {
        timings,
        last: Instant::now(),
    };
    let dim = prep.spec.dimension();
    let declared = prep.spec.declared_symmetry();
    let grid_cfg = prep.grid;

    // Angular average, tabulated out to the far corner of the doubled box
    // and the largest radial box the tail rule may ask for.
    let quad = cfg.quadrature.build(dim)?;
    let box_reach = 2.0 * grid_cfg.half_width * 1.5f64.powi(grid_cfg.max_enlargements as i32);
    let radial_reach = prep.radial.r_max * f64::from(1u32 << MAX_BOX_DOUBLINGS);
    let table_radius = (box_reach * (dim as f64).sqrt()).max(radial_reach);
    let field = PotentialField::new(prep.spec, quad, table_radius, prep.radial.step())?;
    clock.lap("average");

    // Zero-mean gate, at radii off the table nodes.
    let radii: Vec<f64> = (0..ZERO_MEAN_RADII)
        .map(|j| prep.radial.r_max * (j as f64 + 0.37) / ZERO_MEAN_RADII as f64)
        .collect();
    let measure = field.quadrature().integrate(|_| 1.0);
    let scale = radii
        .iter()
        .map(|&r| field.mean(r).abs())
        .fold(1.0, f64::max);
    let tolerance = ZERO_MEAN_RELATIVE * measure * scale;
    report.tolerances.zero_mean = Some(tolerance);
    let gate = verify_zero_mean(&field, field.quadrature(), &radii, tolerance)?;
    let refined_quad = QuadratureConfig {
        scheme: QuadratureScheme::ProductGaussTrapezoid,
        polar_order: 2 * cfg.quadrature.polar_order.max(4),
        azimuthal_order: None,
    }
    .build(dim)?;
    let refined = zero_mean_residuals(&field, &refined_quad, &radii)?;
    report.zero_mean = Some(ZeroMeanReport {
        n_radii: radii.len(),
        max_residual: gate.max_residual,
        worst_radius: gate.worst_radius,
        tolerance,
        refined_residual: refined.max_residual,
    });
    clock.lap("zero_mean");

    let spectrum = isotropic_spectrum(&field, &prep.radial, prep.n_channels, cfg.radial.n_states)?;
    report.isotropic = Some(isotropic_report(&field, &spectrum));
    clock.lap("radial");

    let gs = solve_grid(&field, &grid_cfg)?;
    clock.lap("grid");
    let existence = bound_state_exists(&field, &grid_cfg, Some(&gs))?;
    clock.lap("existence");
    let dumps = match &cfg.dump {
        Some(dir) => dump_wavefunctions(dir, &gs)?,
        None => Vec::new(),
    };
    let full = full_report(&gs, existence, dumps);
    let spectral_scale = gs.spectral_scale;
    report.tolerances.eigen_residual_absolute = Some(gs.residual_tolerance);
    let e0 = full.ground;
    let e1 = full.first_excited;
    let e1_bound = e1.is_some_and(|e| e.value < full.continuum_threshold - e.error_bar);
    report.full = Some(full);

    let lowest = measured(&spectrum.states[0]);
    let box_ok = spectrum.box_converged && gs.box_converged;
    let e_bar1_state = spectrum.first_excited_state();
    let e_bar1 = e_bar1_state.map(measured);
    let kind = spectrum.first_excited_kind;

    // Matrix elements on the fine grid.
    let fine = gs.fine;
    let cell = fine.cell_volume();
    let dv = delta_on_grid(&field, &fine);
    let expectation_zero = EXPECTATION_RELATIVE * spectral_scale;
    report.tolerances.ground_expectation_zero = Some(expectation_zero);
    let ground_state = spectrum.ground_state();
    let u0 = ground_state.map(|g| transfer_isotropic(g, &fine)).transpose()?;
    let p_state = spectrum.p_state();
    let pbasis = p_state.map(|p| PBasis::from_radial(p, &fine)).transpose()?;
    let coupling = pbasis.as_ref().map(|pb| coupling_matrix_from(pb, &dv)).transpose()?;
    let cross_zero = CROSS_RELATIVE
        * (lowest.value.abs()
            + e_bar1.or(p_state.map(measured)).map_or(0.0, |e| e.value.abs())
            + spectral_scale);
    report.tolerances.cross_element_zero = Some(cross_zero);
    report.tolerances.trace_absolute = coupling.as_ref().map(|m| trace_tolerance(m, spectral_scale));
    let mut cross = Vec::new();
    if let (Some(u0), Some(pb)) = (&u0, &pbasis) {
        for f in pb.functions() {
            cross.push(matrix_element(u0, &dv, f, cell)?);
        }
    }
    let max_cross = (!cross.is_empty()).then(|| cross.iter().fold(0.0f64, |m, c| m.max(c.abs())));
    clock.lap("matrix_elements");

    // Symmetry gate.
    let mut selection = declared.map(|g| selection_rule(g, dim)).transpose()?;
    let invariance = declared
        .map(|g| {
            let radius = prep.radial.r_max.min(grid_cfg.half_width);
            verify_invariance(&field, g, INVARIANCE_SAMPLES, radius, cfg.seed)
        })
        .transpose()?;
    let numerically_zero = max_cross.is_some_and(|c| c <= cross_zero);
    if let Some(sel) = selection.as_mut() {
        sel.numerically_confirmed = max_cross.map(|_| numerically_zero);
        sel.max_cross_element = max_cross;
    }
    let gate = SymmetryGate {
        guaranteed: selection.as_ref().is_some_and(|s| s.guaranteed_zero)
            && invariance.as_ref().is_some_and(|i| i.accepted),
        numerically_zero,
    };
    report.symmetry = Some(SymmetryReport {
        declared: declared.map(|g| g.to_string()),
        selection,
        invariance,
        gate,
    });
    clock.lap("symmetry");

    // Hylleraas–Undheim matrices for the p and s trial spaces.
    let mut hu = Vec::new();
    let mut ground_expectation = None;
    if let (Some(u0), Some(g)) = (&u0, ground_state) {
        ground_expectation = Some(matrix_element(u0, &dv, u0, cell)?);
        let e_bar0 = measured(g);
        let mut push = |trial: &str, upper: Measured, h12: f64, diag: f64| -> Result<()> {
            let matrix = hylleraas_undheim_bounds(e_bar0.value, upper.value, h12, diag)?;
            let eps_ground = e0.error_bar + e_bar0.error_bar + upper.error_bar;
            let excited_bound_ok = e1.filter(|_| e1_bound).map(|e1| {
                let eps = eps_ground + e1.error_bar;
                e1.value <= matrix.eigenvalues[1] + eps
            });
            hu.push(HUReport {
                trial: trial.into(),
                matrix,
                tolerance: eps_ground + e1.map_or(0.0, |e| e.error_bar),
                ground_bound_ok: e0.value <= matrix.eigenvalues[0] + eps_ground,
                excited_bound_ok,
            });
            Ok(())
        };
        if let (Some(pb), Some(m), Some(p)) = (&pbasis, &coupling, p_state) {
            let u1 = pb.combination(&m.minimizer);
            let h12 = matrix_element(u0, &dv, &u1, cell)?;
            push("p", measured(p), h12, m.lowest())?;
        }
        if let Some(s) = spectrum.second_s_state() {
            let u1 = transfer_isotropic(s, &fine)?;
            let h12 = matrix_element(u0, &dv, &u1, cell)?;
            let diag = matrix_element(&u1, &dv, &u1, cell)?;
            push("s", measured(s), h12, diag)?;
        }
    }
    report.variational = Some(VariationalReport {
        ground_expectation,
        ground_expectation_ok: ground_expectation.map(|x| x.abs() <= expectation_zero),
        cross_elements: cross,
        max_cross_element: max_cross,
        p_orthonormality_error: pbasis.as_ref().map(PBasis::orthonormality_error),
        p_overlap_with_ground: match (&pbasis, &u0) {
            (Some(pb), Some(u0)) => Some(pb.overlap_with(u0)),
            _ => None,
        },
        trace_ok: coupling.as_ref().map(|m| trace_ok(m, spectral_scale)),
        lambda1_ok: coupling
            .as_ref()
            .map(|m| m.lowest() <= LAMBDA_RELATIVE * m.norm),
        coupling: coupling.clone(),
        hylleraas_undheim: hu,
    });
    clock.lap("variational");

    if let Some(u0) = &u0 {
        report.perturbation = Some(perturbation_report(
            cfg,
            &field,
            &spectrum,
            u0,
            &dv,
            cell,
            coupling.as_ref(),
            gate,
        )?);
    }
    clock.lap("perturbation");

    let ground = verify_ground_inequality(Some(lowest), Some(e0), box_ok);
    let two_bound_each = e1_bound
        && spectrum.ground_state().is_some_and(|s| s.bound)
        && e_bar1_state.is_some_and(|s| s.bound);
    let excited = verify_excited_inequality(&ExcitedInputs {
        dimension: dim,
        kind,
        e_bar1,
        e1,
        two_bound_each,
        gate,
        box_ok,
    });
    report.bug = ground.verdict == Verdict::Violated;
    report.verdicts = Some(Verdicts {
        ground,
        excited,
        bound_state_exists: report.full.as_ref().map(|f| f.existence.verdict).expect("set above"),
    });
    Ok(())
}

/// |tr M| ≤ 1e-8·max(‖M‖, 1e-12·scale), floored at the rounding level of
/// grid sums over potentials of that scale.
fn trace_tolerance(m: &CouplingMatrix, spectral_scale: f64) -> f64 {
    (TRACE_RELATIVE * m.norm.max(spectral_scale * 1e-12)).max(ROUNDOFF_FLOOR * spectral_scale)
}

fn trace_ok(m: &CouplingMatrix, spectral_scale: f64) -> bool {
    m.trace.abs() <= trace_tolerance(m, spectral_scale)
}

fn isotropic_report(field: &PotentialField, spectrum: &IsotropicSpectrum) -> IsotropicReport {
    IsotropicReport {
        r_max: spectrum.grid.r_max,
        n_points: spectrum.grid.n_points,
        box_doublings: spectrum.box_doublings,
        box_converged: spectrum.box_converged,
        continuum_threshold: field.mean(spectrum.grid.r_max),
        lowest: measured(&spectrum.states[0]),
        ground: spectrum.ground_state().map(measured),
        first_excited: spectrum.first_excited_state().map(measured),
        first_excited_kind: spectrum.first_excited_kind,
        bound_count: spectrum.bound_count(),
        states: spectrum
            .states
            .iter()
            .map(|s| LevelRow {
                channel: s.channel,
                radial_index: s.radial_index,
                energy: s.energy,
                error_bar: s.error_bar,
                bound: s.bound,
            })
            .collect(),
    }
}

fn full_report(
    gs: &GridSpectrum,
    existence: crate::grid::ExistenceEvidence,
    dumps: Vec<std::path::PathBuf>,
) -> FullReport {
    let energies: Vec<f64> = gs.levels.iter().map(|l| l.energy).collect();
    let groups = clusters(&energies);
    let size_of = |i: usize| groups.iter().find(|c| c.contains(&i)).map_or(0, Vec::len);
    let ground = gs.ground();
    let threshold = existence.threshold;
    FullReport {
        grid: gs.fine,
        n_coarse: gs.coarse.n,
        enlargements: gs.enlargements,
        box_converged: gs.box_converged,
        boundary_ratio: gs.boundary_ratio,
        spectral_scale: gs.spectral_scale,
        continuum_threshold: threshold,
        ground: Measured::new(ground.energy, ground.error_bar),
        ground_degeneracy: gs.ground_cluster.len(),
        first_excited: gs.excited().map(|l| Measured::new(l.energy, l.error_bar)),
        first_excited_degeneracy: gs.first_excited.map_or(0, size_of),
        bound_count: gs
            .levels
            .iter()
            .filter(|l| l.energy < threshold - l.error_bar)
            .count(),
        levels: gs.levels.clone(),
        residual_norms: gs.pairs.iter().map(|p| p.residual_norm).collect(),
        existence,
        dumps,
    }
}

fn dump_wavefunctions(dir: &std::path::Path, gs: &GridSpectrum) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let picks = [Some(0), gs.first_excited];
    for (name, idx) in ["psi0.bin", "psi1.bin"].iter().zip(picks) {
        if let Some(i) = idx {
            let path = dir.join(name);
            write_wavefunction(&path, &gs.fine, &gs.pairs[i].wavefunction)?;
            written.push(path);
        }
    }
    Ok(written)
}

#[allow(clippy::too_many_arguments)]
fn perturbation_report(
    cfg: &RunConfig,
    field: &PotentialField,
    spectrum: &IsotropicSpectrum,
    u0: &[f64],
    dv: &[f64],
    cell: f64,
    coupling: Option<&CouplingMatrix>,
    gate: SymmetryGate,
) -> Result<PerturbationReport> {
    let first_order = first_order_shifts(u0, dv, cell, coupling)?;
    let unit = [1.0];
    let kind = spectrum.first_excited_kind;
    let dipole = kind.is_some_and(|k| {
        k.is_dipole() || k == crate::radial::FirstExcitedKind::DegenerateWithinTolerance
    });
    let isotropic = kind.is_some_and(|k| k.is_isotropic());
    let (label, target) = match (spectrum.p_state(), spectrum.second_s_state()) {
        (Some(p), _) if dipole => {
            let a = if field.dimension() == 1 {
                &unit[..]
            } else {
                coupling.map(|m| &m.minimizer[..]).unwrap_or(&unit[..])
            };
            ("p", Some(Target::Dipole(p, a)))
        }
        (_, Some(s)) if isotropic => ("s", Some(Target::Isotropic(s))),
        _ => ("none", None),
    };
    let second_order = target
        .map(|t| second_order_excited(field, spectrum, t, &cfg.perturbation))
        .transpose()?;
    // The s branch has ΔV dropping out between radial states, so it is
    // always gated.
    let gated = match label {
        "p" => gate.open(),
        "s" => true,
        _ => false,
    };
    let sign_ok = second_order
        .as_ref()
        .filter(|_| gated)
        .map(|s| s.value <= SECOND_ORDER_GUARD);
    let cutoff_monotone = second_order
        .as_ref()
        .map(|s| s.value <= s.half_cutoff_value + SECOND_ORDER_GUARD);
    Ok(PerturbationReport {
        first_order,
        target: label.into(),
        second_order,
        gated,
        sign_ok,
        cutoff_monotone,
    })
}
