//! The full anisotropic problem on a Cartesian box.
//!
//! Second-order finite differences with Dirichlet walls at ±L, a
//! matrix-free (2d+1)-point operator, the block Krylov solver in
//! [`eigensolver`], and Richardson extrapolation between two grids.

pub mod eigensolver;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};
use crate::potential::{Family, PotentialField};
pub use eigensolver::{lowest_eigenpairs_of, EigenMethod, EigenOptions, EigenResult, LinearOperator};

/// Relative energy window inside which levels count as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

/// Box rule: max |ψ| on the outermost layer of unknowns must stay below
/// this fraction of max |ψ|.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

/// Box [−L, L]ᵈ with `n` interior unknowns per axis.
///
/// Spacing h = 2L/(n+1) puts the Dirichlet walls exactly at ±L; node i on
/// an axis sits at −L + (i+1)h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianGrid {
    pub dimension: usize,
    pub half_width: f64,
    pub n: usize,
}

impl CartesianGrid {
    pub fn new(dimension: usize, half_width: f64, n: usize) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return input_err(format!("dimension must be 1, 2 or 3, got {dimension}"));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return input_err("L must be finite and > 0");
        }
        if n < 3 {
            return input_err("need at least 3 points per axis");
        }
        Ok(Self {
            dimension,
            half_width,
            n,
        })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.n + 1) as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.step().powi(self.dimension as i32)
    }

    pub fn axis(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n)
            .map(|i| -self.half_width + (i + 1) as f64 * h)
            .collect()
    }

    /// Coordinates of flat index `idx` (first axis slowest), zero-padded.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let h = self.step();
        let mut p = [0.0; 3];
        let mut rest = idx;
        for a in (0..self.dimension).rev() {
            p[a] = -self.half_width + ((rest % self.n) + 1) as f64 * h;
            rest /= self.n;
        }
        p
    }

    /// All grid points in flat order.
    pub fn points(&self) -> Vec<[f64; 3]> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Evaluates `f` on every grid point, in parallel, in flat order.
    pub fn sample(&self, f: impl Fn(&[f64; 3]) -> f64 + Sync) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|i| f(&self.point(i)))
            .collect()
    }

    fn is_boundary(&self, idx: usize) -> bool {
        let mut rest = idx;
        for _ in 0..self.dimension {
            let i = rest % self.n;
            if i == 0 || i == self.n - 1 {
                return true;
            }
            rest /= self.n;
        }
        false
    }

    fn scaled(&self, factor: f64) -> Self {
        let n = ((self.n + 1) as f64 * factor).round() as usize - 1;
        Self {
            half_width: self.half_width * (n + 1) as f64 / (self.n + 1) as f64,
            n,
            ..*self
        }
    }
}

/// H = −kc∇² + V as a matrix-free stencil.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    grid: CartesianGrid,
    coupling: f64,
    potential: Vec<f64>,
    shift: f64,
    gershgorin: (f64, f64),
}

/// Discretizes H on `grid`. Rejects potentials that are not finite on the
/// grid (V must be bounded below and continuous on the box).
pub fn assemble(field: &PotentialField, grid: &CartesianGrid) -> Result<SparseHamiltonian> {
    if grid.dimension != field.dimension() {
        return input_err("grid and potential dimensions differ");
    }
    let potential = grid.sample(|p| field.value(p));
    SparseHamiltonian::from_potential(*grid, field.kinetic_coefficient(), potential)
}

impl SparseHamiltonian {
    pub fn from_potential(grid: CartesianGrid, kinetic_coefficient: f64, potential: Vec<f64>) -> Result<Self> {
        if potential.len() != grid.len() {
            return input_err("potential length does not match the grid");
        }
        if let Some(i) = potential.iter().position(|v| !v.is_finite()) {
            return input_err(format!(
                "potential is not finite at {:?}; V must be bounded below on the box",
                &grid.point(i)[..grid.dimension]
            ));
        }
        let h = grid.step();
        let c = kinetic_coefficient / (h * h);
        let d = grid.dimension as f64;
        let vmin = potential.iter().copied().fold(f64::INFINITY, f64::min);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, &v) in potential.iter().enumerate() {
            let neighbours = 2.0 * d - if grid.is_boundary(i) { 1.0 } else { 0.0 };
            let diag = 2.0 * d * c + v;
            lo = lo.min(diag - neighbours * c);
            hi = hi.max(diag + neighbours * c);
        }
        Ok(Self {
            grid,
            coupling: c,
            potential,
            shift: vmin - 1.0,
            gershgorin: (lo, hi),
        })
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    /// V on the grid in flat order.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn diagonal(&self, idx: usize) -> f64 {
        2.0 * self.grid.dimension as f64 * self.coupling + self.potential[idx]
    }

    /// Shift (min V − 1) that makes H − shift positive definite.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Gershgorin enclosure (lower, upper) of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        self.gershgorin
    }

    /// Spectral scale used for residual tolerances: max |Gershgorin bound|.
    pub fn spectral_scale(&self) -> f64 {
        self.gershgorin.0.abs().max(self.gershgorin.1.abs())
    }

    /// Dense copy; for tests on small grids only.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.len();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            e[j] = 0.0;
            m.column_mut(j).copy_from_slice(&col);
        }
        m
    }

    fn apply_slab(&self, t: usize, x: &[f64], ys: &mut [f64]) {
        let n = self.grid.n;
        let d = self.grid.dimension;
        let slab = ys.len();
        let base = t * slab;
        let c = self.coupling;
        let diag = 2.0 * d as f64 * c;
        for (j, y) in ys.iter_mut().enumerate() {
            *y = (diag + self.potential[base + j]) * x[base + j];
        }
        // Outermost axis: neighbouring slabs.
        if t > 0 {
            axpy_neg(c, &x[base - slab..base], ys);
        }
        if t + 1 < n {
            axpy_neg(c, &x[base + slab..base + 2 * slab], ys);
        }
        // Inner axes, stride s = n^a within the slab.
        let xs = &x[base..base + slab];
        let mut s = 1;
        for _ in 0..d - 1 {
            let block = s * n;
            for start in (0..slab).step_by(block) {
                for i in 0..n {
                    let lo = start + i * s;
                    if i > 0 {
                        axpy_neg(c, &xs[lo - s..lo], &mut ys[lo..lo + s]);
                    }
                    if i + 1 < n {
                        axpy_neg(c, &xs[lo + s..lo + 2 * s], &mut ys[lo..lo + s]);
                    }
                }
            }
            s = block;
        }
    }
}

fn axpy_neg(c: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= c * xi;
    }
}

impl LinearOperator for SparseHamiltonian {
    fn len(&self) -> usize {
        self.grid.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let slab = self.grid.n.pow(self.grid.dimension as u32 - 1);
        if self.grid.dimension == 1 {
            for (t, ys) in y.chunks_mut(1).enumerate() {
                self.apply_slab(t, x, ys);
            }
        } else {
            y.par_chunks_mut(slab)
                .enumerate()
                .for_each(|(t, ys)| self.apply_slab(t, x, ys));
        }
    }
}

/// One eigenpair of the grid Hamiltonian.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridEigenpair {
    pub energy: f64,
    /// Σ|ψ|²hᵈ = 1, flat order.
    #[serde(skip)]
    pub wavefunction: Vec<f64>,
    /// ‖Hψ − Eψ‖/‖ψ‖.
    pub residual_norm: f64,
}

/// Lowest `k` eigenpairs with ‖Hψ − Eψ‖/‖ψ‖ ≤ tol × spectral scale.
pub fn lowest_eigenpairs(h: &SparseHamiltonian, k: usize, tol: f64) -> Result<Vec<GridEigenpair>> {
    lowest_eigenpairs_with(h, k, tol, &[], &EigenOptions::default())
}

/// [`lowest_eigenpairs`] with explicit solver options and warm-start vectors.
pub fn lowest_eigenpairs_with(
    h: &SparseHamiltonian,
    k: usize,
    tol: f64,
    start: &[Vec<f64>],
    opts: &EigenOptions,
) -> Result<Vec<GridEigenpair>> {
    let abs_tol = tol * h.spectral_scale();
    let res = lowest_eigenpairs_of(h, k, abs_tol, h.shift(), h.gershgorin().1, start, opts)?;
    let scale = h.grid.cell_volume().powf(-0.5);
    Ok(res
        .values
        .into_iter()
        .zip(res.vectors)
        .zip(res.residuals)
        .map(|((energy, v), residual_norm)| GridEigenpair {
            energy,
            wavefunction: v.into_iter().map(|x| x * scale).collect(),
            residual_norm,
        })
        .collect())
}

/// Multilinear interpolation of a grid function onto another grid over the
/// same box, with zero Dirichlet values at the walls.
pub fn interpolate(from: &CartesianGrid, values: &[f64], to: &CartesianGrid) -> Vec<f64> {
    let hf = from.step();
    let l = from.half_width;
    // Per-axis (lower index, weight), index −1 and n mean the wall.
    let stencil: Vec<(isize, f64)> = to
        .axis()
        .iter()
        .map(|&x| {
            let t = (x + l) / hf - 1.0;
            let i = t.floor();
            (i as isize, t - i)
        })
        .collect();
    let n = from.n as isize;
    let d = from.dimension;
    let pick = |idx: &[isize]| -> f64 {
        let mut flat = 0usize;
        for &i in idx {
            if i < 0 || i >= n {
                return 0.0;
            }
            flat = flat * from.n + i as usize;
        }
        values[flat]
    };
    (0..to.len())
        .map(|t| {
            let mut rest = t;
            let mut axes = [(0isize, 0.0); 3];
            for a in (0..d).rev() {
                axes[a] = stencil[rest % to.n];
                rest /= to.n;
            }
            let mut acc = 0.0;
            for corner in 0..(1usize << d) {
                let mut w = 1.0;
                let mut idx = [0isize; 3];
                for a in 0..d {
                    let up = (corner >> a) & 1 == 1;
                    idx[a] = axes[a].0 + up as isize;
                    w *= if up { axes[a].1 } else { 1.0 - axes[a].1 };
                }
                if w != 0.0 {
                    acc += w * pick(&idx[..d]);
                }
            }
            acc
        })
        .collect()
}

/// One Richardson-extrapolated level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridLevel {
    pub energy: f64,
    /// |E_extrapolated − E_fine|.
    pub error_bar: f64,
    pub energy_fine: f64,
    pub energy_coarse: f64,
}

/// Solver settings for one grid solve (the `grid` config block).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
    /// Coarse grid for Richardson; defaults to about 3n/4.
    #[serde(default)]
    pub n_coarse: Option<usize>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// How many times the box may grow by 3/2 to satisfy the box rule.
    #[serde(default = "default_enlargements")]
    pub max_enlargements: usize,
}

fn default_k() -> usize {
    4
}

fn default_tol() -> f64 {
    1e-8
}

fn default_enlargements() -> usize {
    1
}

impl GridConfig {
    pub fn new(half_width: f64, n: usize) -> Self {
        Self {
            half_width,
            n,
            n_coarse: None,
            k: default_k(),
            tol: default_tol(),
            max_enlargements: default_enlargements(),
        }
    }

    pub fn coarse_n(&self) -> usize {
        self.n_coarse.unwrap_or_else(|| (3 * (self.n + 1)).div_ceil(4) - 1)
    }

    pub fn validate(&self, dimension: usize) -> Result<()> {
        CartesianGrid::new(dimension, self.half_width, self.n)?;
        let nc = self.coarse_n();
        if nc < 3 || nc >= self.n {
            return input_err(format!("coarse grid n = {nc} must lie in 3..{}", self.n));
        }
        if self.k == 0 || !(self.tol > 0.0) {
            return input_err("grid.k must be ≥ 1 and grid.tol > 0");
        }
        Ok(())
    }
}

/// Extrapolated spectrum from a coarse/fine grid pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpectrum {
    pub fine: CartesianGrid,
    pub coarse: CartesianGrid,
    pub levels: Vec<GridLevel>,
    /// Fine-grid eigenpairs, aligned with `levels`.
    pub pairs: Vec<GridEigenpair>,
    /// Indices of the ground cluster in `levels`.
    pub ground_cluster: Vec<usize>,
    /// Index of E₁, the lowest level strictly above the ground cluster.
    pub first_excited: Option<usize>,
    /// Largest boundary-layer |ψ| / max|ψ| over the reported states.
    pub boundary_ratio: f64,
    pub box_converged: bool,
    pub enlargements: usize,
    pub shift: f64,
    pub spectral_scale: f64,
    pub residual_tolerance: f64,
}

impl GridSpectrum {
    pub fn ground(&self) -> &GridLevel {
        &self.levels[0]
    }

    pub fn excited(&self) -> Option<&GridLevel> {
        self.first_excited.map(|i| &self.levels[i])
    }
}

fn degenerate(a: f64, b: f64) -> bool {
    (a - b).abs() <= DEGENERACY_TOLERANCE * a.abs().max(b.abs()).max(1e-12)
}

/// Partitions sorted energies into clusters within [`DEGENERACY_TOLERANCE`].
pub fn clusters(energies: &[f64]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &e) in energies.iter().enumerate() {
        match out.last_mut() {
            Some(c) if degenerate(energies[c[0]], e) => c.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

fn boundary_ratio(grid: &CartesianGrid, psi: &[f64]) -> f64 {
    let max = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let edge = psi
        .iter()
        .enumerate()
        .filter(|(i, _)| grid.is_boundary(*i))
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    if max > 0.0 {
        edge / max
    } else {
        0.0
    }
}

/// Solves on the coarse and fine grids, extrapolates, and applies the box rule.
///
/// The fine solve is warm-started from the interpolated coarse eigenvectors.
/// Levels are matched by index; the ratio r = h_coarse/h_fine gives
/// E = (r²E_fine − E_coarse)/(r² − 1).
pub fn solve_grid(field: &PotentialField, cfg: &GridConfig) -> Result<GridSpectrum> {
    let dim = field.dimension();
    cfg.validate(dim)?;
    let mut fine = CartesianGrid::new(dim, cfg.half_width, cfg.n)?;
    let mut coarse = CartesianGrid::new(dim, cfg.half_width, cfg.coarse_n())?;
    let mut enlargements = 0;
    loop {
        let spec = solve_pair(field, &coarse, &fine, cfg)?;
        let spec = GridSpectrum {
            enlargements,
            ..spec
        };
        if spec.box_converged || enlargements >= cfg.max_enlargements {
            return Ok(spec);
        }
        enlargements += 1;
        fine = fine.scaled(1.5);
        coarse = CartesianGrid {
            half_width: fine.half_width,
            n: ((coarse.n + 1) as f64 * 1.5).round() as usize - 1,
            ..coarse
        };
    }
}

fn solve_pair(
    field: &PotentialField,
    coarse: &CartesianGrid,
    fine: &CartesianGrid,
    cfg: &GridConfig,
) -> Result<GridSpectrum> {
    let opts = EigenOptions::default();
    let k = cfg.k.min(coarse.len());
    let hc = assemble(field, coarse)?;
    let pc = lowest_eigenpairs_with(&hc, k, cfg.tol, &[], &opts)?;
    let start: Vec<Vec<f64>> = pc
        .iter()
        .map(|p| interpolate(coarse, &p.wavefunction, fine))
        .collect();
    let hf = assemble(field, fine)?;
    let pf = lowest_eigenpairs_with(&hf, k, cfg.tol, &start, &opts)?;
    let r = coarse.step() / fine.step();
    let r2 = r * r;
    let levels: Vec<GridLevel> = pf
        .iter()
        .zip(&pc)
        .map(|(f, c)| {
            let energy = (r2 * f.energy - c.energy) / (r2 - 1.0);
            GridLevel {
                energy,
                error_bar: (energy - f.energy).abs() + 16.0 * f64::EPSILON * energy.abs().max(1.0),
                energy_fine: f.energy,
                energy_coarse: c.energy,
            }
        })
        .collect();
    let energies: Vec<f64> = levels.iter().map(|l| l.energy).collect();
    let cl = clusters(&energies);
    let ground_cluster = cl[0].clone();
    let first_excited = cl.get(1).map(|c| c[0]);
    let reported: Vec<usize> = cl.iter().take(2).flatten().copied().collect();
    let ratio = reported
        .iter()
        .map(|&i| boundary_ratio(fine, &pf[i].wavefunction))
        .fold(0.0, f64::max);
    Ok(GridSpectrum {
        fine: *fine,
        coarse: *coarse,
        levels,
        pairs: pf,
        ground_cluster,
        first_excited,
        boundary_ratio: ratio,
        box_converged: ratio < BOUNDARY_TOLERANCE,
        enlargements: 0,
        shift: hf.shift(),
        spectral_scale: hf.spectral_scale(),
        residual_tolerance: cfg.tol * hf.spectral_scale(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Existence {
    True,
    False,
    Inconclusive,
}

/// Evidence behind a bound-state existence verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExistenceEvidence {
    pub verdict: Existence,
    pub energy: f64,
    pub error_bar: f64,
    /// Continuum threshold: the minimum of V over the box walls (≈ 0 for
    /// decaying potentials).
    pub threshold: f64,
    /// E₀ ± bar on the box of twice the size, when that check was run.
    pub doubled_box: Option<GridLevel>,
    pub note: String,
}

/// Minimum of V over the walls of the box.
pub fn wall_minimum(field: &PotentialField, grid: &CartesianGrid) -> f64 {
    let l = grid.half_width;
    let d = grid.dimension;
    let axis = grid.axis();
    let mut out = f64::INFINITY;
    for a in 0..d {
        for &side in &[-l, l] {
            for i in 0..grid.n.pow(d as u32 - 1) {
                let mut p = [0.0; 3];
                let mut rest = i;
                for b in 0..d {
                    if b == a {
                        p[b] = side;
                    } else {
                        p[b] = axis[rest % grid.n];
                        rest /= grid.n;
                    }
                }
                out = out.min(field.value(&p));
            }
        }
    }
    // No −0.0 in reports.
    out + 0.0
}

fn classify(e: &GridLevel, threshold: f64) -> Existence {
    if e.energy < threshold - e.error_bar {
        Existence::True
    } else if e.energy > threshold + e.error_bar {
        Existence::False
    } else {
        Existence::Inconclusive
    }
}

/// Whether the full problem binds below its continuum threshold.
///
/// True only if E₀ < threshold − bar both on the given box and on the box
/// of twice the size (same point counts); false only if both lie above by
/// their bars; inconclusive otherwise. Confining harmonic potentials skip
/// the doubled box since there is no continuum to leak into.
pub fn bound_state_exists(
    field: &PotentialField,
    cfg: &GridConfig,
    spectrum: Option<&GridSpectrum>,
) -> Result<ExistenceEvidence> {
    let owned;
    let spectrum = match spectrum {
        Some(s) => s,
        None => {
            owned = solve_grid(field, cfg)?;
            &owned
        }
    };
    let e0 = *spectrum.ground();
    let threshold = wall_minimum(field, &spectrum.fine);
    let first = classify(&e0, threshold);
    if matches!(field.spec().family(), Family::AnisotropicHarmonic(_)) {
        return Ok(ExistenceEvidence {
            verdict: first,
            energy: e0.energy,
            error_bar: e0.error_bar,
            threshold,
            doubled_box: None,
            note: "confining potential: box doubling not needed".into(),
        });
    }
    let doubled_cfg = GridConfig {
        half_width: 2.0 * spectrum.fine.half_width,
        n: spectrum.fine.n,
        n_coarse: Some(spectrum.coarse.n),
        max_enlargements: 0,
        k: 1,
        ..*cfg
    };
    let doubled = solve_grid(field, &doubled_cfg)?;
    let e0d = *doubled.ground();
    let threshold_d = wall_minimum(field, &doubled.fine);
    let second = classify(&e0d, threshold_d);
    let verdict = if first == second { first } else { Existence::Inconclusive };
    Ok(ExistenceEvidence {
        verdict,
        energy: e0.energy,
        error_bar: e0.error_bar,
        threshold,
        doubled_box: Some(e0d),
        note: format!("doubled box L = {}", doubled.fine.half_width),
    })
}

/// Writes a grid function as little-endian f64 after the ASCII header line
/// `dims: n1 n2 n3`.
pub fn write_wavefunction(path: &Path, grid: &CartesianGrid, values: &[f64]) -> Result<()> {
    if values.len() != grid.len() {
        return input_err("wavefunction length does not match the grid");
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let dims = vec![grid.n.to_string(); grid.dimension].join(" ");
    writeln!(out, "dims: {dims}")?;
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads back a file written by [`write_wavefunction`].
pub fn read_wavefunction(path: &Path) -> Result<(Vec<usize>, Vec<f64>)> {
    let bytes = std::fs::read(path)?;
    let Some(nl) = bytes.iter().position(|&b| b == b'\n') else {
        return input_err("missing header line");
    };
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|e| crate::Error::Input(e.to_string()))?;
    let Some(rest) = header.strip_prefix("dims:") else {
        return input_err("header must start with 'dims:'");
    };
    let dims = rest
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| crate::Error::Input(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let body = &bytes[nl + 1..];
    let count: usize = dims.iter().product();
    if body.len() != 8 * count {
        return input_err(format!("expected {} values, found {} bytes", count, body.len()));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok((dims, values))
}
