//! Variational machinery: grid matrix elements, the p-manifold coupling
//! matrix M, the 2×2 Hylleraas–Undheim matrix H′ and the two inequality
//! verdicts.
//!
//! Radial states of V̄ are carried onto the Cartesian grid by interpolating
//! their smooth profiles and renormalizing, so every matrix element is one
//! grid sum Σ bra·ΔV·ket·hᵈ.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};
use crate::grid::CartesianGrid;
use crate::potential::PotentialField;
use crate::radial::{FirstExcitedKind, RadialEigenstate};

/// A number with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub error_bar: f64,
}

impl Measured {
    pub fn new(value: f64, error_bar: f64) -> Self {
        Self { value, error_bar }
    }
}

/// Σ bra·ΔV·ket·hᵈ. Evaluated as ΔV·(bra·ket) so swapping bra and ket
/// gives bit-identical results.
pub fn matrix_element(bra: &[f64], dv: &[f64], ket: &[f64], cell_volume: f64) -> Result<f64> {
    if bra.len() != ket.len() || bra.len() != dv.len() {
        return input_err(format!(
            "grid mismatch: bra {}, operator {}, ket {}",
            bra.len(),
            dv.len(),
            ket.len()
        ));
    }
    let s: f64 = bra
        .iter()
        .zip(ket)
        .zip(dv)
        .map(|((b, k), d)| d * (b * k))
        .sum();
    Ok(s * cell_volume)
}

/// ⟨a|b⟩ on the grid.
pub fn overlap(a: &[f64], b: &[f64], cell_volume: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * cell_volume
}

/// ΔV sampled on the grid in flat order.
///
/// V̄ is evaluated by direct quadrature once per spherical shell of grid
/// points (shells are labelled exactly by Σ(2iₐ − n + 1)²), so no table
/// interpolation error leaks into ΔV as a spurious isotropic part.
pub fn delta_on_grid(field: &PotentialField, grid: &CartesianGrid) -> Vec<f64> {
    if grid.dimension == 1 {
        return grid.sample(|p| field.delta(p));
    }
    let n = grid.n as i64;
    let shell = |idx: usize| -> u64 {
        let mut rest = idx;
        let mut key = 0;
        for _ in 0..grid.dimension {
            let m = 2 * (rest % grid.n) as i64 - n + 1;
            key += (m * m) as u64;
            rest /= grid.n;
        }
        key
    };
    let mut shells: Vec<u64> = (0..grid.len()).map(shell).collect();
    shells.sort_unstable();
    shells.dedup();
    let half_h = 0.5 * grid.step();
    let means: Vec<f64> = shells
        .par_iter()
        .map(|&k| field.direct_mean(half_h * (k as f64).sqrt()))
        .collect();
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let at = shells.binary_search(&shell(idx)).expect("every shell was collected");
            field.value(&grid.point(idx)) - means[at]
        })
        .collect()
}

fn normalize(mut v: Vec<f64>, cell_volume: f64) -> Result<Vec<f64>> {
    let norm = overlap(&v, &v, cell_volume).sqrt();
    if !(norm > 0.0) {
        return input_err("state vanishes on the Cartesian grid");
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(v)
}

/// g(r)·r^c on the grid, zero outside the radial box.
fn sample_profile(state: &RadialEigenstate, grid: &CartesianGrid, times: impl Fn(&[f64; 3]) -> f64 + Sync) -> Vec<f64> {
    let profile = state.profile();
    let wall = profile.last_node();
    grid.sample(|p| {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if r >= wall {
            0.0
        } else {
            profile.eval(r) * times(p)
        }
    })
}

/// A channel-0 radial state as a normalized grid function.
pub fn transfer_isotropic(state: &RadialEigenstate, grid: &CartesianGrid) -> Result<Vec<f64>> {
    if state.channel != 0 {
        return input_err("isotropic transfer needs a channel-0 state");
    }
    if state.grid.dimension != grid.dimension {
        return input_err("radial and Cartesian dimensions differ");
    }
    normalize(sample_profile(state, grid, |_| 1.0), grid.cell_volume())
}

/// The p manifold χ(r)·x_i/r on the grid, one function per axis.
///
/// Real (Cartesian) p functions stand in for χY₁ₘ; the two bases are
/// related by the fixed unitary in [`crate::harmonics::p_real_to_complex`].
/// In 1D the manifold is the single odd state.
#[derive(Debug, Clone)]
pub struct PBasis {
    grid: CartesianGrid,
    functions: Vec<Vec<f64>>,
}

impl PBasis {
    pub fn from_radial(state: &RadialEigenstate, grid: &CartesianGrid) -> Result<Self> {
        if state.channel != 1 {
            return input_err("the p manifold needs a channel-1 state");
        }
        if state.grid.dimension != grid.dimension {
            return input_err("radial and Cartesian dimensions differ");
        }
        let functions = (0..grid.dimension)
            .map(|i| normalize(sample_profile(state, grid, |p| p[i]), grid.cell_volume()))
            .collect::<Result<_>>()?;
        Ok(Self {
            grid: *grid,
            functions,
        })
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    pub fn functions(&self) -> &[Vec<f64>] {
        &self.functions
    }

    /// max |⟨f_i|f_j⟩ − δ_ij|.
    pub fn orthonormality_error(&self) -> f64 {
        let cell = self.grid.cell_volume();
        let mut worst: f64 = 0.0;
        for (i, fi) in self.functions.iter().enumerate() {
            for (j, fj) in self.functions.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((overlap(fi, fj, cell) - target).abs());
            }
        }
        worst
    }

    /// max |⟨u₀|f_i⟩|.
    pub fn overlap_with(&self, u0: &[f64]) -> f64 {
        let cell = self.grid.cell_volume();
        self.functions
            .iter()
            .map(|f| overlap(u0, f, cell).abs())
            .fold(0.0, f64::max)
    }

    /// Σ a_i f_i.
    pub fn combination(&self, a: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for (ai, f) in a.iter().zip(&self.functions) {
            for (o, x) in out.iter_mut().zip(f) {
                *o += ai * x;
            }
        }
        out
    }
}

/// M_ij = ⟨f_i|ΔV|f_j⟩ with its spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingMatrix {
    pub matrix: Vec<Vec<f64>>,
    /// λ₁ ≤ λ₂ ≤ …
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvector of λ₁ in the real p basis, largest component positive.
    pub minimizer: Vec<f64>,
    /// tr M computed directly.
    pub trace: f64,
    /// λ₁ + λ₂ + … (equals the trace up to rounding).
    pub trace_residual: f64,
    /// max |λ_i|.
    pub norm: f64,
}

impl CouplingMatrix {
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        let trace = m.trace();
        let eig = SymmetricEigen::new(m.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut minimizer: Vec<f64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
        let lead = minimizer
            .iter()
            .copied()
            .fold(0.0f64, |acc, v| if v.abs() > acc.abs() + 1e-12 { v } else { acc });
        if lead < 0.0 {
            minimizer.iter_mut().for_each(|v| *v = -*v);
        }
        // No −0.0 in reports.
        minimizer.iter_mut().for_each(|v| *v += 0.0);
        let norm = eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Self {
            matrix: (0..n).map(|i| m.row(i).iter().copied().collect()).collect(),
            trace_residual: eigenvalues.iter().sum(),
            eigenvalues,
            minimizer,
            trace,
            norm,
        }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        let n = self.matrix.len();
        DMatrix::from_fn(n, n, |i, j| self.matrix[i][j])
    }

    /// a†Ma for a real coefficient vector.
    pub fn quadratic_form(&self, a: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                s += a[i] * m * a[j];
            }
        }
        s
    }

    pub fn lowest(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// M from a precomputed ΔV grid array. Exactly symmetric: each off-diagonal
/// element is computed once.
pub fn coupling_matrix_from(pbasis: &PBasis, dv: &[f64]) -> Result<CouplingMatrix> {
    let f = pbasis.functions();
    let n = f.len();
    let cell = pbasis.grid().cell_volume();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = matrix_element(&f[i], dv, &f[j], cell)?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(CouplingMatrix::from_matrix(m))
}

pub fn build_coupling_matrix(pbasis: &PBasis, field: &PotentialField) -> Result<CouplingMatrix> {
    let dv = delta_on_grid(field, pbasis.grid());
    coupling_matrix_from(pbasis, &dv)
}

/// The 2×2 Hylleraas–Undheim matrix on the trial space {u₀, u₁}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HUMatrix {
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
    /// E′₁ ≤ E′₂.
    pub eigenvalues: [f64; 2],
}

/// Eigenvalues of ((Ē₀, c), (c, Ē₁ + d)), where c = ⟨u₀|ΔV|u₁⟩ and
/// d = ⟨u₁|ΔV|u₁⟩. These bound E₀ and E₁ from above.
pub fn hylleraas_undheim_bounds(e_bar0: f64, e_bar1: f64, cross: f64, diagonal: f64) -> Result<HUMatrix> {
    if !(e_bar0 <= e_bar1) {
        return input_err(format!("need Ē₀ ≤ Ē₁, got {e_bar0} > {e_bar1}"));
    }
    let h11 = e_bar0;
    let h22 = e_bar1 + diagonal;
    let eigenvalues = if cross == 0.0 {
        [h11.min(h22), h11.max(h22)]
    } else {
        let mean = 0.5 * (h11 + h22);
        let half = 0.5 * (h11 - h22);
        let rad = half.hypot(cross);
        [mean - rad, mean + rad]
    };
    Ok(HUMatrix {
        h11,
        h12: cross,
        h22,
        eigenvalues,
    })
}

/// One-sided bound from an arbitrary comparison potential U.
///
/// With u₀ the ground state of U (energy E₀(U)), Rayleigh–Ritz gives
/// E₀(V) ≤ E₀(U) + ⟨u₀|V − U|u₀⟩ always; when the expectation is ≤ 0 this
/// implies E₀(V) ≤ E₀(U). Nothing is claimed in the other direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBound {
    pub expectation: f64,
    pub assumption_holds: bool,
    pub upper_bound: f64,
}

pub fn comparison_bound(
    u0: &[f64],
    v: &[f64],
    u: &[f64],
    e0_comparison: f64,
    cell_volume: f64,
) -> Result<ComparisonBound> {
    if v.len() != u.len() {
        return input_err("V and U are sampled on different grids");
    }
    let diff: Vec<f64> = v.iter().zip(u).map(|(a, b)| a - b).collect();
    let expectation = matrix_element(u0, &diff, u0, cell_volume)?;
    Ok(ComparisonBound {
        expectation,
        assumption_holds: expectation <= 0.0,
        upper_bound: e0_comparison + expectation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub verdict: Verdict,
    /// Upper side minus lower side (Ē₀ − E₀ or Ē₁ − E₁).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<Measured>,
    pub reason: String,
}

impl InequalityVerdict {
    fn not_applicable(reason: impl Into<String>) -> Self {
        Self {
            verdict: Verdict::NotApplicable,
            margin: None,
            reason: reason.into(),
        }
    }
}

/// Compares `upper ≥ lower` within the combined error bars.
fn compare(upper: Measured, lower: Measured, box_ok: bool, what: &str) -> InequalityVerdict {
    let bar = upper.error_bar + lower.error_bar;
    let margin = Measured::new(upper.value - lower.value, bar);
    let (verdict, reason) = if margin.value >= -bar {
        (Verdict::Holds, format!("{what} within combined error bar {bar:.3e}"))
    } else if !box_ok {
        (Verdict::Inconclusive, format!("{what} fails but the box rule was not met"))
    } else {
        (Verdict::Violated, format!("{what} fails by more than the combined error bar {bar:.3e}"))
    };
    InequalityVerdict {
        verdict,
        margin: Some(margin),
        reason,
    }
}

/// Ē₀ ≥ E₀. The theorem is unconditional, so "violated" means a bug.
pub fn verify_ground_inequality(e_bar0: Option<Measured>, e0: Option<Measured>, box_ok: bool) -> InequalityVerdict {
    match (e_bar0, e0) {
        (Some(a), Some(b)) => compare(a, b, box_ok, "Ē₀ ≥ E₀"),
        _ => InequalityVerdict {
            verdict: Verdict::Inconclusive,
            margin: None,
            reason: "missing ground-state energy".into(),
        },
    }
}

/// Whether ⟨u₀|ΔV|f_i⟩ = 0 is established for the p branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryGate {
    /// Selection rule says zero and the declared group was verified on V.
    pub guaranteed: bool,
    /// Measured max |⟨u₀|ΔV|f_i⟩| is below the threshold.
    pub numerically_zero: bool,
}

impl SymmetryGate {
    pub fn open(&self) -> bool {
        self.guaranteed || self.numerically_zero
    }
}

/// Inputs to the excited-state verdict.
#[derive(Debug, Clone, Copy)]
pub struct ExcitedInputs {
    pub dimension: usize,
    pub kind: Option<FirstExcitedKind>,
    pub e_bar1: Option<Measured>,
    pub e1: Option<Measured>,
    /// Both spectra have at least two bound states.
    pub two_bound_each: bool,
    pub gate: SymmetryGate,
    pub box_ok: bool,
}

/// Per-branch status plus the overall E₁ ≤ Ē₁ verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExcitedVerdict {
    #[serde(flatten)]
    pub overall: InequalityVerdict,
    pub s_branch: Option<Verdict>,
    pub p_branch: Option<Verdict>,
}

/// E₁ ≤ Ē₁.
///
/// The s branch needs nothing beyond Ē₁ being an isotropic level (both
/// trial functions are radial, so ΔV drops out of H′). The p branch needs
/// the symmetry gate. A near-degenerate s/p pair runs both. In 1D the
/// inequality is not asserted at all.
pub fn verify_excited_inequality(inp: &ExcitedInputs) -> ExcitedVerdict {
    let na = |reason: &str| ExcitedVerdict {
        overall: InequalityVerdict::not_applicable(reason),
        s_branch: None,
        p_branch: None,
    };
    if inp.dimension == 1 {
        return na("1D: the excited-state argument does not carry over");
    }
    let (Some(kind), Some(e_bar1), Some(e1)) = (inp.kind, inp.e_bar1, inp.e1) else {
        return na("fewer than two bound states");
    };
    if !inp.two_bound_each {
        return na("fewer than two bound states");
    }
    let compared = compare(e_bar1, e1, inp.box_ok, "E₁ ≤ Ē₁");
    let p_status = if inp.gate.open() {
        compared.verdict
    } else {
        Verdict::NotApplicable
    };
    let (s_branch, p_branch) = match kind {
        FirstExcitedKind::HigherChannel => {
            return na("first excited level of V̄ lies in a channel above p");
        }
        FirstExcitedKind::DegenerateWithinTolerance => (Some(compared.verdict), Some(p_status)),
        k if k.is_isotropic() => (Some(compared.verdict), None),
        _ => (None, Some(p_status)),
    };
    if s_branch.is_none() && p_status == Verdict::NotApplicable {
        return ExcitedVerdict {
            overall: InequalityVerdict::not_applicable(
                "insufficient symmetry: ⟨u₀|ΔV|u₁⟩ = 0 neither guaranteed nor measured",
            ),
            s_branch,
            p_branch,
        };
    }
    ExcitedVerdict {
        overall: compared,
        s_branch,
        p_branch,
    }
}
