//! Perturbation theory in ΔV around the isotropic problem.
//!
//! First order: the ground-state shift ⟨u₀|ΔV|u₀⟩ and, for the p manifold,
//! the eigenvalues of the coupling matrix M. Second order for the first
//! excited level: Σ_m |⟨m|ΔV|u₁⟩|²/(Ē₁ − Ē_m) over product states
//! χ_{nℓ}(r)Y_{ℓμ} of the discretized isotropic problem. Those matrix
//! elements are computed on the radial grid with the angular quadrature
//! (not on the Cartesian grid), so high radial excitations are resolved.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};
use crate::harmonics::{angular_functions, channel_multiplicity, p_norm, s_norm};
use crate::potential::PotentialField;
use crate::radial::{solve_channel, IsotropicSpectrum, RadialEigenstate, MAX_CHANNEL};
use crate::variational::{matrix_element, CouplingMatrix};

/// Relative window for flagging a vanishing energy denominator.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    /// Highest channel in the intermediate basis.
    #[serde(default = "default_l_max")]
    pub l_max: usize,
    /// Radial states computed per channel.
    #[serde(default = "default_n_radial")]
    pub n_radial: usize,
    /// Number of intermediate states summed; defaults to all below the
    /// common energy ceiling of the computed channels.
    #[serde(default)]
    pub cutoff: Option<usize>,
    /// Intermediate states above this energy are left out.
    #[serde(default)]
    pub energy_cap: Option<f64>,
}

fn default_l_max() -> usize {
    MAX_CHANNEL
}

fn default_n_radial() -> usize {
    24
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        Self {
            l_max: default_l_max(),
            n_radial: default_n_radial(),
            cutoff: None,
            energy_cap: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FirstOrderShifts {
    /// ⟨u₀|ΔV|u₀⟩.
    pub ground: f64,
    /// Eigenvalues of M (the degenerate p-manifold shifts).
    pub p_manifold: Option<Vec<f64>>,
}

/// First-order shifts. The p-manifold values are the coupling matrix's own
/// eigenvalues, not a recomputation.
pub fn first_order_shifts(
    u0: &[f64],
    dv: &[f64],
    cell_volume: f64,
    coupling: Option<&CouplingMatrix>,
) -> Result<FirstOrderShifts> {
    Ok(FirstOrderShifts {
        ground: matrix_element(u0, dv, u0, cell_volume)?,
        p_manifold: coupling.map(|m| m.eigenvalues.clone()),
    })
}

/// The first excited state of V̄ whose second-order shift is wanted.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    /// A channel-0 state.
    Isotropic(&'a RadialEigenstate),
    /// A channel-1 state with real unit coefficients over (x, y, z).
    Dipole(&'a RadialEigenstate, &'a [f64]),
}

impl<'a> Target<'a> {
    fn state(&self) -> &'a RadialEigenstate {
        match self {
            Target::Isotropic(s) | Target::Dipole(s, _) => s,
        }
    }

    /// Angular factor on the unit sphere (or circle).
    fn angular(&self, dim: usize, dir: &[f64; 3]) -> f64 {
        match self {
            Target::Isotropic(_) => s_norm(dim),
            Target::Dipole(_, a) => p_norm(dim) * a.iter().zip(dir).map(|(x, y)| x * y).sum::<f64>(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExcludedState {
    pub channel: usize,
    pub radial_index: usize,
    pub component: usize,
    pub energy: f64,
    pub element: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SecondOrder {
    /// Partial sum over `basis_cutoff` intermediate states.
    pub value: f64,
    /// Same sum over the lowest half of them.
    pub half_cutoff_value: f64,
    pub basis_cutoff: usize,
    /// |last included term|.
    pub cutoff_tail_estimate: f64,
    /// The m = ground term |⟨u₀|ΔV|u₁⟩|²/(Ē₁ − Ē₀), the only one with a
    /// positive denominator.
    pub ground_term: f64,
    /// Highest intermediate energy included.
    pub energy_ceiling: f64,
    pub l_max: usize,
    pub n_radial: usize,
    /// Intermediate states whose denominator vanished (left out).
    pub degenerate_intermediate: Vec<ExcludedState>,
    /// Running partial sums in energy order, for convergence checks.
    #[serde(skip)]
    pub partial_sums: Vec<f64>,
}

struct Term {
    energy: f64,
    value: f64,
}

/// ΔE₁⁽²⁾ for `target`.
pub fn second_order_excited(
    field: &PotentialField,
    spectrum: &IsotropicSpectrum,
    target: Target<'_>,
    cfg: &PerturbationConfig,
) -> Result<SecondOrder> {
    let dim = field.dimension();
    let grid = spectrum.grid;
    let u1 = target.state();
    if u1.grid != grid {
        return input_err("target state was solved on a different radial grid");
    }
    if cfg.n_radial == 0 {
        return input_err("n_radial must be ≥ 1");
    }
    match (&target, u1.channel) {
        (Target::Isotropic(_), 0) => {}
        (Target::Dipole(_, a), 1) if a.len() == dim => {}
        _ => return input_err("target state and angular form disagree"),
    }
    let l_max = if dim == 1 { 1 } else { cfg.l_max.min(MAX_CHANNEL) };
    let channels: Vec<Vec<RadialEigenstate>> = (0..=l_max)
        .into_par_iter()
        .map(|l| solve_channel(field, &grid, l, cfg.n_radial))
        .collect::<Result<_>>()?;
    let h = grid.step();
    let nodes = grid.nodes();
    // angular[l][μ][k] = ∫ Y_lμ ΔV(r_k n̂) T(n̂) dΩ.
    let angular: Vec<Vec<Vec<f64>>> = if dim == 1 {
        Vec::new()
    } else {
        let quad = field.quadrature();
        let ylm: Vec<Vec<Vec<f64>>> = (0..=l_max)
            .map(|l| quad.nodes().iter().map(|q| angular_functions(dim, l, &q.dir)).collect())
            .collect();
        // Nodes where the target has decayed to nothing contribute nothing.
        let u1_max = u1.reduced_wavefunction.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let per_node: Vec<Vec<Vec<f64>>> = nodes
            .par_iter()
            .zip(&u1.reduced_wavefunction)
            .map(|(&r, &u)| {
                if u.abs() <= 1e-16 * u1_max {
                    return (0..=l_max)
                        .map(|l| vec![0.0; channel_multiplicity(dim, l)])
                        .collect();
                }
                let mean = field.mean(r);
                let dvt: Vec<f64> = quad
                    .nodes()
                    .iter()
                    .map(|q| {
                        let x = [r * q.dir[0], r * q.dir[1], r * q.dir[2]];
                        q.weight * (field.value(&x) - mean) * target.angular(dim, &q.dir)
                    })
                    .collect();
                (0..=l_max)
                    .map(|l| {
                        (0..channel_multiplicity(dim, l))
                            .map(|mu| dvt.iter().zip(&ylm[l]).map(|(w, y)| w * y[mu]).sum())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        (0..=l_max)
            .map(|l| {
                (0..channel_multiplicity(dim, l))
                    .map(|mu| per_node.iter().map(|v| v[l][mu]).collect())
                    .collect()
            })
            .collect()
    };
    let dv_line: Vec<f64> = if dim == 1 {
        nodes.iter().map(|&x| field.delta(&[x, 0.0, 0.0])).collect()
    } else {
        Vec::new()
    };

    let e1 = u1.energy;
    let ceiling = channels
        .iter()
        .filter_map(|c| c.last().map(|s| s.energy))
        .fold(f64::INFINITY, f64::min)
        .min(cfg.energy_cap.unwrap_or(f64::INFINITY));
    let mut terms = Vec::new();
    let mut ground_term = 0.0;
    let mut excluded = Vec::new();
    for states in &channels {
        for s in states {
            if s.energy > ceiling || (s.channel == u1.channel && s.radial_index == u1.radial_index) {
                continue;
            }
            let mult = if dim == 1 { 1 } else { channel_multiplicity(dim, s.channel) };
            for mu in 0..mult {
                let element = if dim == 1 {
                    matrix_element(&s.reduced_wavefunction, &dv_line, &u1.reduced_wavefunction, h)?
                } else {
                    let a = &angular[s.channel][mu];
                    s.reduced_wavefunction
                        .iter()
                        .zip(&u1.reduced_wavefunction)
                        .zip(a)
                        .map(|((x, y), w)| x * y * w)
                        .sum::<f64>()
                        * h
                };
                let denom = e1 - s.energy;
                if denom.abs() <= DEGENERACY_TOLERANCE * e1.abs().max(s.energy.abs()).max(1e-12) {
                    excluded.push(ExcludedState {
                        channel: s.channel,
                        radial_index: s.radial_index,
                        component: mu,
                        energy: s.energy,
                        element,
                    });
                    continue;
                }
                let value = element * element / denom;
                if s.channel == 0 && s.radial_index == 0 {
                    ground_term = value;
                }
                terms.push(Term {
                    energy: s.energy,
                    value,
                });
            }
        }
    }
    terms.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let cutoff = cfg.cutoff.unwrap_or(terms.len()).min(terms.len());
    let mut partial = Vec::with_capacity(cutoff);
    let mut acc = 0.0;
    for t in &terms[..cutoff] {
        acc += t.value;
        partial.push(acc);
    }
    let at = |n: usize| if n == 0 { 0.0 } else { partial[n - 1] };
    Ok(SecondOrder {
        value: at(cutoff),
        half_cutoff_value: at(cutoff / 2),
        basis_cutoff: cutoff,
        cutoff_tail_estimate: terms[..cutoff].last().map_or(0.0, |t| t.value.abs()),
        ground_term,
        energy_ceiling: terms[..cutoff].last().map_or(ceiling, |t| t.energy),
        l_max,
        n_radial: cfg.n_radial,
        degenerate_intermediate: excluded,
        partial_sums: partial,
    })
}
