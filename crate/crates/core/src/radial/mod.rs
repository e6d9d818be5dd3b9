//! Bound states of the angle-averaged potential V̄, one angular channel at
//! a time.
//!
//! Channels are ℓ in 3D, |m| in 2D and parity in 1D (0 = even, 1 = odd).
//! Each channel is discretized by second-order finite differences on the
//! reduced wavefunction, solved on the requested grid and on a grid twice
//! as coarse, and the two energies are Richardson-extrapolated; the
//! extrapolation correction is the reported error bar. Wavefunctions come
//! from the requested (fine) grid.

pub mod tridiag;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input_err, Error, Result};
use crate::interp::EvenCubic;
use crate::potential::PotentialField;
use tridiag::SymTridiagonal;

/// Largest channel handled; only s and p enter the inequalities, the rest
/// guard the classification of the first excited level.
pub const MAX_CHANNEL: usize = 4;

/// Radial box rule: |u| at the last interior node must be below this
/// fraction of max|u| for every bound state.
pub const RADIAL_TAIL_TOLERANCE: f64 = 1e-8;

/// Number of times r_max may be doubled to satisfy the tail rule.
pub const MAX_BOX_DOUBLINGS: usize = 3;

/// Uniform radial grid with spacing h = r_max / n_points.
///
/// 3D: unknowns at r = k·h, k = 1..n_points−1, Dirichlet wall at r_max.
/// 2D: cell-centred unknowns at ρ = (k − ½)h, k = 1..n_points, with a
/// flux (finite-volume) stencil; the wall sits at r_max + h/2.
/// 1D: the full line x = k·h, |k| < n_points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub dimension: usize,
    pub r_max: f64,
    pub n_points: usize,
}

impl RadialGrid {
    pub fn new(dimension: usize, r_max: f64, n_points: usize) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return input_err(format!("dimension must be 1, 2 or 3, got {dimension}"));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return input_err("r_max must be finite and > 0");
        }
        if n_points < 64 || n_points % 2 != 0 {
            return input_err(format!("n_points must be even and ≥ 64, got {n_points}"));
        }
        Ok(Self {
            dimension,
            r_max,
            n_points,
        })
    }

    pub fn step(&self) -> f64 {
        self.r_max / self.n_points as f64
    }

    /// Node positions of the unknowns.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        let n = self.n_points as isize;
        match self.dimension {
            3 => (1..n).map(|k| k as f64 * h).collect(),
            2 => (1..=n).map(|k| (k as f64 - 0.5) * h).collect(),
            _ => (-(n - 1)..n).map(|k| k as f64 * h).collect(),
        }
    }

    fn coarsened(&self) -> Self {
        Self {
            n_points: self.n_points / 2,
            ..*self
        }
    }

    fn doubled_box(&self) -> Self {
        Self {
            r_max: 2.0 * self.r_max,
            n_points: 2 * self.n_points,
            ..*self
        }
    }
}

/// One eigenstate of the isotropic problem in a single channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialEigenstate {
    pub channel: usize,
    pub radial_index: usize,
    /// Richardson-extrapolated energy.
    pub energy: f64,
    /// Discretization error estimate |E_extrapolated − E_fine|.
    pub error_bar: f64,
    pub energy_fine: f64,
    pub energy_coarse: f64,
    /// E < V̄(r_max) − error bar.
    pub bound: bool,
    pub grid: RadialGrid,
    /// u = r·R (3D), √ρ·R (2D) or ψ (1D) on `grid.nodes()`, Σ u² h = 1.
    #[serde(skip)]
    pub reduced_wavefunction: Vec<f64>,
}

impl RadialEigenstate {
    /// Sign changes of the reduced wavefunction on the positive half-axis.
    pub fn node_count(&self) -> usize {
        let nodes = self.grid.nodes();
        let max = self
            .reduced_wavefunction
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let mut count = 0;
        let mut last = 0.0;
        for (&x, &u) in nodes.iter().zip(&self.reduced_wavefunction) {
            if x <= 0.0 || u.abs() < 1e-9 * max {
                continue;
            }
            if last != 0.0 && (u > 0.0) != (last > 0.0) {
                count += 1;
            }
            last = u;
        }
        count
    }

    /// |u| at the outermost unknown relative to max|u|.
    pub fn tail_ratio(&self) -> f64 {
        let u = &self.reduced_wavefunction;
        let max = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let edge = match self.grid.dimension {
            1 => u[0].abs().max(u[u.len() - 1].abs()),
            _ => u[u.len() - 1].abs(),
        };
        if max > 0.0 {
            edge / max
        } else {
            0.0
        }
    }

    /// Power p such that u / r^p is a smooth even function of r:
    /// ℓ + 1 in 3D, |m| + ½ in 2D, parity in 1D.
    fn regular_power(&self) -> f64 {
        match self.grid.dimension {
            3 => self.channel as f64 + 1.0,
            2 => self.channel as f64 + 0.5,
            _ => self.channel as f64,
        }
    }

    /// Smooth radial profile g(r) with ψ(x) = g(|x|)·|x|^c·(angular part),
    /// c the channel, interpolated with an even local cubic.
    pub fn profile(&self) -> EvenCubic {
        let h = self.grid.step();
        let p = self.regular_power();
        let nodes = self.grid.nodes();
        let u = &self.reduced_wavefunction;
        match self.grid.dimension {
            2 => {
                let mut vals: Vec<f64> =
                    nodes.iter().zip(u).map(|(&r, &v)| v / r.powf(p)).collect();
                vals.push(0.0);
                EvenCubic::new(h, 0.5, vals)
            }
            d => {
                // Positive-axis nodes k·h, k ≥ 1, then the wall.
                let start = if d == 1 { self.grid.n_points } else { 0 };
                let mut vals = vec![0.0];
                vals.extend(
                    nodes[start..]
                        .iter()
                        .zip(&u[start..])
                        .map(|(&r, &v)| v / r.powf(p)),
                );
                vals.push(0.0);
                vals[0] = if d == 1 && self.channel == 0 {
                    u[self.grid.n_points - 1]
                } else {
                    (4.0 * vals[1] - vals[2]) / 3.0
                };
                EvenCubic::new(h, 0.0, vals)
            }
        }
    }
}

/// Classification of the first excited level of V̄.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstExcitedKind {
    SState,
    PState,
    M0State,
    M1State,
    Even,
    Odd,
    /// The isotropic and p-type candidates agree within their error bars.
    DegenerateWithinTolerance,
    /// A channel ≥ 2 lies lowest; neither branch of the argument applies.
    HigherChannel,
}

impl FirstExcitedKind {
    fn isotropic(dimension: usize) -> Self {
        match dimension {
            3 => Self::SState,
            2 => Self::M0State,
            _ => Self::Even,
        }
    }

    fn dipole(dimension: usize) -> Self {
        match dimension {
            3 => Self::PState,
            2 => Self::M1State,
            _ => Self::Odd,
        }
    }

    /// True when the first excited level lies in channel 0.
    pub fn is_isotropic(self) -> bool {
        matches!(self, Self::SState | Self::M0State | Self::Even)
    }

    /// True when the first excited level lies in channel 1.
    pub fn is_dipole(self) -> bool {
        matches!(self, Self::PState | Self::M1State | Self::Odd)
    }
}

fn build_operator(field: &PotentialField, grid: &RadialGrid, channel: usize) -> SymTridiagonal {
    let kc = field.kinetic_coefficient();
    let h = grid.step();
    let nodes = grid.nodes();
    let c = kc / (h * h);
    match grid.dimension {
        3 => {
            let l = channel as f64;
            let diag = nodes
                .iter()
                .map(|&r| 2.0 * c + kc * l * (l + 1.0) / (r * r) + field.mean(r))
                .collect();
            SymTridiagonal::new(diag, vec![-c; nodes.len() - 1])
        }
        2 => {
            let m2 = (channel * channel) as f64;
            let diag = nodes
                .iter()
                .map(|&r| {
                    let outer = r + 0.5 * h;
                    let inner = (r - 0.5 * h).max(0.0);
                    c * (outer + inner) / r + kc * m2 / (r * r) + field.mean(r)
                })
                .collect();
            let off = nodes
                .windows(2)
                .map(|w| -c * (w[0] + 0.5 * h) / (w[0] * w[1]).sqrt())
                .collect();
            SymTridiagonal::new(diag, off)
        }
        _ => {
            let diag = nodes.iter().map(|&x| 2.0 * c + field.mean(x.abs())).collect();
            SymTridiagonal::new(diag, vec![-c; nodes.len() - 1])
        }
    }
}

/// Energies and normalized reduced wavefunctions on one grid, lowest first.
fn raw_states(op: &SymTridiagonal, grid: &RadialGrid, count: usize) -> Vec<(f64, Vec<f64>)> {
    let h = grid.step();
    op.lowest_eigenvalues(count)
        .into_iter()
        .map(|e| {
            let mut v = op.eigenvector(e);
            let norm = (v.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
            let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            // Sign convention: the innermost significant value (on the
            // positive side in 1D) is positive.
            let start = if grid.dimension == 1 { grid.n_points - 1 } else { 0 };
            let first = v[start..]
                .iter()
                .find(|x| x.abs() > 1e-3 * max)
                .copied()
                .unwrap_or(1.0);
            let s = if first < 0.0 { -1.0 } else { 1.0 } / norm;
            v.iter_mut().for_each(|x| *x *= s);
            (e, v)
        })
        .collect()
}

fn parity_of(v: &[f64]) -> usize {
    let n = v.len();
    let (mut even, mut odd) = (0.0, 0.0);
    for i in 0..n {
        let (a, b) = (v[i], v[n - 1 - i]);
        even += (a + b) * (a + b);
        odd += (a - b) * (a - b);
    }
    if odd > even {
        1
    } else {
        0
    }
}

/// Lowest `n_states` eigenstates of one channel.
///
/// Returns an empty list (not an error) when the channel has no bound
/// state; callers read `bound` on each state.
pub fn solve_channel(
    field: &PotentialField,
    grid: &RadialGrid,
    channel: usize,
    n_states: usize,
) -> Result<Vec<RadialEigenstate>> {
    if n_states == 0 {
        return input_err("n_states must be ≥ 1");
    }
    if grid.dimension != field.dimension() {
        return input_err("radial grid and field dimensions differ");
    }
    if grid.dimension == 1 && channel > 1 {
        return input_err("1D channels are 0 (even) and 1 (odd)");
    }
    let coarse = grid.coarsened();
    let fine_states;
    let coarse_states;
    if grid.dimension == 1 {
        // Both parities come from one full-line solve; keep the requested one.
        let pick = |g: &RadialGrid| {
            let op = build_operator(field, g, 0);
            raw_states(&op, g, 2 * n_states + 2)
                .into_iter()
                .filter(|(_, v)| parity_of(v) == channel)
                .take(n_states)
                .collect::<Vec<_>>()
        };
        fine_states = pick(grid);
        coarse_states = pick(&coarse);
    } else {
        fine_states = raw_states(&build_operator(field, grid, channel), grid, n_states);
        coarse_states = raw_states(&build_operator(field, &coarse, channel), &coarse, n_states);
    }
    let threshold = field.mean(grid.r_max);
    let states = fine_states
        .into_iter()
        .zip(coarse_states)
        .enumerate()
        .map(|(i, ((ef, v), (ec, _)))| {
            let energy = (4.0 * ef - ec) / 3.0;
            let error_bar = (energy - ef).abs() + 16.0 * f64::EPSILON * energy.abs().max(1.0);
            RadialEigenstate {
                channel,
                radial_index: i,
                energy,
                error_bar,
                energy_fine: ef,
                energy_coarse: ec,
                bound: energy < threshold - error_bar,
                grid: *grid,
                reduced_wavefunction: v,
            }
        })
        .collect();
    Ok(states)
}

/// All channels merged, with the ground and first excited levels identified.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsotropicSpectrum {
    pub dimension: usize,
    /// Every computed state, sorted by energy (bound or not).
    pub states: Vec<RadialEigenstate>,
    pub grid: RadialGrid,
    pub n_channels: usize,
    pub n_states: usize,
    /// Index into `states` of Ē₀, if V̄ binds at all.
    pub ground: Option<usize>,
    /// Index of Ē₁ (the lower candidate when degenerate within tolerance).
    pub first_excited: Option<usize>,
    pub first_excited_kind: Option<FirstExcitedKind>,
    pub box_doublings: usize,
    pub box_converged: bool,
}

impl IsotropicSpectrum {
    pub fn ground_state(&self) -> Option<&RadialEigenstate> {
        self.ground.map(|i| &self.states[i])
    }

    pub fn first_excited_state(&self) -> Option<&RadialEigenstate> {
        self.first_excited.map(|i| &self.states[i])
    }

    pub fn state(&self, channel: usize, radial_index: usize) -> Option<&RadialEigenstate> {
        self.states
            .iter()
            .find(|s| s.channel == channel && s.radial_index == radial_index)
    }

    /// Lowest channel-1 state, the radial factor χ of the p manifold.
    pub fn p_state(&self) -> Option<&RadialEigenstate> {
        self.state(1, 0)
    }

    /// Second channel-0 state.
    pub fn second_s_state(&self) -> Option<&RadialEigenstate> {
        self.state(0, 1)
    }

    pub fn bound_count(&self) -> usize {
        self.states.iter().filter(|s| s.bound).count()
    }
}

/// Solves channels 0..n_channels, enforcing the radial tail rule by
/// doubling r_max (and n_points, keeping h) up to [`MAX_BOX_DOUBLINGS`] times.
pub fn isotropic_spectrum(
    field: &PotentialField,
    grid: &RadialGrid,
    n_channels: usize,
    n_states: usize,
) -> Result<IsotropicSpectrum> {
    if n_channels < 2 {
        return input_err("n_channels must be ≥ 2 so both s and p candidates exist");
    }
    let max_channels = if grid.dimension == 1 { 2 } else { MAX_CHANNEL + 1 };
    if n_channels > max_channels {
        return input_err(format!(
            "n_channels must be ≤ {max_channels} in {}D",
            grid.dimension
        ));
    }
    let mut grid = *grid;
    let mut doublings = 0;
    loop {
        let per_channel: Vec<Vec<RadialEigenstate>> = (0..n_channels)
            .into_par_iter()
            .map(|c| solve_channel(field, &grid, c, n_states))
            .collect::<Result<_>>()?;
        let mut states: Vec<RadialEigenstate> = per_channel.into_iter().flatten().collect();
        let tails_ok = states
            .iter()
            .filter(|s| s.bound)
            .all(|s| s.tail_ratio() < RADIAL_TAIL_TOLERANCE);
        if !tails_ok && doublings < MAX_BOX_DOUBLINGS {
            grid = grid.doubled_box();
            doublings += 1;
            continue;
        }
        states.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then(a.channel.cmp(&b.channel))
                .then(a.radial_index.cmp(&b.radial_index))
        });
        let (ground, first_excited, kind) = classify(&states, grid.dimension)?;
        return Ok(IsotropicSpectrum {
            dimension: grid.dimension,
            states,
            grid,
            n_channels,
            n_states,
            ground,
            first_excited,
            first_excited_kind: kind,
            box_doublings: doublings,
            box_converged: tails_ok,
        });
    }
}

type Classification = (Option<usize>, Option<usize>, Option<FirstExcitedKind>);

fn classify(states: &[RadialEigenstate], dimension: usize) -> Result<Classification> {
    let find = |pred: &dyn Fn(&RadialEigenstate) -> bool| states.iter().position(|s| s.bound && pred(s));
    let Some(ground) = find(&|_| true) else {
        return Ok((None, None, None));
    };
    let g = &states[ground];
    if g.channel != 0 || g.radial_index != 0 {
        return Err(Error::Diagnostic(format!(
            "lowest isotropic state is channel {} index {}, expected channel 0 index 0",
            g.channel, g.radial_index
        )));
    }
    let s2 = find(&|s| s.channel == 0 && s.radial_index == 1);
    let p1 = find(&|s| s.channel == 1 && s.radial_index == 0);
    let higher = find(&|s| s.channel >= 2);
    let candidate = match (s2, p1) {
        (Some(a), Some(b)) => {
            let (sa, sb) = (&states[a], &states[b]);
            if (sa.energy - sb.energy).abs() <= sa.error_bar + sb.error_bar {
                Some((a.min(b), FirstExcitedKind::DegenerateWithinTolerance))
            } else if sa.energy < sb.energy {
                Some((a, FirstExcitedKind::isotropic(dimension)))
            } else {
                Some((b, FirstExcitedKind::dipole(dimension)))
            }
        }
        (Some(a), None) => Some((a, FirstExcitedKind::isotropic(dimension))),
        (None, Some(b)) => Some((b, FirstExcitedKind::dipole(dimension))),
        (None, None) => None,
    };
    let result = match (candidate, higher) {
        (Some((i, kind)), Some(hi)) => {
            let (c, hs) = (&states[i], &states[hi]);
            if hs.energy < c.energy - c.error_bar - hs.error_bar {
                (Some(hi), Some(FirstExcitedKind::HigherChannel))
            } else {
                (Some(i), Some(kind))
            }
        }
        (Some((i, kind)), None) => (Some(i), Some(kind)),
        (None, Some(hi)) => (Some(hi), Some(FirstExcitedKind::HigherChannel)),
        (None, None) => (None, None),
    };
    Ok((Some(ground), result.0, result.1))
}
