//! Lowest levels of the ω = (1, 1, 2) oscillator on a Cartesian grid,
//! Richardson-extrapolated from n = 48 and n = 64 points per axis.
//!
//! Exact values: E₀ = 2, E₁ = 3 (twofold), next level 4.

use std::time::Instant;

use levelbound::grid::{solve_grid, GridConfig};
use levelbound::potential::{AngularQuadrature, PotentialField, PotentialSpec};

fn main() -> levelbound::Result<()> {
    let spec = PotentialSpec::harmonic(&[1.0, 1.0, 2.0])?;
    let quad = AngularQuadrature::product(3, 16, 32)?;
    let field = PotentialField::new(spec, quad, 8.0, 0.05)?;
    let cfg = GridConfig {
        n_coarse: Some(48),
        ..GridConfig::new(8.0, 64)
    };
    let t = Instant::now();
    let spectrum = solve_grid(&field, &cfg)?;
    println!("solved in {:.1} s", t.elapsed().as_secs_f64());
    for (level, pair) in spectrum.levels.iter().zip(&spectrum.pairs) {
        println!(
            "E = {:.6} ± {:.1e}   (n=48: {:.6}, n=64: {:.6}, residual {:.1e})",
            level.energy, level.error_bar, level.energy_coarse, level.energy_fine, pair.residual_norm
        );
    }
    println!("boundary ratio {:.1e}", spectrum.boundary_ratio);
    Ok(())
}
