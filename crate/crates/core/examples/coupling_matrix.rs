//! The p-manifold coupling matrix M_ij = ⟨f_i|ΔV|f_j⟩ and the 2×2
//! Hylleraas–Undheim bounds for the ω = (1, 1, 2) oscillator.
//!
//! Exact: M = diag(−1, −1, 2)/(2√2), so λ₁ = −1/(2√2) is twofold and
//! tr M = 0.

use levelbound::grid::CartesianGrid;
use levelbound::potential::{AngularQuadrature, PotentialField, PotentialSpec};
use levelbound::radial::{isotropic_spectrum, RadialGrid};
use levelbound::variational::{
    coupling_matrix_from, delta_on_grid, hylleraas_undheim_bounds, matrix_element, transfer_isotropic, PBasis,
};

fn main() -> levelbound::Result<()> {
    let spec = PotentialSpec::harmonic(&[1.0, 1.0, 2.0])?;
    let quad = AngularQuadrature::product(3, 16, 32)?;
    let field = PotentialField::new(spec, quad, 32.0, 0.005)?;
    let spectrum = isotropic_spectrum(&field, &RadialGrid::new(3, 8.0, 2000)?, 3, 3)?;
    let ground = spectrum.ground_state().expect("V̄ binds");
    let p = spectrum.p_state().expect("p state");

    let grid = CartesianGrid::new(3, 8.0, 48)?;
    let dv = delta_on_grid(&field, &grid);
    let u0 = transfer_isotropic(ground, &grid)?;
    let basis = PBasis::from_radial(p, &grid)?;
    let m = coupling_matrix_from(&basis, &dv)?;

    println!("M =");
    for row in &m.matrix {
        println!("  [{:>12.8} {:>12.8} {:>12.8}]", row[0], row[1], row[2]);
    }
    println!("eigenvalues {:?}", m.eigenvalues);
    println!("exact       {:?}", [-0.125f64.sqrt(), -0.125f64.sqrt(), 0.5f64.sqrt()]);
    println!("trace {:.2e}, minimizer {:?}", m.trace, m.minimizer);

    let cell = grid.cell_volume();
    let a_star = basis.combination(&m.minimizer);
    let cross = matrix_element(&u0, &dv, &a_star, cell)?;
    println!("⟨u₀|ΔV|u₀⟩ = {:.2e}, ⟨u₀|ΔV|a*·f⟩ = {:.2e}", matrix_element(&u0, &dv, &u0, cell)?, cross);
    let hu = hylleraas_undheim_bounds(ground.energy, p.energy, cross, m.lowest())?;
    println!(
        "HU bounds: E₀ ≤ {:.8}, E₁ ≤ {:.8} (exact E₀ = 2, E₁ = 3)",
        hu.eigenvalues[0], hu.eigenvalues[1]
    );
    Ok(())
}
