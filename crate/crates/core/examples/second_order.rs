//! Second-order shift of the lowest p level of the averaged ω = (1, 1, 2)
//! oscillator, summed over isotropic intermediate states.
//!
//! Exact: Ē₁ + λ₁ + ΔE⁽²⁾ with ΔE⁽²⁾ = −√2/8 along the minimizing direction.

use levelbound::perturbation::{second_order_excited, PerturbationConfig, Target};
use levelbound::potential::{AngularQuadrature, PotentialField, PotentialSpec};
use levelbound::radial::{isotropic_spectrum, RadialGrid};

fn main() -> levelbound::Result<()> {
    let spec = PotentialSpec::harmonic(&[1.0, 1.0, 2.0])?;
    let quad = AngularQuadrature::product(3, 16, 32)?;
    let field = PotentialField::new(spec, quad, 64.0, 0.005)?;
    let spectrum = isotropic_spectrum(&field, &RadialGrid::new(3, 8.0, 2000)?, 3, 3)?;
    let p = spectrum.p_state().expect("p state");
    let direction = [1.0, 0.0, 0.0];
    let second = second_order_excited(&field, &spectrum, Target::Dipole(p, &direction), &PerturbationConfig::default())?;
    println!(
        "ΔE⁽²⁾ = {:.8} (half cutoff {:.8}), exact {:.8}",
        second.value,
        second.half_cutoff_value,
        -2f64.sqrt() / 8.0
    );
    println!(
        "{} intermediate states up to E = {:.3}, l ≤ {}; last term {:.1e}",
        second.basis_cutoff, second.energy_ceiling, second.l_max, second.cutoff_tail_estimate
    );
    println!("ground-state term {:.2e}", second.ground_term);
    Ok(())
}
