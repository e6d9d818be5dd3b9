//! Channel-by-channel spectrum of the angle-averaged ω = (1, 1, 2)
//! oscillator. V̄ = r² is isotropic with ω̄ = √2, so Ē = (2n + l + 3/2)√2.

use levelbound::potential::{AngularQuadrature, PotentialField, PotentialSpec};
use levelbound::radial::{isotropic_spectrum, RadialGrid};

fn main() -> levelbound::Result<()> {
    let spec = PotentialSpec::harmonic(&[1.0, 1.0, 2.0])?;
    let quad = AngularQuadrature::product(3, 16, 32)?;
    let field = PotentialField::new(spec, quad, 32.0, 0.005)?;
    let grid = RadialGrid::new(3, 8.0, 2000)?;
    let spectrum = isotropic_spectrum(&field, &grid, 3, 3)?;
    let w = 2f64.sqrt();
    println!(" l  n   energy           ± bar     exact");
    for s in &spectrum.states {
        let exact = (2 * s.radial_index + s.channel) as f64 * w + 1.5 * w;
        println!(
            " {}  {}   {:.10}  {:.1e}   {:.10}",
            s.channel, s.radial_index, s.energy, s.error_bar, exact
        );
    }
    println!("first excited level: {:?}", spectrum.first_excited_kind);
    println!(
        "box doublings {} (converged: {})",
        spectrum.box_doublings, spectrum.box_converged
    );
    Ok(())
}
