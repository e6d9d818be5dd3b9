//! Angular average of the ω = (1, 1, 2) oscillator and the zero-mean check
//! on ΔV, under both quadrature families.
//!
//! V = ½(x² + y² + 4z²) averages to V̄(r) = r² exactly.

use levelbound::potential::{verify_zero_mean, AngularQuadrature, PotentialField, PotentialSpec};

fn main() -> levelbound::Result<()> {
    let spec = PotentialSpec::harmonic(&[1.0, 1.0, 2.0])?;
    for quad in [AngularQuadrature::product(3, 16, 32)?, AngularQuadrature::lebedev_like(9)?] {
        println!("{:?} quadrature, {} nodes", quad.scheme(), quad.nodes().len());
        let field = PotentialField::new(spec.clone(), quad.clone(), 4.0, 0.01)?;
        for r in [0.5, 1.0, 2.0, 3.5] {
            println!("  r = {r:<4}  V̄ = {:.12}  exact {:.12}", field.mean(r), r * r);
        }
        let radii: Vec<f64> = (1..=16).map(|k| 0.25 * k as f64).collect();
        let check = verify_zero_mean(&field, &quad, &radii, 1e-10)?;
        println!(
            "  max |∮ΔV dΩ| = {:.2e} at r = {}",
            check.max_residual, check.worst_radius
        );
    }
    Ok(())
}
