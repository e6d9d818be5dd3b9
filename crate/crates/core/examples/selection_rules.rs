//! Which point groups force ⟨u₀|V|p⟩ = 0, and a numerical invariance check
//! of a declared group on an actual potential.

use levelbound::potential::{AngularQuadrature, PotentialField, PotentialSpec};
use levelbound::symmetry::{selection_rule, verify_invariance, PointGroup};

fn main() -> levelbound::Result<()> {
    for name in ["Oh", "Td", "D4h", "C3v", "Cs", "Ci", "S4", "C2v", "Dinfh", "Cinfv"] {
        let g: PointGroup = name.parse()?;
        let v = selection_rule(g, 3)?;
        println!("{:<6} {:<5} {}", v.group, v.guaranteed_zero, v.reason);
    }
    for name in ["C1(2d)", "C2(2d)", "D3(2d)"] {
        let v = selection_rule(name.parse()?, 2)?;
        println!("{:<6} {:<5} {}", v.group, v.guaranteed_zero, v.reason);
    }

    let spec = PotentialSpec::harmonic(&[1.0, 1.0, 2.0])?;
    let field = PotentialField::new(spec, AngularQuadrature::product(3, 8, 16)?, 4.0, 0.05)?;
    for name in ["D4h", "Oh"] {
        let check = verify_invariance(&field, name.parse()?, 2000, 4.0, 42)?;
        println!(
            "ω = (1, 1, 2) under {name}: max deviation {:.1e}, accepted {}",
            check.max_deviation, check.accepted
        );
    }
    Ok(())
}
