use levelbound::potential::{AngularQuadrature, PotentialField, PotentialSpec};
use levelbound::radial::{isotropic_spectrum, solve_channel, FirstExcitedKind, RadialGrid};

fn field(spec: PotentialSpec, r_max: f64) -> PotentialField {
    let quad = match spec.dimension() {
        3 => AngularQuadrature::product(3, 16, 32),
        d => AngularQuadrature::product(d, 8, 32),
    }
    .unwrap();
    PotentialField::new(spec, quad, r_max, 0.005).unwrap()
}

fn gaussian(depth: f64, width: f64) -> PotentialSpec {
    PotentialSpec::from_json(&format!(
        r#"{{"dimension": 3, "family": "gaussian_well_sum", "parameters": {{"wells": [{{"depth": {depth}, "width": {width}}}]}}}}"#
    ))
    .unwrap()
}

#[test]
fn harmonic_s_channel() {
    let f = field(PotentialSpec::harmonic(&[1.0, 1.0, 1.0]).unwrap(), 100.0);
    let states = solve_channel(&f, &RadialGrid::new(3, 12.0, 2000).unwrap(), 0, 2).unwrap();
    assert!((states[0].energy - 1.5).abs() < 1e-6, "{}", states[0].energy);
    assert!((states[1].energy - 3.5).abs() < 1e-6, "{}", states[1].energy);
}

#[test]
fn harmonic_p_channel() {
    let f = field(PotentialSpec::harmonic(&[1.0, 1.0, 1.0]).unwrap(), 100.0);
    let states = solve_channel(&f, &RadialGrid::new(3, 12.0, 2000).unwrap(), 1, 1).unwrap();
    assert!((states[0].energy - 2.5).abs() < 1e-6, "{}", states[0].energy);
}

#[test]
fn two_dimensional_harmonic_channels() {
    // E = (2n + |m| + 1)ω, which tests the (m² − ¼)/ρ² term.
    let f = field(PotentialSpec::harmonic(&[1.0, 1.0]).unwrap(), 100.0);
    let grid = RadialGrid::new(2, 10.0, 2000).unwrap();
    for (m, want) in [(0, [1.0, 3.0]), (1, [2.0, 4.0]), (2, [3.0, 5.0])] {
        let states = solve_channel(&f, &grid, m, 2).unwrap();
        for (s, w) in states.iter().zip(want) {
            assert!((s.energy - w).abs() < 1e-5, "m = {m}: {} vs {w}", s.energy);
        }
    }
}

#[test]
fn deep_well_has_p_first_excited() {
    let f = field(gaussian(-50.0, 1.0), 100.0);
    let sp = isotropic_spectrum(&f, &RadialGrid::new(3, 8.0, 2000).unwrap(), 3, 3).unwrap();
    assert_eq!(sp.first_excited_kind, Some(FirstExcitedKind::PState));
    assert_eq!(sp.ground_state().unwrap().channel, 0);
}

#[test]
fn zero_potential_binds_nothing() {
    let f = field(PotentialSpec::zero(3).unwrap(), 100.0);
    let sp = isotropic_spectrum(&f, &RadialGrid::new(3, 6.0, 400).unwrap(), 2, 2).unwrap();
    assert_eq!(sp.bound_count(), 0);
    assert!(sp.ground.is_none());
    assert!(sp.first_excited.is_none());
}

#[test]
fn energies_increase_with_node_count() {
    let f = field(gaussian(-30.0, 1.5), 100.0);
    let grid = RadialGrid::new(3, 10.0, 1600).unwrap();
    for l in 0..3 {
        let states = solve_channel(&f, &grid, l, 4).unwrap();
        for (n, pair) in states.windows(2).enumerate() {
            assert!(pair[1].energy > pair[0].energy);
            assert_eq!(pair[0].node_count(), n);
        }
    }
}

#[test]
fn error_estimate_bounds_refinement() {
    // Halving h moves each energy by less than 4× the stated error bar.
    let f = field(gaussian(-12.0, 1.0), 100.0);
    let coarse = solve_channel(&f, &RadialGrid::new(3, 8.0, 400).unwrap(), 0, 2).unwrap();
    let fine = solve_channel(&f, &RadialGrid::new(3, 8.0, 800).unwrap(), 0, 2).unwrap();
    for (c, f) in coarse.iter().zip(&fine) {
        let change = (c.energy - f.energy).abs();
        assert!(change < 4.0 * c.error_bar.max(1e-12), "{change:e} vs bar {:e}", c.error_bar);
    }
}

#[test]
fn tail_rule_enlarges_a_tight_box() {
    let f = field(gaussian(-3.0, 1.0), 200.0);
    let sp = isotropic_spectrum(&f, &RadialGrid::new(3, 3.0, 600).unwrap(), 2, 2).unwrap();
    assert!(sp.box_doublings > 0);
    let g = sp.ground_state().unwrap();
    assert!(g.tail_ratio() <= 1e-8 || !sp.box_converged);
}
