use levelbound::grid::{
    assemble, bound_state_exists, lowest_eigenpairs, read_wavefunction, solve_grid, write_wavefunction,
    CartesianGrid, Existence, GridConfig, SparseHamiltonian,
};
use levelbound::potential::{AngularQuadrature, PotentialField, PotentialSpec};
use levelbound::radial::{isotropic_spectrum, RadialGrid};

fn field(spec: PotentialSpec, r_max: f64) -> PotentialField {
    let quad = AngularQuadrature::product(spec.dimension(), 16, 32).unwrap();
    PotentialField::new(spec, quad, r_max, 0.01).unwrap()
}

fn gaussian(depth: f64, widths: [f64; 3]) -> PotentialSpec {
    PotentialSpec::from_json(&format!(
        r#"{{"dimension": 3, "family": "gaussian_well_sum",
            "parameters": {{"wells": [{{"depth": {depth}, "widths": [{}, {}, {}]}}]}}}}"#,
        widths[0], widths[1], widths[2]
    ))
    .unwrap()
}

#[test]
fn three_point_dirichlet_laplacian() {
    // n = 3 interior points with h = 1 puts the walls at ±2.
    let grid = CartesianGrid::new(1, 2.0, 3).unwrap();
    assert_eq!(grid.step(), 1.0);
    let h = SparseHamiltonian::from_potential(grid, 0.5, vec![0.0; 3]).unwrap();
    let mut eig: Vec<f64> = nalgebra::SymmetricEigen::new(h.to_dense()).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let s = 2f64.sqrt();
    for (got, want) in eig.iter().zip([2.0 - s, 2.0, 2.0 + s]) {
        assert!((got - 0.5 * want).abs() < 1e-14, "{got} vs {}", 0.5 * want);
    }
}

#[test]
fn particle_in_a_box() {
    let f = field(PotentialSpec::zero(3).unwrap(), 4.0);
    let grid = CartesianGrid::new(3, 2.0, 31).unwrap();
    let pairs = lowest_eigenpairs(&assemble(&f, &grid).unwrap(), 1, 1e-10).unwrap();
    let exact = 3.0 * std::f64::consts::PI.powi(2) * 0.5 / 16.0;
    let h = grid.step();
    // Second-order scheme: relative error of order (πh/4)²/12 per axis.
    assert!(((pairs[0].energy - exact) / exact).abs() < (std::f64::consts::PI * h / 4.0).powi(2) / 6.0);
    assert!(pairs[0].energy < exact);
}

#[test]
fn eigenpairs_are_ordered_orthogonal_and_certified() {
    let f = field(gaussian(-8.0, [1.0, 1.3, 0.8]), 8.0);
    let grid = CartesianGrid::new(3, 5.0, 24).unwrap();
    let h = assemble(&f, &grid).unwrap();
    let tol = 1e-8;
    let pairs = lowest_eigenpairs(&h, 5, tol).unwrap();
    let cell = grid.cell_volume();
    for w in pairs.windows(2) {
        assert!(w[0].energy <= w[1].energy);
    }
    for (i, a) in pairs.iter().enumerate() {
        assert!(a.residual_norm <= tol * h.spectral_scale());
        // Independent residual: apply the dense operator.
        let dense = h.to_dense();
        let psi = nalgebra::DVector::from_column_slice(&a.wavefunction);
        let r = (&dense * &psi - &psi * a.energy).norm() / psi.norm();
        assert!(r <= 10.0 * tol * h.spectral_scale(), "pair {i}: {r:e}");
        for b in &pairs[i + 1..] {
            let dot: f64 = a.wavefunction.iter().zip(&b.wavefunction).map(|(x, y)| x * y).sum::<f64>() * cell;
            assert!(dot.abs() < 1e-8, "overlap {dot:e}");
        }
    }
}

#[test]
fn harmonic_112_closed_form() {
    let f = field(PotentialSpec::harmonic(&[1.0, 1.0, 2.0]).unwrap(), 16.0);
    let cfg = GridConfig {
        n_coarse: Some(48),
        ..GridConfig::new(8.0, 64)
    };
    let s = solve_grid(&f, &cfg).unwrap();
    assert!((s.ground().energy - 2.0).abs() < 2e-3);
    let e1 = s.excited().unwrap();
    assert!((e1.energy - 3.0).abs() < 5e-3);
    // The extrapolated values beat the raw fine-grid ones.
    assert!((s.ground().energy - 2.0).abs() < (s.ground().energy_fine - 2.0).abs());
}

#[test]
fn isotropic_grid_matches_radial() {
    let f = field(gaussian(-10.0, [1.0; 3]), 32.0);
    let radial = isotropic_spectrum(&f, &RadialGrid::new(3, 7.0, 1400).unwrap(), 2, 2).unwrap();
    let rg = radial.ground_state().unwrap();
    let s = solve_grid(&f, &GridConfig::new(7.0, 40)).unwrap();
    let g = s.ground();
    assert!(
        (g.energy - rg.energy).abs() <= g.error_bar + rg.error_bar,
        "grid {} ± {} vs radial {} ± {}",
        g.energy,
        g.error_bar,
        rg.energy,
        rg.error_bar
    );
}

#[test]
fn richardson_error_shrinks_with_h() {
    let f = field(gaussian(-8.0, [1.0, 1.2, 0.9]), 16.0);
    let a = solve_grid(&f, &GridConfig::new(6.0, 24)).unwrap();
    let b = solve_grid(&f, &GridConfig::new(6.0, 48)).unwrap();
    let da = a.ground().energy_fine - a.ground().energy_coarse;
    let db = b.ground().energy_fine - b.ground().energy_coarse;
    // Same coarse/fine ratio, half the spacing: the difference drops ≈ 4×.
    let ratio = da / db;
    assert!((2.5..6.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn existence_examples() {
    let bound = field(gaussian(-5.0, [1.0, 1.0, 0.5]), 16.0);
    let ev = bound_state_exists(&bound, &GridConfig::new(6.0, 24), None).unwrap();
    assert_eq!(ev.verdict, Existence::True, "{ev:?}");

    let zero = field(PotentialSpec::zero(3).unwrap(), 16.0);
    let ev = bound_state_exists(&zero, &GridConfig::new(4.0, 16), None).unwrap();
    assert_eq!(ev.verdict, Existence::False);

    let shallow = field(gaussian(-0.01, [1.0; 3]), 16.0);
    let ev = bound_state_exists(&shallow, &GridConfig::new(4.0, 16), None).unwrap();
    assert_ne!(ev.verdict, Existence::True);
}

#[test]
fn wavefunction_dump_round_trip() {
    let grid = CartesianGrid::new(2, 1.0, 5).unwrap();
    let values: Vec<f64> = (0..grid.len()).map(|i| i as f64 * 0.25 - 1.0).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.bin");
    write_wavefunction(&path, &grid, &values).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"dims: 5 5"));
    let (dims, back) = read_wavefunction(&path).unwrap();
    assert_eq!(dims, vec![5, 5]);
    assert_eq!(back, values);
}
