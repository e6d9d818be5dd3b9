use levelbound::grid::CartesianGrid;
use levelbound::potential::{AngularQuadrature, PotentialField, PotentialSpec};
use levelbound::radial::{isotropic_spectrum, RadialGrid};
use levelbound::symmetry::{cross_element_check, selection_rule, verify_invariance, PointGroup};
use levelbound::variational::{delta_on_grid, transfer_isotropic, PBasis};

fn field(json: &str) -> PotentialField {
    let spec = PotentialSpec::from_json(json).unwrap();
    let quad = AngularQuadrature::product(spec.dimension(), 16, 32).unwrap();
    PotentialField::new(spec, quad, 48.0, 0.005).unwrap()
}

fn harmonic() -> PotentialField {
    field(r#"{"dimension": 3, "family": "anisotropic_harmonic", "parameters": {"omega": [1, 1, 2]}}"#)
}

/// max |⟨u₀|ΔV|f_i⟩| and the threshold 10⁻⁶ × |Ē₀|-based scale.
fn cross_element(f: &PotentialField) -> (f64, f64) {
    let sp = isotropic_spectrum(f, &RadialGrid::new(3, 6.0, 1200).unwrap(), 3, 2).unwrap();
    let grid = CartesianGrid::new(3, 6.0, 32).unwrap();
    let dv = delta_on_grid(f, &grid);
    let u0 = transfer_isotropic(sp.ground_state().unwrap(), &grid).unwrap();
    let basis = PBasis::from_radial(sp.p_state().unwrap(), &grid).unwrap();
    let scale = dv.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (cross_element_check(&u0, &basis, &dv).unwrap(), 1e-6 * scale)
}

#[test]
fn named_special_cases() {
    assert!(selection_rule("S2".parse().unwrap(), 3).unwrap().guaranteed_zero);
    assert!(!selection_rule("Cs".parse().unwrap(), 3).unwrap().guaranteed_zero);
    assert!(selection_rule("C2(2d)".parse().unwrap(), 2).unwrap().guaranteed_zero);
}

#[test]
fn full_table() {
    let t = |g: &str, d| selection_rule(g.parse().unwrap(), d).unwrap().guaranteed_zero;
    for g in ["T", "Td", "Th", "O", "Oh", "I", "Ih"] {
        assert!(t(g, 3), "{g}");
    }
    for n in 2..=6 {
        for g in [format!("C{n}h"), format!("D{n}"), format!("D{n}h"), format!("D{n}d"), format!("S{}", 2 * n)] {
            assert!(t(&g, 3), "{g}");
        }
        assert!(t(&format!("C{n}(2d)"), 2) && t(&format!("D{n}(2d)"), 2));
        assert!(!t(&format!("C{n}"), 3) && !t(&format!("C{n}v"), 3));
    }
    assert!(t("S2", 3) && t("Ci", 3) && t("Dinfh", 3));
    assert!(!t("Cs", 3) && !t("C1h", 3) && !t("C2v", 3) && !t("D1h", 3));
    assert!(!t("C1", 3) && !t("Cinfv", 3));
    assert!(!t("C1(2d)", 2) && !t("D1(2d)", 2));
}

#[test]
fn names_round_trip_through_display() {
    for g in ["Oh", "D4h", "C3v", "S4", "Dinfh", "Cinfv", "C3(2d)", "D5(2d)"] {
        let parsed: PointGroup = g.parse().unwrap();
        let again: PointGroup = parsed.to_string().parse().unwrap();
        assert_eq!(parsed, again);
    }
}

#[test]
fn dimension_mismatch_is_rejected() {
    assert!(selection_rule("Oh".parse().unwrap(), 2).is_err());
    assert!(selection_rule("C3(2d)".parse().unwrap(), 3).is_err());
}

#[test]
fn invariance_checks() {
    let h = harmonic();
    let ok = verify_invariance(&h, "Dinfh".parse().unwrap(), 2000, 4.0, 42).unwrap();
    assert!(ok.max_deviation <= 1e-12 && ok.accepted);
    let bad = verify_invariance(&h, "Oh".parse().unwrap(), 2000, 4.0, 42).unwrap();
    assert!(bad.max_deviation > 0.1 && !bad.accepted);
    let off = field(
        r#"{"dimension": 3, "family": "gaussian_well_sum",
            "parameters": {"wells": [{"depth": -5, "width": 1.0, "center": [0.7, 0.2, 0.0]}]}}"#,
    );
    assert!(!verify_invariance(&off, "S2".parse().unwrap(), 2000, 4.0, 42).unwrap().accepted);
}

#[test]
fn inversion_symmetric_well_has_no_cross_element() {
    let f = field(
        r#"{"dimension": 3, "family": "gaussian_well_sum",
            "parameters": {"wells": [
                {"depth": -8, "widths": [0.9, 1.2, 1.0], "angles": [0.3, 0.5, 0.1]},
                {"depth": -3, "width": 0.8, "center": [0.9, 0.4, -0.3]},
                {"depth": -3, "width": 0.8, "center": [-0.9, -0.4, 0.3]}
            ]}}"#,
    );
    assert!(verify_invariance(&f, "Ci".parse().unwrap(), 2000, 4.0, 1).unwrap().accepted);
    let (x, threshold) = cross_element(&f);
    assert!(x <= threshold, "{x:e} > {threshold:e}");
}

#[test]
fn displaced_tilted_well_has_a_cross_element() {
    let f = field(
        r#"{"dimension": 3, "family": "gaussian_well_sum",
            "parameters": {"wells": [
                {"depth": -8, "widths": [0.9, 1.2, 1.0], "angles": [0.3, 0.5, 0.1], "center": [0.5, -0.2, 0.3]}
            ]}}"#,
    );
    let (x, threshold) = cross_element(&f);
    assert!(x > 1e3 * threshold, "{x:e} vs {threshold:e}");
}

#[test]
fn isotropic_well_has_no_cross_element() {
    let f = field(
        r#"{"dimension": 3, "family": "gaussian_well_sum", "parameters": {"wells": [{"depth": -8, "width": 1.0}]}}"#,
    );
    let (x, _) = cross_element(&f);
    assert!(x < 1e-12, "{x:e}");
}
