use crate::error::{input_err, Error, Result};
use crate::interp::EvenCubic;

use super::quadrature::AngularQuadrature;
use super::PotentialSpec;

/// Direct angular average of V at `radius`:
/// (1/4π)∮V dΩ in 3D, (1/2π)∮V dφ in 2D, ½(V(x) + V(−x)) in 1D.
pub fn angular_average(spec: &PotentialSpec, quad: &AngularQuadrature, radius: f64) -> Result<f64> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return input_err(format!("radius must be finite and ≥ 0, got {radius}"));
    }
    if quad.dimension() != spec.dimension() {
        return input_err("quadrature and potential dimensions differ");
    }
    Ok(average_unchecked(spec, quad, radius))
}

fn average_unchecked(spec: &PotentialSpec, quad: &AngularQuadrature, radius: f64) -> f64 {
    if spec.dimension() == 1 {
        return 0.5 * (spec.value(&[radius, 0.0, 0.0]) + spec.value(&[-radius, 0.0, 0.0]));
    }
    let s = quad.integrate(|d| spec.value(&[radius * d[0], radius * d[1], radius * d[2]]));
    s / quad.full_measure()
}

/// A potential together with its tabulated angular average.
///
/// V̄ is tabulated once on a uniform radial table and interpolated with an
/// even local cubic; radii past the table fall back to direct quadrature.
/// In 1D the two-point average is cheap and is always evaluated directly.
/// Immutable after construction and safe to share between threads.
#[derive(Debug, Clone)]
pub struct PotentialField {
    spec: PotentialSpec,
    quad: AngularQuadrature,
    table: Option<EvenCubic>,
}

impl PotentialField {
    pub fn new(
        spec: PotentialSpec,
        quad: AngularQuadrature,
        table_radius: f64,
        table_step: f64,
    ) -> Result<Self> {
        if quad.dimension() != spec.dimension() {
            return input_err(format!(
                "quadrature is {}-dimensional but the potential is {}-dimensional",
                quad.dimension(),
                spec.dimension()
            ));
        }
        if !(table_step > 0.0 && table_radius > 0.0) {
            return input_err("table radius and step must be > 0");
        }
        let table = if spec.dimension() == 1 {
            None
        } else {
            let n = (table_radius / table_step).ceil() as usize + 4;
            let values = (0..n)
                .map(|k| average_unchecked(&spec, &quad, k as f64 * table_step))
                .collect::<Vec<_>>();
            if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::Input(format!(
                    "angular average is not finite at radius {}",
                    bad as f64 * table_step
                )));
            }
            Some(EvenCubic::new(table_step, 0.0, values))
        };
        Ok(Self { spec, quad, table })
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn quadrature(&self) -> &AngularQuadrature {
        &self.quad
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension()
    }

    pub fn kinetic_coefficient(&self) -> f64 {
        self.spec.kinetic_coefficient()
    }

    pub fn table_step(&self) -> Option<f64> {
        self.table.as_ref().map(|t| t.step())
    }

    /// V at a padded point.
    pub fn value(&self, x: &[f64; 3]) -> f64 {
        self.spec.value(x)
    }

    /// V̄(r).
    pub fn mean(&self, r: f64) -> f64 {
        match &self.table {
            Some(t) if r.abs() <= t.last_node() => t.eval(r),
            _ => average_unchecked(&self.spec, &self.quad, r.abs()),
        }
    }

    /// ΔV = V − V̄(|x|) at a padded point.
    pub fn delta(&self, x: &[f64; 3]) -> f64 {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        self.spec.value(x) - self.mean(r)
    }

    /// ΔV at a point with exactly `dimension` components.
    pub fn delta_v(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.dimension() {
            return input_err(format!(
                "point has {} components, field is {}-dimensional",
                point.len(),
                self.dimension()
            ));
        }
        let mut x = [0.0; 3];
        x[..point.len()].copy_from_slice(point);
        Ok(self.delta(&x))
    }

    /// V̄(r) by quadrature, bypassing the table.
    pub fn direct_mean(&self, r: f64) -> f64 {
        average_unchecked(&self.spec, &self.quad, r)
    }

    /// ∮ΔV dΩ at one radius under `quad`.
    pub fn delta_integral(&self, quad: &AngularQuadrature, r: f64) -> f64 {
        let mean = self.mean(r);
        quad.integrate(|d| self.spec.value(&[r * d[0], r * d[1], r * d[2]]) - mean)
    }
}

/// Outcome of the zero-mean self-check.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMeanCheck {
    pub max_residual: f64,
    pub worst_radius: f64,
    pub tolerance: f64,
    pub residuals: Vec<(f64, f64)>,
}

/// Max over `radii` of |∮ΔV dΩ| under `quad` (which may differ from the
/// quadrature the field was built with). Exceeding `tolerance` is a
/// diagnostic failure naming the worst radius.
pub fn verify_zero_mean(
    field: &PotentialField,
    quad: &AngularQuadrature,
    radii: &[f64],
    tolerance: f64,
) -> Result<ZeroMeanCheck> {
    let check = zero_mean_residuals(field, quad, radii)?;
    let check = ZeroMeanCheck { tolerance, ..check };
    if check.max_residual > tolerance {
        return Err(Error::Diagnostic(format!(
            "∮ΔV dΩ = {:.3e} at r = {} exceeds tolerance {:.1e}",
            check.max_residual, check.worst_radius, tolerance
        )));
    }
    Ok(check)
}

/// Same measurement as [`verify_zero_mean`] without the pass/fail gate.
pub fn zero_mean_residuals(
    field: &PotentialField,
    quad: &AngularQuadrature,
    radii: &[f64],
) -> Result<ZeroMeanCheck> {
    if radii.is_empty() {
        return input_err("radii must be non-empty");
    }
    if let Some(r) = radii.iter().find(|r| !(**r >= 0.0)) {
        return input_err(format!("radii must be ≥ 0, got {r}"));
    }
    if quad.dimension() != field.dimension() {
        return input_err("quadrature and field dimensions differ");
    }
    let residuals: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| (r, field.delta_integral(quad, r).abs()))
        .collect();
    let (worst_radius, max_residual) = residuals
        .iter()
        .copied()
        .fold((radii[0], 0.0), |acc, (r, v)| if v > acc.1 { (r, v) } else { acc });
    Ok(ZeroMeanCheck {
        max_residual,
        worst_radius,
        tolerance: f64::INFINITY,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{Family, Monomial, PolynomialParams};

    fn harmonic_field() -> PotentialField {
        let spec = PotentialSpec::harmonic(&[1.0, 1.0, 2.0]).unwrap();
        let quad = AngularQuadrature::product(3, 16, 32).unwrap();
        PotentialField::new(spec, quad, 6.0, 0.01).unwrap()
    }

    #[test]
    fn harmonic_average_is_r_squared() {
        let f = harmonic_field();
        for r in [0.0, 0.3, 1.0, 2.5, 7.0] {
            let direct = angular_average(f.spec(), f.quadrature(), r).unwrap();
            assert!((direct - r * r).abs() < 1e-12 * (1.0 + r * r));
            assert!((f.mean(r) - r * r).abs() < 1e-12 * (1.0 + r * r));
        }
    }

    #[test]
    fn delta_v_examples() {
        let f = harmonic_field();
        assert!((f.delta_v(&[0.0, 0.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((f.delta_integral(f.quadrature(), 1.0)).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_split() {
        // V = x² + x³: the odd part drops out of the average.
        let spec = PotentialSpec::new(
            1,
            Family::PolynomialWell(PolynomialParams {
                terms: vec![
                    Monomial {
                        coefficient: 1.0,
                        powers: vec![2],
                    },
                    Monomial {
                        coefficient: 1.0,
                        powers: vec![3],
                    },
                ],
            }),
            None,
            0.5,
        )
        .unwrap();
        let quad = AngularQuadrature::product(1, 4, 8).unwrap();
        assert_eq!(angular_average(&spec, &quad, 2.0).unwrap(), 4.0);
        let f = PotentialField::new(spec, quad, 5.0, 0.01).unwrap();
        for x in [0.3, 1.1, 2.7] {
            assert_eq!(f.mean(x), f.mean(-x));
            let odd = f.delta_v(&[x]).unwrap() + f.delta_v(&[-x]).unwrap();
            assert!(odd.abs() < 1e-12);
        }
    }

    #[test]
    fn zero_potential_has_zero_remainder() {
        let f = PotentialField::new(
            PotentialSpec::zero(3).unwrap(),
            AngularQuadrature::product(3, 8, 16).unwrap(),
            3.0,
            0.05,
        )
        .unwrap();
        assert_eq!(f.delta(&[0.3, -1.0, 2.0]), 0.0);
        assert_eq!(f.mean(1.7), 0.0);
    }

    #[test]
    fn zero_mean_gate() {
        let f = harmonic_field();
        let q = f.quadrature().clone();
        let check = verify_zero_mean(&f, &q, &[0.5, 1.0, 2.0], 1e-12).unwrap();
        assert!(check.max_residual <= 1e-12);
        assert!(verify_zero_mean(&f, &q, &[], 1e-12).is_err());
        assert!(verify_zero_mean(&f, &q, &[-1.0], 1e-12).is_err());
    }
}
