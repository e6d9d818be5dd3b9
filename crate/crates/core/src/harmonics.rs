//! Real orthonormal angular functions: real spherical harmonics in 3D and
//! cos/sin harmonics on the circle in 2D.
//!
//! Real spherical harmonics are ordered μ = −ℓ..=ℓ, with μ < 0 carrying
//! sin(|μ|φ) and μ > 0 carrying cos(μφ); no Condon–Shortley phase, so the
//! ℓ = 1 triple is √(3/4π)·(y, z, x). In 2D channel m > 0 yields
//! (sin mφ, cos mφ)/√π and m = 0 yields 1/√(2π).
//!
//! The complex Y_{1m} are recovered from the real p triple by the fixed
//! unitary in [`p_real_to_complex`].

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, Matrix3};

/// Number of angular functions in a channel.
pub fn channel_multiplicity(dimension: usize, channel: usize) -> usize {
    match dimension {
        3 => 2 * channel + 1,
        2 => {
            if channel == 0 {
                1
            } else {
                2
            }
        }
        _ => 1,
    }
}

/// All real angular functions of `channel` evaluated at a unit direction.
pub fn angular_functions(dimension: usize, channel: usize, dir: &[f64; 3]) -> Vec<f64> {
    match dimension {
        3 => real_spherical_harmonics(channel, dir),
        2 => {
            let phi = dir[1].atan2(dir[0]);
            if channel == 0 {
                vec![1.0 / (2.0 * PI).sqrt()]
            } else {
                let m = channel as f64;
                let c = 1.0 / PI.sqrt();
                vec![c * (m * phi).sin(), c * (m * phi).cos()]
            }
        }
        _ => vec![1.0 / 2f64.sqrt()],
    }
}

/// Real spherical harmonics of degree `l` at a unit vector.
pub fn real_spherical_harmonics(l: usize, dir: &[f64; 3]) -> Vec<f64> {
    let z = dir[2].clamp(-1.0, 1.0);
    let phi = dir[1].atan2(dir[0]);
    let sin_theta = (1.0 - z * z).max(0.0).sqrt();
    let mut out = vec![0.0; 2 * l + 1];
    for m in 0..=l {
        let plm = assoc_legendre(l, m, z, sin_theta);
        let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial_ratio(l, m)).sqrt();
        if m == 0 {
            out[l] = norm * plm;
        } else {
            let mf = m as f64;
            out[l + m] = 2f64.sqrt() * norm * plm * (mf * phi).cos();
            out[l - m] = 2f64.sqrt() * norm * plm * (mf * phi).sin();
        }
    }
    out
}

/// (l − m)! / (l + m)!
fn factorial_ratio(l: usize, m: usize) -> f64 {
    ((l - m + 1)..=(l + m)).fold(1.0, |acc, k| acc / k as f64)
}

/// Associated Legendre function P_l^m(x) without the Condon–Shortley phase.
fn assoc_legendre(l: usize, m: usize, x: f64, sin_theta: f64) -> f64 {
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= (2 * k - 1) as f64 * sin_theta;
    }
    if l == m {
        return pmm;
    }
    let mut pmm1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pmm1;
    }
    for ll in (m + 2)..=l {
        let p = (x * (2 * ll - 1) as f64 * pmm1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pmm1;
        pmm1 = p;
    }
    pmm1
}

/// Normalization of the Cartesian p functions: f_i(x) = P_NORM · x_i · g(r).
pub fn p_norm(dimension: usize) -> f64 {
    match dimension {
        3 => (3.0 / (4.0 * PI)).sqrt(),
        _ => 1.0 / PI.sqrt(),
    }
}

/// Normalization of the isotropic angular function: 1/√(4π) or 1/√(2π).
pub fn s_norm(dimension: usize) -> f64 {
    match dimension {
        3 => 1.0 / (4.0 * PI).sqrt(),
        2 => 1.0 / (2.0 * PI).sqrt(),
        _ => 1.0 / 2f64.sqrt(),
    }
}

/// Unitary U with rows (Y_{1,−1}, Y_{1,0}, Y_{1,1}) = U · (p_x, p_y, p_z),
/// using the Condon–Shortley convention for the complex harmonics.
pub fn p_real_to_complex() -> Matrix3<Complex<f64>> {
    let s = 0.5f64.sqrt();
    let c = |re: f64, im: f64| Complex::new(re, im);
    Matrix3::new(
        c(s, 0.0),
        c(0.0, -s),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(-s, 0.0),
        c(0.0, -s),
        c(0.0, 0.0),
    )
}

/// Re-expresses a real 3×3 matrix over (p_x, p_y, p_z) in the complex
/// Y_{1m} basis, m = −1, 0, 1: M_c = U* M Uᵀ (so M_c[m, m'] = ⟨Y_{1m}|·|Y_{1m'}⟩).
pub fn to_complex_p_basis(m: &DMatrix<f64>) -> Matrix3<Complex<f64>> {
    assert_eq!(m.shape(), (3, 3), "p manifold matrix must be 3×3");
    let u = p_real_to_complex();
    let mc = Matrix3::from_fn(|i, j| Complex::new(m[(i, j)], 0.0));
    u.map(|z| z.conj()) * mc * u.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::quadrature::AngularQuadrature;

    #[test]
    fn p_triple_is_cartesian() {
        let d = [0.36, -0.48, 0.8];
        let y = real_spherical_harmonics(1, &d);
        let n = p_norm(3);
        assert!((y[0] - n * d[1]).abs() < 1e-14);
        assert!((y[1] - n * d[2]).abs() < 1e-14);
        assert!((y[2] - n * d[0]).abs() < 1e-14);
    }

    #[test]
    fn orthonormal_under_quadrature() {
        let q = AngularQuadrature::product(3, 8, 16).unwrap();
        let lmax = 4;
        let mut funcs: Vec<Vec<f64>> = Vec::new();
        for node in q.nodes() {
            let mut row = Vec::new();
            for l in 0..=lmax {
                row.extend(real_spherical_harmonics(l, &node.dir));
            }
            funcs.push(row);
        }
        let count = funcs[0].len();
        for a in 0..count {
            for b in 0..count {
                let s: f64 = q
                    .nodes()
                    .iter()
                    .zip(&funcs)
                    .map(|(n, f)| n.weight * f[a] * f[b])
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-12, "({a},{b}) -> {s}");
            }
        }
    }

    #[test]
    fn circle_functions_orthonormal() {
        let q = AngularQuadrature::product(2, 8, 32).unwrap();
        for m in 0..5 {
            for mm in 0..5 {
                for (i, _) in angular_functions(2, m, &[1.0, 0.0, 0.0]).iter().enumerate() {
                    for (j, _) in angular_functions(2, mm, &[1.0, 0.0, 0.0]).iter().enumerate() {
                        let s = q.integrate(|d| {
                            angular_functions(2, m, d)[i] * angular_functions(2, mm, d)[j]
                        });
                        let want = if m == mm && i == j { 1.0 } else { 0.0 };
                        assert!((s - want).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn addition_theorem_for_p() {
        // Σ_m |Y_1m|² = 3/(4π) at every direction.
        for d in [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [0.48, 0.6, 0.64]] {
            let s: f64 = real_spherical_harmonics(1, &d).iter().map(|y| y * y).sum();
            assert!((s - 3.0 / (4.0 * PI)).abs() < 1e-14);
        }
    }

    #[test]
    fn complex_map_is_unitary_and_preserves_trace() {
        let u = p_real_to_complex();
        let id = u * u.adjoint();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)].re - want).abs() < 1e-15 && id[(i, j)].im.abs() < 1e-15);
            }
        }
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, -0.3, 0.2, -2.0, 0.5, -0.3, 0.5, 1.0]);
        let mc = to_complex_p_basis(&m);
        let tr = mc[(0, 0)] + mc[(1, 1)] + mc[(2, 2)];
        assert!(tr.re.abs() < 1e-14 && tr.im.abs() < 1e-14);
        // Hermitian.
        let diff = mc - mc.adjoint();
        assert!(diff.iter().all(|z| z.norm() < 1e-14));
    }
}
