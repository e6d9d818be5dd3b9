//! Angular quadrature rules on the unit sphere (3D), the unit circle (2D)
//! and the two-point "sphere" {−1, +1} (1D).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};

/// One quadrature node: a unit direction (unused trailing components are
/// zero in 1D/2D) and its weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadNode {
    pub dir: [f64; 3],
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureScheme {
    /// Gauss–Legendre in cos θ times the uniform trapezoid rule in φ.
    ProductGaussTrapezoid,
    /// Octahedrally symmetric fixed-point rules of degree 3, 5, 7 or 9.
    LebedevLikeFixedOrder,
}

/// Serialized quadrature settings, as they appear in configs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub scheme: QuadratureScheme,
    /// Gauss–Legendre nodes in cos θ (product rule) or polynomial degree
    /// (Lebedev-like rule).
    pub polar_order: usize,
    /// Uniform nodes in φ (product rule only).
    #[serde(default)]
    pub azimuthal_order: Option<usize>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            scheme: QuadratureScheme::ProductGaussTrapezoid,
            polar_order: 32,
            azimuthal_order: None,
        }
    }
}

impl QuadratureConfig {
    pub fn build(&self, dimension: usize) -> Result<AngularQuadrature> {
        match self.scheme {
            QuadratureScheme::ProductGaussTrapezoid => {
                let az = self.azimuthal_order.unwrap_or(2 * self.polar_order);
                AngularQuadrature::product(dimension, self.polar_order, az)
            }
            QuadratureScheme::LebedevLikeFixedOrder => {
                if dimension != 3 {
                    return input_err("Lebedev-like rules exist only in three dimensions");
                }
                AngularQuadrature::lebedev_like(self.polar_order)
            }
        }
    }
}

/// A quadrature rule over all directions.
///
/// The product rule with `p` polar and `a` azimuthal nodes integrates every
/// spherical polynomial of degree ≤ min(2p − 1, a − 1) exactly, hence
/// products Y*_{ℓm} Y_{ℓ'm'} with ℓ, ℓ' ≤ p − 1 whenever a ≥ 2p − 1.
#[derive(Debug, Clone)]
pub struct AngularQuadrature {
    scheme: QuadratureScheme,
    dimension: usize,
    polar_order: usize,
    azimuthal_order: usize,
    nodes: Vec<QuadNode>,
}

impl AngularQuadrature {
    pub fn product(dimension: usize, polar_order: usize, azimuthal_order: usize) -> Result<Self> {
        if polar_order < 4 {
            return input_err(format!("polar_order must be ≥ 4, got {polar_order}"));
        }
        if azimuthal_order < 8 {
            return input_err(format!("azimuthal_order must be ≥ 8, got {azimuthal_order}"));
        }
        let nodes = match dimension {
            1 => vec![
                QuadNode {
                    dir: [1.0, 0.0, 0.0],
                    weight: 1.0,
                },
                QuadNode {
                    dir: [-1.0, 0.0, 0.0],
                    weight: 1.0,
                },
            ],
            2 => (0..azimuthal_order)
                .map(|j| {
                    let phi = 2.0 * PI * j as f64 / azimuthal_order as f64;
                    QuadNode {
                        dir: [phi.cos(), phi.sin(), 0.0],
                        weight: 2.0 * PI / azimuthal_order as f64,
                    }
                })
                .collect(),
            3 => {
                let (xs, ws) = gauss_legendre(polar_order);
                let dphi = 2.0 * PI / azimuthal_order as f64;
                let mut nodes = Vec::with_capacity(polar_order * azimuthal_order);
                for (&ct, &wt) in xs.iter().zip(&ws) {
                    let st = (1.0 - ct * ct).max(0.0).sqrt();
                    for j in 0..azimuthal_order {
                        let phi = dphi * j as f64;
                        nodes.push(QuadNode {
                            dir: [st * phi.cos(), st * phi.sin(), ct],
                            weight: wt * dphi,
                        });
                    }
                }
                nodes
            }
            d => return input_err(format!("dimension must be 1, 2 or 3, got {d}")),
        };
        Ok(Self {
            scheme: QuadratureScheme::ProductGaussTrapezoid,
            dimension,
            polar_order,
            azimuthal_order,
            nodes,
        })
    }

    /// Fixed rules with 6, 14, 26 and 38 points (degrees 3, 5, 7, 9).
    pub fn lebedev_like(degree: usize) -> Result<Self> {
        let s2 = 0.5f64.sqrt();
        let s3 = (1.0f64 / 3.0).sqrt();
        let mut pts: Vec<([f64; 3], f64)> = Vec::new();
        let (a1, a2, a3, c1) = match degree {
            3 => (1.0 / 6.0, 0.0, 0.0, 0.0),
            5 => (1.0 / 15.0, 0.0, 3.0 / 40.0, 0.0),
            7 => (1.0 / 21.0, 4.0 / 105.0, 9.0 / 280.0, 0.0),
            9 => (1.0 / 105.0, 0.0, 9.0 / 280.0, 1.0 / 35.0),
            _ => return input_err(format!("Lebedev-like degree must be 3, 5, 7 or 9, got {degree}")),
        };
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut v = [0.0; 3];
                v[axis] = sign;
                pts.push((v, a1));
            }
        }
        if a2 > 0.0 {
            for zero in 0..3 {
                let (i, j) = ((zero + 1) % 3, (zero + 2) % 3);
                for si in [1.0, -1.0] {
                    for sj in [1.0, -1.0] {
                        let mut v = [0.0; 3];
                        v[i] = si * s2;
                        v[j] = sj * s2;
                        pts.push((v, a2));
                    }
                }
            }
        }
        if a3 > 0.0 {
            for sx in [1.0, -1.0] {
                for sy in [1.0, -1.0] {
                    for sz in [1.0, -1.0] {
                        pts.push(([sx * s3, sy * s3, sz * s3], a3));
                    }
                }
            }
        }
        if c1 > 0.0 {
            let p: f64 = 0.459_700_843_380_983_1;
            let q = (1.0 - p * p).sqrt();
            for zero in 0..3 {
                let (i, j) = ((zero + 1) % 3, (zero + 2) % 3);
                for (u, w) in [(p, q), (q, p)] {
                    for su in [1.0, -1.0] {
                        for sw in [1.0, -1.0] {
                            let mut v = [0.0; 3];
                            v[i] = su * u;
                            v[j] = sw * w;
                            pts.push((v, c1));
                        }
                    }
                }
            }
        }
        let nodes = pts
            .into_iter()
            .map(|(dir, w)| QuadNode {
                dir,
                weight: 4.0 * PI * w,
            })
            .collect();
        Ok(Self {
            scheme: QuadratureScheme::LebedevLikeFixedOrder,
            dimension: 3,
            polar_order: degree,
            azimuthal_order: 0,
            nodes,
        })
    }

    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn polar_order(&self) -> usize {
        self.polar_order
    }

    pub fn azimuthal_order(&self) -> usize {
        self.azimuthal_order
    }

    pub fn nodes(&self) -> &[QuadNode] {
        &self.nodes
    }

    /// 4π, 2π or 2.
    pub fn full_measure(&self) -> f64 {
        match self.dimension {
            1 => 2.0,
            2 => 2.0 * PI,
            _ => 4.0 * PI,
        }
    }

    /// Sum of `f(dir) * weight` over the nodes.
    pub fn integrate(&self, mut f: impl FnMut(&[f64; 3]) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(&n.dir)).sum()
    }

    pub fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            scheme: self.scheme,
            polar_order: self.polar_order,
            azimuthal_order: match self.scheme {
                QuadratureScheme::ProductGaussTrapezoid => Some(self.azimuthal_order),
                QuadratureScheme::LebedevLikeFixedOrder => None,
            },
        }
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Mean of x^a y^b z^c over the unit sphere: (a−1)!!(b−1)!!(c−1)!!/(a+b+c+1)!!
    /// for all-even exponents, zero otherwise.
    fn sphere_moment(a: u32, b: u32, c: u32) -> f64 {
        if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
            return 0.0;
        }
        let dfact = |k: i64| -> f64 {
            let mut r = 1.0;
            let mut j = k;
            while j > 1 {
                r *= j as f64;
                j -= 2;
            }
            r
        };
        dfact(a as i64 - 1) * dfact(b as i64 - 1) * dfact(c as i64 - 1)
            / dfact((a + b + c) as i64 + 1)
    }

    fn check_monomials(q: &AngularQuadrature, max_degree: u32) {
        for a in 0..=max_degree {
            for b in 0..=(max_degree - a) {
                for c in 0..=(max_degree - a - b) {
                    let got = q.integrate(|d| {
                        d[0].powi(a as i32) * d[1].powi(b as i32) * d[2].powi(c as i32)
                    }) / (4.0 * PI);
                    let want = sphere_moment(a, b, c);
                    assert!(
                        (got - want).abs() < 1e-13,
                        "x^{a} y^{b} z^{c}: got {got}, want {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn gauss_legendre_small_cases() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
        assert!((w[2] - 128.0 / 225.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_full_measure() {
        for d in 1..=3 {
            let q = AngularQuadrature::product(d, 8, 16).unwrap();
            let s: f64 = q.nodes().iter().map(|n| n.weight).sum();
            assert!((s / q.full_measure() - 1.0).abs() < 1e-12);
        }
        for deg in [3, 5, 7, 9] {
            let q = AngularQuadrature::lebedev_like(deg).unwrap();
            let s: f64 = q.nodes().iter().map(|n| n.weight).sum();
            assert!((s / (4.0 * PI) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_rule_exact_to_its_degree() {
        let q = AngularQuadrature::product(3, 6, 12).unwrap();
        check_monomials(&q, 11);
    }

    #[test]
    fn lebedev_like_rules_exact_to_their_degree() {
        for deg in [3u32, 5, 7, 9] {
            let q = AngularQuadrature::lebedev_like(deg as usize).unwrap();
            check_monomials(&q, deg);
            for n in q.nodes() {
                let norm: f64 = n.dir.iter().map(|x| x * x).sum();
                assert!((norm - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_low_orders() {
        assert!(AngularQuadrature::product(3, 3, 16).is_err());
        assert!(AngularQuadrature::product(3, 8, 7).is_err());
        assert!(AngularQuadrature::lebedev_like(4).is_err());
    }
}
