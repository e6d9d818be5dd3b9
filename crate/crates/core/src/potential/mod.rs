//! Potential descriptions, their evaluation, and the split of a potential
//! into its angular average and anisotropic remainder.

pub mod field;
pub mod quadrature;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{input_err, Error, Result};
use crate::symmetry::PointGroup;

pub use field::{angular_average, verify_zero_mean, PotentialField, ZeroMeanCheck};
pub use quadrature::{AngularQuadrature, QuadratureConfig, QuadratureScheme};

/// The JSON form of a potential, exactly as read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub dimension: usize,
    pub family: String,
    pub parameters: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinetic_coefficient: Option<f64>,
}

/// ½·m·Σ ωᵢ² xᵢ² with m = 1/(2·kinetic_coefficient) and ħ = 1, so the
/// spectrum is Σ ωᵢ(nᵢ + ½) whatever the kinetic coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicParams {
    pub omega: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianWellParams {
    pub depth: f64,
    /// One width for every axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    /// Per-axis widths in the well's body frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub widths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    /// Body-frame orientation: ZYZ Euler angles in 3D, a single angle in 2D.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
}

/// Σ depth·exp(−½ Σ (yⱼ/σⱼ)²) with y the body-frame offset from the centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSumParams {
    pub wells: Vec<GaussianWellParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coefficient: f64,
    pub powers: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialParams {
    pub terms: Vec<Monomial>,
}

/// Values on a rectilinear grid, first axis slowest; multilinear
/// interpolation inside, clamped to the boundary outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedParams {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    AnisotropicHarmonic(HarmonicParams),
    GaussianWellSum(GaussianSumParams),
    PolynomialWell(PolynomialParams),
    Tabulated(TabulatedParams),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::AnisotropicHarmonic(_) => "anisotropic_harmonic",
            Family::GaussianWellSum(_) => "gaussian_well_sum",
            Family::PolynomialWell(_) => "polynomial_well",
            Family::Tabulated(_) => "tabulated",
        }
    }

    fn parameters(&self) -> Value {
        let v = match self {
            Family::AnisotropicHarmonic(p) => serde_json::to_value(p),
            Family::GaussianWellSum(p) => serde_json::to_value(p),
            Family::PolynomialWell(p) => serde_json::to_value(p),
            Family::Tabulated(p) => serde_json::to_value(p),
        };
        v.expect("parameter structs always serialize")
    }
}

#[derive(Debug, Clone)]
struct Gaussian {
    depth: f64,
    inv_two_sigma2: [f64; 3],
    center: [f64; 3],
    /// Rows are the body axes expressed in the lab frame.
    body: [[f64; 3]; 3],
}

#[derive(Debug, Clone)]
enum Evaluator {
    Harmonic { half_m_omega2: [f64; 3] },
    Gaussians(Vec<Gaussian>),
    Polynomial(Vec<(f64, [i32; 3])>),
    Table {
        origin: [f64; 3],
        spacing: [f64; 3],
        shape: [usize; 3],
        values: Vec<f64>,
    },
}

/// A validated potential V(x) in one, two or three dimensions.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    dimension: usize,
    family: Family,
    declared_symmetry: Option<PointGroup>,
    axis: Option<[f64; 3]>,
    kinetic_coefficient: f64,
    eval: Evaluator,
}

pub const DEFAULT_KINETIC_COEFFICIENT: f64 = 0.5;

fn check_finite(name: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        input_err(format!("{name} must be finite"))
    }
}

fn pad3(xs: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    out[..xs.len()].copy_from_slice(xs);
    out
}

fn rot_z(a: f64) -> [[f64; 3]; 3] {
    let (s, c) = a.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

fn rot_y(a: f64) -> [[f64; 3]; 3] {
    let (s, c) = a.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

fn matmul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn transpose(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

impl PotentialSpec {
    pub fn new(
        dimension: usize,
        family: Family,
        declared_symmetry: Option<PointGroup>,
        kinetic_coefficient: f64,
    ) -> Result<Self> {
        Self::with_axis(dimension, family, declared_symmetry, None, kinetic_coefficient)
    }

    pub fn with_axis(
        dimension: usize,
        family: Family,
        declared_symmetry: Option<PointGroup>,
        axis: Option<[f64; 3]>,
        kinetic_coefficient: f64,
    ) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return input_err(format!("dimension must be 1, 2 or 3, got {dimension}"));
        }
        if !(kinetic_coefficient.is_finite() && kinetic_coefficient > 0.0) {
            return input_err("kinetic_coefficient must be finite and > 0");
        }
        if let Some(g) = &declared_symmetry {
            g.check_dimension(dimension)?;
        }
        if let Some(a) = axis {
            check_finite("axis", &a)?;
            if a.iter().map(|x| x * x).sum::<f64>() == 0.0 {
                return input_err("axis must be non-zero");
            }
        }
        let eval = build_evaluator(dimension, &family, kinetic_coefficient)?;
        Ok(Self {
            dimension,
            family,
            declared_symmetry,
            axis,
            kinetic_coefficient,
            eval,
        })
    }

    /// V ≡ 0, the polynomial well with no terms.
    pub fn zero(dimension: usize) -> Result<Self> {
        Self::new(
            dimension,
            Family::PolynomialWell(PolynomialParams { terms: vec![] }),
            None,
            DEFAULT_KINETIC_COEFFICIENT,
        )
    }

    pub fn harmonic(omega: &[f64]) -> Result<Self> {
        Self::new(
            omega.len(),
            Family::AnisotropicHarmonic(HarmonicParams {
                omega: omega.to_vec(),
            }),
            None,
            DEFAULT_KINETIC_COEFFICIENT,
        )
    }

    pub fn from_config(cfg: &PotentialConfig) -> Result<Self> {
        let family = match cfg.family.as_str() {
            "anisotropic_harmonic" => Family::AnisotropicHarmonic(parse_params(&cfg.parameters)?),
            "gaussian_well_sum" => Family::GaussianWellSum(parse_params(&cfg.parameters)?),
            "polynomial_well" => Family::PolynomialWell(parse_params(&cfg.parameters)?),
            "tabulated" => Family::Tabulated(parse_params(&cfg.parameters)?),
            other => {
                return Err(Error::Config(format!(
                    "unknown family {other:?}; expected anisotropic_harmonic, gaussian_well_sum, polynomial_well or tabulated"
                )))
            }
        };
        let symmetry = cfg
            .symmetry
            .as_deref()
            .map(str::parse::<PointGroup>)
            .transpose()?;
        let axis = match &cfg.axis {
            None => None,
            Some(a) if a.len() == 3 => Some([a[0], a[1], a[2]]),
            Some(a) => return input_err(format!("axis must have 3 components, got {}", a.len())),
        };
        Self::with_axis(
            cfg.dimension,
            family,
            symmetry,
            axis,
            cfg.kinetic_coefficient.unwrap_or(DEFAULT_KINETIC_COEFFICIENT),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PotentialConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_config(&cfg)
    }

    pub fn to_config(&self) -> PotentialConfig {
        PotentialConfig {
            dimension: self.dimension,
            family: self.family.name().to_string(),
            parameters: self.family.parameters(),
            symmetry: self.declared_symmetry.map(|g| g.to_string()),
            axis: self.axis.map(|a| a.to_vec()),
            kinetic_coefficient: Some(self.kinetic_coefficient),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn declared_symmetry(&self) -> Option<PointGroup> {
        self.declared_symmetry
    }

    pub fn axis(&self) -> Option<[f64; 3]> {
        self.axis
    }

    pub fn kinetic_coefficient(&self) -> f64 {
        self.kinetic_coefficient
    }

    /// V at `point`, which must have exactly `dimension` components.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.dimension {
            return input_err(format!(
                "point has {} components, potential is {}-dimensional",
                point.len(),
                self.dimension
            ));
        }
        Ok(self.value(&pad3(point)))
    }

    /// V at a padded point (unused components ignored). Hot path, no checks.
    pub fn value(&self, x: &[f64; 3]) -> f64 {
        match &self.eval {
            Evaluator::Harmonic { half_m_omega2 } => {
                half_m_omega2[0] * x[0] * x[0]
                    + half_m_omega2[1] * x[1] * x[1]
                    + half_m_omega2[2] * x[2] * x[2]
            }
            Evaluator::Gaussians(ws) => ws
                .iter()
                .map(|g| {
                    let d = [x[0] - g.center[0], x[1] - g.center[1], x[2] - g.center[2]];
                    let mut e = 0.0;
                    for (axis, k) in g.body.iter().zip(&g.inv_two_sigma2) {
                        let y = axis[0] * d[0] + axis[1] * d[1] + axis[2] * d[2];
                        e += k * y * y;
                    }
                    g.depth * (-e).exp()
                })
                .sum(),
            Evaluator::Polynomial(terms) => terms
                .iter()
                .map(|(c, p)| c * x[0].powi(p[0]) * x[1].powi(p[1]) * x[2].powi(p[2]))
                .sum(),
            Evaluator::Table {
                origin,
                spacing,
                shape,
                values,
            } => {
                let mut base = [0usize; 3];
                let mut frac = [0.0; 3];
                for a in 0..3 {
                    if shape[a] == 1 {
                        continue;
                    }
                    let t = ((x[a] - origin[a]) / spacing[a]).clamp(0.0, (shape[a] - 1) as f64);
                    let i = (t.floor() as usize).min(shape[a] - 2);
                    base[a] = i;
                    frac[a] = t - i as f64;
                }
                let mut acc = 0.0;
                for corner in 0..8usize {
                    let mut w = 1.0;
                    let mut idx = 0;
                    let mut skip = false;
                    for a in 0..3 {
                        let bit = (corner >> a) & 1;
                        if shape[a] == 1 {
                            if bit == 1 {
                                skip = true;
                            }
                            idx = idx * shape[a];
                            continue;
                        }
                        w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                        idx = idx * shape[a] + base[a] + bit;
                    }
                    if !skip && w != 0.0 {
                        acc += w * values[idx];
                    }
                }
                acc
            }
        }
    }
}

fn parse_params<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Config(format!("parameters: {e}")))
}

fn build_evaluator(dimension: usize, family: &Family, kc: f64) -> Result<Evaluator> {
    match family {
        Family::AnisotropicHarmonic(p) => {
            if p.omega.len() != dimension {
                return input_err(format!(
                    "anisotropic_harmonic needs {dimension} frequencies, got {}",
                    p.omega.len()
                ));
            }
            check_finite("omega", &p.omega)?;
            if p.omega.iter().any(|&w| w <= 0.0) {
                return input_err("all frequencies must be > 0");
            }
            let mass = 1.0 / (2.0 * kc);
            let mut half_m_omega2 = [0.0; 3];
            for (h, w) in half_m_omega2.iter_mut().zip(&p.omega) {
                *h = 0.5 * mass * w * w;
            }
            Ok(Evaluator::Harmonic { half_m_omega2 })
        }
        Family::GaussianWellSum(p) => {
            if p.wells.is_empty() {
                return input_err("gaussian_well_sum needs at least one well");
            }
            if !p.wells.iter().any(|w| w.depth < 0.0) {
                return input_err("gaussian_well_sum needs at least one well with depth < 0");
            }
            let wells = p
                .wells
                .iter()
                .map(|w| build_gaussian(dimension, w))
                .collect::<Result<Vec<_>>>()?;
            Ok(Evaluator::Gaussians(wells))
        }
        Family::PolynomialWell(p) => {
            let mut terms = Vec::with_capacity(p.terms.len());
            for t in &p.terms {
                if t.powers.len() != dimension {
                    return input_err(format!(
                        "polynomial term needs {dimension} powers, got {}",
                        t.powers.len()
                    ));
                }
                check_finite("coefficient", &[t.coefficient])?;
                let mut pw = [0i32; 3];
                for (dst, &src) in pw.iter_mut().zip(&t.powers) {
                    if src > 64 {
                        return input_err("polynomial powers above 64 are not supported");
                    }
                    *dst = src as i32;
                }
                terms.push((t.coefficient, pw));
            }
            Ok(Evaluator::Polynomial(terms))
        }
        Family::Tabulated(p) => {
            if p.origin.len() != dimension || p.spacing.len() != dimension || p.shape.len() != dimension
            {
                return input_err(format!(
                    "tabulated origin/spacing/shape must each have {dimension} entries"
                ));
            }
            check_finite("origin", &p.origin)?;
            check_finite("spacing", &p.spacing)?;
            check_finite("values", &p.values)?;
            if p.spacing.iter().any(|&s| s <= 0.0) {
                return input_err("tabulated spacing must be > 0");
            }
            if p.shape.iter().any(|&n| n < 2) {
                return input_err("tabulated shape needs at least 2 points per axis");
            }
            let total: usize = p.shape.iter().product();
            if total != p.values.len() {
                return input_err(format!(
                    "tabulated values has {} entries, shape requires {total}",
                    p.values.len()
                ));
            }
            let mut shape = [1usize; 3];
            shape[..dimension].copy_from_slice(&p.shape);
            let mut spacing = [1.0; 3];
            spacing[..dimension].copy_from_slice(&p.spacing);
            Ok(Evaluator::Table {
                origin: pad3(&p.origin),
                spacing,
                shape,
                values: p.values.clone(),
            })
        }
    }
}

fn build_gaussian(dimension: usize, w: &GaussianWellParams) -> Result<Gaussian> {
    check_finite("depth", &[w.depth])?;
    let widths = match (&w.width, &w.widths) {
        (Some(s), None) => vec![*s; dimension],
        (None, Some(ws)) if ws.len() == dimension => ws.clone(),
        (None, Some(ws)) => {
            return input_err(format!("widths needs {dimension} entries, got {}", ws.len()))
        }
        _ => return input_err("each well needs exactly one of `width` or `widths`"),
    };
    check_finite("widths", &widths)?;
    if widths.iter().any(|&s| s <= 0.0) {
        return input_err("all widths must be > 0");
    }
    let center = match &w.center {
        None => [0.0; 3],
        Some(c) if c.len() == dimension => {
            check_finite("center", c)?;
            pad3(c)
        }
        Some(c) => return input_err(format!("center needs {dimension} entries, got {}", c.len())),
    };
    let rotation = match (&w.angles, dimension) {
        (None, _) => [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        (Some(a), 3) if a.len() == 3 => {
            check_finite("angles", a)?;
            matmul(&matmul(&rot_z(a[0]), &rot_y(a[1])), &rot_z(a[2]))
        }
        (Some(a), 2) if a.len() == 1 => {
            check_finite("angles", a)?;
            rot_z(a[0])
        }
        (Some(a), d) => {
            return input_err(format!(
                "angles: expected {} entries in {d}D, got {}",
                if d == 3 { 3 } else { 1 },
                a.len()
            ))
        }
    };
    let mut inv_two_sigma2 = [0.0; 3];
    for (k, s) in inv_two_sigma2.iter_mut().zip(&widths) {
        *k = 0.5 / (s * s);
    }
    Ok(Gaussian {
        depth: w.depth,
        inv_two_sigma2,
        center,
        // Body coordinates are Rᵀ(x − c): the rows of Rᵀ are R's columns.
        body: transpose(&rotation),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(depth: f64, width: f64, dim: usize) -> PotentialSpec {
        PotentialSpec::new(
            dim,
            Family::GaussianWellSum(GaussianSumParams {
                wells: vec![GaussianWellParams {
                    depth,
                    width: Some(width),
                    widths: None,
                    center: None,
                    angles: None,
                }],
            }),
            None,
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn harmonic_values() {
        let v = PotentialSpec::harmonic(&[1.0, 1.0, 2.0]).unwrap();
        assert_eq!(v.evaluate(&[1.0, 0.0, 0.0]).unwrap(), 0.5);
        assert_eq!(v.evaluate(&[0.0, 0.0, 1.0]).unwrap(), 2.0);
    }

    #[test]
    fn gaussian_peak() {
        assert_eq!(gaussian(-5.0, 1.0, 1).evaluate(&[0.0]).unwrap(), -5.0);
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let v = PotentialSpec::harmonic(&[1.0, 1.0, 2.0]).unwrap();
        assert!(matches!(v.evaluate(&[1.0, 0.0]), Err(Error::Input(_))));
    }

    #[test]
    fn harmonic_mass_follows_kinetic_coefficient() {
        // kc = 0.25 means m = 2, so V = ω² x².
        let v = PotentialSpec::new(
            1,
            Family::AnisotropicHarmonic(HarmonicParams { omega: vec![3.0] }),
            None,
            0.25,
        )
        .unwrap();
        assert!((v.evaluate(&[0.5]).unwrap() - 9.0 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn rotated_well_matches_swapped_widths() {
        // Rotating a (1, 2) well by 90° in 2D swaps its axes.
        let mk = |widths: Vec<f64>, angles: Option<Vec<f64>>| {
            PotentialSpec::new(
                2,
                Family::GaussianWellSum(GaussianSumParams {
                    wells: vec![GaussianWellParams {
                        depth: -1.0,
                        width: None,
                        widths: Some(widths),
                        center: None,
                        angles,
                    }],
                }),
                None,
                0.5,
            )
            .unwrap()
        };
        let a = mk(vec![1.0, 2.0], Some(vec![std::f64::consts::FRAC_PI_2]));
        let b = mk(vec![2.0, 1.0], None);
        for p in [[0.3, 0.7], [-1.2, 0.4], [2.0, -1.0]] {
            assert!((a.evaluate(&p).unwrap() - b.evaluate(&p).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn tabulated_is_multilinear() {
        // V = 1 + 2x − y on a 3×3 grid is reproduced exactly.
        let mut values = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                values.push(1.0 + 2.0 * i as f64 - j as f64);
            }
        }
        let v = PotentialSpec::new(
            2,
            Family::Tabulated(TabulatedParams {
                origin: vec![0.0, 0.0],
                spacing: vec![1.0, 1.0],
                shape: vec![3, 3],
                values,
            }),
            None,
            0.5,
        )
        .unwrap();
        assert!((v.evaluate(&[0.5, 1.25]).unwrap() - (1.0 + 1.0 - 1.25)).abs() < 1e-14);
        // Clamped outside.
        assert!((v.evaluate(&[5.0, 0.0]).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_arity() {
        let bad_key = r#"{"dimension":3,"family":"anisotropic_harmonic","parameters":{"omega":[1,1,2]},"colour":"red"}"#;
        assert!(matches!(PotentialSpec::from_json(bad_key), Err(Error::Config(_))));
        let bad_param = r#"{"dimension":3,"family":"anisotropic_harmonic","parameters":{"omega":[1,1,2],"phase":1}}"#;
        assert!(matches!(PotentialSpec::from_json(bad_param), Err(Error::Config(_))));
        let bad_arity = r#"{"dimension":3,"family":"anisotropic_harmonic","parameters":{"omega":[1,1]}}"#;
        assert!(matches!(PotentialSpec::from_json(bad_arity), Err(Error::Input(_))));
        let no_negative = r#"{"dimension":1,"family":"gaussian_well_sum","parameters":{"wells":[{"depth":1,"width":1}]}}"#;
        assert!(PotentialSpec::from_json(no_negative).is_err());
        let bad_width = r#"{"dimension":1,"family":"gaussian_well_sum","parameters":{"wells":[{"depth":-1,"width":0}]}}"#;
        assert!(PotentialSpec::from_json(bad_width).is_err());
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{"dimension":3,"family":"gaussian_well_sum","parameters":{"wells":[{"depth":-5,"widths":[1,1,0.5],"center":[0,0,0.2]}]},"symmetry":"C2v","kinetic_coefficient":0.5}"#;
        let spec = PotentialSpec::from_json(text).unwrap();
        let again = PotentialSpec::from_config(&spec.to_config()).unwrap();
        assert_eq!(again.to_config(), spec.to_config());
        assert_eq!(spec.declared_symmetry().unwrap().to_string(), "C2v");
    }
}
