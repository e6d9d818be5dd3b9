//! Point groups in Schoenflies notation, the p-state selection rule for
//! ⟨u₀|V|u₁⟩, and numerical checks of declared symmetry.
//!
//! The group's principal axis is z unless a custom axis is given; n = 1
//! members that coincide with other groups are stored in their canonical
//! form (C1h = C1v = Cs, D1h = C2v, D1d = C2h, D1 = C2, Ci = S2).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input_err, Error, Result};
use crate::potential::PotentialField;
use crate::variational::{matrix_element, PBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointGroup {
    T,
    Td,
    Th,
    O,
    Oh,
    I,
    Ih,
    /// C_n
    C(u32),
    /// C_nv
    Cv(u32),
    /// C_nh
    Ch(u32),
    /// D_n
    D(u32),
    /// D_nh
    Dh(u32),
    /// D_nd
    Dd(u32),
    /// S_2n, storing n.
    S(u32),
    CInfV,
    DInfH,
    /// Two-dimensional rotation group C_n^(2d).
    C2d(u32),
    /// Two-dimensional dihedral group D_n^(2d).
    D2d(u32),
}

impl PointGroup {
    /// Canonical representative of groups that have several names.
    pub fn normalized(self) -> Self {
        use PointGroup::*;
        match self {
            Cv(1) => Ch(1),
            Dh(1) => Cv(2),
            Dd(1) => Ch(2),
            D(1) => C(2),
            g => g,
        }
    }

    pub fn is_two_dimensional(self) -> bool {
        matches!(self, PointGroup::C2d(_) | PointGroup::D2d(_))
    }

    /// Groups usable in one dimension: the trivial group and inversion.
    fn is_one_dimensional(self) -> bool {
        matches!(self.normalized(), PointGroup::C(1) | PointGroup::S(1))
    }

    pub fn check_dimension(self, dimension: usize) -> Result<()> {
        let ok = match dimension {
            1 => self.is_one_dimensional(),
            2 => self.is_two_dimensional(),
            3 => !self.is_two_dimensional(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            input_err(format!("point group {self} is not valid in {dimension}D"))
        }
    }

    /// Orthogonal generator matrices with the principal axis along z.
    /// Continuous groups are represented by rotations through 2π/k,
    /// k = 2..=16, plus their mirrors.
    pub fn generators(self) -> Vec<Matrix3<f64>> {
        use PointGroup::*;
        let rz = |angle: f64| Rotation3::from_axis_angle(&Vector3::z_axis(), angle).into_inner();
        let rx_pi = Rotation3::from_axis_angle(&Vector3::x_axis(), PI).into_inner();
        let mirror = |n: Vector3<f64>| {
            let n = n.normalize();
            Matrix3::identity() - 2.0 * n * n.transpose()
        };
        let sigma_h = mirror(Vector3::z());
        let sigma_v = mirror(Vector3::y());
        let inversion = -Matrix3::identity();
        let c3_diag = Matrix3::new(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        let golden = 0.5 * (1.0 + 5f64.sqrt());
        let c5_vertex = Rotation3::from_axis_angle(
            &Unit::new_normalize(Vector3::new(0.0, 1.0, golden)),
            2.0 * PI / 5.0,
        )
        .into_inner();
        let tetra = vec![rz(PI), c3_diag];
        let icosa = vec![rz(PI), c3_diag, c5_vertex];
        let continuous = || (2..=16).map(|k| rz(2.0 * PI / k as f64)).collect::<Vec<_>>();
        let cyclic = |n: u32| {
            if n > 1 {
                vec![rz(2.0 * PI / n as f64)]
            } else {
                vec![]
            }
        };
        let with = |mut base: Vec<Matrix3<f64>>, extra: &[Matrix3<f64>]| {
            base.extend_from_slice(extra);
            base
        };
        match self.normalized() {
            T => tetra,
            Td => with(tetra, &[mirror(Vector3::new(1.0, -1.0, 0.0))]),
            Th => with(tetra, &[inversion]),
            O => vec![rz(PI / 2.0), c3_diag],
            Oh => vec![rz(PI / 2.0), c3_diag, inversion],
            I => icosa,
            Ih => with(icosa, &[inversion]),
            C(n) => cyclic(n),
            Cv(n) => with(cyclic(n), &[sigma_v]),
            Ch(n) => with(cyclic(n), &[sigma_h]),
            D(n) => with(cyclic(n), &[rx_pi]),
            Dh(n) => with(cyclic(n), &[rx_pi, sigma_h]),
            Dd(n) => vec![sigma_h * rz(PI / n as f64), rx_pi],
            S(n) => vec![sigma_h * rz(PI / n as f64)],
            CInfV => with(continuous(), &[sigma_v]),
            DInfH => with(continuous(), &[sigma_v, sigma_h]),
            C2d(n) => cyclic(n),
            D2d(n) => with(cyclic(n), &[sigma_v]),
        }
    }
}

impl fmt::Display for PointGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use PointGroup::*;
        match self.normalized() {
            T => write!(f, "T"),
            Td => write!(f, "Td"),
            Th => write!(f, "Th"),
            O => write!(f, "O"),
            Oh => write!(f, "Oh"),
            I => write!(f, "I"),
            Ih => write!(f, "Ih"),
            C(n) => write!(f, "C{n}"),
            Cv(n) => write!(f, "C{n}v"),
            Ch(1) => write!(f, "Cs"),
            Ch(n) => write!(f, "C{n}h"),
            D(n) => write!(f, "D{n}"),
            Dh(n) => write!(f, "D{n}h"),
            Dd(n) => write!(f, "D{n}d"),
            S(n) => write!(f, "S{}", 2 * n),
            CInfV => write!(f, "Cinfv"),
            DInfH => write!(f, "Dinfh"),
            C2d(n) => write!(f, "C{n}(2d)"),
            D2d(n) => write!(f, "D{n}(2d)"),
        }
    }
}

impl FromStr for PointGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use PointGroup::*;
        let bad = || Error::Input(format!("unknown point group {s:?}"));
        let cleaned: String = s
            .chars()
            .filter(|c| !matches!(c, '_' | '{' | '}' | ' '))
            .collect::<String>()
            .replace('∞', "inf");
        let (body, planar) = match cleaned
            .strip_suffix("(2d)")
            .or_else(|| cleaned.strip_suffix("(2D)"))
        {
            Some(b) => (b.to_string(), true),
            None => (cleaned.clone(), false),
        };
        let order = |digits: &str| -> Result<u32> {
            let n: u32 = digits.parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            Ok(n)
        };
        if planar {
            let (kind, rest) = body.split_at(1.min(body.len()));
            let n = order(rest)?;
            return match kind {
                "C" => Ok(C2d(n)),
                "D" => Ok(D2d(n)),
                _ => Err(bad()),
            };
        }
        let fixed = match body.as_str() {
            "T" => Some(T),
            "Td" => Some(Td),
            "Th" => Some(Th),
            "O" => Some(O),
            "Oh" => Some(Oh),
            "I" => Some(I),
            "Ih" => Some(Ih),
            "Cs" => Some(Ch(1)),
            "Ci" => Some(S(1)),
            "Cinfv" => Some(CInfV),
            "Dinfh" => Some(DInfH),
            _ => None,
        };
        if let Some(g) = fixed {
            return Ok(g);
        }
        let mut chars = body.chars();
        let kind = chars.next().ok_or_else(bad)?;
        let rest: String = chars.collect();
        let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
        let suffix = &rest[digits.len()..];
        let n = order(&digits)?;
        let g = match (kind, suffix) {
            ('C', "") => C(n),
            ('C', "v") => Cv(n),
            ('C', "h") => Ch(n),
            ('D', "") => D(n),
            ('D', "h") => Dh(n),
            ('D', "d") => Dd(n),
            ('S', "") if n % 2 == 0 => S(n / 2),
            _ => return Err(bad()),
        };
        Ok(g.normalized())
    }
}

impl Serialize for PointGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PointGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Whether symmetry alone forces ⟨u₀|V|u₁⟩ = 0 for every p state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionVerdict {
    pub group: String,
    pub guaranteed_zero: bool,
    pub reason: String,
    /// Filled in once the cross elements have been measured.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerically_confirmed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_cross_element: Option<f64>,
}

/// Selection-rule table for p states.
///
/// Guaranteed zero: the seven cubic and icosahedral groups; C_nh, D_n,
/// D_nh, D_nd and S_2n (S_2 is inversion), except C_s and C_2v; D_∞h;
/// and in 2D, C_n and D_n with n ≥ 2. Everything else has a p component
/// that transforms trivially, or is simply not covered by the table, and
/// gets `false`.
pub fn selection_rule(group: PointGroup, dimension: usize) -> Result<SelectionVerdict> {
    use PointGroup::*;
    group.check_dimension(dimension)?;
    let g = group.normalized();
    let (zero, reason) = match g {
        T | Td | Th | O | Oh | I | Ih => (true, "cubic or icosahedral group: p states span a non-trivial irrep"),
        Ch(1) => (false, "C_s = C_1h: the in-plane p states are invariant"),
        Cv(2) => (false, "C_2v = D_1h: the p state along the axis is invariant"),
        Ch(_) => (true, "C_nh, n ≥ 2: σ_h flips p_z, C_n rotates p_x, p_y"),
        D(_) => (true, "D_n, n ≥ 2: no p state is invariant"),
        Dh(_) => (true, "D_nh, n ≥ 2: no p state is invariant"),
        Dd(_) => (true, "D_nd, n ≥ 2: no p state is invariant"),
        S(1) if dimension == 1 => (true, "inversion: odd states are orthogonal to even ones"),
        S(1) => (true, "S_2 = inversion: every p state is odd"),
        S(_) => (true, "S_2n: no p state is invariant"),
        DInfH => (true, "D_∞h contains inversion"),
        CInfV => (false, "C_∞v: p_z along the axis is invariant"),
        C(1) => (false, "trivial group: no constraint"),
        C(_) => (false, "C_n alone leaves p_z invariant"),
        Cv(_) => (false, "C_nv leaves p_z invariant"),
        C2d(1) | D2d(1) => (false, "n = 1 in 2D leaves a p state invariant"),
        C2d(_) => (true, "C_n^(2d), n ≥ 2: p states rotate non-trivially"),
        D2d(_) => (true, "D_n^(2d), n ≥ 2: p states rotate non-trivially"),
    };
    Ok(SelectionVerdict {
        group: g.to_string(),
        guaranteed_zero: zero,
        reason: reason.to_string(),
        numerically_confirmed: None,
        max_cross_element: None,
    })
}

/// Rotation taking ẑ onto `axis`.
pub fn frame_for_axis(axis: [f64; 3]) -> Matrix3<f64> {
    let a = Vector3::from(axis).normalize();
    match Rotation3::rotation_between(&Vector3::z(), &a) {
        Some(r) => r.into_inner(),
        // a = −ẑ: any half turn about a perpendicular axis.
        None => Rotation3::from_axis_angle(&Vector3::x_axis(), PI).into_inner(),
    }
}

/// Generators expressed in the frame whose principal axis is `axis`.
pub fn generators_in_frame(group: PointGroup, axis: Option<[f64; 3]>) -> Vec<Matrix3<f64>> {
    let gens = group.generators();
    match axis {
        None => gens,
        Some(a) => {
            let r = frame_for_axis(a);
            gens.into_iter().map(|g| r * g * r.transpose()).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceCheck {
    pub group: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub accepted: bool,
    pub n_samples: usize,
}

/// Default relative tolerance for accepting a declared symmetry.
pub const INVARIANCE_TOLERANCE: f64 = 1e-9;

/// max over sample points x and generators g of |V(g·x) − V(x)|, relative
/// to the local magnitude of V (floored at 10⁻³ of its mean magnitude).
/// Points are drawn uniformly from the ball of `sample_radius`.
pub fn verify_invariance(
    field: &PotentialField,
    group: PointGroup,
    n_samples: usize,
    sample_radius: f64,
    seed: u64,
) -> Result<InvarianceCheck> {
    let dim = field.dimension();
    group.check_dimension(dim)?;
    if n_samples == 0 || !(sample_radius > 0.0) {
        return input_err("need at least one sample and a positive sample radius");
    }
    let gens = if dim == 1 {
        match group.normalized() {
            PointGroup::S(1) => vec![-Matrix3::identity()],
            _ => vec![],
        }
    } else {
        generators_in_frame(group, field.spec().axis())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_samples);
    while points.len() < n_samples {
        let mut p = [0.0; 3];
        for c in p.iter_mut().take(dim) {
            *c = rng.gen_range(-sample_radius..sample_radius);
        }
        if p.iter().map(|x| x * x).sum::<f64>() <= sample_radius * sample_radius {
            points.push(p);
        }
    }
    let values: Vec<f64> = points.iter().map(|p| field.value(p)).collect();
    let mean_mag = values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64;
    let floor = (1e-3 * mean_mag).max(f64::MIN_POSITIVE);
    let mut max_dev: f64 = 0.0;
    for (p, &v) in points.iter().zip(&values) {
        let x = Vector3::from(*p);
        for g in &gens {
            let y = g * x;
            let gv = field.value(&[y[0], y[1], y[2]]);
            let scale = v.abs().max(gv.abs()).max(floor);
            max_dev = max_dev.max((gv - v).abs() / scale);
        }
    }
    Ok(InvarianceCheck {
        group: group.normalized().to_string(),
        max_deviation: max_dev,
        tolerance: INVARIANCE_TOLERANCE,
        accepted: max_dev <= INVARIANCE_TOLERANCE,
        n_samples,
    })
}

/// max_i |⟨u₀|ΔV|f_i⟩| over the p functions, on the shared Cartesian grid.
pub fn cross_element_check(u0: &[f64], pbasis: &PBasis, dv: &[f64]) -> Result<f64> {
    let cell = pbasis.grid().cell_volume();
    let mut max: f64 = 0.0;
    for f in pbasis.functions() {
        max = max.max(matrix_element(u0, dv, f, cell)?.abs());
    }
    Ok(max)
}
