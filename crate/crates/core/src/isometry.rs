//! Time-orientation-preserving affine isometries of `L³`, the subgroup
//! `Iso_ξ` fixing the vertical field, and the two-parameter group `G` of
//! hyperbolic and parabolic rotations fixing the null direction `(0, 1, 1)`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

const ETA_TOL: f64 = 1e-10;

fn eta() -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Generator {
    Hyperbolic(f64),
    Parabolic(f64),
    ZRotation(f64),
    Translation([f64; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzIsometry {
    pub linear: Matrix3<f64>,
    pub translation: Vector3<f64>,
    pub in_iso_xi: bool,
    pub in_g: bool,
}

/// Largest entry of `Lᵀ η L − η`, scaled by the size of `L`.
pub fn eta_residual(l: &Matrix3<f64>) -> f64 {
    let e = eta();
    let r = l.transpose() * e * l - e;
    r.amax() / (1.0 + l.norm_squared())
}

fn fixes_vertical(l: &Matrix3<f64>) -> bool {
    let v = l * Vector3::new(0.0, 0.0, 1.0) - Vector3::new(0.0, 0.0, 1.0);
    v.amax() < 1e-12
}

impl LorentzIsometry {
    pub fn new(linear: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        if !linear.iter().chain(translation.iter()).all(|v| v.is_finite()) {
            return Err(GeomError::InvalidParameter("isometry entries must be finite".into()));
        }
        let r = eta_residual(&linear);
        if r > ETA_TOL {
            return Err(GeomError::InvalidParameter(format!("linear part is not η-orthogonal (residual {r:e})")));
        }
        if linear[(2, 2)] <= 0.0 {
            return Err(GeomError::NotTimeOrientationPreserving);
        }
        if linear.determinant() <= 0.0 {
            return Err(GeomError::OrientationReversing);
        }
        Ok(Self { linear, translation, in_iso_xi: fixes_vertical(&linear), in_g: false })
    }

    pub fn identity() -> Self {
        Self { linear: Matrix3::identity(), translation: Vector3::zeros(), in_iso_xi: true, in_g: true }
    }

    pub fn generator(kind: Generator) -> Self {
        match kind {
            Generator::Hyperbolic(t) => {
                let (c, s) = (t.cosh(), t.sinh());
                let linear = Matrix3::new(1.0, 0.0, 0.0, 0.0, c, s, 0.0, s, c);
                Self { linear, translation: Vector3::zeros(), in_iso_xi: t == 0.0, in_g: true }
            }
            Generator::Parabolic(a) => {
                let h = 0.5 * a * a;
                let linear = Matrix3::new(1.0, -a, a, a, 1.0 - h, h, a, -h, 1.0 + h);
                Self { linear, translation: Vector3::zeros(), in_iso_xi: a == 0.0, in_g: true }
            }
            Generator::ZRotation(p) => {
                let (c, s) = (p.cos(), p.sin());
                let linear = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
                Self { linear, translation: Vector3::zeros(), in_iso_xi: true, in_g: linear == Matrix3::identity() }
            }
            Generator::Translation(t) => {
                Self { linear: Matrix3::identity(), translation: Vector3::from(t), in_iso_xi: true, in_g: t == [0.0; 3] }
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LorentzIsometry) -> LorentzIsometry {
        let linear = self.linear * other.linear;
        LorentzIsometry {
            linear,
            translation: self.linear * other.translation + self.translation,
            in_iso_xi: self.in_iso_xi && other.in_iso_xi || fixes_vertical(&linear),
            in_g: self.in_g && other.in_g,
        }
    }

    pub fn inverse(&self) -> LorentzIsometry {
        let e = eta();
        let inv = e * self.linear.transpose() * e;
        LorentzIsometry { linear: inv, translation: -(inv * self.translation), in_iso_xi: self.in_iso_xi, in_g: self.in_g }
    }

    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        let q = self.linear * Vector3::from(p) + self.translation;
        [q[0], q[1], q[2]]
    }

    pub fn max_diff(&self, o: &LorentzIsometry) -> f64 {
        (self.linear - o.linear).amax().max((self.translation - o.translation).amax())
    }

    pub fn is_vertical_translation(&self) -> bool {
        self.linear == Matrix3::identity() && self.translation[0] == 0.0 && self.translation[1] == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

/// Isometry from the upper sheet of `x² + y² − z² = −1` to the upper half
/// plane; `(0, 0, 1) ↦ (0, 1)`.
pub fn half_plane_chart(p: [f64; 3]) -> Result<HalfPlanePoint> {
    let [x, y, z] = p;
    let on = (1.0 + x * x + y * y).sqrt();
    if !(z > 0.0) || (z - on).abs() > 1e-10 * on {
        return Err(GeomError::DomainViolation { x, y });
    }
    let zp = 1.0 + z;
    let d = x * x + (1.0 - y + z) * (1.0 - y + z);
    Ok(HalfPlanePoint { x: 2.0 * x * zp / d, y: (zp * zp - x * x - y * y) / d })
}

/// `Parabolic(a) ∘ Hyperbolic(θ)`; every element of `G` has exactly one
/// such representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GElement {
    pub theta: f64,
    pub a: f64,
}

impl GElement {
    pub fn isometry(&self) -> LorentzIsometry {
        LorentzIsometry::generator(Generator::Parabolic(self.a))
            .compose(&LorentzIsometry::generator(Generator::Hyperbolic(self.theta)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factorization {
    pub s1: LorentzIsometry,
    pub s2: LorentzIsometry,
    pub g: GElement,
    /// Largest entry of `S1 ∘ S2 − S`.
    pub residual: f64,
}

/// Writes `S = S1 ∘ S2` with `S1 ∈ Iso_ξ` and `S2 ∈ G`.
pub fn factorize_g(s: &LorentzIsometry) -> Result<Factorization> {
    if s.linear[(2, 2)] <= 0.0 {
        return Err(GeomError::NotTimeOrientationPreserving);
    }
    if s.linear.determinant() <= 0.0 {
        return Err(GeomError::OrientationReversing);
    }
    // Rotate about the axis so the ideal point L·(0, 1, 1) returns to the
    // direction of (0, 1, 1); what is left fixes it and lies in G.
    let w = s.linear * Vector3::new(0.0, 1.0, 1.0);
    let phi = w[1].atan2(w[0]);
    let rot = LorentzIsometry::generator(Generator::ZRotation(FRAC_PI_2 - phi));
    let m = rot.linear * s.linear;
    let o = m * Vector3::new(0.0, 0.0, 1.0);
    let zr = (1.0 + o[0] * o[0] + o[1] * o[1]).sqrt();
    let chart = half_plane_chart([o[0], o[1], zr])?;
    let g = GElement { theta: chart.y.ln(), a: chart.x };
    let s2 = g.isometry();
    let t = s.translation;
    let s1 = LorentzIsometry::generator(Generator::Translation([t[0], t[1], t[2]]))
        .compose(&LorentzIsometry::generator(Generator::ZRotation(phi - FRAC_PI_2)));
    let residual = s1.compose(&s2).max_diff(s);
    Ok(Factorization { s1, s2, g, residual })
}
