//! The two homogeneous model families.
//!
//! Both live on `Ω_κ × R` with the conformal factor
//! `λ = 1 / (1 + κ/4 (x² + y²))` on the base. The Riemannian side is the
//! Killing submersion `E(κ, τ)`, the Lorentzian side is `L(κ, H)` with a
//! timelike vertical direction.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Riemannian,
    Lorentzian,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Riemannian => Side::Lorentzian,
            Side::Lorentzian => Side::Riemannian,
        }
    }

    /// Sign of `⟨E3, E3⟩`.
    pub fn vertical_sign(self) -> f64 {
        match self {
            Side::Riemannian => 1.0,
            Side::Lorentzian => -1.0,
        }
    }
}

/// `E(κ, τ)` when `side` is Riemannian, `L(κ, H)` otherwise; `bundle`
/// carries τ or H respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub side: Side,
    pub kappa: f64,
    pub bundle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl AmbientPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Coordinate components `(V^x, V^y, V^z)` of a tangent vector at `base`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientVector {
    pub base: AmbientPoint,
    pub components: [f64; 3],
}

impl AmbientVector {
    pub fn new(base: AmbientPoint, components: [f64; 3]) -> Self {
        Self { base, components }
    }
}

impl SpaceParams {
    pub fn new(side: Side, kappa: f64, bundle: f64) -> Result<Self> {
        if !kappa.is_finite() || !bundle.is_finite() {
            return Err(GeomError::InvalidParameter(format!(
                "space parameters must be finite (kappa = {kappa}, bundle = {bundle})"
            )));
        }
        Ok(Self { side, kappa, bundle })
    }

    pub fn riemannian(kappa: f64, tau: f64) -> Self {
        Self { side: Side::Riemannian, kappa, bundle: tau }
    }

    pub fn lorentzian(kappa: f64, h: f64) -> Self {
        Self { side: Side::Lorentzian, kappa, bundle: h }
    }

    /// Heisenberg group `Nil₃(τ) = E(0, τ)`.
    pub fn nil(tau: f64) -> Self {
        Self::riemannian(0.0, tau)
    }

    /// Lorentz–Minkowski space `L³ = L(0, 0)`.
    pub fn minkowski() -> Self {
        Self::lorentzian(0.0, 0.0)
    }

    pub fn is_minkowski(&self) -> bool {
        self.side == Side::Lorentzian && self.kappa == 0.0 && self.bundle == 0.0
    }

    /// Twist coefficient of the connection form `dz + c λ (y dx − x dy)`.
    pub fn twist(&self) -> f64 {
        match self.side {
            Side::Riemannian => self.bundle,
            Side::Lorentzian => -self.bundle,
        }
    }

    pub fn in_domain(&self, x: f64, y: f64) -> bool {
        1.0 + 0.25 * self.kappa * (x * x + y * y) > 0.0
    }

    pub fn conformal_factor(&self, x: f64, y: f64) -> Result<f64> {
        let d = 1.0 + 0.25 * self.kappa * (x * x + y * y);
        if d > 0.0 && x.is_finite() && y.is_finite() {
            Ok(1.0 / d)
        } else {
            Err(GeomError::DomainViolation { x, y })
        }
    }

    /// Value of the connection one-form on a coordinate vector; this is the
    /// `E3` component of the vector in the orthonormal frame.
    pub fn vertical_form(&self, p: &AmbientPoint, v: &[f64; 3]) -> Result<f64> {
        let lambda = self.conformal_factor(p.x, p.y)?;
        Ok(v[2] + self.twist() * lambda * (p.y * v[0] - p.x * v[1]))
    }

    /// Components of a coordinate vector in the orthonormal frame.
    pub fn frame_coefficients(&self, p: &AmbientPoint, v: &[f64; 3]) -> Result<[f64; 3]> {
        let lambda = self.conformal_factor(p.x, p.y)?;
        Ok([lambda * v[0], lambda * v[1], v[2] + self.twist() * lambda * (p.y * v[0] - p.x * v[1])])
    }

    /// Inverse of [`frame_coefficients`](Self::frame_coefficients).
    pub fn from_frame(&self, p: &AmbientPoint, c: &[f64; 3]) -> Result<[f64; 3]> {
        let frame = self.orthonormal_frame(p)?;
        let mut out = [0.0; 3];
        for (k, e) in frame.iter().enumerate() {
            for i in 0..3 {
                out[i] += c[k] * e.components[i];
            }
        }
        Ok(out)
    }

    /// Metric evaluated on two coordinate vectors at `p`.
    pub fn metric_eval(&self, p: &AmbientPoint, v: &[f64; 3], w: &[f64; 3]) -> Result<f64> {
        let a = self.frame_coefficients(p, v)?;
        let b = self.frame_coefficients(p, w)?;
        Ok(self.frame_inner(&a, &b))
    }

    /// Metric on two vectors sharing a base point.
    pub fn inner(&self, v: &AmbientVector, w: &AmbientVector) -> Result<f64> {
        if v.base != w.base {
            return Err(GeomError::InvalidParameter("vectors are based at different points".into()));
        }
        self.metric_eval(&v.base, &v.components, &w.components)
    }

    /// Inner product of frame components: `diag(1, 1, ±1)`.
    pub fn frame_inner(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        a[0] * b[0] + a[1] * b[1] + self.side.vertical_sign() * a[2] * b[2]
    }

    /// `(E1, E2, E3)` in coordinates at `p`.
    pub fn orthonormal_frame(&self, p: &AmbientPoint) -> Result<[AmbientVector; 3]> {
        let lambda = self.conformal_factor(p.x, p.y)?;
        let c = self.twist();
        Ok([
            AmbientVector::new(*p, [1.0 / lambda, 0.0, -c * p.y]),
            AmbientVector::new(*p, [0.0, 1.0 / lambda, c * p.x]),
            AmbientVector::new(*p, [0.0, 0.0, 1.0]),
        ])
    }

    /// Frame components of `∇_{E_i} E_j` at `p` (indices 0, 1, 2).
    pub fn connection_in_frame(&self, i: usize, j: usize, p: &AmbientPoint) -> Result<[f64; 3]> {
        if i > 2 || j > 2 {
            return Err(GeomError::InvalidParameter(format!("frame index ({i}, {j}) out of range")));
        }
        self.conformal_factor(p.x, p.y)?;
        let k2 = 0.5 * self.kappa;
        let (x, y) = (p.x, p.y);
        let t = self.bundle;
        let tab = match self.side {
            Side::Riemannian => [
                [[0.0, k2 * y, 0.0], [-k2 * y, 0.0, t], [0.0, -t, 0.0]],
                [[0.0, -k2 * x, -t], [k2 * x, 0.0, 0.0], [t, 0.0, 0.0]],
                [[0.0, -t, 0.0], [t, 0.0, 0.0], [0.0, 0.0, 0.0]],
            ],
            Side::Lorentzian => [
                [[0.0, k2 * y, 0.0], [-k2 * y, 0.0, -t], [0.0, -t, 0.0]],
                [[0.0, -k2 * x, t], [k2 * x, 0.0, 0.0], [t, 0.0, 0.0]],
                [[0.0, -t, 0.0], [t, 0.0, 0.0], [0.0, 0.0, 0.0]],
            ],
        };
        Ok(tab[i][j])
    }

    /// `∇_V W` in frame components, where `v` are frame components of the
    /// direction and `w` frame components of the field at `p`, and `dw` the
    /// derivative of those components along `V`.
    pub fn covariant_in_frame(&self, p: &AmbientPoint, v: &[f64; 3], w: &[f64; 3], dw: &[f64; 3]) -> Result<[f64; 3]> {
        let mut out = *dw;
        for a in 0..3 {
            if v[a] == 0.0 {
                continue;
            }
            for b in 0..3 {
                if w[b] == 0.0 {
                    continue;
                }
                let nab = self.connection_in_frame(a, b, p)?;
                for k in 0..3 {
                    out[k] += v[a] * w[b] * nab[k];
                }
            }
        }
        Ok(out)
    }

    /// Derivative along the coordinate direction `v` of the frame matrix
    /// applied to the fixed coordinate vector `w`.
    pub fn frame_coefficients_derivative(&self, p: &AmbientPoint, v: &[f64; 3], w: &[f64; 3]) -> Result<[f64; 3]> {
        let lambda = self.conformal_factor(p.x, p.y)?;
        let dl = -0.5 * self.kappa * lambda * lambda * (p.x * v[0] + p.y * v[1]);
        let dly = dl * p.y + lambda * v[1];
        let dlx = dl * p.x + lambda * v[0];
        Ok([dl * w[0], dl * w[1], self.twist() * (dly * w[0] - dlx * w[1])])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space_strategy() -> impl Strategy<Value = SpaceParams> {
        (prop::bool::ANY, -2.0..2.0f64, -1.5..1.5f64).prop_map(|(r, k, b)| {
            if r {
                SpaceParams::riemannian(k, b)
            } else {
                SpaceParams::lorentzian(k, b)
            }
        })
    }

    #[test]
    fn nil_frame_at_point() {
        let s = SpaceParams::nil(0.5);
        let f = s.orthonormal_frame(&AmbientPoint::new(1.0, 2.0, 0.0)).unwrap();
        assert_eq!(f[0].components, [1.0, 0.0, -1.0]);
        assert_eq!(f[1].components, [0.0, 1.0, 0.5]);
        for i in 0..3 {
            for j in 0..3 {
                let g = s.inner(&f[i], &f[j]).unwrap();
                assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn minkowski_is_flat() {
        let s = SpaceParams::minkowski();
        let p = AmbientPoint::new(0.3, -0.7, 2.0);
        assert_eq!(s.metric_eval(&p, &[0.0, 0.0, 1.0], &[0.0, 0.0, 1.0]).unwrap(), -1.0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s.connection_in_frame(i, j, &p).unwrap(), [0.0; 3]);
            }
        }
    }

    #[test]
    fn domain_is_enforced() {
        let s = SpaceParams::riemannian(-1.0, 0.0);
        assert!(s.conformal_factor(1.9, 0.0).is_ok());
        assert!(matches!(s.conformal_factor(2.0, 0.0), Err(GeomError::DomainViolation { .. })));
        assert!(SpaceParams::riemannian(1.0, 0.0).conformal_factor(100.0, 100.0).is_ok());
    }

    #[test]
    fn frame_roundtrip() {
        let s = SpaceParams::lorentzian(0.7, -0.4);
        let p = AmbientPoint::new(0.4, 1.1, 3.0);
        let v = [0.2, -1.3, 0.8];
        let c = s.frame_coefficients(&p, &v).unwrap();
        let back = s.from_frame(&p, &c).unwrap();
        for i in 0..3 {
            assert!((back[i] - v[i]).abs() < 1e-14);
        }
    }

    // Lie bracket of frame fields from finite differences of their
    // coordinate components, compared with the torsion-free identity.
    fn bracket_fd(s: &SpaceParams, i: usize, j: usize, p: &AmbientPoint) -> [f64; 3] {
        let h = 1e-5;
        let field = |q: &AmbientPoint, k: usize| s.orthonormal_frame(q).unwrap()[k].components;
        let ei = field(p, i);
        let ej = field(p, j);
        let deriv = |k: usize, dir: &[f64; 3]| {
            let qp = AmbientPoint::new(p.x + h * dir[0], p.y + h * dir[1], p.z + h * dir[2]);
            let qm = AmbientPoint::new(p.x - h * dir[0], p.y - h * dir[1], p.z - h * dir[2]);
            let a = field(&qp, k);
            let b = field(&qm, k);
            [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h), (a[2] - b[2]) / (2.0 * h)]
        };
        let dj = deriv(j, &ei);
        let di = deriv(i, &ej);
        [dj[0] - di[0], dj[1] - di[1], dj[2] - di[2]]
    }

    proptest! {
        #[test]
        fn frame_is_orthonormal(s in space_strategy(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
            let p = AmbientPoint::new(x, y, 0.0);
            let f = s.orthonormal_frame(&p).unwrap();
            let eta = [1.0, 1.0, s.side.vertical_sign()];
            for i in 0..3 {
                for j in 0..3 {
                    let g = s.inner(&f[i], &f[j]).unwrap();
                    let want = if i == j { eta[i] } else { 0.0 };
                    prop_assert!((g - want).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn connection_is_metric(s in space_strategy(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
            let p = AmbientPoint::new(x, y, 0.0);
            let eta = [1.0, 1.0, s.side.vertical_sign()];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let a = s.connection_in_frame(i, j, &p).unwrap()[k] * eta[k];
                        let b = s.connection_in_frame(i, k, &p).unwrap()[j] * eta[j];
                        prop_assert!((a + b).abs() < 1e-14);
                    }
                }
            }
        }

        #[test]
        fn connection_is_torsion_free(s in space_strategy(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
            let p = AmbientPoint::new(x, y, 0.5);
            for i in 0..3 {
                for j in 0..3 {
                    let a = s.connection_in_frame(i, j, &p).unwrap();
                    let b = s.connection_in_frame(j, i, &p).unwrap();
                    let diff = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
                    let coords = s.from_frame(&p, &diff).unwrap();
                    let fd = bracket_fd(&s, i, j, &p);
                    for k in 0..3 {
                        prop_assert!((coords[k] - fd[k]).abs() < 1e-7, "{i}{j}: {coords:?} vs {fd:?}");
                    }
                }
            }
        }
    }
}
