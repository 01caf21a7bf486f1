//! Abresch–Rosenberg type quadratic differentials on the canonical frames.
//!
//! `Q_{a,b}(X, Y) = a σ(X − iJX, Y − iJY) + b h(X − iJX) h(Y − iJY)` where
//! `h(V) = ⟨V, E3⟩`. The Lorentzian differential is built the same way from
//! `σ̃`, `J̃` and `⟨·, Ẽ3⟩`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::duality::DualPair;
use crate::error::{GeomError, Result};
use crate::graph::{minkowski_hessian_curvature, GraphSurface, PointGeometry};
use crate::space::Side;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The parameter triple `(κ, τ, H)` shared by a dual pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub kappa: f64,
    pub tau: f64,
    pub h: f64,
}

impl Triple {
    pub fn new(kappa: f64, tau: f64, h: f64) -> Self {
        Self { kappa, tau, h }
    }

    pub fn of(surface: &GraphSurface) -> Self {
        let (kappa, tau, h) = surface.triple();
        Self { kappa, tau, h }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientPair {
    pub a: Complex64,
    pub b: Complex64,
}

impl CoefficientPair {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self { a: c * self.a, b: c * self.b }
    }

    /// Modulus of the side's linear constraint.
    pub fn constraint_residual(&self, t: Triple, side: Side) -> f64 {
        let hit = Complex64::new(t.h, t.tau);
        match side {
            Side::Riemannian => ((t.kappa - 4.0 * t.tau * t.tau) * self.a + 2.0 * hit * self.b).norm(),
            Side::Lorentzian => ((t.kappa + 4.0 * t.h * t.h) * self.a + 2.0 * I * hit * self.b).norm(),
        }
    }
}

pub fn canonical_coefficients(t: Triple, side: Side) -> CoefficientPair {
    match side {
        Side::Riemannian => {
            CoefficientPair::new(Complex64::new(2.0 * t.h, 2.0 * t.tau), Complex64::new(-(t.kappa - 4.0 * t.tau * t.tau), 0.0))
        }
        Side::Lorentzian => {
            CoefficientPair::new(Complex64::new(2.0 * t.tau, -2.0 * t.h), Complex64::new(t.kappa + 4.0 * t.h * t.h, 0.0))
        }
    }
}

/// `(1, −2iτ)` and its dual `(−i, 0)`, proportional to the canonical pairs
/// when `κ = H = 0`.
pub fn normalized_nil_coefficients(tau: f64) -> (CoefficientPair, CoefficientPair) {
    (
        CoefficientPair::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, -2.0 * tau)),
        CoefficientPair::new(-I, Complex64::new(0.0, 0.0)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualCoefficients {
    pub pair: CoefficientPair,
    /// Set when `κ = 4τ²`, where `b̃` is fixed by the Lorentzian constraint
    /// instead of the `b`-relation.
    pub degenerate: bool,
}

pub fn dual_coefficients(pair: CoefficientPair, t: Triple) -> DualCoefficients {
    let a = -I * pair.a;
    let d = t.kappa - 4.0 * t.tau * t.tau;
    let k = t.kappa + 4.0 * t.h * t.h;
    if d != 0.0 {
        return DualCoefficients { pair: CoefficientPair::new(a, -k * pair.b / d), degenerate: false };
    }
    let hit = Complex64::new(t.h, t.tau);
    let b = if hit.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { k * pair.a / (2.0 * hit) };
    DualCoefficients { pair: CoefficientPair::new(a, b), degenerate: true }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadDiffFrame {
    pub q11: Complex64,
    pub q12: Complex64,
    pub q22: Complex64,
}

impl QuadDiffFrame {
    pub fn max_diff(&self, o: &QuadDiffFrame) -> f64 {
        (self.q11 - o.q11).norm().max((self.q12 - o.q12).norm()).max((self.q22 - o.q22).norm())
    }

    pub fn max_norm(&self) -> f64 {
        self.q11.norm().max(self.q12.norm()).max(self.q22.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QPath {
    /// Second fundamental form, `J` and height components.
    General,
    /// Closed expressions in the jet, valid for `κ = 0` with the normalized
    /// coefficients (minimal graphs in Nil₃, CMC graphs in L³).
    KappaZero,
}

pub fn q_from_geometry(side: Side, g: &PointGeometry, coeffs: CoefficientPair) -> QuadDiffFrame {
    let j = g.frame.rotation(side);
    let sigma = g.shape.second_ff;
    let hv = g.frame.height_components(side);
    // complex coefficients of e_k − i J e_k in the basis (e1, e2)
    let z = |k: usize| {
        [Complex64::new(if k == 0 { 1.0 } else { 0.0 }, -j[0][k]), Complex64::new(if k == 1 { 1.0 } else { 0.0 }, -j[1][k])]
    };
    let zs = [z(0), z(1)];
    let s = |p: &[Complex64; 2], q: &[Complex64; 2]| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                acc += p[a] * sigma[a][b] * q[b];
            }
        }
        acc
    };
    let ht = |p: &[Complex64; 2]| p[0] * hv[0] + p[1] * hv[1];
    let q = |a: usize, b: usize| coeffs.a * s(&zs[a], &zs[b]) + coeffs.b * ht(&zs[a]) * ht(&zs[b]);
    QuadDiffFrame { q11: q(0, 0), q12: q(0, 1), q22: q(1, 1) }
}

fn kappa_zero_riemannian(g: &PointGeometry) -> QuadDiffFrame {
    let (a, b, w) = (g.frame.alpha, g.frame.beta, g.frame.omega);
    let j = g.jet;
    let w2 = w * w;
    QuadDiffFrame {
        q11: Complex64::new(2.0 * j.uxx / w, 2.0 / w2 * (a * b * j.uxx - (1.0 + a * a) * j.uxy)),
        q12: Complex64::new(2.0 * j.uxy / w, 2.0 / w2 * ((1.0 + b * b) * j.uxx - a * b * j.uxy)),
        q22: Complex64::new(2.0 * j.uyy / w, 2.0 / w2 * ((1.0 + b * b) * j.uxy - a * b * j.uyy)),
    }
}

impl QuadDiffFrame {
    pub fn scale(self, c: Complex64) -> Self {
        Self { q11: c * self.q11, q12: c * self.q12, q22: c * self.q22 }
    }
}

fn kappa_zero_lorentzian(g: &PointGeometry, tau: f64) -> QuadDiffFrame {
    let (a, b, w) = (g.frame.alpha, g.frame.beta, g.frame.omega);
    let j = g.jet;
    let w2 = w * w;
    QuadDiffFrame {
        q11: Complex64::new(2.0 / w2 * (a * b * j.uxx + (1.0 - a * a) * j.uxy), 2.0 / w * j.uxx - 2.0 * tau * (1.0 - a * a)),
        q12: Complex64::new(
            -2.0 / w2 * ((1.0 - b * b) * j.uxx + a * b * j.uxy) + 2.0 * tau * w,
            2.0 / w * j.uxy + 2.0 * tau * a * b,
        ),
        q22: Complex64::new(-2.0 / w2 * (a * b * j.uyy + (1.0 - b * b) * j.uxy), 2.0 / w * j.uyy - 2.0 * tau * (1.0 - b * b)),
    }
}

pub fn evaluate_q(surface: &GraphSurface, coeffs: CoefficientPair, x: f64, y: f64, path: QPath) -> Result<QuadDiffFrame> {
    let g = surface.geometry(x, y)?;
    match path {
        QPath::General => Ok(q_from_geometry(surface.side(), &g, coeffs)),
        QPath::KappaZero => {
            let t = Triple::of(surface);
            if surface.space.kappa != 0.0 || t.h != 0.0 {
                return Err(GeomError::InvalidParameter(format!(
                    "closed forms need κ = H = 0, got κ = {}, H = {}",
                    t.kappa, t.h
                )));
            }
            let (nr, nl) = normalized_nil_coefficients(t.tau);
            let (norm, base) = match surface.side() {
                Side::Riemannian => (nr, kappa_zero_riemannian(&g)),
                Side::Lorentzian => (nl, kappa_zero_lorentzian(&g, t.tau)),
            };
            let c = coeffs.a / norm.a;
            if (coeffs.b - c * norm.b).norm() > 1e-12 * (1.0 + coeffs.b.norm()) {
                return Err(GeomError::InvalidParameter(
                    "closed forms need coefficients proportional to the normalized pair".into(),
                ));
            }
            Ok(base.scale(c))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub duality: f64,
    /// `κ = 0` pairs only.
    pub hessian: Option<f64>,
    /// `κ = 0`, `τ ≠ 0` pairs only.
    pub modulus: Option<f64>,
}

/// `q = |Q(e1, e1)|² / (4 (1 + α²)²)` for the canonical differential.
pub fn modulus_q(g: &PointGeometry, t: Triple) -> f64 {
    let q = q_from_geometry(Side::Riemannian, g, canonical_coefficients(t, Side::Riemannian));
    let i11 = g.frame.first_ff[0][0];
    q.q11.norm_sqr() / (4.0 * i11 * i11)
}

pub fn identity_residuals(pair: &DualPair, x: f64, y: f64) -> Result<IdentityResiduals> {
    let t = Triple::of(&pair.riemannian);
    let gr = pair.riemannian.geometry(x, y)?;
    let gl = pair.lorentzian.geometry(x, y)?;
    let cr = canonical_coefficients(t, Side::Riemannian);
    let cl = dual_coefficients(cr, t).pair;
    let q = q_from_geometry(Side::Riemannian, &gr, cr);
    let qt = q_from_geometry(Side::Lorentzian, &gl, cl);
    let duality = q.max_diff(&qt);
    if t.kappa != 0.0 || t.h != 0.0 {
        return Ok(IdentityResiduals { duality, hessian: None, modulus: None });
    }
    let det = gr.jet.neg_hessian_det();
    let hessian = (det - (minkowski_hessian_curvature(&gl.jet) + t.tau * t.tau)).abs();
    let modulus = if t.tau != 0.0 {
        let nu4 = gr.frame.nu.powi(4);
        Some((modulus_q(&gr, t) / (4.0 * t.tau * t.tau * nu4) - det).abs())
    } else {
        None
    };
    Ok(IdentityResiduals { duality, hessian: Some(hessian), modulus })
}
