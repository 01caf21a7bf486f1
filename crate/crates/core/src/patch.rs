//! Geometry of parametrized surfaces through the ambient connection.
//!
//! Coordinate tangent vectors are moved to the orthonormal frame and
//! differentiated with the tabulated connection, so nothing here depends
//! on the graph formulas; graphs viewed as patches give an independent
//! route to the same curvatures.

use num_complex::Complex64;

use crate::differential::CoefficientPair;
use crate::error::{GeomError, Result};
use crate::graph::{GraphSurface, Window};
use crate::space::{AmbientPoint, Side, SpaceParams};

/// Position and partial derivatives of a patch at `(s, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PatchJet {
    pub p: [f64; 3],
    pub ps: [f64; 3],
    pub pt: [f64; 3],
    pub pss: [f64; 3],
    pub pst: [f64; 3],
    pub ptt: [f64; 3],
}

pub trait ParametricPatch: Send + Sync {
    fn name(&self) -> String;
    fn space(&self) -> SpaceParams;
    fn domain(&self) -> Window;
    fn jet(&self, s: f64, t: f64) -> Result<PatchJet>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchGeometry {
    pub metric: [[f64; 2]; 2],
    pub second_ff: [[f64; 2]; 2],
    pub mean_curvature: f64,
    pub gauss_curvature: f64,
    pub nu: f64,
    /// Upward unit normal in frame components.
    pub normal: [f64; 3],
    /// Frame components of `∂s`, `∂t`.
    pub tangents: [[f64; 3]; 2],
}

impl PatchGeometry {
    /// `max(|E − G|, |F|) / max(E, G)`.
    pub fn conformality_residual(&self) -> f64 {
        let [[e, f], [_, g]] = self.metric;
        (e - g).abs().max(f.abs()) / e.max(g)
    }
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn patch_geometry(space: &SpaceParams, j: &PatchJet) -> Result<PatchGeometry> {
    let p = AmbientPoint::new(j.p[0], j.p[1], j.p[2]);
    let cs = space.frame_coefficients(&p, &j.ps)?;
    let ct = space.frame_coefficients(&p, &j.pt)?;
    let ip = |a: &[f64; 3], b: &[f64; 3]| space.frame_inner(a, b);
    let metric = [[ip(&cs, &cs), ip(&cs, &ct)], [ip(&cs, &ct), ip(&ct, &ct)]];
    let det_g = metric[0][0] * metric[1][1] - metric[0][1] * metric[0][1];
    if !(det_g > 0.0) {
        return Err(GeomError::SpacelikeViolation { x: j.p[0], y: j.p[1], omega_sq: det_g, margin: 0.0 });
    }
    let mut n = cross(&cs, &ct);
    if space.side == Side::Lorentzian {
        n[2] = -n[2];
    }
    let nn = ip(&n, &n);
    let norm = nn.abs().sqrt();
    let sign = if n[2] < 0.0 { -1.0 } else { 1.0 };
    let n = [sign * n[0] / norm, sign * n[1] / norm, sign * n[2] / norm];
    let second = |a: &[f64; 3], ca: &[f64; 3], b: &[f64; 3], cb: &[f64; 3], ab: &[f64; 3]| -> Result<f64> {
        let d = space.frame_coefficients_derivative(&p, a, b)?;
        let e = space.frame_coefficients(&p, ab)?;
        let dw = [d[0] + e[0], d[1] + e[1], d[2] + e[2]];
        let cov = space.covariant_in_frame(&p, ca, cb, &dw)?;
        Ok(ip(&cov, &n))
    };
    let sss = second(&j.ps, &cs, &j.ps, &cs, &j.pss)?;
    let sst = second(&j.ps, &cs, &j.pt, &ct, &j.pst)?;
    let stt = second(&j.pt, &ct, &j.pt, &ct, &j.ptt)?;
    let sigma = [[sss, sst], [sst, stt]];
    let g = metric;
    let trace = (g[1][1] * sss - 2.0 * g[0][1] * sst + g[0][0] * stt) / det_g;
    let det_a = (sss * stt - sst * sst) / det_g;
    let (k, t) = (space.kappa, space.bundle);
    let nu = n[2];
    let (mean, gauss) = match space.side {
        Side::Riemannian => (0.5 * trace, det_a + t * t + (k - 4.0 * t * t) * nu * nu),
        Side::Lorentzian => (-0.5 * trace, -det_a - t * t + (k + 4.0 * t * t) * nu * nu),
    };
    Ok(PatchGeometry {
        metric,
        second_ff: sigma,
        mean_curvature: mean,
        gauss_curvature: gauss,
        nu,
        normal: n,
        tangents: [cs, ct],
    })
}

pub fn geometry_at(patch: &dyn ParametricPatch, s: f64, t: f64) -> Result<PatchGeometry> {
    if !patch.domain().contains(s, t) {
        return Err(GeomError::OutOfWindow { x: s, y: t });
    }
    patch_geometry(&patch.space(), &patch.jet(s, t)?)
}

/// `J∂s` in the basis `(∂s, ∂t)`: rotation by a quarter turn in the
/// tangent plane, oriented by the upward normal.
pub fn rotation_of_ds(space: &SpaceParams, g: &PatchGeometry) -> [f64; 2] {
    let n = g.normal;
    let mut jv = cross(&n, &g.tangents[0]);
    if space.side == Side::Lorentzian {
        jv[2] = -jv[2];
    }
    let ip = |a: &[f64; 3], b: &[f64; 3]| space.frame_inner(a, b);
    let r = [ip(&jv, &g.tangents[0]), ip(&jv, &g.tangents[1])];
    let m = g.metric;
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [(m[1][1] * r[0] - m[0][1] * r[1]) / det, (-m[1][0] * r[0] + m[0][0] * r[1]) / det]
}

/// `Q(∂s, ∂s)` for the given coefficients.
pub fn q_ds(space: &SpaceParams, g: &PatchGeometry, c: CoefficientPair) -> Complex64 {
    let jc = rotation_of_ds(space, g);
    let z = [Complex64::new(1.0, -jc[0]), Complex64::new(0.0, -jc[1])];
    let s = g.second_ff;
    let mut sig = Complex64::new(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            sig += z[a] * s[a][b] * z[b];
        }
    }
    let e3 = [0.0, 0.0, 1.0];
    let hs = space.frame_inner(&g.tangents[0], &e3);
    let ht = space.frame_inner(&g.tangents[1], &e3);
    let h = z[0] * hs + z[1] * ht;
    c.a * sig + c.b * h * h
}

fn metric_at(patch: &dyn ParametricPatch, s: f64, t: f64) -> Result<[f64; 3]> {
    let space = patch.space();
    let j = patch.jet(s, t)?;
    let p = AmbientPoint::new(j.p[0], j.p[1], j.p[2]);
    Ok([space.metric_eval(&p, &j.ps, &j.ps)?, space.metric_eval(&p, &j.ps, &j.pt)?, space.metric_eval(&p, &j.pt, &j.pt)?])
}

/// Intrinsic curvature from the Brioschi formula, with metric derivatives
/// taken by fourth-order central differences of step `h`.
pub fn brioschi_curvature(patch: &dyn ParametricPatch, s: f64, t: f64, h: f64) -> Result<f64> {
    let d1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
    let d2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
    let mut m = [[[0.0f64; 3]; 5]; 5];
    for a in 0..5 {
        for b in 0..5 {
            m[a][b] = metric_at(patch, s + (a as f64 - 2.0) * h, t + (b as f64 - 2.0) * h)?;
        }
    }
    let ds = |k: usize| (0..5).map(|a| d1[a] * m[a][2][k]).sum::<f64>() / h;
    let dt = |k: usize| (0..5).map(|b| d1[b] * m[2][b][k]).sum::<f64>() / h;
    let dss = |k: usize| (0..5).map(|a| d2[a] * m[a][2][k]).sum::<f64>() / (h * h);
    let dtt = |k: usize| (0..5).map(|b| d2[b] * m[2][b][k]).sum::<f64>() / (h * h);
    let dst = |k: usize| {
        let mut acc = 0.0;
        for a in 0..5 {
            for b in 0..5 {
                acc += d1[a] * d1[b] * m[a][b][k];
            }
        }
        acc / (h * h)
    };
    let [e, f, g] = m[2][2];
    let (es, et, fs, ft, gs, gt) = (ds(0), dt(0), ds(1), dt(1), ds(2), dt(2));
    let (ett, fst, gss) = (dtt(0), dst(1), dss(2));
    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let m1 = [[-0.5 * ett + fst - 0.5 * gss, 0.5 * es, fs - 0.5 * et], [ft - 0.5 * gs, e, f], [0.5 * gt, f, g]];
    let m2 = [[0.0, 0.5 * et, 0.5 * gs], [0.5 * et, e, f], [0.5 * gs, f, g]];
    let w = e * g - f * f;
    Ok((det3(m1) - det3(m2)) / (w * w))
}

/// A graph seen as the patch `(x, y) ↦ (x, y, u(x, y))`.
pub struct GraphPatch(pub GraphSurface);

impl ParametricPatch for GraphPatch {
    fn name(&self) -> String {
        "graph".into()
    }

    fn space(&self) -> SpaceParams {
        self.0.space
    }

    fn domain(&self) -> Window {
        self.0.evaluation_window()
    }

    fn jet(&self, s: f64, t: f64) -> Result<PatchJet> {
        let j = self.0.raw_jet(s, t)?;
        Ok(PatchJet {
            p: [s, t, j.u],
            ps: [1.0, 0.0, j.ux],
            pt: [0.0, 1.0, j.uy],
            pss: [0.0, 0.0, j.uxx],
            pst: [0.0, 0.0, j.uxy],
            ptt: [0.0, 0.0, j.uyy],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::differential::{canonical_coefficients, q_from_geometry, Triple};
    use crate::graph::SurfaceJet;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn cubic(space: SpaceParams, c: [f64; 6]) -> GraphSurface {
        let f = move |x: f64, y: f64| {
            Ok(SurfaceJet {
                u: c[0] * x + c[1] * y + c[2] * x * x + c[3] * x * y + c[4] * y * y + c[5] * x * x * y,
                ux: c[0] + 2.0 * c[2] * x + c[3] * y + 2.0 * c[5] * x * y,
                uy: c[1] + c[3] * x + 2.0 * c[4] * y + c[5] * x * x,
                uxx: 2.0 * c[2] + 2.0 * c[5] * y,
                uxy: c[3] + 2.0 * c[5] * x,
                uyy: 2.0 * c[4],
            })
        };
        GraphSurface::closed_form(space, 0.0, Window::square(1.0), Arc::new(f)).unwrap()
    }

    proptest! {
        #[test]
        fn graph_formulas_match_connection_route(
            riem in prop::bool::ANY,
            k in -1.5..1.5f64, b in -1.0..1.0f64,
            c in prop::array::uniform6(-0.3..0.3f64),
            x in -0.6..0.6f64, y in -0.6..0.6f64,
        ) {
            let space = if riem { SpaceParams::riemannian(k, b) } else { SpaceParams::lorentzian(k, b) };
            let s = cubic(space, c);
            let g = s.geometry(x, y);
            prop_assume!(g.is_ok());
            let g = g.unwrap();
            let pg = patch_geometry(&space, &GraphPatch(s.clone()).jet(x, y).unwrap()).unwrap();
            let l2 = g.frame.lambda * g.frame.lambda;
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((pg.metric[i][j] - l2 * g.frame.first_ff[i][j]).abs() < 1e-12);
                    prop_assert!((pg.second_ff[i][j] - l2 * g.shape.second_ff[i][j]).abs() < 1e-11,
                        "σ{i}{j}: {} vs {}", pg.second_ff[i][j], l2 * g.shape.second_ff[i][j]);
                }
            }
            prop_assert!((pg.mean_curvature - g.shape.mean_curvature).abs() < 1e-11);
            prop_assert!((pg.gauss_curvature - g.shape.gauss_curvature).abs() < 1e-10);
            prop_assert!((pg.nu - g.frame.nu).abs() < 1e-12);
            let jc = rotation_of_ds(&space, &pg);
            let jr = g.frame.rotation(space.side);
            prop_assert!((jc[0] - jr[0][0]).abs() < 1e-12 && (jc[1] - jr[1][0]).abs() < 1e-12);
            let co = canonical_coefficients(Triple::new(k, 0.3, 0.2), space.side);
            let q = q_from_geometry(space.side, &g, co).q11 * l2;
            prop_assert!((q_ds(&space, &pg, co) - q).norm() < 1e-10);
        }

        #[test]
        fn gauss_equation_matches_brioschi(
            riem in prop::bool::ANY,
            k in -1.0..1.0f64, b in -1.0..1.0f64,
            c in prop::array::uniform6(-0.3..0.3f64),
        ) {
            let space = if riem { SpaceParams::riemannian(k, b) } else { SpaceParams::lorentzian(k, b) };
            let s = cubic(space, c);
            let g = s.geometry(0.2, -0.1);
            prop_assume!(g.is_ok());
            let kb = brioschi_curvature(&GraphPatch(s.clone()), 0.2, -0.1, 1e-2).unwrap();
            prop_assert!((kb - g.unwrap().shape.gauss_curvature).abs() < 1e-6);
        }
    }
}
