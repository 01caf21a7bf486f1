//! Surfaces that are not vertical graphs: the minimal helicoids of Nil₃
//! in their conformal chart, and the semitrough of L³.

use crate::error::{GeomError, Result};
use crate::graph::Window;
use crate::ode::{OdeOptions, OdeProfile};
use crate::patch::{ParametricPatch, PatchJet};
use crate::space::SpaceParams;

/// `F(f) = √((τf² − a)² + f²)` and `F'(f)`.
fn helicoid_rhs(a: f64, tau: f64, f: f64) -> (f64, f64) {
    let g = tau * f * f - a;
    let big = (g * g + f * f).sqrt();
    (big, (2.0 * tau * f * g + f) / big)
}

/// Solves `f' = F(f)`, `f(0) = 0` on `[0, x_max]`, and the helicoid patch
/// `(x, y) ↦ (f(x) cos y, f(x) sin y, a y)` over `[−x_max, x_max] × [y0, y1]`.
/// Since `F(f) ~ τf²` the profile escapes to infinity at a finite `x`.
pub fn helicoid_profile(a: f64, tau: f64, x_max: f64, y_range: (f64, f64)) -> Result<(OdeProfile, Helicoid)> {
    if !(a > 0.0) || !(x_max > 0.0) {
        return Err(GeomError::InvalidParameter(format!("helicoid needs a > 0 and x_max > 0, got a = {a}, x_max = {x_max}")));
    }
    let prof = OdeProfile::integrate(
        move |_, f| helicoid_rhs(a, tau, f).0,
        move |_, f| {
            let (v, d) = helicoid_rhs(a, tau, f);
            v * d
        },
        0.0,
        0.0,
        x_max,
        &OdeOptions { h_max: 0.005, ..OdeOptions::default() },
    )
    .map_err(|_| GeomError::UnsupportedWindow(format!("helicoid profile for a = {a} blows up before x = {x_max}")))?;
    let domain = Window::new(-x_max, x_max, y_range.0, y_range.1)?;
    Ok((prof.clone(), Helicoid { a, tau, profile: prof, domain }))
}

pub struct Helicoid {
    pub a: f64,
    pub tau: f64,
    pub profile: OdeProfile,
    pub domain: Window,
}

impl Helicoid {
    /// `(f, f', f'')` at `x`; `f` is odd and the derivatives follow
    /// from the ODE.
    pub fn radial(&self, x: f64) -> Result<(f64, f64, f64)> {
        let f = self.profile.eval(x.abs())?.0.copysign(x);
        let (d1, d) = helicoid_rhs(self.a, self.tau, f);
        Ok((f, d1, d1 * d))
    }

    pub fn axis_curvature(&self) -> f64 {
        (2.0 * self.a * self.tau - 1.0) / (self.a * self.a)
    }
}

impl ParametricPatch for Helicoid {
    fn name(&self) -> String {
        format!("helicoid(a = {})", self.a)
    }

    fn space(&self) -> SpaceParams {
        SpaceParams::nil(self.tau)
    }

    fn domain(&self) -> Window {
        self.domain
    }

    fn jet(&self, s: f64, t: f64) -> Result<PatchJet> {
        let (f, fp, fpp) = self.radial(s).map_err(|_| GeomError::OutOfWindow { x: s, y: t })?;
        let (c, sn) = (t.cos(), t.sin());
        Ok(PatchJet {
            p: [f * c, f * sn, self.a * t],
            ps: [fp * c, fp * sn, 0.0],
            pt: [-f * sn, f * c, self.a],
            pss: [fpp * c, fpp * sn, 0.0],
            pst: [-fp * sn, fp * c, 0.0],
            ptt: [-f * c, -f * sn, 0.0],
        })
    }
}

/// `k (x − ½coth x, ½coth x sinh y, ½coth x cosh y)` for `x > 0`; the
/// prefactor `k` is the reciprocal of the mean curvature.
pub struct Semitrough {
    pub scale: f64,
    pub domain: Window,
}

impl Semitrough {
    pub fn new(scale: f64, domain: Window) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(GeomError::InvalidParameter(format!("semitrough scale must be positive, got {scale}")));
        }
        if !(domain.x0 > 0.0) {
            return Err(GeomError::UnsupportedWindow(format!("semitrough chart needs x > 0, got {domain}")));
        }
        Ok(Self { scale, domain })
    }
}

impl ParametricPatch for Semitrough {
    fn name(&self) -> String {
        format!("semitrough(scale = {})", self.scale)
    }

    fn space(&self) -> SpaceParams {
        SpaceParams::minkowski()
    }

    fn domain(&self) -> Window {
        self.domain
    }

    fn jet(&self, s: f64, t: f64) -> Result<PatchJet> {
        if !(s > 0.0) {
            return Err(GeomError::OutOfWindow { x: s, y: t });
        }
        let k = self.scale;
        let ct = 1.0 / s.tanh();
        let cs2 = 1.0 / s.sinh().powi(2);
        let (sh, ch) = (t.sinh(), t.cosh());
        Ok(PatchJet {
            p: [k * (s - 0.5 * ct), k * 0.5 * ct * sh, k * 0.5 * ct * ch],
            ps: [k * (1.0 + 0.5 * cs2), -k * 0.5 * cs2 * sh, -k * 0.5 * cs2 * ch],
            pt: [0.0, k * 0.5 * ct * ch, k * 0.5 * ct * sh],
            pss: [-k * cs2 * ct, k * cs2 * ct * sh, k * cs2 * ct * ch],
            pst: [0.0, -k * 0.5 * cs2 * ch, -k * 0.5 * cs2 * sh],
            ptt: [0.0, k * 0.5 * ct * sh, k * 0.5 * ct * ch],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patch::{brioschi_curvature, geometry_at};

    #[test]
    fn helicoid_starts_with_slope_a() {
        let (p, h) = helicoid_profile(0.7, 0.5, 2.0, (-1.0, 1.0)).unwrap();
        let (f, d1, _) = p.eval(0.0).unwrap();
        assert_eq!(f, 0.0);
        assert!((d1 - 0.7).abs() < 1e-15);
        let (fm, dm, _) = h.radial(-0.5).unwrap();
        let (fp, dp, _) = h.radial(0.5).unwrap();
        assert_eq!(fm, -fp);
        assert_eq!(dm, dp);
    }

    #[test]
    fn helicoid_is_minimal_and_conformal() {
        let (_, h) = helicoid_profile(1.3, 0.5, 2.0, (-2.0, 2.0)).unwrap();
        for &(s, t) in &[(0.0, 0.0), (0.7, 1.0), (-1.5, -0.3), (1.9, 1.9)] {
            let g = geometry_at(&h, s, t).unwrap();
            assert!(g.mean_curvature.abs() < 1e-9, "{}", g.mean_curvature);
            assert!(g.conformality_residual() < 1e-9);
            let kb = brioschi_curvature(&h, s.clamp(-1.9, 1.9), t, 2.5e-3).unwrap();
            let kg = geometry_at(&h, s.clamp(-1.9, 1.9), t).unwrap().gauss_curvature;
            assert!((kb - kg).abs() < 1e-6, "{kb} vs {kg}");
        }
    }

    #[test]
    fn semitrough_mean_curvature() {
        let st = Semitrough::new(2.0, Window::new(0.2, 3.0, -2.0, 2.0).unwrap()).unwrap();
        for &(s, t) in &[(0.3, 0.0), (1.0, 1.5), (2.5, -1.8)] {
            let g = geometry_at(&st, s, t).unwrap();
            assert!((g.mean_curvature - 0.5).abs() < 1e-12, "{}", g.mean_curvature);
            let c = 1.0 / s.tanh();
            assert!((g.metric[0][0] - 4.0 * c * c).abs() < 1e-12);
            assert!((g.metric[1][1] - c * c).abs() < 1e-12 && g.metric[0][1].abs() < 1e-12);
        }
        assert!(Semitrough::new(1.0, Window::square(1.0)).is_err());
    }
}
