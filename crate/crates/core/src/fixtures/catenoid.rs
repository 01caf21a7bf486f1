//! Rotational minimal catenoids in Nil₃ as graphs over an annulus.
//!
//! The profile solves `h'(r) = E√(1+τ²r²)/√(r²−E²)`, `h(E) = 0`. With
//! `r = E cosh t` the singular endpoint disappears:
//! `dh/dt = E√(1 + τ²E² cosh² t)`.

use crate::error::{GeomError, Result};
use crate::graph::{JetSource, SurfaceJet};
use crate::ode::{OdeOptions, OdeProfile};

pub fn catenoid_profile(e: f64, tau: f64, r_max: f64) -> Result<OdeProfile> {
    if !(e > 0.0) {
        return Err(GeomError::InvalidParameter(format!("catenoid neck radius must be positive, got {e}")));
    }
    if !(r_max > e) {
        return Err(GeomError::InvalidParameter(format!("r_max = {r_max} must exceed the neck radius {e}")));
    }
    let te = tau * e;
    let t_max = (r_max / e).acosh();
    OdeProfile::integrate(
        move |t, _| e * (1.0 + te * te * t.cosh().powi(2)).sqrt(),
        move |t, _| {
            let c = t.cosh();
            e * te * te * c * t.sinh() / (1.0 + te * te * c * c).sqrt()
        },
        0.0,
        0.0,
        t_max,
        &OdeOptions { h_max: 0.01, ..OdeOptions::default() },
    )
}

pub struct Catenoid {
    pub e: f64,
    pub tau: f64,
    pub profile: OdeProfile,
}

impl Catenoid {
    pub fn new(e: f64, tau: f64, r_max: f64) -> Result<Self> {
        Ok(Self { e, tau, profile: catenoid_profile(e, tau, r_max)? })
    }

    /// `(h, h_r, h_rr)` at radius `r > E`; only `h` comes from the
    /// integrator, the derivatives are exact.
    pub fn radial(&self, r: f64) -> Result<(f64, f64, f64)> {
        if !(r > self.e) {
            return Err(GeomError::OutOfWindow { x: r, y: 0.0 });
        }
        let t = (r / self.e).acosh();
        let h = self.profile.eval(t)?.0;
        let te = self.tau * self.e;
        let c = t.cosh();
        let root = (1.0 + te * te * c * c).sqrt();
        let (ht, htt) = (self.e * root, self.e * te * te * c * t.sinh() / root);
        let es = self.e * t.sinh();
        let hr = ht / es;
        let hrr = htt / (es * es) - ht * t.cosh() / (es * es * t.sinh());
        Ok((h, hr, hrr))
    }

    pub fn expected_curvature(&self, r: f64) -> f64 {
        let (e2, t2, r2) = (self.e * self.e, self.tau * self.tau, r * r);
        -(e2 + 3.0 * t2 * r2 * r2 + 2.0 * t2 * t2 * r2 * r2 * r2) / (r2 * r2 * (1.0 + t2 * r2).powi(2))
    }

    pub fn expected_nu(&self, r: f64) -> f64 {
        (r * r - self.e * self.e).sqrt() / (r * (1.0 + self.tau * self.tau * r * r).sqrt())
    }
}

impl JetSource for Catenoid {
    fn jet(&self, x: f64, y: f64) -> Result<SurfaceJet> {
        let r = x.hypot(y);
        let (h, hr, hrr) = self.radial(r).map_err(|_| GeomError::OutOfWindow { x, y })?;
        let (cx, cy) = (x / r, y / r);
        Ok(SurfaceJet {
            u: h,
            ux: hr * cx,
            uy: hr * cy,
            uxx: hrr * cx * cx + hr * cy * cy / r,
            uxy: (hrr - hr / r) * cx * cy,
            uyy: hrr * cy * cy + hr * cx * cx / r,
        })
    }
}
