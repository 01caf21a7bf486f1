//! Closed-form height functions with exact jets.

use std::sync::Arc;

use crate::graph::{JetSource, SurfaceJet};

pub fn umbrella() -> Arc<dyn JetSource> {
    Arc::new(|_: f64, _: f64| Ok(SurfaceJet::default()))
}

pub fn affine_plane(a: f64, b: f64, c: f64) -> Arc<dyn JetSource> {
    Arc::new(move |x: f64, y: f64| Ok(SurfaceJet { u: a * x + b * y + c, ux: a, uy: b, ..Default::default() }))
}

/// `u = −τxy`.
pub fn saddle(tau: f64) -> Arc<dyn JetSource> {
    Arc::new(move |x: f64, y: f64| Ok(SurfaceJet { u: -tau * x * y, ux: -tau * y, uy: -tau * x, uxx: 0.0, uxy: -tau, uyy: 0.0 }))
}

/// `u_θ = −τxy + sinh θ/(4τ) (2τx√(1+4τ²x²) + asinh(2τx))`.
pub fn invariant_theta(tau: f64, theta: f64) -> Arc<dyn JetSource> {
    let sh = theta.sinh();
    Arc::new(move |x: f64, y: f64| {
        let q = 2.0 * tau * x;
        let s = (1.0 + q * q).sqrt();
        let g = if tau == 0.0 { 0.0 } else { sh / (4.0 * tau) * (q * s + q.asinh()) };
        Ok(SurfaceJet {
            u: -tau * x * y + g,
            ux: -tau * y + sh * s,
            uy: -tau * x,
            uxx: sh * 4.0 * tau * tau * x / s,
            uxy: -tau,
            uyy: 0.0,
        })
    })
}

/// `√(c + (x − p)² + (y − q)²)`.
fn radial_sqrt(c: f64, p: f64, q: f64) -> impl Fn(f64, f64) -> SurfaceJet {
    move |x: f64, y: f64| {
        let (dx, dy) = (x - p, y - q);
        let v = (c + dx * dx + dy * dy).sqrt();
        let v3 = v * v * v;
        SurfaceJet { u: v, ux: dx / v, uy: dy / v, uxx: (c + dy * dy) / v3, uxy: -dx * dy / v3, uyy: (c + dx * dx) / v3 }
    }
}

/// Hyperboloid `√(τ⁻² + (x − p)² + (y − q)²)`.
pub fn hyperboloid(tau: f64, p: f64, q: f64) -> Arc<dyn JetSource> {
    let f = radial_sqrt(1.0 / (tau * tau), p, q);
    Arc::new(move |x: f64, y: f64| Ok(f(x, y)))
}

/// `v_θ = √(c + x²)/cosh θ + tanh θ · y` with `c = 1/(4τ²)`; θ = 0 is the
/// hyperbolic cylinder.
pub fn invariant_theta_dual(tau: f64, theta: f64) -> Arc<dyn JetSource> {
    let c = 1.0 / (4.0 * tau * tau);
    let (ch, th) = (theta.cosh(), theta.tanh());
    Arc::new(move |x: f64, y: f64| {
        let q = (c + x * x).sqrt();
        Ok(SurfaceJet { u: q / ch + th * y, ux: x / (q * ch), uy: th, uxx: c / (q * q * q * ch), uxy: 0.0, uyy: 0.0 })
    })
}

/// Image of the hyperbolic cylinder under the parabolic rotation with
/// parameter `a`, as a graph: `(2/D)√(c + r²) + (a²/D) s` with
/// `D = √(a⁴ + 4)` and rotated coordinates `r`, `s`.
pub fn parabolic_rotated(tau: f64, a: f64) -> Arc<dyn JetSource> {
    let c = 1.0 / (4.0 * tau * tau);
    let d = (a.powi(4) + 4.0).sqrt();
    let (r1, r2) = ((a * a - 2.0) / d, -2.0 * a / d);
    let (s1, s2) = (2.0 * a / d, (a * a - 2.0) / d);
    Arc::new(move |x: f64, y: f64| {
        let r = r1 * x + r2 * y;
        let s = s1 * x + s2 * y;
        let q = (c + r * r).sqrt();
        let q3 = q * q * q;
        let k = 2.0 / d;
        let m = a * a / d;
        Ok(SurfaceJet {
            u: k * q + m * s,
            ux: k * r * r1 / q + m * s1,
            uy: k * r * r2 / q + m * s2,
            uxx: k * c * r1 * r1 / q3,
            uxy: k * c * r1 * r2 / q3,
            uyy: k * c * r2 * r2 / q3,
        })
    })
}
