//! Spacelike CMC-τ graphs in L³ invariant under parabolic rotations.
//!
//! Parametrized by `(x, w) ↦ (x, Y, Z)` with
//! `Y = (x²/(2w) − w)/√2 + f(w)/(4√2τ²)` and
//! `Z = (x²/(2w) + w)/√2 + f(w)/(4√2τ²)`, which opens towards the future.
//! `Y` is strictly decreasing in `w`, so each `(x, y)` has one preimage.

use std::f64::consts::SQRT_2;

use crate::error::{GeomError, Result};
use crate::graph::{JetSource, SurfaceJet, Window};
use crate::newton::solve_bracketed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HanoNomizu {
    pub family: u8,
    pub a: f64,
    pub tau: f64,
}

impl HanoNomizu {
    pub fn new(family: u8, a: f64, tau: f64) -> Result<Self> {
        if !(1..=3).contains(&family) {
            return Err(GeomError::InvalidParameter(format!("family must be 1, 2 or 3, got {family}")));
        }
        if family != 3 && !(a > 0.0) {
            return Err(GeomError::InvalidParameter(format!("parameter a must be positive, got {a}")));
        }
        if tau == 0.0 {
            return Err(GeomError::InvalidParameter("τ must be non-zero".into()));
        }
        Ok(Self { family, a, tau })
    }

    /// Family 2 degenerates towards a null ray over `{x = 0, y ≥ 0}`.
    pub fn check_window(&self, w: &Window) -> Result<()> {
        if self.family == 2 && w.x0 <= 0.0 && w.x1 >= 0.0 && w.y1 >= 0.0 {
            return Err(GeomError::UnsupportedWindow(format!("family 2 is not spacelike near {{x = 0, y ≥ 0}}; {w} meets it")));
        }
        Ok(())
    }

    pub fn w_min(&self) -> f64 {
        if self.family == 1 {
            self.a
        } else {
            0.0
        }
    }

    /// `(f, f', f'')`.
    pub fn f(&self, w: f64) -> (f64, f64, f64) {
        let a = self.a;
        match self.family {
            1 => {
                let d = w * w - a * a;
                (w / d - ((w - a) / (w + a)).ln() / (2.0 * a), -2.0 * w * w / (d * d), 4.0 * w * (w * w + a * a) / (d * d * d))
            }
            2 => {
                let d = w * w + a * a;
                (w / d - (w / a).atan() / a, -2.0 * w * w / (d * d), 4.0 * w * (w * w - a * a) / (d * d * d))
            }
            _ => (2.0 / w, -2.0 / (w * w), 4.0 / (w * w * w)),
        }
    }

    fn k(&self) -> f64 {
        1.0 / (4.0 * SQRT_2 * self.tau * self.tau)
    }

    pub fn point(&self, x: f64, w: f64) -> [f64; 3] {
        let a = x * x / (2.0 * w);
        let f = self.k() * self.f(w).0;
        [x, (a - w) / SQRT_2 + f, (a + w) / SQRT_2 + f]
    }

    fn y_and_slope(&self, x: f64, w: f64) -> (f64, f64) {
        let (f, fp, _) = self.f(w);
        let a = x * x / (2.0 * w);
        ((a - w) / SQRT_2 + self.k() * f, (-a / w - 1.0) / SQRT_2 + self.k() * fp)
    }

    pub fn solve_w(&self, x: f64, y: f64) -> Result<f64> {
        let lo0 = self.w_min();
        let mut hi = lo0 + 1.0;
        while self.y_and_slope(x, hi).0 > y {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(GeomError::OutOfWindow { x, y });
            }
        }
        let mut d = (hi - lo0) * 0.5;
        let mut lo = lo0 + d;
        while self.y_and_slope(x, lo).0 < y {
            d *= 0.5;
            lo = lo0 + d;
            if d < 1e-300 || lo == lo0 {
                return Err(GeomError::OutOfWindow { x, y });
            }
        }
        solve_bracketed(
            |w| {
                let (v, s) = self.y_and_slope(x, w);
                (v - y, s)
            },
            lo,
            hi,
            1e-16,
        )
        .ok_or(GeomError::OutOfWindow { x, y })
    }
}

impl JetSource for HanoNomizu {
    fn jet(&self, x: f64, y: f64) -> Result<SurfaceJet> {
        let w = self.solve_w(x, y)?;
        let (f, fp, fpp) = self.f(w);
        let k = self.k();
        let r = 1.0 / SQRT_2;
        let a = x * x / (2.0 * w);
        let (ax, axx, aw, axw, aww) = (x / w, 1.0 / w, -a / w, -x / (w * w), 2.0 * a / (w * w));
        let (yx, yxx, yw, yxw, yww) = (r * ax, r * axx, r * (aw - 1.0) + k * fp, r * axw, r * aww + k * fpp);
        let (zx, zxx, zw, zxw, zww) = (r * ax, r * axx, r * (aw + 1.0) + k * fp, r * axw, r * aww + k * fpp);
        let wx = -yx / yw;
        let wy = 1.0 / yw;
        let wxx = -(yxx + 2.0 * yxw * wx + yww * wx * wx) / yw;
        let wxy = -(yxw * wy + yww * wx * wy) / yw;
        let wyy = -(yww * wy * wy) / yw;
        Ok(SurfaceJet {
            u: r * (a + w) + k * f,
            ux: zx + zw * wx,
            uy: zw * wy,
            uxx: zxx + 2.0 * zxw * wx + zww * wx * wx + zw * wxx,
            uxy: zxw * wy + zww * wx * wy + zw * wxy,
            uyy: zww * wy * wy + zw * wyy,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preimage_is_exact() {
        for fam in 1..=3 {
            let hn = HanoNomizu::new(fam, 0.7, 0.5).unwrap();
            for &(x, y) in &[(0.5, -1.0), (1.5, 2.0), (-2.0, 0.3)] {
                let w = hn.solve_w(x, y).unwrap();
                let p = hn.point(x, w);
                assert!((p[1] - y).abs() < 1e-12 * (1.0 + y.abs()), "family {fam}: {p:?}");
                assert!((p[2] - hn.jet(x, y).unwrap().u).abs() < 1e-14 * (1.0 + p[2].abs()));
            }
        }
    }

    #[test]
    fn family_three_is_the_hyperboloid() {
        let tau = 0.5;
        let hn = HanoNomizu::new(3, 0.0, tau).unwrap();
        for &(x, y) in &[(0.0, 0.0), (1.5, -2.0), (-3.0, 4.0)] {
            let j = hn.jet(x, y).unwrap();
            let v = (1.0 / (tau * tau) + x * x + y * y).sqrt();
            assert!((j.u - v).abs() < 1e-12);
            assert!((j.ux - x / v).abs() < 1e-12 && (j.uy - y / v).abs() < 1e-12);
            assert!((j.uxx - (1.0 / (tau * tau) + y * y) / v.powi(3)).abs() < 1e-11);
        }
    }

    #[test]
    fn family_two_window_guard() {
        let hn = HanoNomizu::new(2, 1.0, 0.5).unwrap();
        assert!(hn.check_window(&Window::square(1.0)).is_err());
        assert!(hn.check_window(&Window::new(0.5, 2.0, -1.0, 1.0).unwrap()).is_ok());
        assert!(hn.check_window(&Window::new(-2.0, 2.0, -3.0, -1.0).unwrap()).is_ok());
    }
}
