//! Adaptive Dormand–Prince 5(4) for scalar ODEs, with quintic Hermite
//! dense output built from the ODE's own first and second derivatives.

use crate::error::{GeomError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    /// Upper bound on accepted steps; keeps the Hermite interpolant accurate.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-10, h_init: 1e-3, h_max: 0.02, max_steps: 1_000_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`; returns accepted nodes.
pub fn dopri5(f: impl Fn(f64, f64) -> f64, t0: f64, y0: f64, t1: f64, opts: &OdeOptions) -> Result<Vec<(f64, f64)>> {
    if !(t1 > t0) {
        return Err(GeomError::InvalidParameter(format!("integration interval [{t0}, {t1}] is empty")));
    }
    let mut out = vec![(t0, y0)];
    let (mut t, mut y) = (t0, y0);
    let mut h = opts.h_init.min(opts.h_max).min(t1 - t0);
    let mut k = [0.0f64; 7];
    k[0] = f(t, y);
    let mut steps = 0;
    while t < t1 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(GeomError::InvalidParameter("ODE step budget exhausted".into()));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            let mut acc = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += h * A[s][j] * kj;
            }
            k[s] = f(t + C[s] * h, acc);
        }
        let y_new = y + h * (0..7).map(|s| B[s] * k[s]).sum::<f64>();
        let err = h * (0..7).map(|s| E[s] * k[s]).sum::<f64>();
        let scale = opts.atol + opts.rtol * y.abs().max(y_new.abs());
        let ratio = (err / scale).abs();
        if !y_new.is_finite() {
            return Err(GeomError::InvalidParameter(format!("ODE solution is not finite at t = {t}")));
        }
        if ratio <= 1.0 {
            t = if last { t1 } else { t + h };
            y = y_new;
            k[0] = k[6];
            out.push((t, y));
        }
        let fac = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * fac).min(opts.h_max);
        if h < 1e-14 * (1.0 + t.abs()) {
            return Err(GeomError::InvalidParameter(format!("ODE step size underflow at t = {t}")));
        }
    }
    Ok(out)
}

/// Dense solution with value, first and second derivative at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeProfile {
    pub abscissa: Vec<f64>,
    pub values: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl OdeProfile {
    /// `f` is the right-hand side, `f2` its total derivative
    /// `∂t f + f ∂y f` (the solution's second derivative).
    pub fn integrate(
        f: impl Fn(f64, f64) -> f64,
        f2: impl Fn(f64, f64) -> f64,
        t0: f64,
        y0: f64,
        t1: f64,
        opts: &OdeOptions,
    ) -> Result<Self> {
        let nodes = dopri5(&f, t0, y0, t1, opts)?;
        let mut p = OdeProfile { abscissa: vec![], values: vec![], d1: vec![], d2: vec![] };
        for (t, y) in nodes {
            p.abscissa.push(t);
            p.values.push(y);
            p.d1.push(f(t, y));
            p.d2.push(f2(t, y));
        }
        Ok(p)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.abscissa[0], *self.abscissa.last().unwrap())
    }

    /// `(y, y', y'')` at `t`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64, f64)> {
        let (a, b) = self.range();
        if !(t >= a && t <= b) {
            return Err(GeomError::OutOfWindow { x: t, y: 0.0 });
        }
        let i = match self.abscissa.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok((self.values[i], self.d1[i], self.d2[i])),
            Err(i) => i - 1,
        };
        let (t0, t1) = (self.abscissa[i], self.abscissa[i + 1]);
        let dt = t1 - t0;
        let s = (t - t0) / dt;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (dt * self.d1[i], dt * self.d1[i + 1]);
        let (e0, e1) = (dt * dt * self.d2[i], dt * dt * self.d2[i + 1]);
        let dy = y1 - y0;
        let c = [
            y0,
            d0,
            0.5 * e0,
            10.0 * dy - 6.0 * d0 - 4.0 * d1 - 1.5 * e0 + 0.5 * e1,
            -15.0 * dy + 8.0 * d0 + 7.0 * d1 + 1.5 * e0 - e1,
            6.0 * dy - 3.0 * d0 - 3.0 * d1 - 0.5 * e0 + 0.5 * e1,
        ];
        let p = c[0] + s * (c[1] + s * (c[2] + s * (c[3] + s * (c[4] + s * c[5]))));
        let dp = c[1] + s * (2.0 * c[2] + s * (3.0 * c[3] + s * (4.0 * c[4] + s * 5.0 * c[5])));
        let ddp = 2.0 * c[2] + s * (6.0 * c[3] + s * (12.0 * c[4] + s * 20.0 * c[5]));
        Ok((p, dp / dt, ddp / (dt * dt)))
    }
}
