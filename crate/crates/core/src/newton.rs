//! Small nonlinear solvers: damped Newton in the plane and safeguarded
//! Newton for monotone scalar equations.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Step multiplier applied whenever the residual fails to decrease.
    pub damping: f64,
    pub max_backtracks: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-13, max_iter: 50, damping: 0.5, max_backtracks: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOutcome {
    pub point: [f64; 2],
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `F(p) = 0`. `eval` returns the value and Jacobian (rows are
/// components), or `None` where `F` is undefined.
pub fn solve_2d<F>(eval: F, seed: [f64; 2], opts: &NewtonOptions) -> Option<NewtonOutcome>
where
    F: Fn([f64; 2]) -> Option<([f64; 2], [[f64; 2]; 2])>,
{
    let norm = |v: [f64; 2]| v[0].abs().max(v[1].abs());
    let mut p = seed;
    let (mut val, mut jac) = eval(p)?;
    let mut res = norm(val);
    for it in 0..=opts.max_iter {
        if res <= opts.tol {
            return Some(NewtonOutcome { point: p, iterations: it, residual: res });
        }
        if it == opts.max_iter {
            break;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = -(jac[1][1] * val[0] - jac[0][1] * val[1]) / det;
        let dy = -(-jac[1][0] * val[0] + jac[0][0] * val[1]) / det;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_backtracks {
            let q = [p[0] + step * dx, p[1] + step * dy];
            if let Some((v, j)) = eval(q) {
                let r = norm(v);
                if r < res || r <= opts.tol {
                    p = q;
                    val = v;
                    jac = j;
                    res = r;
                    accepted = true;
                    break;
                }
            }
            step *= opts.damping;
        }
        if !accepted {
            // Stagnation at rounding level still counts as converged.
            return (res <= 1e3 * opts.tol).then_some(NewtonOutcome { point: p, iterations: it, residual: res });
        }
    }
    None
}

/// Root of a monotone `g` on `[lo, hi]` (signs must differ at the ends),
/// Newton steps falling back to bisection. `g` returns `(value, slope)`.
pub fn solve_bracketed(g: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let (glo, _) = g(lo);
    let (ghi, _) = g(hi);
    if glo == 0.0 {
        return Some(lo);
    }
    if ghi == 0.0 {
        return Some(hi);
    }
    if glo.signum() == ghi.signum() || !glo.is_finite() || !ghi.is_finite() {
        return None;
    }
    let rising = ghi > 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (v, d) = g(x);
        if v == 0.0 {
            return Some(x);
        }
        if (v > 0.0) == rising {
            hi = x;
        } else {
            lo = x;
        }
        let nx = x - v / d;
        let next = if d != 0.0 && nx.is_finite() && nx > lo && nx < hi { nx } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= tol * (1.0 + x.abs()) || hi - lo <= tol * (1.0 + x.abs()) {
            return Some(next);
        }
        x = next;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_solves_circle_line() {
        let f = |p: [f64; 2]| Some(([p[0] * p[0] + p[1] * p[1] - 4.0, p[0] - p[1]], [[2.0 * p[0], 2.0 * p[1]], [1.0, -1.0]]));
        let out = solve_2d(f, [3.0, 0.5], &NewtonOptions::default()).unwrap();
        let r = 2f64.sqrt();
        assert!((out.point[0] - r).abs() < 1e-12 && (out.point[1] - r).abs() < 1e-12);
    }

    #[test]
    fn damping_handles_undefined_regions() {
        // sqrt is undefined for negative x; a full step from the seed lands there
        let f =
            |p: [f64; 2]| (p[0] >= 0.0).then(|| ([p[0].sqrt() - 0.1, p[1]], [[0.5 / p[0].sqrt().max(1e-300), 0.0], [0.0, 1.0]]));
        let out = solve_2d(f, [4.0, 1.0], &NewtonOptions::default()).unwrap();
        assert!((out.point[0] - 0.01).abs() < 1e-12);
    }

    #[test]
    fn bracketed_root() {
        let r = solve_bracketed(|x| (x.powi(3) - 2.0, 3.0 * x * x), 0.0, 5.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        let d = solve_bracketed(|x| (-x.exp() + 3.0, -x.exp()), -10.0, 10.0, 1e-15).unwrap();
        assert!((d - 3f64.ln()).abs() < 1e-14);
        assert!(solve_bracketed(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-12).is_none());
    }
}
