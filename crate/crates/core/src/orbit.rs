//! Isometries acting on dual graphs: re-graphing in `L³`, the orbit map
//! `Σ_u ↦ [Σ_u]_S`, and the equivariance of the duality under planar
//! motions for `κ = 0`.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duality::{dualize, DualizeOptions, DEFAULT_LOOP_TOLERANCE};
use crate::error::{GeomError, Result};
use crate::graph::{GraphSurface, JetSource, SurfaceJet, Window};
use crate::grid::GridData;
use crate::isometry::{factorize_g, LorentzIsometry};
use crate::newton::{solve_2d, NewtonOptions};

#[derive(Debug, Clone, Copy)]
struct Node {
    pre: [f64; 2],
    value: f64,
    /// Inverse Jacobian of the planar map, used to seed the next node.
    jinv: [[f64; 2]; 2],
    residual: f64,
    iterations: usize,
}

fn solve_node(
    surface: &GraphSurface,
    s: &LorentzIsometry,
    target: (f64, f64),
    seed: [f64; 2],
    opts: &NewtonOptions,
) -> Option<Node> {
    let l = &s.linear;
    let t = &s.translation;
    let map = |p: [f64; 2]| -> Option<(SurfaceJet, [f64; 2], [[f64; 2]; 2])> {
        let j = surface.raw_jet(p[0], p[1]).ok()?;
        let q = [p[0], p[1], j.u];
        let row = |r: usize| l[(r, 0)] * q[0] + l[(r, 1)] * q[1] + l[(r, 2)] * q[2] + t[r];
        let jac = [
            [l[(0, 0)] + l[(0, 2)] * j.ux, l[(0, 1)] + l[(0, 2)] * j.uy],
            [l[(1, 0)] + l[(1, 2)] * j.ux, l[(1, 1)] + l[(1, 2)] * j.uy],
        ];
        Some((j, [row(0), row(1)], jac))
    };
    let out = solve_2d(|p| map(p).map(|(_, v, jac)| ([v[0] - target.0, v[1] - target.1], jac)), seed, opts)?;
    let (j, _, jac) = map(out.point)?;
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    let q = [out.point[0], out.point[1], j.u];
    Some(Node {
        pre: out.point,
        value: l[(2, 0)] * q[0] + l[(2, 1)] * q[1] + l[(2, 2)] * q[2] + t[2],
        jinv: [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]],
        residual: out.residual,
        iterations: out.iterations,
    })
}

fn predict(n: &Node, dx: f64, dy: f64) -> [f64; 2] {
    [n.pre[0] + n.jinv[0][0] * dx + n.jinv[0][1] * dy, n.pre[1] + n.jinv[1][0] * dx + n.jinv[1][1] * dy]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegraphOptions {
    pub newton: NewtonOptions,
    /// Multiplicative step of the window shrink when preimages leave the
    /// source; `None` turns the failure into an error.
    pub shrink_step: Option<f64>,
    /// Smallest accepted shrink factor.
    pub min_shrink: f64,
}

impl Default for RegraphOptions {
    fn default() -> Self {
        Self { newton: NewtonOptions::default(), shrink_step: Some(0.95), min_shrink: 0.2 }
    }
}

#[derive(Debug, Clone)]
pub struct Regraphed {
    pub surface: GraphSurface,
    pub requested: Window,
    pub window: Window,
    /// Ratio of the produced to the requested window width (smaller axis).
    pub shrink_factor: f64,
    pub max_newton_residual: f64,
    pub max_iterations: usize,
}

fn regraph_once(
    s: &LorentzIsometry,
    surface: &GraphSurface,
    window: &Window,
    h: f64,
    opts: &NewtonOptions,
) -> std::result::Result<(GridData, f64, usize), (f64, f64)> {
    let mut grid = GridData::zeros(window, h).map_err(|_| (window.x0, window.y0))?;
    let (nx, ny) = (grid.nx, grid.ny);
    let (ic, jc) = (nx / 2, ny / 2);
    let (xc, yc) = grid.node(ic, jc);

    let src = surface.evaluation_window();
    let z0 = surface.value_at(0.5 * (src.x0 + src.x1), 0.5 * (src.y0 + src.y1)).unwrap_or(0.0);
    let back = s.inverse().apply([xc, yc, z0]);
    let center = solve_node(surface, s, (xc, yc), [back[0], back[1]], opts)
        .or_else(|| solve_node(surface, s, (xc, yc), [xc, yc], opts))
        .ok_or((xc, yc))?;

    let ray = |start: Node, from: (usize, usize), steps: &mut dyn Iterator<Item = (usize, usize)>| {
        let mut prev = start;
        let mut prev_xy = grid.node(from.0, from.1);
        let mut out = vec![];
        for (i, j) in steps {
            let (x, y) = grid.node(i, j);
            let seed = predict(&prev, x - prev_xy.0, y - prev_xy.1);
            let n = solve_node(surface, s, (x, y), seed, opts).ok_or((x, y))?;
            out.push(((i, j), n));
            prev = n;
            prev_xy = (x, y);
        }
        Ok::<_, (f64, f64)>(out)
    };

    let mut column = vec![((ic, jc), center)];
    column.extend(ray(center, (ic, jc), &mut (jc + 1..ny).map(|j| (ic, j)))?);
    column.extend(ray(center, (ic, jc), &mut (0..jc).rev().map(|j| (ic, j)))?);

    let rows: Vec<_> = column
        .par_iter()
        .map(|&((_, j), n)| {
            let mut r = ray(n, (ic, j), &mut (ic + 1..nx).map(|i| (i, j)))?;
            r.extend(ray(n, (ic, j), &mut (0..ic).rev().map(|i| (i, j)))?);
            Ok(r)
        })
        .collect::<std::result::Result<_, (f64, f64)>>()?;

    let (mut res, mut iters) = (0.0f64, 0usize);
    for ((i, j), n) in column.iter().chain(rows.iter().flatten()) {
        grid.set(*i, *j, n.value);
        res = res.max(n.residual);
        iters = iters.max(n.iterations);
    }
    Ok((grid, res, iters))
}

/// Applies `s` to a graph in `L³` and re-graphs the image over `target`
/// with spacing `h`. Marches outward from the centre node: first along the
/// centre column, then every row in parallel.
pub fn act_and_regraph(
    s: &LorentzIsometry,
    surface: &GraphSurface,
    target: &Window,
    h: f64,
    opts: &RegraphOptions,
) -> Result<Regraphed> {
    if !surface.space.is_minkowski() {
        return Err(GeomError::InvalidParameter(format!("isometries act on L³ graphs only; got {:?}", surface.space)));
    }
    let steps = |a: f64, b: f64| ((b - a) / h).round() as usize;
    let (sx, sy) = (steps(target.x0, target.x1), steps(target.y0, target.y1));
    let mut factor = 1.0;
    loop {
        let (mx, my) = (((1.0 - factor) * sx as f64 / 2.0).ceil(), ((1.0 - factor) * sy as f64 / 2.0).ceil());
        let w = Window::new(target.x0 + mx * h, target.x1 - mx * h, target.y0 + my * h, target.y1 - my * h)?;
        let achieved = ((w.x1 - w.x0) / (target.x1 - target.x0)).min((w.y1 - w.y0) / (target.y1 - target.y0));
        match regraph_once(s, surface, &w, h, &opts.newton) {
            Ok((grid, res, iters)) => {
                let out = GraphSurface::from_grid(surface.space, surface.target_mean_curvature, grid)?
                    .with_margin(surface.spacelike_margin);
                let jw = out.evaluation_window();
                let g = out.grid().expect("grid-backed");
                for j in 0..g.ny {
                    for i in 0..g.nx {
                        let (x, y) = g.node(i, j);
                        if jw.contains(x, y) {
                            out.jet_at(x, y)?;
                        }
                    }
                }
                return Ok(Regraphed {
                    surface: out,
                    requested: *target,
                    window: w,
                    shrink_factor: achieved,
                    max_newton_residual: res,
                    max_iterations: iters,
                });
            }
            Err((x, y)) => match opts.shrink_step {
                Some(step) if factor * step >= opts.min_shrink && sx.min(sy) > 8 => factor *= step,
                _ => return Err(GeomError::RegraphDivergence { x, y }),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitOptions {
    pub h: f64,
    /// Lattice of the first dual; defaults to the source's evaluation window.
    pub dual_window: Option<Window>,
    /// Requested lattice of the transformed dual.
    pub target_window: Option<Window>,
    pub loop_tolerance: f64,
    pub regraph: RegraphOptions,
}

impl OrbitOptions {
    pub fn new(h: f64) -> Self {
        Self {
            h,
            dual_window: None,
            target_window: None,
            loop_tolerance: DEFAULT_LOOP_TOLERANCE,
            regraph: RegraphOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitManifest {
    pub theta: f64,
    pub a: f64,
    pub shrink_factor: f64,
    pub window: Window,
    pub h: f64,
    pub loop_residual_forward: Option<f64>,
    pub loop_residual_back: Option<f64>,
    pub regraph_residual: f64,
    pub max_cmc_residual: f64,
}

#[derive(Debug, Clone)]
pub struct OrbitMember {
    /// The new minimal graph in `Nil₃`.
    pub surface: GraphSurface,
    pub dual: GraphSurface,
    pub image: Regraphed,
    pub theta: f64,
    pub a: f64,
    pub loop_residuals: [Option<f64>; 2],
    pub h: f64,
}

impl OrbitMember {
    /// Largest CMC residual of the output over its jet window.
    pub fn max_cmc_residual(&self) -> f64 {
        let w = self.surface.evaluation_window();
        let n = 21;
        w.lattice(n).into_iter().filter_map(|(x, y)| self.surface.cmc_residual(x, y).ok()).fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn manifest(&self) -> OrbitManifest {
        OrbitManifest {
            theta: self.theta,
            a: self.a,
            shrink_factor: self.image.shrink_factor,
            window: self.surface.window,
            h: self.h,
            loop_residual_forward: self.loop_residuals[0],
            loop_residual_back: self.loop_residuals[1],
            regraph_residual: self.image.max_newton_residual,
            max_cmc_residual: self.max_cmc_residual(),
        }
    }

    /// Writes the member, the transformed dual and `manifest.json`.
    pub fn export(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let g = self.surface.grid().expect("orbit members are grid-backed");
        g.write(dir, stem, &self.surface.space, Some(self.surface.target_mean_curvature))?;
        let d = self.image.surface.grid().expect("regraphed surfaces are grid-backed");
        d.write(dir, &format!("{stem}_dual"), &self.image.surface.space, Some(self.image.surface.target_mean_curvature))?;
        std::fs::write(dir.join(format!("{stem}_manifest.json")), serde_json::to_string_pretty(&self.manifest())?)?;
        Ok(())
    }
}

/// Dualizes `u` (the dual normalized to `normalization` at `basepoint`),
/// moves the dual by `s`, and dualizes back so that `u(basepoint)` is kept.
pub fn orbit_member(
    u: &GraphSurface,
    s: &LorentzIsometry,
    basepoint: (f64, f64),
    normalization: f64,
    opts: &OrbitOptions,
) -> Result<OrbitMember> {
    let fac = factorize_g(s)?;
    let mut fwd = DualizeOptions::new(opts.h).loop_tolerance(opts.loop_tolerance);
    if let Some(w) = opts.dual_window {
        fwd = fwd.window(w);
    }
    let pair = dualize(u, basepoint, normalization, &fwd)?;
    let dual = pair.dual().clone();
    if !dual.space.is_minkowski() {
        return Err(GeomError::InvalidParameter("orbits need a minimal graph in Nil₃ (dual in L³)".into()));
    }
    let target = opts.target_window.unwrap_or_else(|| dual.evaluation_window());
    let image = act_and_regraph(s, &dual, &target, opts.h, &opts.regraph)?;
    let back_window = image.surface.evaluation_window();
    if !back_window.contains(basepoint.0, basepoint.1) {
        return Err(GeomError::UnsupportedWindow(format!(
            "basepoint ({}, {}) left the re-graphed window {back_window}",
            basepoint.0, basepoint.1
        )));
    }
    let back = DualizeOptions::new(opts.h).loop_tolerance(opts.loop_tolerance).window(back_window);
    let u0 = u.value_at(basepoint.0, basepoint.1)?;
    let pair_back = dualize(&image.surface, basepoint, u0, &back)?;
    Ok(OrbitMember {
        surface: pair_back.dual().clone(),
        dual,
        image,
        theta: fac.g.theta,
        a: fac.g.a,
        loop_residuals: [pair.loop_residual, pair_back.loop_residual],
        h: opts.h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlanarMotion {
    /// Rotation about the origin by `phi`.
    Rotation {
        phi: f64,
    },
    Translation {
        a: f64,
        b: f64,
    },
}

impl PlanarMotion {
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        match *self {
            PlanarMotion::Rotation { phi } => (phi.cos() * x - phi.sin() * y, phi.sin() * x + phi.cos() * y),
            PlanarMotion::Translation { a, b } => (x + a, y + b),
        }
    }

    pub fn inverse(&self) -> PlanarMotion {
        match *self {
            PlanarMotion::Rotation { phi } => PlanarMotion::Rotation { phi: -phi },
            PlanarMotion::Translation { a, b } => PlanarMotion::Translation { a: -a, b: -b },
        }
    }
}

/// The graph of `T ∘ X` where `T` lifts a planar motion to an `Iso_ξ`
/// isometry of a `κ = 0` model with twist `c`: rotations about the axis
/// are exact, a translation by `(a, b)` gets the vertical part
/// `c (a y − b x)`.
struct Lifted {
    source: GraphSurface,
    motion: PlanarMotion,
    twist: f64,
}

impl JetSource for Lifted {
    fn jet(&self, x: f64, y: f64) -> Result<SurfaceJet> {
        let (px, py) = self.motion.inverse().apply(x, y);
        let j = self.source.raw_jet(px, py)?;
        Ok(match self.motion {
            PlanarMotion::Rotation { phi } => {
                let (c, s) = (phi.cos(), phi.sin());
                SurfaceJet {
                    u: j.u,
                    ux: c * j.ux - s * j.uy,
                    uy: s * j.ux + c * j.uy,
                    uxx: c * c * j.uxx - 2.0 * c * s * j.uxy + s * s * j.uyy,
                    uxy: c * s * (j.uxx - j.uyy) + (c * c - s * s) * j.uxy,
                    uyy: s * s * j.uxx + 2.0 * c * s * j.uxy + c * c * j.uyy,
                }
            }
            PlanarMotion::Translation { a, b } => {
                let c = self.twist;
                SurfaceJet { u: j.u + c * (a * y - b * x), ux: j.ux - c * b, uy: j.uy + c * a, ..j }
            }
        })
    }
}

/// `T ∘ Σ` over `window`, which must pull back into the surface's window.
pub fn lift_motion(surface: &GraphSurface, motion: PlanarMotion, window: Window) -> Result<GraphSurface> {
    if surface.space.kappa != 0.0 {
        return Err(GeomError::InvalidParameter("motion lifts are implemented for κ = 0 only".into()));
    }
    let inv = motion.inverse();
    let src = surface.evaluation_window();
    for (x, y) in window.corners() {
        let (px, py) = inv.apply(x, y);
        if !src.contains(px, py) {
            return Err(GeomError::UnsupportedWindow(format!("{window} does not pull back into {src} under {motion:?}")));
        }
    }
    let lifted = Lifted { source: surface.clone(), motion, twist: surface.space.twist() };
    GraphSurface::closed_form(surface.space, surface.target_mean_curvature, window, Arc::new(lifted))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub motion: PlanarMotion,
    pub samples: usize,
    /// Max deviation of `dualize(T·Σ)` from `R(T)·dualize(Σ)` after
    /// removing the vertical offset at the first node.
    pub max_residual: f64,
}

/// Compares `dualize(T·Σ_u)` on `window` with `R(T)·dualize(Σ_u)`.
pub fn equivariance_check(u: &GraphSurface, motion: PlanarMotion, window: Window, h: f64) -> Result<EquivarianceReport> {
    let moved = lift_motion(u, motion, window)?;
    let src = u.evaluation_window();
    let pair0 = dualize(u, src.corners()[0], 0.0, &DualizeOptions::new(h))?;
    let pair1 = dualize(&moved, window.corners()[0], 0.0, &DualizeOptions::new(h))?;
    let rt = lift_motion(pair0.dual(), motion, window)?;
    let g = pair1.dual().grid().expect("dualize output is grid-backed");
    let mut offset = None;
    let mut worst = 0.0f64;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (x, y) = g.node(i, j);
            let d = g.get(i, j) - rt.raw_jet(x, y)?.u;
            let o = *offset.get_or_insert(d);
            worst = worst.max((d - o).abs());
        }
    }
    Ok(EquivarianceReport { motion, samples: g.nx * g.ny, max_residual: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{FixtureId, FixtureSpec};
    use crate::isometry::{GElement, Generator};

    fn fixture(id: FixtureId, tau: f64, w: Window) -> GraphSurface {
        FixtureSpec::new(id, tau).unwrap().surface(Some(w)).unwrap().into_graph().unwrap()
    }

    #[test]
    fn vertical_translation_is_exact() {
        let cyl = fixture(FixtureId::HyperbolicCylinder, 0.5, Window::square(2.0));
        let s = LorentzIsometry::generator(Generator::Translation([0.0, 0.0, 0.75]));
        let out = act_and_regraph(&s, &cyl, &Window::square(2.0), 0.1, &RegraphOptions::default()).unwrap();
        assert_eq!(out.shrink_factor, 1.0);
        let g = out.surface.grid().unwrap();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let x = g.node(i, j).0;
                assert_eq!(g.get(i, j), (1.0 + x * x).sqrt() + 0.75);
            }
        }
    }

    #[test]
    fn boosted_cylinder() {
        let tau = 0.5;
        let cyl = fixture(FixtureId::HyperbolicCylinder, tau, Window::square(5.0));
        let theta = 0.3;
        let s = LorentzIsometry::generator(Generator::Hyperbolic(theta));
        let out = act_and_regraph(&s, &cyl, &Window::square(3.0), 0.05, &RegraphOptions::default()).unwrap();
        let want = fixture(FixtureId::InvariantThetaDual { theta }, tau, Window::square(3.0));
        let g = out.surface.grid().unwrap();
        let mut err = 0.0f64;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let (x, y) = g.node(i, j);
                err = err.max((g.get(i, j) - want.value_at(x, y).unwrap()).abs());
            }
        }
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn null_rotated_cylinder() {
        let tau = 0.5;
        let cyl = fixture(FixtureId::HyperbolicCylinder, tau, Window::square(12.0));
        for a in [0.4, -0.9] {
            let s = LorentzIsometry::generator(Generator::Parabolic(a));
            let out = act_and_regraph(&s, &cyl, &Window::square(2.0), 0.1, &RegraphOptions::default()).unwrap();
            assert_eq!(out.shrink_factor, 1.0);
            let want = fixture(FixtureId::ParabolicRotated { a }, tau, Window::square(2.0));
            let g = out.surface.grid().unwrap();
            for j in 0..g.ny {
                for i in 0..g.nx {
                    let (x, y) = g.node(i, j);
                    let d = g.get(i, j) - want.value_at(x, y).unwrap();
                    assert!(d.abs() < 1e-12, "a = {a}: {d}");
                }
            }
        }
    }

    #[test]
    fn shrinks_when_preimages_leave_the_source() {
        let cyl = fixture(FixtureId::HyperbolicCylinder, 0.5, Window::square(3.0));
        let s = LorentzIsometry::generator(Generator::Hyperbolic(0.8));
        let out = act_and_regraph(&s, &cyl, &Window::square(3.0), 0.1, &RegraphOptions::default()).unwrap();
        assert!(out.shrink_factor < 1.0 && out.shrink_factor >= 0.2, "{}", out.shrink_factor);
        assert!(Window::square(3.0).contains_window(&out.window));
        let strict = RegraphOptions { shrink_step: None, ..RegraphOptions::default() };
        let r = act_and_regraph(&s, &cyl, &Window::square(3.0), 0.1, &strict);
        assert!(matches!(r, Err(GeomError::RegraphDivergence { .. })));
    }

    #[test]
    fn rejects_non_minkowski_surfaces() {
        let u = fixture(FixtureId::Saddle, 0.5, Window::square(1.0));
        let r = act_and_regraph(&LorentzIsometry::identity(), &u, &Window::square(1.0), 0.1, &RegraphOptions::default());
        assert!(matches!(r, Err(GeomError::InvalidParameter(_))));
    }

    #[test]
    fn regraph_keeps_the_cmc_residual_small() {
        let hyp = fixture(FixtureId::Hyperboloid { p: 0.0, q: 0.0 }, 0.5, Window::square(4.0));
        let s = GElement { theta: 0.4, a: 0.6 }.isometry();
        let out = act_and_regraph(&s, &hyp, &Window::square(2.0), 0.05, &RegraphOptions::default()).unwrap();
        for (x, y) in out.surface.evaluation_window().lattice(9) {
            assert!(out.surface.cmc_residual(x, y).unwrap().abs() < 1e-5);
            // the hyperboloid is G-invariant
            let d = out.surface.value_at(x, y).unwrap() - hyp.value_at(x, y).unwrap();
            assert!(d.abs() < 1e-7, "{d}");
        }
    }

    #[test]
    fn identity_orbit_returns_the_input() {
        let tau = 0.5;
        let u = fixture(FixtureId::InvariantTheta { theta: 0.4 }, tau, Window::square(2.0));
        let m = orbit_member(&u, &LorentzIsometry::identity(), (0.0, 0.0), 0.0, &OrbitOptions::new(0.05)).unwrap();
        assert_eq!(m.image.shrink_factor, 1.0);
        let g = m.surface.grid().unwrap();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let (x, y) = g.node(i, j);
                assert!((g.get(i, j) - u.value_at(x, y).unwrap()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn translations_lift_equivariantly() {
        let tau = 0.5;
        let u = fixture(FixtureId::Umbrella, tau, Window::square(2.0));
        let r = equivariance_check(
            &u,
            PlanarMotion::Translation { a: 1.0, b: 0.0 },
            Window::new(-0.5, 2.0, -1.0, 1.0).unwrap(),
            0.05,
        )
        .unwrap();
        assert!(r.max_residual < 1e-7, "{r:?}");
        let s = fixture(FixtureId::Saddle, tau, Window::square(2.0));
        let r = equivariance_check(&s, PlanarMotion::Rotation { phi: std::f64::consts::FRAC_PI_2 }, Window::square(1.5), 0.05)
            .unwrap();
        assert!(r.max_residual < 1e-7, "{r:?}");
        let r = equivariance_check(&s, PlanarMotion::Rotation { phi: 0.0 }, Window::square(1.5), 0.05).unwrap();
        assert!(r.max_residual < 1e-12, "{r:?}");
    }

    #[test]
    fn rotated_saddle_is_the_other_branch() {
        let s = fixture(FixtureId::Saddle, 0.5, Window::square(2.0));
        let r = lift_motion(&s, PlanarMotion::Rotation { phi: std::f64::consts::FRAC_PI_2 }, Window::square(1.0)).unwrap();
        let j = r.raw_jet(0.3, -0.7).unwrap();
        assert!((j.u - 0.5 * 0.3 * -0.7).abs() < 1e-15 && (j.uxy - 0.5).abs() < 1e-15);
    }
}
