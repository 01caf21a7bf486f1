//! Construction of dual graphs from the twin relations.
//!
//! A CMC-H graph in `E(κ, τ)` and a spacelike CMC-τ graph in `L(κ, H)`
//! over the same domain are dual when `α̃ = −β/ω` and `β̃ = α/ω`. Given one
//! side, those relations prescribe the gradient of the other; the CMC
//! equation is exactly the condition for that gradient to be closed.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::graph::{symbols, GraphSurface, Window};
use crate::grid::GridData;
use crate::space::{Side, SpaceParams};

pub const DEFAULT_LOOP_TOLERANCE: f64 = 1e-4;

/// Ambient space and target mean curvature of the dual of `surface`.
pub fn dual_space(surface: &GraphSurface) -> (SpaceParams, f64) {
    let s = surface.space;
    let space = SpaceParams { side: s.side.other(), kappa: s.kappa, bundle: surface.target_mean_curvature };
    (space, s.bundle)
}

/// Gradient of the would-be dual graph at `(x, y)`.
pub fn dual_gradient(surface: &GraphSurface, x: f64, y: f64) -> Result<[f64; 2]> {
    let jet = surface.raw_jet(x, y)?;
    let (lambda, a, b, w2) = symbols(&surface.space, x, y, &jet)?;
    let t = surface.target_mean_curvature;
    match surface.side() {
        Side::Riemannian => {
            let w = w2.sqrt();
            let (at, bt) = (-b / w, a / w);
            Ok([lambda * (at + t * y), lambda * (bt - t * x)])
        }
        Side::Lorentzian => {
            if !(w2 >= surface.spacelike_margin && w2 > 0.0) {
                return Err(GeomError::SpacelikeViolation { x, y, omega_sq: w2, margin: surface.spacelike_margin });
            }
            let w = w2.sqrt();
            let (ar, br) = (b / w, -a / w);
            Ok([lambda * (ar - t * y), lambda * (br + t * x)])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathOrder {
    /// Integrate up the basepoint column, then along rows.
    YFirst,
    /// Integrate along the basepoint row, then up columns.
    XFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualizeOptions {
    pub h: f64,
    /// Output lattice; defaults to the source's evaluation window.
    pub window: Option<Window>,
    pub loop_tolerance: f64,
    pub order: PathOrder,
}

impl DualizeOptions {
    pub fn new(h: f64) -> Self {
        Self { h, window: None, loop_tolerance: DEFAULT_LOOP_TOLERANCE, order: PathOrder::YFirst }
    }

    pub fn window(mut self, w: Window) -> Self {
        self.window = Some(w);
        self
    }

    pub fn loop_tolerance(mut self, t: f64) -> Self {
        self.loop_tolerance = t;
        self
    }

    pub fn order(mut self, o: PathOrder) -> Self {
        self.order = o;
        self
    }
}

#[derive(Debug, Clone)]
pub struct DualPair {
    pub riemannian: GraphSurface,
    pub lorentzian: GraphSurface,
    pub basepoint: (f64, f64),
    pub normalization: f64,
    /// Largest per-cell circulation over `h²`; `None` for pairs assembled
    /// from closed forms.
    pub loop_residual: Option<f64>,
    pub loop_tolerance: Option<f64>,
    pub h: Option<f64>,
    pub source_side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualPairManifest {
    pub basepoint: [f64; 2],
    pub normalization: f64,
    pub loop_residual: Option<f64>,
    pub loop_tolerance: Option<f64>,
    pub h: Option<f64>,
    pub window: Window,
    pub source_side: Side,
    pub kappa: f64,
    pub tau: f64,
    pub mean_curvature: f64,
}

impl DualPair {
    /// Pairs two independently known surfaces. Windows are clipped to their
    /// intersection.
    pub fn from_surfaces(riemannian: GraphSurface, lorentzian: GraphSurface) -> Result<Self> {
        if riemannian.side() != Side::Riemannian || lorentzian.side() != Side::Lorentzian {
            return Err(GeomError::InvalidParameter("pair sides are swapped".into()));
        }
        let (k, t, h) = riemannian.triple();
        let (k2, t2, h2) = lorentzian.triple();
        if k != k2 || t != t2 || h != h2 {
            return Err(GeomError::InvalidParameter(format!("parameters do not match: ({k}, {t}, {h}) vs ({k2}, {t2}, {h2})")));
        }
        let w = riemannian.window.intersect(&lorentzian.window)?;
        Ok(Self {
            riemannian: riemannian.restrict(&w)?,
            lorentzian: lorentzian.restrict(&w)?,
            basepoint: (0.0, 0.0),
            normalization: 0.0,
            loop_residual: None,
            loop_tolerance: None,
            h: None,
            source_side: Side::Riemannian,
        })
    }

    pub fn window(&self) -> Window {
        self.riemannian.window
    }

    /// Where both sides can be evaluated to second order.
    pub fn common_window(&self) -> Result<Window> {
        self.riemannian.evaluation_window().intersect(&self.lorentzian.evaluation_window())
    }

    pub fn side(&self, side: Side) -> &GraphSurface {
        match side {
            Side::Riemannian => &self.riemannian,
            Side::Lorentzian => &self.lorentzian,
        }
    }

    /// The constructed (grid) side.
    pub fn dual(&self) -> &GraphSurface {
        self.side(self.source_side.other())
    }

    pub fn source(&self) -> &GraphSurface {
        self.side(self.source_side)
    }

    pub fn manifest(&self) -> DualPairManifest {
        let (kappa, tau, mean_curvature) = self.riemannian.triple();
        DualPairManifest {
            basepoint: [self.basepoint.0, self.basepoint.1],
            normalization: self.normalization,
            loop_residual: self.loop_residual,
            loop_tolerance: self.loop_tolerance,
            h: self.h,
            window: self.window(),
            source_side: self.source_side,
            kappa,
            tau,
            mean_curvature,
        }
    }

    /// Writes `riemannian.csv`, `lorentzian.csv` (sampled on the dual's
    /// lattice), their sidecars, and `pair.json`.
    pub fn export(&self, dir: &Path) -> Result<()> {
        let h = self.h.ok_or_else(|| GeomError::InvalidParameter("closed-form pair has no lattice".into()))?;
        let w = self.window();
        for (name, s) in [("riemannian", &self.riemannian), ("lorentzian", &self.lorentzian)] {
            let g = s.sample_grid(&w, h)?;
            g.write(dir, name, &s.space, Some(s.target_mean_curvature))?;
        }
        let m = serde_json::to_string_pretty(&self.manifest())?;
        fs::write(dir.join("pair.json"), m + "\n")?;
        Ok(())
    }
}

struct Lattice {
    nx: usize,
    ny: usize,
}

fn eval_rows<F>(nrows: usize, ncols: usize, f: F) -> Result<Vec<[f64; 2]>>
where
    F: Fn(usize, usize) -> Result<[f64; 2]> + Sync,
{
    let rows: Vec<Result<Vec<[f64; 2]>>> = (0..nrows).into_par_iter().map(|j| (0..ncols).map(|i| f(i, j)).collect()).collect();
    let mut out = Vec::with_capacity(nrows * ncols);
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

/// Integrates the dual gradient of `surface` over a lattice.
///
/// Edge integrals use Simpson's rule with the edge midpoint, so every
/// cell's circulation is available; its maximum over `h²` is the loop
/// residual, which measures the CMC defect.
pub fn dualize(surface: &GraphSurface, basepoint: (f64, f64), normalization: f64, opts: &DualizeOptions) -> Result<DualPair> {
    let h = opts.h;
    let window = match opts.window {
        Some(w) => w,
        None => surface.evaluation_window(),
    };
    if !surface.evaluation_window().contains_window(&window) {
        return Err(GeomError::UnsupportedWindow(format!(
            "output window {window} exceeds the source evaluation window {}",
            surface.evaluation_window()
        )));
    }
    let mut grid = GridData::zeros(&window, h)?;
    let lat = Lattice { nx: grid.nx, ny: grid.ny };
    let (ib, jb) = grid
        .node_index(basepoint.0, basepoint.1)
        .ok_or_else(|| GeomError::InvalidParameter(format!("basepoint {basepoint:?} is not a lattice node of {window}")))?;
    let (x0, y0) = (grid.x0, grid.y0);
    let node = |i: usize, j: usize| (x0 + i as f64 * h, y0 + j as f64 * h);

    let g_node = eval_rows(lat.ny, lat.nx, |i, j| {
        let (x, y) = node(i, j);
        dual_gradient(surface, x, y)
    })?;
    let g_hmid = eval_rows(lat.ny, lat.nx - 1, |i, j| {
        let (x, y) = node(i, j);
        dual_gradient(surface, x + 0.5 * h, y)
    })?;
    let g_vmid = eval_rows(lat.ny - 1, lat.nx, |i, j| {
        let (x, y) = node(i, j);
        dual_gradient(surface, x, y + 0.5 * h)
    })?;
    let (nx, ny) = (lat.nx, lat.ny);
    // hx[j][i]: ∫ v_x from node (i, j) to (i+1, j); vy[j][i]: ∫ v_y from (i, j) to (i, j+1).
    let hx: Vec<f64> = (0..ny * (nx - 1))
        .map(|k| {
            let (j, i) = (k / (nx - 1), k % (nx - 1));
            h / 6.0 * (g_node[j * nx + i][0] + 4.0 * g_hmid[k][0] + g_node[j * nx + i + 1][0])
        })
        .collect();
    let vy: Vec<f64> = (0..(ny - 1) * nx)
        .map(|k| {
            let (j, i) = (k / nx, k % nx);
            h / 6.0 * (g_node[j * nx + i][1] + 4.0 * g_vmid[k][1] + g_node[(j + 1) * nx + i][1])
        })
        .collect();
    let mut loop_residual = 0.0f64;
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let c = hx[j * (nx - 1) + i] + vy[j * nx + i + 1] - hx[(j + 1) * (nx - 1) + i] - vy[j * nx + i];
            loop_residual = loop_residual.max(c.abs() / (h * h));
        }
    }
    if !(loop_residual <= opts.loop_tolerance) {
        return Err(GeomError::IntegrabilityFailure { loop_residual, tolerance: opts.loop_tolerance });
    }

    match opts.order {
        PathOrder::YFirst => {
            let mut spine = vec![0.0; ny];
            spine[jb] = normalization;
            for j in jb + 1..ny {
                spine[j] = spine[j - 1] + vy[(j - 1) * nx + ib];
            }
            for j in (0..jb).rev() {
                spine[j] = spine[j + 1] - vy[j * nx + ib];
            }
            grid.values.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
                row[ib] = spine[j];
                let e = &hx[j * (nx - 1)..(j + 1) * (nx - 1)];
                for i in ib + 1..nx {
                    row[i] = row[i - 1] + e[i - 1];
                }
                for i in (0..ib).rev() {
                    row[i] = row[i + 1] - e[i];
                }
            });
        }
        PathOrder::XFirst => {
            let mut spine = vec![0.0; nx];
            spine[ib] = normalization;
            for i in ib + 1..nx {
                spine[i] = spine[i - 1] + hx[jb * (nx - 1) + i - 1];
            }
            for i in (0..ib).rev() {
                spine[i] = spine[i + 1] - hx[jb * (nx - 1) + i];
            }
            let cols: Vec<Vec<f64>> = (0..nx)
                .into_par_iter()
                .map(|i| {
                    let mut col = vec![0.0; ny];
                    col[jb] = spine[i];
                    for j in jb + 1..ny {
                        col[j] = col[j - 1] + vy[(j - 1) * nx + i];
                    }
                    for j in (0..jb).rev() {
                        col[j] = col[j + 1] - vy[j * nx + i];
                    }
                    col
                })
                .collect();
            for (i, col) in cols.iter().enumerate() {
                for (j, v) in col.iter().enumerate() {
                    grid.values[j * nx + i] = *v;
                }
            }
        }
    }

    let (space, target) = dual_space(surface);
    let dual = GraphSurface::from_grid(space, target, grid)?.with_margin(surface.spacelike_margin);
    let source = surface.restrict(&window)?;
    let (riemannian, lorentzian) = match surface.side() {
        Side::Riemannian => (source, dual),
        Side::Lorentzian => (dual, source),
    };
    Ok(DualPair {
        riemannian,
        lorentzian,
        basepoint,
        normalization,
        loop_residual: Some(loop_residual),
        loop_tolerance: Some(opts.loop_tolerance),
        h: Some(h),
        source_side: surface.side(),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub samples: usize,
    pub twin: f64,
    pub omega_product: f64,
    pub conformality: f64,
    pub cmc_riemannian: f64,
    pub cmc_lorentzian: f64,
    pub failures: Vec<String>,
}

impl PairReport {
    pub fn max_residual(&self) -> f64 {
        if !self.failures.is_empty() {
            return f64::INFINITY;
        }
        [self.twin, self.omega_product, self.conformality, self.cmc_riemannian, self.cmc_lorentzian]
            .iter()
            .fold(0.0f64, |m, v| m.max(*v))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }
}

#[derive(Default)]
struct PointResiduals {
    twin: f64,
    omega: f64,
    conf: f64,
    cmc_r: f64,
    cmc_l: f64,
}

fn pair_point(pair: &DualPair, x: f64, y: f64) -> Result<PointResiduals> {
    let r = pair.riemannian.frame_data(x, y)?;
    let l = pair.lorentzian.frame_data(x, y)?;
    let twin = (l.alpha + r.beta / r.omega).abs().max((l.beta - r.alpha / r.omega).abs());
    let omega = (r.omega * l.omega - 1.0).abs();
    let w2 = r.omega * r.omega;
    let mut conf = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            conf = conf.max((r.first_ff[i][j] - w2 * l.first_ff[i][j]).abs());
        }
    }
    Ok(PointResiduals {
        twin,
        omega,
        conf,
        cmc_r: pair.riemannian.cmc_residual(x, y)?.abs(),
        cmc_l: pair.lorentzian.cmc_residual(x, y)?.abs(),
    })
}

/// Checks the twin relations, `ω ω̃ = 1`, the conformality of the two
/// induced metrics and both CMC equations at every sample.
pub fn verify_pair(pair: &DualPair, samples: &[(f64, f64)]) -> PairReport {
    let results: Vec<(f64, f64, Result<PointResiduals>)> =
        samples.par_iter().map(|&(x, y)| (x, y, pair_point(pair, x, y))).collect();
    let mut rep = PairReport { samples: samples.len(), ..Default::default() };
    for (x, y, r) in results {
        match r {
            Ok(p) => {
                rep.twin = rep.twin.max(p.twin);
                rep.omega_product = rep.omega_product.max(p.omega);
                rep.conformality = rep.conformality.max(p.conf);
                rep.cmc_riemannian = rep.cmc_riemannian.max(p.cmc_r);
                rep.cmc_lorentzian = rep.cmc_lorentzian.max(p.cmc_l);
            }
            Err(e) => rep.failures.push(format!("({x}, {y}): {e}")),
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SurfaceJet;
    use std::sync::Arc;

    fn umbrella(tau: f64, r: f64) -> GraphSurface {
        let f = |_: f64, _: f64| Ok(SurfaceJet::default());
        GraphSurface::closed_form(SpaceParams::nil(tau), 0.0, Window::square(r), Arc::new(f)).unwrap()
    }

    fn perturbed(tau: f64) -> GraphSurface {
        let f = |x: f64, _: f64| Ok(SurfaceJet { u: 0.1 * x * x, ux: 0.2 * x, uy: 0.0, uxx: 0.2, uxy: 0.0, uyy: 0.0 });
        GraphSurface::closed_form(SpaceParams::nil(tau), 0.0, Window::square(1.0), Arc::new(f)).unwrap()
    }

    #[test]
    fn umbrella_dual_gradient() {
        let g = dual_gradient(&umbrella(0.5, 3.0), 2.0, 0.0).unwrap();
        assert!((g[0] - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(g[1], 0.0);
        assert_eq!(dual_gradient(&umbrella(0.5, 3.0), 0.0, 0.0).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn saddle_dual_gradient() {
        let tau = 0.7;
        let f =
            move |x: f64, y: f64| Ok(SurfaceJet { u: -tau * x * y, ux: -tau * y, uy: -tau * x, uxx: 0.0, uxy: -tau, uyy: 0.0 });
        let s = GraphSurface::closed_form(SpaceParams::nil(tau), 0.0, Window::square(3.0), Arc::new(f)).unwrap();
        for &(x, y) in &[(1.0, 2.0), (-2.5, 0.3)] {
            let g = dual_gradient(&s, x, y).unwrap();
            let want = 2.0 * tau * x / (1.0 + 4.0 * tau * tau * x * x).sqrt();
            assert!((g[0] - want).abs() < 1e-15 && g[1].abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_direction_recovers_gradient() {
        let space = SpaceParams::riemannian(0.6, 0.4);
        let f = |x: f64, y: f64| Ok(SurfaceJet { u: 0.0, ux: 0.3 * x - 0.1, uy: 0.2 * y + 0.4, uxx: 0.3, uxy: 0.0, uyy: 0.2 });
        let s = GraphSurface::closed_form(space, 0.25, Window::square(1.0), Arc::new(f)).unwrap();
        let (x, y) = (0.3, -0.5);
        let g = dual_gradient(&s, x, y).unwrap();
        let (dspace, dtarget) = dual_space(&s);
        let back = move |_: f64, _: f64| Ok(SurfaceJet { u: 0.0, ux: g[0], uy: g[1], ..Default::default() });
        let d = GraphSurface::closed_form(dspace, dtarget, Window::square(1.0), Arc::new(back)).unwrap();
        let gg = dual_gradient(&d, x, y).unwrap();
        let orig = f(x, y).unwrap();
        assert!((gg[0] - orig.ux).abs() < 1e-14 && (gg[1] - orig.uy).abs() < 1e-14);
        let (r, l) = (s.frame_data(x, y).unwrap(), d.frame_data(x, y).unwrap());
        assert!((r.omega * l.omega - 1.0).abs() < 1e-14);
    }

    #[test]
    fn umbrella_dualizes_to_hyperboloid() {
        let pair = dualize(&umbrella(0.5, 2.0), (0.0, 0.0), 2.0, &DualizeOptions::new(0.05)).unwrap();
        let g = pair.dual().grid().unwrap();
        let mut err = 0.0f64;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let (x, y) = g.node(i, j);
                err = err.max((g.get(i, j) - (4.0 + x * x + y * y).sqrt()).abs());
            }
        }
        assert!(err < 1e-7, "{err}");
        assert!(pair.loop_residual.unwrap() < 1e-8);
    }

    #[test]
    fn path_orders_agree() {
        let s = umbrella(0.5, 1.5);
        let a = dualize(&s, (0.5, -0.5), 1.0, &DualizeOptions::new(0.05)).unwrap();
        let b = dualize(&s, (0.5, -0.5), 1.0, &DualizeOptions::new(0.05).order(PathOrder::XFirst)).unwrap();
        let (ga, gb) = (a.dual().grid().unwrap(), b.dual().grid().unwrap());
        let d = ga.values.iter().zip(&gb.values).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        assert!(d < 1e-8, "{d}");
        let (i, j) = ga.node_index(0.5, -0.5).unwrap();
        assert_eq!(ga.get(i, j), 1.0);
    }

    #[test]
    fn non_minimal_input_is_not_integrable() {
        match dualize(&perturbed(0.5), (0.0, 0.0), 0.0, &DualizeOptions::new(0.05)) {
            Err(GeomError::IntegrabilityFailure { loop_residual, .. }) => {
                assert!(loop_residual > 1e-2, "{loop_residual}");
            }
            other => panic!("expected IntegrabilityFailure, got {other:?}"),
        }
    }

    #[test]
    fn basepoint_must_be_a_node() {
        let r = dualize(&umbrella(0.5, 1.0), (0.01, 0.0), 0.0, &DualizeOptions::new(0.1));
        assert!(matches!(r, Err(GeomError::InvalidParameter(_))));
    }

    #[test]
    fn verify_pair_detects_perturbation() {
        let tau = 0.5;
        let hyper = |shift: f64| {
            move |x: f64, y: f64| {
                let v = (1.0 / (tau * tau) + x * x + y * y).sqrt();
                let v3 = v * v * v;
                Ok(SurfaceJet {
                    u: v + shift * x,
                    ux: x / v + shift,
                    uy: y / v,
                    uxx: 1.0 / v - x * x / v3,
                    uxy: -x * y / v3,
                    uyy: 1.0 / v - y * y / v3,
                })
            }
        };
        let lor = |shift: f64| {
            GraphSurface::closed_form(SpaceParams::minkowski(), tau, Window::square(5.0), Arc::new(hyper(shift))).unwrap()
        };
        let good = DualPair::from_surfaces(umbrella(tau, 5.0), lor(0.0)).unwrap();
        let pts = Window::square(5.0).lattice(21);
        let rep = verify_pair(&good, &pts);
        assert!(rep.passes(1e-12), "{rep:?}");
        let bad = DualPair::from_surfaces(umbrella(tau, 5.0), lor(0.01)).unwrap();
        let rep = verify_pair(&bad, &pts);
        assert!(rep.twin > 1e-3, "{rep:?}");
    }
}
