//! Vertical graphs `z = u(x, y)` and their pointwise geometry.
//!
//! Everything is computed from an order-2 jet plus the ambient parameters.
//! Tangent frames are `e1 = (∂x + u_x ∂z)/λ`, `e2 = (∂y + u_y ∂z)/λ`; in
//! the orthonormal ambient frame these read `(1, 0, α)` and `(0, 1, β)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::grid::GridData;
use crate::space::{AmbientPoint, AmbientVector, Side, SpaceParams};

pub const DEFAULT_SPACELIKE_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceJet {
    pub u: f64,
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uxy: f64,
    pub uyy: f64,
}

impl SurfaceJet {
    pub fn hessian_det(&self) -> f64 {
        self.uxx * self.uyy - self.uxy * self.uxy
    }

    /// `u_xy² − u_xx u_yy`; lies in `[0, τ²]` on entire minimal graphs.
    pub fn neg_hessian_det(&self) -> f64 {
        self.uxy * self.uxy - self.uxx * self.uyy
    }
}

/// Anything that can deliver exact jets of a height function.
pub trait JetSource: Send + Sync {
    fn jet(&self, x: f64, y: f64) -> Result<SurfaceJet>;
}

impl<F> JetSource for F
where
    F: Fn(f64, f64) -> Result<SurfaceJet> + Send + Sync,
{
    fn jet(&self, x: f64, y: f64) -> Result<SurfaceJet> {
        self(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(GeomError::UnsupportedWindow(format!("[{x0}, {x1}] x [{y0}, {y1}] is empty or not finite")));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    /// `[-r, r]²`.
    pub fn square(r: f64) -> Self {
        Self { x0: -r, x1: r, y0: -r, y1: r }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let tol = 1e-12 * (1.0 + self.x1.abs().max(self.x0.abs()).max(self.y0.abs()).max(self.y1.abs()));
        x >= self.x0 - tol && x <= self.x1 + tol && y >= self.y0 - tol && y <= self.y1 + tol
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.contains(other.x0, other.y0) && self.contains(other.x1, other.y1)
    }

    pub fn shrink(&self, d: f64) -> Result<Window> {
        Window::new(self.x0 + d, self.x1 - d, self.y0 + d, self.y1 - d)
    }

    pub fn intersect(&self, other: &Window) -> Result<Window> {
        Window::new(self.x0.max(other.x0), self.x1.min(other.x1), self.y0.max(other.y0), self.y1.min(other.y1))
    }

    pub fn corners(&self) -> [(f64, f64); 4] {
        [(self.x0, self.y0), (self.x1, self.y0), (self.x0, self.y1), (self.x1, self.y1)]
    }

    /// Distance from the origin to the nearest point of the rectangle.
    pub fn min_radius(&self) -> f64 {
        let cx = if self.x0 > 0.0 {
            self.x0
        } else if self.x1 < 0.0 {
            self.x1
        } else {
            0.0
        };
        let cy = if self.y0 > 0.0 {
            self.y0
        } else if self.y1 < 0.0 {
            self.y1
        } else {
            0.0
        };
        cx.hypot(cy)
    }

    /// Uniform `n × n` lattice of sample points including the edges.
    pub fn lattice(&self, n: usize) -> Vec<(f64, f64)> {
        let n = n.max(2);
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            let y = self.y0 + (self.y1 - self.y0) * j as f64 / (n - 1) as f64;
            for i in 0..n {
                let x = self.x0 + (self.x1 - self.x0) * i as f64 / (n - 1) as f64;
                out.push((x, y));
            }
        }
        out
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] x [{}, {}]", self.x0, self.x1, self.y0, self.y1)
    }
}

#[derive(Clone)]
pub enum Backend {
    ClosedForm(Arc<dyn JetSource>),
    Grid(Arc<GridData>),
}

impl fmt::Debug for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::ClosedForm(_) => f.write_str("ClosedForm"),
            Backend::Grid(g) => write!(f, "Grid({}x{}, h = {})", g.nx, g.ny, g.h),
        }
    }
}

/// A vertical graph in `E(κ, τ)` or `L(κ, H)` together with the constant
/// mean curvature it is supposed to have (H on the Riemannian side, τ on
/// the Lorentzian side).
#[derive(Debug, Clone)]
pub struct GraphSurface {
    pub space: SpaceParams,
    pub target_mean_curvature: f64,
    pub window: Window,
    pub backend: Backend,
    pub spacelike_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameData {
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub e1: AmbientVector,
    pub e2: AmbientVector,
    pub normal: AmbientVector,
    pub first_ff: [[f64; 2]; 2],
    pub nu: f64,
}

impl FrameData {
    pub fn first_ff_det(&self) -> f64 {
        self.first_ff[0][0] * self.first_ff[1][1] - self.first_ff[0][1] * self.first_ff[1][0]
    }

    /// Height components `⟨e1, E3⟩`, `⟨e2, E3⟩`.
    pub fn height_components(&self, side: Side) -> [f64; 2] {
        let s = side.vertical_sign();
        [s * self.alpha, s * self.beta]
    }

    /// Matrix of the rotation `J` in the basis `(e1, e2)`; column `k` holds
    /// the coefficients of `J e_k`.
    pub fn rotation(&self, side: Side) -> [[f64; 2]; 2] {
        let (a, b, w) = (self.alpha, self.beta, self.omega);
        match side {
            Side::Riemannian => [[-a * b / w, -(1.0 + b * b) / w], [(1.0 + a * a) / w, a * b / w]],
            Side::Lorentzian => [[a * b / w, -(1.0 - b * b) / w], [(1.0 - a * a) / w, -a * b / w]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeData {
    pub second_ff: [[f64; 2]; 2],
    pub mean_curvature: f64,
    pub gauss_curvature: f64,
}

/// Jet, frame and shape data at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointGeometry {
    pub x: f64,
    pub y: f64,
    pub jet: SurfaceJet,
    pub frame: FrameData,
    pub shape: ShapeData,
}

/// `(λ, α, β, ω²)` from a jet. `ω²` may be non-positive on the Lorentzian
/// side; callers decide what to do with that.
pub fn symbols(space: &SpaceParams, x: f64, y: f64, jet: &SurfaceJet) -> Result<(f64, f64, f64, f64)> {
    let lambda = space.conformal_factor(x, y)?;
    let (alpha, beta) = match space.side {
        Side::Riemannian => (jet.ux / lambda + space.bundle * y, jet.uy / lambda - space.bundle * x),
        Side::Lorentzian => (jet.ux / lambda - space.bundle * y, jet.uy / lambda + space.bundle * x),
    };
    let omega_sq = 1.0 + space.side.vertical_sign() * (alpha * alpha + beta * beta);
    Ok((lambda, alpha, beta, omega_sq))
}

/// Gauss curvature of a spacelike graph in `L³` from its Hessian.
pub fn minkowski_hessian_curvature(jet: &SurfaceJet) -> f64 {
    let w = 1.0 - jet.ux * jet.ux - jet.uy * jet.uy;
    jet.neg_hessian_det() / (w * w)
}

impl GraphSurface {
    pub fn closed_form(
        space: SpaceParams,
        target_mean_curvature: f64,
        window: Window,
        source: Arc<dyn JetSource>,
    ) -> Result<Self> {
        for (x, y) in window.corners() {
            if !space.in_domain(x, y) {
                return Err(GeomError::UnsupportedWindow(format!("window {window} leaves the model domain")));
            }
        }
        Ok(Self {
            space,
            target_mean_curvature,
            window,
            backend: Backend::ClosedForm(source),
            spacelike_margin: DEFAULT_SPACELIKE_MARGIN,
        })
    }

    pub fn from_grid(space: SpaceParams, target_mean_curvature: f64, grid: GridData) -> Result<Self> {
        let window = grid.extent();
        for (x, y) in window.corners() {
            if !space.in_domain(x, y) {
                return Err(GeomError::UnsupportedWindow(format!("grid {window} leaves the model domain")));
            }
        }
        Ok(Self {
            space,
            target_mean_curvature,
            window,
            backend: Backend::Grid(Arc::new(grid)),
            spacelike_margin: DEFAULT_SPACELIKE_MARGIN,
        })
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.spacelike_margin = margin;
        self
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target_mean_curvature = target;
        self
    }

    pub fn side(&self) -> Side {
        self.space.side
    }

    pub fn grid(&self) -> Option<&GridData> {
        match &self.backend {
            Backend::Grid(g) => Some(g),
            Backend::ClosedForm(_) => None,
        }
    }

    /// Region where jets can actually be evaluated: the window itself for
    /// closed forms, the stencil-safe interior for grids.
    pub fn evaluation_window(&self) -> Window {
        match &self.backend {
            Backend::ClosedForm(_) => self.window,
            Backend::Grid(g) => g.jet_window().intersect(&self.window).unwrap_or(self.window),
        }
    }

    /// `(κ, τ, H)` of the pair this surface belongs to.
    pub fn triple(&self) -> (f64, f64, f64) {
        match self.space.side {
            Side::Riemannian => (self.space.kappa, self.space.bundle, self.target_mean_curvature),
            Side::Lorentzian => (self.space.kappa, self.target_mean_curvature, self.space.bundle),
        }
    }

    pub fn raw_jet(&self, x: f64, y: f64) -> Result<SurfaceJet> {
        if !self.window.contains(x, y) {
            return Err(GeomError::OutOfWindow { x, y });
        }
        match &self.backend {
            Backend::ClosedForm(f) => f.jet(x, y),
            Backend::Grid(g) => g.jet(x, y),
        }
    }

    /// Height only; grid nodes are read directly so the edge band is usable.
    pub fn value_at(&self, x: f64, y: f64) -> Result<f64> {
        if let Backend::Grid(g) = &self.backend {
            if self.window.contains(x, y) {
                if let Some((i, j)) = g.node_index(x, y) {
                    return Ok(g.get(i, j));
                }
            }
        }
        Ok(self.raw_jet(x, y)?.u)
    }

    pub fn restrict(&self, window: &Window) -> Result<GraphSurface> {
        if !self.window.contains_window(window) {
            return Err(GeomError::UnsupportedWindow(format!("{window} is not inside the surface window {}", self.window)));
        }
        let mut out = self.clone();
        out.window = *window;
        Ok(out)
    }

    pub fn jet_at(&self, x: f64, y: f64) -> Result<SurfaceJet> {
        let jet = self.raw_jet(x, y)?;
        if self.space.side == Side::Lorentzian {
            let (_, _, _, w2) = symbols(&self.space, x, y, &jet)?;
            self.check_spacelike(x, y, w2)?;
        }
        Ok(jet)
    }

    fn check_spacelike(&self, x: f64, y: f64, omega_sq: f64) -> Result<()> {
        if self.space.side == Side::Lorentzian && !(omega_sq >= self.spacelike_margin && omega_sq > 0.0) {
            return Err(GeomError::SpacelikeViolation { x, y, omega_sq, margin: self.spacelike_margin });
        }
        Ok(())
    }

    pub fn frame_from_jet(&self, x: f64, y: f64, jet: &SurfaceJet) -> Result<FrameData> {
        let (lambda, alpha, beta, w2) = symbols(&self.space, x, y, jet)?;
        self.check_spacelike(x, y, w2)?;
        let omega = w2.sqrt();
        let p = AmbientPoint::new(x, y, jet.u);
        let e1 = AmbientVector::new(p, [1.0 / lambda, 0.0, jet.ux / lambda]);
        let e2 = AmbientVector::new(p, [0.0, 1.0 / lambda, jet.uy / lambda]);
        let (first_ff, n_frame) = match self.space.side {
            Side::Riemannian => (
                [[1.0 + alpha * alpha, alpha * beta], [alpha * beta, 1.0 + beta * beta]],
                [-alpha / omega, -beta / omega, 1.0 / omega],
            ),
            Side::Lorentzian => (
                [[1.0 - alpha * alpha, -alpha * beta], [-alpha * beta, 1.0 - beta * beta]],
                [alpha / omega, beta / omega, 1.0 / omega],
            ),
        };
        let normal = AmbientVector::new(p, self.space.from_frame(&p, &n_frame)?);
        Ok(FrameData { lambda, alpha, beta, omega, e1, e2, normal, first_ff, nu: 1.0 / omega })
    }

    pub fn frame_data(&self, x: f64, y: f64) -> Result<FrameData> {
        let jet = self.raw_jet(x, y)?;
        self.frame_from_jet(x, y, &jet)
    }

    pub fn shape_from(&self, x: f64, y: f64, jet: &SurfaceJet, fr: &FrameData) -> ShapeData {
        let SpaceParams { kappa: k, bundle: t, .. } = self.space;
        let (a, b, w, l2) = (fr.alpha, fr.beta, fr.omega, fr.lambda * fr.lambda);
        let k2 = 0.5 * k;
        let sigma = match self.space.side {
            Side::Riemannian => {
                let s11 = jet.uxx / l2 + 2.0 * t * a * b + k2 * (x * a - y * b) - 0.5 * k * t * x * y;
                let s12 = jet.uxy / l2 + t * (b * b - a * a) + k2 * (x * b + y * a) + 0.25 * k * t * (x * x - y * y);
                let s22 = jet.uyy / l2 - 2.0 * t * a * b - k2 * (x * a - y * b) + 0.5 * k * t * x * y;
                [[s11 / w, s12 / w], [s12 / w, s22 / w]]
            }
            Side::Lorentzian => {
                let s11 = jet.uxx / l2 + 2.0 * t * a * b + k2 * (x * a - y * b) + 0.5 * k * t * x * y;
                let s12 = jet.uxy / l2 + t * (b * b - a * a) + k2 * (x * b + y * a) - 0.25 * k * t * (x * x - y * y);
                let s22 = jet.uyy / l2 - 2.0 * t * a * b - k2 * (x * a - y * b) - 0.5 * k * t * x * y;
                [[-s11 / w, -s12 / w], [-s12 / w, -s22 / w]]
            }
        };
        let g = fr.first_ff;
        let det_g = fr.first_ff_det();
        // tr(I⁻¹ σ) and det σ / det I
        let trace = (g[1][1] * sigma[0][0] - 2.0 * g[0][1] * sigma[0][1] + g[0][0] * sigma[1][1]) / det_g;
        let det_a = (sigma[0][0] * sigma[1][1] - sigma[0][1] * sigma[0][1]) / det_g;
        let nu2 = fr.nu * fr.nu;
        let (mean, gauss) = match self.space.side {
            Side::Riemannian => (0.5 * trace, det_a + t * t + (k - 4.0 * t * t) * nu2),
            Side::Lorentzian => {
                let gauss = if k == 0.0 && t == 0.0 {
                    minkowski_hessian_curvature(jet)
                } else {
                    -det_a - t * t + (k + 4.0 * t * t) * nu2
                };
                (-0.5 * trace, gauss)
            }
        };
        ShapeData { second_ff: sigma, mean_curvature: mean, gauss_curvature: gauss }
    }

    pub fn shape_data(&self, x: f64, y: f64) -> Result<ShapeData> {
        Ok(self.geometry(x, y)?.shape)
    }

    pub fn geometry(&self, x: f64, y: f64) -> Result<PointGeometry> {
        let jet = self.raw_jet(x, y)?;
        let frame = self.frame_from_jet(x, y, &jet)?;
        let shape = self.shape_from(x, y, &jet, &frame);
        Ok(PointGeometry { x, y, jet, frame, shape })
    }

    /// Zero exactly when the graph has the target mean curvature. For κ = 0
    /// this is the quasilinear CMC operator in divergence-free form
    /// (`(1+β²)u_xx − 2αβ u_xy + (1+α²)u_yy − 2Hω³` and its Lorentzian
    /// twin); otherwise `2(H − target)`.
    pub fn cmc_residual(&self, x: f64, y: f64) -> Result<f64> {
        let jet = self.raw_jet(x, y)?;
        let (lambda, a, b, w2) = symbols(&self.space, x, y, &jet)?;
        self.check_spacelike(x, y, w2)?;
        let _ = lambda;
        if self.space.kappa == 0.0 {
            let w3 = w2 * w2.sqrt();
            let h = self.target_mean_curvature;
            return Ok(match self.space.side {
                Side::Riemannian => (1.0 + b * b) * jet.uxx - 2.0 * a * b * jet.uxy + (1.0 + a * a) * jet.uyy - 2.0 * h * w3,
                Side::Lorentzian => (1.0 - b * b) * jet.uxx + 2.0 * a * b * jet.uxy + (1.0 - a * a) * jet.uyy - 2.0 * h * w3,
            });
        }
        let frame = self.frame_from_jet(x, y, &jet)?;
        let shape = self.shape_from(x, y, &jet, &frame);
        Ok(2.0 * (shape.mean_curvature - self.target_mean_curvature))
    }

    /// Samples heights on a lattice with spacing `h` covering `window`.
    pub fn sample_grid(&self, window: &Window, h: f64) -> Result<GridData> {
        let mut grid = GridData::zeros(window, h)?;
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (x, y) = grid.node(i, j);
                let v = self.value_at(x, y)?;
                grid.set(i, j, v);
            }
        }
        Ok(grid)
    }
}
