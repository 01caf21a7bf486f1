//! Pointwise checks of the curvature estimates for entire minimal graphs
//! in `Nil₃` and their duals, the stability identity for `ν`, and the
//! chain of identities used to prove the estimates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duality::DualPair;
use crate::error::{GeomError, Result};
use crate::graph::{GraphSurface, PointGeometry};
use crate::space::Side;

/// Largest `|cmc_residual|` tolerated before a bound check is declared
/// not applicable.
pub const CMC_GATE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

impl BoundSample {
    fn new(x: f64, y: f64, value: f64, lower: f64, upper: f64, tol: f64) -> Self {
        Self { x, y, value, lower, upper, pass: value >= lower - tol && value <= upper + tol }
    }

    pub fn slack(&self) -> f64 {
        (self.value - self.lower).min(self.upper - self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "kebab-case")]
pub enum BoundStatus {
    Checked,
    NotApplicable(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub status: BoundStatus,
    /// The estimates are theorems about entire graphs; a finite window
    /// cannot certify that, so the caller says so.
    pub attested_entire: bool,
    pub tolerance: f64,
    pub samples: Vec<BoundSample>,
    pub min_slack: f64,
    pub max_violation: f64,
    pub sample_count: usize,
}

impl BoundReport {
    fn checked(name: &str, attested: bool, tol: f64, samples: Vec<BoundSample>) -> Self {
        let min_slack = samples.iter().map(BoundSample::slack).fold(f64::INFINITY, f64::min);
        let max_violation = samples.iter().map(|s| (s.lower - s.value).max(s.value - s.upper).max(0.0)).fold(0.0, f64::max);
        Self {
            name: name.into(),
            status: BoundStatus::Checked,
            attested_entire: attested,
            tolerance: tol,
            sample_count: samples.len(),
            samples,
            min_slack,
            max_violation,
        }
    }

    fn not_applicable(name: &str, attested: bool, tol: f64, reason: String) -> Self {
        Self {
            name: name.into(),
            status: BoundStatus::NotApplicable(reason),
            attested_entire: attested,
            tolerance: tol,
            samples: vec![],
            min_slack: f64::NAN,
            max_violation: f64::NAN,
            sample_count: 0,
        }
    }

    pub fn violations(&self) -> usize {
        self.samples.iter().filter(|s| !s.pass).count()
    }

    pub fn passes(&self) -> bool {
        self.status == BoundStatus::Checked && self.violations() == 0
    }
}

fn gate(surface: &GraphSurface, samples: &[(f64, f64)]) -> Option<String> {
    if surface.space.kappa != 0.0 {
        return Some(format!("κ = {} ≠ 0", surface.space.kappa));
    }
    for &(x, y) in samples {
        match surface.cmc_residual(x, y) {
            Ok(r) if r.abs() <= CMC_GATE => {}
            Ok(r) => return Some(format!("cmc residual {r:e} at ({x}, {y})")),
            Err(e) => return Some(e.to_string()),
        }
    }
    None
}

fn geometries(surface: &GraphSurface, samples: &[(f64, f64)]) -> Result<Vec<PointGeometry>> {
    samples.par_iter().map(|&(x, y)| surface.geometry(x, y)).collect()
}

/// `−4(H² + τ²)ν² ≤ K ≤ −3(H² + τ²)ν⁴` on a graph in `Nil₃`.
pub fn curvature_bounds(surface: &GraphSurface, samples: &[(f64, f64)], attested_entire: bool, tol: f64) -> Result<BoundReport> {
    let name = "curvature-estimate";
    if surface.side() != Side::Riemannian {
        return Ok(BoundReport::not_applicable(name, attested_entire, tol, "not a Riemannian graph".into()));
    }
    if let Some(why) = gate(surface, samples) {
        return Ok(BoundReport::not_applicable(name, attested_entire, tol, why));
    }
    let c = surface.target_mean_curvature.powi(2) + surface.space.bundle.powi(2);
    let recs = geometries(surface, samples)?
        .into_iter()
        .map(|g| {
            let nu = g.frame.nu;
            BoundSample::new(g.x, g.y, g.shape.gauss_curvature, -4.0 * c * nu * nu, -3.0 * c * nu.powi(4), tol)
        })
        .collect();
    Ok(BoundReport::checked(name, attested_entire, tol, recs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianBounds {
    /// `0 ≤ u_xy² − u_xx u_yy ≤ τ²`.
    pub riemannian: BoundReport,
    /// `−τ² ≤ K̃ ≤ 0`.
    pub lorentzian: BoundReport,
}

pub fn hessian_bounds(pair: &DualPair, samples: &[(f64, f64)], attested_entire: bool, tol: f64) -> Result<HessianBounds> {
    let (r, l) = (&pair.riemannian, &pair.lorentzian);
    let tau = r.space.bundle;
    let reason = if r.space.kappa != 0.0 || r.target_mean_curvature != 0.0 {
        Some("needs a minimal graph in Nil₃".to_string())
    } else {
        gate(r, samples).or_else(|| gate(l, samples))
    };
    if let Some(why) = reason {
        return Ok(HessianBounds {
            riemannian: BoundReport::not_applicable("hessian-determinant", attested_entire, tol, why.clone()),
            lorentzian: BoundReport::not_applicable("dual-gauss-curvature", attested_entire, tol, why),
        });
    }
    let rr = samples
        .par_iter()
        .map(|&(x, y)| {
            let j = r.jet_at(x, y)?;
            Ok(BoundSample::new(x, y, j.neg_hessian_det(), 0.0, tau * tau, tol))
        })
        .collect::<Result<Vec<_>>>()?;
    let ll = geometries(l, samples)?
        .into_iter()
        .map(|g| BoundSample::new(g.x, g.y, g.shape.gauss_curvature, -tau * tau, 0.0, tol))
        .collect();
    Ok(HessianBounds {
        riemannian: BoundReport::checked("hessian-determinant", attested_entire, tol, rr),
        lorentzian: BoundReport::checked("dual-gauss-curvature", attested_entire, tol, ll),
    })
}

/// `2τ² ≤ |σ̃|² ≤ 4τ²` for a spacelike CMC-τ graph in `L³`, with `|σ̃|²`
/// computed as the trace of the squared shape operator.
pub fn sff_norm_check(surface: &GraphSurface, samples: &[(f64, f64)], attested_entire: bool, tol: f64) -> Result<BoundReport> {
    let name = "sff-norm";
    if !surface.space.is_minkowski() {
        return Ok(BoundReport::not_applicable(name, attested_entire, tol, "not a graph in L³".into()));
    }
    if let Some(why) = gate(surface, samples) {
        return Ok(BoundReport::not_applicable(name, attested_entire, tol, why));
    }
    let t2 = surface.target_mean_curvature.powi(2);
    let recs = geometries(surface, samples)?
        .into_iter()
        .map(|g| BoundSample::new(g.x, g.y, sff_norm_sq(&g), 2.0 * t2, 4.0 * t2, tol))
        .collect();
    Ok(BoundReport::checked(name, attested_entire, tol, recs))
}

/// `tr((I⁻¹σ)²)`.
pub fn sff_norm_sq(g: &PointGeometry) -> f64 {
    let i = g.frame.first_ff;
    let s = g.shape.second_ff;
    let d = i[0][0] * i[1][1] - i[0][1] * i[1][0];
    let inv = [[i[1][1] / d, -i[0][1] / d], [-i[1][0] / d, i[0][0] / d]];
    let mut a = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            a[r][c] = inv[r][0] * s[0][c] + inv[r][1] * s[1][c];
        }
    }
    a[0][0] * a[0][0] + 2.0 * a[0][1] * a[1][0] + a[1][1] * a[1][1]
}

/// Coordinate metric of a `κ = 0` graph: `g = λ² I` in the `(x, y)` chart.
fn coordinate_metric(g: &PointGeometry) -> [[f64; 2]; 2] {
    let l2 = g.frame.lambda * g.frame.lambda;
    let i = g.frame.first_ff;
    [[l2 * i[0][0], l2 * i[0][1]], [l2 * i[1][0], l2 * i[1][1]]]
}

/// `∂ν` on a `κ = 0` Riemannian graph, exact in the jet.
fn nu_gradient(g: &PointGeometry, tau: f64) -> [f64; 2] {
    let j = &g.jet;
    let (a, b, w) = (g.frame.alpha, g.frame.beta, g.frame.omega);
    let w3 = w * w * w;
    [-(a * j.uxx + b * (j.uxy - tau)) / w3, -(a * (j.uxy + tau) + b * j.uyy) / w3]
}

fn grad_norm_sq(metric: [[f64; 2]; 2], d: [f64; 2]) -> f64 {
    let det = metric[0][0] * metric[1][1] - metric[0][1] * metric[1][0];
    (metric[1][1] * d[0] * d[0] - 2.0 * metric[0][1] * d[0] * d[1] + metric[0][0] * d[1] * d[1]) / det
}

/// `max |Δν − 2Kν − 4τ²ν³|` over `samples`, with the Laplace–Beltrami
/// operator in divergence form `(1/√g) ∂_i(√g g^{ij} ∂_j ν)` discretized
/// by second-order differences of step `h`.
pub fn stability_residual(surface: &GraphSurface, samples: &[(f64, f64)], h: f64) -> Result<f64> {
    if surface.side() != Side::Riemannian || surface.space.kappa != 0.0 {
        return Err(GeomError::InvalidParameter("stability residual needs a graph in Nil₃".into()));
    }
    let inner = surface.evaluation_window().shrink(3.0 * h)?;
    let tau = surface.space.bundle;
    let nu = |x: f64, y: f64| surface.frame_data(x, y).map(|f| f.nu);
    // √g g^{ij}
    let flux = |x: f64, y: f64| -> Result<([[f64; 2]; 2], f64)> {
        let g = surface.geometry(x, y)?;
        let m = coordinate_metric(&g);
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let s = det.sqrt();
        Ok(([[s * m[1][1] / det, -s * m[0][1] / det], [-s * m[1][0] / det, s * m[0][0] / det]], s))
    };
    let vals = samples
        .par_iter()
        .map(|&(x, y)| {
            if !inner.contains(x, y) {
                return Err(GeomError::OutOfWindow { x, y });
            }
            let n0 = nu(x, y)?;
            let (ne, nw, nn, ns) = (nu(x + h, y)?, nu(x - h, y)?, nu(x, y + h)?, nu(x, y - h)?);
            let (ae, aw) = (flux(x + 0.5 * h, y)?.0, flux(x - 0.5 * h, y)?.0);
            let (an, as_) = (flux(x, y + 0.5 * h)?.0, flux(x, y - 0.5 * h)?.0);
            let diag = (ae[0][0] * (ne - n0) - aw[0][0] * (n0 - nw) + an[1][1] * (nn - n0) - as_[1][1] * (n0 - ns)) / (h * h);
            let dy_at = |px: f64| -> Result<f64> { Ok((nu(px, y + h)? - nu(px, y - h)?) / (2.0 * h)) };
            let dx_at = |py: f64| -> Result<f64> { Ok((nu(x + h, py)? - nu(x - h, py)?) / (2.0 * h)) };
            let (fe, fw) = (flux(x + h, y)?.0, flux(x - h, y)?.0);
            let (fnn, fs) = (flux(x, y + h)?.0, flux(x, y - h)?.0);
            let cross = (fe[0][1] * dy_at(x + h)? - fw[0][1] * dy_at(x - h)?) / (2.0 * h)
                + (fnn[1][0] * dx_at(y + h)? - fs[1][0] * dx_at(y - h)?) / (2.0 * h);
            let sqrt_g = flux(x, y)?.1;
            let lap = (diag + cross) / sqrt_g;
            let k = surface.shape_data(x, y)?.gauss_curvature;
            Ok((lap - 2.0 * k * n0 - 4.0 * tau * tau * n0.powi(3)).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub steps: [f64; 3],
    pub residuals: [f64; 3],
    /// Least-squares slope of `log r` against `log h`.
    pub order: f64,
}

pub fn stability_convergence(surface: &GraphSurface, samples: &[(f64, f64)], steps: [f64; 3]) -> Result<ConvergenceStudy> {
    let mut residuals = [0.0; 3];
    for (r, &h) in residuals.iter_mut().zip(&steps) {
        *r = stability_residual(surface, samples, h)?;
    }
    let lx: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / 3.0, ly.iter().sum::<f64>() / 3.0);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(ConvergenceStudy { steps, residuals, order: num / den })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSample {
    pub x: f64,
    pub y: f64,
    /// `K̃ − (−K/ν² − 4τ² + ‖∇ν‖²/ν⁴)`.
    pub equality_residual: f64,
    /// `(4τ² + 2K̃)(1 − ν²) − ‖∇ν‖²/ν⁴`.
    pub gradient_slack: f64,
    /// `−4τ²ν⁴ + K̃ν²(1 − 2ν²) − K`.
    pub curvature_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub samples: Vec<ChainSample>,
    pub max_equality_residual: f64,
    pub min_gradient_slack: f64,
    pub min_curvature_slack: f64,
}

impl ChainReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_equality_residual <= tol && self.min_gradient_slack >= -tol && self.min_curvature_slack >= -tol
    }
}

/// Evaluates the identities relating `K`, `K̃` and `‖∇ν‖` on a minimal
/// graph in `Nil₃` and its dual.
pub fn proof_chain_check(pair: &DualPair, samples: &[(f64, f64)]) -> Result<ChainReport> {
    let (r, l) = (&pair.riemannian, &pair.lorentzian);
    if r.space.kappa != 0.0 || r.target_mean_curvature != 0.0 {
        return Err(GeomError::InvalidParameter("proof chain is stated for minimal graphs in Nil₃".into()));
    }
    let tau = r.space.bundle;
    let t2 = tau * tau;
    let recs = samples
        .par_iter()
        .map(|&(x, y)| {
            let g = r.geometry(x, y)?;
            let kl = l.shape_data(x, y)?.gauss_curvature;
            let (k, nu) = (g.shape.gauss_curvature, g.frame.nu);
            let grad = grad_norm_sq(coordinate_metric(&g), nu_gradient(&g, tau)) / nu.powi(4);
            Ok(ChainSample {
                x,
                y,
                equality_residual: (kl - (-k / (nu * nu) - 4.0 * t2 + grad)).abs(),
                gradient_slack: (4.0 * t2 + 2.0 * kl) * (1.0 - nu * nu) - grad,
                curvature_slack: -4.0 * t2 * nu.powi(4) + kl * nu * nu * (1.0 - 2.0 * nu * nu) - k,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainReport {
        max_equality_residual: recs.iter().map(|s| s.equality_residual).fold(0.0, f64::max),
        min_gradient_slack: recs.iter().map(|s| s.gradient_slack).fold(f64::INFINITY, f64::min),
        min_curvature_slack: recs.iter().map(|s| s.curvature_slack).fold(f64::INFINITY, f64::min),
        samples: recs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{FixtureId, FixtureSpec};
    use crate::graph::{SurfaceJet, Window};
    use std::sync::Arc;

    fn fixture(id: FixtureId, tau: f64, r: f64) -> GraphSurface {
        FixtureSpec::new(id, tau).unwrap().surface(Some(Window::square(r))).unwrap().into_graph().unwrap()
    }

    fn pair(id: FixtureId, tau: f64, r: f64) -> DualPair {
        let spec = FixtureSpec::new(id, tau).unwrap();
        DualPair::from_surfaces(fixture(id, tau, r), fixture(spec.dual().unwrap().id, tau, r)).unwrap()
    }

    #[test]
    fn umbrella_attains_the_upper_estimate_at_the_origin() {
        let tau = 0.5;
        let u = fixture(FixtureId::Umbrella, tau, 3.0);
        let rep = curvature_bounds(&u, &[(0.0, 0.0), (1.0, -2.0)], true, 1e-9).unwrap();
        assert!(rep.passes());
        let s = rep.samples[0];
        assert!((s.value + 3.0 * tau * tau).abs() < 1e-14 && (s.upper - s.value).abs() < 1e-14);
    }

    #[test]
    fn non_minimal_graph_is_not_applicable() {
        let f = |x: f64, _: f64| Ok(SurfaceJet { u: 0.1 * x * x, ux: 0.2 * x, uxx: 0.2, ..Default::default() });
        let g = GraphSurface::closed_form(crate::space::SpaceParams::nil(0.5), 0.0, Window::square(1.0), Arc::new(f)).unwrap();
        let rep = curvature_bounds(&g, &Window::square(1.0).lattice(5), true, 1e-9).unwrap();
        assert!(matches!(rep.status, BoundStatus::NotApplicable(_)));
        assert!(!rep.passes());
    }

    #[test]
    fn hessian_bound_attainment() {
        let tau = 0.5;
        let pts = Window::square(2.0).lattice(7);
        let um = hessian_bounds(&pair(FixtureId::Umbrella, tau, 2.0), &pts, true, 1e-12).unwrap();
        assert!(um.riemannian.passes() && um.lorentzian.passes());
        assert!(um.riemannian.samples.iter().all(|s| s.value == 0.0));
        assert!(um.lorentzian.samples.iter().all(|s| (s.value + tau * tau).abs() < 1e-12));
        let sa = hessian_bounds(&pair(FixtureId::Saddle, tau, 2.0), &pts, true, 1e-12).unwrap();
        assert!(sa.riemannian.samples.iter().all(|s| (s.value - tau * tau).abs() < 1e-15));
        assert!(sa.lorentzian.samples.iter().all(|s| s.value.abs() < 1e-12));
        let th = hessian_bounds(&pair(FixtureId::InvariantTheta { theta: 0.7 }, tau, 2.0), &pts, true, 1e-12).unwrap();
        assert!(th.riemannian.passes() && th.lorentzian.passes());
    }

    #[test]
    fn sff_norm_extremes() {
        let tau = 0.5;
        let pts = Window::square(2.0).lattice(7);
        let h = sff_norm_check(&fixture(FixtureId::Hyperboloid { p: 0.0, q: 0.0 }, tau, 2.0), &pts, true, 1e-12).unwrap();
        assert!(h.passes() && h.samples.iter().all(|s| (s.value - 2.0 * tau * tau).abs() < 1e-12));
        let c = sff_norm_check(&fixture(FixtureId::HyperbolicCylinder, tau, 2.0), &pts, true, 1e-12).unwrap();
        assert!(c.passes() && c.samples.iter().all(|s| (s.value - 4.0 * tau * tau).abs() < 1e-12));
        let b = sff_norm_check(&fixture(FixtureId::InvariantThetaDual { theta: 0.4 }, tau, 2.0), &pts, true, 1e-12).unwrap();
        assert!(b.samples.iter().all(|s| (s.value - 4.0 * tau * tau).abs() < 1e-12));
    }

    #[test]
    fn sff_norm_matches_gauss_identity() {
        let tau = 0.5;
        let s = fixture(FixtureId::ParabolicRotated { a: 0.6 }, tau, 2.0);
        for (x, y) in Window::square(2.0).lattice(5) {
            let g = s.geometry(x, y).unwrap();
            assert!((sff_norm_sq(&g) - (4.0 * tau * tau + 2.0 * g.shape.gauss_curvature)).abs() < 1e-12);
        }
    }

    #[test]
    fn proof_chain_on_closed_pairs() {
        let tau = 0.5;
        let pts = Window::square(2.0).lattice(9);
        for id in [FixtureId::Umbrella, FixtureId::Saddle, FixtureId::InvariantTheta { theta: -0.6 }] {
            let rep = proof_chain_check(&pair(id, tau, 2.0), &pts).unwrap();
            assert!(
                rep.passes(1e-10),
                "{id:?}: {} {} {}",
                rep.max_equality_residual,
                rep.min_gradient_slack,
                rep.min_curvature_slack
            );
        }
    }

    #[test]
    fn stability_residual_decays_quadratically() {
        let tau = 0.5;
        let pts = Window::square(1.0).lattice(5);
        for id in [FixtureId::Umbrella, FixtureId::Saddle, FixtureId::AffinePlane { a: 0.3, b: -0.2, c: 0.0 }] {
            let st = stability_convergence(&fixture(id, tau, 2.0), &pts, [0.04, 0.02, 0.01]).unwrap();
            assert!((st.order - 2.0).abs() < 0.3, "{id:?}: {st:?}");
        }
        let s = stability_residual(&fixture(FixtureId::Saddle, tau, 2.0), &pts, 0.01).unwrap();
        assert!(s < 1e-4, "{s}");
    }
}
