//! Named verification suites, selectable at runtime.
//!
//! Each suite runs a fixed battery of checks against closed-form ground
//! truth and reports one [`Check`] per quantity.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{curvature_bounds, hessian_bounds, proof_chain_check, sff_norm_check, stability_convergence};
use crate::differential::identity_residuals;
use crate::duality::{dualize, verify_pair, DualPair, DualizeOptions};
use crate::error::{GeomError, Result};
use crate::fixtures::{entire_minimal_catalog, entire_spacelike_catalog, FixtureId, FixtureSpec};
use crate::graph::{GraphSurface, SurfaceJet, Window};
use crate::isometry::{factorize_g, GElement, Generator, LorentzIsometry};
use crate::orbit::{act_and_regraph, orbit_member, OrbitOptions, RegraphOptions};
use crate::patch::geometry_at;
use crate::space::SpaceParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub tau: f64,
    /// Lattice spacing for grid-backed steps.
    pub h: f64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { tau: 0.5, h: 0.05, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value <= tolerance }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, pass: ok }
    }
}

pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<Check>>;
}

fn graph(id: FixtureId, tau: f64, w: Window) -> Result<GraphSurface> {
    FixtureSpec::new(id, tau)?.surface(Some(w))?.into_graph()
}

fn closed_pair(id: FixtureId, tau: f64, w: Window) -> Result<DualPair> {
    let spec = FixtureSpec::new(id, tau)?;
    let dual = spec.dual().ok_or_else(|| GeomError::InvalidParameter(format!("{} has no closed-form dual", id.name())))?;
    DualPair::from_surfaces(graph(id, tau, w)?, graph(dual.id, tau, w)?)
}

fn grid_error(s: &GraphSurface, want: &GraphSurface, inside: &Window, offset: bool) -> Result<f64> {
    let g = s.grid().ok_or_else(|| GeomError::InvalidParameter("expected a grid surface".into()))?;
    let mut shift = None;
    let mut err = 0.0f64;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (x, y) = g.node(i, j);
            if inside.contains(x, y) {
                let d = g.get(i, j) - want.value_at(x, y)?;
                let c = if offset { *shift.get_or_insert(d) } else { 0.0 };
                err = err.max((d - c).abs());
            }
        }
    }
    Ok(err)
}

struct Duality;

impl Suite for Duality {
    fn name(&self) -> &'static str {
        "duality"
    }
    fn summary(&self) -> &'static str {
        "dualize closed-form minimal graphs, compare with their known twins, and round-trip"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<Check>> {
        let tau = cfg.tau;
        let w = Window::square(2.0);
        let h = cfg.h.min(0.02);
        let mut out = vec![];
        for (id, norm) in [(FixtureId::Umbrella, 1.0 / tau), (FixtureId::Saddle, 1.0 / (2.0 * tau))] {
            let src = graph(id, tau, w)?;
            let pair = dualize(&src, (0.0, 0.0), norm, &DualizeOptions::new(h))?;
            let want = graph(FixtureSpec::new(id, tau)?.dual().unwrap().id, tau, w)?;
            out.push(Check::at_most(format!("{}: twin error", id.name()), grid_error(pair.dual(), &want, &w, false)?, 1e-6));
            let back = dualize(pair.dual(), (0.0, 0.0), 0.0, &DualizeOptions::new(h))?;
            out.push(Check::at_most(format!("{}: round trip", id.name()), grid_error(back.dual(), &src, &w, true)?, 1e-6));
            let rep = verify_pair(&pair, &pair.window().shrink(0.1)?.lattice(9));
            out.push(Check::at_most(format!("{}: twin relations on grid", id.name()), rep.max_residual(), 1e-6));
        }
        let f = |x: f64, _: f64| Ok(SurfaceJet { u: 0.1 * x * x, ux: 0.2 * x, uxx: 0.2, ..Default::default() });
        let non_minimal = GraphSurface::closed_form(SpaceParams::nil(tau), 0.0, Window::square(1.0), Arc::new(f))?;
        let nc = dualize(&non_minimal, (0.0, 0.0), 0.0, &DualizeOptions::new(cfg.h));
        out.push(Check::flag(
            "non-minimal input rejected",
            matches!(nc, Err(GeomError::IntegrabilityFailure { loop_residual, .. }) if loop_residual > 1e-2),
        ));
        Ok(out)
    }
}

struct Differentials;

impl Suite for Differentials {
    fn name(&self) -> &'static str {
        "differentials"
    }
    fn summary(&self) -> &'static str {
        "Q = Q̃ on dual pairs, the Hessian identity and the modulus identity"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<Check>> {
        let tau = cfg.tau;
        let w = Window::square(2.0);
        let mut out = vec![];
        for spec in entire_minimal_catalog(tau) {
            let pair = closed_pair(spec.id, tau, w)?;
            let (mut d, mut hs, mut m) = (0.0f64, 0.0f64, 0.0f64);
            for (x, y) in w.lattice(15) {
                let r = identity_residuals(&pair, x, y)?;
                d = d.max(r.duality);
                hs = hs.max(r.hessian.unwrap_or(0.0));
                m = m.max(r.modulus.unwrap_or(0.0));
            }
            out.push(Check::at_most(format!("{}: Q duality", spec.id.name()), d, 1e-12));
            out.push(Check::at_most(format!("{}: Hessian identity", spec.id.name()), hs, 1e-12));
            out.push(Check::at_most(format!("{}: modulus identity", spec.id.name()), m, 1e-12));
        }
        let src = graph(FixtureId::InvariantTheta { theta: 0.5 }, tau, w)?;
        let pair = dualize(&src, (0.0, 0.0), 0.0, &DualizeOptions::new(cfg.h.min(0.02)))?;
        let mut hs = 0.0f64;
        for (x, y) in pair.window().shrink(0.1)?.lattice(9) {
            hs = hs.max(identity_residuals(&pair, x, y)?.hessian.unwrap_or(0.0));
        }
        out.push(Check::at_most("grid dual: Hessian identity", hs, 1e-6));
        Ok(out)
    }
}

struct Isometries;

impl Suite for Isometries {
    fn name(&self) -> &'static str {
        "isometries"
    }
    fn summary(&self) -> &'static str {
        "factorization S = S1 ∘ S2 with S1 ∈ Iso_ξ, S2 ∈ G on random isometries"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<Check>> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let (mut comp, mut param) = (0.0f64, 0.0f64);
        for _ in 0..1000 {
            let g = GElement { theta: rng.gen_range(-2.0..2.0), a: rng.gen_range(-3.0..3.0) };
            let s1 = LorentzIsometry::generator(Generator::Translation([
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            ]))
            .compose(&LorentzIsometry::generator(Generator::ZRotation(rng.gen_range(-3.1..3.1))));
            let f = factorize_g(&s1.compose(&g.isometry()))?;
            comp = comp.max(f.residual);
            param = param.max((f.g.theta - g.theta).abs()).max((f.g.a - g.a).abs());
        }
        Ok(vec![Check::at_most("composition residual", comp, 1e-10), Check::at_most("parameter recovery", param, 1e-9)])
    }
}

struct Orbits;

impl Suite for Orbits {
    fn name(&self) -> &'static str {
        "orbits"
    }
    fn summary(&self) -> &'static str {
        "G acting on duals: boosted cylinder, boosted saddle orbit, invariance of the hyperboloid"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<Check>> {
        let (tau, theta) = (cfg.tau, 0.3);
        let boost = LorentzIsometry::generator(Generator::Hyperbolic(theta));
        let cyl = graph(FixtureId::HyperbolicCylinder, tau, Window::square(4.0))?;
        let w = Window::square(2.0);
        let img = act_and_regraph(&boost, &cyl, &w, cfg.h, &RegraphOptions::default())?;
        let want = graph(FixtureId::InvariantThetaDual { theta }, tau, w)?;
        let mut out = vec![Check::at_most("boosted cylinder", grid_error(&img.surface, &want, &w, false)?, 1e-8)];
        let saddle = graph(FixtureId::Saddle, tau, Window::square(3.0))?;
        let m = orbit_member(&saddle, &boost, (0.0, 0.0), 1.0 / (2.0 * tau), &OrbitOptions::new(cfg.h))?;
        let want = graph(FixtureId::InvariantTheta { theta }, tau, Window::square(3.0))?;
        let inside = Window::square(1.5);
        out.push(Check::flag("orbit window covers the comparison region", m.surface.window.contains_window(&inside)));
        out.push(Check::at_most("boosted saddle orbit", grid_error(&m.surface, &want, &inside, false)?, 1e-5));
        let hyp = graph(FixtureId::Hyperboloid { p: 0.0, q: 0.0 }, tau, Window::square(4.0))?;
        let s = GElement { theta: -0.4, a: 0.7 }.isometry();
        let img = act_and_regraph(&s, &hyp, &w, cfg.h, &RegraphOptions::default())?;
        out.push(Check::at_most("hyperboloid is G-invariant", grid_error(&img.surface, &hyp, &w, false)?, 1e-8));
        Ok(out)
    }
}

struct Curvature;

impl Suite for Curvature {
    fn name(&self) -> &'static str {
        "curvature"
    }
    fn summary(&self) -> &'static str {
        "curvature estimates, Hessian bounds, |σ̃|² bounds and the proof-chain identities"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<Check>> {
        let tau = cfg.tau;
        let w = Window::square(3.0);
        let pts = w.lattice(25);
        let mut out = vec![];
        for spec in entire_minimal_catalog(tau) {
            let n = spec.id.name();
            let u = graph(spec.id, tau, w)?;
            let rep = curvature_bounds(&u, &pts, true, 1e-9)?;
            out.push(Check::flag(format!("{n}: curvature estimate"), rep.passes()));
            let pair = closed_pair(spec.id, tau, w)?;
            let hb = hessian_bounds(&pair, &pts, true, 1e-9)?;
            out.push(Check::flag(format!("{n}: Hessian bounds"), hb.riemannian.passes() && hb.lorentzian.passes()));
            let ch = proof_chain_check(&pair, &pts)?;
            out.push(Check::at_most(format!("{n}: proof chain equality"), ch.max_equality_residual, 1e-8));
            out.push(Check::flag(format!("{n}: proof chain inequalities"), ch.passes(1e-8)));
        }
        for spec in entire_spacelike_catalog(tau) {
            let v = graph(spec.id, tau, w)?;
            let rep = sff_norm_check(&v, &pts, true, 1e-9)?;
            out.push(Check::flag(format!("{}: |σ̃|² bounds", spec.id.name()), rep.passes()));
        }
        let um = curvature_bounds(&graph(FixtureId::Umbrella, tau, w)?, &[(0.0, 0.0)], true, 1e-9)?;
        let s = um.samples[0];
        out.push(Check::at_most("umbrella attains the upper estimate", (s.upper - s.value).abs(), 1e-10));
        Ok(out)
    }
}

struct Stability;

impl Suite for Stability {
    fn name(&self) -> &'static str {
        "stability"
    }
    fn summary(&self) -> &'static str {
        "ν solves the Jacobi equation; second-order convergence of the discrete residual"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<Check>> {
        let tau = cfg.tau;
        let pts = Window::square(1.0).lattice(5);
        let mut out = vec![];
        for id in [FixtureId::Umbrella, FixtureId::Saddle] {
            let st = stability_convergence(&graph(id, tau, Window::square(2.0))?, &pts, [0.04, 0.02, 0.01])?;
            out.push(Check::at_most(format!("{}: order − 2", id.name()), (st.order - 2.0).abs(), 0.3));
        }
        Ok(out)
    }
}

struct Fixtures;

impl Suite for Fixtures {
    fn name(&self) -> &'static str {
        "fixtures"
    }
    fn summary(&self) -> &'static str {
        "fixture self-consistency: CMC residuals, catenoid and helicoid formulas"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<Check>> {
        let tau = cfg.tau;
        let mut out = vec![];
        let mut all = entire_minimal_catalog(tau);
        all.extend(entire_spacelike_catalog(tau));
        for spec in all {
            let g = spec.surface(None)?.into_graph()?;
            let r =
                g.window.lattice(11).into_iter().map(|(x, y)| g.cmc_residual(x, y).map(f64::abs)).collect::<Result<Vec<_>>>()?;
            out.push(Check::at_most(format!("{}: cmc residual", spec.id.name()), r.into_iter().fold(0.0, f64::max), 1e-10));
        }
        let e = 0.8;
        let cat = crate::fixtures::Catenoid::new(e, tau, 4.0)?;
        let cg = graph(FixtureId::Catenoid { e }, tau, Window::new(1.1 * e, 3.0, -0.5, 0.5)?)?;
        let (mut dk, mut dn) = (0.0f64, 0.0f64);
        for (x, y) in cg.window.lattice(9) {
            let r = x.hypot(y);
            let g = cg.geometry(x, y)?;
            dk = dk.max((g.shape.gauss_curvature - cat.expected_curvature(r)).abs());
            dn = dn.max((g.frame.nu - cat.expected_nu(r)).abs());
        }
        out.push(Check::at_most("catenoid K(r)", dk, 1e-7));
        out.push(Check::at_most("catenoid ν(r)", dn, 1e-7));
        for a in [0.5 / tau, 1.0 / (2.0 * tau), 1.5 / tau] {
            let spec = FixtureSpec::new(FixtureId::Helicoid { a }, tau)?;
            let p = spec.surface(None)?.as_patch();
            let k = geometry_at(p.as_ref(), 0.0, 0.5)?.gauss_curvature;
            out.push(Check::at_most(
                format!("helicoid a = {a}: axis curvature"),
                (k - (2.0 * a * tau - 1.0) / (a * a)).abs(),
                1e-6,
            ));
            let c = p
                .domain()
                .lattice(9)
                .into_iter()
                .map(|(s, t)| geometry_at(p.as_ref(), s, t).map(|g| g.conformality_residual()))
                .collect::<Result<Vec<_>>>()?;
            out.push(Check::at_most(format!("helicoid a = {a}: conformality"), c.into_iter().fold(0.0, f64::max), 1e-8));
        }
        Ok(out)
    }
}

static SUITES: &[&dyn Suite] = &[&Duality, &Differentials, &Isometries, &Orbits, &Curvature, &Stability, &Fixtures];

pub fn registry() -> &'static [&'static dyn Suite] {
    SUITES
}

/// `"all"` selects every suite.
pub fn select(name: &str) -> Result<Vec<&'static dyn Suite>> {
    if name == "all" {
        return Ok(SUITES.to_vec());
    }
    SUITES
        .iter()
        .copied()
        .find(|s| s.name() == name)
        .map(|s| vec![s])
        .ok_or_else(|| GeomError::InvalidParameter(format!("unknown suite '{name}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_default_settings() {
        let cfg = SuiteConfig::default();
        for s in registry() {
            for c in s.run(&cfg).unwrap() {
                assert!(c.pass, "{}: {c:?}", s.name());
            }
        }
    }

    #[test]
    fn selection() {
        assert_eq!(select("all").unwrap().len(), registry().len());
        assert_eq!(select("orbits").unwrap()[0].name(), "orbits");
        assert!(select("bogus").is_err());
    }
}
