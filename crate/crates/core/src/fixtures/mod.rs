//! Named test surfaces with known geometry.
//!
//! A [`FixtureSpec`] is a serializable description (family, parameters,
//! τ); [`registry`] lists the families as [`Fixture`] trait objects so the
//! CLI can build specs from `key=value` parameters.

pub mod catenoid;
pub mod closed;
pub mod hano_nomizu;
pub mod patches;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::graph::{GraphSurface, Window};
use crate::patch::{GraphPatch, ParametricPatch};
use crate::space::{Side, SpaceParams};

pub use catenoid::Catenoid;
pub use hano_nomizu::HanoNomizu;
pub use patches::{Helicoid, Semitrough};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum FixtureId {
    Umbrella,
    AffinePlane {
        a: f64,
        b: f64,
        c: f64,
    },
    Saddle,
    InvariantTheta {
        theta: f64,
    },
    Catenoid {
        e: f64,
    },
    Helicoid {
        a: f64,
    },
    Hyperboloid {
        #[serde(default)]
        p: f64,
        #[serde(default)]
        q: f64,
    },
    HyperbolicCylinder,
    InvariantThetaDual {
        theta: f64,
    },
    ParabolicRotated {
        a: f64,
    },
    HanoNomizu {
        family: u8,
        a: f64,
    },
    Semitrough {
        scale: f64,
    },
}

impl FixtureId {
    pub fn name(&self) -> &'static str {
        match self {
            FixtureId::Umbrella => "umbrella",
            FixtureId::AffinePlane { .. } => "affine-plane",
            FixtureId::Saddle => "saddle",
            FixtureId::InvariantTheta { .. } => "invariant-theta",
            FixtureId::Catenoid { .. } => "catenoid",
            FixtureId::Helicoid { .. } => "helicoid",
            FixtureId::Hyperboloid { .. } => "hyperboloid",
            FixtureId::HyperbolicCylinder => "hyperbolic-cylinder",
            FixtureId::InvariantThetaDual { .. } => "invariant-theta-dual",
            FixtureId::ParabolicRotated { .. } => "parabolic-rotated",
            FixtureId::HanoNomizu { .. } => "hano-nomizu",
            FixtureId::Semitrough { .. } => "semitrough",
        }
    }

    pub fn side(&self) -> Side {
        match self {
            FixtureId::Umbrella
            | FixtureId::AffinePlane { .. }
            | FixtureId::Saddle
            | FixtureId::InvariantTheta { .. }
            | FixtureId::Catenoid { .. }
            | FixtureId::Helicoid { .. } => Side::Riemannian,
            _ => Side::Lorentzian,
        }
    }
}

/// A fixture family plus the twist `τ` of `Nil₃(τ)`, which on the
/// Lorentzian side is the mean curvature in `L³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub id: FixtureId,
    pub tau: f64,
}

pub enum FixtureSurface {
    Graph(GraphSurface),
    Patch(Arc<dyn ParametricPatch>),
}

impl FixtureSurface {
    pub fn space(&self) -> SpaceParams {
        match self {
            FixtureSurface::Graph(g) => g.space,
            FixtureSurface::Patch(p) => p.space(),
        }
    }

    pub fn graph(&self) -> Option<&GraphSurface> {
        match self {
            FixtureSurface::Graph(g) => Some(g),
            FixtureSurface::Patch(_) => None,
        }
    }

    pub fn into_graph(self) -> Result<GraphSurface> {
        match self {
            FixtureSurface::Graph(g) => Ok(g),
            FixtureSurface::Patch(p) => Err(GeomError::NotAGraph(p.name())),
        }
    }

    pub fn as_patch(&self) -> Arc<dyn ParametricPatch> {
        match self {
            FixtureSurface::Graph(g) => Arc::new(GraphPatch(g.clone())),
            FixtureSurface::Patch(p) => p.clone(),
        }
    }
}

impl FixtureSpec {
    pub fn new(id: FixtureId, tau: f64) -> Result<Self> {
        let s = Self { id, tau };
        s.validate()?;
        Ok(s)
    }

    pub fn side(&self) -> Side {
        self.id.side()
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GeomError::InvalidParameter(m));
        if !self.tau.is_finite() {
            return bad(format!("τ must be finite, got {}", self.tau));
        }
        let radius_from_tau = self.side() == Side::Lorentzian && !matches!(self.id, FixtureId::Semitrough { .. });
        if radius_from_tau && self.tau == 0.0 {
            return bad(format!("{} needs τ ≠ 0", self.id.name()));
        }
        match self.id {
            FixtureId::AffinePlane { a, b, .. } if (a != 0.0 || b != 0.0) && self.tau == 0.0 => {
                bad("a tilted plane is only minimal for τ ≠ 0 in this family".into())
            }
            FixtureId::Catenoid { e } if !(e > 0.0) => bad(format!("catenoid neck must be positive, got {e}")),
            FixtureId::Helicoid { a } if !(a > 0.0) => bad(format!("helicoid pitch must be positive, got {a}")),
            FixtureId::HanoNomizu { family, a } => HanoNomizu::new(family, a, self.tau).map(|_| ()),
            FixtureId::Semitrough { scale } if !(scale > 0.0) => bad(format!("semitrough scale must be positive, got {scale}")),
            FixtureId::Semitrough { .. } if self.tau != 0.0 => {
                bad("the semitrough fixes its own mean curvature; pass τ = 0".into())
            }
            _ => Ok(()),
        }
    }

    pub fn space(&self) -> SpaceParams {
        match self.side() {
            Side::Riemannian => SpaceParams::nil(self.tau),
            Side::Lorentzian => SpaceParams::minkowski(),
        }
    }

    /// Mean curvature the surface has in its own space.
    pub fn target_mean_curvature(&self) -> f64 {
        match (self.side(), self.id) {
            (_, FixtureId::Semitrough { scale }) => 1.0 / scale,
            (Side::Riemannian, _) => 0.0,
            (Side::Lorentzian, _) => self.tau,
        }
    }

    pub fn default_window(&self) -> Window {
        match self.id {
            FixtureId::Catenoid { e } => Window { x0: e + 0.5, x1: e + 2.5, y0: -1.0, y1: 1.0 },
            FixtureId::Helicoid { .. } => Window { x0: -1.0, x1: 1.0, y0: -PI, y1: PI },
            FixtureId::Semitrough { .. } => Window { x0: 0.25, x1: 2.25, y0: -1.0, y1: 1.0 },
            FixtureId::HanoNomizu { family: 2, .. } => Window { x0: 0.5, x1: 2.5, y0: -1.0, y1: 1.0 },
            _ => Window::square(2.0),
        }
    }

    /// Entire graphs: minimal in `Nil₃`, or entire spacelike CMC in `L³`.
    pub fn is_entire(&self) -> bool {
        !matches!(
            self.id,
            FixtureId::Catenoid { .. }
                | FixtureId::Helicoid { .. }
                | FixtureId::Semitrough { .. }
                | FixtureId::HanoNomizu { family: 2, .. }
        )
    }

    pub fn is_entire_minimal(&self) -> bool {
        self.side() == Side::Riemannian && self.is_entire()
    }

    /// The twin fixture, where one is known in closed form.
    pub fn dual(&self) -> Option<FixtureSpec> {
        let id = match self.id {
            FixtureId::Umbrella => FixtureId::Hyperboloid { p: 0.0, q: 0.0 },
            FixtureId::AffinePlane { a, b, .. } => FixtureId::Hyperboloid { p: b / self.tau, q: -a / self.tau },
            FixtureId::Saddle => FixtureId::HyperbolicCylinder,
            FixtureId::InvariantTheta { theta } => FixtureId::InvariantThetaDual { theta },
            FixtureId::Hyperboloid { p: 0.0, q: 0.0 } => FixtureId::Umbrella,
            FixtureId::Hyperboloid { p, q } => FixtureId::AffinePlane { a: -q * self.tau, b: p * self.tau, c: 0.0 },
            FixtureId::HyperbolicCylinder => FixtureId::Saddle,
            FixtureId::InvariantThetaDual { theta } => FixtureId::InvariantTheta { theta },
            _ => return None,
        };
        Some(FixtureSpec { id, tau: self.tau })
    }

    pub fn surface(&self, window: Option<Window>) -> Result<FixtureSurface> {
        self.validate()?;
        let w = window.unwrap_or_else(|| self.default_window());
        let tau = self.tau;
        let graph =
            |src| GraphSurface::closed_form(self.space(), self.target_mean_curvature(), w, src).map(FixtureSurface::Graph);
        match self.id {
            FixtureId::Umbrella => graph(closed::umbrella()),
            FixtureId::AffinePlane { a, b, c } => graph(closed::affine_plane(a, b, c)),
            FixtureId::Saddle => graph(closed::saddle(tau)),
            FixtureId::InvariantTheta { theta } => graph(closed::invariant_theta(tau, theta)),
            FixtureId::Hyperboloid { p, q } => graph(closed::hyperboloid(tau, p, q)),
            FixtureId::HyperbolicCylinder => graph(closed::invariant_theta_dual(tau, 0.0)),
            FixtureId::InvariantThetaDual { theta } => graph(closed::invariant_theta_dual(tau, theta)),
            FixtureId::ParabolicRotated { a } => graph(closed::parabolic_rotated(tau, a)),
            FixtureId::HanoNomizu { family, a } => {
                let hn = HanoNomizu::new(family, a, tau)?;
                hn.check_window(&w)?;
                graph(Arc::new(hn))
            }
            FixtureId::Catenoid { e } => {
                if !(w.min_radius() > e) {
                    return Err(GeomError::UnsupportedWindow(format!(
                        "catenoid graph needs the window {w} outside the neck radius {e}"
                    )));
                }
                let r_max = w.corners().iter().map(|&(x, y)| x.hypot(y)).fold(0.0, f64::max);
                graph(Arc::new(Catenoid::new(e, tau, r_max * 1.01 + 0.1)?))
            }
            FixtureId::Helicoid { a } => {
                let x_max = w.x0.abs().max(w.x1.abs());
                let (_, h) = patches::helicoid_profile(a, tau, x_max * 1.01 + 0.05, (w.y0, w.y1))?;
                Ok(FixtureSurface::Patch(Arc::new(Helicoid { domain: w, ..h })))
            }
            FixtureId::Semitrough { scale } => Ok(FixtureSurface::Patch(Arc::new(Semitrough::new(scale, w)?))),
        }
    }
}

/// One entry of the fixture catalogue.
pub trait Fixture: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Accepted parameter names with their defaults.
    fn params(&self) -> &'static [(&'static str, f64)];
    fn side(&self) -> Side;
    fn build(&self, p: &dyn Fn(&str) -> f64) -> FixtureId;

    fn make(&self, tau: f64, params: &BTreeMap<String, f64>) -> Result<FixtureSpec> {
        for k in params.keys() {
            if !self.params().iter().any(|(n, _)| n == k) {
                return Err(GeomError::InvalidParameter(format!("{} takes no parameter '{k}'", self.name())));
            }
        }
        let get =
            |k: &str| params.get(k).copied().unwrap_or_else(|| self.params().iter().find(|(n, _)| *n == k).map_or(0.0, |p| p.1));
        FixtureSpec::new(self.build(&get), tau)
    }
}

/// Builds an id from a parameter lookup.
type Builder = fn(&dyn Fn(&str) -> f64) -> FixtureId;

struct Entry {
    name: &'static str,
    summary: &'static str,
    params: &'static [(&'static str, f64)],
    side: Side,
    build: Builder,
}

impl Fixture for Entry {
    fn name(&self) -> &'static str {
        self.name
    }
    fn summary(&self) -> &'static str {
        self.summary
    }
    fn params(&self) -> &'static [(&'static str, f64)] {
        self.params
    }
    fn side(&self) -> Side {
        self.side
    }
    fn build(&self, p: &dyn Fn(&str) -> f64) -> FixtureId {
        (self.build)(p)
    }
}

static REGISTRY: &[Entry] = &[
    Entry {
        name: "umbrella",
        summary: "horizontal umbrella z = 0",
        params: &[],
        side: Side::Riemannian,
        build: |_| FixtureId::Umbrella,
    },
    Entry {
        name: "affine-plane",
        summary: "z = ax + by + c, a translated umbrella",
        params: &[("a", 0.0), ("b", 0.0), ("c", 0.0)],
        side: Side::Riemannian,
        build: |p| FixtureId::AffinePlane { a: p("a"), b: p("b"), c: p("c") },
    },
    Entry { name: "saddle", summary: "z = -τxy", params: &[], side: Side::Riemannian, build: |_| FixtureId::Saddle },
    Entry {
        name: "invariant-theta",
        summary: "entire minimal graphs invariant under y-translation",
        params: &[("theta", 0.5)],
        side: Side::Riemannian,
        build: |p| FixtureId::InvariantTheta { theta: p("theta") },
    },
    Entry {
        name: "catenoid",
        summary: "rotational minimal annulus with neck radius e",
        params: &[("e", 1.0)],
        side: Side::Riemannian,
        build: |p| FixtureId::Catenoid { e: p("e") },
    },
    Entry {
        name: "helicoid",
        summary: "minimal helicoid of pitch a in its conformal chart",
        params: &[("a", 1.0)],
        side: Side::Riemannian,
        build: |p| FixtureId::Helicoid { a: p("a") },
    },
    Entry {
        name: "hyperboloid",
        summary: "spacelike hyperboloid centred at (p, q)",
        params: &[("p", 0.0), ("q", 0.0)],
        side: Side::Lorentzian,
        build: |p| FixtureId::Hyperboloid { p: p("p"), q: p("q") },
    },
    Entry {
        name: "hyperbolic-cylinder",
        summary: "z = √(1/(4τ²) + x²)",
        params: &[],
        side: Side::Lorentzian,
        build: |_| FixtureId::HyperbolicCylinder,
    },
    Entry {
        name: "invariant-theta-dual",
        summary: "boosted hyperbolic cylinders",
        params: &[("theta", 0.5)],
        side: Side::Lorentzian,
        build: |p| FixtureId::InvariantThetaDual { theta: p("theta") },
    },
    Entry {
        name: "parabolic-rotated",
        summary: "hyperbolic cylinder after a null rotation",
        params: &[("a", 1.0)],
        side: Side::Lorentzian,
        build: |p| FixtureId::ParabolicRotated { a: p("a") },
    },
    Entry {
        name: "hano-nomizu",
        summary: "surfaces invariant under null rotations, families 1 to 3",
        params: &[("family", 1.0), ("a", 1.0)],
        side: Side::Lorentzian,
        build: |p| FixtureId::HanoNomizu { family: p("family") as u8, a: p("a") },
    },
    Entry {
        name: "semitrough",
        summary: "non-graph CMC surface with H = 1/scale",
        params: &[("scale", 1.0)],
        side: Side::Lorentzian,
        build: |p| FixtureId::Semitrough { scale: p("scale") },
    },
];

pub fn registry() -> impl Iterator<Item = &'static dyn Fixture> {
    REGISTRY.iter().map(|e| e as &dyn Fixture)
}

pub fn lookup(name: &str) -> Result<&'static dyn Fixture> {
    registry().find(|f| f.name() == name).ok_or_else(|| GeomError::InvalidParameter(format!("unknown fixture '{name}'")))
}

/// Entire minimal graphs in `Nil₃(τ)` with a closed-form dual.
pub fn entire_minimal_catalog(tau: f64) -> Vec<FixtureSpec> {
    [
        FixtureId::Umbrella,
        FixtureId::AffinePlane { a: 0.4, b: -0.3, c: 1.0 },
        FixtureId::Saddle,
        FixtureId::InvariantTheta { theta: 0.6 },
        FixtureId::InvariantTheta { theta: -1.2 },
    ]
    .into_iter()
    .map(|id| FixtureSpec { id, tau })
    .collect()
}

/// Entire spacelike CMC-τ graphs in `L³`.
pub fn entire_spacelike_catalog(tau: f64) -> Vec<FixtureSpec> {
    [
        FixtureId::Hyperboloid { p: 0.0, q: 0.0 },
        FixtureId::HyperbolicCylinder,
        FixtureId::InvariantThetaDual { theta: 0.6 },
        FixtureId::ParabolicRotated { a: 0.8 },
        FixtureId::HanoNomizu { family: 1, a: 1.0 },
        FixtureId::HanoNomizu { family: 3, a: 0.0 },
    ]
    .into_iter()
    .map(|id| FixtureSpec { id, tau })
    .collect()
}

#[cfg(test)]
mod tests;
