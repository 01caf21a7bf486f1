use super::*;
use crate::duality::{verify_pair, DualPair};
use crate::patch::{brioschi_curvature, geometry_at};

fn graph(id: FixtureId, tau: f64) -> GraphSurface {
    FixtureSpec::new(id, tau).unwrap().surface(None).unwrap().into_graph().unwrap()
}

#[test]
fn every_graph_fixture_is_cmc() {
    for tau in [0.5, 1.3] {
        let mut specs = entire_minimal_catalog(tau);
        specs.extend(entire_spacelike_catalog(tau));
        specs.push(FixtureSpec { id: FixtureId::Catenoid { e: 0.8 }, tau });
        specs.push(FixtureSpec { id: FixtureId::HanoNomizu { family: 2, a: 1.0 }, tau });
        for spec in specs {
            let g = spec.surface(None).unwrap().into_graph().unwrap();
            for (x, y) in g.window.lattice(9) {
                let r = g.cmc_residual(x, y).unwrap();
                assert!(r.abs() < 1e-10, "{spec:?} at ({x}, {y}): {r}");
            }
        }
    }
}

#[test]
fn patch_fixtures_have_their_mean_curvature() {
    for spec in [
        FixtureSpec { id: FixtureId::Helicoid { a: 0.7 }, tau: 0.5 },
        FixtureSpec { id: FixtureId::Semitrough { scale: 1.5 }, tau: 0.0 },
    ] {
        let p = spec.surface(None).unwrap().as_patch();
        for (s, t) in p.domain().shrink(0.05).unwrap().lattice(7) {
            let g = geometry_at(p.as_ref(), s, t).unwrap();
            assert!((g.mean_curvature.abs() - spec.target_mean_curvature()).abs() < 1e-9, "{spec:?}: {}", g.mean_curvature);
        }
    }
}

#[test]
fn gauss_curvature_matches_intrinsic_oracle() {
    let tau = 0.5;
    let mut specs = entire_minimal_catalog(tau);
    specs.extend(entire_spacelike_catalog(tau));
    specs.push(FixtureSpec { id: FixtureId::Catenoid { e: 0.8 }, tau });
    for spec in specs {
        let s = spec.surface(None).unwrap();
        let p = s.as_patch();
        let g = s.graph().unwrap();
        for (x, y) in g.window.shrink(0.1).unwrap().lattice(5) {
            let k = g.shape_data(x, y).unwrap().gauss_curvature;
            let kb = brioschi_curvature(p.as_ref(), x, y, 1e-2).unwrap();
            assert!((k - kb).abs() < 1e-6 * (1.0 + k.abs()), "{spec:?} at ({x}, {y}): {k} vs {kb}");
        }
    }
}

#[test]
fn invariant_theta_angle_function() {
    let tau = 0.8;
    for theta in [0.0, 0.6, -1.4] {
        let g = graph(FixtureId::InvariantTheta { theta }, tau);
        for (x, y) in g.window.lattice(5) {
            let nu = g.frame_data(x, y).unwrap().nu;
            let want = 1.0 / (theta.cosh() * (1.0 + 4.0 * tau * tau * x * x).sqrt());
            assert!((nu - want).abs() < 1e-14);
            let k = g.shape_data(x, y).unwrap().gauss_curvature;
            assert!((k + 4.0 * tau * tau * theta.cosh().powi(2) * nu.powi(4)).abs() < 1e-10);
        }
    }
}

#[test]
fn umbrella_curvature_angle_relation() {
    let tau = 0.7;
    let g = graph(FixtureId::Umbrella, tau);
    for (x, y) in g.window.lattice(9) {
        let nu = g.frame_data(x, y).unwrap().nu;
        let k = g.shape_data(x, y).unwrap().gauss_curvature;
        assert!((k + tau * tau * nu.powi(4) + 2.0 * tau * tau * nu * nu).abs() < 1e-10);
    }
}

#[test]
fn catenoid_curvature_and_angle() {
    let (e, tau) = (0.8, 0.6);
    let g = graph(FixtureId::Catenoid { e }, tau);
    let c = Catenoid::new(e, tau, 5.0).unwrap();
    for (x, y) in g.window.lattice(7) {
        let r = x.hypot(y);
        let fr = g.frame_data(x, y).unwrap();
        let k = g.shape_data(x, y).unwrap().gauss_curvature;
        assert!((fr.nu - c.expected_nu(r)).abs() < 1e-7, "{} vs {}", fr.nu, c.expected_nu(r));
        assert!((k - c.expected_curvature(r)).abs() < 1e-7, "{k} vs {}", c.expected_curvature(r));
    }
    assert!(FixtureSpec::new(FixtureId::Catenoid { e }, tau).unwrap().surface(Some(Window::square(1.0))).is_err());
}

#[test]
fn helicoid_axis_curvature_changes_sign() {
    let tau = 0.5;
    let critical = 1.0 / (2.0 * tau);
    let mut signs = vec![];
    for a in [0.6 * critical, critical, 1.7 * critical] {
        let s = FixtureSpec::new(FixtureId::Helicoid { a }, tau).unwrap().surface(None).unwrap();
        let p = s.as_patch();
        let want = (2.0 * a * tau - 1.0) / (a * a);
        let k = geometry_at(p.as_ref(), 0.0, 0.3).unwrap().gauss_curvature;
        let kb = brioschi_curvature(p.as_ref(), 0.0, 0.3, 1e-2).unwrap();
        assert!((k - want).abs() < 1e-9, "{k} vs {want}");
        assert!((kb - want).abs() < 1e-6, "{kb} vs {want}");
        signs.push(want.signum() * (want.abs() > 1e-12) as i32 as f64);
    }
    assert_eq!(signs, vec![-1.0, 0.0, 1.0]);
}

#[test]
fn helicoid_is_conformal_everywhere() {
    let s = FixtureSpec::new(FixtureId::Helicoid { a: 1.4 }, 0.5).unwrap().surface(None).unwrap();
    let p = s.as_patch();
    for (u, v) in p.domain().lattice(9) {
        assert!(geometry_at(p.as_ref(), u, v).unwrap().conformality_residual() < 1e-8);
    }
}

#[test]
fn closed_form_duals_satisfy_the_twin_relations() {
    let tau = 0.5;
    for spec in entire_minimal_catalog(tau) {
        let d = spec.dual().unwrap();
        assert_eq!(d.dual().map(|x| x.id.side()), Some(Side::Riemannian));
        let pair = DualPair::from_surfaces(graph(spec.id, tau), graph(d.id, tau)).unwrap();
        let rep = verify_pair(&pair, &pair.window().lattice(11));
        assert!(rep.passes(1e-12), "{spec:?}: {rep:?}");
    }
}

#[test]
fn hano_nomizu_three_is_the_hyperboloid() {
    let tau = 0.7;
    let a = graph(FixtureId::HanoNomizu { family: 3, a: 0.0 }, tau);
    let b = graph(FixtureId::Hyperboloid { p: 0.0, q: 0.0 }, tau);
    for (x, y) in a.window.lattice(7) {
        let (p, q) = (a.raw_jet(x, y).unwrap(), b.raw_jet(x, y).unwrap());
        assert!((p.u - q.u).abs() < 1e-12 && (p.uyy - q.uyy).abs() < 1e-10);
    }
}

#[test]
fn family_two_rejects_the_null_ray() {
    let spec = FixtureSpec::new(FixtureId::HanoNomizu { family: 2, a: 1.0 }, 0.5).unwrap();
    assert!(matches!(spec.surface(Some(Window::square(2.0))), Err(GeomError::UnsupportedWindow(_))));
    assert!(!spec.is_entire());
}

#[test]
fn registry_round_trip() {
    let names: Vec<_> = registry().map(|f| f.name()).collect();
    assert_eq!(names.len(), 12);
    for f in registry() {
        let spec = f.make(0.5, &BTreeMap::new());
        let spec = match f.name() {
            "semitrough" => f.make(0.0, &BTreeMap::new()),
            _ => spec,
        }
        .unwrap();
        assert_eq!(spec.id.name(), f.name());
        assert_eq!(spec.side(), f.side());
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<FixtureSpec>(&json).unwrap(), spec);
    }
    let bad = BTreeMap::from([("zeta".to_string(), 1.0)]);
    assert!(lookup("saddle").unwrap().make(0.5, &bad).is_err());
    assert!(lookup("nope").is_err());
}
