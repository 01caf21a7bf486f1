use proptest::prelude::*;

use cmc_duality::differential::{canonical_coefficients, identity_residuals, Triple};
use cmc_duality::duality::{dualize, verify_pair, DualPair, DualizeOptions, PathOrder};
use cmc_duality::fixtures::{FixtureId, FixtureSpec};
use cmc_duality::graph::{GraphSurface, Window};
use cmc_duality::isometry::{Generator, LorentzIsometry};
use cmc_duality::orbit::{act_and_regraph, RegraphOptions};
use cmc_duality::patch::{geometry_at, q_ds};
use cmc_duality::space::Side;

fn graph(id: FixtureId, tau: f64, w: Window) -> GraphSurface {
    FixtureSpec::new(id, tau).unwrap().surface(Some(w)).unwrap().into_graph().unwrap()
}

fn closed_pair(id: FixtureId, tau: f64, w: Window) -> DualPair {
    let d = FixtureSpec::new(id, tau).unwrap().dual().unwrap();
    DualPair::from_surfaces(graph(id, tau, w), graph(d.id, tau, w)).unwrap()
}

fn max_offset_error(a: &GraphSurface, b: &GraphSurface, w: &Window) -> f64 {
    let pts = w.lattice(15);
    let c = a.value_at(pts[0].0, pts[0].1).unwrap() - b.value_at(pts[0].0, pts[0].1).unwrap();
    pts.iter().map(|&(x, y)| (a.value_at(x, y).unwrap() - b.value_at(x, y).unwrap() - c).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariant_pairs_satisfy_the_twin_relations(theta in -1.5..1.5f64, tau in 0.2..1.5f64) {
        let w = Window::square(2.0);
        let pair = closed_pair(FixtureId::InvariantTheta { theta }, tau, w);
        let rep = verify_pair(&pair, &w.lattice(9));
        prop_assert!(rep.max_residual() < 1e-10, "{:?}", rep);
        for (x, y) in w.lattice(5) {
            let g = pair.riemannian.geometry(x, y).unwrap();
            let nu = 1.0 / (theta.cosh() * (1.0 + 4.0 * tau * tau * x * x).sqrt());
            prop_assert!((g.frame.nu - nu).abs() < 1e-10);
            let k = -4.0 * tau * tau * theta.cosh().powi(2) * nu.powi(4);
            prop_assert!((g.shape.gauss_curvature - k).abs() < 1e-10);
        }
    }

    #[test]
    fn duality_identity_on_closed_pairs(theta in -1.5..1.5f64, a in -1.0..1.0f64, b in -1.0..1.0f64, x in -2.0..2.0f64, y in -2.0..2.0f64) {
        let w = Window::square(2.0);
        for id in [FixtureId::InvariantTheta { theta }, FixtureId::AffinePlane { a, b, c: 0.0 }] {
            let r = identity_residuals(&closed_pair(id, 0.5, w), x, y).unwrap();
            prop_assert!(r.duality < 1e-12 && r.hessian.unwrap() < 1e-12, "{:?} {:?}", id, r);
        }
    }

    #[test]
    fn helicoid_differential_is_constant_in_its_chart(a in 0.4..3.0f64, tau in 0.2..1.0f64) {
        let p = FixtureSpec::new(FixtureId::Helicoid { a }, tau)
            .unwrap()
            .surface(Some(Window::new(-0.3, 0.3, -3.0, 3.0).unwrap()))
            .unwrap()
            .as_patch();
        let co = canonical_coefficients(Triple::new(0.0, tau, 0.0), Side::Riemannian);
        let q0 = q_ds(&p.space(), &geometry_at(p.as_ref(), 0.0, 0.0).unwrap(), co);
        for (s, t) in p.domain().lattice(7) {
            let q = q_ds(&p.space(), &geometry_at(p.as_ref(), s, t).unwrap(), co);
            prop_assert!((q - q0).norm() < 1e-8, "{} vs {} at ({}, {})", q, q0, s, t);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn round_trip_recovers_the_input(theta in -1.0..1.0f64, a in -0.5..0.5f64) {
        let w = Window::square(1.0);
        for id in [FixtureId::InvariantTheta { theta }, FixtureId::AffinePlane { a, b: -a, c: 0.2 }] {
            let u = graph(id, 0.5, w);
            let pair = dualize(&u, (0.0, 0.0), 0.0, &DualizeOptions::new(0.02)).unwrap();
            let back = dualize(pair.dual(), (0.0, 0.0), 0.0, &DualizeOptions::new(0.02)).unwrap();
            let err = max_offset_error(back.dual(), &u, &back.dual().evaluation_window());
            prop_assert!(err < 1e-7, "{:?}: {}", id, err);
        }
    }

    #[test]
    fn integration_paths_agree(theta in -1.0..1.0f64) {
        let u = graph(FixtureId::InvariantTheta { theta }, 0.5, Window::square(1.0));
        let opts = DualizeOptions::new(0.02);
        let a = dualize(&u, (0.0, 0.0), 0.0, &opts.order(PathOrder::YFirst)).unwrap();
        let b = dualize(&u, (0.0, 0.0), 0.0, &opts.order(PathOrder::XFirst)).unwrap();
        let (ga, gb) = (a.dual().grid().unwrap(), b.dual().grid().unwrap());
        let d = ga.values.iter().zip(&gb.values).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        prop_assert!(d < 1e-8, "{}", d);
    }

    #[test]
    fn regraphing_keeps_the_surface_cmc(theta in -0.6..0.6f64, a in -0.5..0.5f64) {
        let v = graph(FixtureId::Hyperboloid { p: 0.0, q: 0.0 }, 0.5, Window::square(4.0));
        let s = LorentzIsometry::generator(Generator::Parabolic(a)).compose(&LorentzIsometry::generator(Generator::Hyperbolic(theta)));
        let img = act_and_regraph(&s, &v, &Window::square(1.5), 0.05, &RegraphOptions::default()).unwrap();
        let w = img.surface.evaluation_window();
        let worst = w.lattice(9).iter().map(|&(x, y)| img.surface.cmc_residual(x, y).unwrap().abs()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-6, "{}", worst);
    }
}
