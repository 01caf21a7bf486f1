use cmc_duality::fixtures::{FixtureId, FixtureSpec};
use cmc_duality::graph::{GraphSurface, Window};
use cmc_duality::isometry::{GElement, Generator, LorentzIsometry};
use cmc_duality::orbit::{orbit_member, OrbitOptions};

fn fixture(id: FixtureId, tau: f64, w: Window) -> GraphSurface {
    FixtureSpec::new(id, tau).unwrap().surface(Some(w)).unwrap().into_graph().unwrap()
}

fn max_node_error(s: &GraphSurface, want: &GraphSurface, inside: &Window) -> f64 {
    let g = s.grid().unwrap();
    let mut err = 0.0f64;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (x, y) = g.node(i, j);
            if inside.contains(x, y) {
                err = err.max((g.get(i, j) - want.value_at(x, y).unwrap()).abs());
            }
        }
    }
    err
}

#[test]
fn boosted_saddle_is_the_invariant_family() {
    let tau = 0.5;
    let saddle = fixture(FixtureId::Saddle, tau, Window::square(6.0));
    for theta in [0.3, -0.5] {
        let s = LorentzIsometry::generator(Generator::Hyperbolic(theta));
        let m = orbit_member(&saddle, &s, (0.0, 0.0), 1.0 / (2.0 * tau), &OrbitOptions::new(0.05)).unwrap();
        assert!(m.surface.window.contains_window(&Window::square(3.0)), "{}", m.surface.window);
        assert!((m.theta - theta).abs() < 1e-12 && m.a.abs() < 1e-12);
        let want = fixture(FixtureId::InvariantTheta { theta }, tau, Window::square(6.0));
        let err = max_node_error(&m.surface, &want, &Window::square(3.0));
        assert!(err < 1e-5, "θ = {theta}: {err}");
    }
}

#[test]
fn umbrella_orbit_is_degenerate() {
    let tau = 0.5;
    let umbrella = fixture(FixtureId::Umbrella, tau, Window::square(4.0));
    for (theta, a) in [(0.4, 0.0), (0.0, 0.7), (-0.3, -0.5)] {
        let s = GElement { theta, a }.isometry();
        let m = orbit_member(&umbrella, &s, (0.0, 0.0), 1.0 / tau, &OrbitOptions::new(0.05)).unwrap();
        let w = m.surface.evaluation_window();
        for (x, y) in w.lattice(9) {
            let nu = m.surface.frame_data(x, y).unwrap().nu;
            let want = 1.0 / (1.0 + tau * tau * (x * x + y * y)).sqrt();
            assert!((nu - want).abs() < 1e-6, "({theta}, {a}) at ({x}, {y}): {nu} vs {want}");
        }
    }
}

#[test]
fn saddle_orbit_separates_angles() {
    let tau = 0.5;
    let saddle = fixture(FixtureId::Saddle, tau, Window::square(4.0));
    let mut peaks = vec![];
    for theta in [0.0, 0.4, 0.8] {
        let s = LorentzIsometry::generator(Generator::Hyperbolic(theta));
        let m = orbit_member(&saddle, &s, (0.0, 0.0), 1.0 / (2.0 * tau), &OrbitOptions::new(0.05)).unwrap();
        let w = m.surface.evaluation_window();
        let mut peak = 0.0f64;
        for (x, y) in w.lattice(21) {
            peak = peak.max(m.surface.frame_data(x, y).unwrap().nu);
        }
        assert!((peak - 1.0 / theta.cosh()).abs() < 1e-6, "θ = {theta}: {peak}");
        peaks.push(peak);
    }
    assert!(peaks.windows(2).all(|p| p[0] - p[1] > 1e-2));
}
