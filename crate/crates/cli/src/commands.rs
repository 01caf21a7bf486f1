use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use cmc_duality::analysis::{
    curvature_bounds, hessian_bounds, proof_chain_check, sff_norm_check, stability_convergence, BoundReport,
};
use cmc_duality::differential::{canonical_coefficients, evaluate_q, identity_residuals, IdentityResiduals, QPath, Triple};
use cmc_duality::duality::{dualize, verify_pair, DualPair, DualizeOptions, DEFAULT_LOOP_TOLERANCE};
use cmc_duality::fixtures::{self, entire_minimal_catalog, entire_spacelike_catalog, FixtureId, FixtureSpec, FixtureSurface};
use cmc_duality::graph::{GraphSurface, Window};
use cmc_duality::grid::GridData;
use cmc_duality::isometry::GElement;
use cmc_duality::orbit::{orbit_member, OrbitOptions};
use cmc_duality::patch::geometry_at;
use cmc_duality::space::Side;
use cmc_duality::suites::{self, SuiteConfig};
use cmc_duality::GeomError;

use crate::spec::{key, CommandSpec, Key, UsageError, PARAM};

#[derive(Debug)]
pub enum Failure {
    Usage(UsageError),
    /// A verification ran and did not pass.
    Verification(String),
    Runtime(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Verification(_) | Failure::Runtime(_) => 1,
        }
    }
}

/// Precondition failures become usage errors against `k`; anything else
/// is a runtime failure.
fn at(k: &'static str) -> impl Fn(GeomError) -> Failure {
    move |e| match e {
        GeomError::InvalidParameter(_)
        | GeomError::UnsupportedWindow(_)
        | GeomError::NotAGraph(_)
        | GeomError::DomainViolation { .. }
        | GeomError::OutOfWindow { .. } => {
            let m = e.to_string();
            Failure::Usage(UsageError::new(if m.contains("basepoint") { "base" } else { k }, m))
        }
        other => runtime(other),
    }
}

fn runtime(e: GeomError) -> Failure {
    Failure::Runtime(e.to_string())
}

fn io(e: std::io::Error) -> Failure {
    Failure::Runtime(format!("i/o error: {e}"))
}

pub trait Command: Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn keys(&self) -> &'static [Key];
    /// Key filled by the first positional argument.
    fn positional(&self) -> Option<&'static str> {
        None
    }
    fn run(&self, spec: &CommandSpec) -> Result<(), Failure>;
}

pub fn registry() -> &'static [&'static dyn Command] {
    &[&Fixtures, &Dualize, &Differential, &Orbit, &Verify, &Report]
}

#[derive(Serialize)]
struct Manifest<'a, T: Serialize> {
    command: &'a CommandSpec,
    result: T,
}

fn write_manifest<T: Serialize>(dir: &Path, spec: &CommandSpec, result: T) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(io)?;
    let text = serde_json::to_string_pretty(&Manifest { command: spec, result }).map_err(|e| Failure::Runtime(e.to_string()))?;
    fs::write(dir.join("manifest.json"), text + "\n").map_err(io)
}

fn write_points(path: &Path, rows: &[(f64, f64, f64)]) -> Result<(), Failure> {
    let mut s = String::from("x,y,value\n");
    for (x, y, v) in rows {
        let _ = writeln!(s, "{x:.16e},{y:.16e},{v:.16e}");
    }
    fs::write(path, s).map_err(io)
}

fn fixture_spec(spec: &CommandSpec) -> Result<FixtureSpec, Failure> {
    let f = fixtures::lookup(spec.str("fixture")?).map_err(at("fixture"))?;
    for k in spec.fixture_params.keys() {
        if !f.params().iter().any(|(n, _)| n == k) {
            return Err(UsageError::new(PARAM, format!("{} takes no parameter '{k}'", f.name())).into());
        }
    }
    let tau = spec.f64("tau")?;
    f.make(tau, &spec.fixture_params).map_err(|e| {
        let k = if e.to_string().contains('τ') { "tau" } else { PARAM };
        UsageError::new(k, e.to_string()).into()
    })
}

fn fixture_surface(spec: &CommandSpec, fx: &FixtureSpec) -> Result<FixtureSurface, Failure> {
    fx.surface(spec.opt_window("window")?).map_err(at("window"))
}

fn fixture_graph(spec: &CommandSpec, fx: &FixtureSpec) -> Result<GraphSurface, Failure> {
    fixture_surface(spec, fx)?.into_graph().map_err(at("fixture"))
}

/// Evaluates `f` at every node of the `h`-lattice on `w`, rows in parallel.
fn sample_grid(w: &Window, h: f64, f: impl Fn(f64, f64) -> cmc_duality::Result<f64> + Sync) -> Result<GridData, Failure> {
    let mut g = GridData::zeros(w, h).map_err(at("h"))?;
    let (nx, ny) = (g.nx, g.ny);
    let rows: Vec<cmc_duality::Result<Vec<f64>>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            (0..nx)
                .map(|i| {
                    let (x, y) = g.node(i, j);
                    f(x, y)
                })
                .collect()
        })
        .collect();
    for (j, row) in rows.into_iter().enumerate() {
        for (i, v) in row.map_err(runtime)?.into_iter().enumerate() {
            g.set(i, j, v);
        }
    }
    Ok(g)
}

const FIXTURE_KEYS: &[Key] = &[
    key("action", None, "list or eval"),
    key("fixture", None, "fixture name (see `fixtures list`)"),
    key("tau", Some("0.5"), "bundle curvature τ"),
    key(PARAM, None, "fixture parameter name=value, repeatable"),
    key("window", None, "half-width r or x0,x1,y0,y1; defaults to the fixture's window"),
    key("h", Some("0.05"), "lattice spacing"),
    key("quantity", Some("auto"), "value, nu, gauss or cmc for graphs; gauss or conformality for patches"),
    key("out", None, "output directory"),
];

struct Fixtures;

impl Fixtures {
    fn list(&self, spec: &CommandSpec) -> Result<(), Failure> {
        let mut rows = vec![];
        for f in fixtures::registry() {
            let params: Vec<String> = f.params().iter().map(|(n, d)| format!("{n}={d}")).collect();
            let side = match f.side() {
                Side::Riemannian => "riemannian",
                Side::Lorentzian => "lorentzian",
            };
            println!("{:<22} {:<11} {:<18} {}", f.name(), side, params.join(","), f.summary());
            rows.push(json!({"name": f.name(), "side": side, "params": f.params(), "summary": f.summary()}));
        }
        if spec.has("out") {
            write_manifest(&spec.path("out")?, spec, rows)?;
        }
        Ok(())
    }

    fn eval(&self, spec: &CommandSpec) -> Result<(), Failure> {
        let fx = fixture_spec(spec)?;
        let h = spec.positive("h")?;
        let out = spec.path("out")?;
        let quantity = spec.str("quantity")?;
        let stem = fx.id.name();
        fs::create_dir_all(&out).map_err(io)?;
        let result = match fixture_surface(spec, &fx)? {
            FixtureSurface::Graph(s) => {
                let q = if quantity == "auto" { "value" } else { quantity };
                let w = s.evaluation_window();
                let g = match q {
                    "value" => sample_grid(&w, h, |x, y| s.value_at(x, y))?,
                    "nu" => sample_grid(&w, h, |x, y| s.frame_data(x, y).map(|f| f.nu))?,
                    "gauss" => sample_grid(&w, h, |x, y| s.shape_data(x, y).map(|d| d.gauss_curvature))?,
                    "cmc" => sample_grid(&w, h, |x, y| s.cmc_residual(x, y))?,
                    _ => return Err(UsageError::new("quantity", format!("'{q}' is not one of value, nu, gauss, cmc")).into()),
                };
                if q == "value" {
                    g.write(&out, stem, &s.space, Some(s.target_mean_curvature)).map_err(runtime)?;
                } else {
                    fs::write(out.join(format!("{stem}.csv")), g.to_csv("x,y,value")).map_err(io)?;
                }
                let cmc =
                    w.lattice(21).iter().filter_map(|&(x, y)| s.cmc_residual(x, y).ok()).fold(0.0f64, |m, r| m.max(r.abs()));
                json!({"fixture": fx.id, "kind": "graph", "quantity": q, "window": w, "nx": g.nx, "ny": g.ny, "max_cmc_residual": cmc})
            }
            FixtureSurface::Patch(p) => {
                let q = if quantity == "auto" { "gauss" } else { quantity };
                if q != "gauss" && q != "conformality" {
                    return Err(UsageError::new(
                        "quantity",
                        format!("'{q}' is not available on a patch; use gauss or conformality"),
                    )
                    .into());
                }
                let d = p.domain();
                let nx = ((d.x1 - d.x0) / h).round().max(1.0) as usize + 1;
                let ny = ((d.y1 - d.y0) / h).round().max(1.0) as usize + 1;
                let pts: Vec<(f64, f64)> = (0..ny)
                    .flat_map(|j| {
                        (0..nx).map(move |i| {
                            (d.x0 + (d.x1 - d.x0) * i as f64 / (nx - 1) as f64, d.y0 + (d.y1 - d.y0) * j as f64 / (ny - 1) as f64)
                        })
                    })
                    .collect();
                let rows = pts
                    .par_iter()
                    .map(|&(s, t)| {
                        let g = geometry_at(p.as_ref(), s, t)?;
                        Ok((s, t, if q == "gauss" { g.gauss_curvature } else { g.conformality_residual() }))
                    })
                    .collect::<cmc_duality::Result<Vec<_>>>()
                    .map_err(runtime)?;
                write_points(&out.join(format!("{stem}.csv")), &rows)?;
                json!({"fixture": fx.id, "kind": "patch", "quantity": q, "window": d, "nx": nx, "ny": ny})
            }
        };
        write_manifest(&out, spec, result)
    }
}

impl Command for Fixtures {
    fn name(&self) -> &'static str {
        "fixtures"
    }
    fn about(&self) -> &'static str {
        "list the fixture catalogue or sample one fixture"
    }
    fn keys(&self) -> &'static [Key] {
        FIXTURE_KEYS
    }
    fn positional(&self) -> Option<&'static str> {
        Some("action")
    }
    fn run(&self, spec: &CommandSpec) -> Result<(), Failure> {
        match spec.str("action")? {
            "list" => self.list(spec),
            "eval" => self.eval(spec),
            other => Err(UsageError::new("action", format!("'{other}' is not list or eval")).into()),
        }
    }
}

const DUALIZE_KEYS: &[Key] = &[
    key("fixture", None, "source fixture"),
    key("input", None, "source grid CSV; its sidecar is the .json of the same stem"),
    key("tau", Some("0.5"), "bundle curvature τ"),
    key(PARAM, None, "fixture parameter name=value, repeatable"),
    key("window", None, "source window for a fixture"),
    key("h", Some("0.05"), "lattice spacing of the dual"),
    key("base", Some("0,0"), "basepoint x,y"),
    key("norm", Some("0"), "value of the dual at the basepoint"),
    key("output-window", None, "dual lattice; defaults to the source's evaluation window"),
    key("loop-tolerance", None, "largest accepted loop residual"),
    key("out", None, "output directory"),
];

fn source_surface(spec: &CommandSpec) -> Result<GraphSurface, Failure> {
    match (spec.has("fixture"), spec.has("input")) {
        (true, true) => Err(UsageError::new("input", "give either fixture or input, not both").into()),
        (false, false) => Err(UsageError::new("fixture", "a fixture or an input grid is required").into()),
        (true, false) => fixture_graph(spec, &fixture_spec(spec)?),
        (false, true) => {
            let csv = spec.path("input")?;
            let (grid, meta) =
                GridData::read(&csv, &csv.with_extension("json")).map_err(|e| UsageError::new("input", e.to_string()))?;
            let space = cmc_duality::space::SpaceParams::new(meta.side, meta.kappa, meta.bundle).map_err(at("input"))?;
            let target = meta.target_mean_curvature.unwrap_or(0.0);
            GraphSurface::from_grid(space, target, grid).map_err(at("input"))
        }
    }
}

fn dualize_options(spec: &CommandSpec) -> Result<DualizeOptions, Failure> {
    let mut o = DualizeOptions::new(spec.positive("h")?);
    if spec.has("loop-tolerance") {
        o = o.loop_tolerance(spec.positive("loop-tolerance")?);
    }
    if let Some(w) = spec.opt_window("output-window")? {
        o = o.window(w);
    }
    Ok(o)
}

fn window_key(spec: &CommandSpec) -> &'static str {
    if spec.has("output-window") {
        "output-window"
    } else {
        "window"
    }
}

struct Dualize;

impl Command for Dualize {
    fn name(&self) -> &'static str {
        "dualize"
    }
    fn about(&self) -> &'static str {
        "integrate the twin relations of a graph into its dual"
    }
    fn keys(&self) -> &'static [Key] {
        DUALIZE_KEYS
    }
    fn run(&self, spec: &CommandSpec) -> Result<(), Failure> {
        let out = spec.path("out")?;
        let src = source_surface(spec)?;
        let opts = dualize_options(spec)?;
        let base = spec.point("base")?;
        let norm = spec.f64("norm")?;
        let pair = dualize(&src, base, norm, &opts).map_err(at(window_key(spec)))?;
        fs::create_dir_all(&out).map_err(io)?;
        pair.export(&out).map_err(runtime)?;
        let samples = pair.common_window().map_err(runtime)?.lattice(21);
        let report = verify_pair(&pair, &samples);
        let dual = match pair.source_side.other() {
            Side::Riemannian => "riemannian",
            Side::Lorentzian => "lorentzian",
        };
        println!("dual written to {}", out.join(format!("{dual}.csv")).display());
        println!("loop residual {:.3e}, pair residual {:.3e}", pair.loop_residual.unwrap_or(0.0), report.max_residual());
        write_manifest(&out, spec, json!({"dual": dual, "pair": pair.manifest(), "verification": report}))
    }
}

const DIFFERENTIAL_KEYS: &[Key] = &[
    key("fixture", None, "fixture name"),
    key("tau", Some("0.5"), "bundle curvature τ"),
    key(PARAM, None, "fixture parameter name=value, repeatable"),
    key("window", None, "fixture window"),
    key("h", Some("0.05"), "lattice spacing when the dual has to be integrated"),
    key("base", None, "basepoint of the integrated dual; defaults to the lower-left node"),
    key("norm", Some("0"), "value of the integrated dual at the basepoint"),
    key("samples", Some("21"), "sample points per side"),
    key("out", None, "output directory"),
];

struct Differential;

impl Command for Differential {
    fn name(&self) -> &'static str {
        "differential"
    }
    fn about(&self) -> &'static str {
        "evaluate the quadratic differentials of a fixture and its dual"
    }
    fn keys(&self) -> &'static [Key] {
        DIFFERENTIAL_KEYS
    }
    fn run(&self, spec: &CommandSpec) -> Result<(), Failure> {
        let out = spec.path("out")?;
        let n = spec.u64("samples")? as usize;
        if n < 2 {
            return Err(UsageError::new("samples", "need at least 2").into());
        }
        let fx = fixture_spec(spec)?;
        let src = fixture_graph(spec, &fx)?;
        let (pair, kind) = match fx.dual() {
            Some(d) => {
                let other = d.surface(Some(src.window)).map_err(at("window"))?.into_graph().map_err(runtime)?;
                let (r, l) = if fx.side() == Side::Riemannian { (src.clone(), other) } else { (other, src.clone()) };
                (DualPair::from_surfaces(r, l).map_err(runtime)?, "closed-form")
            }
            None => {
                let opts = DualizeOptions::new(spec.positive("h")?);
                let w = src.evaluation_window();
                let base = if spec.has("base") { spec.point("base")? } else { (w.x0, w.y0) };
                (dualize(&src, base, spec.f64("norm")?, &opts).map_err(at("window"))?, "grid")
            }
        };
        let pts = pair.common_window().map_err(runtime)?.lattice(n);
        let coeffs = canonical_coefficients(Triple::of(&src), src.side());
        let rows = pts
            .par_iter()
            .map(|&(x, y)| {
                let q = evaluate_q(&src, coeffs, x, y, QPath::General)?;
                Ok((x, y, q.max_norm(), identity_residuals(&pair, x, y)?))
            })
            .collect::<cmc_duality::Result<Vec<_>>>()
            .map_err(runtime)?;
        fs::create_dir_all(&out).map_err(io)?;
        let q: Vec<_> = rows.iter().map(|r| (r.0, r.1, r.2)).collect();
        let dual: Vec<_> = rows.iter().map(|r| (r.0, r.1, r.3.duality)).collect();
        write_points(&out.join("q.csv"), &q)?;
        write_points(&out.join("duality_residual.csv"), &dual)?;
        let max = |f: fn(&IdentityResiduals) -> Option<f64>| rows.iter().filter_map(|r| f(&r.3)).reduce(f64::max);
        let hess = max(|r| r.hessian);
        if hess.is_some() {
            let h: Vec<_> = rows.iter().map(|r| (r.0, r.1, r.3.hessian.unwrap_or(f64::NAN))).collect();
            write_points(&out.join("hessian_residual.csv"), &h)?;
        }
        let duality = max(|r| Some(r.duality));
        println!("dual from {kind}; max duality residual {:.3e}", duality.unwrap_or(0.0));
        write_manifest(
            &out,
            spec,
            json!({
                "dual": kind,
                "samples": rows.len(),
                "max_duality_residual": duality,
                "max_hessian_residual": hess,
                "max_modulus_residual": max(|r| r.modulus),
            }),
        )
    }
}

const ORBIT_KEYS: &[Key] = &[
    key("fixture", Some("saddle"), "entire minimal graph in Nil₃"),
    key("tau", Some("0.5"), "bundle curvature τ"),
    key(PARAM, None, "fixture parameter name=value, repeatable"),
    key("window", Some("6"), "source window"),
    key("h", Some("0.05"), "lattice spacing"),
    key("theta", Some("0"), "hyperbolic parameter θ"),
    key("a", Some("0"), "parabolic parameter a"),
    key("base", Some("0,0"), "basepoint x,y"),
    key("norm", None, "dual value at the basepoint; defaults to the closed-form dual's"),
    key("target", None, "requested window of the transformed dual"),
    key("loop-tolerance", None, "largest accepted loop residual"),
    key("out", None, "output directory"),
];

struct Orbit;

impl Command for Orbit {
    fn name(&self) -> &'static str {
        "orbit"
    }
    fn about(&self) -> &'static str {
        "move the dual by a boost and null rotation, then dualize back"
    }
    fn keys(&self) -> &'static [Key] {
        ORBIT_KEYS
    }
    fn run(&self, spec: &CommandSpec) -> Result<(), Failure> {
        let out = spec.path("out")?;
        let fx = fixture_spec(spec)?;
        let base = spec.point("base")?;
        let g = GElement { theta: spec.f64("theta")?, a: spec.f64("a")? };
        let mut opts = OrbitOptions::new(spec.positive("h")?);
        opts.target_window = spec.opt_window("target")?;
        opts.loop_tolerance = if spec.has("loop-tolerance") { spec.positive("loop-tolerance")? } else { DEFAULT_LOOP_TOLERANCE };
        let norm = if spec.has("norm") {
            spec.f64("norm")?
        } else {
            let d = fx
                .dual()
                .ok_or_else(|| UsageError::new("norm", format!("{} has no closed-form dual; give norm", fx.id.name())))?;
            let w = Window::new(base.0 - 1.0, base.0 + 1.0, base.1 - 1.0, base.1 + 1.0).map_err(at("base"))?;
            let s = d.surface(Some(w)).map_err(at("base"))?.into_graph().map_err(at("base"))?;
            s.value_at(base.0, base.1).map_err(at("base"))?
        };
        let u = fixture_graph(spec, &fx)?;
        if fx.side() != Side::Riemannian {
            return Err(UsageError::new("fixture", "orbits start from a minimal graph in Nil₃").into());
        }
        let m = orbit_member(&u, &g.isometry(), base, norm, &opts).map_err(at("target"))?;
        m.export(&out, "orbit").map_err(runtime)?;
        let man = m.manifest();
        println!(
            "orbit member on {} (shrink factor {:.4}), max cmc residual {:.3e}",
            man.window, man.shrink_factor, man.max_cmc_residual
        );
        write_manifest(&out, spec, json!({"normalization": norm, "orbit": man}))
    }
}

const VERIFY_KEYS: &[Key] = &[
    key("suite", Some("all"), "suite name or all"),
    key("tau", Some("0.5"), "bundle curvature τ"),
    key("h", Some("0.05"), "lattice spacing for grid-backed checks"),
    key("seed", Some("7"), "seed for random samples"),
    key("tolerance-scale", Some("1"), "multiplies every numeric tolerance"),
    key("out", None, "directory for the JSON report"),
];

struct Verify;

impl Command for Verify {
    fn name(&self) -> &'static str {
        "verify"
    }
    fn about(&self) -> &'static str {
        "run the invariant suites; exit 1 if any check fails"
    }
    fn keys(&self) -> &'static [Key] {
        VERIFY_KEYS
    }
    fn run(&self, spec: &CommandSpec) -> Result<(), Failure> {
        let selected = suites::select(spec.str("suite")?).map_err(at("suite"))?;
        let tau = spec.f64("tau")?;
        if tau == 0.0 {
            return Err(UsageError::new("tau", "the suites need τ ≠ 0").into());
        }
        let cfg = SuiteConfig { tau, h: spec.positive("h")?, seed: spec.u64("seed")? };
        let scale = spec.positive("tolerance-scale")?;
        let mut failed = 0;
        let mut results = vec![];
        for s in selected {
            match s.run(&cfg) {
                Ok(mut checks) => {
                    for c in checks.iter_mut().filter(|c| c.tolerance > 0.0) {
                        c.tolerance *= scale;
                        c.pass = c.value <= c.tolerance;
                    }
                    for c in &checks {
                        println!(
                            "[{}] {}/{}: {:.3e} (tol {:.1e})",
                            if c.pass { "PASS" } else { "FAIL" },
                            s.name(),
                            c.name,
                            c.value,
                            c.tolerance
                        );
                        failed += usize::from(!c.pass);
                    }
                    results.push(json!({"suite": s.name(), "checks": checks}));
                }
                Err(e) => {
                    println!("[FAIL] {}: {e}", s.name());
                    failed += 1;
                    results.push(json!({"suite": s.name(), "error": e.to_string()}));
                }
            }
        }
        if spec.has("out") {
            write_manifest(&spec.path("out")?, spec, json!({"failed": failed, "suites": results}))?;
        }
        if failed > 0 {
            return Err(Failure::Verification(format!("{failed} checks failed")));
        }
        println!("all checks passed");
        Ok(())
    }
}

const REPORT_KEYS: &[Key] = &[
    key("tau", Some("0.5"), "bundle curvature τ"),
    key("window", Some("3"), "sampling window"),
    key("samples", Some("41"), "sample points per side"),
    key("out", None, "directory for the JSON report"),
];

#[derive(Serialize)]
struct BoundSummary {
    fixture: String,
    bound: String,
    checked: bool,
    samples: usize,
    min_slack: f64,
    max_violation: f64,
    violations: usize,
}

impl BoundSummary {
    fn new(fixture: &str, r: &BoundReport) -> Self {
        Self {
            fixture: fixture.into(),
            bound: r.name.clone(),
            checked: r.status == cmc_duality::analysis::BoundStatus::Checked,
            samples: r.sample_count,
            min_slack: r.min_slack,
            max_violation: r.max_violation,
            violations: r.violations(),
        }
    }
}

struct Report;

impl Command for Report {
    fn name(&self) -> &'static str {
        "report"
    }
    fn about(&self) -> &'static str {
        "curvature estimates, proof chain and stability over the entire-graph catalogue"
    }
    fn keys(&self) -> &'static [Key] {
        REPORT_KEYS
    }
    fn run(&self, spec: &CommandSpec) -> Result<(), Failure> {
        let tau = spec.f64("tau")?;
        if tau == 0.0 {
            return Err(UsageError::new("tau", "the catalogue needs τ ≠ 0").into());
        }
        let w = spec.window("window")?;
        let n = spec.u64("samples")? as usize;
        if n < 2 {
            return Err(UsageError::new("samples", "need at least 2").into());
        }
        let pts = w.lattice(n);
        let tol = 1e-9;
        let mut bounds = vec![];
        let mut chains = vec![];
        for fx in entire_minimal_catalog(tau) {
            let name = fx.id.name();
            let u = fx.surface(Some(w)).map_err(at("window"))?.into_graph().map_err(runtime)?;
            bounds.push(BoundSummary::new(name, &curvature_bounds(&u, &pts, true, tol).map_err(runtime)?));
            if let Some(d) = fx.dual() {
                let v = d.surface(Some(w)).map_err(at("window"))?.into_graph().map_err(runtime)?;
                let pair = DualPair::from_surfaces(u, v).map_err(runtime)?;
                let hb = hessian_bounds(&pair, &pts, true, tol).map_err(runtime)?;
                bounds.push(BoundSummary::new(name, &hb.riemannian));
                bounds.push(BoundSummary::new(name, &hb.lorentzian));
                let c = proof_chain_check(&pair, &pts).map_err(runtime)?;
                chains.push(json!({
                    "fixture": name,
                    "max_equality_residual": c.max_equality_residual,
                    "min_gradient_slack": c.min_gradient_slack,
                    "min_curvature_slack": c.min_curvature_slack,
                }));
            }
        }
        for fx in entire_spacelike_catalog(tau) {
            let v = fx.surface(Some(w)).map_err(at("window"))?.into_graph().map_err(runtime)?;
            bounds.push(BoundSummary::new(fx.id.name(), &sff_norm_check(&v, &pts, true, tol).map_err(runtime)?));
        }
        let mut stability = vec![];
        for id in [FixtureId::Umbrella, FixtureId::Saddle] {
            let u = FixtureSpec::new(id, tau)
                .and_then(|f| f.surface(Some(Window::square(2.0))))
                .and_then(FixtureSurface::into_graph)
                .map_err(runtime)?;
            let st = stability_convergence(&u, &Window::square(1.0).lattice(5), [0.04, 0.02, 0.01]).map_err(runtime)?;
            stability.push(json!({"fixture": id.name(), "study": st}));
        }
        for b in &bounds {
            println!(
                "{:<22} {:<22} {:>6} samples, min slack {:+.3e}, {} violations{}",
                b.fixture,
                b.bound,
                b.samples,
                b.min_slack,
                b.violations,
                if b.checked { "" } else { " (not applicable)" }
            );
        }
        for s in &stability {
            println!(
                "stability order on {}: {:.3}",
                s["fixture"].as_str().unwrap_or(""),
                s["study"]["order"].as_f64().unwrap_or(f64::NAN)
            );
        }
        if spec.has("out") {
            write_manifest(&spec.path("out")?, spec, json!({"bounds": bounds, "proof_chain": chains, "stability": stability}))?;
        }
        Ok(())
    }
}
