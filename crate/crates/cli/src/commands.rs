//! The named checks. Each returns one [`Outcome`] per fixture.

use std::collections::BTreeMap;
use std::time::Instant;

use reebcalc::catalog::{build_fixture, load_fixture, Fixture, Value, FIXTURE_IDS};
use reebcalc::chains::{
    asymptotic_cycle_pairing, check_stokes, examples, integrate_form, legendrian_boundary_identity, theta_functional, Chain,
};
use reebcalc::contact::{check_contact, is_basic_form, tangential_sup};
use reebcalc::exterior::{FormField, PointwiseForm, Scaled};
use reebcalc::flow::{check_linear_growth, verify_lyapunov, GrowthOptions, LyapunovMode};
use reebcalc::hodge::{tables, TransversalHodge};
use reebcalc::spectral::{
    hard_lefschetz_check, harmonic_dimension, hodge_decompose, star_duality_check, GalerkinComplex, LaplacianKind,
    SpectralOptions,
};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::report::{Outcome, Report, Status};

type Res<T> = Result<T, CliError>;

/// Resolved settings with per-command defaults.
struct Run<'a> {
    cfg: &'a RunConfig,
    command: Command,
    report: Report,
    timings: Vec<(String, f64)>,
    attachments: Vec<(String, String)>,
    clock: Instant,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a RunConfig, command: Command, fixture: &str) -> Self {
        Run {
            cfg,
            command,
            report: Report::new(command.name(), fixture),
            timings: Vec::new(),
            attachments: Vec::new(),
            clock: Instant::now(),
        }
    }

    fn tol(&self) -> f64 {
        self.cfg.tol.unwrap_or(match self.command {
            Command::Star | Command::LefschetzDecompose => 1e-10,
            Command::Laplacian | Command::Integrate => 1e-7,
            Command::FlowGrowth | Command::Spectral => 1e-8,
            _ => 1e-9,
        })
    }

    fn samples(&self) -> usize {
        self.cfg.samples.unwrap_or(match self.command {
            Command::CheckContact | Command::Reeb | Command::BasicCheck => 1000,
            Command::Laplacian => 40,
            _ => 100,
        })
    }

    fn seed(&self) -> u64 {
        self.cfg.seed.unwrap_or(0)
    }

    fn phase(&mut self, name: &str) {
        self.timings.push((name.to_string(), self.clock.elapsed().as_secs_f64()));
        self.clock = Instant::now();
    }

    fn finish(mut self) -> Outcome {
        self.phase("finish");
        Outcome { report: self.report, timings: self.timings, attachments: self.attachments }
    }
}

/// Loads the configured fixture: inline fixture first, then the catalog id.
pub fn resolve_fixture(cfg: &RunConfig) -> Res<Fixture> {
    if let Some(spec) = &cfg.inline_fixture {
        return Ok(build_fixture(spec.clone())?);
    }
    let id = cfg.fixture.as_deref().ok_or_else(|| CliError::Input("no fixture given (use --fixture or a config file)".into()))?;
    Ok(load_fixture(id)?)
}

/// Runs the configured command.
pub fn run(cfg: &RunConfig) -> Res<Vec<Outcome>> {
    let command = cfg.command.ok_or_else(|| CliError::Input("no command given".into()))?;
    if command == Command::ReportAll {
        return report_all(cfg);
    }
    let fx = resolve_fixture(cfg)?;
    Ok(vec![run_one(cfg, command, &fx)?])
}

pub fn run_one(cfg: &RunConfig, command: Command, fx: &Fixture) -> Res<Outcome> {
    let mut run = Run::new(cfg, command, fx.id());
    run.phase("load");
    match command {
        Command::CheckContact => check_contact_cmd(&mut run, fx)?,
        Command::Reeb => reeb_cmd(&mut run, fx)?,
        Command::BasicCheck => basic_cmd(&mut run, fx)?,
        Command::Star => star_cmd(&mut run, fx)?,
        Command::Laplacian => laplacian_cmd(&mut run, fx)?,
        Command::LefschetzDecompose => lefschetz_cmd(&mut run, fx)?,
        Command::FlowGrowth => growth_cmd(&mut run, fx)?,
        Command::Integrate => integrate_cmd(&mut run, fx)?,
        Command::Spectral => spectral_cmd(&mut run, fx)?,
        Command::HardLefschetz => hard_lefschetz_cmd(&mut run, fx)?,
        Command::ReportAll => return Err(CliError::Input("report-all cannot be nested".into())),
    }
    Ok(run.finish())
}

/// Whether `report-all` runs `command` on `fx` with default inputs.
pub fn applicable(command: Command, fx: &Fixture) -> bool {
    match command {
        Command::Spectral | Command::HardLefschetz => fx.is_closed(),
        Command::FlowGrowth => default_tau(fx).is_ok(),
        Command::ReportAll => false,
        _ => true,
    }
}

/// Every applicable command over every catalog fixture. Fixtures run on
/// separate threads; the output order is fixed.
pub fn report_all(cfg: &RunConfig) -> Res<Vec<Outcome>> {
    let base = RunConfig {
        tol: cfg.tol,
        samples: cfg.samples,
        seed: cfg.seed,
        degree: cfg.degree,
        quad_order: cfg.quad_order,
        gap_threshold: cfg.gap_threshold,
        out: cfg.out.clone(),
        ..Default::default()
    };
    let results: Vec<Res<Vec<Outcome>>> = std::thread::scope(|s| {
        let handles: Vec<_> = FIXTURE_IDS
            .iter()
            .map(|id| {
                let base = &base;
                s.spawn(move || -> Res<Vec<Outcome>> {
                    let fx = load_fixture(id)?;
                    let mut out = Vec::new();
                    for c in Command::CHECKS {
                        if !applicable(c, &fx) {
                            continue;
                        }
                        out.push(run_one(base, c, &fx).unwrap_or_else(|e| failed_run(c, id, &e)));
                    }
                    Ok(out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("fixture thread panicked")).collect()
    });
    let mut all = Vec::new();
    for r in results {
        all.extend(r?);
    }
    Ok(all)
}

fn failed_run(c: Command, id: &str, e: &CliError) -> Outcome {
    let mut report = Report::new(c.name(), id);
    report.verdict("run", Status::Inconclusive, None, None, &e.to_string());
    Outcome { report, timings: Vec::new(), attachments: Vec::new() }
}

// ---------------------------------------------------------------------------
// Helpers.

fn parse_form(fx: &Fixture, comps: &BTreeMap<String, String>) -> Res<FormField> {
    let pairs: Vec<(&str, &str)> = comps.iter().map(|(b, e)| (b.as_str(), e.as_str())).collect();
    Ok(FormField::parse(&pairs, fx.ctx.coords())?)
}

fn input_form(run: &Run, fx: &Fixture) -> Res<Option<FormField>> {
    run.cfg.form.as_ref().map(|c| parse_form(fx, c)).transpose()
}

fn sup<F: PointwiseForm>(fx: &Fixture, f: &F, pts: &[Vec<f64>]) -> f64 {
    pts.iter().map(|p| tangential_sup(&fx.ctx.manifold, p, &f.at(p))).fold(0.0, f64::max)
}

fn sup_diff<F: PointwiseForm, G: PointwiseForm>(fx: &Fixture, a: &F, b: &G, pts: &[Vec<f64>]) -> f64 {
    pts.iter().map(|p| tangential_sup(&fx.ctx.manifold, p, &a.at(p).sub(&b.at(p)))).fold(0.0, f64::max)
}

fn hodge(fx: &Fixture) -> Res<TransversalHodge> {
    Ok(TransversalHodge::euclidean(fx.ctx.clone())?)
}

/// Refuses non-basic inputs for the transversal operators.
fn require_basic(run: &mut Run, fx: &Fixture, a: &FormField) -> Res<()> {
    let v = is_basic_form(&fx.ctx.manifold, a, &fx.ctx.reeb, 200, run.seed(), 1e-9)?;
    run.report.verdict("input_basic", Status::of(v.is_basic), Some(v.sup_contraction.max(v.sup_contraction_of_d)), Some(1e-9), "");
    if !v.is_basic {
        return Err(CliError::Input(format!("input form is not basic (sup |v⌟α| = {:e})", v.sup_contraction)));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Pointwise checks.

fn check_contact_cmd(run: &mut Run, fx: &Fixture) -> Res<()> {
    let tol = run.tol();
    let v = check_contact(&fx.ctx.manifold, &fx.ctx.beta, run.samples(), run.seed(), tol)?;
    run.phase("contact");
    run.report.verdict("contact", Status::of(v.pass), Some(v.min_density), Some(tol), "minimum of |β∧(dβ)ⁿ| on oriented frames");
    run.report.verdict("density_floor", Status::of(v.min_density >= 0.5), Some(v.min_density), Some(0.5), "");
    run.report.number("min_density", v.min_density);
    run.report.number("max_density", v.max_density);
    run.report.number("samples", v.samples as f64);
    if let Some(e) = fx.expectation("contact_density") {
        if let Value::Number(d) = e.value {
            let dev = (v.min_density - d).abs().max((v.max_density - d).abs());
            run.report.bound("documented_density", dev, 1e-9);
        }
        run.report.echo(e);
    }
    Ok(())
}

fn reeb_cmd(run: &mut Run, fx: &Fixture) -> Res<()> {
    let tol = run.tol();
    let r = fx.ctx.check_reeb(run.samples(), run.seed(), tol)?;
    run.phase("reeb");
    run.report.bound("beta_normalization", r.beta_residual, tol);
    run.report.bound("kernel", r.kernel_residual, tol);
    run.report.bound("tangency", r.tangency_residual, tol);
    run.report.bound("pointwise_cross_check", r.pointwise_deviation, tol.max(1e-8));
    let coords = fx.ctx.coords();
    let comps: Vec<String> = fx.ctx.reeb.comps.iter().map(|c| c.display(coords).to_string()).collect();
    run.report.data("reeb", comps);
    if let Some(e) = fx.expectation("reeb") {
        if let Value::List(expected) = &e.value {
            let refs: Vec<&str> = expected.iter().map(String::as_str).collect();
            let field = reebcalc::exterior::VectorField::parse(&refs, coords)?;
            let dev = fx
                .ctx
                .manifold
                .sample(run.samples(), run.seed())
                .iter()
                .map(|p| {
                    let (a, b) = (fx.ctx.reeb_at(p), field.eval(p));
                    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            run.report.bound("documented_field", dev, tol);
        }
        run.report.echo(e);
    }
    Ok(())
}

fn basic_cmd(run: &mut Run, fx: &Fixture) -> Res<()> {
    let tol = run.tol();
    let witness = fx.expectation("dbeta_basic_primitive");
    let (alpha, from_witness) = match (input_form(run, fx)?, witness) {
        (Some(a), _) => (a, false),
        (None, Some(e)) => match &e.value {
            Value::List(pair) if pair.len() == 2 => (FormField::parse(&[(pair[0].as_str(), pair[1].as_str())], fx.ctx.coords())?, true),
            _ => (fx.ctx.dbeta.clone(), false),
        },
        (None, None) => (fx.ctx.dbeta.clone(), false),
    };
    run.report.data("form", alpha.display(fx.ctx.coords()).to_string());
    let v = is_basic_form(&fx.ctx.manifold, &alpha, &fx.ctx.reeb, run.samples(), run.seed(), tol)?;
    run.phase("basic");
    let note = if v.symbolic { "decided symbolically" } else { "sampled" };
    run.report.verdict("basic", Status::of(v.is_basic), Some(v.sup_contraction.max(v.sup_contraction_of_d)), Some(tol), note);
    if from_witness {
        let exact = alpha.d().sub(&fx.ctx.dbeta)?.is_zero();
        run.report.verdict("primitive_of_dbeta", Status::of(exact), None, None, "d(α) = dβ as expressions");
        run.report.echo(witness.expect("witness present"));
    }
    if let Some(e) = fx.expectation("lyapunov_unit") {
        if let Value::Text(f) = &e.value {
            let g = reebcalc::expr::parse(f, fx.ctx.coords())?;
            let l = verify_lyapunov(&fx.ctx.manifold, &g, &fx.ctx.reeb, LyapunovMode::Unit, run.samples(), run.seed(), tol);
            run.report.verdict("lyapunov_unit", Status::of(l.pass), Some((l.max - 1.0).abs().max((l.min - 1.0).abs())), Some(tol), f);
        }
        run.report.echo(e);
    }
    Ok(())
}

fn default_form(run: &Run, fx: &Fixture) -> Res<FormField> {
    Ok(input_form(run, fx)?.unwrap_or_else(|| fx.ctx.dbeta.clone()))
}

fn star_cmd(run: &mut Run, fx: &Fixture) -> Res<()> {
    let tol = run.tol();
    let h = hodge(fx)?;
    let c = h.check_compatibility(run.samples(), run.seed(), tol.max(1e-10))?;
    run.phase("compatibility");
    let worst = c.metric_compatibility.max(c.j_invariance).max(c.j_squared).max(c.reeb_orthogonality).max(c.reeb_norm);
    run.report.verdict("compatible_structure", Status::of(c.pass), Some(worst), Some(c.tol), "");
    let alpha = default_form(run, fx)?;
    require_basic(run, fx, &alpha)?;
    let (n, k) = (h.n(), alpha.degree());
    if k > 2 * n {
        return Err(CliError::Input(format!("degree {k} exceeds the transversal dimension {}", 2 * n)));
    }
    let pts = fx.ctx.manifold.sample(run.samples(), run.seed());
    let scale = sup(fx, &alpha, &pts).max(1.0);
    let s = tables::STAR_B_SQUARED[n - 1][k] as f64;
    let r = sup_diff(fx, &h.star_b(h.star_b(&alpha)), &Scaled(s, &alpha), &pts);
    run.report.bound("star_b_squared", r / scale, tol);
    let sd = tables::STAR_DBETA_SQUARED[n - 1][k] as f64;
    let r = sup_diff(fx, &h.star_dbeta(h.star_dbeta(&alpha)), &Scaled(sd, &alpha), &pts);
    run.report.bound("star_dbeta_squared", r / scale, tol);
    run.phase("stars");
    run.report.number("star_b_squared_sign", s);
    run.report.number("star_dbeta_squared_sign", sd);
    run.report.number("sup_star_b", sup(fx, &h.star_b(&alpha), &pts));
    let p0 = &pts[0];
    run.report.data("star_b_at_first_sample", serde_json::json!({ "point": p0, "coefficients": h.star_b(&alpha).at(p0).c }));
    Ok(())
}

fn laplacian_cmd(run: &mut Run, fx: &Fixture) -> Res<()> {
    let tol = run.tol();
    let h = hodge(fx)?;
    let alpha = default_form(run, fx)?;
    require_basic(run, fx, &alpha)?;
    let pts = fx.ctx.manifold.sample(run.samples(), run.seed());
    let scale = sup(fx, &alpha, &pts).max(1.0);
    if alpha.degree() >= 2 {
        let b = sup(fx, &h.basic_codifferential(h.basic_codifferential(&alpha)), &pts);
        run.report.bound("basic_codifferential_squared", b / scale, tol);
        let s = sup(fx, &h.symplectic_codifferential(h.symplectic_codifferential(&alpha)), &pts);
        run.report.bound("symplectic_codifferential_squared", s / scale, tol);
        run.phase("codifferentials");
    }
    let lb = sup(fx, &h.basic_laplacian(&alpha), &pts);
    let ls = sup(fx, &h.symplectic_laplacian(&alpha), &pts);
    run.phase("laplacians");
    run.report.number("sup_basic_laplacian", lb);
    run.report.number("sup_symplectic_laplacian", ls);
    run.report.verdict("pointwise_basic_harmonic", Status::Info, Some(lb / scale), Some(tol), "Δ_b α = 0 at the samples");
    Ok(())
}

fn lefschetz_cmd(run: &mut Run, fx: &Fixture) -> Res<()> {
    let tol = run.tol();
    let h = hodge(fx)?;
    let alpha = default_form(run, fx)?;
    require_basic(run, fx, &alpha)?;
    let pts = fx.ctx.manifold.sample(run.samples(), run.seed());
    let d = h.lefschetz_decompose(&alpha, &pts, tol)?;
    run.phase("decompose");
    run.report.bound("reconstruction", d.reconstruction_residual, tol);
    run.report.bound("primitivity", d.primitivity_residual, tol);
    run.report.verdict("unique", Status::of(d.unique), None, None, "");
    run.report.number("components", d.components.first().map_or(0, Vec::len) as f64);
    let first: Vec<Vec<f64>> = (0..d.components.first().map_or(0, Vec::len)).map(|i| d.component(0, i).c).collect();
    run.report.data("components_at_first_sample", serde_json::json!({ "point": &pts[0], "coefficients": first }));
    Ok(())
}

// ---------------------------------------------------------------------------
// Flow.

const DEFAULT_TAU: (&str, &str) = ("dx^dy", "z");

fn default_tau(fx: &Fixture) -> Res<FormField> {
    let tau = FormField::parse(&[DEFAULT_TAU], fx.ctx.coords())?;
    // Only meaningful where 𝓛_v τ = dβ holds symbolically.
    if tau.lie(&fx.ctx.reeb)?.sub(&fx.ctx.dbeta)?.is_zero() {
        Ok(tau)
    } else {
        Err(CliError::Input(format!("fixture '{}' has no default growth pair; pass --tau", fx.id())))
    }
}

fn growth_cmd(run: &mut Run, fx: &Fixture) -> Res<()> {
    let tol = run.tol();
    let defaults = run.cfg.tau.is_none();
    let tau = match &run.cfg.tau {
        Some(c) => parse_form(fx, c)?,
        None => default_tau(fx)?,
    };
    let eta = match &run.cfg.eta {
        Some(c) => parse_form(fx, c)?,
        None => fx.ctx.dbeta.clone(),
    };
    let dim = fx.ctx.ambient_dim();
    let x0 = run.cfg.x0.clone().unwrap_or_else(|| {
        let mut p = vec![0.5; dim];
        p[..3.min(dim)].copy_from_slice(&[0.3, 0.6, 0.05][..3.min(dim)]);
        p
    });
    let unit = |i: usize| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
    let frame = run.cfg.frame.clone().unwrap_or_else(|| (0..tau.degree()).map(unit).collect());
    let opts = GrowthOptions { horizon: run.cfg.horizon.unwrap_or(2.0), tol, ..Default::default() };
    let r = check_linear_growth(&fx.ctx, &tau, &eta, &x0, &frame, &opts)?;
    run.phase("growth");
    run.report.verdict("growth_law", Status::of(r.pass), Some(r.max_residual), Some(tol), "");
    run.report.number("fitted_slope", r.fitted_slope);
    run.report.number("predicted_slope", r.predicted_slope);
    run.report.number("fitted_intercept", r.fitted_intercept);
    run.report.number("max_residual", r.max_residual);
    run.report.number("lie_residual", r.lie_residual);
    run.report.number("end_time", *r.times.last().unwrap_or(&0.0));
    if let Some(t) = r.termination.exit_time() {
        run.report.number("exit_time", t);
    }
    run.report.data("tau", tau.display(fx.ctx.coords()).to_string());
    run.report.data("eta", eta.display(fx.ctx.coords()).to_string());
    run.attachments.push(("growth.csv".into(), r.to_csv(fx.ctx.coords())));
    if defaults && dim >= 3 {
        // A frame with η(Fr) = 0 must give constant values.
        let flat = vec![unit(0), unit(2)];
        let c = check_linear_growth(&fx.ctx, &tau, &eta, &x0, &flat, &opts)?;
        run.phase("constant_frame");
        run.report.verdict("constant_frame", Status::of(c.pass && c.constant_case), Some(c.max_residual), Some(tol), "η(Fr) = 0");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Integrals.

fn named_chain(name: &str) -> Option<Chain> {
    Some(match name {
        "unit-square" => examples::unit_square(),
        "cube-legendrian-cone" => examples::cube_legendrian_cone(),
        "cube-legendrian-curve" => examples::cube_legendrian_curve(),
        "s3-legendrian-hemisphere" => examples::s3_legendrian_hemisphere(),
        "s3-great-sphere" => examples::s3_great_sphere(),
        "s3-legendrian-circle" => examples::s3_legendrian_circle(),
        "t3-torus" => examples::t3_torus(0.0),
        _ => return None,
    })
}

fn resolve_chain(text: &str) -> Res<Chain> {
    match named_chain(text.trim()) {
        Some(c) => Ok(c),
        None => Ok(Chain::from_toml(text)?),
    }
}

fn integrate_cmd(run: &mut Run, fx: &Fixture) -> Res<()> {
    let tol = run.tol();
    match (input_form(run, fx)?, &run.cfg.chain) {
        (Some(alpha), Some(text)) => {
            let chain = resolve_chain(text)?;
            if alpha.degree() == chain.dim {
                let i = integrate_form(&alpha, &chain)?;
                run.report.number("value", i.value);
                run.report.number("error_estimate", i.error);
                run.report.number("nodes", i.nodes as f64);
                run.report.bound("quadrature_converged", i.error, tol);
            } else if alpha.degree() + 1 == chain.dim {
                let s = check_stokes(&alpha, &chain, Some(&fx.ctx.manifold), tol)?;
                run.report.number("interior", s.interior);
                run.report.number("boundary", s.boundary);
                run.report.number("error_estimate", s.error_estimate);
                run.report.bound("stokes", s.residual, tol);
            } else {
                return Err(CliError::Input(format!("a {}-form cannot be integrated over a {}-chain", alpha.degree(), chain.dim)));
            }
            run.phase("integrate");
            Ok(())
        }
        (None, None) => default_integrals(run, fx, tol),
        _ => Err(CliError::Input("integrate needs both --form and --chain, or neither".into())),
    }
}

/// The catalog's integral identities.
fn default_integrals(run: &mut Run, fx: &Fixture, tol: f64) -> Res<()> {
    let ctx = &fx.ctx;
    let form = |comps: &[(&str, &str)]| FormField::parse(comps, ctx.coords());
    let identity = |run: &mut Run, sigma: &Chain, theta: &FormField| -> Res<()> {
        let h = ctx.dbeta.sub(&theta.d())?;
        let r = legendrian_boundary_identity(ctx, sigma, &h, theta, tol)?;
        run.report.number("legendrian_identity_interior", r.interior);
        run.report.bound("legendrian_boundary_identity", r.residual, tol);
        Ok(())
    };
    let gauge = |run: &mut Run, lambda: &Chain, theta: &FormField, f: &str| -> Res<()> {
        let g = FormField::parse(&[("1", f)], ctx.coords())?.d();
        let a = theta_functional(ctx, lambda, theta, 1e-9)?;
        let b = theta_functional(ctx, lambda, &theta.add(&g)?, 1e-9)?;
        run.report.number("theta_functional", a);
        run.report.bound("theta_gauge_invariance", (a - b).abs(), 1e-9);
        Ok(())
    };
    match fx.id() {
        "cube" => {
            let solid = Chain::single(reebcalc::chains::ParamPatch::parse(&["u", "v", "w"], &["u", "v", "w"], 1, 8)?);
            let v = integrate_form(&ctx.dbeta, &solid.boundary(None)?)?;
            run.report.bound("closed_chain_dbeta", v.value.abs(), 1e-8);
            identity(run, &examples::cube_legendrian_cone(), &form(&[("dz", "x*y"), ("dx", "sin(z)")])?)?;
            gauge(run, &examples::cube_legendrian_curve(), &form(&[("dx", "z^2"), ("dz", "x*y + 1")])?, "x^2*z + sin(x)")?;
        }
        "s3-hopf" => {
            let v = integrate_form(&ctx.dbeta, &examples::s3_great_sphere())?;
            run.report.bound("closed_chain_dbeta", v.value.abs(), 1e-8);
            identity(run, &examples::s3_legendrian_hemisphere(), &form(&[("dy2", "x1*x2"), ("dx1", "y2^2")])?)?;
            gauge(run, &examples::s3_legendrian_circle(), &form(&[("dx1", "x2"), ("dx2", "y1 - x1^3")])?, "x1*x2 + exp(y2)")?;
        }
        id if id.starts_with("t3") => {
            let v = integrate_form(&ctx.dbeta, &examples::t3_torus(0.7))?;
            run.report.bound("closed_chain_dbeta", v.value.abs(), 1e-8);
            let dx = asymptotic_cycle_pairing(ctx, &form(&[("dx", "1")])?, 8, 2, 1e-8)?;
            run.report.number("cycle_pairing_dx", dx.value);
            run.report.number("total_mass", dx.total_mass);
            run.report.bound("cycle_pairing_dx_vanishes", dx.value.abs(), 1e-8);
            let dz = asymptotic_cycle_pairing(ctx, &form(&[("dz", "1")])?, 8, 2, 1e-8)?;
            run.report.verdict("cycle_pairing_dz_exact_zero", Status::of(dz.value == 0.0), Some(dz.value + 0.0), Some(0.0), "");
            run.report.data("orientation", dx.orientation_note);
        }
        _ => {
            let alpha = form(&[("dx", "x*y^2"), ("dy", "sin(x)")])?;
            let s = check_stokes(&alpha, &examples::unit_square(), None, tol)?;
            run.report.number("interior", s.interior);
            run.report.bound("stokes", s.residual, tol);
        }
    }
    run.phase("integrals");
    Ok(())
}

// ---------------------------------------------------------------------------
// Spectral.

fn betti(fx: &Fixture) -> Option<Vec<usize>> {
    match fx.expectation("basic_betti").map(|e| &e.value) {
        Some(Value::Numbers(v)) if !v.is_empty() => Some(v.iter().map(|x| *x as usize).collect()),
        _ => None,
    }
}

fn complex<'h>(run: &mut Run, fx: &Fixture, h: &'h TransversalHodge) -> Res<GalerkinComplex<'h>> {
    if !fx.is_closed() {
        return Err(CliError::Input(format!("'{}' is not closed; spectral commands need a closed fixture", fx.id())));
    }
    let d = SpectralOptions::default();
    let opts = SpectralOptions {
        degree: run.cfg.degree.unwrap_or(d.degree),
        quad_order: run.cfg.quad_order.unwrap_or(d.quad_order),
        seed: run.seed(),
        gap_threshold: run.cfg.gap_threshold.unwrap_or(d.gap_threshold),
        ..d
    };
    run.report.number("degree", opts.degree as f64);
    let mut c = GalerkinComplex::build(h, fx.id(), &opts)?;
    c.exploratory = betti(fx).is_none();
    run.phase("galerkin");
    Ok(c)
}

fn degrees(run: &Run, top: usize) -> Res<Vec<usize>> {
    match run.cfg.k {
        Some(k) if k > top => Err(CliError::Input(format!("degree {k} exceeds the basic top degree {top}"))),
        Some(k) => Ok(vec![k]),
        None => Ok((0..=top).collect()),
    }
}

fn spectral_cmd(run: &mut Run, fx: &Fixture) -> Res<()> {
    let h = hodge(fx)?;
    let c = complex(run, fx, &h)?;
    let expected = betti(fx);
    let mut csv = String::from("k,index,singular_value\n");
    for k in degrees(run, 2 * h.n())? {
        let r = harmonic_dimension(&c, k, LaplacianKind::Basic)?;
        run.report.number(&format!("gap_ratio_{k}"), r.gap_ratio);
        let status = match (r.kernel_dim, expected.as_ref().and_then(|b| b.get(k))) {
            (None, _) => Status::Inconclusive,
            (Some(d), Some(&e)) => Status::of(d == e),
            (Some(_), None) => Status::Info,
        };
        let note = if c.exploratory { "exploratory: no expected value" } else { "" };
        run.report.verdict(&format!("kernel_dim_{k}"), status, r.kernel_dim.map(|d| d as f64), None, note);
        if let Some(d) = r.kernel_dim {
            run.report.number(&format!("kernel_dim_{k}"), d as f64);
        }
        for (i, s) in r.singular_values.iter().enumerate() {
            csv.push_str(&format!("{k},{i},{s:e}\n"));
        }
        if k == 2 {
            if let Some(e) = fx.expectation("dbeta_class_nonzero") {
                let dec = hodge_decompose(&c, &fx.ctx.dbeta, run.tol())?;
                let ratio = dec.harmonic_norm / c.l2_norm(&fx.ctx.dbeta);
                run.report.number("dbeta_harmonic_ratio", ratio);
                let want = matches!(e.value, Value::Flag(true));
                let status = if dec.conclusive { Status::of((ratio >= 0.99) == want) } else { Status::Inconclusive };
                run.report.verdict("dbeta_class_nonzero", status, Some(ratio), Some(0.99), "");
                run.report.echo(e);
            }
        }
    }
    if let Some(e) = fx.expectation("basic_betti") {
        run.report.echo(e);
    }
    run.phase("spectrum");
    run.attachments.push(("singular-values.csv".into(), csv));
    Ok(())
}

fn hard_lefschetz_cmd(run: &mut Run, fx: &Fixture) -> Res<()> {
    let h = hodge(fx)?;
    let c = complex(run, fx, &h)?;
    let graded = |pass: bool, conclusive: bool| match (conclusive, c.exploratory) {
        (false, _) => Status::Inconclusive,
        (true, true) => Status::Info,
        (true, false) => Status::of(pass),
    };
    for k in 0..=h.n() {
        let l = hard_lefschetz_check(&c, k)?;
        let name = format!("lefschetz_{}_to_{}", l.source_degree, l.target_degree);
        run.report.verdict(&name, graded(l.pass, l.conclusive), Some(l.map.rank as f64), None, "rank of L^k on harmonic classes");
        run.report.number(&format!("{name}_condition"), l.map.condition);
        let d = star_duality_check(&c, k)?;
        let name = format!("star_duality_{}_to_{}", d.k, d.dual_degree);
        let note = if d.vacuous { "both spaces trivial" } else { "" };
        run.report.verdict(&name, graded(d.pass, d.conclusive), Some(d.map.rank as f64), None, note);
    }
    run.phase("lefschetz");
    if c.exploratory {
        run.report.data("note", "exploratory: no expected basic cohomology for this fixture");
    }
    Ok(())
}
