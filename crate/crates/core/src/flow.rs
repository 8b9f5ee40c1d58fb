//! Reeb flow: adaptive integration, frame transport, the linear growth law
//! along trajectories, exit detection and Lyapunov checks.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::contact::{is_basic_form, tangential_sup, ContactData};
use crate::error::{Error, Result};
use crate::exterior::{Covector, FormField, VectorField};
use crate::expr::Expr;
use crate::manifold::{Face, Kind, Manifold};

/// Finite-difference step for Jacobians of fields without expressions.
pub const FD_STEP: f64 = 1e-6;

type PointwiseField = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Vector field driving a flow.
pub enum FlowField {
    Symbolic { v: VectorField, jacobian: Vec<Vec<Expr>> },
    /// Evaluation only; the variational equation uses central differences
    /// with step [`FD_STEP`].
    Pointwise(PointwiseField),
}

impl FlowField {
    pub fn symbolic(v: &VectorField) -> Self {
        FlowField::Symbolic { v: v.clone(), jacobian: v.jacobian() }
    }

    /// The field `−v`, for backward-time runs.
    pub fn reversed(v: &VectorField) -> Self {
        Self::symbolic(&v.scale(&Expr::int(-1)))
    }

    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        match self {
            FlowField::Symbolic { v, .. } => v.eval(p),
            FlowField::Pointwise(f) => f(p),
        }
    }

    /// `Dv(p)·u`.
    pub fn linearized(&self, p: &[f64], u: &[f64]) -> Vec<f64> {
        match self {
            FlowField::Symbolic { jacobian, .. } => jacobian
                .iter()
                .map(|row| row.iter().zip(u).map(|(e, x)| if *x == 0.0 { 0.0 } else { e.eval(p) * x }).sum())
                .collect(),
            FlowField::Pointwise(f) => {
                let h = FD_STEP;
                let plus: Vec<f64> = p.iter().zip(u).map(|(a, b)| a + h * b).collect();
                let minus: Vec<f64> = p.iter().zip(u).map(|(a, b)| a - h * b).collect();
                f(&plus).iter().zip(f(&minus)).map(|(a, b)| (a - b) / (2.0 * h)).collect()
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    ReachedHorizon,
    /// Crossed a boundary face of a manifold with boundary.
    ExitedBoundary { face: Face, t_exit: f64 },
    /// Left the coordinate window of a chart without boundary.
    LeftWindow { face: Face, t_exit: f64 },
}

impl Termination {
    pub fn exit_time(&self) -> Option<f64> {
        match self {
            Termination::ReachedHorizon => None,
            Termination::ExitedBoundary { t_exit, .. } | Termination::LeftWindow { t_exit, .. } => Some(*t_exit),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub min_step: f64,
    pub max_step: f64,
}

/// Trajectory with optional transported frames.
#[derive(Clone, Debug, Serialize)]
pub struct FlowSegment {
    pub initial: Vec<f64>,
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// `frames[i][j]`: image of the `j`-th initial vector at `times[i]`.
    pub frames: Vec<Vec<Vec<f64>>>,
    pub termination: Termination,
    pub stats: StepStats,
    pub tol: f64,
}

impl FlowSegment {
    pub fn end(&self) -> &[f64] {
        self.points.last().unwrap()
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap()
    }
}

// Dormand–Prince 5(4) tableau (autonomous fields, so the nodes are not needed).
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Adaptive integrator for `x' = v(x)` together with the variational
/// equation `δ' = Dv(x) δ`.
pub struct Flow<'a> {
    pub manifold: &'a Manifold,
    pub field: FlowField,
    pub tol: f64,
    pub max_steps: usize,
}

impl<'a> Flow<'a> {
    pub fn new(manifold: &'a Manifold, v: &VectorField, tol: f64) -> Self {
        Flow { manifold, field: FlowField::symbolic(v), tol, max_steps: 2_000_000 }
    }

    pub fn reeb(ctx: &'a ContactData, tol: f64) -> Self {
        Self::new(&ctx.manifold, &ctx.reeb, tol)
    }

    fn rhs(&self, y: &[f64], m: usize) -> Vec<f64> {
        let x = self.manifold.reduce(&y[..m]);
        let mut out = self.field.eval(&x);
        for d in y[m..].chunks(m) {
            out.extend(self.field.linearized(&x, d));
        }
        out
    }

    /// One Dormand–Prince step; returns the fifth-order solution and the
    /// embedded error estimate.
    fn step(&self, y: &[f64], h: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
        let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
        for s in 0..7 {
            let mut ys = y.to_vec();
            for (j, kj) in k.iter().enumerate() {
                let a = A[s][j];
                if a != 0.0 {
                    for (yi, ki) in ys.iter_mut().zip(kj) {
                        *yi += h * a * ki;
                    }
                }
            }
            k.push(self.rhs(&ys, m));
        }
        let mut y5 = y.to_vec();
        let mut err = vec![0.0; y.len()];
        for s in 0..7 {
            for i in 0..y.len() {
                y5[i] += h * B5[s] * k[s][i];
                err[i] += h * (B5[s] - B4[s]) * k[s][i];
            }
        }
        (y5, err)
    }

    fn error_ratio(&self, y: &[f64], y5: &[f64], err: &[f64]) -> f64 {
        y.iter()
            .zip(y5)
            .zip(err)
            .map(|((a, b), e)| e.abs() / (self.tol * a.abs().max(b.abs()).max(1.0)))
            .fold(0.0, f64::max)
    }

    /// Largest violation of a non-periodic coordinate range, with its face.
    fn violation(&self, x: &[f64]) -> Option<(f64, Face)> {
        if self.manifold.is_level_set() {
            return None;
        }
        let mut best: Option<(f64, Face)> = None;
        for (axis, b) in self.manifold.bounds.iter().enumerate() {
            if b.periodic {
                continue;
            }
            for (side, g) in [(0, b.lo - x[axis]), (1, x[axis] - b.hi)] {
                if best.is_none_or(|(v, _)| g > v) {
                    best = Some((g, Face { axis, side }));
                }
            }
        }
        best
    }

    fn finish_point(&self, y: &mut [f64], m: usize, y_prev: &[f64]) -> Result<()> {
        if let Kind::LevelSet { .. } = self.manifold.kind {
            let x = y[..m].to_vec();
            let g = self.manifold.normal(&x).unwrap();
            let gn = crate::linalg::norm(&g).max(1e-300);
            let drift = self.manifold.constraint_residual(&x).abs() / gn;
            let scale = crate::linalg::norm(&y_prev[..m]).max(1.0);
            if drift > 10.0 * self.tol * scale {
                return Err(Error::OffManifold(format!("constraint drift {drift:e} exceeds 10×tol")));
            }
            let q = self.manifold.project_point(&x)?;
            y[..m].copy_from_slice(&q);
        } else {
            let q = self.manifold.reduce(&y[..m]);
            y[..m].copy_from_slice(&q);
        }
        Ok(())
    }

    /// Integrates from `x0` with initial frame vectors `frame0` up to time
    /// `t_end`. Records every accepted step, or exactly the given output
    /// times when `outputs` is non-empty.
    pub fn run(&self, x0: &[f64], frame0: &[Vec<f64>], t_end: f64, outputs: &[f64]) -> Result<FlowSegment> {
        let m = x0.len();
        if frame0.iter().any(|f| f.len() != m) {
            return Err(Error::Dimension("frame vector length differs from the point dimension".into()));
        }
        if !(t_end >= 0.0) {
            return Err(Error::Precondition("flow time must be non-negative".into()));
        }
        let mut y: Vec<f64> = x0.to_vec();
        for f in frame0 {
            y.extend_from_slice(f);
        }
        let v0 = self.field.eval(x0);
        if crate::linalg::norm(&v0) == 0.0 {
            return Err(Error::Precondition("vector field vanishes at the initial point".into()));
        }
        let split = |y: &[f64]| -> (Vec<f64>, Vec<Vec<f64>>) { (y[..m].to_vec(), y[m..].chunks(m).map(|c| c.to_vec()).collect()) };
        let mut seg = FlowSegment {
            initial: x0.to_vec(),
            times: vec![0.0],
            points: vec![x0.to_vec()],
            frames: vec![frame0.to_vec()],
            termination: Termination::ReachedHorizon,
            stats: StepStats { min_step: f64::INFINITY, ..Default::default() },
            tol: self.tol,
        };
        let mut out_iter = outputs.iter().copied().filter(|&t| t > 0.0 && t <= t_end).peekable();
        let mut t = 0.0;
        let mut h = (self.tol.powf(0.2) * 0.1).min(t_end.max(1e-3));
        let h_floor = 1e-14 * t_end.max(1.0);
        let mut steps = 0;
        while t < t_end {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::NoConvergence { context: "flow step budget" });
            }
            let target = if outputs.is_empty() { t_end } else { out_iter.peek().copied().unwrap_or(t_end) };
            let mut hh = h.min(target - t);
            let hit = hh >= target - t;
            if target - t - hh < 1e-12 * t_end.max(1.0) {
                hh = target - t;
            }
            let (mut y5, err) = self.step(&y, hh, m);
            let ratio = self.error_ratio(&y, &y5, &err);
            if ratio > 1.0 {
                seg.stats.rejected += 1;
                h = hh * (0.9 * ratio.powf(-0.2)).max(0.2);
                if h < h_floor {
                    return Err(Error::StepUnderflow { t });
                }
                continue;
            }
            if let Some((g, _)) = self.violation(&y5[..m]) {
                if g > 0.0 {
                    let (s, face, mut ye) = self.bisect_exit(&y, hh, m);
                    let b = &self.manifold.bounds[face.axis];
                    ye[face.axis] = if face.side == 0 { b.lo } else { b.hi };
                    let t_exit = t + s;
                    let (x, fr) = split(&ye);
                    seg.times.push(t_exit);
                    seg.points.push(x);
                    seg.frames.push(fr);
                    seg.termination = if b.boundary[face.side] {
                        Termination::ExitedBoundary { face, t_exit }
                    } else {
                        Termination::LeftWindow { face, t_exit }
                    };
                    seg.stats.accepted += 1;
                    return Ok(seg);
                }
            }
            self.finish_point(&mut y5, m, &y)?;
            y = y5;
            t = if hit || (target - t - hh).abs() < 1e-12 * t_end.max(1.0) { target } else { t + hh };
            seg.stats.accepted += 1;
            seg.stats.min_step = seg.stats.min_step.min(hh);
            seg.stats.max_step = seg.stats.max_step.max(hh);
            let record = outputs.is_empty() || out_iter.peek().is_some_and(|&o| o <= t);
            if record {
                if !outputs.is_empty() {
                    out_iter.next();
                }
                let (x, fr) = split(&y);
                seg.times.push(t);
                seg.points.push(x);
                seg.frames.push(fr);
            }
            if !(ratio > 0.0) {
                h = hh * 5.0;
            } else {
                h = hh * (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0);
            }
            if hit && h < hh {
                h = hh;
            }
        }
        if seg.stats.accepted == 0 {
            seg.stats.min_step = 0.0;
        }
        Ok(seg)
    }

    /// Bisects the step size at which the trajectory meets the face.
    fn bisect_exit(&self, y: &[f64], h: f64, m: usize) -> (f64, Face, Vec<f64>) {
        let (mut lo, mut hi) = (0.0, h);
        let mut y_hi = self.step(y, h, m).0;
        let tol = self.tol.min(1e-10);
        while hi - lo > tol * h.max(1.0) {
            let mid = 0.5 * (lo + hi);
            let ym = self.step(y, mid, m).0;
            if self.violation(&ym[..m]).is_some_and(|(g, _)| g > 0.0) {
                hi = mid;
                y_hi = ym;
            } else {
                lo = mid;
            }
        }
        let face = self.violation(&y_hi[..m]).unwrap().1;
        (0.5 * (lo + hi), face, y_hi)
    }

    /// Trajectory only.
    pub fn integrate(&self, x0: &[f64], t_end: f64) -> Result<FlowSegment> {
        self.run(x0, &[], t_end, &[])
    }

    /// Re-integrates the trajectory of `seg` with the variational equation,
    /// recording frames at the segment's times.
    pub fn transport_frame(&self, seg: &FlowSegment, frame0: &[Vec<f64>]) -> Result<FlowSegment> {
        let t_end = seg.end_time();
        self.run(&seg.initial, frame0, t_end, &seg.times[1..])
    }
}

/// `integrate_flow` with default step budget.
pub fn integrate_flow(m: &Manifold, v: &VectorField, x0: &[f64], t_end: f64, tol: f64) -> Result<FlowSegment> {
    Flow::new(m, v, tol).integrate(x0, t_end)
}

/// Affine growth of `τ(φ_*ᵗ Fr₀)` along a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub predicted: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Least-squares line through the values (reported only).
    pub fitted_intercept: f64,
    pub fitted_slope: f64,
    /// `η(Fr₀)`.
    pub predicted_slope: f64,
    pub max_residual: f64,
    /// `η(Fr₀) = 0`: the values must be constant.
    pub constant_case: bool,
    /// Residual of the hypothesis `𝓛_v τ = η`.
    pub lie_residual: f64,
    /// Residual of the hypothesis `v⌟τ = 0`.
    pub horizontality_residual: f64,
    pub termination: Termination,
    pub pass: bool,
    pub tol: f64,
}

impl GrowthReport {
    /// CSV with columns `t, <coords…>, value, predicted, residual`.
    pub fn to_csv(&self, coords: &[String]) -> String {
        let mut s = String::from("t");
        for c in coords {
            s.push(',');
            s.push_str(c);
        }
        s.push_str(",value,predicted,residual\n");
        for i in 0..self.times.len() {
            let _ = write!(s, "{}", self.times[i]);
            for x in &self.points[i] {
                let _ = write!(s, ",{x}");
            }
            let _ = writeln!(s, ",{},{},{}", self.values[i], self.predicted[i], self.residuals[i]);
        }
        s
    }
}

/// Options for [`check_linear_growth`].
#[derive(Clone, Debug)]
pub struct GrowthOptions {
    pub horizon: f64,
    pub outputs: usize,
    pub integrator_tol: f64,
    pub hypothesis_samples: usize,
    pub tol: f64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions { horizon: 10.0, outputs: 101, integrator_tol: 1e-11, hypothesis_samples: 64, tol: 1e-7 }
    }
}

/// Checks `τ(φ_*ᵗ Fr₀) = τ(Fr₀) + η(Fr₀)·t` along the Reeb trajectory
/// through `x0`, after verifying `𝓛_v τ = η` and `v⌟τ = 0`.
pub fn check_linear_growth(
    ctx: &ContactData,
    tau: &FormField,
    eta: &FormField,
    x0: &[f64],
    frame0: &[Vec<f64>],
    opts: &GrowthOptions,
) -> Result<GrowthReport> {
    let m = &ctx.manifold;
    let k = tau.degree();
    if eta.degree() != k || frame0.len() != k {
        return Err(Error::Degree(format!("τ, η and the frame must have matching degree {k}")));
    }
    let lie = tau.lie(&ctx.reeb)?;
    let diff = lie.sub(eta)?;
    let contraction = if k == 0 { FormField::zero(m.ambient_dim(), 0) } else { tau.interior(&ctx.reeb)? };
    let pts = m.sample(opts.hypothesis_samples, 11);
    let mut lie_res: f64 = 0.0;
    let mut hor_res: f64 = 0.0;
    for p in &pts {
        lie_res = lie_res.max(tangential_sup(m, p, &diff.eval_at(p)));
        hor_res = hor_res.max(tangential_sup(m, p, &contraction.eval_at(p)));
    }
    if lie_res > opts.tol {
        return Err(Error::Precondition(format!("𝓛_v τ ≠ η (sup residual {lie_res:e})")));
    }
    if hor_res > opts.tol {
        return Err(Error::Precondition(format!("v⌟τ ≠ 0 (sup residual {hor_res:e})")));
    }
    if !eta.is_zero() {
        let b = is_basic_form(m, eta, &ctx.reeb, opts.hypothesis_samples, 13, opts.tol)?;
        if !b.is_basic {
            return Err(Error::Precondition("η is not basic".into()));
        }
    }
    let n_out = opts.outputs.max(2);
    let grid: Vec<f64> = (1..n_out).map(|i| opts.horizon * i as f64 / (n_out - 1) as f64).collect();
    let flow = Flow::reeb(ctx, opts.integrator_tol);
    let seg = flow.run(x0, frame0, opts.horizon, &grid)?;
    let value = |p: &[f64], fr: &[Vec<f64>]| -> f64 {
        let c: Covector<f64> = tau.eval_at(p);
        c.eval(fr)
    };
    let tau0 = value(x0, frame0);
    let eta0 = eta.eval_at(x0).eval(frame0);
    let mut rep = GrowthReport {
        times: seg.times.clone(),
        points: seg.points.clone(),
        values: Vec::new(),
        predicted: Vec::new(),
        residuals: Vec::new(),
        fitted_intercept: 0.0,
        fitted_slope: 0.0,
        predicted_slope: eta0,
        max_residual: 0.0,
        constant_case: eta0.abs() <= opts.tol,
        lie_residual: lie_res,
        horizontality_residual: hor_res,
        termination: seg.termination.clone(),
        pass: false,
        tol: opts.tol,
    };
    for (i, t) in seg.times.iter().enumerate() {
        let v = value(&seg.points[i], &seg.frames[i]);
        let pred = if rep.constant_case { tau0 } else { tau0 + eta0 * t };
        rep.values.push(v);
        rep.predicted.push(pred);
        rep.residuals.push(v - pred);
        rep.max_residual = rep.max_residual.max((v - pred).abs());
    }
    let nn = rep.times.len() as f64;
    let mt = rep.times.iter().sum::<f64>() / nn;
    let mv = rep.values.iter().sum::<f64>() / nn;
    let stt: f64 = rep.times.iter().map(|t| (t - mt).powi(2)).sum();
    let stv: f64 = rep.times.iter().zip(&rep.values).map(|(t, v)| (t - mt) * (v - mv)).sum();
    rep.fitted_slope = if stt > 0.0 { stv / stt } else { 0.0 };
    rep.fitted_intercept = mv - rep.fitted_slope * mt;
    rep.pass = rep.max_residual <= opts.tol;
    Ok(rep)
}

/// Outcome of following a trajectory for a bounded time. Non-exit is
/// numerical evidence only; nothing here certifies that a trajectory is
/// trapped.
#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TrapReport {
    Exited { t_exit: f64, face: Face, boundary: bool },
    NotExitedWithin {
        horizon: f64,
        /// Smallest distance to the initial point after `t ≥ 1`.
        min_return_distance: f64,
        note: String,
    },
}

impl TrapReport {
    pub fn exited(&self) -> bool {
        matches!(self, TrapReport::Exited { .. })
    }
}

pub fn detect_trapped(m: &Manifold, v: &VectorField, x0: &[f64], horizon: f64, tol: f64) -> Result<TrapReport> {
    let seg = Flow::new(m, v, tol).integrate(x0, horizon)?;
    Ok(match seg.termination {
        Termination::ExitedBoundary { face, t_exit } => TrapReport::Exited { t_exit, face, boundary: true },
        Termination::LeftWindow { face, t_exit } => TrapReport::Exited { t_exit, face, boundary: false },
        Termination::ReachedHorizon => {
            let d = seg
                .times
                .iter()
                .zip(&seg.points)
                .filter(|(t, _)| **t >= 1.0)
                .map(|(_, p)| periodic_distance(m, p, x0))
                .fold(f64::INFINITY, f64::min);
            TrapReport::NotExitedWithin {
                horizon,
                min_return_distance: d,
                note: format!("no exit observed up to t = {horizon}; this is not a proof of trapping"),
            }
        }
    })
}

/// Runs [`detect_trapped`] for many initial points in parallel.
pub fn detect_trapped_batch(m: &Manifold, v: &VectorField, starts: &[Vec<f64>], horizon: f64, tol: f64) -> Vec<Result<TrapReport>> {
    starts.par_iter().map(|x| detect_trapped(m, v, x, horizon, tol)).collect()
}

fn periodic_distance(m: &Manifold, a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(&m.bounds)
        .map(|((x, y), iv)| {
            let mut d = (x - y).abs();
            if iv.periodic {
                let w = iv.width();
                d %= w;
                d = d.min(w - d);
            }
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LyapunovMode {
    /// `df(v) > 0` everywhere.
    Positive,
    /// `df(v) = 1` everywhere.
    Unit,
}

#[derive(Clone, Debug, Serialize)]
pub struct LyapunovVerdict {
    pub pass: bool,
    pub mode: LyapunovMode,
    pub min: f64,
    pub max: f64,
    /// Point attaining the decisive extreme value.
    pub worst_point: Vec<f64>,
    pub samples: usize,
    pub tol: f64,
}

/// Samples `df(v)` over the manifold, including boundary faces.
pub fn verify_lyapunov(m: &Manifold, f: &Expr, v: &VectorField, mode: LyapunovMode, samples: usize, seed: u64, tol: f64) -> LyapunovVerdict {
    let dfv = v.apply(f);
    let mut pts = m.sample(samples, seed);
    pts.extend(m.face_samples((samples / 8).max(4), seed).into_iter().map(|(_, p)| p));
    let vals: Vec<f64> = pts.par_iter().map(|p| dfv.eval(p)).collect();
    let mut out = LyapunovVerdict {
        pass: false,
        mode,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        worst_point: Vec::new(),
        samples: pts.len(),
        tol,
    };
    let mut worst = f64::NEG_INFINITY;
    for (p, &x) in pts.iter().zip(&vals) {
        out.min = out.min.min(x);
        out.max = out.max.max(x);
        let badness = match mode {
            LyapunovMode::Positive => -x,
            LyapunovMode::Unit => (x - 1.0).abs(),
        };
        if badness > worst || x.is_nan() {
            worst = badness;
            out.worst_point = p.clone();
        }
    }
    out.pass = match mode {
        LyapunovMode::Positive => out.min > tol,
        LyapunovMode::Unit => vals.iter().all(|x| (x - 1.0).abs() <= tol),
    };
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct LinkResidual {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainVerdict {
    pub pass: bool,
    pub failed_link: Option<String>,
    pub links: Vec<LinkResidual>,
    /// Sign `σ` in `v⌟dτ = σ (dβ)^{k−1}` and `𝓛_v τ = σ (dβ)^{k−1}`.
    pub sign: i32,
    pub samples: usize,
    pub tol: f64,
}

/// Verifies the chain `dα = (dβ)^k`, `dτ = α − β∧(dβ)^{k−1}` and the derived
/// identities for `v⌟dτ` and `𝓛_v τ`. The sign of the derived identities is
/// detected and reported.
pub fn verify_antiderivative_chain(
    ctx: &ContactData,
    alpha: &FormField,
    tau: &FormField,
    k: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ChainVerdict> {
    if k == 0 {
        return Err(Error::Degree("k must be at least 1".into()));
    }
    if alpha.degree() != 2 * k - 1 || tau.degree() != 2 * k - 2 {
        return Err(Error::Degree(format!(
            "expected α of degree {} and τ of degree {}, got {} and {}",
            2 * k - 1,
            2 * k - 2,
            alpha.degree(),
            tau.degree()
        )));
    }
    let m = &ctx.manifold;
    let pts = m.sample(samples, seed);
    let sup = |f: &FormField| pts.iter().map(|p| tangential_sup(m, p, &f.eval_at(p))).fold(0.0, f64::max);
    let dbk = ctx.dbeta.power(k)?;
    let dbk1 = ctx.dbeta.power(k - 1)?;
    let mut links = Vec::new();
    let mut push = |name: &str, r: f64| links.push(LinkResidual { name: name.into(), residual: r, pass: r <= tol });
    push("d alpha = (d beta)^k", sup(&alpha.d().sub(&dbk)?));
    let basic = is_basic_form(m, alpha, &ctx.reeb, samples, seed, tol)?;
    push("alpha basic", basic.sup_contraction.max(basic.sup_contraction_of_d));
    let rhs = alpha.sub(&ctx.beta.wedge(&dbk1)?)?;
    push("d tau = alpha - beta ^ (d beta)^(k-1)", sup(&tau.d().sub(&rhs)?));
    let ivdt = tau.d().interior(&ctx.reeb)?;
    let lie = tau.lie(&ctx.reeb)?;
    let plus = sup(&ivdt.sub(&dbk1)?).max(sup(&lie.sub(&dbk1)?));
    let minus = sup(&ivdt.add(&dbk1)?).max(sup(&lie.add(&dbk1)?));
    let sign = if minus < plus { -1 } else { 1 };
    push("v _| d tau = sign (d beta)^(k-1)", sup(&if sign > 0 { ivdt.sub(&dbk1)? } else { ivdt.add(&dbk1)? }));
    push("L_v tau = sign (d beta)^(k-1)", sup(&if sign > 0 { lie.sub(&dbk1)? } else { lie.add(&dbk1)? }));
    let failed_link = links.iter().find(|l| !l.pass).map(|l| l.name.clone());
    Ok(ChainVerdict { pass: failed_link.is_none(), failed_link, links, sign, samples: pts.len(), tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_fixture;

    #[test]
    fn cube_exit() {
        let f = load_fixture("cube").unwrap();
        let seg = Flow::reeb(&f.ctx, 1e-10).integrate(&[0.5, 0.5, 0.0], 5.0).unwrap();
        match seg.termination {
            Termination::ExitedBoundary { face, t_exit } => {
                assert_eq!(face, Face { axis: 2, side: 1 });
                assert!((t_exit - 1.0).abs() < 1e-9, "{t_exit}");
            }
            t => panic!("{t:?}"),
        }
    }

    #[test]
    fn hopf_circle_closes() {
        let f = load_fixture("s3-hopf").unwrap();
        let tp = 2.0 * std::f64::consts::PI;
        let seg = Flow::reeb(&f.ctx, 1e-11).integrate(&[1.0, 0.0, 0.0, 0.0], tp).unwrap();
        let e = seg.end();
        assert!((e[0] - 1.0).abs() < 1e-8 && e[1].abs() < 1e-8, "{e:?}");
    }

    #[test]
    fn cube_growth_law() {
        let f = load_fixture("cube").unwrap();
        let c = &f.ctx.manifold.coords;
        let tau = FormField::parse(&[("dx^dy", "z")], c).unwrap();
        let eta = FormField::parse(&[("dx^dy", "1")], c).unwrap();
        let opts = GrowthOptions { horizon: 0.8, ..Default::default() };
        let fr = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let r = check_linear_growth(&f.ctx, &tau, &eta, &[0.5, 0.5, 0.1], &fr, &opts).unwrap();
        assert!(r.pass && (r.predicted_slope - 1.0).abs() < 1e-15, "{r:?}");
        let fr = vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]];
        let r = check_linear_growth(&f.ctx, &tau, &eta, &[0.5, 0.5, 0.1], &fr, &opts).unwrap();
        assert!(r.pass && r.constant_case);
        assert!(r.to_csv(c).starts_with("t,x,y,z,value,predicted,residual\n"));
    }

    #[test]
    fn cube_chain_sign() {
        let f = load_fixture("cube").unwrap();
        let c = &f.ctx.manifold.coords;
        let alpha = FormField::parse(&[("dx", "-y")], c).unwrap();
        let tau = FormField::parse(&[("1", "-z")], c).unwrap();
        let v = verify_antiderivative_chain(&f.ctx, &alpha, &tau, 1, 64, 0, 1e-10).unwrap();
        assert!(v.pass, "{v:?}");
        assert_eq!(v.sign, -1);
        let zero1 = FormField::zero(3, 1);
        let zero0 = FormField::zero(3, 0);
        let v = verify_antiderivative_chain(&f.ctx, &zero1, &zero0, 1, 64, 0, 1e-10).unwrap();
        assert_eq!(v.failed_link.as_deref(), Some("d alpha = (d beta)^k"));
    }
}
