//! Parametrized chains and integrals of forms over them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contact::ContactData;
use crate::error::{Error, Result};
use crate::exterior::{Covector, FormField, PointwiseForm, SmoothMap};
use crate::expr::{parse, Expr};
use crate::linalg::Mat;
use crate::manifold::{halton_point, Kind, Manifold};
use crate::quadrature::{composite_01, tensor};

pub const DEFAULT_ORDER: usize = 8;

/// Map `[0,1]^k → ℝ^m` with an orientation sign and a quadrature rule.
#[derive(Clone, Debug)]
pub struct ParamPatch {
    pub map: SmoothMap,
    jacobian: Vec<Vec<Expr>>,
    pub orientation: i32,
    /// Gauss points per cell and axis.
    pub order: usize,
    /// Cells per axis.
    pub cells: usize,
}

impl ParamPatch {
    pub fn new(map: SmoothMap, orientation: i32, order: usize) -> Self {
        let k = map.source_dim();
        let jacobian = map.comps.iter().map(|c| (0..k).map(|j| c.diff(j)).collect()).collect();
        ParamPatch { map, jacobian, orientation: orientation.signum(), order: order.max(1), cells: 1 }
    }

    pub fn parse(params: &[&str], comps: &[&str], orientation: i32, order: usize) -> Result<Self> {
        let names: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        Ok(Self::new(SmoothMap::parse(comps, &names)?, orientation, order))
    }

    pub fn with_cells(mut self, cells: usize) -> Self {
        self.cells = cells.max(1);
        self
    }

    pub fn dim(&self) -> usize {
        self.map.source_dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.map.target_dim()
    }

    pub fn point(&self, u: &[f64]) -> Vec<f64> {
        self.map.eval(u)
    }

    pub fn jacobian_at(&self, u: &[f64]) -> Mat<f64> {
        Mat::from_fn(self.ambient_dim(), self.dim(), |i, j| self.jacobian[i][j].eval(u))
    }

    /// Face `u_axis = side` as a `(k−1)`-patch with the boundary sign
    /// `(−1)^{axis+side+1}` folded into its orientation.
    pub fn face(&self, axis: usize, side: usize) -> Result<ParamPatch> {
        let k = self.dim();
        let subs: Vec<Expr> = (0..k)
            .map(|j| match j.cmp(&axis) {
                std::cmp::Ordering::Less => Expr::var(j),
                std::cmp::Ordering::Equal => Expr::int(side as i64),
                std::cmp::Ordering::Greater => Expr::var(j - 1),
            })
            .collect();
        let comps = self.map.comps.iter().map(|c| c.substitute(&subs)).collect::<Result<Vec<_>>>()?;
        let sign = if (axis + side + 1).is_multiple_of(2) { 1 } else { -1 };
        let mut f = ParamPatch::new(SmoothMap::new(k - 1, comps)?, self.orientation * sign, self.order);
        f.cells = self.cells;
        Ok(f)
    }

    /// Quadrature nodes on `[0,1]^k` with `cells` subdivisions per axis.
    pub fn nodes(&self, cells: usize) -> Vec<(Vec<f64>, f64)> {
        tensor(&composite_01(self.order, cells), self.dim())
    }

    fn integrate_cells<F: PointwiseForm>(&self, f: &F, cells: usize) -> f64 {
        let k = self.dim();
        let mut s = 0.0;
        for (u, w) in self.nodes(cells) {
            let x = self.point(&u);
            let c = f.at(&x);
            let v = if k == 0 { c.c[0] } else { c.pullback(&self.jacobian_at(&u)).c[0] };
            s += w * v;
        }
        self.orientation as f64 * s
    }

    /// Sup of the constraint residual at the nodes and the smallest
    /// singular value of the Jacobian.
    pub fn validate(&self, m: &Manifold) -> PatchCheck {
        let mut out = PatchCheck { max_constraint_residual: 0.0, min_singular_value: f64::INFINITY };
        for (u, _) in self.nodes(self.cells) {
            out.max_constraint_residual = out.max_constraint_residual.max(m.constraint_residual(&self.point(&u)).abs());
            if self.dim() > 0 {
                let j = crate::linalg::to_dmatrix(&self.jacobian_at(&u));
                out.min_singular_value = out.min_singular_value.min(j.singular_values().min());
            }
        }
        out
    }

    fn probes(&self) -> Vec<Vec<f64>> {
        (1..6).map(|i| halton_point(i * 7 + 3, self.dim())).collect()
    }

    fn degenerate(&self) -> bool {
        self.dim() > 0 && self.probes().iter().all(|u| self.jacobian_at(u).max_abs() < 1e-12)
    }

    fn same_image(&self, o: &ParamPatch, m: Option<&Manifold>) -> bool {
        if self.dim() != o.dim() || self.ambient_dim() != o.ambient_dim() {
            return false;
        }
        if self.map == o.map {
            return true;
        }
        self.probes().iter().all(|u| {
            let (mut a, mut b) = (self.point(u), o.point(u));
            if let Some(m) = m {
                a = m.reduce(&a);
                b = m.reduce(&b);
            }
            a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-10 * (1.0 + x.abs()))
        })
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PatchCheck {
    pub max_constraint_residual: f64,
    pub min_singular_value: f64,
}

/// Integer combination of patches of one dimension.
#[derive(Clone, Debug)]
pub struct Chain {
    pub dim: usize,
    pub ambient: usize,
    pub terms: Vec<(i64, ParamPatch)>,
}

impl Chain {
    pub fn new(dim: usize, ambient: usize) -> Self {
        Chain { dim, ambient, terms: Vec::new() }
    }

    pub fn single(p: ParamPatch) -> Self {
        Chain { dim: p.dim(), ambient: p.ambient_dim(), terms: vec![(1, p)] }
    }

    pub fn push(&mut self, weight: i64, p: ParamPatch) -> Result<()> {
        if p.dim() != self.dim || p.ambient_dim() != self.ambient {
            return Err(Error::Dimension(format!(
                "{}-patch in ℝ^{} added to a {}-chain in ℝ^{}",
                p.dim(),
                p.ambient_dim(),
                self.dim,
                self.ambient
            )));
        }
        self.terms.push((weight, p));
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sets the cell count of every patch.
    pub fn refined(&self, cells: usize) -> Chain {
        Chain { terms: self.terms.iter().map(|(w, p)| (*w, p.clone().with_cells(cells))).collect(), ..self.clone() }
    }

    /// Raw boundary: every face of every patch, no cancellation.
    pub fn boundary_terms(&self) -> Result<Chain> {
        if self.dim == 0 {
            return Err(Error::Degree("boundary of a 0-chain".into()));
        }
        let mut out = Chain::new(self.dim - 1, self.ambient);
        for (w, p) in &self.terms {
            for axis in 0..self.dim {
                for side in 0..2 {
                    out.terms.push((*w, p.face(axis, side)?));
                }
            }
        }
        Ok(out)
    }

    /// Boundary with cancellation of equal faces. Faces are identified
    /// symbolically, or numerically at probe points (after periodic
    /// reduction when a manifold is given); degenerate faces are dropped.
    pub fn boundary(&self, m: Option<&Manifold>) -> Result<Chain> {
        Ok(self.boundary_terms()?.simplify(m))
    }

    /// Merges terms with equal images and drops zero and degenerate terms.
    pub fn simplify(&self, m: Option<&Manifold>) -> Chain {
        let mut merged: Vec<(i64, ParamPatch)> = Vec::new();
        for (w, p) in &self.terms {
            let w = w * p.orientation as i64;
            if w == 0 || p.degenerate() {
                continue;
            }
            match merged.iter_mut().find(|(_, q)| q.same_image(p, m)) {
                Some(slot) => slot.0 += w,
                None => {
                    let mut q = p.clone();
                    q.orientation = 1;
                    merged.push((w, q));
                }
            }
        }
        merged.retain(|(w, _)| *w != 0);
        Chain { dim: self.dim, ambient: self.ambient, terms: merged }
    }

    /// `∂∂ = 0` with symbolic face identification only.
    pub fn boundary_of_boundary_vanishes(&self) -> Result<bool> {
        if self.dim < 2 {
            return Ok(true);
        }
        let dd = self.boundary_terms()?.boundary_terms()?;
        let mut merged: Vec<(i64, SmoothMap)> = Vec::new();
        for (w, p) in &dd.terms {
            let w = w * p.orientation as i64;
            match merged.iter_mut().find(|(_, q)| *q == p.map) {
                Some(slot) => slot.0 += w,
                None => merged.push((w, p.map.clone())),
            }
        }
        Ok(merged.iter().all(|(w, _)| *w == 0))
    }

    /// Reads a chain description: `params`, then `[[patch]]` tables with
    /// `map`, optional `orientation`, `order`, `cells` and `weight`.
    pub fn from_toml(text: &str) -> Result<Chain> {
        let file: ChainFile = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| crate::catalog::line_col(text, s.start));
            Error::Parse { line, column, message: e.message().to_string() }
        })?;
        let params: Vec<&str> = file.params.iter().map(|s| s.as_str()).collect();
        let first = file.patch.first().ok_or_else(|| Error::Structure("chain has no patches".into()))?;
        let mut chain = Chain::new(params.len(), first.map.len());
        for p in &file.patch {
            let comps: Vec<&str> = p.map.iter().map(|s| s.as_str()).collect();
            let patch = ParamPatch::parse(&params, &comps, p.orientation.unwrap_or(1), p.order.unwrap_or(DEFAULT_ORDER))?
                .with_cells(p.cells.unwrap_or(1));
            chain.push(p.weight.unwrap_or(1), patch)?;
        }
        Ok(chain)
    }
}

#[derive(Deserialize)]
struct ChainFile {
    params: Vec<String>,
    patch: Vec<PatchEntry>,
}

#[derive(Deserialize)]
struct PatchEntry {
    map: Vec<String>,
    orientation: Option<i32>,
    order: Option<usize>,
    cells: Option<usize>,
    weight: Option<i64>,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Difference to the integral with half as many cells per axis.
    pub error: f64,
    pub nodes: usize,
}

fn integrate_at<F: PointwiseForm>(alpha: &F, c: &Chain, coarse: bool) -> f64 {
    let parts: Vec<f64> = c
        .terms
        .par_iter()
        .map(|(w, p)| {
            let cells = if coarse { p.cells } else { 2 * p.cells };
            *w as f64 * p.integrate_cells(alpha, cells)
        })
        .collect();
    parts.iter().sum()
}

/// `∫_c α` with an error estimate from one refinement.
pub fn integrate_form<F: PointwiseForm>(alpha: &F, c: &Chain) -> Result<Integral> {
    if alpha.degree() != c.dim {
        return Err(Error::Degree(format!("{}-form integrated over a {}-chain", alpha.degree(), c.dim)));
    }
    if alpha.dim() != c.ambient {
        return Err(Error::Dimension(format!("form on ℝ^{} and chain in ℝ^{}", alpha.dim(), c.ambient)));
    }
    let coarse = integrate_at(alpha, c, true);
    let fine = integrate_at(alpha, c, false);
    let nodes = c.terms.iter().map(|(_, p)| (2 * p.cells * p.order).pow(p.dim() as u32)).sum();
    Ok(Integral { value: fine, error: (fine - coarse).abs(), nodes })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StokesVerdict {
    pub pass: bool,
    /// `∫_c dα`.
    pub interior: f64,
    /// `∫_{∂c} α`.
    pub boundary: f64,
    pub residual: f64,
    pub error_estimate: f64,
    pub tol: f64,
}

pub fn check_stokes(alpha: &FormField, c: &Chain, m: Option<&Manifold>, tol: f64) -> Result<StokesVerdict> {
    if alpha.degree() + 1 != c.dim {
        return Err(Error::Degree(format!("{}-form on a {}-chain", alpha.degree(), c.dim)));
    }
    let lhs = integrate_form(&alpha.d(), c)?;
    let bd = c.boundary(m)?;
    let rhs = if bd.is_empty() { Integral { value: 0.0, error: 0.0, nodes: 0 } } else { integrate_form(alpha, &bd)? };
    let residual = (lhs.value - rhs.value).abs();
    Ok(StokesVerdict {
        pass: residual <= tol,
        interior: lhs.value,
        boundary: rhs.value,
        residual,
        error_estimate: lhs.error + rhs.error,
        tol,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LegendrianVerdict {
    pub is_legendrian: bool,
    /// Sup of the pulled-back `β` over all nodes.
    pub sup: f64,
    pub nodes: usize,
    pub tol: f64,
}

pub fn is_legendrian(c: &Chain, beta: &FormField, tol: f64) -> LegendrianVerdict {
    let mut sup: f64 = 0.0;
    let mut nodes = 0;
    if c.dim > 0 {
        for (_, p) in &c.terms {
            for (u, _) in p.nodes(p.cells) {
                let b: Covector<f64> = beta.eval_at(&p.point(&u));
                sup = sup.max(b.pullback(&p.jacobian_at(&u)).max_abs());
                nodes += 1;
            }
        }
    }
    LegendrianVerdict { is_legendrian: sup <= tol, sup, nodes, tol }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BoundaryIdentityVerdict {
    pub pass: bool,
    /// `∫_Σ h`.
    pub interior: f64,
    /// `−∫_{∂Σ} θ`.
    pub boundary: f64,
    pub residual: f64,
    /// Sup over nodes of `|h + dθ − (dβ)^k|` pulled back to `Σ`.
    pub decomposition_residual: f64,
    pub boundary_legendrian: LegendrianVerdict,
    pub tol: f64,
}

/// `∫_Σ h = −∫_{∂Σ} θ` for a `2k`-chain with Legendrian boundary and
/// `h + dθ = (dβ)^k` on `Σ`.
pub fn legendrian_boundary_identity(
    ctx: &ContactData,
    sigma: &Chain,
    h: &FormField,
    theta: &FormField,
    tol: f64,
) -> Result<BoundaryIdentityVerdict> {
    if !sigma.dim.is_multiple_of(2) || sigma.dim == 0 {
        return Err(Error::Degree(format!("Σ must have positive even dimension, got {}", sigma.dim)));
    }
    let k = sigma.dim / 2;
    let m = &ctx.manifold;
    let bd = sigma.boundary(Some(m))?;
    let leg = is_legendrian(&bd, &ctx.beta, tol);
    if !leg.is_legendrian {
        return Err(Error::Precondition(format!("∂Σ is not Legendrian (sup |β| = {:e})", leg.sup)));
    }
    let defect = h.add(&theta.d())?.sub(&ctx.dbeta.power(k)?)?;
    let mut dec: f64 = 0.0;
    for (_, p) in &sigma.terms {
        for (u, _) in p.nodes(p.cells) {
            dec = dec.max(defect.eval_at(&p.point(&u)).pullback(&p.jacobian_at(&u)).max_abs());
        }
    }
    if dec > tol {
        return Err(Error::Precondition(format!("h + dθ ≠ (dβ)^{k} on Σ (sup residual {dec:e})")));
    }
    let lhs = integrate_form(h, sigma)?.value;
    let rhs = if bd.is_empty() { 0.0 } else { -integrate_form(theta, &bd)?.value };
    let residual = (lhs - rhs).abs();
    Ok(BoundaryIdentityVerdict {
        pass: residual <= tol,
        interior: lhs,
        boundary: rhs,
        residual,
        decomposition_residual: dec,
        boundary_legendrian: leg,
        tol,
    })
}

/// `∫_Λ θ` over a closed Legendrian chain.
pub fn theta_functional(ctx: &ContactData, lambda: &Chain, theta: &FormField, tol: f64) -> Result<f64> {
    let leg = is_legendrian(lambda, &ctx.beta, tol);
    if !leg.is_legendrian {
        return Err(Error::Precondition(format!("chain is not Legendrian (sup |β| = {:e})", leg.sup)));
    }
    if lambda.dim > 0 && !lambda.boundary(Some(&ctx.manifold))?.is_empty() {
        return Err(Error::Precondition("chain is not closed".into()));
    }
    Ok(integrate_form(theta, lambda)?.value)
}

/// Parametrization of a closed fixture by one patch, positively oriented
/// with respect to the fixture orientation: the coordinate box of an
/// all-periodic chart, or Hopf coordinates on a round 3-sphere.
pub fn whole_manifold_chain(m: &Manifold, order: usize, cells: usize) -> Result<Chain> {
    let dim = m.dim();
    let (map, check_on) = match &m.kind {
        Kind::Chart if m.is_closed() => {
            let comps = m
                .bounds
                .iter()
                .enumerate()
                .map(|(i, b)| Expr::real(b.lo).add(&Expr::real(b.width()).mul(&Expr::var(i))))
                .collect();
            (SmoothMap::new(dim, comps)?, false)
        }
        Kind::LevelSet { target, .. } if m.ambient_dim() == 4 && *target > 0.0 => {
            let r = Expr::real(target.sqrt());
            let eta = Expr::real(std::f64::consts::FRAC_PI_2).mul(&Expr::var(0));
            let t1 = Expr::real(2.0 * std::f64::consts::PI).mul(&Expr::var(1));
            let t2 = Expr::real(2.0 * std::f64::consts::PI).mul(&Expr::var(2));
            let (c, s) = (r.mul(&eta.cos()), r.mul(&eta.sin()));
            (SmoothMap::new(3, vec![c.mul(&t1.cos()), c.mul(&t1.sin()), s.mul(&t2.cos()), s.mul(&t2.sin())])?, true)
        }
        _ => return Err(Error::Precondition(format!("no global parametrization for '{}'", m.name))),
    };
    let mut patch = ParamPatch::new(map, 1, order).with_cells(cells);
    if check_on {
        let chk = patch.validate(m);
        if chk.max_constraint_residual > 1e-9 {
            return Err(Error::Precondition(format!("'{}' is not a round 3-sphere in Hopf coordinates", m.name)));
        }
    }
    let u = [0.37, 0.41, 0.53];
    let j = patch.jacobian_at(&u);
    let det = match m.normal(&patch.point(&u)) {
        None => j.det(),
        Some(n) => {
            let mut cols = vec![n];
            cols.extend((0..j.cols).map(|c| j.column(c)));
            Mat::from_columns(&cols).det()
        }
    };
    patch.orientation = if det < 0.0 { -1 } else { 1 };
    Ok(Chain::single(patch))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CyclePairing {
    /// `∫ α(v) β∧(dβ)ⁿ` over the fixture with its orientation.
    pub value: f64,
    pub error: f64,
    pub sign: i32,
    /// `∫ β∧(dβ)ⁿ`, the total mass of the (unnormalized) measure; the
    /// integration orientation is chosen to make it positive.
    pub total_mass: f64,
    pub orientation_note: String,
}

/// Pairing of the asymptotic cycle of the Reeb flow with a closed 1-form.
pub fn asymptotic_cycle_pairing(ctx: &ContactData, alpha: &FormField, order: usize, cells: usize, tol: f64) -> Result<CyclePairing> {
    let m = &ctx.manifold;
    if !m.is_closed() {
        return Err(Error::Precondition(format!("'{}' has boundary or is not compact", m.name)));
    }
    if alpha.degree() != 1 {
        return Err(Error::Degree("the pairing takes a 1-form".into()));
    }
    let da = alpha.d();
    if !da.is_zero() {
        let pts = m.sample(64, 17);
        let sup = pts.iter().map(|p| crate::contact::tangential_sup(m, p, &da.eval_at(p))).fold(0.0, f64::max);
        if sup > tol {
            return Err(Error::Precondition(format!("α is not closed (sup |dα| = {sup:e})")));
        }
    }
    let mut chain = whole_manifold_chain(m, order, cells)?;
    let vol = ctx.volume_form();
    let mut mass = integrate_form(&vol, &chain)?;
    let flipped = mass.value < 0.0;
    if flipped {
        chain.terms[0].1.orientation *= -1;
        mass.value = -mass.value;
    }
    let f = alpha.interior(&ctx.reeb)?;
    let integrand = vol.scale(f.coeff(0).unwrap_or(&Expr::zero()));
    let i = integrate_form(&integrand, &chain)?;
    Ok(CyclePairing {
        value: i.value,
        error: i.error,
        sign: if i.value.abs() <= tol { 0 } else if i.value > 0.0 { 1 } else { -1 },
        total_mass: mass.value,
        orientation_note: format!(
            "orientation of β∧(dβ)ⁿ, which {} the fixture orientation ({})",
            if flipped { "reverses" } else { "agrees with" },
            match m.kind {
                Kind::Chart => "coordinate order",
                Kind::LevelSet { .. } => "outward normal first",
            }
        ),
    })
}

/// Monte Carlo counterpart of [`asymptotic_cycle_pairing`]: time averages
/// of `α(v)` along Reeb trajectories from sample points, times the total
/// mass.
pub fn flow_average_pairing(ctx: &ContactData, alpha: &FormField, samples: usize, horizon: f64, total_mass: f64) -> Result<f64> {
    let f = alpha.interior(&ctx.reeb)?;
    let f = f.coeff(0).cloned().unwrap_or_else(Expr::zero);
    let pts = ctx.manifold.sample(samples, 29);
    let grid: Vec<f64> = (1..=400).map(|i| horizon * i as f64 / 400.0).collect();
    let avgs: Vec<Result<f64>> = pts
        .par_iter()
        .map(|p| {
            let seg = crate::flow::Flow::reeb(ctx, 1e-10).run(p, &[], horizon, &grid)?;
            let vals: Vec<f64> = seg.points.iter().map(|q| f.eval(q)).collect();
            let mut s = 0.0;
            for i in 1..vals.len() {
                s += 0.5 * (vals[i] + vals[i - 1]) * (seg.times[i] - seg.times[i - 1]);
            }
            Ok(s / seg.end_time())
        })
        .collect();
    let mut sum = 0.0;
    for a in avgs {
        sum += a?;
    }
    Ok(sum / pts.len() as f64 * total_mass)
}

/// Named chains on the catalog fixtures.
pub mod examples {
    use super::*;

    fn patch(params: &[&str], comps: &[&str]) -> ParamPatch {
        ParamPatch::parse(params, comps, 1, DEFAULT_ORDER).expect("built-in chain parses")
    }

    /// Unit square in the plane `z = 0` of a 3-dimensional chart.
    pub fn unit_square() -> Chain {
        Chain::single(patch(&["u", "v"], &["u", "v", "0"]))
    }

    /// Segment `t ↦ (a + t(b − a))`.
    pub fn segment(a: &[f64], b: &[f64]) -> Chain {
        let comps: Vec<Expr> =
            a.iter().zip(b).map(|(x, y)| Expr::real(*x).add(&Expr::real(y - x).mul(&Expr::var(0)))).collect();
        Chain::single(ParamPatch::new(SmoothMap::new(1, comps).unwrap(), 1, DEFAULT_ORDER))
    }

    /// Closed Legendrian loop in the cube for `β = dz − y dx`: its
    /// `xy`-projection encloses zero signed area.
    pub fn cube_legendrian_loop() -> [String; 3] {
        [
            "1/2 + 3/10*cos(2*pi*u)".into(),
            "1/2 + 3/10*sin(4*pi*u)".into(),
            "1/2 + 3/20*(cos(2*pi*u) - 1) - 9/200*sin(2*pi*u) + 3/200*sin(6*pi*u)".into(),
        ]
    }

    /// Cone over [`cube_legendrian_loop`] from the apex `(½, ½, ½)`; a ruled
    /// surface whose boundary is the Legendrian loop.
    pub fn cube_legendrian_cone() -> Chain {
        let apex = ["1/2", "1/2", "1/2"];
        let lp = cube_legendrian_loop();
        let comps: Vec<String> = (0..3).map(|i| format!("{} + v*(({}) - {})", apex[i], lp[i].replace("pi", PI_TEXT), apex[i])).collect();
        let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
        Chain::single(patch(&["u", "v"], &refs)).refined(2)
    }

    /// [`cube_legendrian_loop`] as a closed 1-chain.
    pub fn cube_legendrian_curve() -> Chain {
        let lp = cube_legendrian_loop();
        let comps: Vec<String> = lp.iter().map(|c| c.replace("pi", PI_TEXT)).collect();
        let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
        Chain::single(patch(&["u"], &refs)).refined(8)
    }

    /// Hemisphere of `S³ ∩ {y₁ = 0}` bounded by the Legendrian great circle
    /// `(cos t, 0, sin t, 0)`.
    pub fn s3_legendrian_hemisphere() -> Chain {
        let c = format!("{}*u", std::f64::consts::FRAC_PI_2);
        let t = format!("{}*v", 2.0 * std::f64::consts::PI);
        let comps = [format!("sin({c})*cos({t})"), "0".into(), format!("sin({c})*sin({t})"), format!("cos({c})")];
        let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
        Chain::single(patch(&["u", "v"], &refs))
    }

    /// The closed 2-sphere `S³ ∩ {y₁ = 0}`.
    pub fn s3_great_sphere() -> Chain {
        let c = format!("{}*u", std::f64::consts::PI);
        let t = format!("{}*v", 2.0 * std::f64::consts::PI);
        let comps = [format!("sin({c})*cos({t})"), "0".into(), format!("sin({c})*sin({t})"), format!("cos({c})")];
        let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
        Chain::single(patch(&["u", "v"], &refs))
    }

    /// Legendrian great circle `(cos t, 0, sin t, 0)` in `S³`.
    pub fn s3_legendrian_circle() -> Chain {
        let t = format!("{}*u", 2.0 * std::f64::consts::PI);
        let comps = [format!("cos({t})"), "0".into(), format!("sin({t})"), "0".into()];
        let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
        Chain::single(patch(&["u"], &refs)).refined(4)
    }

    /// Coordinate 2-torus `{z = z₀}` in `T³ = [0, 2π)³`.
    pub fn t3_torus(z0: f64) -> Chain {
        let tp = 2.0 * std::f64::consts::PI;
        let comps = [format!("{tp}*u"), format!("{tp}*v"), format!("{z0}")];
        let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
        Chain::single(patch(&["u", "v"], &refs))
    }

    const PI_TEXT: &str = "3.141592653589793";
}

/// Parses a patch map from text; shorthand for tests and the CLI.
pub fn parse_map(params: &[&str], comps: &[&str]) -> Result<SmoothMap> {
    let names: Vec<String> = params.iter().map(|s| s.to_string()).collect();
    let c = comps.iter().map(|s| parse(s, &names)).collect::<Result<Vec<_>>>()?;
    SmoothMap::new(params.len(), c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_fixture;

    #[test]
    fn square_integrals() {
        let sq = examples::unit_square();
        let c = crate::contact::names(&["x", "y", "z"]);
        let a = FormField::parse(&[("dx^dy", "1")], &c).unwrap();
        assert!((integrate_form(&a, &sq).unwrap().value - 1.0).abs() < 1e-14);
        let s = check_stokes(&FormField::parse(&[("dy", "x")], &c).unwrap(), &sq, None, 1e-12).unwrap();
        assert!(s.pass && (s.boundary - 1.0).abs() < 1e-13, "{s:?}");
        assert!(sq.boundary_of_boundary_vanishes().unwrap());
    }

    #[test]
    fn legendrian_examples() {
        let f = load_fixture("std-r3").unwrap();
        let b = &f.ctx.beta;
        assert!(is_legendrian(&examples::segment(&[-1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]), b, 1e-14).is_legendrian);
        assert!(is_legendrian(&examples::segment(&[0.0, -1.0, 0.0], &[0.0, 1.0, 0.0]), b, 1e-14).is_legendrian);
        assert!(!is_legendrian(&examples::segment(&[0.0, 1.0, 0.0], &[1.0, 1.0, 0.0]), b, 1e-14).is_legendrian);
    }

    #[test]
    fn cube_cone_boundary_identity() {
        let f = load_fixture("cube").unwrap();
        let sigma = examples::cube_legendrian_cone();
        let bd = sigma.boundary(Some(&f.ctx.manifold)).unwrap();
        assert_eq!(bd.terms.len(), 1);
        let c = &f.ctx.manifold.coords;
        let h = FormField::zero(3, 2);
        let theta = FormField::parse(&[("dx", "-y")], c).unwrap();
        let v = legendrian_boundary_identity(&f.ctx, &sigma, &h, &theta, 1e-9).unwrap();
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn closed_fixture_pairings() {
        let f = load_fixture("t3").unwrap();
        let c = &f.ctx.manifold.coords;
        let dx = FormField::parse(&[("dx", "1")], c).unwrap();
        let p = asymptotic_cycle_pairing(&f.ctx, &dx, 8, 2, 1e-9).unwrap();
        assert!(p.value.abs() < 1e-9 && p.total_mass > 0.0, "{p:?}");
        let s = load_fixture("s3-hopf").unwrap();
        let chain = whole_manifold_chain(&s.ctx.manifold, 8, 2).unwrap();
        let mass = integrate_form(&s.ctx.volume_form(), &chain).unwrap();
        // β∧dβ = 2·vol on the unit sphere, and vol(S³) = 2π².
        assert!((mass.value - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-10, "{mass:?}");
    }
}
