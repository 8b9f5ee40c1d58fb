//! Compatible almost-Kähler data on the contact distribution.

use std::any::TypeId;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use super::algebra::SymplecticAlgebra;
use crate::contact::{gram, ContactData};
use crate::error::{Error, Result};
use crate::exterior::Covector;
use crate::expr::{parse, Expr};
use crate::linalg::{axpy, dot, Mat};
use crate::scalar::Scalar;

const CACHE_LIMIT: usize = 1 << 17;

/// Seed metric `g₀` on the ambient coordinates.
#[derive(Clone, Debug, Default)]
pub enum SeedMetric {
    #[default]
    Euclidean,
    /// Symmetric matrix of coefficient expressions.
    Field(Vec<Vec<Expr>>),
}

impl SeedMetric {
    pub fn parse(rows: &[Vec<&str>], coords: &[String]) -> Result<Self> {
        let m = coords.len();
        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension(format!("seed metric must be {m}×{m}")));
        }
        let g: Vec<Vec<Expr>> =
            rows.iter().map(|r| r.iter().map(|s| parse(s, coords)).collect::<Result<_>>()).collect::<Result<_>>()?;
        for i in 0..m {
            for j in 0..i {
                if g[i][j] != g[j][i] {
                    return Err(Error::Structure("seed metric is not symmetric".into()));
                }
            }
        }
        Ok(SeedMetric::Field(g))
    }

    pub fn at<T: Scalar>(&self, p: &[T]) -> Mat<T> {
        match self {
            SeedMetric::Euclidean => Mat::identity(p.len()),
            SeedMetric::Field(g) => Mat::from_fn(g.len(), g.len(), |i, j| g[i][j].eval(p)),
        }
    }
}

/// Everything transversal at one point.
#[derive(Clone, Debug)]
pub struct PointFrame<T> {
    /// Symplectic frame of `ξ` the construction started from.
    pub symplectic: Vec<Vec<T>>,
    /// `J` in the symplectic frame.
    pub j_symplectic: Mat<T>,
    /// Unitary frame `u₁, J u₁, u₂, J u₂, …` (columns, ambient components).
    pub frame: Mat<T>,
    /// Dual coframe `θ¹, …, θ²ⁿ` (rows), vanishing on `v` and the normal.
    pub coframe: Mat<T>,
    pub reeb: Vec<T>,
    pub beta: Covector<T>,
}

impl<T: Scalar> PointFrame<T> {
    /// Components of an ambient covector in the unitary frame.
    pub fn components(&self, c: &Covector<T>) -> Covector<T> {
        c.pullback(&self.frame)
    }

    /// Ambient covector with the given unitary-frame components, vanishing on
    /// `v` (and the normal).
    pub fn reconstruct(&self, c: &Covector<T>) -> Covector<T> {
        c.pullback(&self.coframe)
    }

    /// `J` as an ambient linear map, extended by zero on `v` and the normal.
    pub fn j_ambient(&self) -> Mat<T> {
        let n = self.frame.cols / 2;
        let jm = super::algebra::standard_j(n).data.iter().map(|&x| T::of(x)).collect();
        let jm = Mat { rows: 2 * n, cols: 2 * n, data: jm };
        self.frame.mul(&jm).mul(&self.coframe)
    }

    /// Compatible metric `g = β⊗β + Σ θⁱ⊗θⁱ` on tangent vectors.
    pub fn metric(&self) -> Mat<T> {
        let m = self.coframe.cols;
        Mat::from_fn(m, m, |a, b| {
            let mut s = self.beta.c[a] * self.beta.c[b];
            for i in 0..self.coframe.rows {
                s += self.coframe[(i, a)] * self.coframe[(i, b)];
            }
            s
        })
    }
}

impl PointFrame<f64> {
    fn lift<U: Scalar>(&self) -> PointFrame<U> {
        let m = |a: &Mat<f64>| Mat { rows: a.rows, cols: a.cols, data: a.data.iter().map(|&x| U::of(x)).collect() };
        let v = |a: &[f64]| a.iter().map(|&x| U::of(x)).collect::<Vec<U>>();
        PointFrame {
            symplectic: self.symplectic.iter().map(|s| v(s)).collect(),
            j_symplectic: m(&self.j_symplectic),
            frame: m(&self.frame),
            coframe: m(&self.coframe),
            reeb: v(&self.reeb),
            beta: self.beta.map(U::of),
        }
    }
}

/// Compatible metric and complex structure on `ξ_β`, with the operator
/// algebra of the matching dimension.
pub struct TransversalHodge {
    pub ctx: ContactData,
    pub seed: SeedMetric,
    pub algebra: SymplecticAlgebra,
    cache: RwLock<HashMap<Vec<u64>, Arc<PointFrame<f64>>>>,
}

impl std::fmt::Debug for TransversalHodge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransversalHodge").field("n", &self.ctx.n).field("seed", &self.seed).finish()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CompatibilityReport {
    pub pass: bool,
    /// `sup |g(v, e)|` over frame vectors `e` of `ξ`.
    pub reeb_orthogonality: f64,
    /// `sup |g(v, v) − 1|`.
    pub reeb_norm: f64,
    /// `sup |dβ(a, b) − g(Ja, b)|`.
    pub metric_compatibility: f64,
    /// `sup |dβ(Ja, Jb) − dβ(a, b)|`.
    pub j_invariance: f64,
    /// `sup |J²a + a|`.
    pub j_squared: f64,
    /// Smallest eigenvalue of `g` on `ξ` over the samples.
    pub min_metric_eigenvalue: f64,
    pub samples: usize,
    pub tol: f64,
}

impl TransversalHodge {
    /// Builds `(g, J)` from the contact data and a seed metric and checks
    /// that the construction succeeds on a few sample points.
    pub fn build(ctx: ContactData, seed: SeedMetric) -> Result<Self> {
        if let SeedMetric::Field(g) = &seed {
            if g.len() != ctx.ambient_dim() {
                return Err(Error::Dimension("seed metric size differs from the coordinate count".into()));
            }
        }
        let h = TransversalHodge {
            algebra: SymplecticAlgebra::new(ctx.n),
            ctx,
            seed,
            cache: RwLock::new(HashMap::new()),
        };
        for p in h.ctx.manifold.sample(8, 977) {
            h.frame_at(&p)?;
        }
        Ok(h)
    }

    pub fn euclidean(ctx: ContactData) -> Result<Self> {
        Self::build(ctx, SeedMetric::Euclidean)
    }

    pub fn n(&self) -> usize {
        self.ctx.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.ctx.ambient_dim()
    }

    /// Frame data at `p`. `f64` evaluations go through the cache.
    pub fn frame_at<T: Scalar>(&self, p: &[T]) -> Result<PointFrame<T>> {
        if TypeId::of::<T>() == TypeId::of::<f64>() {
            let q: Vec<f64> = p.iter().map(|x| x.value()).collect();
            return Ok(self.cached_frame(&q)?.lift());
        }
        self.compute_frame(p)
    }

    pub fn cached_frame(&self, p: &[f64]) -> Result<Arc<PointFrame<f64>>> {
        let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
        if let Some(f) = self.cache.read().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let f = Arc::new(self.compute_frame(p)?);
        let mut w = self.cache.write().unwrap();
        if w.len() >= CACHE_LIMIT {
            return Ok(f);
        }
        Ok(w.entry(key).or_insert(f).clone())
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().unwrap().len()
    }

    fn compute_frame<T: Scalar>(&self, p: &[T]) -> Result<PointFrame<T>> {
        let ctx = &self.ctx;
        let s = ctx.symplectic_frame(p)?;
        let d = s.len();
        let beta = ctx.beta.eval_at(p);
        let dbeta = ctx.dbeta.eval_at(p);
        let q = ctx.manifold.reduce(p);
        let g_seed = self.seed.at(&q);
        let g0 = Mat::from_fn(d, d, |i, j| dot(&s[i], &g_seed.mul_vec(&s[j])));
        let om = gram(&dbeta, &s);
        // dβ(u, w) = g₀(Au, w)  ⇒  A = −G₀⁻¹Ω in frame coordinates.
        let a = g0.solve(&om).map_err(|_| Error::ContactViolation("seed metric degenerate on ξ".into()))?.scale(-T::one());
        let (_, inv_sqrt) = a
            .mul(&a)
            .scale(-T::one())
            .sqrt_and_inv_sqrt()
            .map_err(|_| Error::ContactViolation("skew map A is not invertible".into()))?;
        let jc = a.mul(&inv_sqrt);
        let gx = om.mul(&jc);
        let ip = |x: &[T], y: &[T]| dot(x, &gx.mul_vec(y));
        let scale = gx.max_abs().max(1e-300);
        let mut unit: Vec<Vec<T>> = Vec::with_capacity(d);
        for cand in 0..d {
            if unit.len() == d {
                break;
            }
            let mut x: Vec<T> = (0..d).map(|i| if i == cand { T::one() } else { T::zero() }).collect();
            for _ in 0..2 {
                for b in &unit {
                    let c = ip(&x, b);
                    axpy(-c, b, &mut x);
                }
            }
            let nn = ip(&x, &x);
            if nn.value() <= 1e-10 * scale {
                continue;
            }
            let r = nn.sqrt();
            let x: Vec<T> = x.iter().map(|&t| t / r).collect();
            let y = jc.mul_vec(&x);
            unit.push(x);
            unit.push(y);
        }
        if unit.len() != d {
            return Err(Error::ContactViolation("no unitary frame (degenerate compatible metric)".into()));
        }
        let m = p.len();
        let ambient: Vec<Vec<T>> = unit
            .iter()
            .map(|c| {
                let mut u = vec![T::zero(); m];
                for (ci, si) in c.iter().zip(&s) {
                    axpy(*ci, si, &mut u);
                }
                u
            })
            .collect();
        let reeb = ctx.reeb_at(p);
        let mut cols = ambient.clone();
        cols.push(reeb.clone());
        if let Some(nrm) = ctx.manifold.normal(&q) {
            cols.push(nrm);
        }
        let inv = Mat::from_columns(&cols)
            .inverse()
            .map_err(|_| Error::ContactViolation("Reeb field tangent to ξ".into()))?;
        let coframe = Mat::from_fn(d, m, |i, j| inv[(i, j)]);
        Ok(PointFrame {
            symplectic: s,
            j_symplectic: jc,
            frame: Mat::from_columns(&ambient),
            coframe,
            reeb,
            beta,
        })
    }

    /// Re-verifies `v ⊥ ξ`, `|v| = 1`, `dβ = g(J·,·)` and `J`-invariance of
    /// `dβ` at quasi-random samples.
    pub fn check_compatibility(&self, samples: usize, seed: u64, tol: f64) -> Result<CompatibilityReport> {
        let pts = self.ctx.manifold.sample(samples, seed);
        let mut r = CompatibilityReport {
            pass: false,
            reeb_orthogonality: 0.0,
            reeb_norm: 0.0,
            metric_compatibility: 0.0,
            j_invariance: 0.0,
            j_squared: 0.0,
            min_metric_eigenvalue: f64::INFINITY,
            samples: pts.len(),
            tol,
        };
        for p in &pts {
            let f = self.compute_frame(p)?;
            let g = f.metric();
            let jm = f.j_ambient();
            let w = self.ctx.dbeta.eval_at(p);
            let gb = |a: &[f64], b: &[f64]| dot(a, &g.mul_vec(b));
            let v = &f.reeb;
            r.reeb_norm = r.reeb_norm.max((gb(v, v) - 1.0).abs());
            let es = &f.symplectic;
            for a in es {
                r.reeb_orthogonality = r.reeb_orthogonality.max(gb(v, a).abs());
                let ja = jm.mul_vec(a);
                let jja = jm.mul_vec(&ja);
                let dev = ja.iter().zip(&jja).zip(a).map(|((_, x), y)| (x + y).abs()).fold(0.0, f64::max);
                r.j_squared = r.j_squared.max(dev);
                for b in es {
                    let jb = jm.mul_vec(b);
                    let wab = w.eval(&[a.clone(), b.clone()]);
                    r.metric_compatibility = r.metric_compatibility.max((wab - gb(&ja, b)).abs());
                    r.j_invariance = r.j_invariance.max((w.eval(&[ja.clone(), jb]) - wab).abs());
                }
            }
            let gram_xi = Mat::from_fn(es.len(), es.len(), |i, j| gb(&es[i], &es[j]));
            let eig = nalgebra::SymmetricEigen::new(crate::linalg::to_dmatrix(&gram_xi));
            r.min_metric_eigenvalue = r.min_metric_eigenvalue.min(eig.eigenvalues.min());
        }
        r.pass = r.reeb_orthogonality <= tol
            && r.reeb_norm <= tol
            && r.metric_compatibility <= tol
            && r.j_invariance <= tol
            && r.j_squared <= tol
            && r.min_metric_eigenvalue > 0.0;
        Ok(r)
    }

    /// `J` applied to a tangent vector at `p` (`J v = 0`).
    pub fn apply_j(&self, p: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.cached_frame(p)?.j_ambient().mul_vec(u))
    }

    /// Compatible metric at `p` as an ambient bilinear form.
    pub fn metric_at(&self, p: &[f64]) -> Result<Mat<f64>> {
        Ok(self.cached_frame(p)?.metric())
    }

    /// `sup` over frame vectors of `|v⌟κ|`.
    pub fn horizontality_defect(&self, p: &[f64], c: &Covector<f64>) -> Result<f64> {
        if c.k == 0 {
            return Ok(0.0);
        }
        let f = self.cached_frame(p)?;
        let iv = c.interior(&f.reeb);
        let mut cols: Vec<Vec<f64>> = (0..f.frame.cols).map(|j| f.frame.column(j)).collect();
        cols.push(f.reeb.clone());
        Ok(iv.pullback(&Mat::from_columns(&cols)).max_abs())
    }

    /// Pairing `K(κ, ρ)` of two horizontal `p`-covectors at `pt`.
    pub fn pairing_k(&self, kappa: &Covector<f64>, rho: &Covector<f64>, pt: &[f64], tol: f64) -> Result<f64> {
        if kappa.k != rho.k {
            return Err(Error::Degree(format!("pairing of degrees {} and {}", kappa.k, rho.k)));
        }
        for c in [kappa, rho] {
            let h = self.horizontality_defect(pt, c)?;
            if h > tol {
                return Err(Error::Precondition(format!("form is not horizontal at {pt:?} (|v⌟κ| = {h:e})")));
            }
        }
        let p = kappa.k;
        if p > 2 * self.n() {
            return Ok(0.0);
        }
        let f = self.cached_frame(pt)?;
        let a = f.components(kappa);
        let b = f.components(rho);
        let kb = self.algebra.pairing[p].mul_vec(&b.c);
        Ok(dot(&a.c, &kb))
    }
}
