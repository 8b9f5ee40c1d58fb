//! Contact forms: verification, Reeb fields, basic-form verdicts, symplectic
//! frames of the contact distribution and naturality under immersions.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{Covector, Exterior, FormField, PointwiseForm, SmoothMap, VectorField};
use crate::expr::{Expr, Number};
use crate::linalg::Mat;
use crate::manifold::Manifold;
use crate::scalar::Scalar;

/// Number of on-manifold samples used to recognise a constant `β(w)`.
const REEB_FIT_SAMPLES: usize = 64;

/// Largest absolute frame component of `c` restricted to the tangent space
/// at `p`, measured on the orthonormal orientation frame.
pub fn tangential_sup(m: &Manifold, p: &[f64], c: &Covector<f64>) -> f64 {
    if c.k == 0 {
        return c.max_abs();
    }
    let frame = m.orientation_frame(p);
    c.pullback(&Mat::from_columns(&frame)).max_abs()
}

/// Value of `β ∧ (dβ)^n` on the orientation frame.
fn density(m: &Manifold, top: &FormField, p: &[f64]) -> f64 {
    let frame = m.orientation_frame(p);
    top.eval_at(p).eval(&frame)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ContactVerdict {
    pub pass: bool,
    /// Minimum of `|β∧(dβ)^n|` over the samples.
    pub min_density: f64,
    pub max_density: f64,
    pub samples: usize,
    pub tol: f64,
}

/// Checks `β ∧ (dβ)^n ≠ 0` at quasi-random samples.
pub fn check_contact(m: &Manifold, beta: &FormField, samples: usize, seed: u64, tol: f64) -> Result<ContactVerdict> {
    let dim = m.dim();
    if dim.is_multiple_of(2) {
        return Err(Error::Structure(format!("contact forms need odd dimension, manifold has dimension {dim}")));
    }
    check_form_on(m, beta)?;
    let n = (dim - 1) / 2;
    let top = beta.wedge(&beta.d().power(n)?)?;
    let pts = m.sample(samples, seed);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for p in &pts {
        let d = density(m, &top, p).abs();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok(ContactVerdict { pass: lo > tol, min_density: lo, max_density: hi, samples: pts.len(), tol })
}

fn check_form_on(m: &Manifold, a: &FormField) -> Result<()> {
    if a.dim() != m.ambient_dim() {
        return Err(Error::Dimension(format!(
            "form on {} coordinates, manifold '{}' has {}",
            a.dim(),
            m.name,
            m.ambient_dim()
        )));
    }
    Ok(())
}

/// How the Reeb field expression was obtained.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub enum ReebNormalization {
    /// `β(w)` is constant on the manifold and was replaced by this value.
    Constant(f64),
    /// `v = w / β(w)` kept as a quotient of expressions.
    Quotient,
}

/// Vector `w` with `w ⌟ vol = η` for an `(m−1)`-form `η` in `m` coordinates.
fn dual_vector(eta: &FormField) -> Vec<Expr> {
    let m = eta.dim();
    (0..m)
        .map(|i| {
            let missing = ((1u32 << m) - 1) & !(1 << i);
            let c = eta.coeff(missing).cloned().unwrap_or_default();
            if i % 2 == 0 {
                c
            } else {
                c.neg()
            }
        })
        .collect()
}

/// Symbolic Reeb field. `w` spans the kernel of `dβ` on the tangent space
/// (`w⌟vol = (dβ)^n` on charts, `w⌟vol = dF∧(dβ)^n` on level sets) and is
/// normalized by `β(w)`.
pub fn reeb_field(m: &Manifold, beta: &FormField) -> Result<(VectorField, ReebNormalization)> {
    check_form_on(m, beta)?;
    let dim = m.dim();
    if dim.is_multiple_of(2) {
        return Err(Error::Structure(format!("Reeb fields need odd dimension, got {dim}")));
    }
    let n = (dim - 1) / 2;
    let omega_n = beta.d().power(n)?;
    let eta = match &m.kind {
        crate::manifold::Kind::Chart => omega_n,
        crate::manifold::Kind::LevelSet { constraint, .. } => {
            FormField::function(m.ambient_dim(), constraint.clone()).d().wedge(&omega_n)?
        }
    };
    let w = VectorField::new(dual_vector(&eta));
    let bw = beta.interior(&w)?.coeff(0).cloned().unwrap_or_default();
    if let Some(c) = bw.as_constant() {
        if c.is_zero() {
            return Err(Error::ContactViolation("β(w) vanishes identically".into()));
        }
        return Ok((w.scale(&Expr::constant(c.recip().unwrap())), ReebNormalization::Constant(c.to_f64())));
    }
    let pts = m.sample(REEB_FIT_SAMPLES, 0x5eeb);
    let vals: Vec<f64> = pts.iter().map(|p| bw.eval(p)).collect();
    if let Some(bad) = vals.iter().find(|v| v.abs() < 1e-12) {
        return Err(Error::ContactViolation(format!("β(w) = {bad:e} at a sample point")));
    }
    let c0 = vals[0];
    if vals.iter().all(|v| (v - c0).abs() <= 1e-12 * c0.abs().max(1.0)) {
        let c = snap(c0);
        return Ok((w.scale(&Expr::constant(c.recip().unwrap())), ReebNormalization::Constant(c.to_f64())));
    }
    let inv = bw.recip()?;
    Ok((w.scale(&inv), ReebNormalization::Quotient))
}

/// Rounds to a nearby simple rational when within round-off.
fn snap(x: f64) -> Number {
    for q in [1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0] {
        let y = (x * q).round();
        if (x * q - y).abs() <= 1e-10 * x.abs().max(1.0) {
            return Number::ratio(y as i64, q as i64);
        }
    }
    Number::Real(x)
}

/// Contact form with its derived data.
#[derive(Clone, Debug)]
pub struct ContactData {
    pub manifold: Arc<Manifold>,
    pub beta: FormField,
    pub dbeta: FormField,
    pub n: usize,
    pub reeb: VectorField,
    pub normalization: ReebNormalization,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ReebCheck {
    pub pass: bool,
    /// `sup |β(v) − 1|`.
    pub beta_residual: f64,
    /// `sup |tangential(v⌟dβ)|`.
    pub kernel_residual: f64,
    /// `sup |∇F·v|` (zero on charts).
    pub tangency_residual: f64,
    /// Largest deviation from the pointwise stacked-system solve.
    pub pointwise_deviation: f64,
    pub samples: usize,
    pub tol: f64,
}

impl ContactData {
    pub fn new(manifold: Arc<Manifold>, beta: FormField) -> Result<Self> {
        let (reeb, normalization) = reeb_field(&manifold, &beta)?;
        let dbeta = beta.d();
        let n = (manifold.dim() - 1) / 2;
        Ok(ContactData { manifold, beta, dbeta, n, reeb, normalization })
    }

    pub fn coords(&self) -> &[String] {
        &self.manifold.coords
    }

    pub fn ambient_dim(&self) -> usize {
        self.manifold.ambient_dim()
    }

    /// `β ∧ (dβ)^n`.
    pub fn volume_form(&self) -> FormField {
        self.beta.wedge(&self.dbeta.power(self.n).unwrap()).unwrap()
    }

    pub fn reeb_at<T: Scalar>(&self, p: &[T]) -> Vec<T> {
        self.reeb.eval(&self.manifold.reduce(p))
    }

    /// Reeb vector by solving the stacked system `(u⌟dβ = 0, β(u) = 1)`
    /// over a tangent basis at `p`, in the least-squares sense.
    pub fn reeb_pointwise(&self, p: &[f64]) -> Result<Vec<f64>> {
        let basis = self.manifold.tangent_basis(p);
        let m = basis.len();
        let b = self.beta.eval_at(p);
        let w = self.dbeta.eval_at(p);
        let rows = m + 1;
        let mut a = nalgebra::DMatrix::<f64>::zeros(rows, m);
        let mut rhs = nalgebra::DVector::<f64>::zeros(rows);
        for j in 0..m {
            for i in 0..m {
                a[(j, i)] = w.eval(&[basis[i].clone(), basis[j].clone()]);
            }
        }
        for i in 0..m {
            a[(m, i)] = b.eval(&[basis[i].clone()]);
        }
        rhs[m] = 1.0;
        let svd = a.clone().svd(true, true);
        let smin = svd.singular_values.min();
        if smin < 1e-12 * svd.singular_values.max() {
            return Err(Error::ContactViolation(format!("singular Reeb system at {p:?}")));
        }
        let solve = |r: &nalgebra::DVector<f64>| svd.solve(r, 1e-14).map_err(|e| Error::Structure(e.to_string()));
        let mut coef = solve(&rhs)?;
        // The bidiagonal iteration leaves ~1e-8 relative error on some inputs.
        for _ in 0..3 {
            let r = &rhs - &a * &coef;
            coef += solve(&r)?;
        }
        let mut v = vec![0.0; p.len()];
        for i in 0..m {
            for (vk, bk) in v.iter_mut().zip(&basis[i]) {
                *vk += coef[i] * bk;
            }
        }
        Ok(v)
    }

    /// Re-verifies the Reeb conditions at quasi-random samples.
    pub fn check_reeb(&self, samples: usize, seed: u64, tol: f64) -> Result<ReebCheck> {
        let pts = self.manifold.sample(samples, seed);
        let mut out = ReebCheck {
            pass: false,
            beta_residual: 0.0,
            kernel_residual: 0.0,
            tangency_residual: 0.0,
            pointwise_deviation: 0.0,
            samples: pts.len(),
            tol,
        };
        for p in &pts {
            let v = self.reeb_at(p);
            let bv = self.beta.eval_at(p).interior(&v);
            out.beta_residual = out.beta_residual.max((bv.c[0] - 1.0).abs());
            let k = self.dbeta.eval_at(p).interior(&v);
            out.kernel_residual = out.kernel_residual.max(tangential_sup(&self.manifold, p, &k));
            if let Some(g) = self.manifold.normal(p) {
                out.tangency_residual = out.tangency_residual.max(crate::linalg::dot(&g, &v).abs());
            }
            let vp = self.reeb_pointwise(p)?;
            let dev = v.iter().zip(&vp).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            out.pointwise_deviation = out.pointwise_deviation.max(dev);
        }
        out.pass = out.beta_residual <= tol
            && out.kernel_residual <= tol
            && out.tangency_residual <= tol
            && out.pointwise_deviation <= tol.max(1e-8);
        Ok(out)
    }

    /// Symplectic frame of `ξ = ker β` at `p`; see [`symplectic_frame_with`].
    pub fn symplectic_frame<T: Scalar>(&self, p: &[T]) -> Result<Vec<Vec<T>>> {
        symplectic_frame_with(&self.manifold, &self.beta.eval_at(p), &self.dbeta.eval_at(p), p)
    }
}

/// Symplectic basis `(e₁, …, e₂ₙ)` of `ker β` at `p` with
/// `dβ(e₂ᵢ₋₁, e₂ⱼ) = δᵢⱼ` and all other pairings zero.
///
/// Seed basis: tangent coordinate vectors; the one with the largest `|β|` is
/// the pivot and is used to project the others into `ker β`. Symplectic
/// Gram–Schmidt then pairs each vector with the remaining vector of largest
/// `|dβ|` pairing.
pub fn symplectic_frame_with<T: Scalar>(
    m: &Manifold,
    beta: &Covector<T>,
    dbeta: &Covector<T>,
    p: &[T],
) -> Result<Vec<Vec<T>>> {
    let basis = m.tangent_basis(p);
    let bvals: Vec<T> = basis.iter().map(|u| beta.eval(std::slice::from_ref(u))).collect();
    let pivot = (0..basis.len())
        .rev()
        .max_by(|&i, &j| bvals[i].value().abs().total_cmp(&bvals[j].value().abs()))
        .unwrap();
    if bvals[pivot].value().abs() < 1e-300 {
        return Err(Error::ContactViolation("β vanishes on the tangent space".into()));
    }
    let mut rest: Vec<Vec<T>> = Vec::new();
    for (i, u) in basis.iter().enumerate() {
        if i == pivot {
            continue;
        }
        let c = bvals[i] / bvals[pivot];
        rest.push(u.iter().zip(&basis[pivot]).map(|(&a, &b)| a - c * b).collect());
    }
    let omega = |u: &[T], w: &[T]| dbeta.eval(&[u.to_vec(), w.to_vec()]);
    let mut out = Vec::with_capacity(rest.len());
    let scale = dbeta.max_abs().max(1e-300);
    while !rest.is_empty() {
        let u = rest.remove(0);
        if rest.is_empty() {
            return Err(Error::ContactViolation("odd-dimensional contact distribution".into()));
        }
        let j = (0..rest.len())
            .max_by(|&a, &b| omega(&u, &rest[a]).value().abs().total_cmp(&omega(&u, &rest[b]).value().abs()))
            .unwrap();
        let w = rest.remove(j);
        let c = omega(&u, &w);
        let unorm = u.iter().map(|x| x.value().abs()).fold(0.0, f64::max);
        let wnorm = w.iter().map(|x| x.value().abs()).fold(0.0, f64::max);
        if c.value().abs() <= 1e-12 * scale * unorm * wnorm {
            return Err(Error::ContactViolation("dβ degenerate on ker β".into()));
        }
        let e2: Vec<T> = w.iter().map(|&x| x / c).collect();
        for x in rest.iter_mut() {
            let a = omega(x, &e2);
            let b = omega(x, &u);
            for ((xi, &e1i), &e2i) in x.iter_mut().zip(&u).zip(&e2) {
                *xi = *xi - a * e1i + b * e2i;
            }
        }
        out.push(u);
        out.push(e2);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BasicVerdict {
    pub is_basic: bool,
    /// `sup |v⌟α|` (tangential).
    pub sup_contraction: f64,
    /// `sup |v⌟dα|` (tangential).
    pub sup_contraction_of_d: f64,
    pub samples: usize,
    pub tol: f64,
    /// Both contractions simplified to the zero expression.
    pub symbolic: bool,
}

/// Sampled verdict on `v⌟α = 0` and `v⌟dα = 0`.
pub fn is_basic<F: PointwiseForm>(m: &Manifold, alpha: &F, v: &VectorField, samples: usize, seed: u64, tol: f64) -> BasicVerdict {
    let pts = m.sample(samples, seed);
    let k = alpha.degree();
    let (mut s1, mut s2) = (0.0f64, 0.0f64);
    for p in &pts {
        let q = m.reduce(p);
        let vp = v.eval(&q);
        if k > 0 {
            let c = alpha.at(p).interior(&vp);
            s1 = s1.max(tangential_sup(m, p, &c));
        }
        if k < alpha.dim() {
            let c = Exterior(alpha).at(p).interior(&vp);
            s2 = s2.max(tangential_sup(m, p, &c));
        }
    }
    BasicVerdict {
        is_basic: s1 <= tol && s2 <= tol,
        sup_contraction: s1,
        sup_contraction_of_d: s2,
        samples: pts.len(),
        tol,
        symbolic: false,
    }
}

/// [`is_basic`] for expression forms, with symbolic zero detection first.
pub fn is_basic_form(m: &Manifold, alpha: &FormField, v: &VectorField, samples: usize, seed: u64, tol: f64) -> Result<BasicVerdict> {
    let c1 = if alpha.degree() > 0 { alpha.interior(v)?.is_zero() } else { true };
    let c2 = alpha.degree() >= alpha.dim() || alpha.d().interior(v)?.is_zero();
    if c1 && c2 {
        return Ok(BasicVerdict {
            is_basic: true,
            sup_contraction: 0.0,
            sup_contraction_of_d: 0.0,
            samples: 0,
            tol,
            symbolic: true,
        });
    }
    Ok(is_basic(m, alpha, v, samples, seed, tol))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct NaturalityVerdict {
    pub pass: bool,
    /// `sup |Ψ*β_Y − β_X|`.
    pub beta_deviation: f64,
    /// `sup |Ψ*(dβ_Y)^ℓ − (dβ_X)^ℓ|`.
    pub power_deviation: f64,
    /// Largest basicness defect of pulled-back basic test forms.
    pub basic_defect: f64,
    pub ell: usize,
    pub samples: usize,
    pub tol: f64,
}

/// Checks that an immersion with `Ψ*β_Y = β_X` carries `(dβ_Y)^ℓ` to
/// `(dβ_X)^ℓ` and basic forms to basic forms.
pub fn immersion_naturality(
    psi: &SmoothMap,
    source: &ContactData,
    target: &ContactData,
    ell: usize,
    test_forms: &[FormField],
    samples: usize,
    tol: f64,
) -> Result<NaturalityVerdict> {
    if ell > source.n {
        return Err(Error::Degree(format!("ℓ = {ell} exceeds n = {}", source.n)));
    }
    let pts = source.manifold.sample(samples, 0x1a7);
    let sup_diff = |a: &FormField, b: &FormField| -> Result<f64> {
        let d = a.sub(b)?;
        Ok(pts.iter().map(|p| tangential_sup(&source.manifold, p, &d.eval_at(p))).fold(0.0, f64::max))
    };
    let pb = target.beta.pullback(psi)?;
    let beta_dev = sup_diff(&pb, &source.beta)?;
    if beta_dev > tol {
        return Err(Error::PullbackMismatch { deviation: beta_dev });
    }
    let lhs = target.dbeta.power(ell)?.pullback(psi)?;
    let rhs = source.dbeta.power(ell)?;
    let power_dev = sup_diff(&lhs, &rhs)?;
    let mut forms: Vec<FormField> = vec![target.dbeta.clone()];
    forms.extend(test_forms.iter().cloned());
    let mut defect = 0.0f64;
    for f in &forms {
        let pulled = f.pullback(psi)?;
        let v = is_basic_form(&source.manifold, &pulled, &source.reeb, samples, 0x1a8, tol)?;
        defect = defect.max(v.sup_contraction).max(v.sup_contraction_of_d);
    }
    Ok(NaturalityVerdict {
        pass: power_dev <= tol && defect <= tol,
        beta_deviation: beta_dev,
        power_deviation: power_dev,
        basic_defect: defect,
        ell,
        samples: pts.len(),
        tol,
    })
}

/// Coordinate names helper for tests and fixtures.
pub fn names(c: &[&str]) -> Vec<String> {
    c.iter().map(|s| s.to_string()).collect()
}

/// Frame components `ω(e_i, e_j)` of a 2-covector on a list of vectors.
pub fn gram<T: Scalar>(w: &Covector<T>, vs: &[Vec<T>]) -> Mat<T> {
    Mat::from_fn(vs.len(), vs.len(), |i, j| w.eval(&[vs[i].clone(), vs[j].clone()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::Interval;

    fn r3() -> (Arc<Manifold>, FormField) {
        let m = Manifold::chart("r3", &["x", "y", "z"], vec![Interval::window(-2.0, 2.0); 3]).unwrap();
        let b = FormField::parse(&[("dz", "1"), ("dx", "-y")], &m.coords).unwrap();
        (Arc::new(m), b)
    }

    #[test]
    fn standard_contact_form() {
        let (m, b) = r3();
        let v = check_contact(&m, &b, 200, 0, 1e-9).unwrap();
        assert!(v.pass);
        assert!((v.min_density - 1.0).abs() < 1e-14 && (v.max_density - 1.0).abs() < 1e-14);
        let degenerate = FormField::parse(&[("dz", "1")], &m.coords).unwrap();
        let v = check_contact(&m, &degenerate, 50, 0, 1e-9).unwrap();
        assert!(!v.pass && v.min_density == 0.0);
        let plane = Manifold::chart("r2", &["x", "y"], vec![Interval::window(0.0, 1.0); 2]).unwrap();
        let a = FormField::coordinate(2, 0);
        assert!(matches!(check_contact(&plane, &a, 10, 0, 1e-9), Err(Error::Structure(_))));
    }

    #[test]
    fn reeb_of_standard_form() {
        let (m, b) = r3();
        let ctx = ContactData::new(m, b).unwrap();
        assert_eq!(ctx.reeb, VectorField::parse(&["0", "0", "1"], ctx.coords()).unwrap());
        let chk = ctx.check_reeb(100, 3, 1e-9).unwrap();
        assert!(chk.pass, "{chk:?}");
    }

    #[test]
    fn symplectic_frame_examples() {
        let (m, b) = r3();
        let ctx = ContactData::new(m, b).unwrap();
        let f = ctx.symplectic_frame(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(f, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        // |β(∂x)| = 3 is the largest, so ∂x is the pivot and the ∂x + 3∂z
        // direction appears as the second frame vector.
        let f = ctx.symplectic_frame(&[0.0, 3.0, 0.0]).unwrap();
        assert_eq!(f[0], vec![0.0, 1.0, 0.0]);
        assert!((f[1][2] - 3.0 * f[1][0]).abs() < 1e-15 && f[1][1] == 0.0);
        let w = ctx.dbeta.eval_at(&[0.0, 3.0, 0.0]);
        assert_eq!(w.eval(&[f[0].clone(), f[1].clone()]), 1.0);
    }

    #[test]
    fn basic_verdicts() {
        let (m, b) = r3();
        let ctx = ContactData::new(m.clone(), b.clone()).unwrap();
        let a = FormField::parse(&[("dx", "-y")], ctx.coords()).unwrap();
        let v = is_basic_form(&m, &a, &ctx.reeb, 100, 0, 1e-10).unwrap();
        assert!(v.is_basic && v.symbolic);
        let v = is_basic_form(&m, &b, &ctx.reeb, 100, 0, 1e-10).unwrap();
        assert!(!v.is_basic);
        assert!((v.sup_contraction - 1.0).abs() < 1e-14);
    }
}
