use std::collections::BTreeMap;
use std::fmt;

use super::blade::{self, Blade};
use super::covector::Covector;
use crate::error::{Error, Result};
use crate::expr::{parse, Expr, Number};
use crate::scalar::Scalar;

/// Degree-`k` differential form with one expression coefficient per blade.
/// Zero coefficients are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormField {
    n: usize,
    k: usize,
    coeffs: BTreeMap<Blade, Expr>,
}

impl FormField {
    pub fn zero(n: usize, k: usize) -> Self {
        FormField { n, k, coeffs: BTreeMap::new() }
    }

    pub fn function(n: usize, f: Expr) -> Self {
        let mut out = Self::zero(n, 0);
        out.set(0, f);
        out
    }

    pub fn constant(n: usize, c: i64) -> Self {
        Self::function(n, Expr::int(c))
    }

    /// `dx_i`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        Self::basis(n, 1 << i, Expr::one())
    }

    pub fn basis(n: usize, b: Blade, coef: Expr) -> Self {
        let mut out = Self::zero(n, blade::degree(b));
        out.set(b, coef);
        out
    }

    /// Builds a form from `(blade, coefficient)` text pairs such as
    /// `("dx^dy", "z")`. The blade `"1"` denotes a 0-form.
    pub fn parse(components: &[(&str, &str)], coords: &[String]) -> Result<Self> {
        let n = coords.len();
        let mut out: Option<FormField> = None;
        for (bname, text) in components {
            let b = parse_blade(bname, coords)?;
            let (mask, sign) = b;
            let mut e = parse(text, coords)?;
            if sign < 0 {
                e = e.neg();
            }
            let term = FormField::basis(n, mask, e);
            out = Some(match out {
                None => term,
                Some(acc) => acc.add(&term)?,
            });
        }
        out.ok_or_else(|| Error::Structure("form with no components; give at least one".into()))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn coeff(&self, b: Blade) -> Option<&Expr> {
        self.coeffs.get(&b)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (Blade, &Expr)> {
        self.coeffs.iter().map(|(b, e)| (*b, e))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn set(&mut self, b: Blade, e: Expr) {
        if e.is_zero() {
            self.coeffs.remove(&b);
        } else {
            self.coeffs.insert(b, e);
        }
    }

    fn add_to(&mut self, b: Blade, e: &Expr) {
        let cur = self.coeffs.get(&b).cloned().unwrap_or_default();
        self.set(b, cur.add(e));
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::Dimension(format!("forms on {} and {} coordinates", self.n, o.n)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        if self.k != o.k {
            return Err(Error::Degree(format!("cannot add forms of degree {} and {}", self.k, o.k)));
        }
        let mut out = self.clone();
        for (b, e) in &o.coeffs {
            out.add_to(*b, e);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Expr::int(-1))
    }

    /// Multiplication by a function.
    pub fn scale(&self, f: &Expr) -> Self {
        let mut out = Self::zero(self.n, self.k);
        for (b, e) in &self.coeffs {
            out.set(*b, e.mul(f));
        }
        out
    }

    pub fn scale_num(&self, c: Number) -> Self {
        self.scale(&Expr::constant(c))
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let k = self.k + o.k;
        if k > self.n {
            return Err(Error::Degree(format!(
                "wedge of degrees {} and {} exceeds dimension {}",
                self.k, o.k, self.n
            )));
        }
        let mut out = Self::zero(self.n, k);
        for (a, x) in &self.coeffs {
            for (b, y) in &o.coeffs {
                if let Some(s) = blade::wedge_sign(*a, *b) {
                    let v = x.mul(y);
                    out.add_to(a | b, &if s > 0 { v } else { v.neg() });
                }
            }
        }
        Ok(out)
    }

    /// `self ∧ … ∧ self` (`p` factors); `p = 0` gives the constant 1.
    pub fn power(&self, p: usize) -> Result<Self> {
        let mut acc = Self::constant(self.n, 1);
        for _ in 0..p {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// Contraction `v ⌟ self` in the first slot.
    pub fn interior(&self, v: &VectorField) -> Result<Self> {
        if self.k == 0 {
            return Err(Error::Degree("interior product of a 0-form".into()));
        }
        if v.dim() != self.n {
            return Err(Error::Dimension(format!("vector field on {} coordinates, form on {}", v.dim(), self.n)));
        }
        let mut out = Self::zero(self.n, self.k - 1);
        for (b, e) in &self.coeffs {
            for (p, i) in blade::indices(*b).into_iter().enumerate() {
                let t = e.mul(&v.comps[i]);
                out.add_to(b & !(1 << i), &if p % 2 == 0 { t } else { t.neg() });
            }
        }
        Ok(out)
    }

    /// Exterior derivative by symbolic differentiation. Top degree gives zero.
    pub fn d(&self) -> Self {
        let mut out = Self::zero(self.n, self.k + 1);
        if self.k >= self.n {
            return out;
        }
        for (b, e) in &self.coeffs {
            for j in 0..self.n {
                if b >> j & 1 == 1 {
                    continue;
                }
                let de = e.diff(j);
                if de.is_zero() {
                    continue;
                }
                let s = blade::wedge_sign(1 << j, *b).unwrap();
                out.add_to(b | 1 << j, &if s > 0 { de } else { de.neg() });
            }
        }
        out
    }

    /// Lie derivative by Cartan's formula `v⌟dα + d(v⌟α)`.
    pub fn lie(&self, v: &VectorField) -> Result<Self> {
        let a = if self.k < self.n { self.d().interior(v)? } else { Self::zero(self.n, self.k) };
        if self.k == 0 {
            return Ok(a);
        }
        a.add(&self.interior(v)?.d())
    }

    /// Pullback under a map whose components are expressions in the source
    /// coordinates.
    pub fn pullback(&self, map: &SmoothMap) -> Result<Self> {
        if map.target_dim() != self.n {
            return Err(Error::Dimension(format!(
                "map lands in {} coordinates, form lives on {}",
                map.target_dim(),
                self.n
            )));
        }
        let m = map.source_dim();
        let differentials: Vec<FormField> = map
            .comps
            .iter()
            .map(|c| FormField::function(m, c.clone()).d())
            .collect();
        let mut out = Self::zero(m, self.k);
        if self.k > m {
            return Ok(out);
        }
        for (b, e) in &self.coeffs {
            let mut term = FormField::function(m, e.substitute(&map.comps)?);
            for i in blade::indices(*b) {
                term = term.wedge(&differentials[i])?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    pub fn eval_at<T: Scalar>(&self, p: &[T]) -> Covector<T> {
        let mut out = Covector::zero(self.n, self.k);
        for (b, e) in &self.coeffs {
            out.set(*b, e.eval(p));
        }
        out
    }

    pub fn display<'a>(&'a self, coords: &'a [String]) -> FormDisplay<'a> {
        FormDisplay { f: self, coords }
    }

    /// Component list in the shape accepted by [`FormField::parse`].
    pub fn to_components(&self, coords: &[String]) -> Vec<(String, String)> {
        self.coeffs
            .iter()
            .map(|(b, e)| (blade::name(*b, coords), e.display(coords).to_string()))
            .collect()
    }
}

fn parse_blade(name: &str, coords: &[String]) -> Result<(Blade, i32)> {
    let name = name.trim();
    if name == "1" || name.is_empty() {
        return Ok((0, 1));
    }
    let mut idx = Vec::new();
    for part in name.split(['^', '∧']) {
        let part = part.trim();
        let c = part.strip_prefix('d').ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: format!("blade factor '{part}' must look like d<coordinate>"),
        })?;
        let i = coords.iter().position(|x| x == c).ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: format!("unknown coordinate '{c}' in blade '{name}'"),
        })?;
        idx.push(i);
    }
    blade::sort_sign(&idx)
        .ok_or_else(|| Error::Parse { line: 1, column: 1, message: format!("repeated factor in blade '{name}'") })
}

pub struct FormDisplay<'a> {
    f: &'a FormField,
    coords: &'a [String],
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .f
            .coeffs
            .iter()
            .map(|(b, e)| format!("({})·{}", e.display(self.coords), blade::name(*b, self.coords)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Vector field with expression components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(comps: Vec<Expr>) -> Self {
        VectorField { comps }
    }

    pub fn parse(components: &[&str], coords: &[String]) -> Result<Self> {
        if components.len() != coords.len() {
            return Err(Error::Dimension(format!(
                "{} components for {} coordinates",
                components.len(),
                coords.len()
            )));
        }
        Ok(VectorField { comps: components.iter().map(|c| parse(c, coords)).collect::<Result<_>>()? })
    }

    /// Coordinate field `∂_i`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        VectorField { comps: (0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect() }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn scale(&self, f: &Expr) -> Self {
        VectorField { comps: self.comps.iter().map(|c| c.mul(f)).collect() }
    }

    pub fn eval<T: Scalar>(&self, p: &[T]) -> Vec<T> {
        self.comps.iter().map(|c| c.eval(p)).collect()
    }

    /// Symbolic Jacobian `J[i][j] = ∂_j v_i`.
    pub fn jacobian(&self) -> Vec<Vec<Expr>> {
        let n = self.dim();
        self.comps.iter().map(|c| (0..n).map(|j| c.diff(j)).collect()).collect()
    }

    /// Directional derivative `v(f)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut s = Expr::zero();
        for (j, c) in self.comps.iter().enumerate() {
            s = s.add(&c.mul(&f.diff(j)));
        }
        s
    }
}

/// Smooth map given by target-coordinate expressions in source coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothMap {
    source_dim: usize,
    pub comps: Vec<Expr>,
}

impl SmoothMap {
    pub fn new(source_dim: usize, comps: Vec<Expr>) -> Result<Self> {
        if let Some(bad) = comps.iter().find(|c| c.arity() > source_dim) {
            return Err(Error::Dimension(format!(
                "map component uses coordinate {} of a {}-dimensional source",
                bad.arity() - 1,
                source_dim
            )));
        }
        Ok(SmoothMap { source_dim, comps })
    }

    pub fn parse(components: &[&str], source_coords: &[String]) -> Result<Self> {
        let comps = components.iter().map(|c| parse(c, source_coords)).collect::<Result<_>>()?;
        Self::new(source_coords.len(), comps)
    }

    pub fn identity(n: usize) -> Self {
        SmoothMap { source_dim: n, comps: (0..n).map(Expr::var).collect() }
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.comps.len()
    }

    pub fn eval<T: Scalar>(&self, p: &[T]) -> Vec<T> {
        self.comps.iter().map(|c| c.eval(p)).collect()
    }

    /// Jacobian at `p`: `target_dim × source_dim`.
    pub fn jacobian_at<T: Scalar>(&self, p: &[T]) -> crate::linalg::Mat<T> {
        crate::linalg::Mat::from_fn(self.target_dim(), self.source_dim, |i, j| self.comps[i].diff(j).eval(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> Vec<String> {
        ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn wedge_examples() {
        let c = xyz();
        let dx = FormField::coordinate(3, 0);
        let dy = FormField::coordinate(3, 1);
        let w = dx.wedge(&dy).unwrap();
        assert_eq!(w, FormField::parse(&[("dx^dy", "1")], &c).unwrap());
        let a = FormField::parse(&[("dx", "1"), ("dz", "y")], &c).unwrap();
        assert!(a.wedge(&a).unwrap().is_zero());
        let beta = FormField::parse(&[("dz", "1"), ("dx", "-y")], &c).unwrap();
        assert_eq!(beta.wedge(&w).unwrap(), FormField::parse(&[("dx^dy^dz", "1")], &c).unwrap());
        assert!(matches!(w.wedge(&w), Err(Error::Degree(_))));
    }

    #[test]
    fn derivative_and_interior_examples() {
        let c = xyz();
        let beta = FormField::parse(&[("dz", "1"), ("dx", "-y")], &c).unwrap();
        assert_eq!(beta.d(), FormField::parse(&[("dx^dy", "1")], &c).unwrap());
        let dz = VectorField::coordinate(3, 2);
        assert_eq!(beta.interior(&dz).unwrap(), FormField::constant(3, 1));
        assert!(beta.d().interior(&dz).unwrap().is_zero());
        assert!(matches!(FormField::constant(3, 1).interior(&dz), Err(Error::Degree(_))));
        let t3 = FormField::parse(&[("dx", "cos(z)"), ("dy", "sin(z)")], &c).unwrap();
        let expected = FormField::parse(&[("dx^dz", "sin(z)"), ("dz^dy", "cos(z)")], &c).unwrap();
        assert_eq!(t3.d(), expected);
    }

    #[test]
    fn lie_examples() {
        let c = xyz();
        let dz = VectorField::coordinate(3, 2);
        let a = FormField::parse(&[("dx^dy", "z")], &c).unwrap();
        assert_eq!(a.lie(&dz).unwrap(), FormField::parse(&[("dx^dy", "1")], &c).unwrap());
        let b = FormField::parse(&[("dx", "-y")], &c).unwrap();
        assert!(b.lie(&dz).unwrap().is_zero());
    }

    #[test]
    fn pullback_examples() {
        let c = xyz();
        let beta = FormField::parse(&[("dz", "1"), ("dx", "-y")], &c).unwrap();
        assert_eq!(beta.pullback(&SmoothMap::identity(3)).unwrap(), beta);
        let t = vec!["t".to_string()];
        let axis = SmoothMap::parse(&["t", "0", "0"], &t).unwrap();
        assert!(beta.pullback(&axis).unwrap().is_zero());
        let scale = SmoothMap::parse(&["2*x", "y", "z"], &c).unwrap();
        let w = FormField::parse(&[("dx^dy", "1")], &c).unwrap();
        assert_eq!(w.pullback(&scale).unwrap(), FormField::parse(&[("dx^dy", "2")], &c).unwrap());
    }

    #[test]
    fn component_round_trip() {
        let c = xyz();
        let a = FormField::parse(&[("dz^dx", "y*sin(z)"), ("dx^dy", "3/4")], &c).unwrap();
        let comps = a.to_components(&c);
        let pairs: Vec<(&str, &str)> = comps.iter().map(|(b, e)| (b.as_str(), e.as_str())).collect();
        assert_eq!(FormField::parse(&pairs, &c).unwrap(), a);
    }
}
