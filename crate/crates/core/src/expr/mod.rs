//! Coefficient expressions in a canonical sum-of-products normal form.
//!
//! An [`Expr`] is a finite sum `Σ c·m` of monomials `m = Π aᵢ^eᵢ` over
//! atoms: coordinates, `sin/cos/exp/sqrt` of expressions, and reciprocals of
//! sums. Products are expanded and like terms collected on construction, so
//! two expressions that agree as elements of this free algebra compare equal.
//! Partial derivatives act as commuting derivations on the algebra, which is
//! what makes `d∘d` vanish identically.

mod number;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

pub use number::Number;
pub use parse::{parse, Parser};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    Var(usize),
    Sin(Expr),
    Cos(Expr),
    Exp(Expr),
    Sqrt(Expr),
    /// `1/P` for a sum `P` with at least two terms, normalized so that its
    /// leading coefficient is one.
    Inv(Expr),
}

/// Product of atom powers, sorted by atom, no zero exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Atom, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.0
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            match self.0[i].0.cmp(&o.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(o.0[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = self.0[i].1 + o.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Monomial(out)
    }

    fn with_exponent_shift(&self, k: usize, shift: i32) -> Monomial {
        let mut f = self.0.clone();
        f[k].1 += shift;
        if f[k].1 == 0 {
            f.remove(k);
        }
        Monomial(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Number>,
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::default()
    }

    pub fn one() -> Expr {
        Expr::constant(Number::ONE)
    }

    pub fn constant(c: Number) -> Expr {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Expr { terms }
    }

    pub fn real(x: f64) -> Expr {
        Expr::constant(Number::from_f64(x))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Number::int(n))
    }

    pub fn var(i: usize) -> Expr {
        Expr::atom(Atom::Var(i))
    }

    fn atom(a: Atom) -> Expr {
        Expr::monomial(Monomial(vec![(a, 1)]), Number::ONE)
    }

    fn monomial(m: Monomial, c: Number) -> Expr {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Number)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Number> {
        match self.terms.len() {
            0 => Some(Number::ZERO),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.0.is_empty().then_some(*c)
            }
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: Number) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn sub(&self, o: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -*c);
        }
        out
    }

    pub fn neg(&self) -> Expr {
        self.scale(-Number::ONE)
    }

    pub fn scale(&self, c: Number) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        let mut out = Expr::zero();
        for (m, d) in &self.terms {
            out.add_term(m.clone(), *d * c);
        }
        out
    }

    pub fn mul(&self, o: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), *c1 * *c2);
            }
        }
        out
    }

    /// Integer power; negative powers go through [`Expr::recip`].
    pub fn powi(&self, n: i32) -> Result<Expr> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        if let Some(c) = self.single_term() {
            let (m, k) = c;
            // Monomial power without expansion.
            let f = m.0.iter().map(|(a, e)| (a.clone(), e * n)).filter(|(_, e)| *e != 0).collect();
            let mut coef = Number::ONE;
            for _ in 0..n {
                coef = coef * k;
            }
            return Ok(Expr::monomial(Monomial(f), coef));
        }
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    fn single_term(&self) -> Option<(Monomial, Number)> {
        (self.terms.len() == 1).then(|| {
            let (m, c) = self.terms.iter().next().unwrap();
            (m.clone(), *c)
        })
    }

    /// Multiplicative inverse. Monomials invert termwise; sums become an
    /// `Inv` atom.
    pub fn recip(&self) -> Result<Expr> {
        if self.is_zero() {
            return Err(Error::Structure("division by the zero expression".into()));
        }
        if let Some((m, c)) = self.single_term() {
            let mut out = Expr::constant(c.recip().unwrap());
            for (a, e) in &m.0 {
                let factor = match a {
                    Atom::Inv(p) => p.powi(*e)?,
                    _ => Expr::monomial(Monomial(vec![(a.clone(), -e)]), Number::ONE),
                };
                out = out.mul(&factor);
            }
            return Ok(out);
        }
        let lead = *self.terms.values().next().unwrap();
        let normalized = self.scale(lead.recip().unwrap());
        Ok(Expr::atom(Atom::Inv(normalized)).scale(lead.recip().unwrap()))
    }

    pub fn div(&self, o: &Expr) -> Result<Expr> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn sin(&self) -> Expr {
        match self.as_constant() {
            Some(c) if c.is_zero() => Expr::zero(),
            Some(c) => Expr::constant(Number::Real(c.to_f64().sin())),
            None => Expr::atom(Atom::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Expr {
        match self.as_constant() {
            Some(c) if c.is_zero() => Expr::one(),
            Some(c) => Expr::constant(Number::Real(c.to_f64().cos())),
            None => Expr::atom(Atom::Cos(self.clone())),
        }
    }

    pub fn exp(&self) -> Expr {
        match self.as_constant() {
            Some(c) if c.is_zero() => Expr::one(),
            Some(c) => Expr::constant(Number::Real(c.to_f64().exp())),
            None => Expr::atom(Atom::Exp(self.clone())),
        }
    }

    pub fn sqrt(&self) -> Result<Expr> {
        match self.as_constant() {
            Some(c) if c.is_negative() => {
                Err(Error::Structure(format!("square root of negative constant {c}")))
            }
            Some(c) => Ok(Expr::constant(
                c.exact_sqrt().unwrap_or_else(|| Number::Real(c.to_f64().sqrt())),
            )),
            None => Ok(Expr::atom(Atom::Sqrt(self.clone()))),
        }
    }

    /// Symbolic partial derivative with respect to coordinate `i`.
    pub fn diff(&self, i: usize) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            for (k, (a, e)) in m.0.iter().enumerate() {
                let da = a.diff(i);
                if da.is_zero() {
                    continue;
                }
                let rest = Expr::monomial(m.with_exponent_shift(k, -1), *c * Number::int(*e as i64));
                for (dm, dc) in rest.mul(&da).terms {
                    out.add_term(dm, dc);
                }
            }
        }
        out
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(a, _)| a.depends_on(i)))
    }

    /// One more than the largest coordinate index used, zero for constants.
    pub fn arity(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(a, _)| a.arity()))
            .max()
            .unwrap_or(0)
    }

    /// Replaces coordinate `i` by `subs[i]`.
    pub fn substitute(&self, subs: &[Expr]) -> Result<Expr> {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut t = Expr::constant(*c);
            for (a, e) in &m.0 {
                let base = match a {
                    Atom::Var(j) => subs
                        .get(*j)
                        .ok_or_else(|| Error::Dimension(format!("substitution lacks coordinate {j}")))?
                        .clone(),
                    Atom::Sin(u) => u.substitute(subs)?.sin(),
                    Atom::Cos(u) => u.substitute(subs)?.cos(),
                    Atom::Exp(u) => u.substitute(subs)?.exp(),
                    Atom::Sqrt(u) => u.substitute(subs)?.sqrt()?,
                    Atom::Inv(u) => u.substitute(subs)?.recip()?,
                };
                t = t.mul(&base.powi(*e)?);
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    pub fn eval<T: Scalar>(&self, p: &[T]) -> T {
        let mut s = T::zero();
        for (m, c) in &self.terms {
            let mut t = T::of(c.to_f64());
            for (a, e) in &m.0 {
                t *= a.eval(p).powi(*e);
            }
            s += t;
        }
        s
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> Display<'a> {
        Display { e: self, names }
    }
}

impl Atom {
    fn diff(&self, i: usize) -> Expr {
        match self {
            Atom::Var(j) => {
                if *j == i {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Atom::Sin(u) => u.diff(i).mul(&u.cos()),
            Atom::Cos(u) => u.diff(i).mul(&u.sin()).neg(),
            Atom::Exp(u) => u.diff(i).mul(&u.exp()),
            Atom::Sqrt(u) => {
                let du = u.diff(i);
                if du.is_zero() {
                    return du;
                }
                let inv_root = Expr::monomial(Monomial(vec![(self.clone(), -1)]), Number::ratio(1, 2));
                du.mul(&inv_root)
            }
            Atom::Inv(u) => {
                let du = u.diff(i);
                if du.is_zero() {
                    return du;
                }
                let sq = Expr::monomial(Monomial(vec![(self.clone(), 2)]), -Number::ONE);
                du.mul(&sq)
            }
        }
    }

    fn depends_on(&self, i: usize) -> bool {
        match self {
            Atom::Var(j) => *j == i,
            Atom::Sin(u) | Atom::Cos(u) | Atom::Exp(u) | Atom::Sqrt(u) | Atom::Inv(u) => u.depends_on(i),
        }
    }

    fn arity(&self) -> usize {
        match self {
            Atom::Var(j) => j + 1,
            Atom::Sin(u) | Atom::Cos(u) | Atom::Exp(u) | Atom::Sqrt(u) | Atom::Inv(u) => u.arity(),
        }
    }

    fn eval<T: Scalar>(&self, p: &[T]) -> T {
        match self {
            Atom::Var(j) => p[*j],
            Atom::Sin(u) => u.eval(p).sin(),
            Atom::Cos(u) => u.eval(p).cos(),
            Atom::Exp(u) => u.eval(p).exp(),
            Atom::Sqrt(u) => u.eval(p).sqrt(),
            Atom::Inv(u) => T::one() / u.eval(p),
        }
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

/// Grammar-compatible rendering with coordinate names.
pub struct Display<'a> {
    e: &'a Expr,
    names: &'a [String],
}

impl Display<'_> {
    fn atom(&self, a: &Atom, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |u: &Expr| u.display(self.names).to_string();
        match a {
            Atom::Var(j) => match self.names.get(*j) {
                Some(n) => write!(f, "{n}"),
                None => write!(f, "x{j}"),
            },
            Atom::Sin(u) => write!(f, "sin({})", sub(u)),
            Atom::Cos(u) => write!(f, "cos({})", sub(u)),
            Atom::Exp(u) => write!(f, "exp({})", sub(u)),
            Atom::Sqrt(u) => write!(f, "sqrt({})", sub(u)),
            Atom::Inv(u) => write!(f, "(1/({}))", sub(u)),
        }
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e.is_zero() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.e.terms.iter().enumerate() {
            let neg = c.is_negative();
            if n > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            let mut first = true;
            if !a.is_one() || m.0.is_empty() {
                match a {
                    Number::Exact(r) if *r.denom() != 1 => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                first = false;
            }
            for (atom, e) in &m.0 {
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                self.atom(atom, f)?;
                if *e != 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(&[]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::var(0)
    }
    fn y() -> Expr {
        Expr::var(1)
    }

    #[test]
    fn collects_like_terms() {
        let e = x().add(&y()).powi(2).unwrap().sub(&x().powi(2).unwrap()).sub(&y().powi(2).unwrap());
        assert_eq!(e, x().mul(&y()).scale(Number::int(2)));
    }

    #[test]
    fn mixed_partials_agree_exactly() {
        let u = x().mul(&y()).sin().add(&x().add(&y().powi(2).unwrap()).recip().unwrap());
        let e = u.mul(&x().exp()).add(&y().mul(&x()).sqrt().unwrap());
        assert_eq!(e.diff(0).diff(1), e.diff(1).diff(0));
        assert!(e.diff(0).diff(1).sub(&e.diff(1).diff(0)).is_zero());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let e = x().mul(&y()).sin().mul(&x().add(&Expr::int(3)).recip().unwrap());
        let p = [0.4, -1.1];
        let h = 1e-6;
        let fd = (e.eval(&[p[0] + h, p[1]]) - e.eval(&[p[0] - h, p[1]])) / (2.0 * h);
        assert!((e.diff(0).eval(&p) - fd).abs() < 1e-8);
    }

    #[test]
    fn reciprocal_of_monomial_is_a_monomial() {
        let e = x().mul(&y().powi(2).unwrap()).scale(Number::int(4));
        let r = e.recip().unwrap();
        assert_eq!(r.n_terms(), 1);
        assert_eq!(r.mul(&e), Expr::one());
    }

    #[test]
    fn substitution() {
        let e = x().mul(&y()).add(&x().sin());
        let s = e.substitute(&[Expr::int(2).mul(&y()), x()]).unwrap();
        let expected = Expr::int(2).mul(&y()).mul(&x()).add(&Expr::int(2).mul(&y()).sin());
        assert_eq!(s, expected);
    }

    #[test]
    fn constants_fold() {
        assert_eq!(Expr::zero().cos(), Expr::one());
        assert_eq!(Expr::int(4).sqrt().unwrap(), Expr::int(2));
        assert!(Expr::int(-1).sqrt().is_err());
        assert!(Expr::zero().recip().is_err());
    }
}
