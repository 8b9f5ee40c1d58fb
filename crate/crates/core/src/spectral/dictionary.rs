//! Finite families of coefficient functions and the k-forms built from them.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{blade, Blade, Covector, FormField, PointwiseForm};
use crate::expr::Expr;
use crate::manifold::{Kind, Manifold};
use crate::scalar::Scalar;

/// One coefficient function.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Atom {
    /// `Π x_i^{a_i}`.
    Monomial(Vec<u32>),
    /// `cos(Σ m_i s_i x_i)` with `s_i = 2π / period_i`.
    Cos(Vec<i32>),
    Sin(Vec<i32>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DictionaryKind {
    /// Ambient polynomials, total degree bound lowered by one per form degree
    /// so that `d` maps the degree-`k` family into the degree-`k+1` family.
    Polynomial,
    /// Fourier modes with `Σ|m_i| ≤ D` in every form degree.
    Fourier,
}

/// Coefficient functions up to a degree bound, ordered by degree so that
/// lower bounds are prefixes.
#[derive(Clone, Debug)]
pub struct AtomFamily {
    pub kind: DictionaryKind,
    pub dim: usize,
    pub bound: usize,
    pub atoms: Vec<Atom>,
    /// Degree of each atom.
    pub degrees: Vec<usize>,
    /// Angular frequency of one Fourier unit per coordinate.
    pub scale: Vec<f64>,
    index: HashMap<Atom, usize>,
}

fn compositions(dim: usize, total: usize) -> Vec<Vec<u32>> {
    if dim == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(dim - 1, total - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

impl AtomFamily {
    pub fn polynomial(dim: usize, bound: usize) -> Self {
        let mut atoms = Vec::new();
        let mut degrees = Vec::new();
        for deg in 0..=bound {
            for a in compositions(dim, deg) {
                atoms.push(Atom::Monomial(a));
                degrees.push(deg);
            }
        }
        Self::finish(DictionaryKind::Polynomial, dim, bound, atoms, degrees, vec![1.0; dim])
    }

    pub fn fourier(periods: &[f64], bound: usize) -> Self {
        let dim = periods.len();
        let mut atoms = vec![Atom::Cos(vec![0; dim])];
        let mut degrees = vec![0];
        for deg in 1..=bound {
            for a in compositions(dim, deg) {
                // Every sign pattern, keeping one representative of ±m.
                let nz: Vec<usize> = (0..dim).filter(|&i| a[i] != 0).collect();
                for signs in 0..(1u32 << nz.len()) {
                    if signs & 1 != 0 {
                        continue;
                    }
                    let mut m: Vec<i32> = a.iter().map(|&x| x as i32).collect();
                    for (s, &i) in nz.iter().enumerate() {
                        if signs >> s & 1 == 1 {
                            m[i] = -m[i];
                        }
                    }
                    atoms.push(Atom::Cos(m.clone()));
                    atoms.push(Atom::Sin(m));
                    degrees.extend([deg, deg]);
                }
            }
        }
        let scale = periods.iter().map(|p| 2.0 * std::f64::consts::PI / p).collect();
        Self::finish(DictionaryKind::Fourier, dim, bound, atoms, degrees, scale)
    }

    fn finish(kind: DictionaryKind, dim: usize, bound: usize, atoms: Vec<Atom>, degrees: Vec<usize>, scale: Vec<f64>) -> Self {
        let index = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        AtomFamily { kind, dim, bound, atoms, degrees, scale, index }
    }

    /// Family matching the manifold: Fourier on fully periodic charts,
    /// polynomials otherwise.
    pub fn for_manifold(m: &Manifold, bound: usize) -> Self {
        match m.kind {
            Kind::Chart if m.bounds.iter().all(|b| b.periodic) => {
                let periods: Vec<f64> = m.bounds.iter().map(|b| b.width()).collect();
                Self::fourier(&periods, bound)
            }
            _ => Self::polynomial(m.ambient_dim(), bound),
        }
    }

    /// Number of atoms of degree at most `bound`.
    pub fn count(&self, bound: usize) -> usize {
        self.degrees.partition_point(|&d| d <= bound)
    }

    pub fn index_of(&self, a: &Atom) -> Option<usize> {
        self.index.get(a).copied()
    }

    fn phase<T: Scalar>(&self, m: &[i32], p: &[T]) -> T {
        let mut s = T::zero();
        for (i, &mi) in m.iter().enumerate() {
            if mi != 0 {
                s += T::of(mi as f64 * self.scale[i]) * p[i];
            }
        }
        s
    }

    pub fn eval<T: Scalar>(&self, i: usize, p: &[T]) -> T {
        match &self.atoms[i] {
            Atom::Monomial(a) => {
                let mut v = T::one();
                for (x, &e) in p.iter().zip(a) {
                    if e > 0 {
                        v *= x.powi(e as i32);
                    }
                }
                v
            }
            Atom::Cos(m) => self.phase(m, p).cos(),
            Atom::Sin(m) => self.phase(m, p).sin(),
        }
    }

    /// All atoms of degree at most `bound`, evaluated at `p`.
    pub fn eval_all(&self, bound: usize, p: &[f64]) -> Vec<f64> {
        (0..self.count(bound)).map(|i| self.eval(i, p)).collect()
    }

    /// `∂_j` of an atom as a multiple of another atom.
    pub fn partial(&self, i: usize, j: usize) -> Option<(f64, Atom)> {
        match &self.atoms[i] {
            Atom::Monomial(a) => {
                if a[j] == 0 {
                    return None;
                }
                let mut b = a.clone();
                b[j] -= 1;
                Some((a[j] as f64, Atom::Monomial(b)))
            }
            Atom::Cos(m) if m[j] != 0 => Some((-(m[j] as f64) * self.scale[j], Atom::Sin(m.clone()))),
            Atom::Sin(m) if m[j] != 0 => Some((m[j] as f64 * self.scale[j], Atom::Cos(m.clone()))),
            _ => None,
        }
    }

    pub fn to_expr(&self, i: usize) -> Expr {
        let num = |x: f64| {
            if x.fract() == 0.0 && x.abs() < 1e15 {
                Expr::int(x as i64)
            } else {
                Expr::real(x)
            }
        };
        match &self.atoms[i] {
            Atom::Monomial(a) => {
                let mut e = Expr::one();
                for (j, &k) in a.iter().enumerate() {
                    for _ in 0..k {
                        e = e.mul(&Expr::var(j));
                    }
                }
                e
            }
            Atom::Cos(m) | Atom::Sin(m) => {
                let mut ph = Expr::zero();
                for (j, &mj) in m.iter().enumerate() {
                    if mj != 0 {
                        ph = ph.add(&num(mj as f64 * self.scale[j]).mul(&Expr::var(j)));
                    }
                }
                if matches!(self.atoms[i], Atom::Cos(_)) {
                    ph.cos()
                } else {
                    ph.sin()
                }
            }
        }
    }
}

/// Basis of coefficient-function `k`-forms: pairs (atom, ambient blade),
/// atom-major.
#[derive(Clone, Debug)]
pub struct FormDictionary {
    pub atoms: Arc<AtomFamily>,
    pub k: usize,
    /// Atom degree bound used in this form degree.
    pub bound: usize,
    pub n_atoms: usize,
    pub blades: Vec<Blade>,
}

impl FormDictionary {
    pub fn new(atoms: Arc<AtomFamily>, k: usize) -> Self {
        let bound = match atoms.kind {
            DictionaryKind::Polynomial => atoms.bound.checked_sub(k),
            DictionaryKind::Fourier => Some(atoms.bound),
        };
        let n_atoms = bound.map_or(0, |b| atoms.count(b));
        let blades = blade::blades(atoms.dim, k);
        FormDictionary { bound: bound.unwrap_or(0), n_atoms, blades, k, atoms }
    }

    pub fn len(&self) -> usize {
        self.n_atoms * self.blades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ambient_dim(&self) -> usize {
        self.atoms.dim
    }

    /// Exact matrix of `d` into `next` (`next.len() × self.len()`).
    pub fn d_matrix(&self, next: &FormDictionary) -> Result<nalgebra::DMatrix<f64>> {
        if next.k != self.k + 1 {
            return Err(Error::Degree(format!("d maps degree {} to {}, not {}", self.k, self.k + 1, next.k)));
        }
        let nb = self.blades.len();
        let nb1 = next.blades.len();
        let mut out = nalgebra::DMatrix::zeros(next.len(), self.len());
        for a in 0..self.n_atoms {
            for j in 0..self.atoms.dim {
                let Some((c, atom)) = self.atoms.partial(a, j) else { continue };
                let b = self.atoms.index_of(&atom).filter(|&b| b < next.n_atoms).ok_or_else(|| {
                    Error::Structure("derivative leaves the dictionary; degree bounds are inconsistent".into())
                })?;
                for (s, &bl) in self.blades.iter().enumerate() {
                    let Some(sign) = blade::wedge_sign(1 << j, bl) else { continue };
                    let t = blade::rank((1 << j) | bl);
                    out[(b * nb1 + t, a * nb + s)] += sign as f64 * c;
                }
            }
        }
        Ok(out)
    }

    /// Ambient covector of a coefficient vector at `p`.
    pub fn covector_at<T: Scalar>(&self, coeffs: &[f64], p: &[T]) -> Covector<T> {
        let nb = self.blades.len();
        let mut out = Covector::zero(self.atoms.dim, self.k);
        for a in 0..self.n_atoms {
            let row = &coeffs[a * nb..(a + 1) * nb];
            if row.iter().all(|&c| c == 0.0) {
                continue;
            }
            let v = self.atoms.eval(a, p);
            for (s, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    out.c[s] += v * T::of(c);
                }
            }
        }
        out
    }

    /// Symbolic form of a coefficient vector; entries below `drop` are
    /// omitted.
    pub fn to_form_field(&self, coeffs: &[f64], drop: f64) -> FormField {
        let nb = self.blades.len();
        let mut out = FormField::zero(self.atoms.dim, self.k);
        for (s, &bl) in self.blades.iter().enumerate() {
            let mut e = Expr::zero();
            for a in 0..self.n_atoms {
                let c = coeffs[a * nb + s];
                if c.abs() > drop {
                    e = e.add(&Expr::real(c).mul(&self.atoms.to_expr(a)));
                }
            }
            if !e.is_zero() {
                out = out.add(&FormField::basis(self.atoms.dim, bl, e)).expect("same shape");
            }
        }
        out
    }
}

/// Linear combination of dictionary elements, evaluated without building
/// expressions.
#[derive(Clone, Debug)]
pub struct DictForm {
    pub dict: Arc<FormDictionary>,
    pub coeffs: Vec<f64>,
}

impl PointwiseForm for DictForm {
    fn dim(&self) -> usize {
        self.dict.ambient_dim()
    }
    fn degree(&self) -> usize {
        self.dict.k
    }
    fn at<T: Scalar>(&self, p: &[T]) -> Covector<T> {
        self.dict.covector_at(&self.coeffs, p)
    }
}
