//! Forms known only through pointwise evaluation.
//!
//! Operators such as the basic Hodge star produce forms whose coefficients
//! are not expressions. They implement [`PointwiseForm`], and `d` of such a
//! form is computed by forward-mode differentiation of the evaluation.

use super::blade;
use super::covector::Covector;
use super::form::FormField;
use crate::scalar::Scalar;

pub trait PointwiseForm: Sync {
    /// Number of (chart or ambient) coordinates.
    fn dim(&self) -> usize;
    fn degree(&self) -> usize;
    fn at<T: Scalar>(&self, p: &[T]) -> Covector<T>;
}

impl PointwiseForm for FormField {
    fn dim(&self) -> usize {
        FormField::dim(self)
    }
    fn degree(&self) -> usize {
        FormField::degree(self)
    }
    fn at<T: Scalar>(&self, p: &[T]) -> Covector<T> {
        self.eval_at(p)
    }
}

impl<F: PointwiseForm> PointwiseForm for &F {
    fn dim(&self) -> usize {
        (*self).dim()
    }
    fn degree(&self) -> usize {
        (*self).degree()
    }
    fn at<T: Scalar>(&self, p: &[T]) -> Covector<T> {
        (*self).at(p)
    }
}

/// Partial derivatives `∂_j c_I` of every component, by one dual-number pass
/// per coordinate.
pub fn jet<F: PointwiseForm, T: Scalar>(f: &F, p: &[T]) -> (Covector<T>, Vec<Covector<T>>) {
    let n = f.dim();
    let mut value = None;
    let mut partials = Vec::with_capacity(n);
    for j in 0..n {
        let q: Vec<T::Tangent> =
            p.iter().enumerate().map(|(i, &x)| if i == j { T::seed(x) } else { T::lift(x) }).collect();
        let v = f.at(&q);
        let (re, eps): (Vec<T>, Vec<T>) = v.c.iter().map(|&t| T::split(t)).unzip();
        if value.is_none() {
            value = Some(Covector { n: v.n, k: v.k, c: re });
        }
        partials.push(Covector { n: v.n, k: v.k, c: eps });
    }
    let value = value.unwrap_or_else(|| f.at(p));
    (value, partials)
}

/// Exterior derivative of a pointwise form.
#[derive(Clone, Copy, Debug)]
pub struct Exterior<F>(pub F);

impl<F: PointwiseForm> PointwiseForm for Exterior<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn degree(&self) -> usize {
        self.0.degree() + 1
    }
    fn at<T: Scalar>(&self, p: &[T]) -> Covector<T> {
        let n = self.0.dim();
        let k = self.0.degree();
        let mut out = Covector::zero(n, k + 1);
        if k >= n {
            return out;
        }
        let (_, partials) = jet(&self.0, p);
        for (j, dj) in partials.iter().enumerate() {
            for (b, x) in dj.iter() {
                if b >> j & 1 == 1 || x == T::zero() {
                    continue;
                }
                let s = blade::wedge_sign(1 << j, b).unwrap();
                out.add_to(b | 1 << j, if s > 0 { x } else { -x });
            }
        }
        out
    }
}

/// Linear combination `a·F + b·G` of two forms of the same degree.
#[derive(Clone, Copy, Debug)]
pub struct Combination<F, G> {
    pub a: f64,
    pub f: F,
    pub b: f64,
    pub g: G,
}

impl<F: PointwiseForm, G: PointwiseForm> PointwiseForm for Combination<F, G> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn degree(&self) -> usize {
        self.f.degree()
    }
    fn at<T: Scalar>(&self, p: &[T]) -> Covector<T> {
        self.f.at(p).scale(T::of(self.a)).add(&self.g.at(p).scale(T::of(self.b)))
    }
}

/// Scalar multiple.
#[derive(Clone, Copy, Debug)]
pub struct Scaled<F>(pub f64, pub F);

impl<F: PointwiseForm> PointwiseForm for Scaled<F> {
    fn dim(&self) -> usize {
        self.1.dim()
    }
    fn degree(&self) -> usize {
        self.1.degree()
    }
    fn at<T: Scalar>(&self, p: &[T]) -> Covector<T> {
        self.1.at(p).scale(T::of(self.0))
    }
}

/// Pointwise wedge product.
#[derive(Clone, Copy, Debug)]
pub struct WedgeOf<F, G>(pub F, pub G);

impl<F: PointwiseForm, G: PointwiseForm> PointwiseForm for WedgeOf<F, G> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn degree(&self) -> usize {
        self.0.degree() + self.1.degree()
    }
    fn at<T: Scalar>(&self, p: &[T]) -> Covector<T> {
        self.0.at(p).wedge(&self.1.at(p))
    }
}

/// Zero form of a given degree.
#[derive(Clone, Copy, Debug)]
pub struct ZeroForm {
    pub n: usize,
    pub k: usize,
}

impl PointwiseForm for ZeroForm {
    fn dim(&self) -> usize {
        self.n
    }
    fn degree(&self) -> usize {
        self.k
    }
    fn at<T: Scalar>(&self, _p: &[T]) -> Covector<T> {
        Covector::zero(self.n, self.k)
    }
}
