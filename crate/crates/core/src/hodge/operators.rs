//! Transversal operators as pointwise forms.

use super::algebra::apply;
use super::structure::TransversalHodge;
use crate::exterior::{Combination, Covector, Exterior, PointwiseForm};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Constant operator applied in the unitary frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameOp {
    /// Basic Hodge star defined by the pairing `K`.
    StarB,
    /// Slot-wise action of `J`.
    J,
    /// `∗_{dβ} = −J∘∗_b`.
    StarDbeta,
    /// Hodge star of the compatible metric on `ξ`.
    MetricStar,
    /// `dβ ∧ ·`.
    L,
    /// `∗_{dβ} L ∗_{dβ}`.
    Lambda,
}

impl FrameOp {
    /// Output degree for input degree `p` in transversal dimension `2n`.
    pub fn out_degree(self, n: usize, p: usize) -> usize {
        match self {
            FrameOp::StarB | FrameOp::StarDbeta | FrameOp::MetricStar => (2 * n).saturating_sub(p),
            FrameOp::J => p,
            FrameOp::L => p + 2,
            FrameOp::Lambda => p.saturating_sub(2),
        }
    }
}

fn nan_covector<T: Scalar>(n: usize, k: usize) -> Covector<T> {
    let mut c = Covector::zero(n, k);
    c.c.iter_mut().for_each(|x| *x = T::of(f64::NAN));
    c
}

/// Frame operator applied to an inner pointwise form.
#[derive(Clone, Copy)]
pub struct Transversal<'h, F> {
    pub h: &'h TransversalHodge,
    pub op: FrameOp,
    pub f: F,
}

impl<'h, F: PointwiseForm> Transversal<'h, F> {
    fn matrix(&self, p: usize) -> Option<&'h Mat<f64>> {
        let a = &self.h.algebra;
        if p > a.dim() {
            return None;
        }
        Some(match self.op {
            FrameOp::StarB => &a.star_b[p],
            FrameOp::J => &a.j[p],
            FrameOp::StarDbeta => &a.star_dbeta[p],
            FrameOp::MetricStar => &a.star_t[p],
            FrameOp::L => &a.l[p],
            FrameOp::Lambda => &a.lambda[p],
        })
    }
}

impl<F: PointwiseForm> PointwiseForm for Transversal<'_, F> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn degree(&self) -> usize {
        self.op.out_degree(self.h.n(), self.f.degree()).min(self.f.dim())
    }
    fn at<T: Scalar>(&self, p: &[T]) -> Covector<T> {
        let m = self.dim();
        let k = self.degree();
        let Some(mat) = self.matrix(self.f.degree()) else { return Covector::zero(m, k) };
        if mat.rows == 0 || self.op.out_degree(self.h.n(), self.f.degree()) > 2 * self.h.n() {
            return Covector::zero(m, k);
        }
        let Ok(frame) = self.h.frame_at(p) else { return nan_covector(m, k) };
        let c = frame.components(&self.f.at(p));
        frame.reconstruct(&apply(mat, &c, k))
    }
}

/// Which star a codifferential is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarKind {
    /// `δ_b = (−1)^{p+1} ∗_b d ∗_b`.
    Basic,
    /// `δ_{dβ} = (−1)^{p+1} ∗_{dβ} d ∗_{dβ}`.
    Symplectic,
    /// `δ_T = −∗_T d ∗_T`, the formal adjoint of `d` on basic forms for the
    /// compatible metric.
    Metric,
}

impl StarKind {
    fn op(self) -> FrameOp {
        match self {
            StarKind::Basic => FrameOp::StarB,
            StarKind::Symplectic => FrameOp::StarDbeta,
            StarKind::Metric => FrameOp::MetricStar,
        }
    }

    fn sign(self, p: usize) -> f64 {
        match self {
            StarKind::Metric => -1.0,
            _ if p.is_multiple_of(2) => -1.0,
            _ => 1.0,
        }
    }
}

/// Codifferential `± ∗ d ∗` of a pointwise form; zero on functions.
#[derive(Clone, Copy)]
pub struct Codifferential<'h, F> {
    pub h: &'h TransversalHodge,
    pub kind: StarKind,
    pub f: F,
}

impl<F: PointwiseForm> PointwiseForm for Codifferential<'_, F> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn degree(&self) -> usize {
        self.f.degree().saturating_sub(1)
    }
    fn at<T: Scalar>(&self, p: &[T]) -> Covector<T> {
        let k = self.f.degree();
        if k == 0 {
            return Covector::zero(self.dim(), 0);
        }
        // Transversal forms vanish above degree 2n.
        if k > 2 * self.h.n() {
            return Covector::zero(self.dim(), k - 1);
        }
        let op = self.kind.op();
        let inner = Transversal { h: self.h, op, f: &self.f };
        let outer = Transversal { h: self.h, op, f: Exterior(inner) };
        outer.at(p).scale(T::of(self.kind.sign(k)))
    }
}

/// `d δ + δ d`.
#[derive(Clone, Copy)]
pub struct Laplacian<'h, F> {
    pub h: &'h TransversalHodge,
    pub kind: StarKind,
    pub f: F,
}

impl<F: PointwiseForm> PointwiseForm for Laplacian<'_, F> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn degree(&self) -> usize {
        self.f.degree()
    }
    fn at<T: Scalar>(&self, p: &[T]) -> Covector<T> {
        let (h, kind) = (self.h, self.kind);
        let d_delta = Exterior(Codifferential { h, kind, f: &self.f });
        let delta_d = Codifferential { h, kind, f: Exterior(&self.f) };
        let k = self.f.degree();
        match k {
            0 => delta_d.at(p),
            _ if k >= self.dim() => d_delta.at(p),
            _ => Combination { a: 1.0, f: d_delta, b: 1.0, g: delta_d }.at(p),
        }
    }
}

impl TransversalHodge {
    pub fn star_b<F: PointwiseForm>(&self, f: F) -> Transversal<'_, F> {
        Transversal { h: self, op: FrameOp::StarB, f }
    }

    pub fn j_action<F: PointwiseForm>(&self, f: F) -> Transversal<'_, F> {
        Transversal { h: self, op: FrameOp::J, f }
    }

    pub fn star_dbeta<F: PointwiseForm>(&self, f: F) -> Transversal<'_, F> {
        Transversal { h: self, op: FrameOp::StarDbeta, f }
    }

    pub fn metric_star<F: PointwiseForm>(&self, f: F) -> Transversal<'_, F> {
        Transversal { h: self, op: FrameOp::MetricStar, f }
    }

    pub fn lefschetz_l<F: PointwiseForm>(&self, f: F) -> Transversal<'_, F> {
        Transversal { h: self, op: FrameOp::L, f }
    }

    pub fn lefschetz_lambda<F: PointwiseForm>(&self, f: F) -> Transversal<'_, F> {
        Transversal { h: self, op: FrameOp::Lambda, f }
    }

    pub fn basic_codifferential<F: PointwiseForm>(&self, f: F) -> Codifferential<'_, F> {
        Codifferential { h: self, kind: StarKind::Basic, f }
    }

    pub fn symplectic_codifferential<F: PointwiseForm>(&self, f: F) -> Codifferential<'_, F> {
        Codifferential { h: self, kind: StarKind::Symplectic, f }
    }

    pub fn metric_codifferential<F: PointwiseForm>(&self, f: F) -> Codifferential<'_, F> {
        Codifferential { h: self, kind: StarKind::Metric, f }
    }

    pub fn basic_laplacian<F: PointwiseForm>(&self, f: F) -> Laplacian<'_, F> {
        Laplacian { h: self, kind: StarKind::Basic, f }
    }

    pub fn symplectic_laplacian<F: PointwiseForm>(&self, f: F) -> Laplacian<'_, F> {
        Laplacian { h: self, kind: StarKind::Symplectic, f }
    }

    pub fn metric_laplacian<F: PointwiseForm>(&self, f: F) -> Laplacian<'_, F> {
        Laplacian { h: self, kind: StarKind::Metric, f }
    }
}
