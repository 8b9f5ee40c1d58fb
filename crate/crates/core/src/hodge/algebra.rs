//! Constant operators on `Λ*(ℝ²ⁿ)*` for the standard unitary structure:
//! `ω = Σ e²ⁱ∧e²ⁱ⁺¹`, `J e₂ᵢ = e₂ᵢ₊₁`, `J e₂ᵢ₊₁ = −e₂ᵢ`, Euclidean metric.
//!
//! In a unitary frame of the contact distribution every transversal
//! operator becomes one of these matrices.

use crate::exterior::{blade, Covector};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Sign with which `J` acts on forms; the slot-wise convention
/// `(Jα)(u, …) = α(Ju, …)` corresponds to `+1`.
pub const J_FORM_CONVENTION: f64 = 1.0;

/// Operators on the exterior algebra of `(ℝ²ⁿ)*` in the standard structure.
#[derive(Clone, Debug)]
pub struct SymplecticAlgebra {
    pub n: usize,
    /// `∗_b` on `p`-forms, `p = 0..=2n`.
    pub star_b: Vec<Mat<f64>>,
    /// Slot-wise `J` on `p`-forms.
    pub j: Vec<Mat<f64>>,
    /// `∗_{dβ} = −J∘∗_b` on `p`-forms.
    pub star_dbeta: Vec<Mat<f64>>,
    /// Euclidean Hodge star on `p`-forms with orientation `ωⁿ/n!`.
    pub star_t: Vec<Mat<f64>>,
    /// `L = ω∧` from `p` to `p+2` (empty matrix past the top degree).
    pub l: Vec<Mat<f64>>,
    /// `Λ = ∗_{dβ} L ∗_{dβ}` from `p` to `p−2`.
    pub lambda: Vec<Mat<f64>>,
    /// Gram matrix of the pairing `K` on `p`-forms.
    pub pairing: Vec<Mat<f64>>,
}

/// Symplectic form matrix `Ω_ij = ω(e_i, e_j)` of the standard structure.
pub fn standard_omega(n: usize) -> Mat<f64> {
    let mut m = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(2 * i, 2 * i + 1)] = 1.0;
        m[(2 * i + 1, 2 * i)] = -1.0;
    }
    m
}

/// Matrix of `J` on vectors (columns are images of basis vectors).
pub fn standard_j(n: usize) -> Mat<f64> {
    let mut m = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(2 * i + 1, 2 * i)] = 1.0;
        m[(2 * i, 2 * i + 1)] = -1.0;
    }
    m
}

/// `ω` as a 2-covector.
pub fn omega_covector<T: Scalar>(n: usize) -> Covector<T> {
    let mut w = Covector::zero(2 * n, 2);
    for i in 0..n {
        w.set(0b11 << (2 * i), T::one());
    }
    w
}

/// Pairing `K_p(κ, ρ) = ⟨κ, Λᵖ(Q⁻¹) ρ⟩` with `Q(u) = ω(u, ·)`, for a general
/// symplectic matrix `omega`. Returned as the Gram matrix over `p`-blades.
pub fn pairing_matrix<T: Scalar>(omega: &Mat<T>, p: usize) -> crate::error::Result<Mat<T>> {
    let d = omega.rows;
    let q_inv = omega.transpose().inverse()?;
    let bs = blade::blades(d, p);
    Ok(Mat::from_fn(bs.len(), bs.len(), |a, b| {
        let rows = blade::indices(bs[a]);
        let cols = blade::indices(bs[b]);
        Mat::from_fn(p, p, |r, c| q_inv[(rows[r], cols[c])]).det()
    }))
}

/// Solves `κ ∧ s = K(κ, ρ) · vol` for `s` over all basis `κ`, for each basis
/// `ρ`. Columns of the result are the images `∗ρ`.
pub fn star_from_pairing<T: Scalar>(dim: usize, p: usize, k: &Mat<T>, vol_coeff: T) -> crate::error::Result<Mat<T>> {
    let q = dim - p;
    let bp = blade::blades(dim, p);
    let bq = blade::blades(dim, q);
    let top = (1u32 << dim) - 1;
    // W[κ][σ] = coefficient of the top blade in e^κ ∧ e^σ.
    let w = Mat::from_fn(bp.len(), bq.len(), |a, b| {
        if bp[a] | bq[b] != top {
            return T::zero();
        }
        match blade::wedge_sign(bp[a], bq[b]) {
            Some(1) => T::one(),
            Some(_) => -T::one(),
            None => T::zero(),
        }
    });
    let rhs = k.scale(vol_coeff);
    w.solve(&rhs)
}

impl SymplecticAlgebra {
    pub fn new(n: usize) -> Self {
        let d = 2 * n;
        let omega = standard_omega(n);
        let jm = standard_j(n);
        let mut star_b = Vec::new();
        let mut j = Vec::new();
        let mut star_t = Vec::new();
        let mut l = Vec::new();
        let mut pairing = Vec::new();
        for p in 0..=d {
            let k = pairing_matrix(&omega, p).expect("standard ω is invertible");
            star_b.push(star_from_pairing(d, p, &k, 1.0).expect("pairing system is unimodular"));
            j.push(slotwise_matrix(&jm, p).scale(J_FORM_CONVENTION.powi(p as i32)));
            star_t.push(euclidean_star(d, p));
            l.push(wedge_matrix(&omega_covector::<f64>(n), d, p));
            pairing.push(k);
        }
        let star_dbeta: Vec<Mat<f64>> = (0..=d).map(|p| j[d - p].mul(&star_b[p]).scale(-1.0)).collect();
        let lambda = (0..=d)
            .map(|p| {
                if p < 2 {
                    return Mat::zeros(0, blade::binomial(d, p));
                }
                // ∗_{dβ}: p → 2n−p, L: 2n−p → 2n−p+2, ∗_{dβ}: 2n−p+2 → p−2.
                star_dbeta[d - p + 2].mul(&l[d - p]).mul(&star_dbeta[p])
            })
            .collect();
        SymplecticAlgebra { n, star_b, j, star_dbeta, star_t, l, lambda, pairing }
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }
}

/// Matrix of `α ↦ α(A·, …, A·)` on `p`-forms.
pub fn slotwise_matrix(a: &Mat<f64>, p: usize) -> Mat<f64> {
    let d = a.rows;
    let bs = blade::blades(d, p);
    let mut out = Mat::zeros(bs.len(), bs.len());
    for (c, &b) in bs.iter().enumerate() {
        let img = Covector::<f64>::basis(d, b).pullback(a);
        for r in 0..bs.len() {
            out[(r, c)] = img.c[r];
        }
    }
    out
}

/// Matrix of `α ↦ w ∧ α` from `p`-forms to `(p + deg w)`-forms.
pub fn wedge_matrix(w: &Covector<f64>, d: usize, p: usize) -> Mat<f64> {
    let q = p + w.k;
    let bp = blade::blades(d, p);
    if q > d {
        return Mat::zeros(0, bp.len());
    }
    let mut out = Mat::zeros(blade::binomial(d, q), bp.len());
    for (c, &b) in bp.iter().enumerate() {
        let img = w.wedge(&Covector::basis(d, b));
        for r in 0..img.c.len() {
            out[(r, c)] = img.c[r];
        }
    }
    out
}

/// Euclidean star: `e^I ↦ sign(I, Iᶜ) e^{Iᶜ}`.
pub fn euclidean_star(d: usize, p: usize) -> Mat<f64> {
    let bp = blade::blades(d, p);
    let top = (1u32 << d) - 1;
    let mut out = Mat::zeros(blade::binomial(d, d - p), bp.len());
    for (c, &b) in bp.iter().enumerate() {
        let comp = top & !b;
        let s = blade::wedge_sign(b, comp).unwrap() as f64;
        out[(blade::rank(comp), c)] = s;
    }
    out
}

/// Applies a constant operator matrix to a covector of the right degree.
pub fn apply<T: Scalar>(m: &Mat<f64>, c: &Covector<T>, out_degree: usize) -> Covector<T> {
    let mut out = Covector::zero(c.n, out_degree);
    if m.rows == 0 {
        return out;
    }
    for r in 0..m.rows {
        let mut s = T::zero();
        for (col, &x) in c.c.iter().enumerate() {
            let a = m[(r, col)];
            if a != 0.0 {
                s += T::of(a) * x;
            }
        }
        out.c[r] = s;
    }
    out
}

/// Frozen regression data for `n ≤ 3`, indexed `[n − 1][p]`.
pub mod tables {
    /// Sign `s` with `∗_b ∘ ∗_b = s · Id` on `p`-forms.
    pub const STAR_B_SQUARED: [[i32; 7]; 3] = [
        [1, 1, 1, 0, 0, 0, 0],
        [1, 1, 1, 1, 1, 0, 0],
        [1, 1, 1, 1, 1, 1, 1],
    ];
    /// Sign `s` with `∗_{dβ} ∘ ∗_{dβ} = s · Id` on `p`-forms.
    pub const STAR_DBETA_SQUARED: [[i32; 7]; 3] = [
        [1, -1, 1, 0, 0, 0, 0],
        [1, -1, 1, -1, 1, 0, 0],
        [1, -1, 1, -1, 1, -1, 1],
    ];
    /// Sign `s` with `∗_{dβ} = s · ∗_T` (Euclidean star of the compatible
    /// metric) on `p`-forms.
    pub const STAR_DBETA_OVER_METRIC_STAR: [[i32; 7]; 3] = [
        [-1, 1, -1, 0, 0, 0, 0],
        [-1, 1, -1, 1, -1, 0, 0],
        [-1, 1, -1, 1, -1, 1, -1],
    ];
    /// Eigenvalue `c` with `[Λ, L] = c · Id` on `p`-forms. With `Λ` built
    /// from `∗_{dβ}` this is `(−1)ᵖ(n − p)`: odd degrees carry the sign of
    /// `∗_{dβ}²`.
    pub const LAMBDA_L_COMMUTATOR: [[i32; 7]; 3] = [
        [1, 0, -1, 0, 0, 0, 0],
        [2, -1, 0, 1, -2, 0, 0],
        [3, -2, 1, 0, -1, 2, -3],
    ];
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_multiple_of_identity(m: &Mat<f64>) -> Option<i32> {
        let s = m[(0, 0)];
        let id = Mat::identity(m.rows).scale(s);
        (m.sub(&id).max_abs() < 1e-12 && (s.abs() - 1.0).abs() < 1e-12).then_some(s as i32)
    }

    #[test]
    fn n1_examples() {
        let a = SymplecticAlgebra::new(1);
        // ∗_b 1 = ω, ∗_b e¹ = e¹, ∗_b e² = e², ∗_b ω = 1
        assert_eq!(a.star_b[0].data, vec![1.0]);
        assert_eq!(a.star_b[1], Mat::identity(2));
        assert_eq!(a.star_b[2].data, vec![1.0]);
        // ∗_{dβ} 1 = −ω
        assert_eq!(a.star_dbeta[0].data, vec![-1.0]);
        // Λ ω = 1
        assert_eq!(a.lambda[2].data, vec![1.0]);
        let k = pairing_matrix(&standard_omega(1), 1).unwrap();
        assert_eq!((k[(0, 1)], k[(0, 0)]), (1.0, 0.0));
    }

    #[test]
    fn tables_are_reproduced() {
        for n in 1..=3 {
            let a = SymplecticAlgebra::new(n);
            for p in 0..=2 * n {
                let q = 2 * n - p;
                let sb = a.star_b[q].mul(&a.star_b[p]);
                assert_eq!(is_multiple_of_identity(&sb), Some(tables::STAR_B_SQUARED[n - 1][p]), "n={n} p={p}");
                let sd = a.star_dbeta[q].mul(&a.star_dbeta[p]);
                assert_eq!(is_multiple_of_identity(&sd), Some(tables::STAR_DBETA_SQUARED[n - 1][p]));
                let s = tables::STAR_DBETA_OVER_METRIC_STAR[n - 1][p] as f64;
                assert!(a.star_dbeta[p].sub(&a.star_t[p].scale(s)).max_abs() < 1e-12, "n={n} p={p}");
                let dim = blade::binomial(2 * n, p);
                let ll = if p + 2 <= 2 * n { a.lambda[p + 2].mul(&a.l[p]) } else { Mat::zeros(dim, dim) };
                let lam = if p >= 2 { a.l[p - 2].mul(&a.lambda[p]) } else { Mat::zeros(dim, dim) };
                let c = tables::LAMBDA_L_COMMUTATOR[n - 1][p] as f64;
                assert!(ll.sub(&lam).sub(&Mat::identity(dim).scale(c)).max_abs() < 1e-12, "n={n} p={p}");
            }
        }
    }
}
