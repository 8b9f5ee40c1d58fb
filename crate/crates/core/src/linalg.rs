//! Small dense linear algebra that works for any [`Scalar`], including dual
//! numbers. Large decompositions (SVD, symmetric eigen) use nalgebra on `f64`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.rows, "shape mismatch in matrix product");
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..o.cols {
                    out.data[i * o.cols + j] += a * o[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = T::zero();
                for j in 0..self.cols {
                    s += self[(i, j)] * v[j];
                }
                s
            })
            .collect()
    }

    pub fn scale(&self, c: T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * c).collect() }
    }

    pub fn add(&self, o: &Mat<T>) -> Mat<T> {
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &Mat<T>) -> Mat<T> {
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    /// Largest absolute entry, on primal values.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.value().abs()).fold(0.0, f64::max)
    }

    /// Largest entry size including tangent parts.
    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    /// Determinant by elimination with partial pivoting.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        match n {
            0 => return T::one(),
            1 => return self[(0, 0)],
            2 => return self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)],
            _ => {}
        }
        let mut a = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[(i, c)].value().abs().total_cmp(&a[(j, c)].value().abs()))
                .unwrap();
            if a[(p, c)].value() == 0.0 {
                // Primal singular: tangent parts may still be nonzero.
                return self.cofactor_det();
            }
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let piv = a[(c, c)];
            det *= piv;
            for r in c + 1..n {
                let f = a[(r, c)] / piv;
                if f == T::zero() {
                    continue;
                }
                for k in c..n {
                    let v = a[(c, k)];
                    a[(r, k)] -= f * v;
                }
            }
        }
        det
    }

    fn cofactor_det(&self) -> T {
        let n = self.rows;
        if n <= 2 {
            return self.det();
        }
        let mut s = T::zero();
        for c in 0..n {
            let x = self[(0, c)];
            if x == T::zero() {
                continue;
            }
            let minor = Mat::from_fn(n - 1, n - 1, |i, j| self[(i + 1, if j < c { j } else { j + 1 })]);
            let t = x * minor.det();
            s = if c % 2 == 0 { s + t } else { s - t };
        }
        s
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    /// Solves `self · X = rhs` for square `self`.
    pub fn solve(&self, rhs: &Mat<T>) -> Result<Mat<T>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, rhs.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[(i, c)].value().abs().total_cmp(&a[(j, c)].value().abs()))
                .unwrap();
            if a[(p, c)].value().abs() <= 1e-14 * scale {
                return Err(Error::Singular { context: "dense solve", pivot: a[(p, c)].value() });
            }
            if p != c {
                a.swap_rows(p, c);
                b.swap_rows(p, c);
            }
            let piv = a[(c, c)];
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[(r, c)] / piv;
                if f == T::zero() {
                    continue;
                }
                for k in c..n {
                    let v = a[(c, k)];
                    a[(r, k)] -= f * v;
                }
                for k in 0..b.cols {
                    let v = b[(c, k)];
                    b[(r, k)] -= f * v;
                }
            }
        }
        for r in 0..n {
            let piv = a[(r, r)];
            for k in 0..b.cols {
                b[(r, k)] /= piv;
            }
        }
        Ok(b)
    }

    pub fn solve_vec(&self, rhs: &[T]) -> Result<Vec<T>> {
        let b = Mat { rows: rhs.len(), cols: 1, data: rhs.to_vec() };
        Ok(self.solve(&b)?.data)
    }

    pub fn inverse(&self) -> Result<Mat<T>> {
        self.solve(&Mat::identity(self.rows))
    }

    /// Principal square root and inverse square root by Denman–Beavers
    /// iteration. Requires a spectrum off the closed negative real axis.
    pub fn sqrt_and_inv_sqrt(&self) -> Result<(Mat<T>, Mat<T>)> {
        let n = self.rows;
        let mut y = self.clone();
        let mut z = Mat::identity(n);
        let half = T::of(0.5);
        for _ in 0..100 {
            let yi = y.inverse()?;
            let zi = z.inverse()?;
            let y1 = y.add(&zi).scale(half);
            let z1 = z.add(&yi).scale(half);
            let change = y1.sub(&y).max_magnitude().max(z1.sub(&z).max_magnitude());
            y = y1;
            z = z1;
            if change <= 1e-15 * y.max_magnitude().max(z.max_magnitude()).max(1.0) {
                return Ok((y, z));
            }
        }
        Err(Error::NoConvergence { context: "matrix square root" })
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut s = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Dense `f64` matrix into nalgebra.
pub fn to_dmatrix(m: &Mat<f64>) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_row_slice(m.rows, m.cols, &m.data)
}

/// Singular values in descending order together with an orthonormal basis of
/// the numerical nullspace of `a` (columns), using `rel_cutoff · σ_max`.
pub fn nullspace(a: &nalgebra::DMatrix<f64>, rel_cutoff: f64) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
    let n = a.ncols();
    if a.nrows() == 0 || n == 0 {
        return (vec![], nalgebra::DMatrix::identity(n, n));
    }
    // Eigen-decomposition of the Gram matrix would square the condition
    // number; the SVD of a tall matrix is computed via its R factor instead.
    let r = if a.nrows() > n { a.clone().qr().r() } else { a.clone() };
    let svd = nalgebra::SVD::new(r, false, true);
    let vt = svd.v_t.expect("requested V");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let mut null_cols: Vec<nalgebra::DVector<f64>> = Vec::new();
    for (&i, &s) in idx.iter().zip(&sv) {
        if s <= rel_cutoff * smax {
            null_cols.push(vt.row(i).transpose());
        }
    }
    // Rows beyond the rank of a wide matrix are not returned by the thin SVD.
    if vt.nrows() < n {
        let q = {
            let mut basis = nalgebra::DMatrix::<f64>::zeros(n, vt.nrows() + null_cols.len());
            for r in 0..vt.nrows() {
                basis.set_column(r, &vt.row(r).transpose());
            }
            basis
        };
        let full = complete_orthonormal(&q.columns(0, vt.nrows()).into_owned());
        for c in 0..full.ncols() {
            null_cols.push(full.column(c).into_owned());
        }
    }
    let mut out = nalgebra::DMatrix::zeros(n, null_cols.len());
    for (c, col) in null_cols.iter().enumerate() {
        out.set_column(c, col);
    }
    (sv, out)
}

/// Orthonormal basis of the orthogonal complement of the column span of `q`
/// (assumed orthonormal).
fn complete_orthonormal(q: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
    let n = q.nrows();
    let mut cols: Vec<nalgebra::DVector<f64>> = (0..q.ncols()).map(|c| q.column(c).into_owned()).collect();
    let start = cols.len();
    for e in 0..n {
        let mut v = nalgebra::DVector::<f64>::zeros(n);
        v[e] = 1.0;
        for _ in 0..2 {
            for c in &cols {
                let p = c.dot(&v);
                v -= c * p;
            }
        }
        let nv = v.norm();
        if nv > 1e-8 {
            cols.push(v / nv);
        }
        if cols.len() == n {
            break;
        }
    }
    let extra = &cols[start..];
    let mut out = nalgebra::DMatrix::zeros(n, extra.len());
    for (c, col) in extra.iter().enumerate() {
        out.set_column(c, col);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dual;

    #[test]
    fn solve_and_det() {
        let a = Mat::from_fn(3, 3, |i, j| [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]][i][j]);
        assert!((a.det() - 18.0).abs() < 1e-12);
        let x = a.solve_vec(&[1.0, 2.0, 3.0]).unwrap();
        let r = a.mul_vec(&x);
        for (ri, bi) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((ri - bi).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = Mat::from_fn(2, 2, |i, _| i as f64 + 1.0);
        assert!(a.inverse().is_err());
    }

    #[test]
    fn denman_beavers_on_spd() {
        let a = Mat::from_fn(2, 2, |i, j| [[5.0, 2.0], [2.0, 3.0]][i][j]);
        let (s, si) = a.sqrt_and_inv_sqrt().unwrap();
        assert!(s.mul(&s).sub(&a).max_abs() < 1e-12);
        assert!(s.mul(&si).sub(&Mat::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn denman_beavers_differentiates() {
        // d/dt sqrt(t·I + B) at t = 0 solves S·X + X·S = I.
        let b = [[5.0, 2.0], [2.0, 3.0]];
        let a = Mat::from_fn(2, 2, |i, j| {
            Dual::new(b[i][j], if i == j { 1.0 } else { 0.0 })
        });
        let (s, _) = a.sqrt_and_inv_sqrt().unwrap();
        let re = Mat::from_fn(2, 2, |i, j| s[(i, j)].re);
        let der = Mat::from_fn(2, 2, |i, j| s[(i, j)].eps);
        let lhs = re.mul(&der).add(&der.mul(&re));
        assert!(lhs.sub(&Mat::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = nalgebra::DMatrix::from_row_slice(4, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, -1.0, -2.0, -3.0, 0.5, 1.0, 1.5]);
        let (_, ns) = nullspace(&a, 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!((&a * &ns).norm() < 1e-12);
        let wide = nalgebra::DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let (_, ns) = nullspace(&wide, 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!((&wide * &ns).norm() < 1e-12);
    }
}
