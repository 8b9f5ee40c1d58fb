use super::blade::{self, Blade};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Constant alternating `k`-form on an `n`-dimensional vector space, stored
/// densely over the blades of degree `k` in ascending mask order.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector<T> {
    pub n: usize,
    pub k: usize,
    pub c: Vec<T>,
}

impl<T: Scalar> Covector<T> {
    pub fn zero(n: usize, k: usize) -> Self {
        Covector { n, k, c: vec![T::zero(); blade::binomial(n, k)] }
    }

    pub fn basis(n: usize, b: Blade) -> Self {
        let mut out = Self::zero(n, blade::degree(b));
        out.c[blade::rank(b)] = T::one();
        out
    }

    pub fn scalar(n: usize, v: T) -> Self {
        Covector { n, k: 0, c: vec![v] }
    }

    pub fn get(&self, b: Blade) -> T {
        self.c[blade::rank(b)]
    }

    pub fn set(&mut self, b: Blade, v: T) {
        let r = blade::rank(b);
        self.c[r] = v;
    }

    pub fn add_to(&mut self, b: Blade, v: T) {
        let r = blade::rank(b);
        self.c[r] += v;
    }

    /// Entries paired with their blades.
    pub fn iter(&self) -> impl Iterator<Item = (Blade, T)> + '_ {
        blade::blades(self.n, self.k).into_iter().zip(self.c.iter().copied())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.n, self.k), (o.n, o.k), "covector shape mismatch");
        Covector { n: self.n, k: self.k, c: self.c.iter().zip(&o.c).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.n, self.k), (o.n, o.k), "covector shape mismatch");
        Covector { n: self.n, k: self.k, c: self.c.iter().zip(&o.c).map(|(&a, &b)| a - b).collect() }
    }

    pub fn scale(&self, s: T) -> Self {
        Covector { n: self.n, k: self.k, c: self.c.iter().map(|&a| a * s).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|x| x.value().abs()).fold(0.0, f64::max)
    }

    pub fn wedge(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let mut out = Self::zero(self.n, self.k + o.k);
        if self.k + o.k > self.n {
            return out;
        }
        for (a, x) in self.iter() {
            if x == T::zero() {
                continue;
            }
            for (b, y) in o.iter() {
                if let Some(s) = blade::wedge_sign(a, b) {
                    let v = x * y;
                    out.add_to(a | b, if s > 0 { v } else { -v });
                }
            }
        }
        out
    }

    /// Contraction `u ⌟ self` in the first slot.
    pub fn interior(&self, u: &[T]) -> Self {
        assert!(self.k >= 1);
        let mut out = Self::zero(self.n, self.k - 1);
        for (b, x) in self.iter() {
            // e_I = e_{i1} ∧ e_{rest}; removing the p-th index costs (-1)^p.
            for (p, i) in blade::indices(b).into_iter().enumerate() {
                let v = x * u[i];
                let v = if p % 2 == 0 { v } else { -v };
                out.add_to(b & !(1 << i), v);
            }
        }
        out
    }

    /// Value on an ordered list of `k` vectors.
    pub fn eval(&self, vs: &[Vec<T>]) -> T {
        assert_eq!(vs.len(), self.k);
        let mut s = T::zero();
        for (b, x) in self.iter() {
            if x == T::zero() {
                continue;
            }
            let idx = blade::indices(b);
            let m = Mat::from_fn(self.k, self.k, |r, c| vs[c][idx[r]]);
            s += x * m.det();
        }
        s
    }

    /// Pullback under the linear map with matrix `a` (`n × m`, columns are
    /// images of the domain basis): `(a*ω)(w…) = ω(a w…)`.
    pub fn pullback(&self, a: &Mat<T>) -> Self {
        assert_eq!(a.rows, self.n);
        let m = a.cols;
        let mut out = Self::zero(m, self.k);
        if self.k > m {
            return out;
        }
        for (ib, i) in blade::blades(m, self.k).into_iter().enumerate() {
            let cols = blade::indices(i);
            let mut s = T::zero();
            for (j, x) in self.iter() {
                if x == T::zero() {
                    continue;
                }
                let rows = blade::indices(j);
                let minor = Mat::from_fn(self.k, self.k, |r, c| a[(rows[r], cols[c])]);
                s += x * minor.det();
            }
            out.c[ib] = s;
        }
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Covector<U> {
        Covector { n: self.n, k: self.k, c: self.c.iter().map(|&x| f(x)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_and_eval() {
        let dx = Covector::<f64>::basis(3, 0b001);
        let dy = Covector::<f64>::basis(3, 0b010);
        let w = dx.wedge(&dy);
        let ex = vec![1.0, 0.0, 0.0];
        let ey = vec![0.0, 1.0, 0.0];
        assert_eq!(w.eval(&[ex.clone(), ey.clone()]), 1.0);
        assert_eq!(w.eval(&[ey, ex]), -1.0);
        assert_eq!(dy.wedge(&dx).get(0b011), -1.0);
    }

    #[test]
    fn interior_matches_eval() {
        let a = Covector { n: 3, k: 2, c: vec![1.0, 2.0, 3.0] };
        let u = vec![0.3, -1.0, 2.0];
        let w = vec![1.5, 0.5, -0.7];
        let lhs = a.interior(&u).eval(&[w.clone()]);
        assert!((lhs - a.eval(&[u, w])).abs() < 1e-14);
    }

    #[test]
    fn pullback_by_scaling() {
        let a = Mat::from_fn(3, 3, |i, j| if i == j { if i == 0 { 2.0 } else { 1.0 } } else { 0.0 });
        let w = Covector::<f64>::basis(3, 0b011);
        assert_eq!(w.pullback(&a).get(0b011), 2.0);
    }
}
