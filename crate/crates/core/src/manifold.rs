//! Stages on which fields live: coordinate boxes (optionally periodic or with
//! boundary faces) and level sets in an ambient coordinate space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::linalg::{dot, norm};
use crate::scalar::Scalar;

/// Range of one coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub periodic: bool,
    /// Whether the faces `x = lo` and `x = hi` belong to the manifold's
    /// boundary (as opposed to being an evaluation window).
    #[serde(default)]
    pub boundary: [bool; 2],
}

impl Interval {
    pub fn window(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, periodic: false, boundary: [false, false] }
    }
    pub fn bounded(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, periodic: false, boundary: [true, true] }
    }
    pub fn periodic(lo: f64, period: f64) -> Self {
        Interval { lo, hi: lo + period, periodic: true, boundary: [false, false] }
    }
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Debug)]
pub enum Kind {
    Chart,
    LevelSet { constraint: Expr, target: f64, gradient: Vec<Expr> },
}

#[derive(Clone, Debug)]
pub struct Manifold {
    pub name: String,
    pub coords: Vec<String>,
    /// Per-coordinate ranges; for level sets, the ambient box used for sampling.
    pub bounds: Vec<Interval>,
    pub kind: Kind,
    /// Extra margin outside non-periodic windows still accepted as "on" the
    /// manifold.
    pub collar: f64,
}

/// Boundary face `coords[axis] = lo` (`side = 0`) or `hi` (`side = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub axis: usize,
    pub side: usize,
}

impl Manifold {
    pub fn chart(name: &str, coords: &[&str], bounds: Vec<Interval>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Structure("manifold needs at least one coordinate".into()));
        }
        if bounds.len() != coords.len() {
            return Err(Error::Dimension(format!("{} bounds for {} coordinates", bounds.len(), coords.len())));
        }
        for b in &bounds {
            if !(b.hi > b.lo) {
                return Err(Error::Structure(format!("empty or inverted interval [{}, {}]", b.lo, b.hi)));
            }
        }
        Ok(Manifold {
            name: name.to_string(),
            coords: coords.iter().map(|s| s.to_string()).collect(),
            bounds,
            kind: Kind::Chart,
            collar: 1e-9,
        })
    }

    pub fn level_set(name: &str, coords: &[&str], ambient_box: Vec<Interval>, constraint: &str, target: f64) -> Result<Self> {
        let mut m = Self::chart(name, coords, ambient_box)?;
        if m.bounds.iter().any(|b| b.periodic || b.boundary.iter().any(|&f| f)) {
            return Err(Error::Structure("level-set ambient box must be a plain window".into()));
        }
        let f = parse(constraint, &m.coords)?;
        let gradient = (0..m.coords.len()).map(|i| f.diff(i)).collect();
        m.kind = Kind::LevelSet { constraint: f, target, gradient };
        if m.coords.len() < 2 {
            return Err(Error::Structure("level set needs an ambient dimension of at least 2".into()));
        }
        Ok(m)
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        match self.kind {
            Kind::Chart => self.coords.len(),
            Kind::LevelSet { .. } => self.coords.len() - 1,
        }
    }

    /// Number of coordinates that forms and points use.
    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_level_set(&self) -> bool {
        matches!(self.kind, Kind::LevelSet { .. })
    }

    pub fn faces(&self) -> Vec<Face> {
        let mut out = Vec::new();
        if let Kind::Chart = self.kind {
            for (axis, b) in self.bounds.iter().enumerate() {
                for side in 0..2 {
                    if b.boundary[side] {
                        out.push(Face { axis, side });
                    }
                }
            }
        }
        out
    }

    pub fn has_boundary(&self) -> bool {
        !self.faces().is_empty()
    }

    /// Compact without boundary: level sets, or charts periodic in every
    /// coordinate.
    pub fn is_closed(&self) -> bool {
        match self.kind {
            Kind::LevelSet { .. } => true,
            Kind::Chart => self.bounds.iter().all(|b| b.periodic),
        }
    }

    /// Periodic coordinates reduced into `[lo, lo + period)`.
    pub fn reduce<T: Scalar>(&self, p: &[T]) -> Vec<T> {
        p.iter()
            .zip(&self.bounds)
            .map(|(&x, b)| {
                if b.periodic {
                    let w = b.width();
                    let k = ((x.value() - b.lo) / w).floor();
                    if k != 0.0 {
                        return x - T::of(k * w);
                    }
                }
                x
            })
            .collect()
    }

    /// Constraint gradient at `p` (level sets only).
    pub fn normal<T: Scalar>(&self, p: &[T]) -> Option<Vec<T>> {
        match &self.kind {
            Kind::Chart => None,
            Kind::LevelSet { gradient, .. } => Some(gradient.iter().map(|g| g.eval(p)).collect()),
        }
    }

    pub fn constraint_residual(&self, p: &[f64]) -> f64 {
        match &self.kind {
            Kind::Chart => 0.0,
            Kind::LevelSet { constraint, target, .. } => constraint.eval(p) - target,
        }
    }

    /// Orthogonal projection `(I − ∇F∇Fᵀ/|∇F|²)u`; identity on charts.
    pub fn project_vector<T: Scalar>(&self, p: &[T], u: &[T]) -> Vec<T> {
        match self.normal(p) {
            None => u.to_vec(),
            Some(g) => {
                let gg = dot(&g, &g);
                let c = dot(&g, u) / gg;
                u.iter().zip(&g).map(|(&ui, &gi)| ui - c * gi).collect()
            }
        }
    }

    /// Spanning set of the tangent space with exactly `dim()` vectors:
    /// coordinate vectors, projected, with the most normal one dropped.
    pub fn tangent_basis<T: Scalar>(&self, p: &[T]) -> Vec<Vec<T>> {
        let m = self.ambient_dim();
        let unit = |i: usize| (0..m).map(|j| if i == j { T::one() } else { T::zero() }).collect::<Vec<T>>();
        match self.normal(p) {
            None => (0..m).map(unit).collect(),
            Some(g) => {
                let drop = (0..m).max_by(|&i, &j| g[i].value().abs().total_cmp(&g[j].value().abs())).unwrap();
                (0..m).filter(|&i| i != drop).map(|i| self.project_vector(p, &unit(i))).collect()
            }
        }
    }

    /// Orthonormal tangent frame. On level sets it is positively oriented
    /// after the outward normal: `det[N, e₁, …, e_m] > 0`.
    pub fn orientation_frame(&self, p: &[f64]) -> Vec<Vec<f64>> {
        let basis = self.tangent_basis(p);
        let Some(g) = self.normal(p) else { return basis };
        let mut out: Vec<Vec<f64>> = Vec::new();
        for mut v in basis {
            for _ in 0..2 {
                for e in &out {
                    let c = dot(e, &v);
                    for (vi, ei) in v.iter_mut().zip(e) {
                        *vi -= c * ei;
                    }
                }
            }
            let nv = norm(&v);
            out.push(v.iter().map(|x| x / nv).collect());
        }
        let gn = norm(&g);
        let mut cols = vec![g.iter().map(|x| x / gn).collect::<Vec<_>>()];
        cols.extend(out.iter().cloned());
        if crate::linalg::Mat::from_columns(&cols).det() < 0.0 {
            let last = out.last_mut().unwrap();
            for x in last.iter_mut() {
                *x = -*x;
            }
        }
        out
    }

    /// Newton projection onto the level set along the gradient.
    pub fn project_point(&self, p: &[f64]) -> Result<Vec<f64>> {
        let mut q = p.to_vec();
        if let Kind::Chart = self.kind {
            return Ok(self.reduce(&q));
        }
        for _ in 0..50 {
            let r = self.constraint_residual(&q);
            if r.abs() <= 1e-15 * (1.0 + self.target().abs()) {
                return Ok(q);
            }
            let g = self.normal(&q).unwrap();
            let gg = dot(&g, &g);
            if gg < 1e-24 {
                return Err(Error::OffManifold(format!("vanishing constraint gradient at {q:?}")));
            }
            for (qi, gi) in q.iter_mut().zip(&g) {
                *qi -= r * gi / gg;
            }
        }
        let r = self.constraint_residual(&q);
        if r.abs() < 1e-12 {
            Ok(q)
        } else {
            Err(Error::NoConvergence { context: "projection onto level set" })
        }
    }

    fn target(&self) -> f64 {
        match &self.kind {
            Kind::LevelSet { target, .. } => *target,
            Kind::Chart => 0.0,
        }
    }

    /// Membership with tolerance `tol` (level-set residual) and the collar
    /// margin on non-periodic windows.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        if p.len() != self.ambient_dim() {
            return false;
        }
        let in_box = p.iter().zip(&self.bounds).all(|(&x, b)| {
            b.periodic || (x >= b.lo - self.collar && x <= b.hi + self.collar)
        });
        match self.kind {
            Kind::Chart => in_box,
            Kind::LevelSet { .. } => self.constraint_residual(p).abs() <= tol,
        }
    }

    /// Quasi-random points on the manifold (Halton sequence, offset by the
    /// seed). Deterministic for a given `(count, seed)`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let m = self.ambient_dim();
        let mut out = Vec::with_capacity(count);
        let mut index = 1 + seed.wrapping_mul(104_729) % 1_000_000;
        while out.len() < count {
            let u = halton_point(index, m);
            index += 1;
            let p: Vec<f64> = u.iter().zip(&self.bounds).map(|(t, b)| b.lo + t * b.width()).collect();
            match self.kind {
                Kind::Chart => out.push(p),
                Kind::LevelSet { .. } => {
                    let g = self.normal(&p).unwrap();
                    if norm(&g) < 1e-3 {
                        continue;
                    }
                    if let Ok(q) = self.project_point(&p) {
                        if q.iter().all(|x| x.is_finite()) {
                            out.push(q);
                        }
                    }
                }
            }
        }
        out
    }

    /// Quasi-random points on each boundary face, `per_face` per face.
    pub fn face_samples(&self, per_face: usize, seed: u64) -> Vec<(Face, Vec<f64>)> {
        let mut out = Vec::new();
        for f in self.faces() {
            for mut p in self.sample(per_face, seed.wrapping_add(f.axis as u64 * 2 + f.side as u64 + 1)) {
                let b = &self.bounds[f.axis];
                p[f.axis] = if f.side == 0 { b.lo } else { b.hi };
                out.push((f, p));
            }
        }
        out
    }
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Point `i` of the `dim`-dimensional Halton sequence in `[0, 1)^dim`.
pub fn halton_point(i: u64, dim: usize) -> Vec<f64> {
    (0..dim).map(|d| radical_inverse(i, PRIMES[d % PRIMES.len()])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> Manifold {
        Manifold::level_set(
            "s3",
            &["x1", "y1", "x2", "y2"],
            vec![Interval::window(-1.0, 1.0); 4],
            "x1^2 + y1^2 + x2^2 + y2^2",
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn sphere_samples_lie_on_the_sphere() {
        let s = sphere();
        let pts = s.sample(200, 7);
        assert_eq!(pts.len(), 200);
        for p in &pts {
            assert!(s.contains(p, 1e-13));
            let basis = s.tangent_basis(p);
            assert_eq!(basis.len(), 3);
            let g = s.normal(p).unwrap();
            for v in &basis {
                assert!(dot(v, &g).abs() < 1e-13);
            }
        }
        assert_eq!(s.sample(5, 7), s.sample(5, 7));
        assert_ne!(s.sample(5, 7), s.sample(5, 8));
    }

    #[test]
    fn orientation_frame_is_orthonormal_and_oriented() {
        let s = sphere();
        let p = [0.5, 0.5, 0.5, 0.5];
        let f = s.orientation_frame(&p);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&f[i], &f[j]) - e).abs() < 1e-14);
            }
        }
        let mut cols = vec![p.to_vec()];
        cols.extend(f);
        assert!(crate::linalg::Mat::from_columns(&cols).det() > 0.0);
    }

    #[test]
    fn periodic_reduction() {
        let t = Manifold::chart("t", &["x"], vec![Interval::periodic(0.0, 2.0)]).unwrap();
        assert!((t.reduce(&[5.5])[0] - 1.5).abs() < 1e-15);
        assert!((t.reduce(&[-0.5])[0] - 1.5).abs() < 1e-15);
        assert!(t.is_closed());
    }

    #[test]
    fn faces_of_a_cube() {
        let c = Manifold::chart("cube", &["x", "y", "z"], vec![Interval::bounded(0.0, 1.0); 3]).unwrap();
        assert_eq!(c.faces().len(), 6);
        for (f, p) in c.face_samples(4, 1) {
            assert_eq!(p[f.axis], f.side as f64);
        }
        assert!(Manifold::chart("bad", &["x"], vec![Interval::window(1.0, 0.0)]).is_err());
    }
}
