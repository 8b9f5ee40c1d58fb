//! Primitivity and the Lefschetz decomposition `α = Σ Lⁱ ρ_{k−2i}`.

use serde::Serialize;

use super::algebra::SymplecticAlgebra;
use super::structure::TransversalHodge;
use crate::error::{Error, Result};
use crate::exterior::{blade, Covector, PointwiseForm};
use crate::linalg::Mat;

/// `Lʲ` from degree `p` to `p + 2j` (`None` past the top degree).
pub fn l_power(a: &SymplecticAlgebra, p: usize, j: usize) -> Option<Mat<f64>> {
    let d = a.dim();
    if p + 2 * j > d {
        return None;
    }
    let mut m = Mat::identity(blade::binomial(d, p));
    for s in 0..j {
        m = a.l[p + 2 * s].mul(&m);
    }
    Some(m)
}

/// Primitive components of a covector on the standard space together with
/// the reconstruction residual. `out[i]` has degree `k − 2i`.
pub fn decompose_covector(a: &SymplecticAlgebra, alpha: &Covector<f64>) -> Result<(Vec<Covector<f64>>, f64)> {
    let d = a.dim();
    let k = alpha.k;
    if alpha.n != d {
        return Err(Error::Dimension(format!("covector on ℝ^{} in dimension {d}", alpha.n)));
    }
    if k > d {
        return Err(Error::Degree(format!("degree {k} exceeds {d}")));
    }
    let parts: Vec<usize> = (0..=k / 2).map(|i| k - 2 * i).collect();
    let sizes: Vec<usize> = parts.iter().map(|&q| blade::binomial(d, q)).collect();
    let unknowns: usize = sizes.iter().sum();
    let lam_rows: usize = parts.iter().map(|&q| if q >= 2 { blade::binomial(d, q - 2) } else { 0 }).sum();
    let rows = alpha.c.len() + lam_rows;
    let mut sys = nalgebra::DMatrix::<f64>::zeros(rows, unknowns);
    let mut rhs = nalgebra::DVector::<f64>::zeros(rows);
    for (r, &x) in alpha.c.iter().enumerate() {
        rhs[r] = x;
    }
    let mut col0 = 0;
    let mut row0 = alpha.c.len();
    for (i, &q) in parts.iter().enumerate() {
        let li = l_power(a, q, i).expect("degree stays below the top");
        for r in 0..li.rows {
            for c in 0..li.cols {
                sys[(r, col0 + c)] = li[(r, c)];
            }
        }
        if q >= 2 {
            let lam = &a.lambda[q];
            for r in 0..lam.rows {
                for c in 0..lam.cols {
                    sys[(row0 + r, col0 + c)] = lam[(r, c)];
                }
            }
            row0 += lam.rows;
        }
        col0 += sizes[i];
    }
    let svd = sys.clone().svd(true, true);
    let x = svd.solve(&rhs, 1e-12).map_err(|e| Error::Structure(e.to_string()))?;
    let residual = (&sys * &x - &rhs).amax();
    let mut out = Vec::with_capacity(parts.len());
    let mut col0 = 0;
    for (i, &q) in parts.iter().enumerate() {
        out.push(Covector { n: d, k: q, c: (0..sizes[i]).map(|j| x[col0 + j]).collect() });
        col0 += sizes[i];
    }
    Ok((out, residual))
}

/// Pointwise Lefschetz decomposition over a set of points.
#[derive(Clone, Debug, Serialize)]
pub struct PrimitiveDecomposition {
    pub degree: usize,
    pub points: Vec<Vec<f64>>,
    /// `components[j][i]`: ambient coefficients of `ρ_{k−2i}` at point `j`.
    pub components: Vec<Vec<Vec<f64>>>,
    /// `sup |α − Σ Lⁱρ_{k−2i}|`.
    pub reconstruction_residual: f64,
    /// `sup |Λρ_{k−2i}|`.
    pub primitivity_residual: f64,
    pub unique: bool,
    pub tol: f64,
}

impl PrimitiveDecomposition {
    pub fn component(&self, point: usize, i: usize) -> Covector<f64> {
        let m = self.points[point].len();
        let q = self.degree - 2 * i;
        Covector { n: m, k: q, c: self.components[point][i].clone() }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PrimitivityVerdict {
    pub primitive: bool,
    /// Verdict of `L^{n−p+1} α = 0`.
    pub by_power: bool,
    /// Verdict of `Λα = 0`.
    pub by_lambda: bool,
    pub agree: bool,
    pub sup_power: f64,
    pub sup_lambda: f64,
    pub samples: usize,
    pub tol: f64,
}

impl TransversalHodge {
    /// Tests primitivity of a basic form of degree `p ≤ n` both ways.
    pub fn is_primitive<F: PointwiseForm>(&self, alpha: &F, points: &[Vec<f64>], tol: f64) -> Result<PrimitivityVerdict> {
        let n = self.n();
        let p = alpha.degree();
        if p > n {
            return Err(Error::Structure(format!("primitivity is defined for degree ≤ {n}, got {p}")));
        }
        let a = &self.algebra;
        let power = l_power(a, p, n - p + 1);
        let mut sup_power: f64 = 0.0;
        let mut sup_lambda: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for pt in points {
            let f = self.cached_frame(pt)?;
            let c = f.components(&alpha.at(pt));
            scale = scale.max(c.max_abs());
            if let Some(m) = &power {
                sup_power = sup_power.max(m.mul_vec(&c.c).iter().fold(0.0, |s, x| s.max(x.abs())));
            }
            if p >= 2 {
                sup_lambda = sup_lambda.max(a.lambda[p].mul_vec(&c.c).iter().fold(0.0, |s, x| s.max(x.abs())));
            }
        }
        let by_power = sup_power <= tol * scale;
        let by_lambda = sup_lambda <= tol * scale;
        Ok(PrimitivityVerdict {
            primitive: by_power && by_lambda,
            by_power,
            by_lambda,
            agree: by_power == by_lambda,
            sup_power,
            sup_lambda,
            samples: points.len(),
            tol,
        })
    }

    /// Decomposes a basic `k`-form pointwise into primitive parts by
    /// constrained least squares.
    pub fn lefschetz_decompose<F: PointwiseForm>(&self, alpha: &F, points: &[Vec<f64>], tol: f64) -> Result<PrimitiveDecomposition> {
        let k = alpha.degree();
        let a = &self.algebra;
        if k > a.dim() {
            return Err(Error::Degree(format!("basic forms have degree ≤ {}", a.dim())));
        }
        let mut out = PrimitiveDecomposition {
            degree: k,
            points: points.to_vec(),
            components: Vec::with_capacity(points.len()),
            reconstruction_residual: 0.0,
            primitivity_residual: 0.0,
            unique: true,
            tol,
        };
        for pt in points {
            let f = self.cached_frame(pt)?;
            let c = f.components(&alpha.at(pt));
            let (parts, _) = decompose_covector(a, &c)?;
            let mut recon = Covector::zero(a.dim(), k);
            for (i, rho) in parts.iter().enumerate() {
                let li = l_power(a, rho.k, i).unwrap();
                recon = recon.add(&Covector { n: a.dim(), k, c: li.mul_vec(&rho.c) });
                if rho.k >= 2 {
                    let lam = a.lambda[rho.k].mul_vec(&rho.c);
                    out.primitivity_residual = out.primitivity_residual.max(lam.iter().fold(0.0, |s, x| s.max(x.abs())));
                }
            }
            out.reconstruction_residual = out.reconstruction_residual.max(recon.sub(&c).max_abs());
            out.components.push(parts.iter().map(|r| f.reconstruct(r).c).collect());
        }
        out.unique = out.reconstruction_residual <= tol && out.primitivity_residual <= tol;
        if !out.unique {
            return Err(Error::Structure(format!(
                "Lefschetz decomposition residuals {:e} / {:e} exceed {tol:e}",
                out.reconstruction_residual, out.primitivity_residual
            )));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n2_omega_splits_into_trace() {
        let a = SymplecticAlgebra::new(2);
        let w = super::super::algebra::omega_covector::<f64>(2);
        let (parts, res) = decompose_covector(&a, &w).unwrap();
        assert!(res < 1e-12);
        assert!(parts[0].max_abs() < 1e-12);
        assert!((parts[1].c[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn primitive_input_is_fixed() {
        let a = SymplecticAlgebra::new(2);
        // e¹∧e³ is primitive: Λ kills it.
        let mut x = Covector::zero(4, 2);
        x.set(0b0101, 1.0);
        let (parts, res) = decompose_covector(&a, &x).unwrap();
        assert!(res < 1e-12);
        assert!(parts[0].sub(&x).max_abs() < 1e-12);
        assert!(parts[1].max_abs() < 1e-12);
    }
}
