//! Tensor Gauss–Legendre rules on unit cubes.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_01(order: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order.max(1)).unwrap());
    rule.as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect()
}

/// Composite rule on `[0, 1]` with `cells` equal subintervals.
pub fn composite_01(order: usize, cells: usize) -> Vec<(f64, f64)> {
    let base = gauss_01(order);
    let cells = cells.max(1);
    let h = 1.0 / cells as f64;
    let mut out = Vec::with_capacity(base.len() * cells);
    for c in 0..cells {
        for &(x, w) in &base {
            out.push(((c as f64 + x) * h, w * h));
        }
    }
    out
}

/// Tensor product of a one-dimensional rule in `k` dimensions.
pub fn tensor(rule: &[(f64, f64)], k: usize) -> Vec<(Vec<f64>, f64)> {
    let mut out = vec![(Vec::with_capacity(k), 1.0)];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * rule.len());
        for (p, w) in &out {
            for &(x, wx) in rule {
                let mut q = p.clone();
                q.push(x);
                next.push((q, w * wx));
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let r = composite_01(4, 3);
        let s: f64 = r.iter().map(|(x, w)| w * x.powi(7)).sum();
        assert!((s - 1.0 / 8.0).abs() < 1e-15);
        let t = tensor(&gauss_01(3), 2);
        let s: f64 = t.iter().map(|(p, w)| w * p[0] * p[1] * p[1]).sum();
        assert!((s - 1.0 / 6.0).abs() < 1e-15);
    }
}
