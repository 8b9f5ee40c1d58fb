//! Transversal Hodge theory of a contact form: compatible `(g, J)`, the
//! basic and symplectic stars, codifferentials, Laplacians and the
//! Lefschetz–Weyl operators.

pub mod algebra;
pub mod lefschetz;
pub mod operators;
pub mod structure;

pub use algebra::{tables, SymplecticAlgebra, J_FORM_CONVENTION};
pub use lefschetz::{decompose_covector, PrimitiveDecomposition, PrimitivityVerdict};
pub use operators::{Codifferential, FrameOp, Laplacian, StarKind, Transversal};
pub use structure::{CompatibilityReport, PointFrame, SeedMetric, TransversalHodge};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_fixture;
    use crate::contact::tangential_sup;
    use crate::exterior::{Covector, FormField, PointwiseForm};

    fn sup_tangential<F: PointwiseForm, G: PointwiseForm>(h: &TransversalHodge, a: &F, b: &G, pts: &[Vec<f64>]) -> f64 {
        pts.iter()
            .map(|p| tangential_sup(&h.ctx.manifold, p, &a.at(p).sub(&b.at(p))))
            .fold(0.0, f64::max)
    }

    #[test]
    fn r3_frame_examples() {
        let f = load_fixture("std-r3").unwrap();
        let h = TransversalHodge::euclidean(f.ctx.clone()).unwrap();
        let j = h.apply_j(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert!((j[1] - 1.0).abs() < 1e-14 && j[0].abs() < 1e-14 && j[2].abs() < 1e-14);
        let j = h.apply_j(&[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!((j[0] + 1.0).abs() < 1e-14);
        let g = h.metric_at(&[0.0, 0.0, 0.0]).unwrap();
        assert!(g.sub(&crate::linalg::Mat::identity(3)).max_abs() < 1e-14);
        let r = h.check_compatibility(64, 3, 1e-12).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn s3_stars() {
        let f = load_fixture("s3-hopf").unwrap();
        let h = TransversalHodge::euclidean(f.ctx.clone()).unwrap();
        let pts = h.ctx.manifold.sample(20, 5);
        let one = FormField::constant(4, 1);
        let db = h.ctx.dbeta.clone();
        assert!(sup_tangential(&h, &h.star_b(&one), &db, &pts) < 1e-12);
        assert!(sup_tangential(&h, &h.star_b(&db), &one, &pts) < 1e-12);
        assert!(sup_tangential(&h, &h.star_dbeta(&one), &db.neg(), &pts) < 1e-12);
        let lam = h.lefschetz_lambda(&db);
        assert!(sup_tangential(&h, &lam, &one, &pts) < 1e-12);
        let zero2 = crate::exterior::ZeroForm { n: 4, k: 1 };
        assert!(sup_tangential(&h, &h.basic_codifferential(&db), &zero2, &pts) < 1e-10);
        let zero0 = crate::exterior::ZeroForm { n: 4, k: 0 };
        assert!(sup_tangential(&h, &h.metric_laplacian(&one), &zero0, &pts) < 1e-10);
        assert!(h.cache_len() > 0);
    }

    #[test]
    fn pairing_examples() {
        let f = load_fixture("std-r3").unwrap();
        let h = TransversalHodge::euclidean(f.ctx.clone()).unwrap();
        let p = [0.0, 0.0, 0.0];
        let frame = h.cached_frame(&p).unwrap();
        let e1 = frame.reconstruct(&Covector::basis(2, 0b01));
        let e2 = frame.reconstruct(&Covector::basis(2, 0b10));
        assert!((h.pairing_k(&e1, &e2, &p, 1e-12).unwrap() - 1.0).abs() < 1e-14);
        assert!(h.pairing_k(&e1, &e1, &p, 1e-12).unwrap().abs() < 1e-14);
        let beta = h.ctx.beta.eval_at(&p);
        assert!(h.pairing_k(&beta, &e1, &p, 1e-9).is_err());
    }
}
