//! Galerkin computation of basic cohomology on closed fixtures.

pub mod analysis;
pub mod dictionary;
pub mod galerkin;

pub use analysis::{
    assemble_laplacian, codifferential_cross_check, hard_lefschetz_check, harmonic_dimension, hodge_decompose,
    primitive_class_decomposition, star_duality_check, symmetry_residual, CodifferentialCrossCheck, DualityVerdict,
    HodgeDecomposition, LaplacianKind, LefschetzVerdict, MapVerdict, PrimitiveClass, PrimitiveClassDecomposition,
    SpectralReport,
};
pub use dictionary::{Atom, AtomFamily, DictForm, DictionaryKind, FormDictionary};
pub use galerkin::{build_galerkin_space, GalerkinComplex, GalerkinSpace, SpectralOptions};

#[cfg(test)]
mod tests {
    use std::sync::OnceLock;

    use super::*;
    use crate::catalog::load_fixture;
    use crate::contact::is_basic;
    use crate::exterior::{FormField, PointwiseForm};
    use crate::hodge::TransversalHodge;

    fn hodge(id: &str) -> TransversalHodge {
        TransversalHodge::euclidean(load_fixture(id).unwrap().ctx).unwrap()
    }

    fn s3() -> &'static GalerkinComplex<'static> {
        static H: OnceLock<TransversalHodge> = OnceLock::new();
        static C: OnceLock<GalerkinComplex<'static>> = OnceLock::new();
        let h = H.get_or_init(|| hodge("s3-hopf"));
        C.get_or_init(|| GalerkinComplex::build(h, "s3-hopf", &SpectralOptions::default()).unwrap())
    }

    fn form(c: &GalerkinComplex, comps: &[(&str, &str)]) -> FormField {
        FormField::parse(comps, c.hodge.ctx.coords()).unwrap()
    }

    #[test]
    fn s3_basic_betti_numbers() {
        let c = s3();
        assert!(c.dd_residual() < 1e-10);
        let mut dims = vec![];
        for k in 0..=2 {
            let r = harmonic_dimension(c, k, LaplacianKind::Basic).unwrap();
            assert!(r.conclusive && r.gap_ratio >= 1e3, "{k}: {:?}", r.singular_values);
            assert!(r.symmetry_residual <= 1e-10);
            let (idem, sa) = r.projector_residuals(c);
            assert!(idem < 1e-8 && sa < 1e-8, "{idem:e} {sa:e}");
            let s = harmonic_dimension(c, k, LaplacianKind::Symplectic).unwrap();
            assert_eq!(s.kernel_dim, r.kernel_dim);
            dims.push(r.kernel_dim.unwrap());
        }
        assert_eq!(dims, [1, 0, 1]);
        // Constants span the degree-0 kernel.
        let one = FormField::constant(4, 1);
        let (c1, rest) = c.project(0, &one).unwrap();
        assert!(rest < 1e-10);
        let r0 = harmonic_dimension(c, 0, LaplacianKind::Basic).unwrap();
        assert!((r0.project(&c1) - &c1).norm() < 1e-10);
    }

    #[test]
    fn s3_dimensions_stable_in_degree() {
        let h = hodge("s3-hopf");
        for d in [2, 3] {
            let c = GalerkinComplex::build(&h, "s3-hopf", &SpectralOptions { degree: d, ..Default::default() }).unwrap();
            let dims: Vec<_> = (0..=2).map(|k| harmonic_dimension(&c, k, LaplacianKind::Basic).unwrap().kernel_dim).collect();
            assert_eq!(dims, [Some(1), Some(0), Some(1)]);
        }
    }

    #[test]
    fn galerkin_space_contents() {
        let h = hodge("s3-hopf");
        let opts = SpectralOptions { degree: 2, ..Default::default() };
        let s0 = build_galerkin_space(&h, "s3-hopf", 0, &opts).unwrap();
        assert!(s0.dim() >= 1);
        let s2 = build_galerkin_space(&h, "s3-hopf", 2, &opts).unwrap();
        assert_eq!(s2.dim(), 1);
        for i in 0..s2.dim() {
            let v = is_basic(&h.ctx.manifold, &s2.basis_form(i), &h.ctx.reeb, 64, 1, 1e-9);
            assert!(v.is_basic, "{v:?}");
        }
        let c = GalerkinComplex::build(&h, "s3-hopf", &opts).unwrap();
        let (_, rest) = c.project(2, &h.ctx.dbeta).unwrap();
        assert!(rest < 1e-10);

        let t = hodge("t3-family(1)");
        let c = GalerkinComplex::build(&t, "t3", &opts).unwrap();
        for i in 0..c.spaces[1].dim() {
            let v = is_basic(&t.ctx.manifold, &c.spaces[1].basis_form(i), &t.ctx.reeb, 64, 1, 1e-9);
            assert!(v.is_basic, "{v:?}");
        }
        let dx = form(&c, &[("dx", "1")]);
        let rot = form(&c, &[("dx", "-sin(z)"), ("dy", "cos(z)")]);
        let dz = form(&c, &[("dz", "1")]);
        let norm = |f: &FormField| c.l2_norm(f);
        assert!(c.project(1, &dx).unwrap().1 > 0.1 * norm(&dx));
        assert!(c.project(1, &rot).unwrap().1 > 0.1 * norm(&rot));
        assert!(c.project(1, &dz).unwrap().1 < 1e-10);
    }

    #[test]
    fn hodge_decomposition_examples() {
        let c = s3();
        let db = c.hodge.ctx.dbeta.clone();
        let d = hodge_decompose(c, &db, 1e-8).unwrap();
        assert!(d.conclusive && d.exact_norm < 1e-10 && d.residual < 1e-10);
        assert!((d.harmonic_norm - c.l2_norm(&db)).abs() < 1e-10);
        let f = form(c, &[("1", "x1^2 + y1^2")]);
        let df = f.d();
        let e = hodge_decompose(c, &df, 1e-8).unwrap();
        assert!(e.harmonic_norm < 1e-10 && e.residual < 1e-10);
        assert!((e.exact_norm - c.l2_norm(&df)).abs() < 1e-10);
        // θ differs from f by a constant.
        let theta = e.theta_form(c, 1e-13).unwrap();
        let pts = c.hodge.ctx.manifold.sample(5, 3);
        let off: Vec<f64> = pts.iter().map(|p| theta.at(p).c[0] - f.at(p).c[0]).collect();
        assert!(off.iter().all(|o| (o - off[0]).abs() < 1e-9), "{off:?}");
        let d1 = c.d_out(1);
        let i = (0..d1.ncols()).max_by(|&a, &b| d1.column(a).norm().total_cmp(&d1.column(b).norm())).unwrap();
        let gamma = c.spaces[1].dict.to_form_field(c.spaces[1].basis_form(i).coeffs.as_slice(), 0.0);
        let dg = gamma.d();
        let e = hodge_decompose(c, &dg, 1e-8).unwrap();
        assert!(e.harmonic_norm < 1e-10 && e.exact_norm > 0.1, "{e:?}");
        let sum = db.add(&dg).unwrap();
        let s = hodge_decompose(c, &sum, 1e-8).unwrap();
        let hd: Vec<f64> = s.harmonic.iter().zip(&d.harmonic).map(|(a, b)| a - b).collect();
        assert!(hd.iter().all(|x| x.abs() < 1e-10));
        assert!((s.exact_norm - e.exact_norm).abs() < 1e-10);
        assert!(hodge_decompose(c, &c.hodge.ctx.beta, 1e-8).is_err());
    }

    #[test]
    fn decomposition_residual_decreases_with_degree() {
        let h = hodge("s3-hopf");
        let alpha = FormField::parse(&[("dx1^dy1", "2*exp(x1^2+y1^2)"), ("dx2^dy2", "2*exp(x1^2+y1^2)")], h.ctx.coords()).unwrap();
        let mut last = f64::INFINITY;
        for d in [2, 3, 4] {
            let c = GalerkinComplex::build(&h, "s3-hopf", &SpectralOptions { degree: d, ..Default::default() }).unwrap();
            let r = hodge_decompose(&c, &alpha, 1.0).unwrap().residual;
            assert!(r < last, "D = {d}: {r:e} ≥ {last:e}");
            last = r;
        }
    }

    #[test]
    fn duality_and_lefschetz() {
        let c = s3();
        let d0 = star_duality_check(c, 0).unwrap();
        assert!(d0.pass && d0.map.rank == 1, "{d0:?}");
        let d1 = star_duality_check(c, 1).unwrap();
        assert!(d1.pass && d1.vacuous);
        let l1 = hard_lefschetz_check(c, 1).unwrap();
        assert!(l1.pass && l1.map.rank == 1, "{l1:?}");
        assert!(l1.codifferential_residual < 1e-8);
        let l0 = hard_lefschetz_check(c, 0).unwrap();
        assert!(l0.pass);
        let bad = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let v = LefschetzVerdict::from_map(2, 0, &bad);
        assert!(!v.pass && v.map.rank == 1);
    }

    #[test]
    fn primitive_classes() {
        let c = s3();
        let db = c.hodge.ctx.dbeta.clone();
        let p = primitive_class_decomposition(c, &db, 1e-8).unwrap();
        assert!(p.residual < 1e-9 && p.unique && p.pointwise_residual < 1e-12);
        assert_eq!(p.classes.len(), 1);
        let rho = p.classes[0].form(c, 1e-13);
        let pts = c.hodge.ctx.manifold.sample(4, 2);
        assert!(pts.iter().all(|q| (rho.at(q).c[0] - 1.0).abs() < 1e-9));
        let a = db.scale_num(crate::Number::ratio(-3, 2));
        let p = primitive_class_decomposition(c, &a, 1e-8).unwrap();
        let rho = p.classes[0].form(c, 1e-13);
        assert!(pts.iter().all(|q| (rho.at(q).c[0] + 1.5).abs() < 1e-9));
        let one = FormField::constant(4, 1);
        let p = primitive_class_decomposition(c, &one, 1e-8).unwrap();
        assert_eq!((p.classes[0].degree, p.classes[0].power), (0, 0));
        assert!(p.residual < 1e-10);
    }

    #[test]
    fn codifferential_routes_agree() {
        let c = s3();
        for k in [1, 2] {
            let x = codifferential_cross_check(c, k, 1e-4).unwrap();
            assert!(x.pass, "{x:?}");
        }
    }

    #[test]
    fn torus_is_exploratory_and_fails_lefschetz() {
        let t = hodge("t3-family(1)");
        let mut h2 = vec![];
        for d in [2, 3] {
            let c = GalerkinComplex::build(&t, "t3", &SpectralOptions { degree: d, ..Default::default() }).unwrap();
            let dims: Vec<_> = (0..=2).map(|k| harmonic_dimension(&c, k, LaplacianKind::Basic).unwrap().kernel_dim.unwrap()).collect();
            assert_eq!(&dims[..2], &[1, 1]);
            h2.push(dims[2]);
            let l = hard_lefschetz_check(&c, 1).unwrap();
            assert!(!l.pass && !l.map.isomorphism);
            assert!(!star_duality_check(&c, 0).unwrap().pass);
        }
        assert!(h2[1] > h2[0]);
    }
}
