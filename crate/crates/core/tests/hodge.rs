mod common;

use common::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reebcalc::contact::tangential_sup;
use reebcalc::exterior::{blade, Covector, FormField, PointwiseForm};
use reebcalc::hodge::{tables, SymplecticAlgebra, TransversalHodge};
use reebcalc::scalar::Scalar;

#[test]
fn brute_force_oracle_reproduces_frozen_tables() {
    for n in 1..=3 {
        let o = Oracle::new(n);
        let a = SymplecticAlgebra::new(n);
        let d = 2 * n;
        for p in 0..=d {
            let q = d - p;
            assert!((o.pairing(p) - to_dm(&a.pairing[p])).amax() < 1e-12, "pairing n={n} p={p}");
            assert!((o.star_b(p) - to_dm(&a.star_b[p])).amax() < 1e-12, "∗_b n={n} p={p}");
            assert!((o.star_t(p) - to_dm(&a.star_t[p])).amax() < 1e-12, "∗_T n={n} p={p}");
            assert!((o.j_forms(p) - to_dm(&a.j[p])).amax() < 1e-12, "J n={n} p={p}");
            if p + 2 <= d {
                assert!((o.l(p) - to_dm(&a.l[p])).amax() < 1e-12, "L n={n} p={p}");
            }
            if p >= 2 {
                assert!((o.lambda(p) - to_dm(&a.lambda[p])).amax() < 1e-12, "Λ n={n} p={p}");
            }
            let sb = o.star_b(q) * o.star_b(p);
            assert_eq!(scalar_multiple_of_identity(&sb), Some(tables::STAR_B_SQUARED[n - 1][p]));
            let sd = o.star_dbeta(q) * o.star_dbeta(p);
            assert_eq!(scalar_multiple_of_identity(&sd), Some(tables::STAR_DBETA_SQUARED[n - 1][p]));
            let s = tables::STAR_DBETA_OVER_METRIC_STAR[n - 1][p] as f64;
            assert!((o.star_dbeta(p) - o.star_t(p) * s).amax() < 1e-12);
            let dim = combinations(d, p).len();
            let up = if p + 2 <= d { o.lambda(p + 2) * o.l(p) } else { DMatrix::zeros(dim, dim) };
            let down = if p >= 2 { o.l(p - 2) * o.lambda(p) } else { DMatrix::zeros(dim, dim) };
            let c = tables::LAMBDA_L_COMMUTATOR[n - 1][p] as f64;
            assert!((up - down - DMatrix::<f64>::identity(dim, dim) * c).amax() < 1e-12, "[Λ,L] n={n} p={p}");
        }
    }
}

#[test]
fn oracle_basics_for_n1() {
    let o = Oracle::new(1);
    assert_eq!(o.pairing(1)[(0, 1)], 1.0);
    assert_eq!(o.star_b(0)[(0, 0)], 1.0);
    assert_eq!(o.star_dbeta(0)[(0, 0)], -1.0);
}

// ---------------------------------------------------------------------------
// Pointwise invariants on the fixtures.

#[test]
fn compatible_structure_at_a_thousand_points() {
    for id in FIXTURES {
        let h = hodge_for(id);
        let r = h.check_compatibility(1000, 7, 1e-10).unwrap();
        assert!(r.pass, "{id}: {r:?}");
    }
}

/// Constant covector as a pointwise form.
struct Constant(Covector<f64>);

impl PointwiseForm for Constant {
    fn dim(&self) -> usize {
        self.0.n
    }
    fn degree(&self) -> usize {
        self.0.k
    }
    fn at<T: Scalar>(&self, _: &[T]) -> Covector<T> {
        self.0.map(T::of)
    }
}

/// `κ ∧ ∗_b ρ = K(κ, ρ)·(dβ)ⁿ/n!` on a symplectic frame, with `K` computed
/// from the actual `dβ` Gram matrix on that frame.
#[test]
fn star_b_solves_its_defining_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for id in FIXTURES {
        let h = hodge_for(id);
        let n = h.n();
        let d = 2 * n;
        let m = h.ambient_dim();
        let fact: f64 = (1..=n).map(|i| i as f64).product();
        let vol = h.ctx.dbeta.power(n).unwrap();
        for p in h.ctx.manifold.sample(50, 2) {
            let frame = h.cached_frame(&p).unwrap();
            let s = h.ctx.symplectic_frame(&p).unwrap();
            let w = h.ctx.dbeta.eval_at(&p);
            let omega = DMatrix::from_fn(d, d, |i, j| w.eval(&[s[i].clone(), s[j].clone()]));
            let pi = omega.transpose().try_inverse().unwrap();
            let volume = vol.eval_at(&p).eval(&s) / fact;
            for k in 0..=d {
                let random = |rng: &mut ChaCha8Rng| {
                    let c: Vec<f64> = (0..blade::binomial(d, k)).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    frame.reconstruct(&Covector { n: d, k, c })
                };
                let kappa = random(&mut rng);
                let rho = random(&mut rng);
                let star = h.star_b(Constant(rho.clone())).at(&p);
                let lhs = kappa.wedge(&star).eval(&s);
                // Components on the symplectic frame, then the Leibniz pairing.
                let bs = combinations(d, k);
                let comps = |c: &Covector<f64>| -> Vec<f64> {
                    bs.iter().map(|b| c.eval(&b.iter().map(|&i| s[i].clone()).collect::<Vec<_>>())).collect()
                };
                let (ka, ro) = (comps(&kappa), comps(&rho));
                let mut kval = 0.0;
                for (a, ia) in bs.iter().enumerate() {
                    for (b, ib) in bs.iter().enumerate() {
                        kval += ka[a] * ro[b] * leibniz(&pi, ia, ib);
                    }
                }
                let r = (lhs - kval * volume).abs();
                assert!(r <= 1e-10 * (1.0 + kval.abs()), "{id} k={k}: {lhs} vs {}", kval * volume);
                assert!((h.pairing_k(&kappa, &rho, &p, 1e-9).unwrap() - kval).abs() < 1e-10);
                assert_eq!(star.n, m);
            }
        }
    }
}

fn sup_tangential<F: PointwiseForm, G: PointwiseForm>(h: &TransversalHodge, a: &F, b: &G, pts: &[Vec<f64>]) -> f64 {
    pts.iter().map(|p| tangential_sup(&h.ctx.manifold, p, &a.at(p).sub(&b.at(p)))).fold(0.0, f64::max)
}

fn sup_norm<F: PointwiseForm>(h: &TransversalHodge, a: &F, pts: &[Vec<f64>]) -> f64 {
    pts.iter().map(|p| tangential_sup(&h.ctx.manifold, p, &a.at(p))).fold(0.0, f64::max)
}

#[test]
fn star_squares_follow_the_table() {
    for id in FIXTURES {
        let h = hodge_for(id);
        let n = h.n();
        let pts = h.ctx.manifold.sample(40, 3);
        for alpha in basic_corpus(&h, id, 12, 5) {
            let k = alpha.degree();
            let s = tables::STAR_B_SQUARED[n - 1][k] as f64;
            let twice = h.star_b(h.star_b(&alpha));
            let scale = sup_norm(&h, &alpha, &pts).max(1.0);
            let expected = reebcalc::exterior::Scaled(s, &alpha);
            assert!(sup_tangential(&h, &twice, &expected, &pts) <= 1e-10 * scale, "{id} k={k}");
            let sd = tables::STAR_DBETA_SQUARED[n - 1][k] as f64;
            let twice = h.star_dbeta(h.star_dbeta(&alpha));
            let expected = reebcalc::exterior::Scaled(sd, &alpha);
            assert!(sup_tangential(&h, &twice, &expected, &pts) <= 1e-10 * scale, "{id} k={k}");
        }
    }
}

#[test]
fn codifferentials_square_to_zero() {
    for id in FIXTURES {
        let h = hodge_for(id);
        let pts = h.ctx.manifold.sample(20, 9);
        for alpha in basic_corpus(&h, id, 10, 6) {
            if alpha.degree() < 2 {
                continue;
            }
            let scale = sup_norm(&h, &alpha, &pts).max(1.0);
            let b = h.basic_codifferential(h.basic_codifferential(&alpha));
            let r = sup_norm(&h, &b, &pts);
            assert!(r <= 1e-7 * scale, "{id} δ_b² k={}: {r:e}", alpha.degree());
            let s = h.symplectic_codifferential(h.symplectic_codifferential(&alpha));
            let r = sup_norm(&h, &s, &pts);
            assert!(r <= 1e-7 * scale, "{id} δ_dβ² k={}: {r:e}", alpha.degree());
        }
    }
}

#[test]
fn lefschetz_round_trip_on_random_basic_forms() {
    for id in FIXTURES {
        let h = hodge_for(id);
        let pts = h.ctx.manifold.sample(100, 4);
        for alpha in basic_corpus(&h, id, 8, 8) {
            let dec = h.lefschetz_decompose(&alpha, &pts, 1e-9).unwrap();
            assert!(dec.reconstruction_residual <= 1e-9 && dec.primitivity_residual <= 1e-9, "{id}: {dec:?}");
        }
    }
}

#[test]
fn synthetic_n2_decomposition() {
    let h = hodge_for("std-r5");
    let c = h.ctx.coords().to_vec();
    // dβ ∧ dβ = L²(1); dx1∧dx2 is primitive; dβ itself splits as L(1).
    let db = h.ctx.dbeta.clone();
    let pts = h.ctx.manifold.sample(100, 1);
    let d = h.lefschetz_decompose(&db, &pts, 1e-9).unwrap();
    assert!(d.component(0, 0).max_abs() < 1e-12);
    assert!((d.component(0, 1).c[0] - 1.0).abs() < 1e-12);
    let prim = FormField::parse(&[("dx1^dx2", "1")], &c).unwrap();
    let d = h.lefschetz_decompose(&prim, &pts, 1e-9).unwrap();
    assert!(d.component(0, 1).max_abs() < 1e-12);
    assert!(h.is_primitive(&prim, &pts, 1e-12).unwrap().primitive);
    assert!(!h.is_primitive(&db, &pts, 1e-12).unwrap().primitive);
    let top = db.power(2).unwrap();
    let d = h.lefschetz_decompose(&top, &pts, 1e-9).unwrap();
    assert!((d.component(0, 2).c[0] - 1.0).abs() < 1e-12, "{:?}", d.component(0, 2));
}
