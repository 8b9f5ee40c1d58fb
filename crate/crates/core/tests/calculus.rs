use proptest::prelude::*;
use reebcalc::contact::names;
use reebcalc::exterior::{blade, jet, Covector, FormField, SmoothMap, VectorField};
use reebcalc::flow::{Flow, FlowField};
use reebcalc::linalg::Mat;
use reebcalc::manifold::{Interval, Manifold};

const COORDS: [&str; 5] = ["x", "y", "z", "u", "w"];
const FACTORS: [&str; 5] = ["1", "sin(x)", "cos(y + z)", "exp(z)", "(1 + x*y)"];

fn coords(n: usize) -> Vec<String> {
    names(&COORDS[..n])
}

/// Coefficient text: a short sum of monomials times an optional
/// transcendental factor.
fn coefficient(n: usize, max_exp: u32) -> impl Strategy<Value = String> {
    let term = (-3i32..=3, prop::collection::vec(0..=max_exp, n), 0..FACTORS.len());
    prop::collection::vec(term, 1..=3).prop_map(move |terms| {
        terms
            .iter()
            .map(|(c, exps, f)| {
                let mut s = format!("({c})");
                for (i, e) in exps.iter().enumerate() {
                    if *e > 0 {
                        s.push_str(&format!("*{}^{e}", COORDS[i]));
                    }
                }
                // Factors mention x, y, z only.
                if n >= 3 || *f == 0 {
                    s.push_str(&format!("*{}", FACTORS[*f]));
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

fn blade_label(b: u32) -> String {
    if b == 0 {
        return "1".into();
    }
    blade::indices(b).iter().map(|&i| format!("d{}", COORDS[i])).collect::<Vec<_>>().join("^")
}

/// Random `k`-form on `ℝⁿ` with up to three components.
fn form_in(n: usize, k: usize) -> impl Strategy<Value = FormField> {
    let blades = blade::blades(n, k);
    let nb = blades.len();
    prop::collection::vec((0..nb, coefficient(n, 2)), 1..=3).prop_map(move |parts| {
        let labels: Vec<(String, String)> = parts.iter().map(|(i, c)| (blade_label(blades[*i]), c.clone())).collect();
        let refs: Vec<(&str, &str)> = labels.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        // Repeated blades are summed by the parser.
        FormField::parse(&refs, &coords(n)).expect("generated form parses")
    })
}

fn any_form() -> impl Strategy<Value = FormField> {
    (2usize..=5).prop_flat_map(|n| (0..=n).prop_flat_map(move |k| form_in(n, k)))
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn rel_sup(a: &Covector<f64>, b: &Covector<f64>) -> f64 {
    a.sub(b).max_abs() / a.max_abs().max(b.max_abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn d_squared_vanishes_exactly(a in any_form()) {
        prop_assert!(a.d().d().is_zero());
    }

    #[test]
    fn d_is_a_graded_derivation(
        (a, b) in (2usize..=5).prop_flat_map(|n| (0..n).prop_flat_map(move |p| (Just(p), 0..n - p)).prop_flat_map(move |(p, q)| (form_in(n, p), form_in(n, q))))
    ) {
        let p = a.degree();
        let lhs = a.wedge(&b).unwrap().d();
        let second = a.wedge(&b.d()).unwrap();
        let second = if p % 2 == 0 { second } else { second.neg() };
        let rhs = a.d().wedge(&b).unwrap().add(&second).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn pullback_commutes_with_d(
        (a, comps, x) in (1usize..=3, 2usize..=4).prop_flat_map(|(m, n)| (
            (0..m.min(n)).prop_flat_map(move |k| form_in(n, k)),
            prop::collection::vec(coefficient(m, 2), n),
            point(m),
        ))
    ) {
        let m = x.len();
        let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
        let phi = SmoothMap::parse(&refs, &coords(m)).unwrap();
        let lhs = a.d().pullback(&phi).unwrap();
        let rhs = a.pullback(&phi).unwrap().d();
        let r = rel_sup(&lhs.eval_at(&x), &rhs.eval_at(&x));
        prop_assert!(r <= 1e-10, "{r:e}");
    }

    #[test]
    fn jets_match_central_differences((a, x) in any_form().prop_flat_map(|a| { let n = a.dim(); (Just(a), point(n)) })) {
        let (value, partials) = jet(&a, &x);
        prop_assert!(rel_sup(&value, &a.eval_at(&x)) < 1e-14);
        let h = 1e-5;
        for (j, dj) in partials.iter().enumerate() {
            let mut p = x.clone();
            let mut q = x.clone();
            p[j] += h;
            q[j] -= h;
            let fd = a.eval_at(&p).sub(&a.eval_at(&q)).scale(0.5 / h);
            prop_assert!(rel_sup(dj, &fd) < 1e-6, "∂{j}: {:?} vs {:?}", dj.c, fd.c);
        }
    }
}

/// `(φ_t^* α)_p` by transporting the coordinate frame.
fn pulled_back(m: &Manifold, v: &VectorField, a: &FormField, p: &[f64], t: f64) -> Covector<f64> {
    let n = p.len();
    let basis: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let field = if t >= 0.0 { FlowField::symbolic(v) } else { FlowField::reversed(v) };
    let flow = Flow { manifold: m, field, tol: 1e-13, max_steps: 1_000_000 };
    let seg = flow.run(p, &basis, t.abs(), &[]).unwrap();
    let last = seg.frames.last().unwrap();
    let jac = Mat::from_columns(last);
    a.eval_at(seg.end()).pullback(&jac)
}

fn lie_by_flow(m: &Manifold, v: &VectorField, a: &FormField, p: &[f64], h: f64) -> Covector<f64> {
    pulled_back(m, v, a, p, h).sub(&pulled_back(m, v, a, p, -h)).scale(0.5 / h)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    /// Cartan's formula against the derivative of the pulled-back form along
    /// the integrated flow (Richardson-extrapolated central differences).
    #[test]
    fn cartan_formula_matches_flow(
        (a, comps, x) in (2usize..=3).prop_flat_map(|n| (
            (0..=n).prop_flat_map(move |k| form_in(n, k)),
            prop::collection::vec(coefficient(n, 1), n),
            point(n),
        ))
    ) {
        let n = x.len();
        let c = coords(n);
        let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
        let v = VectorField::parse(&refs, &c).unwrap();
        prop_assume!(v.eval(&x).iter().any(|t| t.abs() > 1e-3));
        let labels: Vec<&str> = COORDS[..n].to_vec();
        let m = Manifold::chart("window", &labels, vec![Interval::window(-50.0, 50.0); n]).unwrap();
        let h = 2e-3;
        let coarse = lie_by_flow(&m, &v, &a, &x, h);
        let fine = lie_by_flow(&m, &v, &a, &x, h / 2.0);
        let extrapolated = fine.scale(4.0 / 3.0).sub(&coarse.scale(1.0 / 3.0));
        let cartan = a.lie(&v).unwrap().eval_at(&x);
        let r = rel_sup(&cartan, &extrapolated);
        prop_assert!(r <= 1e-5, "{r:e}: {:?} vs {:?}", cartan.c, extrapolated.c);
    }
}

#[test]
fn worked_examples() {
    let c = coords(3);
    let beta = FormField::parse(&[("dz", "1"), ("dx", "-y")], &c).unwrap();
    assert_eq!(beta.d(), FormField::parse(&[("dx^dy", "1")], &c).unwrap());
    let v = VectorField::parse(&["0", "0", "1"], &c).unwrap();
    assert!(beta.lie(&v).unwrap().is_zero());
    let top = FormField::parse(&[("dx^dy^dz", "x*y")], &c).unwrap();
    assert!(top.d().is_zero() && top.d().degree() == 4);
}
