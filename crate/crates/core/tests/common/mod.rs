//! Shared helpers: a brute-force model of the symplectic algebra and
//! random basic forms on the fixtures.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reebcalc::catalog::{build_fixture, load_fixture, FixtureSpec};
use reebcalc::exterior::{blade, FormField};
use reebcalc::hodge::TransversalHodge;

// ---------------------------------------------------------------------------
// Brute-force model of (ℝ²ⁿ, ω = Σ e²ⁱ∧e²ⁱ⁺¹) with forms indexed by sorted
// index lists.

/// Index lists of the `p`-blades, in the crate's basis order.
pub fn combinations(d: usize, p: usize) -> Vec<Vec<usize>> {
    blade::blades(d, p).into_iter().map(|b| (0..d).filter(|i| b >> i & 1 == 1).collect()).collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Sign of the permutation sorting `seq`, or 0 on a repeated index.
pub fn sort_sign(seq: &[usize]) -> i32 {
    let mut s = 1;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return 0;
            }
            if seq[i] > seq[j] {
                s = -s;
            }
        }
    }
    s
}

pub fn leibniz(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    permutations(rows.len())
        .iter()
        .map(|s| sort_sign(s) as f64 * (0..rows.len()).map(|a| m[(rows[a], cols[s[a]])]).product::<f64>())
        .sum()
}

pub struct Oracle {
    pub d: usize,
    pub pi: DMatrix<f64>,
    pub j: DMatrix<f64>,
}

impl Oracle {
    pub fn new(n: usize) -> Self {
        let d = 2 * n;
        let mut omega = DMatrix::zeros(d, d);
        let mut j = DMatrix::zeros(d, d);
        for i in 0..n {
            omega[(2 * i, 2 * i + 1)] = 1.0;
            omega[(2 * i + 1, 2 * i)] = -1.0;
            j[(2 * i + 1, 2 * i)] = 1.0;
            j[(2 * i, 2 * i + 1)] = -1.0;
        }
        // Q(u) = ω(u, ·) has matrix Ωᵀ; the pairing uses Q⁻¹.
        let pi = omega.transpose().try_inverse().unwrap();
        Oracle { d, pi, j }
    }

    pub fn complement(&self, i: &[usize]) -> Vec<usize> {
        (0..self.d).filter(|x| !i.contains(x)).collect()
    }

    pub fn top_sign(&self, a: &[usize], b: &[usize]) -> f64 {
        sort_sign(&[a, b].concat()) as f64
    }

    pub fn pairing(&self, p: usize) -> DMatrix<f64> {
        let bs = combinations(self.d, p);
        DMatrix::from_fn(bs.len(), bs.len(), |a, b| leibniz(&self.pi, &bs[a], &bs[b]))
    }

    /// `∗ e^J = Σ_I K(e^I, e^J) s(I, Iᶜ) e^{Iᶜ}`; columns are images.
    pub fn star_from(&self, p: usize, k: &DMatrix<f64>) -> DMatrix<f64> {
        let bp = combinations(self.d, p);
        let bq = combinations(self.d, self.d - p);
        let mut m = DMatrix::zeros(bq.len(), bp.len());
        for (jc, _) in bp.iter().enumerate() {
            for (ic, i) in bp.iter().enumerate() {
                let c = self.complement(i);
                let row = bq.iter().position(|q| *q == c).unwrap();
                m[(row, jc)] += k[(ic, jc)] * self.top_sign(i, &c);
            }
        }
        m
    }

    pub fn star_b(&self, p: usize) -> DMatrix<f64> {
        self.star_from(p, &self.pairing(p))
    }

    pub fn star_t(&self, p: usize) -> DMatrix<f64> {
        let n = combinations(self.d, p).len();
        self.star_from(p, &DMatrix::identity(n, n))
    }

    /// `(Jα)(u₁, …) = α(Ju₁, …)`.
    pub fn j_forms(&self, p: usize) -> DMatrix<f64> {
        let bs = combinations(self.d, p);
        DMatrix::from_fn(bs.len(), bs.len(), |i, k| leibniz(&self.j, &bs[k], &bs[i]))
    }

    pub fn star_dbeta(&self, p: usize) -> DMatrix<f64> {
        -(self.j_forms(self.d - p) * self.star_b(p))
    }

    pub fn l(&self, p: usize) -> DMatrix<f64> {
        let bp = combinations(self.d, p);
        let bq = combinations(self.d, p + 2);
        let mut m = DMatrix::zeros(bq.len(), bp.len());
        for (jc, j) in bp.iter().enumerate() {
            for i in 0..self.d / 2 {
                let seq = [vec![2 * i, 2 * i + 1], j.clone()].concat();
                let s = sort_sign(&seq);
                if s == 0 {
                    continue;
                }
                let mut sorted = seq.clone();
                sorted.sort();
                let row = bq.iter().position(|q| *q == sorted).unwrap();
                m[(row, jc)] += s as f64;
            }
        }
        m
    }

    pub fn lambda(&self, p: usize) -> DMatrix<f64> {
        self.star_dbeta(self.d - p + 2) * self.l(self.d - p) * self.star_dbeta(p)
    }
}

pub fn to_dm(m: &reebcalc::linalg::Mat<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows, m.cols, |i, j| m[(i, j)])
}

pub fn scalar_multiple_of_identity(m: &DMatrix<f64>) -> Option<i32> {
    let s = m[(0, 0)];
    let id = DMatrix::<f64>::identity(m.nrows(), m.ncols()) * s;
    ((m - id).amax() < 1e-12 && (s.abs() - 1.0).abs() < 1e-12).then_some(s as i32)
}


pub const STD_R5: &str = r#"
id = "std-r5"
coords = ["x1", "y1", "x2", "y2", "z"]
bounds = [{ lo = -2.0, hi = 2.0 }, { lo = -2.0, hi = 2.0 }, { lo = -2.0, hi = 2.0 }, { lo = -2.0, hi = 2.0 }, { lo = -2.0, hi = 2.0 }]
beta = { dz = "1", dx1 = "-y1", dx2 = "-y2" }
"#;

pub fn hodge_for(id: &str) -> TransversalHodge {
    let f = if id == "std-r5" { build_fixture(FixtureSpec::from_toml(STD_R5).unwrap()).unwrap() } else { load_fixture(id).unwrap() };
    TransversalHodge::euclidean(f.ctx).unwrap()
}

pub fn random_poly(rng: &mut ChaCha8Rng, vars: &[&str], terms: usize) -> String {
    (0..terms)
        .map(|_| {
            let c: i32 = rng.gen_range(-3..=3);
            let mut s = format!("({c})");
            for v in vars {
                let e: u32 = rng.gen_range(0..=2);
                if e > 0 {
                    s.push_str(&format!("*({v})^{e}"));
                }
            }
            s
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Random basic forms of every degree for a fixture. Basic functions are
/// polynomials in flow invariants; higher degrees are built from their
/// differentials and `dβ`.
pub fn basic_corpus(h: &TransversalHodge, id: &str, count: usize, seed: u64) -> Vec<FormField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = h.ctx.coords().to_vec();
    let invariants: Vec<&str> = match id {
        "std-r3" | "cube" => vec!["x", "y"],
        "s3-hopf" => vec!["x1^2 + y1^2", "x1*x2 + y1*y2", "y1*x2 - x1*y2"],
        "std-r5" => vec!["x1", "y1", "x2", "y2"],
        _ => vec!["sin(z)", "cos(z)"],
    };
    let func = |rng: &mut ChaCha8Rng| FormField::parse(&[("1", &random_poly(rng, &invariants, 3))], &c).unwrap();
    let db = h.ctx.dbeta.clone();
    let top = 2 * h.n();
    let mut out = Vec::new();
    for _ in 0..count {
        let k = rng.gen_range(0..=top);
        let mut f = func(&mut rng);
        // Degree k: products of differentials of basic functions with powers of dβ.
        let mut deg = 0;
        while deg < k {
            let step = if k - deg >= 2 && rng.gen_bool(0.5) { 2 } else { 1 };
            let factor = if step == 2 { db.clone() } else { func(&mut rng).d() };
            f = f.wedge(&factor).unwrap();
            deg += step;
        }
        out.push(f);
    }
    out
}

pub const FIXTURES: [&str; 5] = ["std-r3", "cube", "s3-hopf", "t3-family(1)", "std-r5"];
