//! Built-in contact fixtures and their documented expectations.
//!
//! Fixtures are written in the same TOML shape the command line accepts for
//! inline fixtures, and every expectation carries a provenance tag.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::contact::{check_contact, ContactData, ContactVerdict};
use crate::error::{Error, Result};
use crate::exterior::FormField;
use crate::manifold::{Interval, Manifold};

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    /// Immediate from definitions.
    Trivial,
    /// Computed by an independent route (hand expansion, oracle).
    Derived,
    /// Stated in the source text.
    Paper,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Flag(bool),
    Number(f64),
    Text(String),
    List(Vec<String>),
    Numbers(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub name: String,
    pub value: Value,
    pub tag: Provenance,
    #[serde(default)]
    pub note: String,
}

/// Serializable fixture description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub coords: Vec<String>,
    /// Per-coordinate ranges; for level sets the ambient sampling box.
    pub bounds: Vec<Interval>,
    /// Level-set constraint `F = target`, absent for coordinate boxes.
    #[serde(default)]
    pub constraint: Option<String>,
    #[serde(default)]
    pub target: Option<f64>,
    /// Contact form as blade → coefficient expression.
    pub beta: BTreeMap<String, String>,
    #[serde(default)]
    pub expect: Vec<Expectation>,
}

impl FixtureSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(text, s.start))
                .unwrap_or((1, 1));
            Error::Parse { line, column, message: e.message().to_string() }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("fixture specs serialize")
    }

    pub fn manifold(&self) -> Result<Manifold> {
        let coords: Vec<&str> = self.coords.iter().map(String::as_str).collect();
        match &self.constraint {
            None => Manifold::chart(&self.id, &coords, self.bounds.clone()),
            Some(f) => Manifold::level_set(&self.id, &coords, self.bounds.clone(), f, self.target.unwrap_or(0.0)),
        }
    }

    pub fn beta_form(&self) -> Result<FormField> {
        let pairs: Vec<(&str, &str)> = self.beta.iter().map(|(b, e)| (b.as_str(), e.as_str())).collect();
        FormField::parse(&pairs, &self.coords)
    }
}

pub(crate) fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Loaded fixture: manifold, contact data and verified expectations.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub spec: FixtureSpec,
    pub ctx: ContactData,
    pub contact: ContactVerdict,
}

impl Fixture {
    pub fn id(&self) -> &str {
        &self.spec.id
    }

    pub fn manifold(&self) -> &Arc<Manifold> {
        &self.ctx.manifold
    }

    pub fn expectation(&self, name: &str) -> Option<&Expectation> {
        self.spec.expect.iter().find(|e| e.name == name)
    }

    pub fn is_closed(&self) -> bool {
        self.ctx.manifold.is_closed()
    }
}

/// Samples used by the load-time re-verification.
pub const LOAD_SAMPLES: usize = 256;

/// Builds a fixture from a spec, re-verifying the contact condition and every
/// checkable expectation.
pub fn build_fixture(spec: FixtureSpec) -> Result<Fixture> {
    let manifold = Arc::new(spec.manifold()?);
    let beta = spec.beta_form()?;
    let contact = check_contact(&manifold, &beta, LOAD_SAMPLES, 0, 1e-9)?;
    if !contact.pass {
        return Err(Error::ContactViolation(format!(
            "fixture '{}' fails the contact condition (min density {:e})",
            spec.id, contact.min_density
        )));
    }
    let ctx = ContactData::new(manifold, beta)?;
    let fx = Fixture { spec, ctx, contact };
    verify_expectations(&fx)?;
    Ok(fx)
}

fn verify_expectations(fx: &Fixture) -> Result<()> {
    let pts = fx.ctx.manifold.sample(LOAD_SAMPLES, 1);
    for e in &fx.spec.expect {
        match (e.name.as_str(), &e.value) {
            ("reeb", Value::List(comps)) => {
                let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
                let expected = crate::exterior::VectorField::parse(&refs, &fx.spec.coords)?;
                let dev = pts
                    .iter()
                    .map(|p| {
                        let a = fx.ctx.reeb_at(p);
                        let b = expected.eval(p);
                        a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
                    })
                    .fold(0.0, f64::max);
                if dev > 1e-9 {
                    return Err(Error::Precondition(format!(
                        "fixture '{}': Reeb field deviates from documented {:?} by {dev:e}",
                        fx.spec.id, comps
                    )));
                }
            }
            ("contact_density", Value::Number(d)) => {
                let ok = (fx.contact.min_density - d).abs() <= 1e-9 && (fx.contact.max_density - d).abs() <= 1e-9;
                if !ok {
                    return Err(Error::Precondition(format!(
                        "fixture '{}': contact density in [{}, {}], documented {d}",
                        fx.spec.id, fx.contact.min_density, fx.contact.max_density
                    )));
                }
            }
            ("boundary", Value::Flag(b))
                if fx.ctx.manifold.has_boundary() != *b => {
                    return Err(Error::Precondition(format!("fixture '{}': boundary flag mismatch", fx.spec.id)));
                }
            _ => {}
        }
    }
    Ok(())
}

const STD_R3: &str = r#"
id = "std-r3"
description = "standard contact form on R^3, evaluated on the window [-2,2]^3"
coords = ["x", "y", "z"]
bounds = [{ lo = -2.0, hi = 2.0 }, { lo = -2.0, hi = 2.0 }, { lo = -2.0, hi = 2.0 }]
beta = { dz = "1", dx = "-y" }

[[expect]]
name = "reeb"
value = ["0", "0", "1"]
tag = "DERIVED"
note = "d/dz satisfies beta(v) = 1 and v _| dbeta = 0"

[[expect]]
name = "contact_density"
value = 1.0
tag = "DERIVED"
note = "beta ^ dbeta = dx^dy^dz"

[[expect]]
name = "boundary"
value = false
tag = "TRIVIAL"
"#;

const CUBE: &str = r#"
id = "cube"
description = "standard contact form on the closed unit cube, boundary = all six faces"
coords = ["x", "y", "z"]
bounds = [
  { lo = 0.0, hi = 1.0, boundary = [true, true] },
  { lo = 0.0, hi = 1.0, boundary = [true, true] },
  { lo = 0.0, hi = 1.0, boundary = [true, true] },
]
beta = { dz = "1", dx = "-y" }

[[expect]]
name = "reeb"
value = ["0", "0", "1"]
tag = "DERIVED"

[[expect]]
name = "contact_density"
value = 1.0
tag = "DERIVED"

[[expect]]
name = "boundary"
value = true
tag = "TRIVIAL"

[[expect]]
name = "lyapunov_unit"
value = "z"
tag = "DERIVED"
note = "dz(v) = 1"

[[expect]]
name = "dbeta_basic_primitive"
value = ["dx", "-y"]
tag = "DERIVED"
note = "alpha = beta - dz = -y dx is basic with d(alpha) = dbeta, so [dbeta] = 0"
"#;

const S3_HOPF: &str = r#"
id = "s3-hopf"
description = "unit sphere in R^4 with the standard contact form; Reeb orbits are Hopf fibres"
coords = ["x1", "y1", "x2", "y2"]
bounds = [{ lo = -1.05, hi = 1.05 }, { lo = -1.05, hi = 1.05 }, { lo = -1.05, hi = 1.05 }, { lo = -1.05, hi = 1.05 }]
constraint = "x1^2 + y1^2 + x2^2 + y2^2"
target = 1.0
beta = { dy1 = "x1", dx1 = "-y1", dy2 = "x2", dx2 = "-y2" }

[[expect]]
name = "reeb"
value = ["-y1", "x1", "-y2", "x2"]
tag = "PAPER"
note = "tangent to the Hopf fibres; components checked by beta(v) = |p|^2 = 1"

[[expect]]
name = "contact_density"
value = 2.0
tag = "DERIVED"
note = "beta ^ dbeta on an oriented orthonormal tangent frame"

[[expect]]
name = "boundary"
value = false
tag = "TRIVIAL"

[[expect]]
name = "dbeta_class_nonzero"
value = true
tag = "PAPER"

[[expect]]
name = "basic_betti"
value = [1.0, 0.0, 1.0]
tag = "DERIVED"
note = "basic cohomology of the Hopf foliation is that of the base 2-sphere"

[[expect]]
name = "lyapunov_exists"
value = false
tag = "DERIVED"
note = "every Reeb orbit is closed"
"#;

const T3_FAMILY: &str = r#"
id = "t3-family({n})"
description = "three-torus with beta = cos({n} z) dx + sin({n} z) dy"
coords = ["x", "y", "z"]
bounds = [
  { lo = 0.0, hi = 6.283185307179586, periodic = true },
  { lo = 0.0, hi = 6.283185307179586, periodic = true },
  { lo = 0.0, hi = 6.283185307179586, periodic = true },
]
beta = { dx = "cos({n}*z)", dy = "sin({n}*z)" }

[[expect]]
name = "reeb"
value = ["cos({n}*z)", "sin({n}*z)", "0"]
tag = "DERIVED"
note = "beta(v) = cos^2 + sin^2 = 1"

[[expect]]
name = "contact_density"
value = {n}.0
tag = "DERIVED"
note = "beta ^ dbeta = -{n} dx^dy^dz"

[[expect]]
name = "boundary"
value = false
tag = "TRIVIAL"

[[expect]]
name = "basic_betti"
value = []
tag = "DERIVED"
note = "exploratory: no expected value is asserted"
"#;

/// Identifiers accepted by [`load_fixture`].
pub const FIXTURE_IDS: [&str; 4] = ["std-r3", "cube", "s3-hopf", "t3-family(1)"];

/// Embedded TOML text for a fixture id.
pub fn fixture_text(id: &str) -> Result<String> {
    match id {
        "std-r3" => Ok(STD_R3.to_string()),
        "cube" => Ok(CUBE.to_string()),
        "s3-hopf" | "s3" => Ok(S3_HOPF.to_string()),
        "t3" => fixture_text("t3-family(1)"),
        _ => {
            let n = id
                .strip_prefix("t3-family(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|s| s.trim().parse::<u32>().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::UnknownFixture(id.to_string()))?;
            Ok(T3_FAMILY.replace("{n}", &n.to_string()))
        }
    }
}

pub fn load_fixture(id: &str) -> Result<Fixture> {
    build_fixture(FixtureSpec::from_toml(&fixture_text(id)?)?)
}

/// `β + t·direction`, with the contact condition re-verified.
pub fn perturb_fixture(f: &Fixture, t: f64, direction: &BTreeMap<String, String>) -> Result<Fixture> {
    let mut spec = f.spec.clone();
    if t == 0.0 {
        return Ok(f.clone());
    }
    let tt = crate::expr::Number::from_f64(t);
    for (b, e) in direction {
        let add = format!("({tt})*({e})");
        let merged = match spec.beta.get(b) {
            Some(cur) => format!("({cur}) + {add}"),
            None => add,
        };
        spec.beta.insert(b.clone(), merged);
    }
    spec.id = format!("{}+{}", f.spec.id, t);
    // Perturbation invalidates the documented Reeb field and density.
    spec.expect.retain(|e| e.name == "boundary");
    build_fixture(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_loads() {
        for id in FIXTURE_IDS.iter().copied().chain(["t3", "t3-family(3)"]) {
            let f = load_fixture(id).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert!(f.contact.min_density >= 0.5, "{id}");
            assert!(f.spec.expect.iter().all(|e| !e.name.is_empty()));
        }
        assert!(matches!(load_fixture("t4"), Err(Error::UnknownFixture(_))));
        assert!(matches!(load_fixture("t3-family(0)"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn spec_round_trips_through_toml() {
        let s = FixtureSpec::from_toml(&fixture_text("s3-hopf").unwrap()).unwrap();
        let again = FixtureSpec::from_toml(&s.to_toml()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn perturbation_of_standard_form() {
        let f = load_fixture("std-r3").unwrap();
        let dir = BTreeMap::from([("dz".to_string(), "1".to_string())]);
        let g = perturb_fixture(&f, 0.25, &dir).unwrap();
        let v = g.ctx.reeb_at(&[0.3f64, 0.1, -0.2]);
        assert!((v[2] - 0.8).abs() < 1e-15 && v[0] == 0.0 && v[1] == 0.0);
        let same = perturb_fixture(&f, 0.0, &dir).unwrap();
        assert_eq!(same.ctx.beta, f.ctx.beta);
        let killer = BTreeMap::from([("dz".to_string(), "-1".to_string())]);
        assert!(matches!(perturb_fixture(&f, 1.0, &killer), Err(Error::ContactViolation(_))));
    }
}
