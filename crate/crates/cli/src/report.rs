//! Machine-readable reports and their files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use reebcalc::catalog::{Expectation, Provenance, Value};
use serde::Serialize;

use crate::error::{exit, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    /// Computed but without an expected value to compare against.
    Info,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn of(pass: bool) -> Status {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Info => "INFO",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumberEntry {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProvenanceEntry {
    pub expectation: String,
    pub tag: Provenance,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub fixture: String,
    pub verdicts: Vec<Verdict>,
    pub numbers: Vec<NumberEntry>,
    pub provenance: Vec<ProvenanceEntry>,
    /// Free-form extras such as Reeb components.
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub data: serde_json::Map<String, serde_json::Value>,
}

impl Report {
    pub fn new(command: &str, fixture: &str) -> Self {
        Report {
            command: command.into(),
            fixture: fixture.into(),
            verdicts: Vec::new(),
            numbers: Vec::new(),
            provenance: Vec::new(),
            data: serde_json::Map::new(),
        }
    }

    /// `value ≤ tol` as a verdict.
    pub fn bound(&mut self, name: &str, value: f64, tol: f64) {
        self.verdict(name, Status::of(value <= tol), Some(value), Some(tol), "");
    }

    pub fn verdict(&mut self, name: &str, status: Status, value: Option<f64>, tol: Option<f64>, note: &str) {
        self.verdicts.push(Verdict { name: name.into(), status, value, tol, note: note.into() });
    }

    pub fn number(&mut self, name: &str, value: f64) {
        self.numbers.push(NumberEntry { name: name.into(), value });
    }

    pub fn echo(&mut self, e: &Expectation) {
        self.provenance.push(ProvenanceEntry { expectation: e.name.clone(), tag: e.tag, value: e.value.clone() });
    }

    pub fn data(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(key.into(), serde_json::to_value(value).expect("report data serializes"));
    }

    pub fn status(&self) -> Status {
        self.verdicts.iter().map(|v| v.status).max().unwrap_or(Status::Inconclusive)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Exit code for a set of reports: any failure, then any inconclusive
/// verdict, decide.
pub fn exit_code<'a>(reports: impl IntoIterator<Item = &'a Report>) -> i32 {
    match reports.into_iter().map(Report::status).max() {
        Some(Status::Fail) => exit::FAIL,
        Some(Status::Inconclusive) | None => exit::INCONCLUSIVE,
        _ => exit::PASS,
    }
}

/// A report together with its sidecar files.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    /// Wall-clock seconds per phase; kept out of the report so that the
    /// report itself is reproducible.
    pub timings: Vec<(String, f64)>,
    /// Extra files as (suffix, contents), e.g. `("growth.csv", …)`.
    pub attachments: Vec<(String, String)>,
}

#[derive(Serialize)]
struct Timings<'a> {
    command: &'a str,
    fixture: &'a str,
    phases: Vec<Phase<'a>>,
}

#[derive(Serialize)]
struct Phase<'a> {
    name: &'a str,
    seconds: f64,
}

/// File-name stem: `fixture.command` with unsafe characters replaced.
pub fn stem(fixture: &str, command: &str) -> String {
    let clean: String = fixture.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '-' }).collect();
    format!("{}.{command}", clean.trim_end_matches('-'))
}

impl Outcome {
    /// Writes the report, the timings sidecar and attachments into `dir`;
    /// returns the report path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
        let stem = stem(&self.report.fixture, &self.report.command);
        let path = dir.join(format!("{stem}.json"));
        write_atomic(&path, self.report.to_json().as_bytes())?;
        let t = Timings {
            command: &self.report.command,
            fixture: &self.report.fixture,
            phases: self.timings.iter().map(|(n, s)| Phase { name: n, seconds: *s }).collect(),
        };
        let text = serde_json::to_string_pretty(&t).expect("timings serialize") + "\n";
        write_atomic(&dir.join(format!("{stem}.timings.json")), text.as_bytes())?;
        for (suffix, contents) in &self.attachments {
            write_atomic(&dir.join(format!("{stem}.{suffix}")), contents.as_bytes())?;
        }
        Ok(path)
    }
}

/// Write to a sibling temporary file, then rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let err = |source| CliError::Io { path: path.into(), source };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(err)?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(err)?;
    fs::rename(&tmp, path).map_err(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_status_decides() {
        let mut a = Report::new("reeb", "cube");
        a.bound("x", 1e-12, 1e-9);
        a.verdict("y", Status::Info, None, None, "");
        assert_eq!(exit_code([&a]), exit::PASS);
        let mut b = a.clone();
        b.verdict("z", Status::Inconclusive, None, None, "");
        assert_eq!(exit_code([&a, &b]), exit::INCONCLUSIVE);
        b.bound("w", 1.0, 0.5);
        assert_eq!(exit_code([&a, &b]), exit::FAIL);
    }

    #[test]
    fn stems_are_file_safe() {
        assert_eq!(stem("t3-family(1)", "spectral"), "t3-family-1.spectral");
        assert_eq!(stem("s3-hopf", "reeb"), "s3-hopf.reeb");
    }
}
