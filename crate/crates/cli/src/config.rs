//! Run configuration: command-line flags merged with an optional TOML file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::ValueEnum;
use reebcalc::catalog::FixtureSpec;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "REEBCALC_OUT";

/// Output directory used when neither flags, config nor environment set one.
pub const DEFAULT_OUT: &str = "reebcalc-out";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckContact,
    Reeb,
    BasicCheck,
    Star,
    Laplacian,
    LefschetzDecompose,
    FlowGrowth,
    Integrate,
    Spectral,
    HardLefschetz,
    ReportAll,
}

impl Command {
    pub const CHECKS: [Command; 10] = [
        Command::CheckContact,
        Command::Reeb,
        Command::BasicCheck,
        Command::Star,
        Command::Laplacian,
        Command::LefschetzDecompose,
        Command::FlowGrowth,
        Command::Integrate,
        Command::Spectral,
        Command::HardLefschetz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::CheckContact => "check-contact",
            Command::Reeb => "reeb",
            Command::BasicCheck => "basic-check",
            Command::Star => "star",
            Command::Laplacian => "laplacian",
            Command::LefschetzDecompose => "lefschetz-decompose",
            Command::FlowGrowth => "flow-growth",
            Command::Integrate => "integrate",
            Command::Spectral => "spectral",
            Command::HardLefschetz => "hard-lefschetz",
            Command::ReportAll => "report-all",
        }
    }
}

/// Everything a run needs. Absent fields fall back to per-command defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Dictionary degree bound for the spectral commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
    /// Smallest accepted ratio across the kernel gap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_threshold: Option<f64>,
    /// Form degree for the spectral commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Input form as blade → coefficient, e.g. `{ "dx^dy" = "z" }`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Named example chain or a chain description in TOML.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline_fixture: Option<FixtureSpec>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
            CliError::Config { line, column, message: e.message().to_string() }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs serialize")
    }

    /// Fields set in `top` replace those of `self`.
    pub fn overlay(mut self, top: &RunConfig) -> Self {
        overlay_fields!(self, top; command, fixture, tol, samples, seed, degree, quad_order, gap_threshold, k, out, form, tau, eta, frame, x0, horizon, chain, inline_fixture);
        self
    }

    /// Output directory: explicit setting, then the environment, then the
    /// built-in default.
    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// `blade=expr` pairs from the command line.
pub fn parse_components(items: &[String]) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for item in items {
        let (b, e) = item
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("expected blade=expression, got '{item}'")))?;
        out.insert(b.trim().to_string(), e.trim().to_string());
    }
    Ok(out)
}

/// Comma-separated numbers.
pub fn parse_vector(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Input(format!("not a number: '{}'", s.trim()))))
        .collect()
}

/// Vectors separated by `;`.
pub fn parse_frame(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    text.split(';').map(parse_vector).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_prefers_the_top_layer() {
        let flags = RunConfig { tol: Some(1e-3), seed: Some(4), ..Default::default() };
        let file = RunConfig { tol: Some(1e-9), ..Default::default() };
        let merged = flags.overlay(&file);
        assert_eq!(merged.tol, Some(1e-9));
        assert_eq!(merged.seed, Some(4));
    }

    #[test]
    fn config_errors_carry_positions() {
        match RunConfig::from_toml("tol = 1e-9\nsamples = \"many\"\n") {
            Err(CliError::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn command_line_shorthands() {
        let c = parse_components(&["dx^dy = z".into(), "dz=1".into()]).unwrap();
        assert_eq!(c["dx^dy"], "z");
        assert_eq!(parse_frame("1,0,0; 0,1,0").unwrap(), vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        assert!(parse_vector("1,a").is_err());
    }
}
