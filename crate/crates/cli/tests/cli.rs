use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use reebcalc_cli::config::OUT_ENV;
use reebcalc_cli::{exit, exit_code, Report, RunConfig, Status};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("reebcalc-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn reebcalc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reebcalc"))
        .args(args)
        .current_dir(dir)
        .env_remove(OUT_ENV)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn passing_check_exits_zero() {
    let dir = scratch("pass");
    let o = reebcalc(&["check-contact", "std-r3", "--out", "out"], &dir);
    assert_eq!(code(&o), exit::PASS, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.join("out/std-r3.check-contact.json"));
    assert_eq!(r["command"], "check-contact");
    assert!(r["verdicts"].as_array().unwrap().iter().all(|v| v["status"] == "pass"));
    assert!(dir.join("out/std-r3.check-contact.timings.json").is_file());
}

#[test]
fn failing_check_exits_one() {
    let dir = scratch("fail");
    let o = reebcalc(&["basic-check", "cube", "--form", "dz=1", "--out", "out"], &dir);
    assert_eq!(code(&o), exit::FAIL);
    let r = json(&dir.join("out/cube.basic-check.json"));
    assert_eq!(r["verdicts"][0]["name"], "basic");
    assert_eq!(r["verdicts"][0]["status"], "fail");
}

#[test]
fn unresolved_spectrum_exits_two() {
    let dir = scratch("inconclusive");
    let o = reebcalc(&["spectral", "s3-hopf", "-k", "2", "--gap-threshold", "1e30", "--out", "out"], &dir);
    assert_eq!(code(&o), exit::INCONCLUSIVE);
    let r = json(&dir.join("out/s3-hopf.spectral.json"));
    assert!(r["verdicts"].as_array().unwrap().iter().any(|v| v["status"] == "inconclusive"));
}

#[test]
fn inconclusive_outranks_pass_but_not_fail() {
    let mut pass = Report::new("reeb", "std-r3");
    pass.verdict("kernel", Status::Pass, Some(0.0), Some(1e-9), "");
    let mut open = Report::new("spectral", "s3-hopf");
    open.verdict("gap", Status::Inconclusive, None, None, "");
    let mut bad = Report::new("star", "cube");
    bad.verdict("star_b_squared", Status::Fail, Some(1.0), Some(1e-10), "");
    assert_eq!(exit_code([&pass]), exit::PASS);
    assert_eq!(exit_code([&pass, &open]), exit::INCONCLUSIVE);
    assert_eq!(exit_code([&open, &bad]), exit::FAIL);
}

#[test]
fn input_errors_exit_three() {
    let dir = scratch("input");
    let o = reebcalc(&["check-contact", "nowhere"], &dir);
    assert_eq!(code(&o), exit::INPUT);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown fixture"));

    let o = reebcalc(&["basic-check", "cube", "--form", "dz=x*(y", "--out", "out"], &dir);
    assert_eq!(code(&o), exit::INPUT);
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("line 1") && err.contains("column"), "{err}");

    std::fs::write(dir.join("bad.toml"), "tol = 1e-9\nsamples = \"many\"\n").unwrap();
    let o = reebcalc(&["check-contact", "std-r3", "--config", "bad.toml"], &dir);
    assert_eq!(code(&o), exit::INPUT);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = reebcalc(&["no-such-command"], &dir);
    assert_eq!(code(&o), exit::INPUT);
}

#[test]
fn config_file_overrides_flags() {
    let dir = scratch("override");
    std::fs::write(dir.join("run.toml"), "tol = 1e-6\nseed = 9\n").unwrap();
    let o = reebcalc(&["reeb", "cube", "--tol", "1e-3", "--samples", "7", "--config", "run.toml", "--print-config"], &dir);
    assert_eq!(code(&o), exit::PASS);
    let cfg = RunConfig::from_toml(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(cfg.tol, Some(1e-6));
    assert_eq!(cfg.seed, Some(9));
    assert_eq!(cfg.samples, Some(7));
    assert_eq!(cfg.fixture.as_deref(), Some("cube"));
}

#[test]
fn output_directory_from_the_environment() {
    let dir = scratch("env");
    let o = Command::new(env!("CARGO_BIN_EXE_reebcalc"))
        .args(["check-contact", "cube", "--samples", "50"])
        .current_dir(&dir)
        .env(OUT_ENV, dir.join("from-env"))
        .output()
        .unwrap();
    assert_eq!(code(&o), exit::PASS);
    assert!(dir.join("from-env/cube.check-contact.json").is_file());
    assert!(!dir.join("reebcalc-out").exists());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = scratch("determinism");
    for out in ["a", "b"] {
        let o = reebcalc(&["lefschetz-decompose", "s3-hopf", "--seed", "3", "--out", out], &dir);
        assert_eq!(code(&o), exit::PASS);
        let o = reebcalc(&["flow-growth", "cube", "--out", out], &dir);
        assert_eq!(code(&o), exit::PASS);
    }
    for f in ["s3-hopf.lefschetz-decompose.json", "cube.flow-growth.json", "cube.flow-growth.growth.csv"] {
        let a = std::fs::read(dir.join("a").join(f)).unwrap();
        let b = std::fs::read(dir.join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn config_files_drive_whole_runs() {
    let dir = scratch("config-run");
    let text = "command = \"basic-check\"\nfixture = \"cube\"\nout = \"cfg-out\"\n\n[form]\n\"dx\" = \"-y\"\n";
    std::fs::write(dir.join("run.toml"), text).unwrap();
    let o = reebcalc(&["--config", "run.toml"], &dir);
    assert_eq!(code(&o), exit::PASS, "{}", String::from_utf8_lossy(&o.stdout));
    let r = json(&dir.join("cfg-out/cube.basic-check.json"));
    assert_eq!(r["verdicts"][0]["status"], "pass");
}

fn blade() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["dx", "dy", "dz", "dx^dy", "dy^dz"]).prop_map(str::to_string)
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    (
        prop::option::of(prop::sample::select(reebcalc_cli::Command::CHECKS.to_vec())),
        prop::option::of(prop::sample::select(vec!["std-r3", "cube", "s3-hopf", "t3-family(2)"])),
        prop::option::of(1e-14f64..1.0),
        prop::option::of(1usize..5000),
        prop::option::of(any::<u32>()),
        prop::option::of(0usize..6),
        prop::option::of(prop::collection::btree_map(blade(), "[a-z0-9*+ ]{1,8}", 1..4)),
        prop::option::of(prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 1..3)),
    )
        .prop_map(|(command, fixture, tol, samples, seed, degree, form, frame)| RunConfig {
            command,
            fixture: fixture.map(str::to_string),
            tol,
            samples,
            seed: seed.map(u64::from),
            degree,
            form,
            frame,
            ..Default::default()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn configs_survive_a_toml_round_trip(cfg in run_config()) {
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
