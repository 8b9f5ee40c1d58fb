use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use reebcalc_cli::config::{parse_components, parse_frame, parse_vector};
use reebcalc_cli::{exit, exit_code, run, CliError, Command, RunConfig};

/// Checks on basic differential forms over contact fixtures.
#[derive(Parser, Debug)]
#[command(name = "reebcalc", version)]
struct Args {
    /// Command to run; may also come from the config file.
    command: Option<Command>,
    /// Fixture id (std-r3, cube, s3-hopf, t3-family(n)).
    fixture_arg: Option<String>,
    #[arg(long)]
    fixture: Option<String>,
    /// TOML run configuration; its values override flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Dictionary degree bound D.
    #[arg(long, short = 'D')]
    degree: Option<usize>,
    #[arg(long)]
    quad_order: Option<usize>,
    /// Smallest accepted singular-value gap ratio.
    #[arg(long)]
    gap_threshold: Option<f64>,
    /// Form degree for spectral commands.
    #[arg(short = 'k')]
    k: Option<usize>,
    /// Output directory (default: $REEBCALC_OUT, then ./reebcalc-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Input form component `blade=expr`, repeatable.
    #[arg(long = "form")]
    form: Vec<String>,
    /// Growth form component `blade=expr`, repeatable.
    #[arg(long = "tau")]
    tau: Vec<String>,
    /// Predicted derivative component `blade=expr`, repeatable (default dβ).
    #[arg(long = "eta")]
    eta: Vec<String>,
    /// Frame vectors, e.g. "1,0,0;0,1,0".
    #[arg(long)]
    frame: Option<String>,
    /// Start point, e.g. "0.3,0.6,0.05".
    #[arg(long)]
    x0: Option<String>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Named chain or path to a chain description.
    #[arg(long)]
    chain: Option<String>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

fn components(items: &[String]) -> Result<Option<std::collections::BTreeMap<String, String>>, CliError> {
    if items.is_empty() {
        Ok(None)
    } else {
        parse_components(items).map(Some)
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn config(args: &Args) -> Result<RunConfig, CliError> {
    let chain = match &args.chain {
        Some(c) if std::path::Path::new(c).is_file() => Some(read(&PathBuf::from(c))?),
        other => other.clone(),
    };
    let flags = RunConfig {
        command: args.command,
        fixture: args.fixture.clone().or_else(|| args.fixture_arg.clone()),
        tol: args.tol,
        samples: args.samples,
        seed: args.seed,
        degree: args.degree,
        quad_order: args.quad_order,
        gap_threshold: args.gap_threshold,
        k: args.k,
        out: args.out.clone(),
        form: components(&args.form)?,
        tau: components(&args.tau)?,
        eta: components(&args.eta)?,
        frame: args.frame.as_deref().map(parse_frame).transpose()?,
        x0: args.x0.as_deref().map(parse_vector).transpose()?,
        horizon: args.horizon,
        chain,
        inline_fixture: None,
    };
    match &args.config {
        Some(path) => Ok(flags.overlay(&RunConfig::from_toml(&read(path)?)?)),
        None => Ok(flags),
    }
}

fn main_inner(args: &Args) -> Result<i32, CliError> {
    let cfg = config(args)?;
    if args.print_config {
        print!("{}", cfg.to_toml());
        return Ok(exit::PASS);
    }
    let outcomes = run(&cfg)?;
    let dir = cfg.out_dir();
    for o in &outcomes {
        let path = o.write(&dir)?;
        let r = &o.report;
        println!("{:<12} {:<20} {:<14} {}", r.status().label(), r.command, r.fixture, path.display());
        for v in &r.verdicts {
            let value = v.value.map(|x| format!(" = {x:e}")).unwrap_or_default();
            let tol = v.tol.map(|t| format!(" (tol {t:e})")).unwrap_or_default();
            println!("    {:<12} {}{value}{tol}", v.status.label(), v.name);
        }
    }
    Ok(exit_code(outcomes.iter().map(|o| &o.report)))
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { exit::PASS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = main_inner(&args).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
