use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use udw_cli::acceptance::{self, ClosedForms};
use udw_cli::commands;
use udw_cli::config::RunConfig;
use udw_cli::error::CliError;
use udw_cli::figures::{self, Figure};

/// Leading-order entanglement harvesting between two detectors in the
/// massless vacuum.
#[derive(Parser)]
#[command(name = "udw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key=value config file; `#` starts a comment.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative tolerance; the accuracy target for `compare`.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Blocks, density matrix and negativity for one scenario.
    Compute(Common),
    /// CSV over a one-parameter grid.
    Sweep(Common),
    /// CSV data of the scaled curves: fig1, fig2, fig3, fig4 or all.
    Figures {
        which: String,
        #[command(flatten)]
        common: Common,
    },
    /// Fast paths against the regulated double-time references.
    Compare(Common),
    /// Runs the acceptance suite (A1–A10, or the listed criteria).
    Selftest { criteria: Vec<String> },
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    for assignment in &common.set {
        config.apply(assignment)?;
    }
    if let Some(out) = &common.out {
        config.out = Some(out.clone());
    }
    if let Some(tol) = common.tol {
        config.set("rel_tol", &tol.to_string())?;
    }
    Ok(config)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn figures(which: &str, common: &Common) -> Result<(), CliError> {
    let config = load(common)?;
    let bad = |reason: &str| udw_cli::config::ConfigError::InvalidValue {
        key: "figure".into(),
        value: which.into(),
        reason: reason.into(),
    };
    let selected: Vec<Figure> = if which == "all" {
        Figure::ALL.to_vec()
    } else {
        vec![which.parse().map_err(|e: String| bad(&e))?]
    };
    if selected.len() > 1 {
        let dir = config.out.as_ref().ok_or_else(|| bad("all figures need --out <directory>"))?;
        std::fs::create_dir_all(dir)?;
        for fig in selected {
            std::fs::write(dir.join(format!("{}.csv", fig.name())), figures::csv(fig)?)?;
        }
        return Ok(());
    }
    emit(config.out.as_deref(), &figures::csv(selected[0])?)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compute(common) => {
            let config = load(&common)?;
            emit(config.out.as_deref(), &commands::compute(&config)?)
        }
        Command::Sweep(common) => {
            let config = load(&common)?;
            emit(config.out.as_deref(), &commands::sweep(&config)?)
        }
        Command::Figures { which, common } => figures(&which, &common),
        Command::Compare(common) => {
            let config = load(&common)?;
            let (text, json, report) = commands::compare(&config)?;
            print!("{text}");
            if let Some(path) = &config.out {
                std::fs::write(path, json)?;
            }
            let failed = commands::failed_entries(&report);
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Numerical(failed.join("; ")))
            }
        }
        Command::Selftest { criteria } => {
            let outcomes = acceptance::run(&criteria, &ClosedForms::default(), |o| println!("{o}"))
                .map_err(|e| udw_cli::config::ConfigError::InvalidValue { key: "criterion".into(), value: e, reason: "expected A1..A10".into() })?;
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed == 0 {
                Ok(())
            } else {
                Err(CliError::SelftestFailed(failed))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("udw: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
