//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qlandauer::info::Quantity;
use qlandauer::protocol::{
    find_entropy_zero_crossings, run_erasure, simulated_readout_run, structured, sweep_temperature,
    sweep_theta, write_sweep_table, ExperimentConfig, SweepRow,
};
use qlandauer::{Error, Result};

pub mod summary;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qlandauer",
    version,
    about = "Qubit erasure against a quantized thermal reservoir"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single erasure run and its heat/entropy/information ledger.
    Verify(Common),
    /// Ledger over a logarithmic grid of reservoir occupations.
    SweepTemp(Common),
    /// Ledger over preparation angles in [0, π].
    SweepTheta(Common),
    /// Preparation angles where the entropy decrease changes sign.
    Crossings(Common),
    /// Simulated sideband thermometry before and after erasure.
    Readout(Common),
    /// Erasure, ledger, and thermometry in one document.
    Run(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Structured,
}

#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write results here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Fail on divergent quantities and unconverged fits.
    #[arg(long)]
    strict: bool,
    /// Configuration override, `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    nbar0: Option<String>,
    #[arg(long = "theta-c", allow_hyphen_values = true)]
    theta_c: Option<String>,
    /// Further `key=value` overrides.
    #[arg(value_name = "KEY=VALUE")]
    assignments: Vec<String>,
}

impl Common {
    fn overrides(&self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for a in self.set.iter().chain(&self.assignments) {
            out.push(split_assignment(a)?);
        }
        let flags = [
            ("nbar0", &self.nbar0),
            ("theta_c", &self.theta_c),
            ("seed", &self.seed),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                out.push((key.to_string(), v.clone()));
            }
        }
        if self.strict {
            out.push(("strict".into(), "true".into()));
        }
        Ok(out)
    }
}

fn split_assignment(a: &str) -> Result<(String, String)> {
    match a.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(Error::InvalidInput {
            key: a.to_string(),
            reason: "expected key=value".into(),
        }),
    }
}

/// Defaults, then the file at `path`, then `overrides` in order; the result
/// is validated.
pub fn load_config(
    path: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::default();
    if let Some(path) = path {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        apply_config_text(&mut config, &text)?;
    }
    for (k, v) in overrides {
        config.set(k, v)?;
    }
    config.validate()?;
    Ok(config)
}

/// Applies `key = value` lines; `#` starts a comment.
pub fn apply_config_text(config: &mut ExperimentConfig, text: &str) -> Result<()> {
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body.split_once('=').ok_or_else(|| Error::Parse {
            line,
            reason: format!("expected `key = value`, got {body:?}"),
        })?;
        config.set(k.trim(), v).map_err(|e| Error::Parse {
            line,
            reason: e.to_string(),
        })?;
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the subcommand, and returns the
/// exit code. Results go to `--output` or `out`; diagnostics to `err`.
pub fn run(
    argv: impl IntoIterator<Item = String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match dispatch(&cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_validation() {
                EXIT_INVALID
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}

pub fn parse_and_dispatch(argv: impl IntoIterator<Item = String>) -> i32 {
    run(
        argv,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

fn dispatch(command: &Command, out: &mut dyn Write) -> Result<()> {
    let (Command::Verify(common)
    | Command::SweepTemp(common)
    | Command::SweepTheta(common)
    | Command::Crossings(common)
    | Command::Readout(common)
    | Command::Run(common)) = command;
    let config = load_config(common.config.as_deref(), &common.overrides()?)?;
    let format = common.format;

    let mut buf = Vec::new();
    match command {
        Command::Verify(_) => {
            let run = run_erasure(&config)?;
            let row = SweepRow::from_run(&run, &config);
            check_finite(&config, std::slice::from_ref(&row))?;
            match format {
                Format::Table => write_sweep_table(&config, &[row], &mut buf)?,
                Format::Structured => {
                    buf.extend(structured(&config, "verify", &run.ledger)?.bytes())
                }
            }
        }
        Command::SweepTemp(_) | Command::SweepTheta(_) => {
            let (kind, rows) = match command {
                Command::SweepTemp(_) => (
                    "sweep-temp",
                    sweep_temperature(&config, &config.nbar_grid())?,
                ),
                _ => ("sweep-theta", sweep_theta(&config, &config.theta_grid())?),
            };
            check_finite(&config, &rows)?;
            match format {
                Format::Table => write_sweep_table(&config, &rows, &mut buf)?,
                Format::Structured => buf.extend(structured(&config, kind, &rows)?.bytes()),
            }
        }
        Command::Crossings(_) => {
            let x = find_entropy_zero_crossings(&config)?;
            match format {
                Format::Table => summary::write_crossings(&config, &x, &mut buf)?,
                Format::Structured => buf.extend(structured(&config, "crossings", &x)?.bytes()),
            }
        }
        Command::Readout(_) | Command::Run(_) => {
            let r = simulated_readout_run(&config)?;
            check_finite(&config, std::slice::from_ref(&r.row))?;
            match (command, format) {
                (Command::Readout(_), Format::Table) => {
                    summary::write_readout(&config, &r, &mut buf)?
                }
                (Command::Readout(_), Format::Structured) => {
                    buf.extend(structured(&config, "readout", &r)?.bytes())
                }
                (_, Format::Table) => write_sweep_table(&config, &[r.row], &mut buf)?,
                (_, Format::Structured) => buf.extend(structured(&config, "run", &r)?.bytes()),
            }
        }
    }

    match &common.output {
        Some(path) => {
            fs::write(path, &buf).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        }
        None => out.write_all(&buf).map_err(Error::from),
    }
}

/// In strict mode a divergent ledger entry is a failure, not a flag.
fn check_finite(config: &ExperimentConfig, rows: &[SweepRow]) -> Result<()> {
    if !config.strict {
        return Ok(());
    }
    for r in rows {
        for (name, q) in [
            ("lhs", r.lhs),
            ("relative_entropy", r.relative_entropy),
            ("rhs", r.rhs),
        ] {
            if let Quantity::Divergent = q {
                return Err(Error::DivergentOutput(format!(
                    "{name} at nbar0 = {}, theta_c = {}",
                    r.nbar0, r.theta_c
                )));
            }
        }
    }
    Ok(())
}
