//! Small tables for the `crossings` and `readout` subcommands. Like the
//! sweep tables they start with a `#` provenance line and a header.

use std::io::Write;

use qlandauer::protocol::{provenance, Crossings, ExperimentConfig, ReadoutRun};
use qlandauer::{Error, Result};

pub const CROSSINGS_HEADER: &str = "theta_low,theta_high";
pub const READOUT_HEADER: &str =
    "stage,exact_mean_phonon,fitted_mean_phonon,n_fit,residual_norm,model_error,converged";

const ABSENT: &str = "none";

fn angle(v: Option<f64>) -> String {
    v.map_or_else(|| ABSENT.into(), |x| x.to_string())
}

pub fn write_crossings(
    config: &ExperimentConfig,
    x: &Crossings,
    out: &mut dyn Write,
) -> Result<()> {
    writeln!(out, "# {}", provenance(config))?;
    writeln!(out, "{CROSSINGS_HEADER}")?;
    writeln!(out, "{},{}", angle(x.theta_low), angle(x.theta_high))?;
    Ok(())
}

/// Rows `pre`, `post`, then `delta` whose mean-phonon columns hold the exact
/// and estimated heat in units of Q₀.
pub fn write_readout(config: &ExperimentConfig, r: &ReadoutRun, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "# {}", provenance(config))?;
    writeln!(out, "{READOUT_HEADER}")?;
    for (stage, side) in [("pre", &r.pre), ("post", &r.post)] {
        writeln!(
            out,
            "{stage},{},{},{},{},{},{}",
            side.exact_mean_phonon,
            side.fit.mean_phonon,
            side.fit.n_fit,
            side.fit.residual_norm,
            side.model_error,
            side.fit.converged
        )?;
    }
    writeln!(out, "delta,{},{},,,,", r.delta_q, r.delta_q_hat)?;
    Ok(())
}

/// Data rows of a table, split into cells, after checking the header.
pub fn read_table(text: &str, header: &str) -> Result<Vec<Vec<String>>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h == header => {}
        Some((i, h)) => {
            return Err(Error::Parse {
                line: i + 1,
                reason: format!("expected header {header:?}, got {h:?}"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 0,
                reason: "missing header".into(),
            })
        }
    }
    let width = header.split(',').count();
    lines
        .map(|(i, l)| {
            let cells: Vec<String> = l.split(',').map(str::to_string).collect();
            if cells.len() == width {
                Ok(cells)
            } else {
                Err(Error::Parse {
                    line: i + 1,
                    reason: format!("{} cells, expected {width}", cells.len()),
                })
            }
        })
        .collect()
}

pub fn read_crossings(text: &str) -> Result<Crossings> {
    let rows = read_table(text, CROSSINGS_HEADER)?;
    let row = rows.first().ok_or_else(|| Error::Parse {
        line: 0,
        reason: "no data row".into(),
    })?;
    let cell = |s: &str| -> Result<Option<f64>> {
        if s == ABSENT {
            return Ok(None);
        }
        s.parse().map(Some).map_err(|e| Error::Parse {
            line: 0,
            reason: format!("{s:?}: {e}"),
        })
    };
    Ok(Crossings {
        theta_low: cell(&row[0])?,
        theta_high: cell(&row[1])?,
    })
}
