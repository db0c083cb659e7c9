//! Trace files: UTF-8 comma-separated text with header
//! `time_us,p_down,shots`. Lines starting with `#` are comments.

use std::io::{Read, Write};

use super::RabiTrace;
use crate::error::{Error, Result};

pub const TRACE_HEADER: [&str; 3] = ["time_us", "p_down", "shots"];

pub fn write_trace<W: Write>(
    trace: &RabiTrace,
    provenance: Option<&str>,
    mut out: W,
) -> Result<()> {
    if let Some(line) = provenance {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER).map_err(csv_err)?;
    for (t, p) in trace.times.iter().zip(&trace.p_down) {
        w.write_record([
            t.to_string(),
            p.to_string(),
            trace.shots_per_point.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<RabiTrace> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != TRACE_HEADER {
        return Err(Error::Parse {
            line: 1,
            reason: format!(
                "expected header {}, got {:?}",
                TRACE_HEADER.join(","),
                header
            ),
        });
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut shots: Option<u32> = None;
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| -> Result<&str> {
            rec.get(i).ok_or_else(|| Error::Parse {
                line,
                reason: format!("missing column {}", TRACE_HEADER[i]),
            })
        };
        let num = |i: usize| -> Result<f64> {
            field(i)?.parse::<f64>().map_err(|e| Error::Parse {
                line,
                reason: format!("{}: {e}", TRACE_HEADER[i]),
            })
        };
        times.push(num(0)?);
        values.push(num(1)?);
        let s: u32 = field(2)?.parse().map_err(|e| Error::Parse {
            line,
            reason: format!("shots: {e}"),
        })?;
        match shots {
            None => shots = Some(s),
            Some(prev) if prev != s => {
                return Err(Error::Parse {
                    line,
                    reason: format!("shots changes from {prev} to {s}"),
                })
            }
            _ => {}
        }
    }
    RabiTrace::new(times, values, shots.unwrap_or(0), None)
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        reason: e.to_string(),
    }
}
