//! Tabular and structured output with a provenance line.

use std::io::{Read, Write};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::run::SweepRow;
use crate::error::{Error, Result};
use crate::info::Quantity;

pub const TOOL: &str = "qlandauer";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SWEEP_HEADER: [&str; 14] = [
    "nbar0",
    "temperature",
    "temperature_uk",
    "theta_c",
    "delta_q",
    "lhs",
    "rhs",
    "delta_s",
    "mutual_info",
    "relative_entropy",
    "residual",
    "p_down_final",
    "exact_mean_phonon",
    "fitted_mean_phonon",
];

const DIVERGENT: &str = "divergent";

/// `qlandauer <version> config_hash=<sha256> seed=<seed>`
pub fn provenance(config: &ExperimentConfig) -> String {
    format!(
        "{TOOL} {VERSION} config_hash={} seed={}",
        config.hash(),
        config.seed
    )
}

fn quantity(q: Quantity<f64>) -> String {
    match q {
        Quantity::Finite(v) => v.to_string(),
        Quantity::Divergent => DIVERGENT.into(),
    }
}

pub fn write_sweep_table<W: Write>(
    config: &ExperimentConfig,
    rows: &[SweepRow],
    mut out: W,
) -> Result<()> {
    writeln!(out, "# {}", provenance(config))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.nbar0.to_string(),
            r.temperature.to_string(),
            r.temperature_uk.to_string(),
            r.theta_c.to_string(),
            r.delta_q.to_string(),
            quantity(r.lhs),
            quantity(r.rhs),
            r.delta_s.to_string(),
            r.mutual_info.to_string(),
            quantity(r.relative_entropy),
            r.residual
                .map_or_else(|| DIVERGENT.into(), |v| v.to_string()),
            r.p_down_final.to_string(),
            r.exact_mean_phonon.to_string(),
            r.fitted_mean_phonon
                .map_or_else(String::new, |v| v.to_string()),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_table<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != SWEEP_HEADER {
        return Err(Error::Parse {
            line: 1,
            reason: format!("unexpected header {:?}", header),
        });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let cell = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            cell(i).parse().map_err(|e| Error::Parse {
                line,
                reason: format!("{}: {e}", SWEEP_HEADER[i]),
            })
        };
        let opt = |i: usize, empty: &str| -> Result<Option<f64>> {
            if cell(i) == empty {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        let q = |i: usize| -> Result<Quantity<f64>> {
            Ok(opt(i, DIVERGENT)?.map_or(Quantity::Divergent, Quantity::Finite))
        };
        rows.push(SweepRow {
            nbar0: num(0)?,
            temperature: num(1)?,
            temperature_uk: num(2)?,
            theta_c: num(3)?,
            delta_q: num(4)?,
            lhs: q(5)?,
            rhs: q(6)?,
            delta_s: num(7)?,
            mutual_info: num(8)?,
            relative_entropy: q(9)?,
            residual: opt(10, DIVERGENT)?,
            p_down_final: num(11)?,
            exact_mean_phonon: num(12)?,
            fitted_mean_phonon: opt(13, "")?,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct Document<'a, B: Serialize> {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    seed: u64,
    kind: &'a str,
    config: serde_json::Map<String, serde_json::Value>,
    result: &'a B,
}

/// Self-describing JSON document for one run, newline terminated.
pub fn structured<B: Serialize>(
    config: &ExperimentConfig,
    kind: &str,
    result: &B,
) -> Result<String> {
    let doc = Document {
        tool: TOOL,
        version: VERSION,
        config_hash: config.hash(),
        seed: config.seed,
        kind,
        config: config
            .to_key_values()
            .into_iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v)))
            .collect(),
        result,
    };
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        reason: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::run::sweep_temperature;

    #[test]
    fn sweep_table_round_trip() {
        let c = ExperimentConfig::default();
        let mut rows = sweep_temperature(&c, &[0.05, 0.5]).unwrap();
        rows[1].fitted_mean_phonon = Some(1.25);
        rows[0].relative_entropy = Quantity::Divergent;
        rows[0].rhs = Quantity::Divergent;
        rows[0].residual = None;
        let mut buf = Vec::new();
        write_sweep_table(&c, &rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&format!("# qlandauer {VERSION} config_hash=")));
        assert!(text.ends_with('\n'));
        assert_eq!(read_sweep_table(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn bad_tables() {
        assert!(read_sweep_table("a,b\n1,2\n".as_bytes()).is_err());
        let mut text = SWEEP_HEADER.join(",");
        text.push_str("\n0.1,x,0,0,0,0,0,0,0,0,0,0,0,\n");
        assert!(matches!(
            read_sweep_table(text.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn structured_document() {
        let c = ExperimentConfig::default();
        let s = structured(&c, "verify", &vec![1.0, 2.0]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["tool"], "qlandauer");
        assert_eq!(v["config_hash"], c.hash());
        assert_eq!(v["config"]["nbar0"], "0.074");
        assert_eq!(v["result"][1], 2.0);
    }
}
