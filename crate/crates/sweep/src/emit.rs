//! CSV and JSON output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Format;
use crate::error::{Result, SweepError};
use crate::sweep::SweepRow;

pub const CSV_HEADER: [&str; 7] = [
    "alpha_rad",
    "concurrence",
    "purity",
    "schmidt_rank_effective",
    "truncation_used",
    "converged",
    "notes",
];

/// JSON document: resolved configuration plus rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub meta: Value,
    pub rows: Vec<SweepRow>,
}

/// Twelve significant digits in scientific notation.
fn float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.11e}")
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            float(r.alpha_rad),
            float(r.concurrence),
            float(r.purity),
            r.schmidt_rank_effective.to_string(),
            r.truncation_used.to_string(),
            r.converged.to_string(),
            r.notes.clone(),
        ])?;
    }
    w.flush()
}

pub fn write_json<W: Write>(rows: &[SweepRow], meta: &Value, mut out: W) -> io::Result<()> {
    let doc = Document {
        meta: meta.clone(),
        rows: rows.to_vec(),
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")?;
    out.flush()
}

/// Writes `rows` in `format` to `path`, or to stdout when `path` is `None`.
pub fn emit(rows: &[SweepRow], meta: &Value, format: Format, path: Option<&Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(SweepError::usage(
            "nothing to write: the sweep produced no rows",
        ));
    }
    let write = |out: &mut dyn Write| match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(rows, meta, out),
    };
    match path {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).map_err(|source| SweepError::Io {
                action: "write",
                path: "<stdout>".into(),
                source,
            })
        }
        Some(p) => {
            let io_err = |source| SweepError::Io {
                action: "write",
                path: p.to_path_buf(),
                source,
            };
            let file = File::create(p).map_err(io_err)?;
            let mut buf = BufWriter::new(file);
            write(&mut buf).map_err(io_err)?;
            buf.flush().map_err(io_err)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn rows() -> Vec<SweepRow> {
        vec![
            SweepRow {
                alpha_rad: 1e-4,
                concurrence: 1.6666666666666667e-6,
                purity: 0.9999999999986111,
                schmidt_rank_effective: 2,
                truncation_used: 0,
                converged: true,
                notes: "alpha=0 evaluated at 1e-4;closed-form".into(),
            },
            SweepRow {
                alpha_rad: std::f64::consts::PI,
                concurrence: f64::NAN,
                purity: f64::NAN,
                schmidt_rank_effective: 0,
                truncation_used: 637,
                converged: false,
                notes: "model=overlap;degenerate: a, b".into(),
            },
        ]
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&rows(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(!text.contains('\r'));
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(
            lines[1],
            "1.00000000000e-4,1.66666666667e-6,9.99999999999e-1,2,0,true,alpha=0 evaluated at 1e-4;closed-form"
        );
        assert!(lines[2].starts_with("3.14159265359e0,NaN,NaN,0,637,false,"));
        assert!(lines[2].ends_with("\"model=overlap;degenerate: a, b\""));
    }

    #[test]
    fn json_round_trip() {
        let mut buf = Vec::new();
        let meta = json!({"version": "test"});
        write_json(&rows(), &meta, &mut buf).unwrap();
        let doc: Document = serde_json::from_slice(&buf).unwrap();
        assert_eq!(doc.meta, meta);
        let orig = rows();
        assert_eq!(doc.rows[0], orig[0]);
        assert!(doc.rows[1].concurrence.is_nan() && doc.rows[1].purity.is_nan());
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"concurrence\": null"));
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let e = emit(
            &rows(),
            &json!({}),
            Format::Csv,
            Some(Path::new("/nonexistent/dir/out.csv")),
        )
        .unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }
}
