//! Sweep-row CSV persistence. Floats are written with 17 significant digits
//! so that parse → write reproduces the file byte for byte.

use std::io::{Read, Write};
use std::path::Path;

use crate::capability::SweepRow;
use crate::error::{Error, Result};

pub const COLUMNS: [&str; 14] = [
    "experiment_id",
    "criterion",
    "d_a",
    "d_b",
    "k",
    "n_samples",
    "n_detected",
    "p_hat",
    "ci_low",
    "ci_high",
    "master_seed",
    "bound_value",
    "wall_time_s",
    "error",
];

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn record(row: &SweepRow) -> [String; 14] {
    [
        row.experiment_id.clone(),
        row.criterion.clone(),
        row.d_a.to_string(),
        row.d_b.to_string(),
        row.k.to_string(),
        row.n_samples.to_string(),
        row.n_detected.map(|n| n.to_string()).unwrap_or_default(),
        opt_float(row.p_hat),
        opt_float(row.ci_low),
        opt_float(row.ci_high),
        row.master_seed.to_string(),
        opt_float(row.bound_value),
        opt_float(row.wall_time_s),
        row.error.clone().unwrap_or_default(),
    ]
}

pub fn write_rows<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn rows_to_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| Error::invalid(e.to_string()))
}

pub fn write_file(path: &Path, rows: &[SweepRow]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_rows(std::fs::File::create(path)?, rows)
}

fn parse_field<T: std::str::FromStr>(line: usize, column: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("column {column}: cannot parse '{raw}'"),
    })
}

fn parse_opt<T: std::str::FromStr>(line: usize, column: &str, raw: &str) -> Result<Option<T>> {
    if raw.is_empty() {
        Ok(None)
    } else {
        parse_field(line, column, raw).map(Some)
    }
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("header must be '{}'", COLUMNS.join(",")),
        });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let f = |i: usize| rec.get(i).unwrap_or("");
        rows.push(SweepRow {
            experiment_id: f(0).to_string(),
            criterion: f(1).to_string(),
            d_a: parse_field(line, COLUMNS[2], f(2))?,
            d_b: parse_field(line, COLUMNS[3], f(3))?,
            k: parse_field(line, COLUMNS[4], f(4))?,
            n_samples: parse_field(line, COLUMNS[5], f(5))?,
            n_detected: parse_opt(line, COLUMNS[6], f(6))?,
            p_hat: parse_opt(line, COLUMNS[7], f(7))?,
            ci_low: parse_opt(line, COLUMNS[8], f(8))?,
            ci_high: parse_opt(line, COLUMNS[9], f(9))?,
            master_seed: parse_field(line, COLUMNS[10], f(10))?,
            bound_value: parse_opt(line, COLUMNS[11], f(11))?,
            wall_time_s: parse_opt(line, COLUMNS[12], f(12))?,
            error: Some(f(13).to_string()).filter(|s| !s.is_empty()),
        });
    }
    Ok(rows)
}

pub fn read_file(path: &Path) -> Result<Vec<SweepRow>> {
    read_rows(std::fs::File::open(path)?)
}
