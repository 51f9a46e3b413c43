//! Plain-text complex matrix files.
//!
//! One matrix row per line, entries separated by whitespace. Each entry is a
//! real number, an imaginary number with an `i` suffix, or `re+imi` /
//! `re-imi` (e.g. `0.5`, `-2i`, `1e-3-0.25i`). Blank lines and lines
//! starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::quantum::{CMatrix, C64};

pub fn parse_entry(token: &str) -> Option<C64> {
    let t = token.trim();
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not part of an exponent or the leading sign
        let bytes = body.as_bytes();
        let mut cut = None;
        for idx in (1..bytes.len()).rev() {
            let c = bytes[idx];
            if (c == b'+' || c == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
                cut = Some(idx);
                break;
            }
        }
        return match cut {
            Some(idx) => {
                let re: f64 = body[..idx].parse().ok()?;
                let im_str = &body[idx..];
                let im: f64 = match im_str {
                    "+" => 1.0,
                    "-" => -1.0,
                    s => s.parse().ok()?,
                };
                Some(C64::new(re, im))
            }
            None => {
                let im: f64 = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    s => s.parse().ok()?,
                };
                Some(C64::new(0.0, im))
            }
        };
    }
    t.parse::<f64>().ok().map(|re| C64::new(re, 0.0))
}

pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                parse_entry(tok).ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    message: format!("'{tok}' is not a complex number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected {} entries, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "matrix file is empty".into(),
        });
    }
    let ncols = rows[0].len();
    Ok(CMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn format_matrix(m: &CMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|c| {
                let z = m[(r, c)];
                format!("{:e}{}{:e}i", z.re, if z.im < 0.0 || z.im.is_sign_negative() { "" } else { "+" }, z.im)
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
