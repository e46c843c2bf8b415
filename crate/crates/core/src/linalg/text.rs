//! Plain-text matrix format.
//!
//! ```text
//! # optional comment lines
//! 2 3
//! 1 0.5+2j -1e-3-0.25j
//! 0 1 0
//! ```
//!
//! The first non-comment line holds `rows cols`; then `rows * cols`
//! whitespace-separated entries in row-major order. An entry is `re`,
//! `re+imj` or `re-imj` (a trailing `i` is accepted too). Writing uses
//! the shortest round-trip representation of each `f64`, so
//! write-then-read is bit-exact.

use std::io::{BufRead, Write};

use super::{CMatrix, C64};
use crate::error::{Error, Result};

pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 && z.im.is_sign_positive() {
        format!("{:?}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{:?}-{:?}j", z.re, -z.im)
    } else {
        format!("{:?}+{:?}j", z.re, z.im)
    }
}

pub fn parse_complex(tok: &str) -> Option<C64> {
    let body = match tok.strip_suffix(['j', 'i']) {
        None => return tok.parse::<f64>().ok().map(|re| C64::new(re, 0.0)),
        Some(b) => b,
    };
    // Split at the last sign that is neither leading nor an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (body[..i].parse::<f64>().ok()?, parse_imag(&body[i..])?),
        None => (0.0, parse_imag(body)?),
    };
    Some(C64::new(re, im))
}

fn parse_imag(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => s.parse().ok(),
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Reads one matrix. Lines beginning with `#` are returned separately, in order.
pub fn read_matrix(reader: impl BufRead) -> Result<(CMatrix, Vec<String>)> {
    let mut comments = Vec::new();
    let mut shape: Option<(usize, usize, usize)> = None;
    let mut entries = Vec::new();
    let mut last_line = 0;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line?;
        let trimmed = line.trim();
        if let Some(c) = trimmed.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        match shape {
            None => {
                let dims: Vec<&str> = trimmed.split_whitespace().collect();
                let parsed = match dims.as_slice() {
                    [r, c] => r.parse::<usize>().ok().zip(c.parse::<usize>().ok()),
                    _ => None,
                };
                let (r, c) = parsed.ok_or_else(|| {
                    parse_err(lineno, format!("expected \"rows cols\", got {trimmed:?}"))
                })?;
                if r == 0 || c == 0 {
                    return Err(parse_err(lineno, "matrix dimensions must be positive"));
                }
                shape = Some((r, c, lineno));
            }
            Some((r, c, _)) => {
                for tok in trimmed.split_whitespace() {
                    let z = parse_complex(tok)
                        .ok_or_else(|| parse_err(lineno, format!("bad complex entry {tok:?}")))?;
                    if !z.re.is_finite() || !z.im.is_finite() {
                        return Err(parse_err(lineno, format!("non-finite entry {tok:?}")));
                    }
                    entries.push(z);
                    if entries.len() > r * c {
                        return Err(parse_err(
                            lineno,
                            format!("more than {} entries for a {r}x{c} matrix", r * c),
                        ));
                    }
                }
            }
        }
    }
    let (r, c, _) =
        shape.ok_or_else(|| parse_err(last_line.max(1), "missing \"rows cols\" header"))?;
    if entries.len() != r * c {
        return Err(parse_err(
            last_line,
            format!(
                "{r}x{c} matrix needs {} entries, found {}",
                r * c,
                entries.len()
            ),
        ));
    }
    Ok((CMatrix::new(r, c, entries)?, comments))
}

pub fn write_matrix(mut w: impl Write, m: &CMatrix, comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|z| format_complex(*z)).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}
