//! CSV artifacts for matrices and spectra.
//!
//! A matrix row is one line of `re,im` pairs, so a row of `n` entries has `2n` fields.
//! Floats use the shortest decimal that round-trips; exact entries are `p/q`.

use std::fmt::Write as _;

use crate::assembly::Entries;
use crate::error::{Error, Result};
use crate::numeric::{parse_rational, CMatrix, ExactComplex, ExactMatrix, C64};

fn float_field(x: f64) -> String {
    // Debug is the shortest round-trip form and keeps exponents compact
    format!("{x:?}")
}

pub fn float_matrix_csv(m: &CMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .flat_map(|j| [float_field(m[(i, j)].re), float_field(m[(i, j)].im)])
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn exact_matrix_csv(m: &ExactMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .flat_map(|j| {
                let v = m.get(i, j);
                [v.re.to_string(), v.im.to_string()]
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn entries_csv(e: &Entries) -> String {
    match e {
        Entries::Float(m) => float_matrix_csv(m),
        Entries::Exact(m) => exact_matrix_csv(m),
    }
}

/// Fields of each non-empty line, checked for a common even width.
fn split_rows(text: &str) -> Result<Vec<(usize, Vec<&str>)>> {
    let mut rows = Vec::new();
    let mut width = None;
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if !fields.len().is_multiple_of(2) {
            return Err(Error::Parse(format!(
                "line {}: odd number of fields ({})",
                ln + 1,
                fields.len()
            )));
        }
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(Error::Parse(format!(
                    "line {}: {} fields, expected {w}",
                    ln + 1,
                    fields.len()
                )))
            }
            _ => {}
        }
        rows.push((ln + 1, fields));
    }
    Ok(rows)
}

pub fn parse_float_matrix_csv(text: &str) -> Result<CMatrix> {
    let rows = split_rows(text)?;
    let cols = rows.first().map_or(0, |r| r.1.len() / 2);
    let mut m = CMatrix::zeros(rows.len(), cols);
    for (i, (ln, fields)) in rows.iter().enumerate() {
        let mut parsed = Vec::with_capacity(fields.len());
        for (col, f) in fields.iter().enumerate() {
            parsed.push(f.parse::<f64>().map_err(|_| {
                Error::Parse(format!(
                    "line {ln}, column {}: not a number: {f:?}",
                    col + 1
                ))
            })?);
        }
        for j in 0..cols {
            m[(i, j)] = C64::new(parsed[2 * j], parsed[2 * j + 1]);
        }
    }
    Ok(m)
}

pub fn parse_exact_matrix_csv(text: &str) -> Result<ExactMatrix> {
    let rows = split_rows(text)?;
    let mut out = Vec::with_capacity(rows.len());
    for (ln, fields) in &rows {
        let mut row = Vec::with_capacity(fields.len() / 2);
        for j in 0..fields.len() / 2 {
            let field = |c: usize| {
                parse_rational(fields[c]).map_err(|_| {
                    Error::Parse(format!(
                        "line {ln}, column {}: not a rational: {:?}",
                        c + 1,
                        fields[c]
                    ))
                })
            };
            row.push(ExactComplex::new(field(2 * j)?, field(2 * j + 1)?));
        }
        out.push(row);
    }
    if out.is_empty() {
        return Ok(ExactMatrix::zeros(0, 0));
    }
    Ok(ExactMatrix::from_rows(out))
}

/// One value per line under a header naming the column.
pub fn vector_csv(header: &str, values: &[f64]) -> String {
    let mut out = format!("{header}\n");
    for v in values {
        let _ = writeln!(out, "{}", float_field(*v));
    }
    out
}

pub fn parse_vector_csv(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(ln, l)| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {}: not a number: {l:?}", ln + 1)))
        })
        .collect()
}
