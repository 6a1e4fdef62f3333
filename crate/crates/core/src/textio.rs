//! Plain-text matrix and vector files.
//!
//! A matrix file starts with `rows cols` on the first line followed by
//! `rows * cols` whitespace-separated entries in row-major order. A vector
//! file starts with `len` followed by `len` entries.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

fn numbers(body: &str) -> Result<Vec<f64>> {
    body.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: '{tok}'")))
        })
        .collect()
}

fn header(text: &str, fields: usize) -> Result<(Vec<usize>, &str)> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let dims: Vec<usize> = first
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad dimension '{tok}'")))
        })
        .collect::<Result<_>>()?;
    if dims.len() != fields {
        return Err(Error::Parse(format!(
            "header needs {fields} dimension(s), found {}",
            dims.len()
        )));
    }
    Ok((dims, rest))
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let (dims, body) = header(text, 2)?;
    let data = numbers(body)?;
    if data.len() != dims[0] * dims[1] {
        return Err(Error::Parse(format!(
            "expected {} entries for a {}x{} matrix, found {}",
            dims[0] * dims[1],
            dims[0],
            dims[1],
            data.len()
        )));
    }
    DenseMatrix::new(dims[0], dims[1], data)
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let (dims, body) = header(text, 1)?;
    let data = numbers(body)?;
    if data.len() != dims[0] {
        return Err(Error::Parse(format!(
            "expected {} entries, found {}",
            dims[0],
            data.len()
        )));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse("non-finite vector entry".into()));
    }
    Ok(data)
}

pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(f64::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn format_vector(v: &[f64]) -> String {
    let mut out = format!("{}\n", v.len());
    for x in v {
        out.push_str(&x.to_string());
        out.push('\n');
    }
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_vector(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    Ok(fs::write(path, format_matrix(m))?)
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    Ok(fs::write(path, format_vector(v))?)
}
