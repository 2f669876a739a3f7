//! The matrix file format: a header line `<rows> <cols> vec-col-stack`
//! followed by one line per row of interleaved `re im` decimal floats.
//! Floats are written in Rust's shortest round-trip representation, so a
//! load/save cycle is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::CliError;

pub const CONVENTION_TAG: &str = "vec-col-stack";

pub fn format_matrix(m: &DMatrix<Complex64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {CONVENTION_TAG}", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let mut line = String::new();
        for j in 0..m.ncols() {
            if j > 0 {
                line.push(' ');
            }
            let z = m[(i, j)];
            let _ = write!(line, "{} {}", z.re, z.im);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: &Path, m: &DMatrix<Complex64>) -> Result<(), CliError> {
    std::fs::write(path, format_matrix(m))
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<Complex64>, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config("empty matrix file".into()))?;
    let mut parts = header.split_whitespace();
    let rows: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::Config("bad matrix header".into()))?;
    let cols: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::Config("bad matrix header".into()))?;
    let tag = parts
        .next()
        .ok_or_else(|| CliError::Config("matrix header is missing the convention tag".into()))?;
    if tag != CONVENTION_TAG {
        return Err(CliError::Config(format!(
            "unsupported convention tag {tag}, expected {CONVENTION_TAG}"
        )));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, line) in lines.enumerate() {
        if i >= rows {
            if !line.trim().is_empty() {
                return Err(CliError::Config("trailing data in matrix file".into()));
            }
            continue;
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("bad float on row {i}: {e}")))?;
        if nums.len() != 2 * cols {
            return Err(CliError::Config(format!(
                "row {i} has {} numbers, expected {}",
                nums.len(),
                2 * cols
            )));
        }
        for pair in nums.chunks_exact(2) {
            entries.push(Complex64::new(pair[0], pair[1]));
        }
    }
    if entries.len() != rows * cols {
        return Err(CliError::Config(format!(
            "matrix file has {} entries, expected {}",
            entries.len(),
            rows * cols
        )));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &entries))
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<Complex64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    parse_matrix(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let m = DMatrix::from_fn(3, 4, |i, j| {
            Complex64::new(
                (i as f64 + 0.1) / (j as f64 + 3.7),
                -(j as f64) * 1e-17 + 0.3,
            )
        });
        let text = format_matrix(&m);
        let back = parse_matrix(&text).unwrap();
        for (a, b) in m.iter().zip(back.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        assert_eq!(format_matrix(&back), text);
    }

    #[test]
    fn rejects_bad_headers() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("2 2 row-major\n0 0 0 0\n0 0 0 0\n").is_err());
        assert!(parse_matrix("2\n").is_err());
    }
}
