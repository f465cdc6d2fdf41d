//! Matrix file formats.
//!
//! * Matrix Market dense array: header
//!   `%%MatrixMarket matrix array real general`, optional `%` comments, a
//!   `rows cols` line, then `rows*cols` values in column-major order.
//! * Raw binary: little-endian `u64` rows, `u64` cols, then the
//!   column-major `f64` payload, also little-endian.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::matrix::Matrix;

pub const MM_HEADER: &str = "%%MatrixMarket matrix array real general";

pub fn write_matrix_market<W: Write>(mut w: W, a: &Matrix) -> Result<()> {
    writeln!(w, "{MM_HEADER}")?;
    writeln!(w, "{} {}", a.rows(), a.cols())?;
    for x in a.data() {
        writeln!(w, "{x:e}")?;
    }
    w.flush()?;
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn read_matrix_market<R: BufRead>(r: R) -> Result<Matrix> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let header = header?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if fields.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(parse_err(1, "missing %%MatrixMarket banner"));
    }
    if fields[1..] != ["matrix", "array", "real", "general"] {
        return Err(parse_err(
            1,
            format!("unsupported Matrix Market type `{}`", fields[1..].join(" ")),
        ));
    }

    let mut dims: Option<(usize, usize)> = None;
    let mut data = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        match dims {
            None => {
                let nums: Vec<&str> = trimmed.split_whitespace().collect();
                if nums.len() != 2 {
                    return Err(parse_err(lineno, "expected `rows cols`"));
                }
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|e| parse_err(lineno, format!("bad dimension `{s}`: {e}")))
                };
                let (m, n) = (parse(nums[0])?, parse(nums[1])?);
                data.reserve(m * n);
                dims = Some((m, n));
            }
            Some(_) => {
                for tok in trimmed.split_whitespace() {
                    let v: f64 = tok
                        .parse()
                        .map_err(|e| parse_err(lineno, format!("bad value `{tok}`: {e}")))?;
                    data.push(v);
                }
            }
        }
    }
    let (m, n) = dims.ok_or_else(|| parse_err(0, "missing size line"))?;
    if data.len() != m * n {
        return Err(parse_err(
            0,
            format!("expected {} values, found {}", m * n, data.len()),
        ));
    }
    Matrix::from_col_major(m, n, data)
}

pub fn write_binary<W: Write>(mut w: W, a: &Matrix) -> Result<()> {
    w.write_all(&(a.rows() as u64).to_le_bytes())?;
    w.write_all(&(a.cols() as u64).to_le_bytes())?;
    for x in a.data() {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Matrix> {
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let m = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    let len = m
        .checked_mul(n)
        .ok_or_else(|| Error::InvalidArgument(format!("binary header {m}x{n} overflows")))?;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        r.read_exact(&mut word)?;
        data.push(f64::from_le_bytes(word));
    }
    Matrix::from_col_major(m, n, data)
}

fn is_binary(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "bin")
}

/// Loads a matrix; `.bin` selects the raw binary format, anything else is
/// read as Matrix Market.
pub fn load(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let f = File::open(path)?;
    if is_binary(path) {
        read_binary(BufReader::new(f))
    } else {
        read_matrix_market(BufReader::new(f))
    }
}

pub fn save(path: impl AsRef<Path>, a: &Matrix) -> Result<()> {
    let path = path.as_ref();
    let w = BufWriter::new(File::create(path)?);
    if is_binary(path) {
        write_binary(w, a)
    } else {
        write_matrix_market(w, a)
    }
}
