//! Dense matrix interchange: CSV and a binary column-major dump.
//!
//! The binary layout is a 16-byte header — magic `PWMX`, `u32` rows, `u32`
//! cols, `u32` scalar kind (0 = f64, 1 = complex128) — followed by the
//! payload in column-major order, little-endian f64 (complex values
//! interleaved re, im). CSV cells are plain reals or `a+bi` / `a-bi`.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

const MAGIC: &[u8; 4] = b"PWMX";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarKind {
    Real = 0,
    Complex = 1,
}

pub fn write_binary(w: &mut impl Write, m: &CMatrix, kind: ScalarKind) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(m.nrows() as u32).to_le_bytes())?;
    w.write_all(&(m.ncols() as u32).to_le_bytes())?;
    w.write_all(&(kind as u32).to_le_bytes())?;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let z = m[(r, c)];
            match kind {
                ScalarKind::Real => w.write_all(&z.re.to_le_bytes())?,
                ScalarKind::Complex => {
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
        }
    }
    Ok(())
}

pub fn read_binary(r: &mut impl Read) -> Result<CMatrix> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[0..4] != MAGIC {
        return Err(Error::Parse("bad magic in matrix dump".into()));
    }
    let rows = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let kind = u32::from_le_bytes(header[12..16].try_into().unwrap());
    let per_scalar = match kind {
        0 => 1,
        1 => 2,
        k => return Err(Error::Parse(format!("unknown scalar kind {k}"))),
    };
    let mut payload = vec![0u8; rows * cols * per_scalar * 8];
    r.read_exact(&mut payload)?;
    let mut m = CMatrix::zeros(rows, cols);
    let mut off = 0;
    for c in 0..cols {
        for rr in 0..rows {
            let re = f64::from_le_bytes(payload[off..off + 8].try_into().unwrap());
            off += 8;
            let im = if per_scalar == 2 {
                let v = f64::from_le_bytes(payload[off..off + 8].try_into().unwrap());
                off += 8;
                v
            } else {
                0.0
            };
            m[(rr, c)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

pub fn write_csv(w: &mut impl Write, m: &CMatrix) -> Result<()> {
    let complex = m.iter().any(|z| z.im != 0.0);
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|c| {
                let z = m[(r, c)];
                if complex {
                    format_complex(z)
                } else {
                    format!("{}", z.re)
                }
            })
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

fn format_complex(z: Complex64) -> String {
    if z.im >= 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}-{}i", z.re, -z.im)
    }
}

pub fn read_csv(input: &str) -> Result<CMatrix> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<Complex64> = line
            .split(',')
            .map(|cell| parse_cell(cell.trim(), lineno + 1))
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if cells.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} cells, found {}",
                    lineno + 1,
                    first.len(),
                    cells.len()
                )));
            }
        }
        rows.push(cells);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix".into()));
    }
    let (nr, nc) = (rows.len(), rows[0].len());
    Ok(CMatrix::from_fn(nr, nc, |r, c| rows[r][c]))
}

fn parse_cell(cell: &str, lineno: usize) -> Result<Complex64> {
    if let Ok(re) = cell.parse::<f64>() {
        return Ok(Complex64::new(re, 0.0));
    }
    // a+bi / a-bi: split at the sign that starts the imaginary part.
    if let Some(body) = cell.strip_suffix('i') {
        for (idx, ch) in body.char_indices().skip(1) {
            if (ch == '+' || ch == '-') && !matches!(&body[idx - 1..idx], "e" | "E") {
                let re: f64 = body[..idx]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {lineno}: bad cell `{cell}`")))?;
                let im_str = &body[idx..];
                let im: f64 = if im_str == "+" || im_str == "-" {
                    format!("{im_str}1").parse().unwrap()
                } else {
                    im_str
                        .parse()
                        .map_err(|_| Error::Parse(format!("line {lineno}: bad cell `{cell}`")))?
                };
                return Ok(Complex64::new(re, im));
            }
        }
    }
    Err(Error::Parse(format!("line {lineno}: bad cell `{cell}`")))
}
