//! Matrix Market exchange format, real matrices only.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::MatrixMarket { line, msg: msg.into() }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    parse_matrix_market(BufReader::new(File::open(path)?))
}

/// Parse a `.mtx` stream into canonical CSR: 1-based indices are shifted,
/// duplicates summed, and symmetric or skew-symmetric storage expanded.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<CsrMatrix> {
    let mut lines = reader.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (lineno, header) = match lines.next() {
        Some((k, l)) => (k, l?),
        None => return Err(err(1, "empty file")),
    };
    let (layout, symmetry) = parse_header(lineno, &header)?;

    let mut body = lines.filter_map(|(k, l)| match l {
        Ok(l) => {
            let t = l.trim();
            (!t.is_empty() && !t.starts_with('%')).then(|| Ok((k, t.to_string())))
        }
        Err(e) => Some(Err(e)),
    });
    let (size_line, size) = body.next().transpose()?.ok_or_else(|| err(lineno + 1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(size_line, format!("bad size field {t:?}"))))
        .collect::<Result<_>>()?;
    let expected_fields = if layout == Layout::Coordinate { 3 } else { 2 };
    if dims.len() != expected_fields {
        return Err(err(size_line, format!("size line needs {expected_fields} integers")));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if symmetry != Symmetry::General && rows != cols {
        return Err(err(size_line, "symmetric storage needs a square matrix"));
    }

    let mut triplets = Vec::new();
    let mut push = |line: usize, i: usize, j: usize, v: f64| -> Result<()> {
        if i == j && symmetry == Symmetry::Skew && v != 0.0 {
            return Err(err(line, "skew-symmetric matrix with a nonzero diagonal entry"));
        }
        if symmetry != Symmetry::General && j > i {
            return Err(err(line, "entry above the diagonal in symmetric storage"));
        }
        triplets.push((i, j, v));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((j, i, v)),
                Symmetry::Skew => triplets.push((j, i, -v)),
            }
        }
        Ok(())
    };

    let mut seen = 0usize;
    match layout {
        Layout::Coordinate => {
            let nnz = dims[2];
            for item in body {
                let (line, text) = item?;
                if seen == nnz {
                    return Err(err(line, format!("more than the {nnz} declared entries")));
                }
                let f: Vec<&str> = text.split_whitespace().collect();
                if f.len() != 3 {
                    return Err(err(line, "expected `row col value`"));
                }
                let i = parse_index(line, f[0], rows, "row")?;
                let j = parse_index(line, f[1], cols, "column")?;
                push(line, i, j, parse_value(line, f[2])?)?;
                seen += 1;
            }
            if seen != nnz {
                return Err(err(0, format!("declared {nnz} entries, found {seen}")));
            }
        }
        Layout::Array => {
            // Column-major; symmetric storage lists the lower triangle
            // (strictly lower for skew).
            let mut slots = Vec::new();
            for j in 0..cols {
                let start = match symmetry {
                    Symmetry::General => 0,
                    Symmetry::Symmetric => j,
                    Symmetry::Skew => j + 1,
                };
                slots.extend((start..rows).map(|i| (i, j)));
            }
            for item in body {
                let (line, text) = item?;
                for tok in text.split_whitespace() {
                    let Some(&(i, j)) = slots.get(seen) else {
                        return Err(err(line, format!("more than the {} expected values", slots.len())));
                    };
                    push(line, i, j, parse_value(line, tok)?)?;
                    seen += 1;
                }
            }
            if seen != slots.len() {
                return Err(err(0, format!("expected {} values, found {seen}", slots.len())));
            }
        }
    }
    CsrMatrix::from_triplets(rows, cols, triplets)
}

fn parse_header(line: usize, header: &str) -> Result<(Layout, Symmetry)> {
    let lower = header.to_ascii_lowercase();
    let f: Vec<&str> = lower.split_whitespace().collect();
    if f.len() != 5 || f[0] != "%%matrixmarket" || f[1] != "matrix" {
        return Err(err(line, "expected `%%MatrixMarket matrix <layout> <field> <symmetry>`"));
    }
    let layout = match f[2] {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(err(line, format!("unknown layout {other:?}"))),
    };
    match f[3] {
        "real" | "double" => {}
        "pattern" => return Err(err(line, "pattern-only matrices carry no values and are not supported")),
        other => return Err(err(line, format!("only real matrices are supported, found {other:?}"))),
    }
    let symmetry = match f[4] {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(err(line, format!("unsupported symmetry {other:?}"))),
    };
    Ok((layout, symmetry))
}

fn parse_index(line: usize, tok: &str, limit: usize, what: &str) -> Result<usize> {
    let k: usize = tok.parse().map_err(|_| err(line, format!("bad {what} index {tok:?}")))?;
    if k == 0 || k > limit {
        return Err(err(line, format!("{what} index {k} outside 1..={limit}")));
    }
    Ok(k - 1)
}

fn parse_value(line: usize, tok: &str) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| err(line, format!("bad value {tok:?}")))?;
    if !v.is_finite() {
        return Err(err(line, format!("non-finite value {tok:?}")));
    }
    Ok(v)
}

/// Write `a` as `coordinate real general` with shortest round-trip values.
pub fn write_matrix_market<W: Write>(mut w: W, a: &CsrMatrix) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for i in 0..a.nrows() {
        let (idx, vals) = a.row(i);
        for (&j, &v) in idx.iter().zip(vals) {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn save_matrix_market(path: impl AsRef<Path>, a: &CsrMatrix) -> Result<()> {
    write_matrix_market(BufWriter::new(File::create(path)?), a)
}
