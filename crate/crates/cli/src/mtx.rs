//! Matrix Market reader and writer for dense complex matrices.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use mptk::matcore::{ComplexMatrix, C64, HERMITIAN_TOLERANCE};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MtxError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("declared hermitian but ||A - A^H||_F = {asymmetry:e} exceeds {tolerance:e}")]
    SymmetryViolation { asymmetry: f64, tolerance: f64 },
}

fn parse_err(line: usize, message: impl Into<String>) -> MtxError {
    MtxError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

impl Symmetry {
    /// Value stored at `(j, i)` for an entry `v` given at `(i, j)`.
    fn mirror(self, v: C64) -> C64 {
        match self {
            Symmetry::General => v,
            Symmetry::Symmetric => v,
            Symmetry::SkewSymmetric => -v,
            Symmetry::Hermitian => v.conj(),
        }
    }
}

struct Header {
    layout: Layout,
    field: Field,
    symmetry: Symmetry,
}

fn parse_header(line: &str) -> Result<Header, MtxError> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let layout = match words[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(parse_err(1, format!("unknown format '{other}'"))),
    };
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        other => return Err(parse_err(1, format!("unknown field '{other}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(1, format!("unknown symmetry '{other}'"))),
    };
    if field == Field::Pattern && layout == Layout::Array {
        return Err(parse_err(1, "pattern matrices must use the coordinate format"));
    }
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(parse_err(1, "hermitian symmetry requires the complex field"));
    }
    Ok(Header {
        layout,
        field,
        symmetry,
    })
}

fn parse_number(token: &str, line: usize, field: Field) -> Result<f64, MtxError> {
    let value = if field == Field::Integer {
        token.parse::<i64>().map(|v| v as f64).ok()
    } else {
        token.parse::<f64>().ok()
    };
    value.ok_or_else(|| parse_err(line, format!("invalid number '{token}'")))
}

fn parse_value(tokens: &[&str], line: usize, field: Field) -> Result<C64, MtxError> {
    let expected = match field {
        Field::Pattern => 0,
        Field::Complex => 2,
        Field::Real | Field::Integer => 1,
    };
    if tokens.len() != expected {
        return Err(parse_err(
            line,
            format!("expected {expected} value(s), found {}", tokens.len()),
        ));
    }
    Ok(match field {
        Field::Pattern => C64::new(1.0, 0.0),
        Field::Complex => C64::new(
            parse_number(tokens[0], line, field)?,
            parse_number(tokens[1], line, field)?,
        ),
        Field::Real | Field::Integer => C64::new(parse_number(tokens[0], line, field)?, 0.0),
    })
}

fn parse_index(token: &str, line: usize, bound: usize, what: &str) -> Result<usize, MtxError> {
    match token.parse::<usize>() {
        Ok(i) if (1..=bound).contains(&i) => Ok(i - 1),
        _ => Err(parse_err(line, format!("{what} index '{token}' outside 1..={bound}"))),
    }
}

/// Parses Matrix Market text into a dense matrix. Symmetric, skew-symmetric
/// and hermitian files have their stored triangle expanded.
pub fn parse_matrix_str(text: &str) -> Result<ComplexMatrix, MtxError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = match lines.next() {
        Some((_, l)) => parse_header(l)?,
        None => return Err(parse_err(1, "empty file")),
    };
    let mut content = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_line, size) = content
        .next()
        .ok_or_else(|| parse_err(1, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let parse_dim = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| parse_err(size_line, format!("invalid size '{t}'")))
    };
    let expected_dims = match header.layout {
        Layout::Array => 2,
        Layout::Coordinate => 3,
    };
    if dims.len() != expected_dims {
        return Err(parse_err(
            size_line,
            format!("expected {expected_dims} size fields, found {}", dims.len()),
        ));
    }
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;
    if header.symmetry != Symmetry::General && rows != cols {
        return Err(parse_err(size_line, "symmetric storage requires a square matrix"));
    }

    let mut m = ComplexMatrix::zeros(rows, cols);
    let mut last_line = size_line;
    match header.layout {
        Layout::Array => {
            let positions: Vec<(usize, usize)> = match header.symmetry {
                Symmetry::General => (0..cols).flat_map(|j| (0..rows).map(move |i| (i, j))).collect(),
                Symmetry::SkewSymmetric => {
                    (0..cols).flat_map(|j| (j + 1..rows).map(move |i| (i, j))).collect()
                }
                _ => (0..cols).flat_map(|j| (j..rows).map(move |i| (i, j))).collect(),
            };
            for &(i, j) in &positions {
                let (line, text) = content
                    .next()
                    .ok_or_else(|| parse_err(last_line, "fewer values than the size line declares"))?;
                last_line = line;
                let tokens: Vec<&str> = text.split_whitespace().collect();
                let v = parse_value(&tokens, line, header.field)?;
                m[(i, j)] = v;
                if i != j && header.symmetry != Symmetry::General {
                    m[(j, i)] = header.symmetry.mirror(v);
                }
            }
        }
        Layout::Coordinate => {
            let nnz = parse_dim(dims[2])?;
            // duplicates are summed; the first write assigns so -0.0 survives
            let mut seen = vec![false; rows * cols];
            let mut put = |m: &mut ComplexMatrix, i: usize, j: usize, v: C64| {
                if std::mem::replace(&mut seen[i * cols + j], true) {
                    m[(i, j)] += v;
                } else {
                    m[(i, j)] = v;
                }
            };
            for _ in 0..nnz {
                let (line, text) = content
                    .next()
                    .ok_or_else(|| parse_err(last_line, "fewer entries than the size line declares"))?;
                last_line = line;
                let tokens: Vec<&str> = text.split_whitespace().collect();
                if tokens.len() < 2 {
                    return Err(parse_err(line, "expected 'row col value'"));
                }
                let i = parse_index(tokens[0], line, rows, "row")?;
                let j = parse_index(tokens[1], line, cols, "column")?;
                let v = parse_value(&tokens[2..], line, header.field)?;
                if header.symmetry == Symmetry::SkewSymmetric && i == j {
                    return Err(parse_err(line, "skew-symmetric files cannot store the diagonal"));
                }
                put(&mut m, i, j, v);
                if i != j && header.symmetry != Symmetry::General {
                    put(&mut m, j, i, header.symmetry.mirror(v));
                }
            }
        }
    }
    if let Some((line, _)) = content.next() {
        return Err(parse_err(line, "more data than the size line declares"));
    }

    if header.symmetry == Symmetry::Hermitian {
        let asymmetry = m.hermitian_defect();
        let tolerance = HERMITIAN_TOLERANCE * m.frobenius_norm();
        if asymmetry > tolerance {
            return Err(MtxError::SymmetryViolation {
                asymmetry,
                tolerance,
            });
        }
    }
    Ok(m)
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, MtxError> {
    let text = fs::read_to_string(path).map_err(|source| MtxError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix_str(&text)
}

/// Serializes with general symmetry. Values use the shortest decimal form
/// that parses back to the same bits; the real field is used only when
/// every imaginary part is `+0.0`.
pub fn write_matrix_string(m: &ComplexMatrix, layout: Layout) -> String {
    let real = m.as_slice().iter().all(|z| z.im.to_bits() == 0);
    let field = if real { "real" } else { "complex" };
    let format = match layout {
        Layout::Array => "array",
        Layout::Coordinate => "coordinate",
    };
    let mut out = format!("%%MatrixMarket matrix {format} {field} general\n");
    let value = |out: &mut String, z: C64| {
        if real {
            let _ = writeln!(out, "{:e}", z.re);
        } else {
            let _ = writeln!(out, "{:e} {:e}", z.re, z.im);
        }
    };
    match layout {
        Layout::Array => {
            let _ = writeln!(out, "{} {}", m.rows(), m.cols());
            for j in 0..m.cols() {
                for i in 0..m.rows() {
                    value(&mut out, m[(i, j)]);
                }
            }
        }
        Layout::Coordinate => {
            let stored = |z: &C64| z.re.to_bits() != 0 || z.im.to_bits() != 0;
            let nnz = m.as_slice().iter().filter(|z| stored(z)).count();
            let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), nnz);
            for j in 0..m.cols() {
                for i in 0..m.rows() {
                    if stored(&m[(i, j)]) {
                        let _ = write!(out, "{} {} ", i + 1, j + 1);
                        value(&mut out, m[(i, j)]);
                    }
                }
            }
        }
    }
    out
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix, layout: Layout) -> std::io::Result<()> {
    fs::write(path, write_matrix_string(m, layout))
}
