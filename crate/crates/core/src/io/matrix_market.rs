//! Dense reading and writing of Matrix Market files.
//!
//! Both the `array` and `coordinate` layouts are read, with `real`, `integer` or `complex`
//! values and `general`, `symmetric`, `skew-symmetric` or `hermitian` storage. Symmetric
//! storage is expanded to the full matrix. Values are written with the shortest
//! representation that parses back to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

use crate::linalg::{Field, Matrix, C64};

#[derive(Debug, thiserror::Error)]
pub enum MmError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {message}")]
    SymmetryViolation { line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

impl Symmetry {
    fn name(self) -> &'static str {
        match self {
            Symmetry::General => "general",
            Symmetry::Symmetric => "symmetric",
            Symmetry::SkewSymmetric => "skew-symmetric",
            Symmetry::Hermitian => "hermitian",
        }
    }

    fn mirror(self, z: C64) -> C64 {
        match self {
            Symmetry::General | Symmetry::Symmetric => z,
            Symmetry::SkewSymmetric => -z,
            Symmetry::Hermitian => z.conj(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Header {
    layout: Layout,
    complex: bool,
    symmetry: Symmetry,
}

fn parse_err(line: usize, message: impl Into<String>) -> MmError {
    MmError::Parse { line, message: message.into() }
}

fn parse_header(line: &str) -> Result<Header, MmError> {
    let words: Vec<String> = line.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" {
        return Err(parse_err(1, "expected `%%MatrixMarket matrix <layout> <field> <symmetry>`"));
    }
    if words[1] != "matrix" {
        return Err(parse_err(1, format!("unsupported object `{}`", words[1])));
    }
    let layout = match words[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(parse_err(1, format!("unknown layout `{other}`"))),
    };
    let complex = match words[3].as_str() {
        "real" | "integer" | "double" => false,
        "complex" => true,
        other => return Err(parse_err(1, format!("unsupported field `{other}`"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(1, format!("unknown symmetry `{other}`"))),
    };
    if symmetry == Symmetry::Hermitian && !complex {
        return Err(parse_err(1, "hermitian storage requires the complex field"));
    }
    Ok(Header { layout, complex, symmetry })
}

fn parse_numbers<T: std::str::FromStr>(words: &[&str], line: usize) -> Result<Vec<T>, MmError> {
    words.iter().map(|w| w.parse::<T>().map_err(|_| parse_err(line, format!("cannot parse `{w}`")))).collect()
}

/// Parses Matrix Market text into a dense matrix.
pub fn parse_matrix_market(text: &str) -> Result<Matrix, MmError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, first) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let header = parse_header(first)?;
    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size_text) = body.next().ok_or_else(|| parse_err(2, "missing size line"))?;
    let sizes: Vec<&str> = size_text.split_whitespace().collect();
    let expected = if header.layout == Layout::Array { 2 } else { 3 };
    if sizes.len() != expected {
        return Err(parse_err(size_line, format!("size line needs {expected} integers")));
    }
    let sizes: Vec<usize> = parse_numbers(&sizes, size_line)?;
    let (rows, cols) = (sizes[0], sizes[1]);
    if header.symmetry != Symmetry::General && rows != cols {
        return Err(MmError::SymmetryViolation {
            line: size_line,
            message: format!("{} storage needs a square matrix, got {rows}x{cols}", header.symmetry.name()),
        });
    }
    let width = if header.complex { 2 } else { 1 };
    let mut a = Matrix::zeros(rows, cols).with_field(if header.complex { Field::Complex } else { Field::Real });
    let mut set = |i: usize, j: usize, z: C64, line: usize| -> Result<(), MmError> {
        if header.symmetry != Symmetry::General {
            if i < j {
                return Err(MmError::SymmetryViolation {
                    line,
                    message: format!("entry ({}, {}) above the diagonal in {} storage", i + 1, j + 1, header.symmetry.name()),
                });
            }
            if i == j && header.symmetry == Symmetry::SkewSymmetric && z != C64::new(0.0, 0.0) {
                return Err(MmError::SymmetryViolation { line, message: "nonzero diagonal in skew-symmetric storage".into() });
            }
            if i == j && header.symmetry == Symmetry::Hermitian && z.im != 0.0 {
                return Err(MmError::SymmetryViolation { line, message: "complex diagonal in hermitian storage".into() });
            }
            if i != j {
                a[(j, i)] = header.symmetry.mirror(z);
            }
        }
        a[(i, j)] = z;
        Ok(())
    };
    let value = |w: &[&str], line: usize| -> Result<C64, MmError> {
        let v: Vec<f64> = parse_numbers(w, line)?;
        Ok(C64::new(v[0], if header.complex { v[1] } else { 0.0 }))
    };

    match header.layout {
        Layout::Array => {
            // column-major; symmetric storage lists the lower triangle only
            let mut slots = Vec::new();
            for j in 0..cols {
                let start = match header.symmetry {
                    Symmetry::General => 0,
                    Symmetry::SkewSymmetric => j + 1,
                    _ => j,
                };
                slots.extend((start..rows).map(|i| (i, j)));
            }
            let mut taken = 0;
            for (line, text) in body {
                let words: Vec<&str> = text.split_whitespace().collect();
                if words.len() != width {
                    return Err(parse_err(line, format!("expected {width} value(s) per line")));
                }
                let &(i, j) = slots.get(taken).ok_or_else(|| parse_err(line, "more entries than the size line allows"))?;
                set(i, j, value(&words, line)?, line)?;
                taken += 1;
            }
            if taken != slots.len() {
                return Err(parse_err(text.lines().count(), format!("expected {} entries, found {taken}", slots.len())));
            }
        }
        Layout::Coordinate => {
            let nnz = sizes[2];
            let mut count = 0;
            for (line, text) in body {
                let words: Vec<&str> = text.split_whitespace().collect();
                if words.len() != 2 + width {
                    return Err(parse_err(line, format!("expected row, column and {width} value(s)")));
                }
                let ij: Vec<usize> = parse_numbers(&words[..2], line)?;
                let (i, j) = (ij[0], ij[1]);
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(line, format!("index ({i}, {j}) out of range")));
                }
                count += 1;
                if count > nnz {
                    return Err(parse_err(line, "more entries than the size line allows"));
                }
                set(i - 1, j - 1, value(&words[2..], line)?, line)?;
            }
            if count != nnz {
                return Err(parse_err(text.lines().count(), format!("expected {nnz} entries, found {count}")));
            }
        }
    }
    Ok(a)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<Matrix, MmError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| MmError::Io { path: path.display().to_string(), source })?;
    parse_matrix_market(&text)
}

/// Formats a value so that parsing it yields the same `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:e}")
}

/// Matrix Market text in the given layout with general storage.
pub fn format_matrix_market(a: &Matrix, layout: Layout) -> String {
    let complex = a.field() == Field::Complex;
    let mut out = String::new();
    let field = if complex { "complex" } else { "real" };
    let kind = if layout == Layout::Array { "array" } else { "coordinate" };
    writeln!(out, "%%MatrixMarket matrix {kind} {field} general").unwrap();
    let entry = |out: &mut String, z: C64| {
        if complex {
            write!(out, "{} {}", format_f64(z.re), format_f64(z.im)).unwrap();
        } else {
            write!(out, "{}", format_f64(z.re)).unwrap();
        }
    };
    match layout {
        Layout::Array => {
            writeln!(out, "{} {}", a.rows(), a.cols()).unwrap();
            for j in 0..a.cols() {
                for i in 0..a.rows() {
                    entry(&mut out, a[(i, j)]);
                    out.push('\n');
                }
            }
        }
        Layout::Coordinate => {
            let nz: Vec<(usize, usize)> = (0..a.cols())
                .flat_map(|j| (0..a.rows()).map(move |i| (i, j)))
                .filter(|&(i, j)| a[(i, j)] != C64::new(0.0, 0.0))
                .collect();
            writeln!(out, "{} {} {}", a.rows(), a.cols(), nz.len()).unwrap();
            for (i, j) in nz {
                write!(out, "{} {} ", i + 1, j + 1).unwrap();
                entry(&mut out, a[(i, j)]);
                out.push('\n');
            }
        }
    }
    out
}

pub fn write_matrix_market(a: &Matrix, path: impl AsRef<Path>) -> Result<(), MmError> {
    write_matrix_market_as(a, path, Layout::Array)
}

pub fn write_matrix_market_as(a: &Matrix, path: impl AsRef<Path>, layout: Layout) -> Result<(), MmError> {
    let path = path.as_ref();
    std::fs::write(path, format_matrix_market(a, layout))
        .map_err(|source| MmError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_array() {
        let a = parse_matrix_market("%%MatrixMarket matrix array real general\n% c\n2 2\n1\n0\n0\n1\n").unwrap();
        assert_eq!(a, Matrix::identity(2));
    }

    #[test]
    fn skew_expansion() {
        let a = parse_matrix_market("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 1\n").unwrap();
        assert_eq!(a, Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]));
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\nx\n0\n1\n").unwrap_err();
        assert!(matches!(e, MmError::Parse { line: 4, .. }));
        let e = parse_matrix_market("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1\n").unwrap_err();
        assert!(matches!(e, MmError::SymmetryViolation { line: 3, .. }));
    }
}
