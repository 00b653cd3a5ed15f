//! The plain-text set format shared by tiles, codes and point sets.
//!
//! ```text
//! q p k n count kind
//! modulus a0 a1 ... ak        (only when k > 1)
//! x_0 x_1 ... x_{n-1}         (count rows, ascending key, no duplicates)
//! ```
//!
//! Entries use the integer encoding of field elements. Files without a header (rows of digits,
//! with or without separating spaces) are read when the field order is supplied separately.

use std::fmt::Write as _;
use std::path::Path;

use fqtile::linalg::key_order;
use fqtile::{Elem, FieldSpec, Space, VSet};
use thiserror::Error;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Tile,
    Code,
    Points,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Tile => "tile",
            Kind::Code => "code",
            Kind::Points => "points",
        }
    }

    fn parse(s: &str) -> Option<Kind> {
        match s {
            "tile" => Some(Kind::Tile),
            "code" => Some(Kind::Code),
            "points" => Some(Kind::Points),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

fn fail<T>(line: usize, msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError { line, msg: msg.into() })
}

#[derive(Clone, Debug)]
pub struct TileFile {
    pub kind: Kind,
    pub set: VSet,
    /// Line number of the first row, for error reporting on individual rows.
    pub first_row_line: usize,
}

/// Serializes rows that are already in ascending key order.
pub fn render_rows<'a>(field: &FieldSpec, n: usize, kind: Kind, rows: impl ExactSizeIterator<Item = &'a [Elem]>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {} {} {} {}", field.q(), field.p(), field.k(), n, rows.len(), kind.as_str());
    if let Some(m) = field.modulus() {
        out.push_str("modulus");
        for c in m {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    for r in rows {
        let mut first = true;
        for c in r {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{c}");
        }
        out.push('\n');
    }
    out
}

pub fn render(kind: Kind, set: &VSet) -> String {
    render_rows(set.field(), set.n(), kind, set.rows())
}

fn number(tok: &str, line: usize, what: &str) -> Result<u64, FormatError> {
    match tok.parse::<u64>() {
        Ok(v) if !tok.starts_with('+') => Ok(v),
        _ => fail(line, format!("{what}: expected a nonnegative integer, found {tok:?}")),
    }
}

fn is_header(line: &str) -> bool {
    let toks: Vec<&str> = line.split_whitespace().collect();
    toks.len() == 6 && Kind::parse(toks[5]).is_some()
}

/// Parses a set file. `assume_q` enables the headerless form and must agree with a header
/// when one is present.
pub fn parse(text: &str, assume_q: Option<u64>) -> Result<TileFile, FormatError> {
    let lines: Vec<&str> = text.lines().collect();
    let end = lines.iter().rposition(|l| !l.trim().is_empty()).map_or(0, |i| i + 1);
    let lines = &lines[..end];
    if lines.is_empty() {
        return fail(1, "empty file");
    }
    if !is_header(lines[0]) {
        return match assume_q {
            Some(q) => parse_headerless(lines, q),
            None => fail(1, "missing header `q p k n count kind` (use --assume q=<q> for bare rows)"),
        };
    }

    let toks: Vec<&str> = lines[0].split(' ').collect();
    if toks.len() != 6 {
        return fail(1, "header fields must be separated by single spaces");
    }
    let q = number(toks[0], 1, "q")?;
    let p = number(toks[1], 1, "p")?;
    let k = number(toks[2], 1, "k")?;
    let n = number(toks[3], 1, "n")? as usize;
    let count = number(toks[4], 1, "count")? as usize;
    let kind = Kind::parse(toks[5]).unwrap();
    if let Some(a) = assume_q {
        if a != q {
            return fail(1, format!("header declares q = {q} but q = {a} was assumed"));
        }
    }
    if k == 0 || k > 32 || p.checked_pow(k as u32) != Some(q) {
        return fail(1, format!("q = {q} is not p^k for p = {p}, k = {k}"));
    }
    let mut next = 1;
    let field = if k > 1 {
        let Some(line) = lines.get(1) else {
            return fail(2, "missing modulus line");
        };
        let toks: Vec<&str> = line.split(' ').collect();
        if toks[0] != "modulus" || toks.len() != k as usize + 2 {
            return fail(2, format!("expected `modulus a0 ... a{k}`"));
        }
        let coeffs = toks[1..]
            .iter()
            .map(|t| number(t, 2, "modulus coefficient").map(|c| c as u32))
            .collect::<Result<Vec<_>, _>>()?;
        next = 2;
        FieldSpec::with_modulus(p, &coeffs).or_else(|e| fail(2, e.to_string()))?
    } else {
        FieldSpec::new(p, 1).or_else(|e| fail(1, e.to_string()))?
    };
    if n == 0 {
        return fail(1, "n must be at least 1");
    }
    let mut rows: Vec<Vec<Elem>> = Vec::with_capacity(count);
    for (i, line) in lines.iter().enumerate().skip(next) {
        let lineno = i + 1;
        if line.starts_with("modulus") {
            return fail(lineno, "unexpected modulus line");
        }
        let row = line
            .split(' ')
            .map(|t| {
                if t.is_empty() {
                    return fail(lineno, "entries must be separated by single spaces");
                }
                let v = number(t, lineno, "entry")?;
                if v >= q {
                    return fail(lineno, format!("entry {v} is outside the field of order {q}"));
                }
                Ok(v as Elem)
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != n {
            return fail(lineno, format!("expected {n} entries, found {}", row.len()));
        }
        if let Some(prev) = rows.last() {
            match key_order(prev, &row) {
                std::cmp::Ordering::Less => {}
                std::cmp::Ordering::Equal => return fail(lineno, "duplicate row"),
                std::cmp::Ordering::Greater => return fail(lineno, "rows are not in ascending key order"),
            }
        }
        rows.push(row);
    }
    if rows.len() != count {
        return fail(lines.len(), format!("header declares {count} rows, found {}", rows.len()));
    }
    let set = VSet::from_distinct_rows(Space::new(field, n), rows).or_else(|e| fail(next + 1, e.to_string()))?;
    Ok(TileFile { kind, set, first_row_line: next + 1 })
}

/// Bare rows of digits over `{0, ..., q-1}`, space separated or (for q <= 10) concatenated.
fn parse_headerless(lines: &[&str], q: u64) -> Result<TileFile, FormatError> {
    let field = FieldSpec::from_order(q).or_else(|e| fail(1, e.to_string()))?;
    let mut rows: Vec<(Vec<Elem>, usize)> = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        let row: Vec<Elem> = if line.contains(char::is_whitespace) {
            line.split_whitespace()
                .map(|t| number(t, lineno, "entry"))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .map(|v| v as Elem)
                .collect()
        } else {
            if q > 10 {
                return fail(lineno, "entries must be space separated when q > 10");
            }
            line.chars()
                .map(|c| c.to_digit(10).map_or_else(|| fail(lineno, format!("unexpected character {c:?}")), Ok))
                .collect::<Result<Vec<_>, _>>()?
        };
        if let Some(&bad) = row.iter().find(|&&v| v as u64 >= q) {
            return fail(lineno, format!("entry {bad} is outside the field of order {q}"));
        }
        if let Some((first, _)) = rows.first() {
            if first.len() != row.len() {
                return fail(lineno, format!("expected {} entries, found {}", first.len(), row.len()));
            }
        } else if row.is_empty() {
            return fail(lineno, "empty row");
        }
        rows.push((row, lineno));
    }
    rows.sort_by(|a, b| key_order(&a.0, &b.0).then(a.1.cmp(&b.1)));
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return fail(w[1].1, format!("duplicate row (first seen on line {})", w[0].1));
    }
    let n = rows[0].0.len();
    let set = VSet::from_distinct_rows(Space::new(field, n), rows.into_iter().map(|(r, _)| r))
        .or_else(|e| fail(1, e.to_string()))?;
    Ok(TileFile { kind: Kind::Code, set, first_row_line: 1 })
}

pub fn read(path: &Path, assume_q: Option<u64>) -> Result<TileFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    parse(&text, assume_q).map_err(|source| CliError::Format { path: path.to_owned(), source })
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    #[test]
    fn round_trip() {
        for q in [2u64, 3, 4, 9, 16] {
            let field = f(q);
            let space = Space::new(field.clone(), 3);
            let set = VSet::from_keys(space, (0..(q * q * q)).step_by(3).collect()).unwrap();
            let text = render(Kind::Tile, &set);
            let back = parse(&text, None).unwrap();
            assert_eq!(back.set, set);
            assert_eq!(back.kind, Kind::Tile);
            assert_eq!(render(Kind::Tile, &back.set), text);
        }
    }

    #[test]
    fn header_and_modulus() {
        let set = VSet::from_rows(Space::new(f(4), 2), [[0, 0], [3, 1]]).unwrap();
        assert_eq!(render(Kind::Code, &set), "4 2 2 2 2 code\nmodulus 1 1 1\n0 0\n3 1\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("3 3 1 2 2 tile\n0 0\n0 0\n", 3, "duplicate"),
            ("3 3 1 2 2 tile\n1 0\n0 0\n", 3, "ascending"),
            ("3 3 1 2 2 tile\n0 0\n0 3\n", 3, "outside"),
            ("3 3 1 2 2 tile\n0 0\n0  1\n", 3, "single spaces"),
            ("3 3 1 2 3 tile\n0 0\n0 1\n", 3, "declares 3 rows"),
            ("3 3 1 2 1 tile\n0 0 1\n", 2, "expected 2 entries"),
            ("6 2 1 2 0 tile\n", 1, "not p^k"),
            ("4 2 2 2 0 tile\n0 0\n", 2, "modulus"),
            ("4 2 2 1 0 tile\nmodulus 1 0 1\n", 2, "invalid modulus"),
            ("0 1\n", 1, "missing header"),
        ];
        for (text, line, needle) in cases {
            let err = parse(text, None).unwrap_err();
            assert_eq!(err.line, line, "{text:?}: {err}");
            assert!(err.msg.contains(needle), "{text:?}: {err}");
        }
    }

    #[test]
    fn headerless_rows() {
        let tf = parse("0121\n1000\n0000\n", Some(3)).unwrap();
        assert_eq!(tf.kind, Kind::Code);
        assert_eq!(tf.set.len(), 3);
        assert_eq!(tf.set.row(0), &[0, 0, 0, 0]);
        let spaced = parse("0 1 2 1\n1 0 0 0\n0 0 0 0\n", Some(3)).unwrap();
        assert_eq!(spaced.set, tf.set);
        assert_eq!(parse("012\n013\n", Some(3)).unwrap_err().line, 2);
        assert!(parse("01\n01\n", Some(3)).unwrap_err().msg.contains("duplicate"));
        assert!(parse("3 3 1 1 0 code\n", Some(5)).unwrap_err().msg.contains("assumed"));
    }
}
