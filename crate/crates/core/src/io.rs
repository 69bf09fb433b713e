//! The `conicqp v1` text format.
//!
//! ```text
//! conicqp v1
//! n <n>
//! m <m>
//! P <nnz>
//! <row> <col> <value>        (nnz lines, 0-based)
//! q
//! <value>                    (n lines)
//! H <nnz>
//! <row> <col> <value>        (nnz lines)
//! g
//! <value>                    (m lines)
//! lower
//! <value>                    (n lines, `-inf` allowed)
//! upper
//! <value>                    (n lines, `inf` allowed)
//! cone <blocks>
//! zero <d> | nonneg <d> | soc <d>
//! ```
//!
//! Sections appear in exactly this order. Blank lines and lines starting
//! with `#` are ignored; anything else out of place is an error. Values are
//! written with C's `%.17g`, so a write–read–write cycle is byte-identical.

use std::fmt::Write as _;

use crate::error::ParseError;
use crate::model::{BoxProduct, ConeBlock, ConeSpec, ConicQp};
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

pub const HEADER: &str = "conicqp v1";

/// Formats like C's `printf("%.17g", v)`, with `inf`, `-inf` and `nan` for
/// non-finite values.
pub fn format_g17(v: f64) -> String {
    const PREC: i32 = 17;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (PREC - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PREC).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PREC - 1 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Serializes a problem. Non-`f64` scalars are widened first.
pub fn write_problem<T: Scalar>(qp: &ConicQp<T>) -> String {
    let mut out = String::new();
    let g = |v: T| format_g17(v.as_f64());
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "n {}", qp.n());
    let _ = writeln!(out, "m {}", qp.m());
    let _ = writeln!(out, "P {}", qp.p().nnz());
    for (r, c, v) in qp.p().triplets() {
        let _ = writeln!(out, "{r} {c} {}", g(v));
    }
    let _ = writeln!(out, "q");
    qp.q().iter().for_each(|&v| {
        let _ = writeln!(out, "{}", g(v));
    });
    let _ = writeln!(out, "H {}", qp.h().nnz());
    for (r, c, v) in qp.h().triplets() {
        let _ = writeln!(out, "{r} {c} {}", g(v));
    }
    for (name, vals) in [
        ("g", qp.g()),
        ("lower", qp.set().lower()),
        ("upper", qp.set().upper()),
    ] {
        let _ = writeln!(out, "{name}");
        vals.iter().for_each(|&v| {
            let _ = writeln!(out, "{}", g(v));
        });
    }
    let _ = writeln!(out, "cone {}", qp.cone().blocks().len());
    for b in qp.cone().blocks() {
        let (name, d) = match *b {
            ConeBlock::Zero(d) => ("zero", d),
            ConeBlock::Nonneg(d) => ("nonneg", d),
            ConeBlock::SecondOrder(d) => ("soc", d),
        };
        let _ = writeln!(out, "{name} {d}");
    }
    out
}

/// One value per line at `%.17g`.
pub fn write_values<T: Scalar>(values: &[T]) -> String {
    let mut out = String::with_capacity(values.len() * 24);
    for &v in values {
        out.push_str(&format_g17(v.as_f64()));
        out.push('\n');
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next meaningful line with its 1-based number.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Some((i + 1, line));
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.next().ok_or_else(|| {
            ParseError::new(
                self.last + 1,
                format!("unexpected end of input, expected {what}"),
            )
        })
    }

    /// A line of the form `<keyword>` or `<keyword> <count>`.
    fn section(
        &mut self,
        keyword: &str,
        counted: bool,
    ) -> Result<(usize, Option<usize>), ParseError> {
        let (ln, line) = self.expect(&format!("section '{keyword}'"))?;
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap_or_default();
        if head != keyword {
            return Err(ParseError::new(
                ln,
                format!("expected section '{keyword}', found '{head}'"),
            ));
        }
        let count = if counted {
            let tok = parts
                .next()
                .ok_or_else(|| ParseError::new(ln, format!("section '{keyword}' needs a count")))?;
            Some(parse_count(tok, ln)?)
        } else {
            None
        };
        if let Some(extra) = parts.next() {
            return Err(ParseError::new(ln, format!("unexpected token '{extra}'")));
        }
        Ok((ln, count))
    }
}

fn parse_count(tok: &str, ln: usize) -> Result<usize, ParseError> {
    tok.parse()
        .map_err(|_| ParseError::new(ln, format!("invalid count '{tok}'")))
}

fn parse_value(tok: &str, ln: usize) -> Result<f64, ParseError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| ParseError::new(ln, format!("invalid number '{tok}'")))?;
    if v.is_nan() {
        return Err(ParseError::new(ln, "nan is not allowed"));
    }
    Ok(v)
}

fn read_values(lines: &mut Lines<'_>, count: usize, what: &str) -> Result<Vec<f64>, ParseError> {
    (0..count)
        .map(|_| {
            let (ln, line) = lines.expect(&format!("a value of '{what}'"))?;
            let mut parts = line.split_whitespace();
            let v = parse_value(parts.next().unwrap_or_default(), ln)?;
            match parts.next() {
                Some(extra) => Err(ParseError::new(ln, format!("unexpected token '{extra}'"))),
                None => Ok(v),
            }
        })
        .collect()
}

fn read_matrix(
    lines: &mut Lines<'_>,
    name: &str,
    rows: usize,
    cols: usize,
) -> Result<SparseMatrix<f64>, ParseError> {
    let (sec_ln, nnz) = lines.section(name, true)?;
    let mut trip = Vec::with_capacity(nnz.unwrap_or(0));
    for _ in 0..nnz.unwrap_or(0) {
        let (ln, line) = lines.expect(&format!("a triplet of '{name}'"))?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(ParseError::new(
                ln,
                format!("expected 'row col value', found '{line}'"),
            ));
        }
        trip.push((
            parse_count(parts[0], ln)?,
            parse_count(parts[1], ln)?,
            parse_value(parts[2], ln)?,
        ));
    }
    SparseMatrix::from_triplets(rows, cols, trip)
        .map_err(|e| ParseError::new(sec_ln, format!("matrix {name}: {e}")))
}

fn read_dim(lines: &mut Lines<'_>, name: &str) -> Result<usize, ParseError> {
    Ok(lines.section(name, true)?.1.unwrap_or(0))
}

/// Parses a `conicqp v1` document.
pub fn parse_problem(text: &str) -> Result<ConicQp<f64>, ParseError> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.expect("header")?;
    if header.split_whitespace().collect::<Vec<_>>() != HEADER.split(' ').collect::<Vec<_>>() {
        return Err(ParseError::new(
            ln,
            format!("expected header '{HEADER}', found '{header}'"),
        ));
    }
    let n = read_dim(&mut lines, "n")?;
    let m = read_dim(&mut lines, "m")?;
    let p = read_matrix(&mut lines, "P", n, n)?;
    lines.section("q", false)?;
    let q = read_values(&mut lines, n, "q")?;
    let h = read_matrix(&mut lines, "H", m, n)?;
    lines.section("g", false)?;
    let g = read_values(&mut lines, m, "g")?;
    lines.section("lower", false)?;
    let lower = read_values(&mut lines, n, "lower")?;
    lines.section("upper", false)?;
    let upper = read_values(&mut lines, n, "upper")?;
    let (_, blocks) = lines.section("cone", true)?;
    let mut cone = Vec::with_capacity(blocks.unwrap_or(0));
    for _ in 0..blocks.unwrap_or(0) {
        let (ln, line) = lines.expect("a cone block")?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(ParseError::new(
                ln,
                format!("expected '<kind> <dim>', found '{line}'"),
            ));
        }
        let d = parse_count(parts[1], ln)?;
        cone.push(match parts[0] {
            "zero" => ConeBlock::Zero(d),
            "nonneg" => ConeBlock::Nonneg(d),
            "soc" => ConeBlock::SecondOrder(d),
            other => return Err(ParseError::new(ln, format!("unknown cone kind '{other}'"))),
        });
    }
    if let Some((ln, line)) = lines.next() {
        return Err(ParseError::new(
            ln,
            format!("unexpected content '{line}' after cone section"),
        ));
    }
    let set = BoxProduct::new(lower, upper).expect("both bound vectors have length n");
    Ok(ConicQp::new(p, q, h, g, ConeSpec::new(cone), set))
}
