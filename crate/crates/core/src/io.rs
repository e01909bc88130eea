//! Text formats: distance matrices, point clouds and rational literals.
//!
//! A distance matrix file is an integer `m` followed by `m` rows of `m`
//! entries, each an integer, a fraction `p/q` or `inf`. Blank lines and
//! `#` comments are skipped; a `# labels: a b c` line names the points.
//!
//! ```text
//! # labels: a b
//! 2
//! 0 1/2
//! 1/2 0
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::metric::{validate_space, ExtRational, FiniteMetricSpace, Flag, DEFAULT_REQUIRED};

/// Parse an integer, a fraction `p/q` or a terminating decimal such as `0.25`.
pub fn parse_rational(token: &str) -> std::result::Result<BigRational, String> {
    if let Some((whole, frac)) = token.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        let ok = |s: &str| s.chars().all(|c| c.is_ascii_digit());
        if !ok(digits) || !ok(frac) || (digits.is_empty() && frac.is_empty()) {
            return Err(format!("invalid number `{token}`"));
        }
        let n = BigInt::from_str(&format!("0{digits}{frac}")).map_err(|e| e.to_string())?;
        let v = BigRational::new(n, BigInt::from(10).pow(frac.len() as u32));
        return Ok(if negative { -v } else { v });
    }
    if let Some((_, q)) = token.split_once('/') {
        if q.trim_start_matches('+').chars().all(|c| c == '0') {
            return Err(format!("zero denominator in `{token}`"));
        }
    }
    BigRational::from_str(token).map_err(|_| format!("invalid number `{token}`"))
}

fn parse_entry(token: &str) -> std::result::Result<ExtRational, String> {
    if token.eq_ignore_ascii_case("inf") {
        Ok(ExtRational::Infinite)
    } else {
        parse_rational(token).map(ExtRational::Finite)
    }
}

/// Non-comment lines with their 1-based line numbers, plus labels if present.
fn content_lines(text: &str) -> Result<(Vec<(usize, &str)>, Option<(usize, Vec<String>)>)> {
    let mut lines = Vec::new();
    let mut labels = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(rest) = comment.trim_start().strip_prefix("labels:") {
                if labels.is_some() {
                    return Err(Error::ParseError { line: i + 1, col: 1, reason: "duplicate labels line".into() });
                }
                labels = Some((i + 1, rest.split_whitespace().map(str::to_string).collect()));
            }
        } else if !line.is_empty() {
            lines.push((i + 1, raw));
        }
    }
    Ok((lines, labels))
}

/// Whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace().map(move |t| (t.as_ptr() as usize - line.as_ptr() as usize + 1, t))
}

fn parse_count(lines: &[(usize, &str)], what: &str) -> Result<usize> {
    let &(ln, line) = lines.first().ok_or(Error::ParseError { line: 1, col: 1, reason: format!("missing {what}") })?;
    let toks: Vec<_> = tokens(line).collect();
    if toks.len() != 1 {
        let col = toks.get(1).map_or(1, |t| t.0);
        return Err(Error::ParseError { line: ln, col, reason: format!("expected a single {what}") });
    }
    toks[0].1.parse().map_err(|_| Error::ParseError {
        line: ln,
        col: toks[0].0,
        reason: format!("invalid {what} `{}`", toks[0].1),
    })
}

/// Parse and validate with the default required properties.
pub fn parse_distance_matrix(text: &str) -> Result<FiniteMetricSpace> {
    parse_distance_matrix_with(text, &DEFAULT_REQUIRED)
}

pub fn parse_distance_matrix_with(text: &str, require: &[Flag]) -> Result<FiniteMetricSpace> {
    let (lines, labels) = content_lines(text)?;
    let m = parse_count(&lines, "point count")?;
    let mut matrix = Vec::with_capacity(m);
    for row in 0..m {
        let &(ln, line) = lines.get(row + 1).ok_or_else(|| Error::ParseError {
            line: lines.last().map_or(1, |l| l.0) + 1,
            col: 1,
            reason: format!("expected {m} rows, found {row}"),
        })?;
        let mut entries = Vec::with_capacity(m);
        for (col, tok) in tokens(line) {
            if entries.len() == m {
                return Err(Error::ParseError { line: ln, col, reason: format!("more than {m} entries") });
            }
            let v = parse_entry(tok).map_err(|reason| Error::ParseError { line: ln, col, reason })?;
            if matches!(&v, ExtRational::Finite(r) if r.is_negative()) {
                return Err(Error::NegativeEntry { row, col: entries.len(), value: v.finite().cloned().unwrap_or_default() });
            }
            entries.push(v);
        }
        if entries.len() < m {
            return Err(Error::ParseError {
                line: ln,
                col: line.trim_end().len() + 1,
                reason: format!("expected {m} entries, found {}", entries.len()),
            });
        }
        matrix.push(entries);
    }
    if let Some(&(ln, _)) = lines.get(m + 1) {
        return Err(Error::ParseError { line: ln, col: 1, reason: "trailing content after matrix".into() });
    }
    let space = validate_space(matrix, require)?;
    match labels {
        Some((ln, names)) if names.len() != m => Err(Error::ParseError {
            line: ln,
            col: 1,
            reason: format!("{} labels for {m} points", names.len()),
        }),
        Some((_, names)) => space.with_labels(names),
        None => Ok(space),
    }
}

/// Inverse of [`parse_distance_matrix`]; labels are always written.
pub fn emit_distance_matrix(space: &FiniteMetricSpace) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# labels: {}", space.labels().join(" "));
    let _ = writeln!(s, "{}", space.len());
    for row in space.matrix() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", cells.join(" "));
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointMetric {
    L1,
    Linf,
    /// Euclidean distance rounded to the nearest multiple of `1/D`.
    EuclidSnapped(u64),
}

impl FromStr for PointMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(PointMetric::L1),
            "linf" => Ok(PointMetric::Linf),
            _ => {
                let d = s
                    .strip_prefix("euclid:")
                    .and_then(|d| d.parse::<u64>().ok())
                    .filter(|&d| d >= 1)
                    .ok_or_else(|| Error::Usage(format!("unknown metric `{s}` (expected l1, linf or euclid:D)")))?;
                Ok(PointMetric::EuclidSnapped(d))
            }
        }
    }
}

/// Parse `m` followed by `m` lines of rational coordinates.
pub fn parse_point_cloud(text: &str) -> Result<Vec<Vec<BigRational>>> {
    let (lines, _) = content_lines(text)?;
    let m = parse_count(&lines, "point count")?;
    if lines.len() != m + 1 {
        let line = lines.get(m + 1).map_or(lines.last().map_or(1, |l| l.0) + 1, |l| l.0);
        return Err(Error::ParseError { line, col: 1, reason: format!("expected {m} points, found {}", lines.len() - 1) });
    }
    lines[1..]
        .iter()
        .map(|&(ln, line)| {
            tokens(line)
                .map(|(col, tok)| parse_rational(tok).map_err(|reason| Error::ParseError { line: ln, col, reason }))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnappedSpace {
    pub space: FiniteMetricSpace,
    pub warning: Option<String>,
}

/// `round(D · sqrt(x))` with ties rounded up, exactly.
fn round_scaled_sqrt(x: &BigRational, d: u64) -> BigInt {
    let y = x * BigInt::from(d) * BigInt::from(d);
    let n = y.floor().to_integer().sqrt();
    let half = BigRational::new(BigInt::from(2) * &n + 1, BigInt::from(2));
    if y >= &half * &half {
        n + 1
    } else {
        n
    }
}

/// Build a space from points; Euclidean distances are snapped to a lattice
/// and the result re-checked against the triangle inequality.
pub fn snap_point_cloud(points: &[Vec<BigRational>], metric: PointMetric) -> Result<SnappedSpace> {
    let dim = points.first().map_or(0, Vec::len);
    if let Some((index, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
        return Err(Error::DimensionMismatch { index, expected: dim, found: p.len() });
    }
    let dist = |a: &[BigRational], b: &[BigRational]| -> BigRational {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match metric {
            PointMetric::L1 => diffs.fold(BigRational::zero(), |s, d| s + d),
            PointMetric::Linf => diffs.fold(BigRational::zero(), |s, d| s.max(d)),
            PointMetric::EuclidSnapped(den) => {
                let sq = diffs.fold(BigRational::zero(), |s, d| s + &d * &d);
                BigRational::new(round_scaled_sqrt(&sq, den), BigInt::from(den))
            }
        }
    };
    let matrix: Vec<Vec<ExtRational>> =
        points.iter().map(|a| points.iter().map(|b| ExtRational::Finite(dist(a, b))).collect()).collect();
    let space = validate_space(matrix, &[Flag::ZeroDiagonal, Flag::Symmetric, Flag::FiniteDistances])?;
    let warning = match metric {
        PointMetric::EuclidSnapped(den) => {
            if !space.flags().get(Flag::TriangleOk) {
                let witness = space.require(&[Flag::TriangleOk]).err().and_then(|e| match e {
                    Error::RequiredFlagViolated { witness, .. } => Some(witness),
                    _ => None,
                });
                return Err(Error::TriangleBrokenByRounding(witness.unwrap_or_default()));
            }
            Some(format!(
                "warning: Euclidean distances were rounded to multiples of 1/{den}; which triangle \
                 inequalities are equalities, and hence magnitude homology, depends on this choice"
            ))
        }
        _ => None,
    };
    Ok(SnappedSpace { space, warning })
}
