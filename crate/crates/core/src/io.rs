//! JSON input schemas.
//!
//! Matrix entries are kept as decimal text next to their `f64` value so that
//! files written with exact decimals can be validated in exact rational
//! arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Deserialize;
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, PointSet, ValidationReport, Violation};
use crate::tree::{MetricTree, TreePoint, TreeRecord};

/// Decimal exponents beyond this are rejected before building big integers.
const MAX_EXPONENT: i64 = 400;

fn located(e: serde_json::Error) -> Error {
    let text = e.to_string();
    let tail = format!(" at line {} column {}", e.line(), e.column());
    let detail = text.strip_suffix(&tail).unwrap_or(&text);
    Error::Parse(format!("line {}, column {}: {detail}", e.line(), e.column()))
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(located)
}

/// A decimal literal as an exact rational, or `None` if it is not a JSON number.
pub fn decimal_to_rational(text: &str) -> Option<BigRational> {
    let b = text.as_bytes();
    let mut i = 0;
    let negative = b.first() == Some(&b'-');
    if negative {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let int_digits = &text[int_start..i];
    if int_digits.is_empty() || (int_digits.len() > 1 && int_digits.starts_with('0')) {
        return None;
    }
    let mut frac_digits = "";
    if i < b.len() && b[i] == b'.' {
        let start = i + 1;
        i = start;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        frac_digits = &text[start..i];
        if frac_digits.is_empty() {
            return None;
        }
    }
    let mut exponent: i64 = 0;
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        let mut sign = 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            if b[i] == b'-' {
                sign = -1;
            }
            i += 1;
        }
        let start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        let digits = &text[start..i];
        if digits.is_empty() || digits.len() > 6 {
            return None;
        }
        exponent = sign * digits.parse::<i64>().ok()?;
    }
    if i != b.len() {
        return None;
    }
    let scale = exponent - frac_digits.len() as i64;
    if scale.abs() > MAX_EXPONENT + 40 {
        return None;
    }
    let mantissa: BigInt = format!("{int_digits}{frac_digits}").parse().ok()?;
    let mantissa = if negative { -mantissa } else { mantissa };
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::from_integer(mantissa * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(mantissa, num_traits::pow(ten, (-scale) as usize))
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceFile<'a> {
    metric: String,
    #[serde(borrow, default)]
    d: Option<Vec<Vec<&'a RawValue>>>,
    #[serde(default)]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// A parsed space and, for matrix input, its entries as exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceInput {
    pub space: FiniteMetricSpace,
    pub exact: Option<Vec<Vec<BigRational>>>,
}

impl SpaceInput {
    /// Exact axiom check for matrix input, tolerance-based otherwise.
    pub fn validate(&self) -> ValidationReport {
        match &self.exact {
            Some(m) => validate_exact(m).expect("square by construction"),
            None => self.space.validate(),
        }
    }
}

pub fn parse_space(text: &str) -> Result<SpaceInput> {
    let file: SpaceFile = from_json(text)?;
    let (space, exact) = match file.metric.as_str() {
        "matrix" => {
            let rows = file.d.ok_or_else(|| Error::Parse("matrix space needs a \"d\" field".into()))?;
            if file.points.is_some() {
                return Err(Error::Parse("matrix space must not have \"points\"".into()));
            }
            let mut floats = Vec::with_capacity(rows.len());
            let mut exact = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                let mut fr = Vec::with_capacity(row.len());
                let mut er = Vec::with_capacity(row.len());
                for (j, raw) in row.iter().enumerate() {
                    let txt = raw.get();
                    let q = decimal_to_rational(txt)
                        .ok_or_else(|| Error::Parse(format!("d[{i}][{j}]: expected a decimal number, got {txt}")))?;
                    let v: f64 = txt
                        .parse()
                        .map_err(|_| Error::Parse(format!("d[{i}][{j}]: unreadable number {txt}")))?;
                    if !v.is_finite() {
                        return Err(Error::Parse(format!("d[{i}][{j}]: {txt} overflows a double")));
                    }
                    fr.push(v);
                    er.push(q);
                }
                floats.push(fr);
                exact.push(er);
            }
            (FiniteMetricSpace::from_matrix(floats)?, Some(exact))
        }
        "euclidean" => {
            let pts = file.points.ok_or_else(|| Error::Parse("euclidean space needs a \"points\" field".into()))?;
            if file.d.is_some() {
                return Err(Error::Parse("euclidean space must not have \"d\"".into()));
            }
            if pts.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Parse("point coordinates must be finite".into()));
            }
            (FiniteMetricSpace::from_points(&pts)?, None)
        }
        other => return Err(Error::Parse(format!("unknown metric kind {other:?}; use \"matrix\" or \"euclidean\""))),
    };
    let space = match file.labels {
        Some(labels) => space.with_labels(labels)?,
        None => space,
    };
    Ok(SpaceInput { space, exact })
}

fn approx(q: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

/// Metric axioms in exact arithmetic; the report's tolerance is 0.
pub fn validate_exact(m: &[Vec<BigRational>]) -> Result<ValidationReport> {
    let n = m.len();
    if let Some(i) = m.iter().position(|row| row.len() != n) {
        return Err(Error::Structural(format!("row {i} has {} entries, expected {n}", m[i].len())));
    }
    let mut violations = Vec::new();
    for i in 0..n {
        if !m[i][i].is_zero() {
            violations.push(Violation::NonZeroDiagonal { i, value: approx(&m[i][i]) });
        }
        for j in (i + 1)..n {
            if m[i][j] != m[j][i] {
                violations.push(Violation::Asymmetric { i, j, dij: approx(&m[i][j]), dji: approx(&m[j][i]) });
            }
            if !m[i][j].is_positive() {
                violations.push(Violation::NonPositive { i, j, value: approx(&m[i][j]) });
            }
        }
    }
    for i in 0..n {
        for k in (i + 1)..n {
            for via in (0..n).filter(|&v| v != i && v != k) {
                let rhs = &m[i][via] + &m[via][k];
                if m[i][k] > rhs {
                    violations.push(Violation::Triangle { i, k, via, lhs: approx(&m[i][k]), rhs: approx(&rhs) });
                }
            }
        }
    }
    Ok(ValidationReport { tolerance: 0.0, violations })
}

/// Array of point indices.
pub fn parse_subset(text: &str) -> Result<PointSet> {
    Ok(PointSet::new(from_json::<Vec<usize>>(text)?))
}

/// A permutation given as an array of indices; checked by the consumer.
pub fn parse_order(text: &str) -> Result<Vec<usize>> {
    from_json(text)
}

/// Object from point index (as a string key) to a value vector.
pub fn parse_values(text: &str) -> Result<BTreeMap<usize, Vec<f64>>> {
    let raw: BTreeMap<String, Vec<f64>> = from_json(text)?;
    let mut out = BTreeMap::new();
    for (k, v) in raw {
        let idx: usize = k
            .parse()
            .map_err(|_| Error::Parse(format!("value key {k:?} is not a point index")))?;
        if out.insert(idx, v).is_some() {
            return Err(Error::Parse(format!("point {idx} has two values")));
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordFile {
    node: usize,
    parent: Option<usize>,
    offset: f64,
    length: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointFile {
    node: usize,
    offset: f64,
}

/// Array of `{node, parent, offset, length}` records.
pub fn parse_tree(text: &str) -> Result<MetricTree> {
    let recs: Vec<RecordFile> = from_json(text)?;
    let recs: Vec<TreeRecord> = recs
        .into_iter()
        .map(|r| TreeRecord { node: r.node, parent: r.parent, offset: r.offset, length: r.length })
        .collect();
    MetricTree::from_records(&recs)
}

/// Array of `{node, offset}` tree points.
pub fn parse_sample(text: &str) -> Result<Vec<TreePoint>> {
    let pts: Vec<PointFile> = from_json(text)?;
    Ok(pts.into_iter().map(|p| TreePoint { node: p.node, offset: p.offset }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(decimal_to_rational("0.1"), Some(q(1, 10)));
        assert_eq!(decimal_to_rational("-2.50e1"), Some(q(-25, 1)));
        assert_eq!(decimal_to_rational("3E-2"), Some(q(3, 100)));
        for bad in ["", "-", "01", "1.", ".5", "1e", "\"1\"", "true", "1e9999999"] {
            assert_eq!(decimal_to_rational(bad), None, "{bad}");
        }
    }

    #[test]
    fn exact_validation_sees_what_floats_miss() {
        // 0.1 + 0.7 = 0.8 exactly, but the double sum falls below the double 0.8.
        let text = r#"{"metric":"matrix","d":[[0,0.1,0.8],[0.1,0,0.7],[0.8,0.7,0]]}"#;
        let input = parse_space(text).unwrap();
        assert!(input.validate().is_valid());
        assert!(input.space.validate_with_tolerance(0.0).violations.len() == 1);
    }

    #[test]
    fn triangle_violation_witness() {
        let input = parse_space(r#"{"metric":"matrix","d":[[0,1,5],[1,0,1],[5,1,0]]}"#).unwrap();
        let report = input.validate();
        assert!(matches!(report.violations[..], [Violation::Triangle { i: 0, k: 2, via: 1, .. }]));
    }

    #[test]
    fn euclidean_input() {
        let input = parse_space(r#"{"metric":"euclidean","points":[[0,0],[3,4]],"labels":["a","b"]}"#).unwrap();
        assert_eq!(input.space.d(0, 1), 5.0);
        assert!(input.exact.is_none());
        assert_eq!(input.space.labels().unwrap()[1], "b");
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_space("{\n  \"metric\": \"matrix\",\n  \"d\": [[0, ]]\n}").unwrap_err();
        let Error::Parse(msg) = err else { panic!("{err:?}") };
        assert!(msg.starts_with("line 3"), "{msg}");
    }

    #[test]
    fn ragged_matrix_is_structural() {
        let err = parse_space(r#"{"metric":"matrix","d":[[0,1],[1]]}"#).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }

    #[test]
    fn values_and_subsets() {
        let v = parse_values(r#"{"0":[1.0,2.0],"3":[0.5,0.5]}"#).unwrap();
        assert_eq!(v[&3], vec![0.5, 0.5]);
        assert!(parse_values(r#"{"x":[1]}"#).is_err());
        assert_eq!(parse_subset("[3,1,3]").unwrap().indices(), &[1, 3]);
    }

    #[test]
    fn tree_and_sample() {
        let t = parse_tree(r#"[{"node":0,"parent":null,"offset":0,"length":2},{"node":1,"parent":0,"offset":1,"length":1}]"#)
            .unwrap();
        let s = parse_sample(r#"[{"node":1,"offset":1},{"node":0,"offset":2}]"#).unwrap();
        assert_eq!(t.distance(&s[0], &s[1]).unwrap(), 2.0);
    }
}
