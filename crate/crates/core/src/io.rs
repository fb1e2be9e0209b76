//! Text and JSON formats for matrices, forms, flags, parameters and curve
//! tables.
//!
//! Text grids hold one row per line with whitespace-separated entries;
//! blank lines and lines starting with `#` are ignored. The JSON form of a
//! matrix is `{"rows": n, "cols": m, "entries": [[...], ...]}` with entries
//! as strings in the scalar lexical forms (integer, `p/q`, decimal). A flag
//! is its representative matrix with an extra `"kind": "flag"` tag.

use serde_json::{json, Value};

use crate::curves::{CirclePoint, FlagCurve};
use crate::error::{Error, Result};
use crate::flag::Flag;
use crate::matrix::Matrix;
use crate::scalar::{parse_rational, Rational, Scalar};
use crate::whitney::{TpParameters, WhitneyWord};

fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

pub fn parse_matrix_text<T: Scalar>(text: &str) -> Result<Matrix<T>> {
    let rows: Vec<Vec<T>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(T::parse_lexeme).collect::<Result<Vec<T>>>())
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Err(input("empty matrix"));
    }
    Matrix::from_rows(rows).map_err(|e| input(e.to_string()))
}

fn scalar_from_value<T: Scalar>(v: &Value) -> Result<T> {
    match v {
        Value::String(s) => T::parse_lexeme(s),
        Value::Number(n) => T::parse_lexeme(&n.to_string()),
        other => Err(input(format!("expected a scalar, found {other}"))),
    }
}

fn scalars_from_value<T: Scalar>(v: &Value, what: &str) -> Result<Vec<T>> {
    v.as_array()
        .ok_or_else(|| input(format!("{what} must be an array")))?
        .iter()
        .map(scalar_from_value)
        .collect()
}

/// A matrix from a JSON value: the structured object, or a bare array of rows.
pub fn matrix_from_value<T: Scalar>(v: &Value) -> Result<Matrix<T>> {
    let (grid, dims) = match v {
        Value::Array(_) => (v, None),
        Value::Object(o) => {
            let grid = o.get("entries").ok_or_else(|| input("matrix object lacks \"entries\""))?;
            let dim = |k: &str| o.get(k).map(|d| d.as_u64().map(|d| d as usize).ok_or_else(|| input(format!("\"{k}\" must be a count"))));
            let dims = match (dim("rows"), dim("cols")) {
                (Some(r), Some(c)) => Some((r?, c?)),
                (None, None) => None,
                _ => return Err(input("matrix object needs both \"rows\" and \"cols\"")),
            };
            (grid, dims)
        }
        other => return Err(input(format!("expected a matrix, found {other}"))),
    };
    let rows: Vec<Vec<T>> = grid
        .as_array()
        .ok_or_else(|| input("\"entries\" must be an array of rows"))?
        .iter()
        .map(|r| scalars_from_value(r, "matrix row"))
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Err(input("empty matrix"));
    }
    let m = Matrix::from_rows(rows).map_err(|e| input(e.to_string()))?;
    if let Some((r, c)) = dims {
        if (r, c) != (m.rows(), m.cols()) {
            return Err(input(format!(
                "declared {r}x{c} but entries are {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(m)
}

/// Text grid or JSON, chosen by the first non-blank character.
pub fn parse_matrix<T: Scalar>(text: &str) -> Result<Matrix<T>> {
    let t = text.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        let v: Value = serde_json::from_str(t).map_err(|e| input(format!("bad JSON: {e}")))?;
        matrix_from_value(&v)
    } else {
        parse_matrix_text(text)
    }
}

pub fn matrix_to_value<T: Scalar>(m: &Matrix<T>) -> Value {
    let entries: Vec<Vec<String>> = (0..m.rows())
        .map(|r| m.row(r).iter().map(ToString::to_string).collect())
        .collect();
    json!({"rows": m.rows(), "cols": m.cols(), "entries": entries})
}

pub fn flag_to_value<T: Scalar>(f: &Flag<T>) -> Value {
    let mut v = matrix_to_value(f.representative());
    v["kind"] = json!("flag");
    v
}

/// A flag from any matrix input; a `"kind"` tag, when present, must be `"flag"`.
pub fn parse_flag<T: Scalar>(text: &str) -> Result<Flag<T>> {
    let t = text.trim_start();
    if t.starts_with('{') {
        let v: Value = serde_json::from_str(t).map_err(|e| input(format!("bad JSON: {e}")))?;
        if let Some(kind) = v.get("kind") {
            if kind != "flag" {
                return Err(input(format!("expected kind \"flag\", found {kind}")));
            }
        }
        return Flag::from_matrix(&matrix_from_value(&v)?);
    }
    Flag::from_matrix(&parse_matrix(text)?)
}

pub fn params_to_value<T: Scalar, S>(p: &TpParameters<T, S>) -> Value
where
    S: crate::whitney::ParamState,
{
    let strs = |v: &[T]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    json!({
        "word": p.word().indices(),
        "a": strs(p.a()),
        "t": strs(p.t()),
        "b": strs(p.b()),
    })
}

pub fn parse_params<T: Scalar>(text: &str) -> Result<TpParameters<T>> {
    let v: Value = serde_json::from_str(text).map_err(|e| input(format!("bad JSON: {e}")))?;
    let field = |k: &str| v.get(k).ok_or_else(|| input(format!("parameters lack \"{k}\"")));
    let t: Vec<T> = scalars_from_value(field("t")?, "t")?;
    let word = match v.get("word") {
        Some(w) => {
            let idx: Vec<usize> = w
                .as_array()
                .ok_or_else(|| input("\"word\" must be an array"))?
                .iter()
                .map(|i| i.as_u64().map(|i| i as usize).ok_or_else(|| input("word entries must be indices")))
                .collect::<Result<_>>()?;
            WhitneyWord::from_indices(&idx).map_err(|e| input(e.to_string()))?
        }
        None => WhitneyWord::standard(t.len()).map_err(|e| input(e.to_string()))?,
    };
    let a = scalars_from_value(field("a")?, "a")?;
    let b = scalars_from_value(field("b")?, "b")?;
    TpParameters::new(word, a, t, b)
}

/// A scalar vector: whitespace-separated lexemes or a JSON array.
pub fn parse_vector<T: Scalar>(text: &str) -> Result<Vec<T>> {
    let t = text.trim();
    if t.starts_with('[') {
        let v: Value = serde_json::from_str(t).map_err(|e| input(format!("bad JSON: {e}")))?;
        return scalars_from_value(&v, "vector");
    }
    t.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(T::parse_lexeme)
        .collect()
}

pub fn parse_circle_point(s: &str) -> Result<CirclePoint> {
    let t = s.trim();
    match t {
        "inf" | "infinity" | "∞" => Ok(CirclePoint::Infinity),
        _ => {
            if let Some(deg) = t.strip_suffix("deg") {
                let a: f64 = deg.trim().parse().map_err(|_| input(format!("bad angle {t:?}")))?;
                return Ok(CirclePoint::Angle(a));
            }
            Ok(CirclePoint::Finite(parse_rational(t)?))
        }
    }
}

fn circle_point_from_value(v: &Value) -> Result<CirclePoint> {
    match v {
        Value::String(s) => parse_circle_point(s),
        Value::Number(n) => parse_circle_point(&n.to_string()),
        other => Err(input(format!("expected a parameter, found {other}"))),
    }
}

/// Curve sample table: `[{"t": scalar-or-"inf", "flag": matrix}, ...]`.
pub fn parse_curve_table(text: &str) -> Result<FlagCurve> {
    let v: Value = serde_json::from_str(text).map_err(|e| input(format!("bad JSON: {e}")))?;
    let rows = v.as_array().ok_or_else(|| input("curve table must be an array"))?;
    let table = rows
        .iter()
        .map(|r| {
            let t = circle_point_from_value(r.get("t").ok_or_else(|| input("record lacks \"t\""))?)?;
            let m: Matrix<Rational> = matrix_from_value(r.get("flag").ok_or_else(|| input("record lacks \"flag\""))?)?;
            Ok((t, Flag::from_matrix(&m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlagCurve::Table(table))
}

pub fn curve_table_to_value(rows: &[(CirclePoint, Flag<Rational>)]) -> Value {
    Value::Array(
        rows.iter()
            .map(|(t, f)| json!({"t": t.to_string(), "flag": flag_to_value(f)}))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn text_and_json_agree() {
        let a: Matrix<Rational> = parse_matrix("1 3\n2 7\n").unwrap();
        let b: Matrix<Rational> =
            parse_matrix(r#"{"rows": 2, "cols": 2, "entries": [["1","3"],["2","7"]]}"#).unwrap();
        assert_eq!(a, b);
        let back: Matrix<Rational> = matrix_from_value(&matrix_to_value(&a)).unwrap();
        assert_eq!(back, a);
        let c: Matrix<Rational> = parse_matrix("# comment\n1/2 0.25\n\n-3 1e1\n").unwrap();
        assert_eq!(c[(0, 1)], rat(1, 4));
        assert_eq!(c[(1, 1)], rat(10, 1));
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_matrix::<Rational>("1 2\n3").unwrap_err().is_input_error());
        assert!(parse_matrix::<Rational>("1 x").unwrap_err().is_input_error());
        assert!(parse_matrix::<Rational>(r#"{"rows": 3, "cols": 2, "entries": [["1","2"]]}"#)
            .unwrap_err()
            .is_input_error());
        assert!(parse_matrix::<Rational>("").unwrap_err().is_input_error());
    }

    #[test]
    fn params_round_trip() {
        let text = r#"{"word": [1], "a": ["2"], "t": ["1", "1"], "b": ["3"]}"#;
        let p: TpParameters<Rational> = parse_params(text).unwrap();
        let again: TpParameters<Rational> = parse_params(&params_to_value(&p).to_string()).unwrap();
        assert_eq!(p, again);
        assert!(parse_params::<Rational>(r#"{"word": [1], "a": ["0"], "t": ["1","1"], "b": ["3"]}"#).is_err());
    }

    #[test]
    fn flags_and_tables() {
        let f: Flag<Rational> = parse_flag(r#"{"kind": "flag", "rows": 2, "cols": 2, "entries": [["1","0"],["1","1"]]}"#).unwrap();
        assert_eq!(f, Flag::from_matrix(&Matrix::from_i64_rows(&[&[1, 0], &[1, 1]])).unwrap());
        assert!(parse_flag::<Rational>(r#"{"kind": "form", "entries": [["1"]]}"#).is_err());
        let table = curve_table_to_value(&[(CirclePoint::Infinity, f.clone()), (CirclePoint::finite(1, 2), f)]);
        let FlagCurve::Table(rows) = parse_curve_table(&table.to_string()).unwrap() else {
            panic!("expected a table");
        };
        assert_eq!(rows[0].0, CirclePoint::Infinity);
        assert_eq!(rows[1].0, CirclePoint::finite(1, 2));
    }

    #[test]
    fn vectors_and_points() {
        assert_eq!(parse_vector::<Rational>("1, -1/2 3").unwrap(), vec![rat(1, 1), rat(-1, 2), rat(3, 1)]);
        assert_eq!(parse_vector::<Rational>("[\"2\", 5]").unwrap(), vec![rat(2, 1), rat(5, 1)]);
        assert_eq!(parse_circle_point("90deg").unwrap(), CirclePoint::Angle(90.0));
    }
}
