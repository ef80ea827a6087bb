//! Small helpers for reading the JSON input formats with error messages
//! that point at the offending location (`/brackets/2/coeffs/1`).

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{self, Scalar};

pub(crate) fn err(path: &str, msg: impl std::fmt::Display) -> Error {
    let at = if path.is_empty() { "/" } else { path };
    Error::Parse(format!("at {at}: {msg}"))
}

pub(crate) fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

pub(crate) fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| err(path, format!("missing field \"{key}\"")))
}

pub(crate) fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

pub(crate) fn usize_at(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| err(path, "expected a non-negative integer"))
}

/// Accepts `"p/q"`, `"p"` or a JSON integer.
pub(crate) fn scalar_at(v: &Value, path: &str) -> Result<Scalar> {
    match v {
        Value::String(s) => scalar::parse(s).map_err(|e| err(path, e)),
        Value::Number(n) if n.is_i64() => Ok(scalar::int(n.as_i64().unwrap_or_default())),
        _ => Err(err(path, "expected a rational such as \"3/4\"")),
    }
}

pub(crate) fn usize_list(v: &Value, path: &str) -> Result<Vec<usize>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| usize_at(x, &format!("{path}/{i}")))
        .collect()
}

pub(crate) fn matrix_at(v: &Value, path: &str, rows: usize, cols: usize) -> Result<Matrix> {
    let outer = array(v, path)?;
    if outer.len() != rows {
        return Err(err(path, format!("expected {rows} rows, found {}", outer.len())));
    }
    let mut m = Matrix::zeros(rows, cols);
    for (r, row) in outer.iter().enumerate() {
        let rp = format!("{path}/{r}");
        let row = array(row, &rp)?;
        if row.len() != cols {
            return Err(err(&rp, format!("expected {cols} entries, found {}", row.len())));
        }
        for (c, x) in row.iter().enumerate() {
            m[(r, c)] = scalar_at(x, &format!("{rp}/{c}"))?;
        }
    }
    Ok(m)
}

pub(crate) fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array(m.row(r).iter().map(|x| Value::String(scalar::format(x))).collect()))
            .collect(),
    )
}

pub(crate) fn scalar_to_json(x: &Scalar) -> Value {
    Value::String(scalar::format(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn errors_carry_the_path() {
        let v = json!({"m": [["1", "x"]]});
        let e = matrix_at(&v["m"], "/m", 1, 2).unwrap_err();
        assert!(e.to_string().contains("/m/0/1"), "{e}");
        let e = matrix_at(&v["m"], "/m", 2, 2).unwrap_err();
        assert!(e.to_string().contains("expected 2 rows"), "{e}");
    }

    #[test]
    fn integers_and_strings_are_scalars() {
        assert_eq!(scalar_at(&json!(3), "").unwrap(), scalar::int(3));
        assert_eq!(scalar_at(&json!("-6/4"), "").unwrap(), scalar::q(-3, 2));
        assert!(scalar_at(&json!(0.5), "").is_err());
    }
}
