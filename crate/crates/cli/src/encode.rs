//! JSON encodings of exact data. Rationals are strings `"p/q"`.

use serde_json::Value;
use tate_forge::linalg::Matrix;
use tate_forge::scalar::{format_rational, parse_rational};
use tate_forge::Rational;

use crate::{input_error, JobResult};

pub fn rational(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

/// Row lists of exact scalars.
pub fn matrix(m: &Matrix) -> Value {
    Value::Array(m.to_dense().iter().map(|row| Value::Array(row.iter().map(rational).collect())).collect())
}

pub fn parse_scalar(s: &str) -> JobResult<Rational> {
    parse_rational(s).map_err(|e| input_error(format!("bad scalar {s:?}: {e}")))
}

/// Inverse of [`matrix`]; `ncols` is needed for matrices without rows.
pub fn parse_matrix(rows: &[Vec<String>], ncols: usize) -> JobResult<Matrix> {
    let mut dense = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(input_error(format!("matrix row {i} has {} entries, expected {ncols}", row.len())));
        }
        dense.push(row.iter().map(|s| parse_scalar(s)).collect::<JobResult<Vec<_>>>()?);
    }
    Ok(Matrix::from_dense(rows.len(), ncols, &dense))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tate_forge::scalar::{frac, q};

    #[test]
    fn matrix_round_trip() {
        let m = Matrix::from_dense(2, 2, &[vec![frac(1, 2), q(0)], vec![q(-3), frac(-7, 5)]]);
        let v = matrix(&m);
        assert_eq!(v, serde_json::json!([["1/2", "0/1"], ["-3/1", "-7/5"]]));
        let rows: Vec<Vec<String>> = serde_json::from_value(v).unwrap();
        assert_eq!(parse_matrix(&rows, 2).unwrap(), m);
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows = vec![vec!["1".to_string()], vec![]];
        assert!(parse_matrix(&rows, 1).is_err());
    }
}
