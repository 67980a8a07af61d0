use std::fmt;

use nalgebra::DMatrix;
use num::integer::Integer;
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::json::{field, rational_from_json, rational_to_json, usize_field};
use crate::{Error, Result, Rational};

/// Square matrix of exact rationals, row-major, order at least 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn new(n: usize, data: Vec<Rational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(QMatrix { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix order must be positive");
        QMatrix {
            n,
            data: vec![Rational::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for k in 0..n {
            m.set(k, k, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: r + 1,
                    found: row.len(),
                    expected: n,
                });
            }
        }
        Self::new(n, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (k, e) in entries.iter().enumerate() {
            m.set(k, k, e.clone());
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.n + c] = v;
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = QMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Rational {
        (0..self.n).map(|k| self.get(k, k).clone()).sum()
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: &Rational) -> QMatrix {
        let mut out = self.clone();
        for k in 0..self.n {
            out.data[k * self.n + k] += shift;
        }
        out
    }

    pub fn transpose(&self) -> QMatrix {
        let n = self.n;
        let mut out = self.clone();
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.get(r, c).clone();
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination on `D·A`, `D` the
    /// common denominator: `det A = det(D·A) / D^n`.
    pub fn det(&self) -> Rational {
        let n = self.n;
        let d = self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut a: Vec<BigInt> = self.data.iter().map(|x| x.numer() * (&d / x.denom())).collect();
        let mut negate = false;
        let mut prev = BigInt::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                for c in 0..n {
                    a.swap(p * n + c, col * n + c);
                }
                negate = !negate;
            }
            for r in col + 1..n {
                for c in col + 1..n {
                    let v = &a[col * n + col] * &a[r * n + c] - &a[r * n + col] * &a[col * n + c];
                    a[r * n + c] = v / &prev;
                }
                a[r * n + col] = BigInt::zero();
            }
            prev = a[col * n + col].clone();
        }
        let det = Rational::new(prev, num::pow(d, n));
        if negate {
            -det
        } else {
            det
        }
    }

    /// Maximum absolute row sum.
    pub fn max_row_sum(&self) -> Rational {
        (0..self.n)
            .map(|r| self.row(r).iter().map(|x| x.abs()).sum::<Rational>())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |r, c| self.get(r, c).to_f64().unwrap_or(f64::NAN))
    }

    /// Every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// `{"n": n, "entries": [[num, den], ...]}` in row-major order.
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "entries": Value::Array(self.data.iter().map(rational_to_json).collect()),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = usize_field(v, "n")?;
        let entries = field(v, "entries")?
            .as_array()
            .ok_or_else(|| Error::Json("entries must be an array".into()))?;
        Self::new(n, entries.iter().map(rational_from_json).collect::<Result<_>>()?)
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A matrix read from a user file: exact when every entry is rational,
/// floating-point when any entry is a JSON float.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixInput {
    Exact(QMatrix),
    Real(DMatrix<f64>),
}

impl MatrixInput {
    pub fn to_f64(&self) -> DMatrix<f64> {
        match self {
            MatrixInput::Exact(q) => q.to_f64(),
            MatrixInput::Real(m) => m.clone(),
        }
    }

    /// Accepts `{"n", "entries"}` (flat, row-major) or a bare array of rows.
    /// Entries may be `[num, den]`, integers, `"p/q"` strings or floats.
    pub fn from_json(v: &Value) -> Result<Self> {
        let (n, flat): (usize, Vec<&Value>) = match v {
            Value::Array(rows) => {
                let n = rows.len();
                let mut flat = Vec::with_capacity(n * n);
                for (r, row) in rows.iter().enumerate() {
                    let row = row
                        .as_array()
                        .ok_or_else(|| Error::Json("matrix rows must be arrays".into()))?;
                    if row.len() != n {
                        return Err(Error::NotSquare {
                            row: r + 1,
                            found: row.len(),
                            expected: n,
                        });
                    }
                    flat.extend(row.iter());
                }
                (n, flat)
            }
            _ => {
                let n = usize_field(v, "n")?;
                let entries = field(v, "entries")?
                    .as_array()
                    .ok_or_else(|| Error::Json("entries must be an array".into()))?;
                (n, entries.iter().collect())
            }
        };
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if flat.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: flat.len(),
            });
        }
        let is_float = |e: &Value| matches!(e, Value::Number(x) if x.as_i64().is_none() && x.as_u64().is_none() && x.to_string().parse::<BigInt>().is_err());
        if flat.iter().any(|e| is_float(e)) {
            let vals = flat
                .iter()
                .map(|e| match e {
                    Value::Number(x) => x
                        .as_f64()
                        .ok_or_else(|| Error::Json(format!("bad number {x}"))),
                    other => rational_from_json(other)
                        .map(|q| q.to_f64().unwrap_or(f64::NAN)),
                })
                .collect::<Result<Vec<f64>>>()?;
            return Ok(MatrixInput::Real(DMatrix::from_row_slice(n, n, &vals)));
        }
        let vals = flat
            .into_iter()
            .map(rational_from_json)
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixInput::Exact(QMatrix::new(n, vals)?))
    }
}

/// Row-sum norm of a floating-point matrix.
pub fn max_row_sum_f64(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
pub(crate) fn int(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn determinant_small_cases() {
        let m = QMatrix::from_i64_rows(&[&[2, 1], &[7, 4]]).unwrap();
        assert_eq!(m.det(), int(1));
        let m = QMatrix::from_i64_rows(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 5]]).unwrap();
        assert_eq!(m.det(), int(-5));
        let singular = QMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(singular.det(), int(0));
        let h = QMatrix::from_rows(vec![vec![q(1, 1), q(1, 2)], vec![q(1, 2), q(1, 3)]]).unwrap();
        assert_eq!(h.det(), q(1, 12));
    }

    #[test]
    fn json_round_trip_and_float_detection() {
        let m = QMatrix::from_rows(vec![vec![q(1, 2), q(-3, 1)], vec![q(0, 1), q(7, 9)]]).unwrap();
        let v = m.to_json();
        assert_eq!(QMatrix::from_json(&v).unwrap(), m);
        assert_eq!(MatrixInput::from_json(&v).unwrap(), MatrixInput::Exact(m));

        let rows: Value = serde_json::from_str("[[1, 2], [3, 4]]").unwrap();
        assert!(matches!(MatrixInput::from_json(&rows).unwrap(), MatrixInput::Exact(_)));
        let floats: Value = serde_json::from_str("[[1.5, 2], [3, 4]]").unwrap();
        match MatrixInput::from_json(&floats).unwrap() {
            MatrixInput::Real(m) => assert_eq!(m[(0, 0)], 1.5),
            other => panic!("expected real matrix, got {other:?}"),
        }
        let ragged: Value = serde_json::from_str("[[1, 2], [3]]").unwrap();
        assert!(MatrixInput::from_json(&ragged).is_err());
    }

    #[test]
    fn row_sum_norm() {
        let m = QMatrix::from_i64_rows(&[&[1, -2], &[-3, 0]]).unwrap();
        assert_eq!(m.max_row_sum(), int(3));
        assert_eq!(max_row_sum_f64(&m.to_f64()), 3.0);
    }
}
