//! Canonical JSON helpers.
//!
//! Rationals are written as `[num, den]` pairs of JSON integers in lowest
//! terms with a positive denominator. Integers of any size are emitted
//! verbatim. Objects are key-sorted, so equal values render to equal bytes.

use std::str::FromStr;

use num::{BigInt, One, Signed, Zero};
use serde_json::{Number, Value};

use crate::{Error, Result, Rational};

fn int_to_json(i: &BigInt) -> Value {
    // arbitrary_precision keeps the digits exact
    Value::Number(Number::from_str(&i.to_string()).expect("integer literal"))
}

pub fn rational_to_json(q: &Rational) -> Value {
    Value::Array(vec![int_to_json(q.numer()), int_to_json(q.denom())])
}

pub fn rationals_to_json(qs: &[Rational]) -> Value {
    Value::Array(qs.iter().map(rational_to_json).collect())
}

fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string())
            .map_err(|_| Error::Json(format!("expected an integer, found {n}"))),
        Value::String(s) => {
            BigInt::from_str(s.trim()).map_err(|_| Error::Json(format!("bad integer {s:?}")))
        }
        other => Err(Error::Json(format!("expected an integer, found {other}"))),
    }
}

/// Parse a rational from `[num, den]`, an integer, or a `"num/den"` string.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            let num = int_from_json(&pair[0])?;
            let den = int_from_json(&pair[1])?;
            if den.is_zero() {
                return Err(Error::Json("zero denominator".into()));
            }
            Ok(Rational::new(num, den))
        }
        Value::Number(_) => Ok(Rational::from_integer(int_from_json(v)?)),
        Value::String(s) => parse_rational(s),
        other => Err(Error::Json(format!("expected a rational, found {other}"))),
    }
}

pub fn rationals_from_json(v: &Value) -> Result<Vec<Rational>> {
    v.as_array()
        .ok_or_else(|| Error::Json("expected an array of rationals".into()))?
        .iter()
        .map(rational_from_json)
        .collect()
}

/// Parse `"p"`, `"p/q"` or a finite decimal such as `"-1.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Json(format!("bad rational {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let scale = num::pow(BigInt::from(10), frac.len());
        let frac = BigInt::from_str(frac).map_err(|_| bad())?;
        let mag = Rational::new(int.abs() * &scale + frac, scale);
        return Ok(if negative { -mag } else { mag });
    }
    Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?))
}

/// `num/den` with the denominator always present.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        format!("{}/1", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Pretty, key-sorted rendering with a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

pub(crate) fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Json(format!("missing field {key:?}")))
}

pub(crate) fn usize_field(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Json(format!("field {key:?} must be a nonnegative integer")))
}
