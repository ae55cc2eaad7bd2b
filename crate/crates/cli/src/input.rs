//! Parsing of command-line values: complex literals, period matrices,
//! vectors, polarization types and characteristics.

use std::io::Read;

use num_complex::Complex64;
use num_rational::Ratio;
use serde_json::Value;
use siegel_theta::sym_core::{MatrixJson, SymMatC, SymMatR};
use siegel_theta::symplectic::{PolarizationType, SymplecticJson};

use crate::CliError;

type Parsed<T> = Result<T, CliError>;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

/// Returns the argument, or the whole of stdin when the argument is `-`.
pub fn resolve(arg: &str) -> Parsed<String> {
    if arg != "-" {
        return Ok(arg.to_string());
    }
    let mut s = String::new();
    std::io::stdin().read_to_string(&mut s).map_err(|e| bad(format!("reading stdin: {e}")))?;
    Ok(s)
}

fn parse_real(s: &str) -> Parsed<f64> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.trim().parse().map_err(|_| bad(format!("bad number {s:?}")))?;
        let d: f64 = d.trim().parse().map_err(|_| bad(format!("bad number {s:?}")))?;
        if d == 0.0 {
            return Err(bad(format!("zero denominator in {s:?}")));
        }
        return Ok(n / d);
    }
    s.parse().map_err(|_| bad(format!("bad number {s:?}")))
}

fn signed_unit(s: &str) -> Parsed<f64> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_real(s),
    }
}

/// Complex literal such as `2`, `i`, `-i`, `2i`, `0.7+0.8i`, `1e-3-2i`.
pub fn parse_complex(text: &str) -> Parsed<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad("empty complex literal"));
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(parse_real(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(parse_real(&body[..k])?, signed_unit(&body[k..])?)),
        None => Ok(Complex64::new(0.0, signed_unit(body)?)),
    }
}

fn complex_from_json(v: &Value) -> Parsed<Complex64> {
    match v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().ok_or_else(|| bad("bad number"))?, 0.0)),
        Value::String(s) => parse_complex(s),
        Value::Array(pair) if pair.len() == 2 => {
            let part = |x: &Value| x.as_f64().ok_or_else(|| bad(format!("bad complex pair {v}")));
            Ok(Complex64::new(part(&pair[0])?, part(&pair[1])?))
        }
        _ => Err(bad(format!("cannot read {v} as a complex number"))),
    }
}

fn json(text: &str) -> Parsed<Value> {
    serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON: {e}")))
}

/// Strips one level of JSON string quoting, as in `"0.7+0.8i"` read from stdin.
fn unquote(text: &str) -> Parsed<String> {
    let t = text.trim();
    if t.starts_with('"') {
        return serde_json::from_str::<String>(t).map_err(|e| bad(format!("invalid JSON string: {e}")));
    }
    Ok(t.to_string())
}

/// Complex vector: a JSON array of entries (numbers, `[re, im]` pairs or
/// literal strings) or a comma-separated list of literals.
pub fn parse_vector(text: &str) -> Parsed<Vec<Complex64>> {
    let t = unquote(text)?;
    let t = t.as_str();
    if t.starts_with('[') {
        match json(t)? {
            Value::Array(items) => items.iter().map(complex_from_json).collect(),
            _ => Err(bad("expected an array")),
        }
    } else {
        t.split(',').map(parse_complex).collect()
    }
}

/// Complex symmetric matrix: `{"re": .., "im": ..}`, a JSON array of rows of
/// complex entries, or a single complex literal for `g = 1`.
pub fn parse_sym(text: &str) -> Parsed<SymMatC> {
    let t = unquote(text)?;
    let t = t.as_str();
    if t.starts_with('{') {
        let m: MatrixJson = serde_json::from_str(t).map_err(|e| bad(format!("invalid matrix JSON: {e}")))?;
        return m.to_sym().map_err(CliError::Domain);
    }
    let rows: Vec<Vec<Complex64>> = if t.starts_with('[') {
        match json(t)? {
            Value::Array(rows) => rows
                .iter()
                .map(|r| match r {
                    Value::Array(items) => items.iter().map(complex_from_json).collect(),
                    _ => Err(bad("matrix rows must be arrays")),
                })
                .collect::<Parsed<_>>()?,
            _ => return Err(bad("expected an array of rows")),
        }
    } else {
        vec![vec![parse_complex(t)?]]
    };
    let g = rows.len();
    if rows.iter().any(|r| r.len() != g) {
        return Err(bad("matrix must be square"));
    }
    let part = |f: fn(&Complex64) -> f64| rows.iter().map(|r| r.iter().map(f).collect()).collect::<Vec<Vec<f64>>>();
    let re = SymMatR::from_rows(&part(|c| c.re)).map_err(CliError::Domain)?;
    let im = SymMatR::from_rows(&part(|c| c.im)).map_err(CliError::Domain)?;
    SymMatC::new(re, im).map_err(CliError::Domain)
}

/// Polarization type as `[1,2]` or `1,2`.
pub fn parse_polarization(text: &str) -> Parsed<PolarizationType> {
    let t = text.trim().trim_start_matches('[').trim_end_matches(']');
    let entries = t
        .split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|_| bad(format!("bad polarization entry {x:?}"))))
        .collect::<Parsed<Vec<u64>>>()?;
    PolarizationType::new(entries).map_err(CliError::Domain)
}

/// Real vector as `[0.5, 0]`, `1/2,0` or a JSON array of numbers and
/// fraction strings.
pub fn parse_reals(text: &str) -> Parsed<Vec<f64>> {
    let t = text.trim();
    if t.starts_with('[') {
        if let Ok(Value::Array(items)) = serde_json::from_str::<Value>(t) {
            return items
                .iter()
                .map(|v| match v {
                    Value::Number(n) => n.as_f64().ok_or_else(|| bad("bad number")),
                    Value::String(s) => parse_real(s),
                    _ => Err(bad(format!("bad real entry {v}"))),
                })
                .collect();
        }
    }
    t.trim_start_matches('[').trim_end_matches(']').split(',').map(parse_real).collect()
}

pub fn parse_rational(text: &str) -> Parsed<Ratio<i64>> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad(format!("bad rational {t:?}")))?;
        let d: i64 = d.trim().parse().map_err(|_| bad(format!("bad rational {t:?}")))?;
        if d == 0 {
            return Err(bad("zero denominator"));
        }
        return Ok(Ratio::new(n, d));
    }
    if let Ok(n) = t.parse::<i64>() {
        return Ok(Ratio::from_integer(n));
    }
    let x = parse_real(t)?;
    Ratio::approximate_float(x).ok_or_else(|| bad(format!("{t:?} has no rational approximation")))
}

pub fn parse_symplectic(text: &str) -> Parsed<siegel_theta::symplectic::SymplecticMatrix> {
    let t = text.trim();
    let spec: SymplecticJson = if t.starts_with('{') {
        serde_json::from_str(t).map_err(|e| bad(format!("invalid matrix JSON: {e}")))?
    } else {
        let rows: Vec<Vec<i64>> = serde_json::from_str(t).map_err(|e| bad(format!("invalid matrix JSON: {e}")))?;
        SymplecticJson { g: None, m: Some(rows), num: None, den: None }
    };
    spec.to_matrix().map_err(CliError::Domain)
}

pub fn parse_int_rows(text: &str) -> Parsed<Vec<Vec<i64>>> {
    serde_json::from_str(text.trim()).map_err(|e| bad(format!("invalid integer matrix: {e}")))
}
