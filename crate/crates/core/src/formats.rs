//! Text formats: pmf and chain files, symbol strings, and 12-significant-digit
//! number formatting.

use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::sources::MarkovSource;

/// Significant digits used for every printed real.
pub const SIG_DIGITS: usize = 12;

/// `x` with [`SIG_DIGITS`] significant digits, trailing zeros dropped, in
/// the style of C's `%.12g`.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A probability given as a decimal or as an exact fraction `a/b`.
pub fn parse_prob(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a probability: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(a as f64 / b as f64);
    }
    let v: f64 = s.parse().map_err(|_| bad())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn json_prob(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("not a probability: {n}"))),
        Value::String(s) => parse_prob(s),
        other => Err(Error::Parse(format!("not a probability: {other}"))),
    }
}

fn json_vec(v: &Value) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an array of probabilities".into()))?
        .iter()
        .map(json_prob)
        .collect()
}

/// A pmf from either `{"p": [...]}` JSON (entries numbers or `"a/b"` strings),
/// a bare JSON array, or whitespace/comma separated entries.
pub fn parse_pmf(text: &str) -> Result<Pmf> {
    let trimmed = text.trim();
    let raw = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        match v.get("p") {
            Some(p) => json_vec(p)?,
            None => json_vec(&v)?,
        }
    } else {
        trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(parse_prob)
            .collect::<Result<Vec<f64>>>()?
    };
    Pmf::new(&raw, false)
}

#[derive(Deserialize)]
struct MarkovFile {
    mu: Value,
    #[serde(rename = "P")]
    trans: Vec<Value>,
}

/// A chain from `{"mu": [...], "P": [[...], ...]}` JSON.
pub fn parse_markov(text: &str) -> Result<MarkovSource> {
    let f: MarkovFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mu = Pmf::new(&json_vec(&f.mu)?, false)?;
    let trans = f.trans.iter().map(json_vec).collect::<Result<Vec<_>>>()?;
    MarkovSource::new(mu, trans)
}

/// Symbols `0..m` written as comma/space separated integers, or, when
/// `m <= 10`, as a run of digits such as `0120`.
pub fn parse_string(s: &str, m: usize) -> Result<Vec<usize>> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a symbol string: {s:?}"));
    let x: Vec<usize> = if s.contains([',', ' ']) {
        s.split([',', ' '])
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    } else if m <= 10 {
        s.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
            .collect::<Result<_>>()?
    } else {
        vec![s.parse().map_err(|_| bad())?]
    };
    if x.is_empty() {
        return Err(Error::EmptyString);
    }
    if let Some(&symbol) = x.iter().find(|&&a| a >= m) {
        return Err(Error::SymbolOutOfRange { symbol, m });
    }
    Ok(x)
}

/// Inverse of [`parse_string`].
pub fn format_string(x: &[usize], m: usize) -> String {
    if m <= 10 {
        x.iter().map(|a| char::from(b'0' + *a as u8)).collect()
    } else {
        x.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digits() {
        assert_eq!(fmt_sig(0.1), "0.1");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(0.10003137), "0.10003137");
        assert_eq!(fmt_sig(43200.0), "43200");
        assert_eq!(fmt_sig(1e-7), "1e-7");
        assert_eq!(fmt_sig(-2.5e20), "-2.5e20");
        assert_eq!(fmt_sig(0.0), "0");
        for x in [std::f64::consts::PI, 1.0 / 7.0, 123456.789, 9.99999999999999e-6] {
            let back: f64 = fmt_sig(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-11 * x.abs());
        }
    }

    #[test]
    fn pmf_inputs() {
        let p = parse_pmf(r#"{"p": ["3/4", 0.25]}"#).unwrap();
        assert_eq!(p.probs(), &[0.75, 0.25]);
        assert_eq!(parse_pmf("1/3 1/3\n1/3").unwrap().m(), 3);
        assert_eq!(parse_pmf("[0.5, 0.5]").unwrap().m(), 2);
        assert!(matches!(parse_pmf("0.5 0.4"), Err(Error::BadSum { .. })));
        assert!(matches!(parse_pmf("1/0 1"), Err(Error::Parse(_))));
    }

    #[test]
    fn markov_input() {
        let x = parse_markov(r#"{"mu": ["1/2", "1/2"], "P": [["3/4", "1/4"], [0.25, 0.75]]}"#).unwrap();
        assert!(x.is_symmetric());
        assert!(parse_markov(r#"{"mu": [1], "P": [[0.5, 0.5]]}"#).is_err());
    }

    #[test]
    fn strings() {
        assert_eq!(parse_string("0120", 3).unwrap(), vec![0, 1, 2, 0]);
        assert_eq!(parse_string("0, 11, 3", 12).unwrap(), vec![0, 11, 3]);
        assert_eq!(format_string(&[0, 11, 3], 12), "0,11,3");
        assert_eq!(format_string(&[1, 0], 2), "10");
        assert!(matches!(parse_string("03", 3), Err(Error::SymbolOutOfRange { .. })));
        assert!(matches!(parse_string("", 3), Err(Error::EmptyString)));
    }
}
