//! Text formats for maps, complex numbers and sphere points.
//!
//! A map is written `num=c0,c1,...;den=c0,c1,...` with ascending coefficients.
//! Each coefficient is a decimal complex literal such as `2`, `-1.5i`, `i` or
//! `3e-2-0.5i`. Whitespace is ignored everywhere.

use num_complex::Complex64;
use primecircle_core::{RationalMap, SpherePoint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("invalid complex literal `{0}`")]
    Complex(String),
    #[error("invalid point `{0}`; expected a complex literal or `inf`")]
    Point(String),
    #[error("invalid map section `{0}`; expected `num=...` or `den=...`")]
    Section(String),
    #[error("map section `{0}` given twice")]
    Duplicate(String),
    #[error("map is missing its `{0}` section")]
    Missing(&'static str),
    #[error("invalid coefficient `{token}` in `{section}`")]
    Coefficient { section: String, token: String },
    #[error("invalid integer list entry `{0}`")]
    Integer(String),
    #[error("invalid number list entry `{0}`")]
    Number(String),
    #[error(transparent)]
    Map(#[from] primecircle_core::Error),
}

fn strip(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn parse_real(s: &str) -> Option<f64> {
    // f64::from_str also takes "inf" and "NaN"
    if !s.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')) {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (with `i` standing for `1i`).
pub fn parse_complex(token: &str) -> Result<Complex64, ParseError> {
    let s = strip(token);
    let err = || ParseError::Complex(token.trim().to_string());
    if s.is_empty() {
        return Err(err());
    }
    let Some(body) = s.strip_suffix('i') else {
        return parse_real(&s).map(|re| Complex64::new(re, 0.0)).ok_or_else(err);
    };
    let bytes = body.as_bytes();
    // split before the last sign that is not leading and not part of an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() { 0.0 } else { parse_real(re_part).ok_or_else(err)? };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_real(other).ok_or_else(err)?,
    };
    Ok(Complex64::new(re, im))
}

/// Shortest round-trip formatting, `a+bi` or `a-bi`, with `-0` printed as `0`.
pub fn format_complex(z: Complex64) -> String {
    let clean = |x: f64| if x == 0.0 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    let sign = if im < 0.0 { '-' } else { '+' };
    format!("{re}{sign}{}i", im.abs())
}

/// Parses a complex literal or `inf`.
pub fn parse_point(token: &str) -> Result<SpherePoint, ParseError> {
    let s = strip(token);
    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        return Ok(SpherePoint::INFINITY);
    }
    parse_complex(&s).map(SpherePoint::finite).map_err(|_| ParseError::Point(token.trim().to_string()))
}

pub fn format_point(p: &SpherePoint) -> String {
    match p.to_complex() {
        Some(z) => format_complex(z),
        None => "inf".to_string(),
    }
}

/// Coefficient lists of a map spec, before any validation of the map itself.
pub fn parse_coefficients(spec: &str) -> Result<(Vec<Complex64>, Vec<Complex64>), ParseError> {
    let s = strip(spec);
    let mut num = None;
    let mut den = None;
    for section in s.split(';').filter(|p| !p.is_empty()) {
        let (name, body) = section.split_once('=').ok_or_else(|| ParseError::Section(section.to_string()))?;
        let slot = match name {
            "num" => &mut num,
            "den" => &mut den,
            _ => return Err(ParseError::Section(section.to_string())),
        };
        if slot.is_some() {
            return Err(ParseError::Duplicate(name.to_string()));
        }
        let coeffs = body
            .split(',')
            .map(|t| {
                parse_complex(t).map_err(|_| ParseError::Coefficient {
                    section: name.to_string(),
                    token: t.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        *slot = Some(coeffs);
    }
    Ok((num.ok_or(ParseError::Missing("num"))?, den.ok_or(ParseError::Missing("den"))?))
}

pub fn parse_map(spec: &str) -> Result<RationalMap, ParseError> {
    let (num, den) = parse_coefficients(spec)?;
    Ok(RationalMap::new(&num, &den)?)
}

/// Canonical spec of a map: trimmed coefficients in shortest form.
pub fn format_map(map: &RationalMap) -> String {
    let list = |c: &[Complex64]| c.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(",");
    format!("num={};den={}", list(map.num()), list(map.den()))
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, ParseError> {
    strip(s)
        .split(',')
        .map(|t| t.parse::<usize>().map_err(|_| ParseError::Integer(t.to_string())))
        .collect()
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, ParseError> {
    strip(s)
        .split(',')
        .map(|t| parse_real(t).ok_or_else(|| ParseError::Number(t.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        let cases = [
            ("2", c(2.0, 0.0)),
            ("-1.5", c(-1.5, 0.0)),
            ("i", c(0.0, 1.0)),
            ("-i", c(0.0, -1.0)),
            ("+i", c(0.0, 1.0)),
            ("2i", c(0.0, 2.0)),
            ("1+i", c(1.0, 1.0)),
            ("1-2i", c(1.0, -2.0)),
            (" 0.5 + 0.25 i ", c(0.5, 0.25)),
            ("3e-2-5E+1i", c(0.03, -50.0)),
            ("-1e3+1e-3i", c(-1000.0, 0.001)),
            ("1e2i", c(0.0, 100.0)),
        ];
        for (text, want) in cases {
            assert_eq!(parse_complex(text).unwrap(), want, "{text}");
        }
        for bad in ["", "x", "1+", "1+2", "1+2j", "inf", "nan", "1..2", "i2", "--1"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn complex_round_trip() {
        for z in [c(1.0, 0.0), c(-0.0, -0.0), c(0.1, -0.3), c(1e-20, 3e15), c(-2.5, 1.0 / 3.0)] {
            let text = format_complex(z);
            assert_eq!(parse_complex(&text).unwrap(), c(z.re + 0.0, z.im + 0.0), "{text}");
        }
        assert_eq!(format_complex(c(-0.0, -0.0)), "0+0i");
        assert_eq!(format_complex(c(0.5, -0.25)), "0.5-0.25i");
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("inf").unwrap(), SpherePoint::INFINITY);
        assert_eq!(parse_point("INF").unwrap(), SpherePoint::INFINITY);
        assert_eq!(parse_point("1+i").unwrap(), SpherePoint::finite(c(1.0, 1.0)));
        assert_eq!(parse_point("nope"), Err(ParseError::Point("nope".into())));
        assert_eq!(format_point(&SpherePoint::INFINITY), "inf");
        assert_eq!(format_point(&SpherePoint::finite(c(0.0, -1.0))), "0-1i");
    }

    #[test]
    fn maps() {
        let m = parse_map("num=-1,0,1;den=1").unwrap();
        assert_eq!(m.degree(), 2);
        assert_eq!(format_map(&m), "num=-1+0i,0+0i,1+0i;den=1+0i");
        assert_eq!(parse_map(&format_map(&m)).unwrap(), m);
        let m = parse_map(" den = 1 ; num = 0, 0, 2i ").unwrap();
        assert_eq!(m.num()[2], c(0.0, 2.0));
        assert!(matches!(parse_map("num=1;den=1"), Err(ParseError::Map(primecircle_core::Error::Degree(0)))));
    }

    #[test]
    fn map_errors_cite_the_token() {
        let err = parse_map("num=1,2x,3;den=1").unwrap_err();
        assert_eq!(err, ParseError::Coefficient { section: "num".into(), token: "2x".into() });
        assert!(err.to_string().contains("`2x`"));
        assert_eq!(parse_map("num=1,0,1"), Err(ParseError::Missing("den")));
        assert_eq!(parse_map("num=1;num=2;den=1"), Err(ParseError::Duplicate("num".into())));
        assert_eq!(parse_map("foo=1;den=1"), Err(ParseError::Section("foo=1".into())));
        assert_eq!(parse_map("num=1,,1;den=1").unwrap_err(), ParseError::Coefficient { section: "num".into(), token: "".into() });
    }

    #[test]
    fn lists() {
        assert_eq!(parse_usize_list("4, 8,12").unwrap(), vec![4, 8, 12]);
        assert_eq!(parse_f64_list("0.05,2e-2").unwrap(), vec![0.05, 0.02]);
        assert_eq!(parse_usize_list("4,x"), Err(ParseError::Integer("x".into())));
        assert_eq!(parse_f64_list("0.1,inf"), Err(ParseError::Number("inf".into())));
    }
}
