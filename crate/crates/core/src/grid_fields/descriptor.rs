//! Descriptor strings for generators, e.g. `weierstrass:H=0.7,scales=12,base=2`.
//!
//! Functions: `id`, `t`, `sin`, `cos`, `const:c=..`, `affine:c0=..,c1=..`,
//! `pow:mu=..,shift=..`, `poly:c=c0/c1/..`, `weierstrass:H=..,scales=..[,base=..][,phases=p0/p1/..]`,
//! and `c*f` or `c*(f)` for a multiple of a function.
//! Fields: `+`-separated terms, each `[coef*]g[*h]`; a lone factor is an
//! x-independent term `g(t)`. Paths and fields may also name a `.csv` or `.json` file.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use super::field::{make_product_field, GridField, SharedField, SumField};
use super::func::{Elementary, Scaled, SharedFn};
use super::io;
use super::weierstrass::Weierstrass;
use crate::{Error, Result};

fn bad(msg: impl Into<String>) -> Error {
    Error::Descriptor(msg.into())
}

fn parse_num(key: &str, v: &str) -> Result<f64> {
    v.trim().parse::<f64>().map_err(|_| bad(format!("`{key}={v}` is not a number")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split('/').map(|p| parse_num(key, p)).collect()
}

fn parse_params(name: &str, rest: &str, allowed: &[&str]) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    if rest.trim().is_empty() {
        return Ok(out);
    }
    for kv in rest.split(',') {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("`{kv}` in `{name}` is not key=value")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(bad(format!("unknown key `{k}` for `{name}` (expected one of {allowed:?})")));
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(bad(format!("duplicate key `{k}` in `{name}`")));
        }
    }
    Ok(out)
}

fn get(params: &BTreeMap<String, String>, key: &str, default: Option<f64>) -> Result<f64> {
    match params.get(key) {
        Some(v) => parse_num(key, v),
        None => default.ok_or_else(|| bad(format!("missing key `{key}`"))),
    }
}

/// Parses a closed-form one-variable function.
pub fn parse_function(desc: &str) -> Result<SharedFn> {
    let desc = desc.trim();
    if let Some((c, rest)) = desc.split_once('*') {
        if let Ok(factor) = c.trim().parse::<f64>() {
            let rest = rest.trim();
            let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(rest);
            return Ok(Arc::new(Scaled { factor, inner: parse_function(inner)? }));
        }
    }
    let (name, rest) = desc.split_once(':').unwrap_or((desc, ""));
    let f: SharedFn = match name.trim() {
        "id" | "t" | "x" if rest.is_empty() => Elementary::identity().shared(),
        "sin" if rest.is_empty() => Elementary::Sin.shared(),
        "cos" if rest.is_empty() => Elementary::Cos.shared(),
        "const" => {
            let p = parse_params(name, rest, &["c"])?;
            Elementary::Const(get(&p, "c", None)?).shared()
        }
        "affine" => {
            let p = parse_params(name, rest, &["c0", "c1"])?;
            Elementary::Affine { c0: get(&p, "c0", Some(0.0))?, c1: get(&p, "c1", Some(1.0))? }.shared()
        }
        "pow" => {
            let p = parse_params(name, rest, &["mu", "shift"])?;
            let mu = get(&p, "mu", None)?;
            if !(mu > 0.0) {
                return Err(bad(format!("pow exponent {mu} must be positive")));
            }
            Elementary::Power { mu, shift: get(&p, "shift", Some(0.0))? }.shared()
        }
        "poly" => {
            let p = parse_params(name, rest, &["c"])?;
            let c = parse_list("c", p.get("c").ok_or_else(|| bad("missing key `c`"))?)?;
            Elementary::Poly(c).shared()
        }
        "weierstrass" => {
            let p = parse_params(name, rest, &["H", "scales", "base", "phases"])?;
            let h = get(&p, "H", None)?;
            let scales = get(&p, "scales", Some(12.0))?;
            if scales.fract() != 0.0 || scales < 1.0 {
                return Err(bad(format!("scales = {scales} must be a positive integer")));
            }
            let base = get(&p, "base", Some(2.0))?;
            let phases = match p.get("phases") {
                Some(v) => parse_list("phases", v)?,
                None => Vec::new(),
            };
            Arc::new(Weierstrass::new(h, scales as usize, base, &phases)?)
        }
        other => return Err(bad(format!("unknown function `{other}` in `{desc}`"))),
    };
    Ok(f)
}

/// Splits on `sep` outside of exponent notation such as `1e+3`.
fn split_terms(desc: &str, sep: char) -> Vec<&str> {
    let bytes = desc.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in desc.char_indices() {
        if ch == sep {
            let after_exp = i > 0 && matches!(bytes[i - 1], b'e' | b'E') && i > 1 && bytes[i - 2].is_ascii_digit();
            if !after_exp {
                out.push(&desc[start..i]);
                start = i + 1;
            }
        }
    }
    out.push(&desc[start..]);
    out
}

/// Parses a field descriptor or loads a `.json` grid file.
pub fn parse_field(desc: &str) -> Result<SharedField> {
    let desc = desc.trim();
    if desc.ends_with(".json") {
        let g = io::read_grid_json(Path::new(desc))?;
        return Ok(Arc::new(g));
    }
    let mut parts: Vec<(f64, SharedField)> = Vec::new();
    for term in split_terms(desc, '+') {
        let mut factors: Vec<&str> = term.split('*').map(str::trim).collect();
        if factors.iter().any(|f| f.is_empty()) {
            return Err(bad(format!("empty factor in field term `{term}`")));
        }
        let mut coef = 1.0;
        if factors.len() > 1 {
            if let Ok(c) = factors[0].parse::<f64>() {
                coef = c;
                factors.remove(0);
            }
        }
        let (g, h) = match factors.as_slice() {
            [g] => (parse_function(g)?, Elementary::Const(1.0).shared()),
            [g, h] => (parse_function(g)?, parse_function(h)?),
            _ => return Err(bad(format!("field term `{term}` must be g or g*h"))),
        };
        parts.push((coef, Arc::new(make_product_field(g, h))));
    }
    if parts.len() == 1 && parts[0].0 == 1.0 {
        return Ok(parts.pop().unwrap().1);
    }
    Ok(Arc::new(SumField::new(parts)))
}

/// Parses a path descriptor or loads a `t,value` CSV file.
pub fn parse_path(desc: &str) -> Result<SharedFn> {
    let desc = desc.trim();
    if desc.ends_with(".csv") {
        return Ok(Arc::new(io::read_path_csv(Path::new(desc))?));
    }
    parse_function(desc)
}

/// Grid fields are loaded with their own sampling, so a sampled path is returned as is.
pub fn load_field_grid(desc: &str) -> Result<Option<GridField>> {
    if desc.trim().ends_with(".json") {
        return Ok(Some(io::read_grid_json(Path::new(desc.trim()))?));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_functions() {
        assert_eq!(parse_function("id").unwrap().value(0.3), 0.3);
        assert_eq!(parse_function("const:c=2.5").unwrap().value(9.0), 2.5);
        assert_eq!(parse_function("poly:c=1/0/2").unwrap().value(2.0), 9.0);
        assert_eq!(parse_function("affine:c0=1,c1=-2").unwrap().value(1.0), -1.0);
        assert!((parse_function("pow:mu=0.5").unwrap().value(0.25) - 0.5).abs() < 1e-15);
        let w = parse_function("weierstrass:H=0.5,scales=2,base=2").unwrap();
        assert!((w.value(0.0) - (1.0 + 2f64.powf(-0.5))).abs() < 1e-15);
        let w = parse_function("weierstrass:H=0.7,scales=12,phases=0.1/0.2").unwrap();
        assert!(w.value(0.0).is_finite());
        let half = parse_function("0.5*(weierstrass:H=0.7,scales=12,phases=0.1/0.2)").unwrap();
        assert_eq!(half.value(0.3), 0.5 * w.value(0.3));
        assert_eq!(parse_function(&half.describe()).unwrap().value(0.7), half.value(0.7));
        assert_eq!(parse_function("-2*sin").unwrap().value(1.0), -2.0 * 1f64.sin());
    }

    #[test]
    fn rejects_malformed_descriptors() {
        for d in ["foo", "const", "const:c=abc", "weierstrass:H=1.5", "pow:mu=0.5,k=1", "sin:x=1",
                  "weierstrass:H=0.5,scales=2.5"] {
            assert!(matches!(parse_function(d), Err(Error::Descriptor(_) | Error::Argument(_))), "{d}");
        }
        assert!(parse_field("sin**id").is_err());
        assert!(parse_field("sin*id*cos").is_err());
    }

    #[test]
    fn parses_fields() {
        let w = parse_field("sin*id").unwrap();
        assert!((w.eval(0.5, 2.0) - 2.0 * 0.5f64.sin()).abs() < 1e-15);
        let w = parse_field("sin").unwrap();
        assert_eq!(w.increment_rect(0.1, 0.5, 0.0, 3.0), 0.0);
        let w = parse_field("2*id*id + cos").unwrap();
        assert!((w.eval(0.5, 3.0) - (3.0 + 0.5f64.cos())).abs() < 1e-15);
        assert_eq!(w.separable().unwrap().len(), 2);
        let w = parse_field("1e+0*id*id").unwrap();
        assert_eq!(w.eval(2.0, 3.0), 6.0);
    }
}
