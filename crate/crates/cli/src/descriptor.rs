//! Tower, series-ring and extension descriptors.
//!
//! ```text
//! tower     := base ('((' NAME '))')* ('P=' INT)?
//! base      := 'GF(' q ')' | 'Frac GF(' q ')[' NAME (',' NAME)* ']'
//! ring      := 'GF(' q ')' ('[[' NAME (',' NAME)* ']]')+ ('D=' INT)?
//! extension := NAME '^' p '=' NAME | NAME ':' polynomial
//! ```
//!
//! In a ring descriptor the last name of the last group is the distinguished
//! variable `T`, the other names of the last group are the `X` variables and
//! earlier groups hold the coefficient variables.

use crate::error::{CliError, CliResult};
use crate::eval::parse_tower_polynomial;
use cartier_core::gf::prime_power;
use cartier_core::{BaseDescriptor, EtaleExtension, ExtensionDescriptor, FieldTower, GaloisField, RadicialExtension, SeriesRing};
use std::sync::Arc;

pub const DEFAULT_PRECISION: i64 = 16;
pub const DEFAULT_TRUNCATION: u32 = 16;

fn bad(what: &str, src: &str, why: impl std::fmt::Display) -> CliError {
    CliError::usage(format!("invalid {what} \"{src}\": {why}"))
}

/// Splits a trailing `KEY=N` setting off a descriptor.
fn split_setting<'a>(src: &'a str, key: &str) -> CliResult<(&'a str, Option<i64>)> {
    let s = src.trim();
    match s.rsplit_once(char::is_whitespace) {
        Some((head, last)) if last.starts_with(key) && last[key.len()..].starts_with('=') => {
            let n = last[key.len() + 1..].parse::<i64>().map_err(|e| bad("setting", last, e))?;
            Ok((head.trim_end(), Some(n)))
        }
        _ => Ok((s, None)),
    }
}

/// `GF(q)` at the start of `s`: the order and the rest.
fn finite_field(s: &str) -> Option<(u64, &str)> {
    let rest = s.strip_prefix("GF(")?;
    let (q, rest) = rest.split_once(')')?;
    Some((q.trim().parse().ok()?, rest))
}

fn names(list: &str) -> Vec<String> {
    list.split(',').map(|n| n.trim().to_string()).collect()
}

fn valid_name(n: &str) -> bool {
    let mut chars = n.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a tower descriptor; `precision` overrides a `P=N` setting.
pub fn parse_tower(src: &str, precision: Option<i64>) -> CliResult<Arc<FieldTower>> {
    let err = |why: &str| bad("tower", src, why);
    let (s, p_setting) = split_setting(src, "P")?;
    let prec = precision.or(p_setting).unwrap_or(DEFAULT_PRECISION);
    let (base, mut rest) = if let Some(r) = s.strip_prefix("Frac") {
        let (q, r) = finite_field(r.trim_start()).ok_or_else(|| err("expected GF(q) after Frac"))?;
        let r = r.trim_start().strip_prefix('[').ok_or_else(|| err("expected [variables]"))?;
        let (vars, r) = r.split_once(']').ok_or_else(|| err("unclosed ["))?;
        (BaseDescriptor::RationalFunctions { order: q, variables: names(vars) }, r)
    } else {
        let (q, r) = finite_field(s).ok_or_else(|| err("expected GF(q) or Frac GF(q)[...]"))?;
        (BaseDescriptor::FiniteField { order: q, modulus: None }, r)
    };
    let q = match &base {
        BaseDescriptor::FiniteField { order, .. } | BaseDescriptor::RationalFunctions { order, .. } => *order,
    };
    let (p, _) = prime_power(q).ok_or_else(|| err("the field order is not a prime power"))?;
    let mut laurent = Vec::new();
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let r = rest.strip_prefix("((").ok_or_else(|| err("expected ((name))"))?;
        let (name, r) = r.split_once("))").ok_or_else(|| err("unclosed (("))?;
        laurent.push(name.trim().to_string());
        rest = r;
    }
    if let BaseDescriptor::RationalFunctions { variables, .. } = &base {
        if let Some(v) = variables.iter().find(|v| !valid_name(v)) {
            return Err(err(&format!("bad variable name '{v}'")));
        }
    }
    if let Some(v) = laurent.iter().find(|v| !valid_name(v)) {
        return Err(err(&format!("bad variable name '{v}'")));
    }
    FieldTower::new(p, base, laurent, prec).map_err(|e| bad("tower", src, e))
}

/// Parses a series-ring descriptor; `truncation` overrides a `D=N` setting.
pub fn parse_ring(src: &str, truncation: Option<u32>) -> CliResult<Arc<SeriesRing>> {
    let err = |why: &str| bad("ring", src, why);
    let (s, d_setting) = split_setting(src, "D")?;
    let d_setting = d_setting.map(|d| u32::try_from(d).map_err(|_| err("D must be positive"))).transpose()?;
    let d = truncation.or(d_setting).unwrap_or(DEFAULT_TRUNCATION);
    let (q, mut rest) = finite_field(s).ok_or_else(|| err("expected GF(q)"))?;
    let mut groups = Vec::new();
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let r = rest.strip_prefix("[[").ok_or_else(|| err("expected [[names]]"))?;
        let (list, r) = r.split_once("]]").ok_or_else(|| err("unclosed [["))?;
        groups.push(names(list));
        rest = r;
    }
    let mut last = groups.pop().ok_or_else(|| err("expected at least one [[T]] group"))?;
    let t = last.pop().ok_or_else(|| err("empty variable group"))?;
    let coefficient: Vec<String> = groups.into_iter().flatten().collect();
    if let Some(v) = coefficient.iter().chain(&last).chain([&t]).find(|v| !valid_name(v)) {
        return Err(err(&format!("bad variable name '{v}'")));
    }
    let field = GaloisField::with_order(q).map_err(|e| bad("ring", src, e))?;
    SeriesRing::new(field, coefficient, last, &t, d).map_err(|e| bad("ring", src, e))
}

/// `a^p = b` (radicial) or `y: f(y)` (etale) over `base`.
pub fn parse_extension(base: &Arc<FieldTower>, src: &str) -> CliResult<ExtensionDescriptor> {
    let err = |why: &str| bad("extension", src, why);
    if let Some((name, poly)) = src.split_once(':') {
        let name = name.trim();
        if !valid_name(name) {
            return Err(err("expected a generator name before ':'"));
        }
        let modulus = parse_tower_polynomial(base, name, poly)?;
        let ext = EtaleExtension::new(base, name, modulus).map_err(|e| bad("extension", src, e))?;
        return Ok(ExtensionDescriptor::Etale(ext));
    }
    let (lhs, b) = src.split_once('=').ok_or_else(|| err("expected 'a^p = b' or 'y: polynomial'"))?;
    let (a, e) = lhs.split_once('^').ok_or_else(|| err("expected 'a^p = b'"))?;
    let (a, b) = (a.trim(), b.trim());
    let e: u32 = e.trim().parse().map_err(|_| err("expected an integer exponent"))?;
    if e != base.characteristic() {
        return Err(err(&format!("the exponent must be the characteristic {}", base.characteristic())));
    }
    if !valid_name(a) {
        return Err(err(&format!("bad variable name '{a}'")));
    }
    let r = RadicialExtension::new(base, b, a).map_err(|e| bad("extension", src, e))?;
    Ok(ExtensionDescriptor::Radicial(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn towers() {
        let t = parse_tower("GF(4)((t1))((t2)) P=10", None).unwrap();
        assert_eq!(t.descriptor(), "GF(4)((t1))((t2))");
        assert_eq!(t.default_precision(), 10);
        assert_eq!(t.p_rank(), 2);
        let t = parse_tower("Frac GF(3)[b1, b2]((t))", Some(7)).unwrap();
        assert_eq!(t.descriptor(), "Frac GF(3)[b1,b2]((t))");
        assert_eq!(t.default_precision(), 7);
        assert_eq!(t.p_rank(), 3);
        assert!(parse_tower("GF(6)", None).is_err());
        assert!(parse_tower("GF(4)((t)", None).is_err());
        assert!(parse_tower("Frac GF(2)[b]((b))", None).is_err());
    }

    #[test]
    fn rings() {
        let r = parse_ring("GF(5)[[u]][[X,T]] D=12", None).unwrap();
        assert_eq!(r.descriptor(), "GF(5)[[u]][[X,T]] D=12");
        let r = parse_ring("GF(5)[[u]][[T]] D=12", None).unwrap();
        assert_eq!(r.coefficient_vars(), ["u".to_string()]);
        assert!(r.x_vars().is_empty());
        assert_eq!(r.t_var(), "T");
        let r = parse_ring("GF(2)[[t]]", Some(20)).unwrap();
        assert_eq!(r.truncation(), 20);
        assert!(parse_ring("GF(2)", None).is_err());
    }

    #[test]
    fn extensions() {
        let k = parse_tower("Frac GF(2)[b]", None).unwrap();
        let ExtensionDescriptor::Radicial(r) = parse_extension(&k, "a^2 = b").unwrap() else { panic!() };
        assert_eq!(r.upper().descriptor(), "Frac GF(2)[a]");
        assert!(parse_extension(&k, "a^3 = b").is_err());
        let ExtensionDescriptor::Etale(e) = parse_extension(&k, "y: y^2 + y + b").unwrap() else { panic!() };
        assert_eq!(e.degree(), 2);
        let f2 = parse_tower("GF(2)", None).unwrap();
        assert!(parse_extension(&f2, "y: y^2 + 1").is_err());
    }
}
