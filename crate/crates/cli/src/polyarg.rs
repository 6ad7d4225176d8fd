//! Polynomial arguments: the canonical literal `q=25;[[1,0],[0,1]]`, a bare
//! coefficient list `[c0,c1,...]` over the given field, or a short expression
//! in `T` with integer coefficients such as `T^2+3T+1` or `1`.

use cubic_core::{Error, FieldSpec, Poly};

pub fn parse_poly(field: &FieldSpec, s: &str) -> Result<Poly, Error> {
    let s = s.trim();
    if s.contains(';') {
        return Poly::parse_literal(field, s);
    }
    if s.starts_with('[') {
        return Poly::parse_literal(field, &format!("q={};{s}", field.q()));
    }
    parse_expression(field, s)
}

fn parse_expression(field: &FieldSpec, s: &str) -> Result<Poly, Error> {
    let bad = |m: &str| Error::Parse(format!("malformed polynomial {s:?}: {m}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty"));
    }
    let mut coeffs: Vec<i64> = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1, &rest[1..]),
            b'-' => (-1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let (term, tail) = body.split_at(end);
        if term.is_empty() {
            return Err(bad("empty term"));
        }
        let (coef, power) = parse_term(term).ok_or_else(|| bad("unrecognised term"))?;
        if coeffs.len() <= power {
            coeffs.resize(power + 1, 0);
        }
        coeffs[power] += sign * coef;
        rest = tail;
    }
    let elems = coeffs.iter().map(|&c| field.from_int(c)).collect();
    Ok(Poly::new(field, elems))
}

/// `c`, `cT`, `c*T^k`, `T^k` as (c, k).
fn parse_term(term: &str) -> Option<(i64, usize)> {
    let Some(at) = term.find(['T', 't']) else {
        return Some((term.parse().ok()?, 0));
    };
    let head = term[..at].trim_end_matches('*');
    let coef = if head.is_empty() { 1 } else { head.parse().ok()? };
    let tail = &term[at + 1..];
    let power = if tail.is_empty() { 1 } else { tail.strip_prefix('^')?.parse().ok()? };
    Some((coef, power))
}
