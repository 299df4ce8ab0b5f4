//! Text syntax shared by constraints, objectives and the proof format.
//!
//! ```text
//! constraint:  [+|-]<int> <lit> ... >= <int> ;
//! objective:   min: [+|-]<int> <lit> ... [+|-]<int] ;
//! literal:     x<i> | ~x<i> | _b<j> | ~_b<j> | _t<i> | ~_t<i>
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::{LinearConstraint, Lit, Namespace, Objective, PbError, Var};

fn err(msg: impl Into<String>) -> PbError {
    PbError::Parse(msg.into())
}

pub fn parse_var(tok: &str) -> Result<Var, PbError> {
    let (ns, digits) = if let Some(rest) = tok.strip_prefix("_b") {
        (Namespace::Fresh, rest)
    } else if let Some(rest) = tok.strip_prefix("_t") {
        (Namespace::Temp, rest)
    } else if let Some(rest) = tok.strip_prefix('x') {
        (Namespace::User, rest)
    } else {
        return Err(err(format!("not a variable: `{tok}`")));
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err(format!("not a variable: `{tok}`")));
    }
    let index: u32 = digits.parse().map_err(|_| err(format!("variable index out of range: `{tok}`")))?;
    if index == 0 {
        return Err(err(format!("variable index must be positive: `{tok}`")));
    }
    Ok(Var::new(ns, index))
}

pub fn parse_lit(tok: &str) -> Result<Lit, PbError> {
    match tok.strip_prefix('~') {
        Some(rest) => Ok(parse_var(rest)?.neg()),
        None => Ok(parse_var(tok)?.pos()),
    }
}

pub fn is_int(tok: &str) -> bool {
    let digits = tok.strip_prefix(['+', '-']).unwrap_or(tok);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

pub fn parse_int(tok: &str) -> Result<BigInt, PbError> {
    if !is_int(tok) {
        return Err(err(format!("expected an integer, found `{tok}`")));
    }
    let digits = tok.strip_prefix('+').unwrap_or(tok);
    digits.parse().map_err(|_| err(format!("bad integer `{tok}`")))
}

/// Parses `coef lit ... >= deg ;` from the front of `toks`.
/// Returns the constraint and the number of tokens consumed.
pub fn parse_constraint_tokens(toks: &[&str]) -> Result<(LinearConstraint, usize), PbError> {
    let mut raw = Vec::new();
    let mut i = 0;
    loop {
        match toks.get(i) {
            None => return Err(err("unterminated constraint, expected `>=`")),
            Some(&">=") => break,
            Some(t) => {
                let c = parse_int(t)?;
                let l = toks.get(i + 1).ok_or_else(|| err("coefficient without literal"))?;
                raw.push((c, parse_lit(l)?));
                i += 2;
            }
        }
    }
    let deg = parse_int(toks.get(i + 1).ok_or_else(|| err("missing degree"))?)?;
    match toks.get(i + 2) {
        Some(&";") => Ok((LinearConstraint::normalize(raw, deg), i + 3)),
        _ => Err(err("constraint must end with `;`")),
    }
}

pub fn parse_constraint(s: &str) -> Result<LinearConstraint, PbError> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    let (c, used) = parse_constraint_tokens(&toks)?;
    if used != toks.len() {
        return Err(err("trailing tokens after constraint"));
    }
    Ok(c)
}

/// Raw signed terms with an optional trailing constant, terminated by `;`.
pub type SignedTerms = (Vec<(BigInt, Lit)>, BigInt);

pub fn parse_signed_terms_tokens(toks: &[&str]) -> Result<(SignedTerms, usize), PbError> {
    let mut raw = Vec::new();
    let mut constant = BigInt::zero();
    let mut i = 0;
    loop {
        match toks.get(i) {
            None => return Err(err("terms must end with `;`")),
            Some(&";") => return Ok(((raw, constant), i + 1)),
            Some(t) => {
                let c = parse_int(t)?;
                match toks.get(i + 1) {
                    Some(&";") => {
                        constant += c;
                        i += 1;
                    }
                    Some(l) => {
                        raw.push((c, parse_lit(l)?));
                        i += 2;
                    }
                    None => return Err(err("terms must end with `;`")),
                }
            }
        }
    }
}

pub fn parse_objective(s: &str) -> Result<Objective, PbError> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    let rest = match toks.first() {
        Some(&"min:") => &toks[1..],
        _ => return Err(err("objective must start with `min:`")),
    };
    let ((raw, constant), used) = parse_signed_terms_tokens(rest)?;
    if used != rest.len() {
        return Err(err("trailing tokens after objective"));
    }
    Ok(Objective::new(raw, constant))
}

fn signed(c: &BigInt) -> String {
    if c.is_negative() {
        c.to_string()
    } else {
        format!("+{c}")
    }
}

/// Writes `+c lit ... +k` (constant omitted when zero), without the `;`.
pub fn write_signed_terms<'a, I>(f: &mut dyn fmt::Write, terms: I, constant: &BigInt) -> fmt::Result
where
    I: IntoIterator<Item = (&'a BigInt, Lit)>,
{
    let mut first = true;
    for (c, l) in terms {
        if !first {
            f.write_char(' ')?;
        }
        first = false;
        write!(f, "{} {}", signed(c), l)?;
    }
    if !constant.is_zero() {
        if !first {
            f.write_char(' ')?;
        }
        f.write_str(&signed(constant))?;
    }
    Ok(())
}

pub fn signed_terms_string(terms: &[(BigInt, Lit)], constant: &BigInt) -> String {
    let mut s = String::new();
    write_signed_terms(&mut s, terms.iter().map(|(c, l)| (c, *l)), constant).expect("writing to a String");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_lit("~_b2").unwrap(), Var::fresh(2).neg());
        assert_eq!(parse_lit("x10").unwrap(), Var::user(10).pos());
        assert_eq!(parse_lit("_t1").unwrap(), Var::temp(1).pos());
        for bad in ["x0", "y1", "x", "~", "x1a", "_c3"] {
            assert!(parse_lit(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn constraint_round_trip() {
        let c = parse_constraint("1 x3 +1 _b1 -1 x5 >= 0 ;").unwrap();
        assert_eq!(c.to_string(), "1 x3 1 ~x5 1 _b1 >= 1 ;");
        assert_eq!(parse_constraint(&c.to_string()).unwrap(), c);
        assert!(parse_constraint("1 x1 >= 1").is_err());
        assert!(parse_constraint("1 x1 1 >= 1 ;").is_err());
    }

    #[test]
    fn objective_syntax() {
        let o = parse_objective("min: +1 x1 +2 _b1 +3 _b2 ;").unwrap();
        assert_eq!(o.to_string(), "min: +1 x1 +2 _b1 +3 _b2 ;");
        let o = parse_objective("min: 2 ~x1 -1 ;").unwrap();
        assert_eq!(o, Objective::from_small(&[(-2, Var::user(1).pos())], 1));
    }

    #[test]
    fn signed_terms() {
        let toks: Vec<&str> = "-1 x1 +1 ;".split_whitespace().collect();
        let ((raw, k), used) = parse_signed_terms_tokens(&toks).unwrap();
        assert_eq!(used, 4);
        assert_eq!(signed_terms_string(&raw, &k), "-1 x1 +1");
    }
}
