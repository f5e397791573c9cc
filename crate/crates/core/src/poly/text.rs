//! Textual form of rational polynomials.
//!
//! Canonical output writes every term as `num/den * x^a y^b ...` with all
//! variables listed, terms in descending order and joined by ` + `:
//!
//! ```text
//! 3/2 * T^1 s^0 c^0 v^2 w^0 + -1/1 * T^0 s^0 c^0 v^0 w^0
//! ```
//!
//! The parser accepts that form and the usual hand-written notation
//! (`x^2*y - 1/2`, implicit multiplication, unary signs).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::monomial::{Monomial, MonomialOrder};
use super::polynomial::Polynomial;
use crate::error::PolyError;
use crate::scalar::Rational;

pub fn to_text(p: &Polynomial<Rational>, var_names: &[&str], order: &MonomialOrder) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    p.sorted_terms(order)
        .iter()
        .map(|(m, c)| {
            let vars: Vec<String> = var_names
                .iter()
                .zip(m.exponents())
                .map(|(name, e)| format!("{name}^{e}"))
                .collect();
            format!("{}/{} * {}", c.numer(), c.denom(), vars.join(" "))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, PolyError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        match ch {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                out.push(Tok::Num(lit.parse().expect("digits")));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            _ => {
                return Err(PolyError::Parse {
                    fragment: chars[i..].iter().take(12).collect(),
                    reason: "unexpected character",
                })
            }
        }
    }
    Ok(out)
}

pub fn parse_polynomial(s: &str, var_names: &[&str]) -> Result<Polynomial<Rational>, PolyError> {
    let toks = tokenize(s)?;
    let n = var_names.len();
    let err = |pos: usize, reason: &'static str| PolyError::Parse {
        fragment: toks
            .get(pos)
            .map(|t| format!("{t:?}"))
            .unwrap_or_else(|| "<end>".into()),
        reason,
    };
    let mut p = Polynomial::zero(n);
    let mut pos = 0;
    if toks.is_empty() {
        return Err(err(0, "empty input"));
    }
    while pos < toks.len() {
        let mut negative = false;
        let mut saw_sign = false;
        while let Some(t @ (Tok::Plus | Tok::Minus)) = toks.get(pos) {
            negative ^= *t == Tok::Minus;
            saw_sign = true;
            pos += 1;
        }
        if pos > 0 && !saw_sign {
            return Err(err(pos, "expected `+` or `-` between terms"));
        }
        let mut coeff = Rational::one();
        let mut exps = vec![0u32; n];
        let mut factors = 0;
        loop {
            match toks.get(pos) {
                Some(Tok::Num(a)) => {
                    pos += 1;
                    let mut c = Rational::from_integer(a.clone());
                    if toks.get(pos) == Some(&Tok::Slash) {
                        pos += 1;
                        match toks.get(pos) {
                            Some(Tok::Num(d)) if !d.is_zero() => {
                                c /= Rational::from_integer(d.clone());
                                pos += 1;
                            }
                            _ => return Err(err(pos, "expected nonzero denominator")),
                        }
                    }
                    coeff *= c;
                }
                Some(Tok::Ident(name)) => {
                    let var = var_names
                        .iter()
                        .position(|v| v == name)
                        .ok_or_else(|| err(pos, "unknown variable"))?;
                    pos += 1;
                    let mut e = 1u32;
                    if toks.get(pos) == Some(&Tok::Caret) {
                        pos += 1;
                        match toks.get(pos) {
                            Some(Tok::Num(k)) => {
                                e = k.try_into().map_err(|_| err(pos, "exponent too large"))?;
                                pos += 1;
                            }
                            _ => return Err(err(pos, "expected exponent")),
                        }
                    }
                    exps[var] += e;
                }
                _ => return Err(err(pos, "expected coefficient or variable")),
            }
            factors += 1;
            match toks.get(pos) {
                Some(Tok::Star) => pos += 1,
                Some(Tok::Num(_) | Tok::Ident(_)) => {}
                _ => break,
            }
        }
        debug_assert!(factors > 0);
        if negative {
            coeff = -coeff;
        }
        p.add_term(Monomial::new(exps), coeff);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;
    use proptest::prelude::*;

    const VARS: [&str; 5] = ["T", "s", "c", "v", "w"];

    #[test]
    fn canonical_format() {
        let p = parse_polynomial("3/2*T v^2 - 1", &VARS).unwrap();
        let o = MonomialOrder::grevlex(5);
        assert_eq!(
            to_text(&p, &VARS, &o),
            "3/2 * T^1 s^0 c^0 v^2 w^0 + -1/1 * T^0 s^0 c^0 v^0 w^0"
        );
        assert_eq!(to_text(&Polynomial::zero(5), &VARS, &o), "0");
        assert!(parse_polynomial("0", &VARS).unwrap().is_zero());
    }

    #[test]
    fn parse_errors() {
        assert!(parse_polynomial("x + q", &["x"]).is_err());
        assert!(parse_polynomial("x^", &["x"]).is_err());
        assert!(parse_polynomial("1/0", &["x"]).is_err());
        assert!(parse_polynomial("", &["x"]).is_err());
        assert!(parse_polynomial("x $ 2", &["x"]).is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(terms in proptest::collection::vec((proptest::collection::vec(0u32..4, 5), -40i64..40, 1i64..9), 0..8)) {
            let p = Polynomial::from_terms(
                5,
                terms.into_iter().map(|(e, n, d)| (Monomial::new(e), Rational::from_ratio(n, d))),
            ).unwrap();
            let o = MonomialOrder::grevlex(5);
            let text = to_text(&p, &VARS, &o);
            prop_assert_eq!(parse_polynomial(&text, &VARS).unwrap(), p);
        }
    }
}
