//! Text formats: ring declarations, polynomials, decompositions and reports.
//!
//! Ring declarations look like `GF(2)[x:1, y:1, f:2, g:2; t]` (an optional
//! leading `ring` keyword is accepted). Polynomials use identifiers, integer
//! literals, `+ - * / ^` and parentheses; products and powers are expanded at
//! parse time and `/` only divides by nonzero constants. The printed form is
//! canonical: terms in descending graded-lex order joined by `" + "`, each as
//! `c*x^e*y`, with unit coefficients and unit exponents omitted.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::arith::{Field, Scalar};
use crate::polyring::{Monomial, Poly, PolyError, Ring, WeightedRing};
use crate::strength::{Decomposition, StrengthError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("syntax error at column {}: {msg}", pos + 1)]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at column {}", pos + 1)]
    UnknownSymbol { pos: usize, name: String },
    #[error("literal `{literal}` at column {} is not an element of {field}", pos + 1)]
    FieldLiteral { pos: usize, literal: String, field: Field },
    #[error("invalid ring: {0}")]
    Ring(#[from] PolyError),
    #[error("invalid decomposition: {0}")]
    Decomposition(String),
}

impl TextError {
    pub fn position(&self) -> Option<usize> {
        match self {
            TextError::Syntax { pos, .. }
            | TextError::UnknownSymbol { pos, .. }
            | TextError::FieldLiteral { pos, .. } => Some(*pos),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn tokenize(text: &str, symbols: &str) -> Result<Vec<(usize, Tok)>, TextError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                s.push(d);
                chars.next();
            }
            out.push((pos, Tok::Int(s.parse().expect("digits"))));
        } else if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if !is_ident_char(d) {
                    break;
                }
                s.push(d);
                chars.next();
            }
            out.push((pos, Tok::Ident(s)));
        } else if symbols.contains(c) {
            out.push((pos, Tok::Sym(c)));
            chars.next();
        } else {
            return Err(TextError::Syntax {
                pos,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    ring: &'a Ring,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, TextError> {
        Err(TextError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Poly, TextError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, TextError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let pos = self.pos();
                self.at += 1;
                let divisor = self.unary()?;
                let c = constant_value(&divisor).ok_or_else(|| TextError::Syntax {
                    pos,
                    msg: "division by a non-constant expression".into(),
                })?;
                let inv = c.inverse().map_err(|_| TextError::FieldLiteral {
                    pos,
                    literal: format!("1/{}", self.literal_text(&divisor)),
                    field: self.ring.field(),
                })?;
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn literal_text(&self, p: &Poly) -> String {
        if p.is_zero() {
            "0".into()
        } else {
            p.to_string()
        }
    }

    fn unary(&mut self) -> Result<Poly, TextError> {
        if self.eat('-') {
            Ok(-&self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Poly, TextError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.at += 1;
                    let e: u32 = n.try_into().or_else(|_| self.syntax("exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => self.syntax("expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly, TextError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(Poly::constant(self.ring, Scalar::from_bigint(self.ring.field(), &n)))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                Poly::var(self.ring, &name).map_err(|_| TextError::UnknownSymbol { pos, name })
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.syntax("expected `)`");
                }
                Ok(inner)
            }
            Some(Tok::Sym(c)) => self.syntax(format!("unexpected `{c}`")),
            None => self.syntax("unexpected end of input"),
        }
    }
}

fn constant_value(p: &Poly) -> Option<Scalar> {
    if p.is_zero() {
        return Some(Scalar::zero(p.field()));
    }
    match p.terms().collect::<Vec<_>>().as_slice() {
        [(m, c)] if m.exps().iter().all(|&e| e == 0) => Some((*c).clone()),
        _ => None,
    }
}

/// Parses a polynomial expression in `ring`, expanding products and powers.
pub fn parse_poly(ring: &Ring, text: &str) -> Result<Poly, TextError> {
    let toks = tokenize(text, "+-*/^()")?;
    let mut parser = Parser {
        toks,
        at: 0,
        end: text.len(),
        ring,
    };
    let p = parser.expr()?;
    if parser.at != parser.toks.len() {
        return parser.syntax("unexpected trailing input");
    }
    Ok(p)
}

fn write_monomial(out: &mut String, ring: &WeightedRing, m: &Monomial) {
    let mut first = true;
    for (idx, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(ring.symbol_name(idx));
        if e > 1 {
            let _ = write!(out, "^{e}");
        }
    }
}

/// Canonical text form of a polynomial.
pub fn print_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let ring = p.ring();
    let mut out = String::new();
    for (i, (m, c)) in p.terms().enumerate() {
        if i > 0 {
            out.push_str(" + ");
        }
        let constant = m.exps().iter().all(|&e| e == 0);
        if constant {
            let _ = write!(out, "{c}");
        } else {
            if !c.is_one() {
                let _ = write!(out, "{c}*");
            }
            write_monomial(&mut out, ring, m);
        }
    }
    out
}

/// Parses `[ring] FIELD[name:deg, ...; param, ...]`.
pub fn parse_ring(text: &str) -> Result<Ring, TextError> {
    let toks = tokenize(text, "[](),:;")?;
    let mut at = 0;
    let err = |toks: &Vec<(usize, Tok)>, at: usize, msg: &str| -> TextError {
        TextError::Syntax {
            pos: toks.get(at).map_or(text.len(), |(p, _)| *p),
            msg: msg.to_string(),
        }
    };
    if let Some((_, Tok::Ident(kw))) = toks.first() {
        if kw == "ring" {
            at += 1;
        }
    }
    let field = match toks.get(at) {
        Some((_, Tok::Ident(name))) if name == "QQ" || name == "Q" => {
            at += 1;
            Field::Rational
        }
        Some((pos, Tok::Ident(name))) if name == "GF" => {
            let p = match (toks.get(at + 1), toks.get(at + 2), toks.get(at + 3)) {
                (Some((_, Tok::Sym('('))), Some((_, Tok::Int(p))), Some((_, Tok::Sym(')')))) => p.clone(),
                _ => return Err(err(&toks, at + 1, "expected GF(p)")),
            };
            at += 4;
            let p: u32 = p
                .try_into()
                .map_err(|_| err(&toks, at - 2, "characteristic too large"))?;
            Field::prime(p).map_err(|e| TextError::Syntax {
                pos: *pos,
                msg: e.to_string(),
            })?
        }
        _ => return Err(err(&toks, at, "expected a field (GF(p) or QQ)")),
    };
    let expect = |at: usize, c: char| -> Result<(), TextError> {
        match toks.get(at) {
            Some((_, Tok::Sym(s))) if *s == c => Ok(()),
            _ => Err(err(&toks, at, &format!("expected `{c}`"))),
        }
    };
    expect(at, '[')?;
    at += 1;
    let mut vars = Vec::new();
    let mut params = Vec::new();
    let mut in_params = false;
    loop {
        match toks.get(at) {
            Some((_, Tok::Sym(']'))) => {
                at += 1;
                break;
            }
            Some((_, Tok::Sym(';'))) if !in_params => {
                in_params = true;
                at += 1;
                continue;
            }
            Some((_, Tok::Ident(name))) => {
                at += 1;
                if in_params {
                    params.push(name.clone());
                } else if let Some((_, Tok::Sym(':'))) = toks.get(at) {
                    let d = match toks.get(at + 1) {
                        Some((_, Tok::Int(d))) => d.clone(),
                        _ => return Err(err(&toks, at + 1, "expected a degree")),
                    };
                    let d: u32 = d.try_into().map_err(|_| err(&toks, at + 1, "degree too large"))?;
                    if d == 0 {
                        return Err(err(&toks, at + 1, "variable degrees must be positive"));
                    }
                    at += 2;
                    vars.push((name.clone(), d));
                } else {
                    vars.push((name.clone(), 1));
                }
                match toks.get(at) {
                    Some((_, Tok::Sym(','))) => at += 1,
                    Some((_, Tok::Sym(']'))) | Some((_, Tok::Sym(';'))) => {}
                    _ => return Err(err(&toks, at, "expected `,`, `;` or `]`")),
                }
            }
            _ => return Err(err(&toks, at, "expected a symbol name")),
        }
    }
    if at != toks.len() {
        return Err(err(&toks, at, "unexpected trailing input"));
    }
    Ok(WeightedRing::new(field, vars, params)?)
}

/// Canonical declaration, e.g. `GF(2)[x:1, f:2; t]`.
pub fn print_ring(ring: &WeightedRing) -> String {
    let vars: Vec<String> = ring.vars().iter().map(|(n, d)| format!("{n}:{d}")).collect();
    let mut out = format!("{}[{}", ring.field(), vars.join(", "));
    if !ring.params().is_empty() {
        let _ = write!(out, "; {}", ring.params().join(", "));
    }
    out.push(']');
    out
}

/// Decomposition text: pairs `(g)*(h)` separated by `;`.
pub fn print_decomposition(d: &Decomposition) -> String {
    d.pairs()
        .iter()
        .map(|(g, h)| format!("({g})*({h})"))
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn parse_decomposition(ring: &Ring, text: &str) -> Result<Decomposition, TextError> {
    let mut pairs = Vec::new();
    let mut offset = 0;
    for piece in text.split(';') {
        let start = offset + piece.len() - piece.trim_start().len();
        offset += piece.len() + 1;
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let split = top_level_product(piece).ok_or_else(|| TextError::Syntax {
            pos: start,
            msg: "expected a pair of the form (g)*(h)".into(),
        })?;
        let shift = |e: TextError| match e {
            TextError::Syntax { pos, msg } => TextError::Syntax { pos: pos + start, msg },
            TextError::UnknownSymbol { pos, name } => TextError::UnknownSymbol { pos: pos + start, name },
            TextError::FieldLiteral { pos, literal, field } => TextError::FieldLiteral {
                pos: pos + start,
                literal,
                field,
            },
            other => other,
        };
        let g = parse_poly(ring, &piece[..split]).map_err(shift)?;
        let h = parse_poly(ring, &piece[split + 1..]).map_err(|e| match shift(e) {
            TextError::Syntax { pos, msg } => TextError::Syntax {
                pos: pos + split + 1,
                msg,
            },
            other => other,
        })?;
        pairs.push((g, h));
    }
    Decomposition::new(ring, pairs).map_err(|e: StrengthError| TextError::Decomposition(e.to_string()))
}

/// Byte index of the `*` joining `(g)` and `(h)`.
fn top_level_product(piece: &str) -> Option<usize> {
    if !piece.starts_with('(') {
        return None;
    }
    let mut depth = 0i32;
    for (i, c) in piece.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    let rest = &piece[i + 1..];
                    let star = rest.find(|c: char| !c.is_whitespace())?;
                    return (rest[star..].starts_with('*')).then_some(i + 1 + star);
                }
            }
            _ => {}
        }
    }
    None
}

/// A machine-readable command report.
///
/// `statistics` holds timing and enumeration counters; golden comparisons
/// drop that section and compare the rest byte for byte.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub result: Value,
    pub certificate: Value,
    pub statistics: Value,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without its statistics section, for golden comparisons.
    pub fn stable_json(&self) -> String {
        let mut copy = self.clone();
        copy.statistics = Value::Null;
        copy.to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn paper_ring() -> Ring {
        parse_ring("ring GF(2)[x:1, y:1, u:1, v:1, f:2, g:2, p:2, q:2; t]").unwrap()
    }

    #[test]
    fn ring_round_trip() {
        let r = paper_ring();
        assert_eq!(r.num_vars(), 8);
        assert_eq!(r.params(), ["t"]);
        let printed = print_ring(&r);
        assert_eq!(printed, "GF(2)[x:1, y:1, u:1, v:1, f:2, g:2, p:2, q:2; t]");
        assert_eq!(*parse_ring(&printed).unwrap(), *r);
        let q = parse_ring("QQ[a, b:3]").unwrap();
        assert_eq!(print_ring(&q), "QQ[a:1, b:3]");
        assert!(parse_ring("GF(4)[x]").is_err());
        assert!(parse_ring("GF(2)[x, x]").is_err());
        assert!(parse_ring("GF(2)[x:0]").is_err());
        assert!(parse_ring("R[x]").is_err());
    }

    #[test]
    fn quartic_parses_and_prints() {
        let r = paper_ring();
        let h = parse_poly(&r, "x^2*f + y^2*g + u^2*p + v^2*q").unwrap();
        assert_eq!(h.num_terms(), 4);
        assert_eq!(print_poly(&h), "x^2*f + y^2*g + u^2*p + v^2*q");
    }

    #[test]
    fn products_are_expanded() {
        let q = parse_ring("QQ[x, y]").unwrap();
        let p = parse_poly(&q, "(x+y)*(x-y)").unwrap();
        assert_eq!(print_poly(&p), "x^2 + -1*y^2");
        assert_eq!(print_poly(&Poly::zero(&q)), "0");
        assert_eq!(
            print_poly(&parse_poly(&q, "-(3/4)*x + 1/2 - 2").unwrap()),
            "-3/4*x + -3/2"
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        let q = parse_ring("QQ[x, y]").unwrap();
        assert_eq!(
            parse_poly(&q, "x + w"),
            Err(TextError::UnknownSymbol {
                pos: 4,
                name: "w".into()
            })
        );
        let g2 = parse_ring("GF(2)[x]").unwrap();
        assert!(matches!(
            parse_poly(&g2, "1/2*x"),
            Err(TextError::FieldLiteral { pos: 1, .. })
        ));
        assert!(matches!(parse_poly(&q, "x +"), Err(TextError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_poly(&q, "x ^ y"), Err(TextError::Syntax { .. })));
        assert!(matches!(parse_poly(&q, "x / y"), Err(TextError::Syntax { .. })));
        assert!(matches!(parse_poly(&q, "(x"), Err(TextError::Syntax { .. })));
        assert!(matches!(parse_poly(&q, "x $ y"), Err(TextError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn decompositions_round_trip() {
        let r = parse_ring("QQ[x, y, u, v]").unwrap();
        let d = parse_decomposition(&r, "(x + y)*(x - y); (u)*(v)").unwrap();
        assert_eq!(d.len(), 2);
        let text = print_decomposition(&d);
        assert_eq!(text, "(x + y)*(x + -1*y); (u)*(v)");
        assert_eq!(parse_decomposition(&r, &text).unwrap(), d);
        assert!(parse_decomposition(&r, "x*y").is_err());
    }

    fn arb_poly(field: Field) -> impl Strategy<Value = (Ring, Poly)> {
        let ring = WeightedRing::new(
            field,
            vec![("x".into(), 1), ("y".into(), 1), ("f".into(), 2)],
            vec!["t".into()],
        )
        .unwrap();
        let r2 = ring.clone();
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..2, 0u32..2), -20i64..20, 1i64..6), 0..6).prop_map(
            move |terms| {
                let p = Poly::from_terms(
                    &r2,
                    terms.into_iter().map(|((a, b, c, d), n, den)| {
                        let coef = Scalar::from_ratio(field, &n.into(), &den.into())
                            .unwrap_or_else(|_| Scalar::from_i64(field, n));
                        (Monomial::new(&r2, vec![a, b, c, d]), coef)
                    }),
                );
                (ring.clone(), p)
            },
        )
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity_over_q((ring, p) in arb_poly(Field::Rational)) {
            prop_assert_eq!(parse_poly(&ring, &print_poly(&p)).unwrap(), p);
        }

        #[test]
        fn print_then_parse_is_identity_over_gf7((ring, p) in arb_poly(Field::Prime(7))) {
            let text = print_poly(&p);
            let back = parse_poly(&ring, &text).unwrap();
            prop_assert_eq!(print_poly(&back), text);
            prop_assert_eq!(back, p);
        }
    }
}
