//! Text grammar for rings, coefficients, series and matrices.
//!
//! ```text
//! ring    := "Q" | "Q[" gen ("," gen)* "]"        gen := name "^" int
//! series  := expr (":" "prec" int)?
//! matrix  := row (";" row)*                       row := series ("," series)*
//! expr    := ["+"|"-"] term (("+"|"-") term)*
//! term    := factor (("*"|"/") factor)*
//! factor  := atom ("^" ["-"] int)?
//! atom    := int | name | "t" | "(" expr ")"
//! ```
//!
//! Whitespace is ignored. Division is only by nonzero rational constants,
//! so `3/2*e1` is the rational `3/2` times `e1`. Negative powers are
//! allowed for exact monomials with unit coefficient.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::matrix::LaurentMatrix;
use crate::ring::{NilAlgebra, Rational, RingElement};

const MAX_T_EXPONENT: i64 = 1 << 20;
const MAX_POWER: i64 = 256;
const MAX_RING_DIM: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("number {n}"),
            Tok::Name(s) => format!("name {s:?}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::Colon => "':'".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, d)) = it.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                s.push(d);
                it.next();
            }
            out.push((pos, Tok::Int(s.parse().expect("digits"))));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, d)) = it.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                s.push(d);
                it.next();
            }
            out.push((pos, Tok::Name(s)));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            _ => return Err(Error::parse(pos, format!("unexpected character {c:?}"))),
        };
        out.push((pos, tok));
        it.next();
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    alg: Option<&'a NilAlgebra>,
    allow_t: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &str, alg: Option<&'a NilAlgebra>, allow_t: bool) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            idx: 0,
            end: text.len(),
            alg,
            allow_t,
        })
    }

    fn alg(&self) -> &'a NilAlgebra {
        self.alg.expect("expression parser needs a ring")
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {}", tok.describe())))
        }
    }

    fn unexpected(&self, what: &str) -> Error {
        match self.peek() {
            Some(t) => Error::parse(self.pos(), format!("{what}, found {}", t.describe())),
            None => Error::parse(self.pos(), format!("{what}, found end of input")),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.idx < self.toks.len() {
            Err(self.unexpected("expected end of input"))
        } else {
            Ok(())
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.idx += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("expected an integer")),
        }
    }

    fn signed_int(&mut self) -> Result<i64> {
        let pos = self.pos();
        let neg = self.eat(&Tok::Minus);
        let n = self.int()?;
        let n = if neg { -n } else { n };
        n.to_i64()
            .ok_or_else(|| Error::parse(pos, format!("integer {n} out of range")))
    }

    fn ring(&mut self) -> Result<NilAlgebra> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Name(s)) if s == "Q" => self.idx += 1,
            _ => return Err(self.unexpected("expected 'Q'")),
        }
        if !self.eat(&Tok::LBracket) {
            return Ok(NilAlgebra::rationals());
        }
        let mut gens = Vec::new();
        loop {
            let name = match self.peek() {
                Some(Tok::Name(s)) => s.clone(),
                _ => return Err(self.unexpected("expected a generator name")),
            };
            self.idx += 1;
            self.expect(&Tok::Caret)?;
            let epos = self.pos();
            let e = self.int()?;
            let e = e
                .to_u32()
                .filter(|&e| e >= 1)
                .ok_or_else(|| Error::parse(epos, format!("nilpotency order {e} out of range")))?;
            gens.push((name, e));
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(&Tok::RBracket)?;
            break;
        }
        let dim = gens
            .iter()
            .try_fold(1u64, |acc, (_, e)| acc.checked_mul(u64::from(*e)));
        if dim.is_none_or(|d| d > MAX_RING_DIM) {
            return Err(Error::parse(
                pos,
                format!("ring dimension exceeds {MAX_RING_DIM}"),
            ));
        }
        NilAlgebra::new(gens).map_err(|e| Error::parse(pos, e.to_string()))
    }

    fn expr(&mut self) -> Result<LaurentSeries> {
        let neg = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let mut acc = self.term()?;
        if neg {
            acc = -acc;
        }
        loop {
            if self.eat(&Tok::Plus) {
                acc = &acc + &self.term()?;
            } else if self.eat(&Tok::Minus) {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<LaurentSeries> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = &acc * &self.factor()?;
            } else if self.peek() == Some(&Tok::Slash) {
                let pos = self.pos();
                self.idx += 1;
                let d = self.factor()?;
                let q = as_rational(&d)
                    .filter(|q| !q.is_zero())
                    .ok_or_else(|| Error::parse(pos, "can only divide by a nonzero rational"))?;
                acc = acc.scale(&self.alg().from_rational(q.recip()));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<LaurentSeries> {
        let alg = self.alg();
        let pos = self.pos();
        let base = match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.idx += 1;
                Atom::Series(LaurentSeries::constant(
                    alg.from_rational(Rational::from_integer(n)),
                ))
            }
            Some(Tok::Name(s)) if s == "t" => {
                self.idx += 1;
                if !self.allow_t {
                    return Err(Error::parse(pos, "'t' is not allowed in a coefficient"));
                }
                Atom::T
            }
            Some(Tok::Name(s)) => {
                self.idx += 1;
                let i = alg.names().iter().position(|n| *n == s).ok_or_else(|| {
                    Error::parse(pos, format!("unknown generator {s:?} in {alg}"))
                })?;
                Atom::Generator(i)
            }
            Some(Tok::LParen) => {
                self.idx += 1;
                let inner = self.expr()?;
                self.expect(&Tok::RParen)?;
                Atom::Series(inner)
            }
            _ => return Err(self.unexpected("expected a number, name or '('")),
        };
        let epos = self.pos();
        let exp = if self.eat(&Tok::Caret) {
            Some(self.signed_int()?)
        } else {
            None
        };
        match base {
            Atom::T => {
                let k = exp.unwrap_or(1);
                if k.abs() > MAX_T_EXPONENT {
                    return Err(Error::parse(epos, format!("exponent {k} out of range")));
                }
                Ok(LaurentSeries::monomial(alg.one(), k))
            }
            Atom::Generator(i) => {
                let k = exp.unwrap_or(1);
                let order = alg.orders()[i] as i64;
                if k < 0 || k >= order {
                    return Err(Error::parse(
                        epos,
                        format!(
                            "exponent {k} out of range for {} (order {order})",
                            alg.names()[i]
                        ),
                    ));
                }
                let mut exps = vec![0u32; alg.names().len()];
                exps[i] = k as u32;
                Ok(LaurentSeries::constant(alg.monomial(&exps)?))
            }
            Atom::Series(s) => match exp {
                None => Ok(s),
                Some(k) if k.abs() > MAX_POWER => {
                    Err(Error::parse(epos, format!("exponent {k} out of range")))
                }
                Some(k) if k >= 0 => Ok(s.pow(k as u32)),
                Some(k) => {
                    let inv = invert_monomial(&s).ok_or_else(|| {
                        Error::parse(epos, "negative power of a non-monomial or non-unit")
                    })?;
                    Ok(inv.pow((-k) as u32))
                }
            },
        }
    }
}

enum Atom {
    T,
    Generator(usize),
    Series(LaurentSeries),
}

fn as_rational(s: &LaurentSeries) -> Option<Rational> {
    if !s.is_exact() {
        return None;
    }
    let c = s.coeff(0);
    let only_constant = s.terms().all(|(d, _)| d == 0);
    (only_constant && c.is_constant()).then(|| c.constant_term().clone())
}

fn invert_monomial(s: &LaurentSeries) -> Option<LaurentSeries> {
    let mut terms = s.terms();
    let (d, c) = terms.next()?;
    if terms.next().is_some() || !s.is_exact() {
        return None;
    }
    let inv = c.invert().ok()?;
    Some(LaurentSeries::monomial(inv, -d))
}

pub fn parse_ring(text: &str) -> Result<NilAlgebra> {
    let mut p = Parser::new(text, None, false)?;
    let alg = p.ring()?;
    p.finish()?;
    Ok(alg)
}

/// A coefficient in `alg`; `t` is rejected.
pub fn parse_element(alg: &NilAlgebra, text: &str) -> Result<RingElement> {
    let mut p = Parser::new(text, Some(alg), false)?;
    let s = p.expr()?;
    p.finish()?;
    Ok(s.coeff(0))
}

fn series_with_suffix(p: &mut Parser<'_>) -> Result<LaurentSeries> {
    let s = p.expr()?;
    if !p.eat(&Tok::Colon) {
        return Ok(s);
    }
    match p.peek() {
        Some(Tok::Name(n)) if n == "prec" => p.idx += 1,
        _ => return Err(p.unexpected("expected 'prec'")),
    }
    let prec = p.signed_int()?;
    Ok(LaurentSeries::new(
        p.alg(),
        s.terms().map(|(d, c)| (d, c.clone())),
        Some(prec),
    ))
}

pub fn parse_series(alg: &NilAlgebra, text: &str) -> Result<LaurentSeries> {
    let mut p = Parser::new(text, Some(alg), true)?;
    let s = series_with_suffix(&mut p)?;
    p.finish()?;
    Ok(s)
}

/// A square matrix; rows are separated by `;`, entries by `,`.
pub fn parse_matrix(alg: &NilAlgebra, text: &str) -> Result<LaurentMatrix> {
    let mut p = Parser::new(text, Some(alg), true)?;
    let mut rows: Vec<Vec<LaurentSeries>> = vec![vec![]];
    loop {
        let pos = p.pos();
        let entry = series_with_suffix(&mut p)?;
        rows.last_mut().expect("nonempty").push(entry);
        if p.eat(&Tok::Comma) {
            continue;
        }
        if p.eat(&Tok::Semi) {
            rows.push(vec![]);
            continue;
        }
        p.finish()?;
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::parse(
                pos,
                format!("row {bad} has {} entries, expected {n}", rows[bad].len()),
            ));
        }
        return LaurentMatrix::from_rows(alg, rows);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rings() {
        let r = parse_ring(" Q [ e1^2 , e2^3 ] ").unwrap();
        assert_eq!(r.names(), ["e1", "e2"]);
        assert_eq!(r.orders(), [2, 3]);
        assert_eq!(r.to_string(), "Q[e1^2,e2^3]");
        assert!(parse_ring("Q").unwrap().is_field());
        assert!(parse_ring("Q[t^2]").is_err());
        assert!(parse_ring("Q[e^0]").is_err());
        assert!(parse_ring("Q[e^2").is_err());
        assert!(parse_ring("R").is_err());
    }

    #[test]
    fn elements() {
        let r = parse_ring("Q[e1^2,e2^3]").unwrap();
        let x = parse_element(&r, "1 + 3/2*e1*e2^2").unwrap();
        assert_eq!(x.to_string(), "1 + 3/2*e1*e2^2");
        assert_eq!(
            parse_element(&r, "(1+e1)^3").unwrap().to_string(),
            "1 + 3*e1"
        );
        assert_eq!(parse_element(&r, "e1/2").unwrap().to_string(), "1/2*e1");
        assert!(matches!(
            parse_element(&r, "e1^2"),
            Err(Error::Parse { pos: 2, .. })
        ));
        assert!(parse_element(&r, "t").is_err());
        assert!(parse_element(&r, "e3").is_err());
        assert!(parse_element(&r, "1/e1").is_err());
        assert!(parse_element(&r, "1/0").is_err());
    }

    #[test]
    fn series() {
        let r = parse_ring("Q[e1^2]").unwrap();
        let s = parse_series(&r, "e1*t^-1 + 1 + 2*t").unwrap();
        assert!(s.is_exact());
        assert_eq!(s.terms().map(|(d, _)| d).collect::<Vec<_>>(), [-1, 0, 1]);
        let s = parse_series(&r, "t^ -2 + t^5 : prec 3").unwrap();
        assert_eq!(s.precision(), Some(3));
        assert_eq!(s.to_string(), "t^-2 : prec 3");
        assert_eq!(
            parse_series(&r, "(2*t)^-1").unwrap().to_string(),
            "1/2*t^-1"
        );
        assert!(parse_series(&r, "(1+t)^-1").is_err());
        assert!(matches!(
            parse_series(&r, "1 + * t"),
            Err(Error::Parse { pos: 4, .. })
        ));
    }

    #[test]
    fn matrices() {
        let q = NilAlgebra::rationals();
        let m = parse_matrix(&q, "1, t; 0, 1").unwrap();
        assert_eq!(m.size(), 2);
        assert_eq!(parse_matrix(&q, &m.to_string()).unwrap(), m);
        assert!(parse_matrix(&q, "1, t; 0").is_err());
        assert!(parse_matrix(&q, "1, t").is_err());
    }
}
