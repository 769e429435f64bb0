//! Text syntax for ladder polynomials, e.g. `0.5*Q^2 + 0.5*P^2` or
//! `0.5*(Q*P+P*Q)`.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' integer)?
//! atom   := number | 'i' | 'Q' | 'P' | 'a' | 'adag' | 'N' | 'I' | '(' expr ')'
//! ```
//!
//! Whitespace is ignored. The result must be Hermitian.

use super::{LadderPolynomial, TruncationScheme, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, C64};

const MAX_POWER: u32 = 16;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        match c {
            _ if c.is_whitespace() => k += 1,
            '+' => {
                out.push(Token::Plus);
                k += 1;
            }
            '-' => {
                out.push(Token::Minus);
                k += 1;
            }
            '*' => {
                out.push(Token::Star);
                k += 1;
            }
            '^' => {
                out.push(Token::Caret);
                k += 1;
            }
            '(' => {
                out.push(Token::Open);
                k += 1;
            }
            ')' => {
                out.push(Token::Close);
                k += 1;
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = k;
                while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                    k += 1;
                }
                // exponent: 1e-3, 2.5E+4
                if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                    let mut j = k + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        k = j;
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                    }
                }
                let lit: String = chars[start..k].iter().collect();
                let v: f64 = lit
                    .parse()
                    .map_err(|_| Error::Expression(format!("bad number `{lit}`")))?;
                out.push(Token::Number(v));
            }
            _ if c.is_alphabetic() || c == '†' => {
                let start = k;
                while k < chars.len() && (chars[k].is_alphanumeric() || chars[k] == '_' || chars[k] == '†') {
                    k += 1;
                }
                out.push(Token::Ident(chars[start..k].iter().collect()));
            }
            _ => return Err(Error::Expression(format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<LadderPolynomial> {
        let mut sign = 1.0;
        match self.peek() {
            Some(Token::Minus) => {
                sign = -1.0;
                self.pos += 1;
            }
            Some(Token::Plus) => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?.scale(C64::new(sign, 0.0));
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LadderPolynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LadderPolynomial> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        match self.next() {
            Some(Token::Number(v)) if v.fract() == 0.0 && (0.0..=MAX_POWER as f64).contains(&v) => {
                Ok(base.pow(v as u32))
            }
            other => Err(Error::Expression(format!(
                "exponent must be an integer in 0..={MAX_POWER}, found {other:?}"
            ))),
        }
    }

    fn atom(&mut self) -> Result<LadderPolynomial> {
        match self.next() {
            Some(Token::Number(v)) => Ok(LadderPolynomial::constant(C64::new(v, 0.0))),
            Some(Token::Ident(name)) => match name.as_str() {
                "i" => Ok(LadderPolynomial::constant(C64::new(0.0, 1.0))),
                "Q" => Ok(LadderPolynomial::position()),
                "P" => Ok(LadderPolynomial::momentum()),
                "a" => Ok(LadderPolynomial::lowering()),
                "adag" | "a†" => Ok(LadderPolynomial::raising()),
                "N" => Ok(LadderPolynomial::number()),
                "I" => Ok(LadderPolynomial::identity()),
                _ => Err(Error::Expression(format!("unknown symbol `{name}`"))),
            },
            Some(Token::Open) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::Close) => Ok(inner),
                    _ => Err(Error::Expression("missing `)`".into())),
                }
            }
            Some(t) => Err(Error::Expression(format!("unexpected token {t:?}"))),
            None => Err(Error::Expression("unexpected end of expression".into())),
        }
    }
}

/// Parses an expression and rejects non-Hermitian results.
pub fn parse_polynomial(text: &str) -> Result<LadderPolynomial> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::Expression("empty expression".into()));
    }
    let mut parser = Parser { tokens, pos: 0 };
    let p = parser.expr()?;
    if let Some(t) = parser.peek() {
        return Err(Error::Expression(format!("trailing input at {t:?}")));
    }
    if !p.is_symbolically_hermitian() {
        // compressions of a Hermitian polynomial are Hermitian at every d;
        // probing one block beyond the operator's reach catches the rest
        let probe = TruncationScheme::fock(2 * p.degree() + 8)?;
        let asym = HermitianMatrix::asymmetry(&p.compress(probe.dim()));
        if asym > HERMITIAN_TOL {
            return Err(Error::Expression(format!("`{text}` is not Hermitian")));
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::super::{builtin, truncate_polynomial};
    use super::*;

    fn same_operator(a: &LadderPolynomial, b: &LadderPolynomial) -> bool {
        let d = 10;
        a.compress(d).max_abs_diff(&b.compress(d)) < 1e-13
    }

    #[test]
    fn cli_examples_parse() {
        let ho = parse_polynomial("0.5*Q^2 + 0.5*P^2").unwrap();
        assert!(same_operator(&ho, &builtin("harmonic_oscillator").unwrap()));
        let sq = parse_polynomial("0.5*(Q*P+P*Q)").unwrap();
        assert!(same_operator(&sq, &builtin("squeezing").unwrap()));
        let q3 = parse_polynomial("Q^3").unwrap();
        assert!(same_operator(&q3, &builtin("q3").unwrap()));
        assert_eq!(q3.degree(), 3);
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse_polynomial("0.5*Q^2+0.5*P^2").unwrap();
        let b = parse_polynomial("  0.5 * Q ^ 2\t+ 0.5*P^2 ").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ladder_symbols_and_signs() {
        let n = parse_polynomial("adag*a + 0.5").unwrap();
        assert!(same_operator(&n, &builtin("harmonic_oscillator").unwrap()));
        let neg = parse_polynomial("-P^2 + 2*N").unwrap();
        let m = truncate_polynomial(&neg, TruncationScheme::fock(3).unwrap()).unwrap();
        assert!((m.get(0, 0).re - (-0.5)).abs() < 1e-15);
        let sci = parse_polynomial("1e-1*Q^2").unwrap();
        assert_eq!(sci.degree(), 2);
        let imag = parse_polynomial("i*(adag^2 - a^2)").unwrap();
        assert!(same_operator(&imag.scale(C64::new(0.5, 0.0)), &builtin("squeezing").unwrap()));
    }

    #[test]
    fn rejects_non_hermitian() {
        assert!(parse_polynomial("Q*P").is_err());
        assert!(parse_polynomial("a").is_err());
        assert!(parse_polynomial("i*Q").is_err());
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "Q^", "(Q", "Q + * P", "X^2", "Q^2.5", "Q^99", "Q $ P", "Q P"] {
            assert!(parse_polynomial(bad).is_err(), "accepted `{bad}`");
        }
    }
}
