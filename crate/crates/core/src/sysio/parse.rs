//! Precedence-climbing parser for polynomial expressions.
//!
//! Grammar: integer literals, identifiers, `+ - * / ^` and parentheses.
//! `^` takes a non-negative integer literal and binds tighter than unary
//! minus, so `-x^2` is `-(x^2)`. Division is only allowed by nonzero
//! constants, which is how rational literals `p/q` are written.

use std::collections::HashSet;

use num_bigint::BigInt;
use thiserror::Error;

use crate::polyring::{MultiPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error("division by a non-constant at {pos}")]
    NonPolynomial { pos: usize },
    #[error("division by zero at {pos}")]
    DivisionByZero { pos: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownSymbol { pos, .. }
            | ParseError::NonPolynomial { pos }
            | ParseError::DivisionByZero { pos } => *pos,
        }
    }

    fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        ParseError::Syntax {
            pos,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
    Open,
    Close,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'.' || bytes[i] == b'e' || bytes[i] == b'E') {
                return Err(ParseError::syntax(
                    i,
                    "only integer and p/q literals are accepted",
                ));
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((Tok::Num(n), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::Open,
            ')' => Tok::Close,
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(ParseError::syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    allowed: &'a HashSet<String>,
}

const MAX_EXPONENT: u32 = 4096;

fn binary_prec(op: char) -> u8 {
    match op {
        '+' | '-' => 1,
        '*' | '/' => 2,
        _ => 4,
    }
}

const UNARY_PREC: u8 = 3;

impl Parser<'_> {
    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self, min_prec: u8) -> Result<MultiPoly, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let (tok, pos) = self.peek().clone();
            let op = match tok {
                Tok::Op(op) => op,
                Tok::End | Tok::Close => break,
                _ => return Err(ParseError::syntax(pos, "expected an operator")),
            };
            let prec = binary_prec(op);
            if prec < min_prec {
                break;
            }
            self.bump();
            if op == '^' {
                let e = self.exponent()?;
                if let (Tok::Op('^'), p) = self.peek() {
                    return Err(ParseError::syntax(*p, "chained `^` needs parentheses"));
                }
                lhs = lhs.pow(e);
                continue;
            }
            let rhs = self.expr(prec + 1)?;
            lhs = match op {
                '+' => &lhs + &rhs,
                '-' => &lhs - &rhs,
                '*' => &lhs * &rhs,
                '/' => {
                    let Some(c) = rhs.as_constant() else {
                        return Err(ParseError::NonPolynomial { pos });
                    };
                    if c == Rational::from_integer(0.into()) {
                        return Err(ParseError::DivisionByZero { pos });
                    }
                    lhs.scale(&c.recip())
                }
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(n) => u32::try_from(&n)
                .ok()
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or_else(|| ParseError::syntax(pos, "exponent too large")),
            _ => Err(ParseError::syntax(
                pos,
                "exponent must be a non-negative integer literal",
            )),
        }
    }

    fn unary(&mut self) -> Result<MultiPoly, ParseError> {
        let (tok, pos) = self.peek().clone();
        match tok {
            Tok::Op('-') => {
                self.bump();
                Ok(-self.expr(UNARY_PREC)?)
            }
            Tok::Op('+') => {
                self.bump();
                self.expr(UNARY_PREC)
            }
            Tok::Num(n) => {
                self.bump();
                Ok(MultiPoly::constant(Rational::from_integer(n)))
            }
            Tok::Ident(name) => {
                self.bump();
                if !self.allowed.contains(&name) {
                    return Err(ParseError::UnknownSymbol { pos, name });
                }
                Ok(MultiPoly::var(&name))
            }
            Tok::Open => {
                self.bump();
                let inner = self.expr(0)?;
                match self.bump() {
                    (Tok::Close, _) => Ok(inner),
                    (_, p) => Err(ParseError::syntax(p, "expected `)`")),
                }
            }
            Tok::Close => Err(ParseError::syntax(pos, "unexpected `)`")),
            Tok::End => Err(ParseError::syntax(pos, "unexpected end of input")),
            Tok::Op(c) => Err(ParseError::syntax(pos, format!("unexpected `{c}`"))),
        }
    }
}

/// Parses `text` into an exact polynomial over the names in `allowed`.
pub fn parse_poly(text: &str, allowed: &HashSet<String>) -> Result<MultiPoly, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        allowed,
    };
    let out = p.expr(0)?;
    match p.peek() {
        (Tok::End, _) => Ok(out),
        (_, pos) => Err(ParseError::syntax(*pos, "unbalanced `)`")),
    }
}

/// Convenience wrapper taking the allowed names as a slice.
pub fn parse_poly_in(text: &str, allowed: &[&str]) -> Result<MultiPoly, ParseError> {
    let set = allowed.iter().map(|s| s.to_string()).collect();
    parse_poly(text, &set)
}
