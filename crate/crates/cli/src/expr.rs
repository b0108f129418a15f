//! Rational expressions over `+`, `-`, `*` with fraction literals.

use std::iter::Peekable;
use std::str::CharIndices;

use num::BigInt;
use thiserror::Error;

use tietze_core::crn::{crn_add, crn_from_rational, crn_mul, crn_neg, Crn};
use tietze_core::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Lit(Rational),
    Add(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn to_crn(&self) -> Crn {
        match self {
            Expr::Lit(q) => crn_from_rational(q.clone()),
            Expr::Add(a, b) => crn_add(&a.to_crn(), &b.to_crn()),
            Expr::Neg(a) => crn_neg(&a.to_crn()),
            Expr::Mul(a, b) => crn_mul(&a.to_crn(), &b.to_crn()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ExprError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a str,
    chars: Peekable<CharIndices<'a>>,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn column(&mut self) -> usize {
        let byte = self.chars.peek().map_or(self.src.len(), |(i, _)| *i);
        self.src[..byte].chars().count() + 1
    }

    fn error<T>(&mut self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError {
            column: self.column(),
            message: message.into(),
        })
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|(_, c)| *c)
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.chars.next();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') => {
                    self.chars.next();
                    lhs = Expr::Add(Box::new(lhs), Box::new(Expr::Neg(Box::new(self.term()?))));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some('*' | '×') = self.peek() {
            self.chars.next();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some('-') {
            self.chars.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn integer(&mut self) -> Result<BigInt, ExprError> {
        self.skip_ws();
        let mut digits = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            digits.push(c);
            self.chars.next();
        }
        if digits.is_empty() {
            return match self.peek() {
                Some(c) => self.error(format!("expected a number, found `{c}`")),
                None => self.error("expected a number, found end of input"),
            };
        }
        Ok(digits.parse().expect("ascii digits"))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some('(') {
            self.chars.next();
            let inner = self.expr()?;
            if self.peek() != Some(')') {
                return self.error("expected `)`");
            }
            self.chars.next();
            return Ok(inner);
        }
        let num = self.integer()?;
        if self.peek() != Some('/') {
            return Ok(Expr::Lit(Rational::from_integer(num)));
        }
        self.chars.next();
        self.skip_ws();
        let column = self.column();
        let den = self.integer()?;
        Rational::new(num, den)
            .map(Expr::Lit)
            .map_err(|e| ExprError {
                column,
                message: e.to_string(),
            })
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src,
        chars: src.char_indices().peekable(),
    };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(c) => p.error(format!("unexpected `{c}`")),
    }
}
