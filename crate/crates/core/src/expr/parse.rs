//! Recursive-descent parser for observables.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := power (("*" | "/") power)*
//! power   := unary ("^" power)?          exponent must fold to an integer
//! unary   := "-" unary | primary
//! primary := number | "pi" | variable | func "(" expr ")" | "(" expr ")"
//! variable:= ("q" | "p") digits           index in 1..=n
//! func    := "sin" | "cos" | "exp" | "sqrt" | "ln"
//! number  := digits ("." digits?)? (("e" | "E") ("+" | "-")? digits)?
//! ```
//!
//! Unary minus binds tighter than `^`, so `-q1^2` is `(-q1)^2`.

use std::sync::Arc;

use thiserror::Error;

use super::ast::{BinOp, Expr, Func, Var};
use super::eval::eval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("unknown variable `{name}` at {position} (dimension is {dim})")]
    UnknownVariable {
        name: String,
        position: usize,
        dim: usize,
    },
    #[error("unknown function `{name}` at {position}")]
    UnknownFunction { name: String, position: usize },
    #[error("exponent at {position} is not an integer constant")]
    NonIntegerExponent { position: usize },
    #[error("empty expression")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {}", x),
            Tok::Ident(s) => format!("`{}`", s),
            Tok::Op(c) => format!("`{}`", c),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Tok::Op(c as char), start));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, start));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, start));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let literal = &text[start..i];
                let value = literal.parse::<f64>().map_err(|_| ParseError::Syntax {
                    position: start,
                    expected: "a number".into(),
                    found: format!("`{}`", literal),
                })?;
                out.push((Tok::Num(value), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    position: start,
                    expected: "an expression".into(),
                    found: format!("`{}`", ch),
                });
            }
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            position: self.offset(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.power()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.power()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exponent = self.power()?;
        Ok(Expr::Pow(Arc::new(base), integer_exponent(&exponent, at)?))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Arc::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Const(x))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name).ok_or(ParseError::UnknownFunction {
                        name: name.clone(),
                        position: at,
                    })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::Call(func, Arc::new(arg)));
                }
                if name == "pi" {
                    return Ok(Expr::Pi);
                }
                self.variable(&name, at).map(Expr::Var)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn variable(&self, name: &str, at: usize) -> Result<Var, ParseError> {
        let unknown = || ParseError::UnknownVariable {
            name: name.to_string(),
            position: at,
            dim: self.dim,
        };
        let (head, digits) = name.split_at(1);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(unknown());
        }
        let index: usize = digits.parse().map_err(|_| unknown())?;
        if index == 0 || index > self.dim {
            return Err(unknown());
        }
        match head {
            "q" => Ok(Var::q(index - 1)),
            "p" => Ok(Var::p(index - 1)),
            _ => Err(unknown()),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected("`)`"))
        }
    }
}

fn integer_exponent(exponent: &Expr, at: usize) -> Result<i32, ParseError> {
    let mut has_var = false;
    exponent.for_each_var(&mut |_| has_var = true);
    if has_var {
        return Err(ParseError::NonIntegerExponent { position: at });
    }
    let value = eval(exponent, &[], &[]).map_err(|_| ParseError::NonIntegerExponent { position: at })?;
    if value.fract() != 0.0 || value.abs() > f64::from(i32::MAX) {
        return Err(ParseError::NonIntegerExponent { position: at });
    }
    Ok(value as i32)
}

/// Parses `text` into an expression tree over `dim` degrees of freedom.
pub fn parse_expr(text: &str, dim: usize) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
        dim,
    };
    let expr = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.unexpected("an operator or end of input"));
    }
    Ok(expr)
}
