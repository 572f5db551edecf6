//! Infix expression grammar for update equations.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | primary
//! primary := number | 'x'<idx> | 'u'<idx> | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! A numeric literal multiplied by anything becomes a `Scale` node, and a
//! negated literal folds into the constant, so the `Display` output of a
//! parsed expression parses back to the same arena.

use thiserror::Error;

use super::expr::{Expr, Primitive};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("expression syntax error at offset {offset}: {message}")]
    Expression { offset: usize, message: String },

    #[error("unknown primitive `{name}` at offset {offset}")]
    UnknownPrimitive { name: String, offset: usize },

    #[error("unsupported activation `{0}`")]
    UnsupportedActivation(String),

    #[error("dimension inconsistency: {0}")]
    Dimension(String),

    #[error("missing controller: {0}")]
    MissingController(String),
}

impl ParseError {
    pub(crate) fn from_json(err: &serde_json::Error) -> Self {
        Self::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            c if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Token::Plus)),
            '-' => out.push((start, Token::Minus)),
            '*' => out.push((start, Token::Star)),
            '(' => out.push((start, Token::LParen)),
            ')' => out.push((start, Token::RParen)),
            c if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    i += 1;
                    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                        i += 1;
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| ParseError::Expression {
                    offset: start,
                    message: format!("invalid number `{lit}`"),
                })?;
                out.push((start, Token::Num(v)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(ParseError::Expression {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end: usize,
    state_dim: usize,
    control_dim: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::Expression {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Expr::sum(&lhs, &self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Expr::difference(&lhs, &self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = match (as_literal(&lhs), as_literal(&rhs)) {
                (Some(c), _) => Expr::scale(c, &rhs),
                (None, Some(c)) => Expr::scale(c, &lhs),
                (None, None) => Expr::product(&lhs, &rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Token::Minus) = self.peek() {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(match as_literal(&inner) {
                Some(c) => Expr::constant(-c),
                None => Expr::scale(-1.0, &inner),
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        let Some((_, tok)) = self.tokens.get(self.pos) else {
            return Err(self.err("unexpected end of expression"));
        };
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Expr::constant(*v)),
            Token::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Token::Ident(name) => {
                if let Some(Token::LParen) = self.peek() {
                    let prim = Primitive::from_name(name).ok_or_else(|| ParseError::UnknownPrimitive {
                        name: name.clone(),
                        offset,
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::unary(prim, &arg));
                }
                self.variable(name, offset)
            }
            other => {
                self.pos -= 1;
                Err(self.err(format!("unexpected token {other:?}")))
            }
        }
    }

    fn variable(&self, name: &str, offset: usize) -> Result<Expr, ParseError> {
        let (kind, digits) = name.split_at(1);
        let index: Option<usize> = digits.parse().ok();
        match (kind, index) {
            ("x", Some(i)) if i < self.state_dim => Ok(Expr::state(i)),
            ("u", Some(j)) if j < self.control_dim => Ok(Expr::control(j)),
            ("x", Some(i)) => Err(ParseError::Dimension(format!(
                "state variable x{i} at offset {offset} exceeds state_dim {}",
                self.state_dim
            ))),
            ("u", Some(j)) => Err(ParseError::Dimension(format!(
                "control variable u{j} at offset {offset} exceeds control_dim {}",
                self.control_dim
            ))),
            _ => Err(ParseError::Expression {
                offset,
                message: format!("unknown identifier `{name}`"),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token::RParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err("expected `)`")),
        }
    }
}

fn as_literal(e: &Expr) -> Option<f64> {
    match e.nodes() {
        [super::expr::Node::Const(c)] => Some(*c),
        _ => None,
    }
}

/// Parses one update expression over `x0..x{d-1}` and `u0..u{m-1}`.
pub fn parse_expr(text: &str, state_dim: usize, control_dim: usize) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        end: text.len(),
        state_dim,
        control_dim,
    };
    let e = p.expr()?;
    if p.pos != tokens.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}
