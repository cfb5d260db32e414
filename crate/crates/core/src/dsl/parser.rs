//! Recursive-descent parser.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' INTEGER)*
//! primary := NUMBER | 'x' | 'y' | 'pi' | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
//! ```
//!
//! Division is accepted only by subexpressions free of `x` and `y` that
//! evaluate to a finite nonzero value.

use std::fmt;

use super::{BinOp, Expr, Func};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier(String),
    NonIntegerExponent,
    DivisionByZero,
    NonConstantDivisor,
}

/// Failure with the byte offset where it was detected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax => write!(f, "syntax error at offset {}", self.offset)?,
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier '{s}' at offset {}", self.offset)?,
            ParseErrorKind::NonIntegerExponent => {
                write!(f, "exponent at offset {} must be a non-negative integer literal", self.offset)?
            }
            ParseErrorKind::DivisionByZero => write!(f, "division by zero at offset {}", self.offset)?,
            ParseErrorKind::NonConstantDivisor => write!(f, "divisor at offset {} depends on x or y", self.offset)?,
        }
        if !self.expected.is_empty() {
            write!(f, "; expected one of: {}", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

const OPERAND: &[&str] = &["number", "x", "y", "pi", "sin", "cos", "(", "-"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, bool),
    Ident(String),
    Sym(char),
    End,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> PResult<Self> {
        let mut p = Self { src, pos: 0, tok: Tok::End, tok_start: 0 };
        p.advance()?;
        Ok(p)
    }

    fn err(&self, kind: ParseErrorKind, expected: &[&'static str]) -> ParseError {
        ParseError { offset: self.tok_start, kind, expected: expected.to_vec() }
    }

    fn advance(&mut self) -> PResult<()> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        if self.pos >= bytes.len() {
            self.tok = Tok::End;
            return Ok(());
        }
        let c = bytes[self.pos];
        if c.is_ascii_digit() || c == b'.' {
            let start = self.pos;
            let mut integer = true;
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos < bytes.len() && bytes[self.pos] == b'.' {
                integer = false;
                self.pos += 1;
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
            if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
                let save = self.pos;
                self.pos += 1;
                if self.pos < bytes.len() && (bytes[self.pos] == b'+' || bytes[self.pos] == b'-') {
                    self.pos += 1;
                }
                if self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    integer = false;
                    while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                } else {
                    self.pos = save;
                }
            }
            let text = &self.src[start..self.pos];
            let v: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                kind: ParseErrorKind::Syntax,
                expected: vec!["number"],
            })?;
            self.tok = Tok::Num(v, integer);
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            self.tok = Tok::Ident(self.src[start..self.pos].to_string());
        } else if b"+-*/^()".contains(&c) {
            self.pos += 1;
            self.tok = Tok::Sym(c as char);
        } else {
            return Err(ParseError { offset: self.pos, kind: ParseErrorKind::Syntax, expected: vec![] });
        }
        Ok(())
    }

    fn expect_sym(&mut self, c: char, expected: &[&'static str]) -> PResult<()> {
        if self.tok == Tok::Sym(c) {
            self.advance()
        } else {
            Err(self.err(ParseErrorKind::Syntax, expected))
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let at = self.tok_start;
            let rhs = self.unary()?;
            if op == BinOp::Div {
                if !rhs.is_constant() {
                    return Err(ParseError { offset: at, kind: ParseErrorKind::NonConstantDivisor, expected: vec![] });
                }
                let v = rhs.eval(0.0, 0.0);
                if v == 0.0 || !v.is_finite() {
                    return Err(ParseError { offset: at, kind: ParseErrorKind::DivisionByZero, expected: vec![] });
                }
            }
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.tok == Tok::Sym('-') {
            self.advance()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let mut base = self.primary()?;
        while self.tok == Tok::Sym('^') {
            self.advance()?;
            match self.tok {
                Tok::Num(v, true) if v <= i32::MAX as f64 => {
                    base = Expr::Pow(Box::new(base), v as u32);
                    self.advance()?;
                }
                Tok::Num(..) | Tok::Sym('-') | Tok::Sym('(') | Tok::Ident(_) => {
                    return Err(self.err(ParseErrorKind::NonIntegerExponent, &["integer"]))
                }
                _ => return Err(self.err(ParseErrorKind::Syntax, &["integer"])),
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.tok.clone() {
            Tok::Num(v, _) => {
                self.advance()?;
                Ok(Expr::Num(v))
            }
            Tok::Sym('(') => {
                self.advance()?;
                let e = self.expr()?;
                self.expect_sym(')', &[")", "+", "-", "*", "/", "^"])?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "x" => {
                        self.advance()?;
                        return Ok(Expr::X);
                    }
                    "y" => {
                        self.advance()?;
                        return Ok(Expr::Y);
                    }
                    "pi" => {
                        self.advance()?;
                        return Ok(Expr::Pi);
                    }
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    _ => return Err(self.err(ParseErrorKind::UnknownIdentifier(name), OPERAND)),
                };
                self.advance()?;
                self.expect_sym('(', &["("])?;
                let arg = self.expr()?;
                self.expect_sym(')', &[")", "+", "-", "*", "/", "^"])?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(self.err(ParseErrorKind::Syntax, OPERAND)),
        }
    }
}

/// Parses a complete expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.err(ParseErrorKind::Syntax, &["end of input", "+", "-", "*", "/", "^"]));
    }
    Ok(e)
}
