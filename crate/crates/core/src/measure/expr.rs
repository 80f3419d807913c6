//! Density expressions over the real variable `t` and complex literals.
//!
//! Grammar (usual precedence, `^` binds tightest and takes an integer):
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := ("-" | "+") unary | power
//! power := atom ("^" ["-"] integer)?
//! atom  := number ["i"] | "i" | "t" | "pi" | func "(" expr ")" | "(" expr ")"
//! func  := "exp" | "log" | "sqrt"
//! ```
//!
//! Numeric literals are kept as text until compiled at a precision, so
//! `-3/7+4i/7` is rounded once per operation at the working precision.

use std::fmt;

use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::BigComplex;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("cannot parse `{source_text}` at offset {offset}: {message}")]
pub struct ExprError {
    pub source_text: String,
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(String),
    Imag,
    Pi,
    T,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn depends_on_t(&self) -> bool {
        match self {
            Expr::T => true,
            Expr::Num(_) | Expr::Imag | Expr::Pi => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Log(a) | Expr::Sqrt(a) => a.depends_on_t(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.depends_on_t() || b.depends_on_t()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let mut lx = Lexer { src, toks: Vec::new() };
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent only when followed by digits, so `2exp(t)` stays an error
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
            let text = &src[start..i];
            if text.chars().filter(|&ch| ch == '.').count() > 1 || text == "." {
                return Err(lx.err(start, "malformed number"));
            }
            lx.toks.push((Tok::Num(text.to_string()), start));
            // `4i` is an imaginary literal
            if i < bytes.len() && bytes[i] == b'i' && !(i + 1 < bytes.len() && bytes[i + 1].is_ascii_alphanumeric()) {
                lx.toks.push((Tok::Op('*'), i));
                lx.toks.push((Tok::Ident("i".into()), i));
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            lx.toks.push((Tok::Ident(src[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            lx.toks.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(lx.err(i, &format!("unexpected character `{c}`")));
        }
    }
    Ok(lx.toks)
}

impl Lexer<'_> {
    fn err(&self, offset: usize, msg: &str) -> ExprError {
        ExprError {
            source_text: self.src.to_string(),
            offset,
            message: msg.to_string(),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src.len(), |(_, o)| *o)
    }

    fn err(&self, msg: &str) -> ExprError {
        ExprError {
            source_text: self.src.to_string(),
            offset: self.offset(),
            message: msg.to_string(),
        }
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Num(n)) if n.chars().all(|c| c.is_ascii_digit()) => {
                self.pos += 1;
                let e: i32 = n.parse().map_err(|_| self.err("exponent out of range"))?;
                Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
            }
            _ => Err(self.err("exponent must be an integer literal")),
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "t" => Ok(Expr::T),
                    "i" => Ok(Expr::Imag),
                    "pi" => Ok(Expr::Pi),
                    "exp" | "log" | "ln" | "sqrt" => {
                        if !self.eat('(') {
                            return Err(self.err("expected `(` after function name"));
                        }
                        let arg = Box::new(self.expr()?);
                        if !self.eat(')') {
                            return Err(self.err("expected `)`"));
                        }
                        Ok(match name.as_str() {
                            "exp" => Expr::Exp(arg),
                            "sqrt" => Expr::Sqrt(arg),
                            _ => Expr::Log(arg),
                        })
                    }
                    other => Err(self.err(&format!("unknown identifier `{other}`"))),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            _ => Err(self.err("expected a value")),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser { src, toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Expression tree with constants folded at a fixed precision.
#[derive(Clone, Debug)]
pub enum Compiled {
    Const(BigComplex),
    T,
    Neg(Box<Compiled>),
    Add(Box<Compiled>, Box<Compiled>),
    Sub(Box<Compiled>, Box<Compiled>),
    Mul(Box<Compiled>, Box<Compiled>),
    Div(Box<Compiled>, Box<Compiled>),
    Pow(Box<Compiled>, i32),
    Exp(Box<Compiled>),
    Log(Box<Compiled>),
    Sqrt(Box<Compiled>),
}

fn parse_decimal(text: &str, prec: u32) -> BigComplex {
    let v = Float::parse(text).expect("lexer only emits valid decimals");
    BigComplex::from_real(Float::with_val(prec, v))
}

pub fn compile(e: &Expr, prec: u32) -> Compiled {
    use Compiled as C;
    let node = match e {
        Expr::Num(s) => C::Const(parse_decimal(s, prec)),
        Expr::Imag => C::Const(BigComplex::i(prec)),
        Expr::Pi => C::Const(BigComplex::from_real(BigComplex::pi(prec))),
        Expr::T => C::T,
        Expr::Neg(a) => C::Neg(Box::new(compile(a, prec))),
        Expr::Add(a, b) => C::Add(Box::new(compile(a, prec)), Box::new(compile(b, prec))),
        Expr::Sub(a, b) => C::Sub(Box::new(compile(a, prec)), Box::new(compile(b, prec))),
        Expr::Mul(a, b) => C::Mul(Box::new(compile(a, prec)), Box::new(compile(b, prec))),
        Expr::Div(a, b) => C::Div(Box::new(compile(a, prec)), Box::new(compile(b, prec))),
        Expr::Pow(a, k) => C::Pow(Box::new(compile(a, prec)), *k),
        Expr::Exp(a) => C::Exp(Box::new(compile(a, prec))),
        Expr::Log(a) => C::Log(Box::new(compile(a, prec))),
        Expr::Sqrt(a) => C::Sqrt(Box::new(compile(a, prec))),
    };
    if !e.depends_on_t() {
        if let C::Const(_) = node {
            return node;
        }
        return C::Const(node.eval(&BigComplex::zero(prec)));
    }
    node
}

impl Compiled {
    pub fn eval(&self, t: &BigComplex) -> BigComplex {
        use Compiled as C;
        match self {
            C::Const(c) => c.clone(),
            C::T => t.clone(),
            C::Neg(a) => -a.eval(t),
            C::Add(a, b) => a.eval(t) + b.eval(t),
            C::Sub(a, b) => a.eval(t) - b.eval(t),
            C::Mul(a, b) => a.eval(t) * b.eval(t),
            C::Div(a, b) => a.eval(t) / b.eval(t),
            C::Pow(a, k) => a.eval(t).powi(*k),
            C::Exp(a) => a.eval(t).exp(),
            C::Log(a) => a.eval(t).ln(),
            C::Sqrt(a) => a.eval(t).sqrt(),
        }
    }
}

/// Source text plus parsed tree of a density on one interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DensityExpr {
    source: String,
    tree: Expr,
}

impl DensityExpr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        Ok(DensityExpr {
            source: src.to_string(),
            tree: parse_expr(src)?,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn tree(&self) -> &Expr {
        &self.tree
    }

    pub fn compile(&self, prec: u32) -> Compiled {
        compile(&self.tree, prec)
    }
}

impl TryFrom<String> for DensityExpr {
    type Error = ExprError;
    fn try_from(s: String) -> Result<Self, ExprError> {
        DensityExpr::parse(&s)
    }
}

impl From<DensityExpr> for String {
    fn from(d: DensityExpr) -> String {
        d.source
    }
}

impl fmt::Display for DensityExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// Parses a constant such as `-3/7+4i/7`, `2.5`, `1e-3` or `5/9+3i/4`.
pub fn parse_complex_literal(src: &str, prec: u32) -> Result<BigComplex, ExprError> {
    let e = parse_expr(src)?;
    if e.depends_on_t() {
        return Err(ExprError {
            source_text: src.to_string(),
            offset: 0,
            message: "complex literal must not depend on t".into(),
        });
    }
    match compile(&e, prec) {
        Compiled::Const(c) => Ok(c),
        _ => unreachable!("constant expressions fold"),
    }
}
