//! Expression language for polynomials, rational functions and points.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = ("-" | "+") unary | power ;
//! power   = atom [ "^" integer ] ;
//! atom    = integer | identifier | "(" expr ")" ;
//! point   = "O" | "(" expr "," expr ")" ;
//! ```
//!
//! `^` binds tighter than unary minus, so `-t^2` is `-(t^2)`. Exponents are
//! literal nonnegative integers and may not be chained. There is no
//! implicit multiplication.

use std::fmt;

use num_traits::ToPrimitive;
use thiserror::Error;

use super::{BiPoly, RatFn, XPoly};
use crate::exact::{Int, Rat};

/// Exponents above this are rejected rather than expanded.
pub const MAX_EXPONENT: u32 = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {kind}")]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    UnknownVariable(String),
    BadExponent,
    ChainedPower,
    DivisionByZero,
    DivisionByX(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected '{t}'"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable '{v}'"),
            ParseErrorKind::BadExponent => write!(
                f,
                "exponent must be a literal integer between 0 and {MAX_EXPONENT}"
            ),
            ParseErrorKind::ChainedPower => write!(f, "chained '^' needs parentheses"),
            ParseErrorKind::DivisionByZero => write!(f, "division by zero"),
            ParseErrorKind::DivisionByX(v) => {
                write!(f, "divisor must not involve '{v}'")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Int),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn show(&self) -> String {
        match self {
            Tok::Num(n) => n.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Sym(c) => c.to_string(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Num(s.parse().expect("digits")), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else {
            return Err(ParseError {
                column: col,
                kind: ParseErrorKind::UnexpectedChar(c),
            });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

#[derive(Debug, Clone)]
enum Node {
    Num(Int),
    Var(String, usize),
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>, usize),
    Pow(Box<Node>, u32),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn col(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        let kind = match self.peek() {
            Tok::End => ParseErrorKind::UnexpectedEnd,
            t => ParseErrorKind::UnexpectedToken(t.show()),
        };
        ParseError {
            column: self.col(),
            kind,
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Sym(op @ ('+' | '-')) = *self.peek() {
            let col = self.bump().1;
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs), col);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Sym(op @ ('*' | '/')) = *self.peek() {
            let col = self.bump().1;
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs), col);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let col = self.col();
        let e = match self.bump().0 {
            Tok::Num(n) => n.to_u32().filter(|&e| e <= MAX_EXPONENT),
            _ => None,
        }
        .ok_or(ParseError {
            column: col,
            kind: ParseErrorKind::BadExponent,
        })?;
        if *self.peek() == Tok::Sym('^') {
            return Err(ParseError {
                column: self.col(),
                kind: ParseErrorKind::ChainedPower,
            });
        }
        Ok(Node::Pow(Box::new(base), e))
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Node::Num(n))
            }
            Tok::Ident(s) => {
                let col = self.bump().1;
                Ok(Node::Var(s, col))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err(self.unexpected()),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }
}

/// A target for evaluating parsed expressions.
trait Domain {
    type Value: Clone;
    fn number(&self, n: &Int) -> Self::Value;
    fn variable(&self, name: &str) -> Option<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    fn div(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, ParseErrorKind>;
    fn pow(&self, a: &Self::Value, e: u32) -> Self::Value;
}

fn eval<D: Domain>(d: &D, node: &Node) -> Result<D::Value, ParseError> {
    Ok(match node {
        Node::Num(n) => d.number(n),
        Node::Var(name, col) => d.variable(name).ok_or_else(|| ParseError {
            column: *col,
            kind: ParseErrorKind::UnknownVariable(name.clone()),
        })?,
        Node::Neg(a) => d.neg(&eval(d, a)?),
        Node::Pow(a, e) => d.pow(&eval(d, a)?, *e),
        Node::Bin(op, a, b, col) => {
            let (x, y) = (eval(d, a)?, eval(d, b)?);
            match op {
                '+' => d.add(&x, &y),
                '-' => d.sub(&x, &y),
                '*' => d.mul(&x, &y),
                _ => d.div(&x, &y).map_err(|kind| ParseError {
                    column: *col,
                    kind,
                })?,
            }
        }
    })
}

struct Univariate<'a> {
    var: &'a str,
}

impl Domain for Univariate<'_> {
    type Value = RatFn;
    fn number(&self, n: &Int) -> RatFn {
        RatFn::constant(Rat::from_integer(n.clone()))
    }
    fn variable(&self, name: &str) -> Option<RatFn> {
        (name == self.var).then(RatFn::var)
    }
    fn add(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a + b
    }
    fn sub(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a - b
    }
    fn mul(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a * b
    }
    fn neg(&self, a: &RatFn) -> RatFn {
        -a
    }
    fn div(&self, a: &RatFn, b: &RatFn) -> Result<RatFn, ParseErrorKind> {
        a.div(b).map_err(|_| ParseErrorKind::DivisionByZero)
    }
    fn pow(&self, a: &RatFn, e: u32) -> RatFn {
        a.pow(e)
    }
}

struct Bivariate<'a> {
    param: &'a str,
    x: &'a str,
}

impl Domain for Bivariate<'_> {
    type Value = BiPoly;
    fn number(&self, n: &Int) -> BiPoly {
        XPoly::constant(RatFn::constant(Rat::from_integer(n.clone())))
    }
    fn variable(&self, name: &str) -> Option<BiPoly> {
        if name == self.param {
            Some(XPoly::constant(RatFn::var()))
        } else if name == self.x {
            Some(XPoly::x())
        } else {
            None
        }
    }
    fn add(&self, a: &BiPoly, b: &BiPoly) -> BiPoly {
        a.plus(b)
    }
    fn sub(&self, a: &BiPoly, b: &BiPoly) -> BiPoly {
        a.minus(b)
    }
    fn mul(&self, a: &BiPoly, b: &BiPoly) -> BiPoly {
        a.times(b)
    }
    fn neg(&self, a: &BiPoly) -> BiPoly {
        a.negate()
    }
    fn div(&self, a: &BiPoly, b: &BiPoly) -> Result<BiPoly, ParseErrorKind> {
        if b.is_zero() {
            return Err(ParseErrorKind::DivisionByZero);
        }
        let c = b
            .as_coefficient()
            .ok_or_else(|| ParseErrorKind::DivisionByX(self.x.to_string()))?;
        Ok(a.scale(&c.recip().map_err(|_| ParseErrorKind::DivisionByZero)?))
    }
    fn pow(&self, a: &BiPoly, e: u32) -> BiPoly {
        a.pow(e)
    }
}

fn parse_tree(text: &str) -> Result<Node, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let node = p.expr()?;
    p.finish()?;
    Ok(node)
}

/// Parse an element of Q(var).
pub fn parse_expr(text: &str, var: &str) -> Result<RatFn, ParseError> {
    eval(&Univariate { var }, &parse_tree(text)?)
}

/// Parse a polynomial in `x_var` whose coefficients are in Q(param).
pub fn parse_bipoly(text: &str, param: &str, x_var: &str) -> Result<BiPoly, ParseError> {
    eval(&Bivariate { param, x: x_var }, &parse_tree(text)?)
}

/// Parse a rational constant (an expression with no variables).
pub fn parse_constant(text: &str) -> Result<Rat, ParseError> {
    let f = eval(&Univariate { var: "" }, &parse_tree(text)?)?;
    Ok(f.as_constant().expect("no variables"))
}

/// Parse `"(x, y)"` or `"O"`; `None` is the point at infinity.
pub fn parse_point(text: &str, var: &str) -> Result<Option<(RatFn, RatFn)>, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    if let Tok::Ident(s) = p.peek() {
        if s == "O" && s != var {
            p.bump();
            p.finish()?;
            return Ok(None);
        }
    }
    p.expect('(')?;
    let x = p.expr()?;
    p.expect(',')?;
    let y = p.expr()?;
    p.expect(')')?;
    p.finish()?;
    let d = Univariate { var };
    Ok(Some((eval(&d, &x)?, eval(&d, &y)?)))
}

/// Render a point in the syntax accepted by [`parse_point`].
pub fn render_point(pt: Option<(&RatFn, &RatFn)>, var: &str) -> String {
    match pt {
        None => "O".into(),
        Some((x, y)) => format!("({}, {})", x.render(var), y.render(var)),
    }
}
