//! The candidate-ψ expression language.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-2^2`
//! is `-(2^2) = -4` while `2^-1` is `0.5`. There is no implicit
//! multiplication. `log` is the natural logarithm; `exp` and `sqrt` are the
//! other built-in functions. Any other identifier is a free parameter that
//! must be bound before evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::error::EvalError;
use crate::scalar::Scalar;
use crate::universal_aux::{AuxKind, AuxiliaryFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Log,
    Exp,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "log" => Some(Func::Log),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Param(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) | Expr::Var => {}
            Expr::Param(name) => {
                out.insert(name.clone());
            }
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_params(out),
            Expr::Binary(_, a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    fn bind<T: Scalar>(&self, bindings: &BTreeMap<String, T>) -> Result<Node<T>, ExprError> {
        Ok(match self {
            Expr::Num(v) => Node::Const(T::lit(*v)),
            Expr::Var => Node::Var,
            Expr::Param(name) => Node::Const(
                *bindings
                    .get(name)
                    .ok_or_else(|| ExprError::UnboundParameter(name.clone()))?,
            ),
            Expr::Neg(e) => Node::Neg(Box::new(e.bind(bindings)?)),
            Expr::Binary(op, a, b) => Node::Binary(*op, Box::new(a.bind(bindings)?), Box::new(b.bind(bindings)?)),
            Expr::Call(f, e) => Node::Call(*f, Box::new(e.bind(bindings)?)),
        })
    }
}

/// Fully parenthesized rendering; re-parsing it yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var => write!(f, "x"),
            Expr::Param(name) => write!(f, "{name}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

/// Expression with parameters substituted, ready for repeated evaluation.
#[derive(Debug, Clone)]
enum Node<T> {
    Const(T),
    Var,
    Neg(Box<Node<T>>),
    Binary(BinOp, Box<Node<T>>, Box<Node<T>>),
    Call(Func, Box<Node<T>>),
}

impl<T: Scalar> Node<T> {
    fn eval(&self, x: T) -> Result<T, EvalError> {
        let at = x.as_f64();
        let v = match self {
            Node::Const(c) => *c,
            Node::Var => x,
            Node::Neg(e) => -e.eval(x)?,
            Node::Binary(op, a, b) => {
                let a = a.eval(x)?;
                let b = b.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == T::zero() {
                            return Err(EvalError::DivisionByZero { x: at });
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
            Node::Call(func, e) => {
                let a = e.eval(x)?;
                match func {
                    Func::Log => {
                        if a <= T::zero() {
                            return Err(EvalError::LogDomain { x: at });
                        }
                        a.ln()
                    }
                    Func::Exp => a.exp(),
                    Func::Sqrt => {
                        if a < T::zero() {
                            return Err(EvalError::SqrtDomain { x: at });
                        }
                        a.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { x: at })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: found {found}, expected one of {}", expected.join(", "))]
    Syntax { offset: usize, found: String, expected: Vec<&'static str> },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("numeric literal at byte {offset} is not a finite number")]
    BadNumber { offset: usize },
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl ExprError {
    /// Byte offset of a syntax-level failure, if any.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ExprError::Syntax { offset, .. }
            | ExprError::UnknownFunction { offset, .. }
            | ExprError::BadNumber { offset } => Some(*offset),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

const ATOM_START: &[&str] = &["number", "'x'", "identifier", "'('", "'-'"];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent only when followed by digits, otherwise `e` starts an identifier
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
                let v: f64 = text.parse().map_err(|_| ExprError::BadNumber { offset: start })?;
                if !v.is_finite() {
                    return Err(ExprError::BadNumber { offset: start });
                }
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    offset: start,
                    found: format!("character {ch:?}"),
                    expected: vec!["number", "identifier", "operator", "'('", "')'"],
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ExprError {
        ExprError::Syntax {
            offset: self.offset(),
            found: self.peek().describe(),
            expected: expected.to_vec(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&["')'", "'+'", "'-'", "'*'", "'/'", "'^'"]))
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name).ok_or(ExprError::UnknownFunction { name, offset })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else if name == "x" {
                    Ok(Expr::Var)
                } else {
                    Ok(Expr::Param(name))
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            _ => Err(self.unexpected(ATOM_START)),
        }
    }
}

/// A parsed candidate auxiliary function.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiExpression {
    source: String,
    ast: Expr,
    free_params: BTreeSet<String>,
}

impl PsiExpression {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn free_params(&self) -> &BTreeSet<String> {
        &self.free_params
    }

    /// Evaluates at `x` with the given parameter bindings.
    pub fn eval<T: Scalar>(&self, x: T, bindings: &BTreeMap<String, T>) -> Result<T, ExprError> {
        let node = self.ast.bind(bindings)?;
        Ok(node.eval(x)?)
    }

    /// Binds the parameters, returning a point-wise evaluator.
    pub fn bind<T: Scalar>(
        &self,
        bindings: &BTreeMap<String, T>,
    ) -> Result<impl Fn(T) -> Result<T, EvalError> + Send + Sync + Clone + 'static, ExprError> {
        let node = Arc::new(self.ast.bind(bindings)?);
        Ok(move |x: T| node.eval(x))
    }

    /// Wraps the expression as an auxiliary function with domain start `x_star`.
    pub fn to_auxiliary<T: Scalar>(
        &self,
        bindings: &BTreeMap<String, T>,
        x_star: T,
    ) -> Result<AuxiliaryFunction<T>, ExprError> {
        let f = self.bind(bindings)?;
        Ok(AuxiliaryFunction::new(f, x_star, AuxKind::UserExpression).with_source(self.source.clone()))
    }
}

impl fmt::Display for PsiExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ast)
    }
}

/// Parses `source` into a [`PsiExpression`].
pub fn parse_psi(source: &str) -> Result<PsiExpression, ExprError> {
    if source.trim().is_empty() {
        return Err(ExprError::Empty);
    }
    let toks = lex(source)?;
    let mut p = Parser { toks, pos: 0 };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(&["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"]));
    }
    let mut free_params = BTreeSet::new();
    ast.collect_params(&mut free_params);
    Ok(PsiExpression { source: source.to_string(), ast, free_params })
}

/// Convenience: parse, bind and evaluate in one go.
pub fn eval_str<T: Scalar>(source: &str, x: T, bindings: &BTreeMap<String, T>) -> Result<T, ExprError> {
    parse_psi(source)?.eval(x, bindings)
}
