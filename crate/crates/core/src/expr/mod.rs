//! A small expression language for generator functions of one variable.
//!
//! The grammar accepts decimal literals, `x`, the constants `pi` and `e`,
//! the operators `+ - * / ^` (with `^` right-associative and binding above
//! unary minus), parentheses, and thirteen elementary functions. Parsed
//! expressions are immutable and evaluation is pure, so an [`Expression`]
//! can be shared freely across threads.

mod eval;
mod jet;
mod lexer;
mod parser;

pub use jet::{Jet, JET_ORDER};
pub(crate) use jet::outer_powf;

use crate::error::{EvalError, ParseError};
use std::fmt;
use std::str::FromStr;

/// Binary operators in precedence order `+ -` < `* /` < `^`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// The supported elementary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
    Asin,
    Acos,
    Atan,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "asin" => Func::Asin,
            "acos" => Func::Acos,
            "atan" => Func::Atan,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Asin => "asin",
            Func::Acos => "acos",
            Func::Atan => "atan",
        }
    }

    /// Raw application without domain checks; out-of-domain inputs yield NaN
    /// and are filtered by the callers.
    pub fn apply(self, u: f64) -> f64 {
        match self {
            Func::Sin => u.sin(),
            Func::Cos => u.cos(),
            Func::Tan => u.tan(),
            Func::Sinh => u.sinh(),
            Func::Cosh => u.cosh(),
            Func::Tanh => u.tanh(),
            Func::Exp => u.exp(),
            Func::Log => u.ln(),
            Func::Sqrt => u.sqrt(),
            Func::Abs => u.abs(),
            Func::Asin => u.asin(),
            Func::Acos => u.acos(),
            Func::Atan => u.atan(),
        }
    }
}

/// Expression tree. Unary minus is its own node so that `-x^2` keeps its
/// conventional reading `-(x^2)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Constant(f64),
    Variable,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Constant(_) | Node::Variable | Node::Call(..) => 5,
        Node::Binary(BinOp::Pow, ..) => 4,
        Node::Neg(_) => 3,
        Node::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Node::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
    }
}

impl fmt::Display for Node {
    /// Canonical form. Any tree produced by the parser re-parses to an
    /// identical tree; negative constants built programmatically would not.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(f: &mut fmt::Formatter<'_>, node: &Node) -> fmt::Result {
            write!(f, "({node})")
        }
        match self {
            Node::Constant(v) => write!(f, "{v}"),
            Node::Variable => write!(f, "x"),
            Node::Call(func, arg) => write!(f, "{}({arg})", func.name()),
            Node::Neg(inner) => {
                write!(f, "-")?;
                if precedence(inner) < 3 || matches!(**inner, Node::Neg(_)) {
                    paren(f, inner)
                } else {
                    write!(f, "{inner}")
                }
            }
            Node::Binary(op, l, r) => {
                let p = match op {
                    BinOp::Add | BinOp::Sub => 1,
                    BinOp::Mul | BinOp::Div => 2,
                    BinOp::Pow => 4,
                };
                let left_parens = if *op == BinOp::Pow {
                    precedence(l) <= p
                } else {
                    precedence(l) < p
                };
                if left_parens {
                    paren(f, l)?;
                } else {
                    write!(f, "{l}")?;
                }
                match op {
                    BinOp::Add => write!(f, " + ")?,
                    BinOp::Sub => write!(f, " - ")?,
                    BinOp::Mul => write!(f, " * ")?,
                    BinOp::Div => write!(f, " / ")?,
                    BinOp::Pow => write!(f, "^")?,
                }
                let right_parens = if *op == BinOp::Pow {
                    precedence(r) < p
                } else {
                    precedence(r) <= p || matches!(**r, Node::Neg(_))
                };
                if right_parens {
                    paren(f, r)
                } else {
                    write!(f, "{r}")
                }
            }
        }
    }
}

/// A parsed, immutable expression in one variable.
///
/// Equality compares syntax trees; the retained source text is ignored, so
/// `"x+1"` and `"x + 1"` are equal.
#[derive(Debug, Clone)]
pub struct Expression {
    root: Node,
    source: String,
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let root = parser::parse_source(source)?;
        Ok(Expression {
            root,
            source: source.to_string(),
        })
    }

    /// The text this expression was parsed from.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Node {
        &self.root
    }

    /// Degree-4 Taylor jet at `point`.
    pub fn eval_jet(&self, point: f64) -> Result<Jet, EvalError> {
        eval::eval_jet(&self.root, point)
    }

    /// Plain value at `point`, cheaper than a jet when derivatives are not
    /// needed and defined on a slightly larger domain (`sqrt(0)`, `asin(1)`).
    pub fn value(&self, point: f64) -> Result<f64, EvalError> {
        eval::eval_value(&self.root, point)
    }

    /// `order`-th derivative at `point`, orders 0 through 4.
    pub fn derivative(&self, point: f64, order: usize) -> Result<f64, EvalError> {
        self.eval_jet(point)?.derivative(order)
    }
}

impl FromStr for Expression {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expression::parse(s)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}
