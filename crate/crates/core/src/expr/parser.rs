//! Precedence-climbing parser.
//!
//! Binding powers: `+ -` < `* /` < unary `-` < `^`, with `^` right-associative.

use super::lexer::{lex, Spanned, Tok};
use super::{BinOp, Func, Node};
use crate::error::ParseError;

const PREFIX_EXPECTED: &[&str] = &["number", "`x`", "`pi`", "`e`", "function name", "`(`", "`-`"];

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    /// Byte length of the source; the offset reported for errors at end of input.
    end: usize,
}

pub fn parse_source(src: &str) -> Result<Node, ParseError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: src.len(),
    };
    let root = p.expr_bp(0)?;
    if let Some(t) = p.peek() {
        return Err(ParseError::Syntax {
            offset: t.offset,
            expected: vec!["operator", "end of input"],
        });
    }
    Ok(root)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Spanned> {
        self.toks.get(self.pos)
    }

    fn advance(&mut self) -> Option<&'a Spanned> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn offset_here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn expr_bp(&mut self, min_bp: u8) -> Result<Node, ParseError> {
        let mut lhs = self.prefix()?;
        while let Some(t) = self.peek() {
            let (op, lbp, rbp) = match t.tok {
                Tok::Plus => (BinOp::Add, 1, 2),
                Tok::Minus => (BinOp::Sub, 1, 2),
                Tok::Star => (BinOp::Mul, 3, 4),
                Tok::Slash => (BinOp::Div, 3, 4),
                Tok::Caret => (BinOp::Pow, 7, 6),
                // Let the caller report stray operands or parentheses.
                _ => break,
            };
            if lbp < min_bp {
                break;
            }
            self.advance();
            let rhs = self.expr_bp(rbp)?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Node, ParseError> {
        let offset = self.offset_here();
        let Some(t) = self.advance() else {
            return Err(ParseError::Syntax {
                offset,
                expected: PREFIX_EXPECTED.to_vec(),
            });
        };
        match &t.tok {
            Tok::Num(v) => Ok(Node::Constant(*v)),
            Tok::Minus => {
                let inner = self.expr_bp(5)?;
                Ok(Node::Neg(Box::new(inner)))
            }
            Tok::LParen => {
                let inner = self.expr_bp(0)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Node::Variable),
                "pi" => Ok(Node::Constant(std::f64::consts::PI)),
                "e" => Ok(Node::Constant(std::f64::consts::E)),
                other => {
                    if let Some(func) = Func::from_name(other) {
                        match self.peek().map(|t| &t.tok) {
                            Some(Tok::LParen) => {
                                self.advance();
                                let arg = self.expr_bp(0)?;
                                self.expect_rparen()?;
                                Ok(Node::Call(func, Box::new(arg)))
                            }
                            _ => Err(ParseError::Syntax {
                                offset: self.offset_here(),
                                expected: vec!["`(`"],
                            }),
                        }
                    } else {
                        Err(ParseError::UnknownIdentifier {
                            offset: t.offset,
                            name: other.to_string(),
                        })
                    }
                }
            },
            _ => Err(ParseError::Syntax {
                offset: t.offset,
                expected: PREFIX_EXPECTED.to_vec(),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::RParen) => {
                self.advance();
                Ok(())
            }
            _ => Err(ParseError::Syntax {
                offset: self.offset_here(),
                expected: vec!["operator", "`)`"],
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str) -> Node {
        parse_source(src).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("1 + 2*3"), p("1 + (2*3)"));
        assert_eq!(p("1 - 2 - 3"), p("(1 - 2) - 3"));
        assert_eq!(p("2^3^2"), p("2^(3^2)"));
        assert_eq!(p("-x^2"), Node::Neg(Box::new(p("x^2"))));
        assert_eq!(p("-x*2"), p("(-x)*2"));
        assert_eq!(p("2^-3"), p("2^(-3)"));
    }

    #[test]
    fn call_structure() {
        assert_eq!(
            p("sin(x)/cos(x)"),
            Node::Binary(
                BinOp::Div,
                Box::new(Node::Call(Func::Sin, Box::new(Node::Variable))),
                Box::new(Node::Call(Func::Cos, Box::new(Node::Variable))),
            )
        );
    }

    #[test]
    fn named_constants() {
        assert_eq!(p("pi"), Node::Constant(std::f64::consts::PI));
        assert_eq!(p("e"), Node::Constant(std::f64::consts::E));
    }

    #[test]
    fn dangling_operator_reports_end_offset() {
        let err = parse_source("1 + x^").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 6, .. }));
    }

    #[test]
    fn unknown_identifier_is_its_own_error() {
        let err = parse_source("2*foo(x)").unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                offset: 2,
                name: "foo".into()
            }
        );
    }

    #[test]
    fn stray_operand_is_rejected() {
        let err = parse_source("2 x").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 2, .. }));
        let err = parse_source("sin(2 x)").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 6, .. }));
    }

    #[test]
    fn function_requires_parenthesis() {
        let err = parse_source("sin x").unwrap_err();
        assert!(matches!(
            err,
            ParseError::Syntax {
                offset: 4,
                expected
            } if expected == vec!["`(`"]
        ));
    }
}
