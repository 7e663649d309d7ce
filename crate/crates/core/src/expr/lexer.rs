//! Tokenizer for the expression grammar.

use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

/// Token plus the byte offset of its first character in the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Spanned {
    pub tok: Tok,
    pub offset: usize,
}

/// Tokenize the full source up front. Offsets are byte positions.
pub fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                out.push(Spanned { tok: Tok::Plus, offset: i });
                i += 1;
            }
            b'-' => {
                out.push(Spanned { tok: Tok::Minus, offset: i });
                i += 1;
            }
            b'*' => {
                out.push(Spanned { tok: Tok::Star, offset: i });
                i += 1;
            }
            b'/' => {
                out.push(Spanned { tok: Tok::Slash, offset: i });
                i += 1;
            }
            b'^' => {
                out.push(Spanned { tok: Tok::Caret, offset: i });
                i += 1;
            }
            b'(' => {
                out.push(Spanned { tok: Tok::LParen, offset: i });
                i += 1;
            }
            b')' => {
                out.push(Spanned { tok: Tok::RParen, offset: i });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let (tok, next) = lex_number(src, i)?;
                out.push(Spanned { tok, offset: i });
                i = next;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(src[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: i,
                    expected: vec!["number", "identifier", "operator", "parenthesis"],
                })
            }
        }
    }
    Ok(out)
}

/// Lex a decimal literal starting at `start`. The exponent part is consumed
/// only when an `e`/`E` is followed by an optionally signed digit string, so
/// `2e` stays two tokens while `2e3` is one number.
fn lex_number(src: &str, start: usize) -> Result<(Tok, usize), ParseError> {
    let bytes = src.as_bytes();
    let mut i = start;
    let mut saw_digit = false;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        saw_digit = true;
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            saw_digit = true;
            i += 1;
        }
    }
    if !saw_digit {
        return Err(ParseError::Syntax {
            offset: start,
            expected: vec!["digit"],
        });
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
    let text = &src[start..i];
    let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
        offset: start,
        expected: vec!["number"],
    })?;
    if !value.is_finite() {
        return Err(ParseError::Syntax {
            offset: start,
            expected: vec!["finite number"],
        });
    }
    Ok((Tok::Num(value), i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_are_byte_positions() {
        let toks = lex("1 + x^").unwrap();
        assert_eq!(toks.len(), 4);
        assert_eq!(toks[3], Spanned { tok: Tok::Caret, offset: 5 });
    }

    #[test]
    fn exponent_needs_digits() {
        let toks = lex("2e").unwrap();
        assert_eq!(toks[0].tok, Tok::Num(2.0));
        assert_eq!(toks[1].tok, Tok::Ident("e".into()));
        let toks = lex("2e-3").unwrap();
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].tok, Tok::Num(2e-3));
    }

    #[test]
    fn bare_dot_is_rejected() {
        assert!(matches!(lex("."), Err(ParseError::Syntax { offset: 0, .. })));
    }

    #[test]
    fn oversized_literal_is_rejected() {
        assert!(lex("1e999").is_err());
    }
}
