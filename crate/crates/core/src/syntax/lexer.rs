// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

use crate::error::{ParseError, ParseErrorKind};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Unsigned integer literal; sign is handled by the parser.
    Int(u64),
    /// Unsigned literal with a fraction or exponent.
    Float(f64),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Longest match first.
const PUNCT: &[&str] = &[
    ":=", "!=", "<=", ">=", "{", "}", "(", ")", ",", ";", ":", "=", "<", ">", "+", "-", "*",
];

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start_col = col;
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line,
                col: start_col,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            let mut is_float = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                is_float = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    is_float = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let bad = |what: &str| {
                ParseError::new(ParseErrorKind::Syntax, line, start_col, format!("bad {what} `{text}`"))
            };
            let tok = if is_float {
                Tok::Float(text.parse().map_err(|_| bad("number"))?)
            } else {
                Tok::Int(text.parse().map_err(|_| bad("integer"))?)
            };
            out.push(Token {
                tok,
                line,
                col: start_col,
            });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                i += p.len();
                col += p.len();
                out.push(Token {
                    tok: Tok::Punct(p),
                    line,
                    col: start_col,
                });
            }
            None => {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    line,
                    start_col,
                    format!("unexpected character `{c}`"),
                ))
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_with_positions() {
        let toks = tokenize("a := b mod 2 # note\n  x != -4.5e1").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("a".into()),
                Tok::Punct(":="),
                Tok::Ident("b".into()),
                Tok::Ident("mod".into()),
                Tok::Int(2),
                Tok::Ident("x".into()),
                Tok::Punct("!="),
                Tok::Punct("-"),
                Tok::Float(45.0),
                Tok::Eof,
            ]
        );
        assert_eq!((toks[5].line, toks[5].col), (2, 3));
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("a := $").unwrap_err();
        assert_eq!((err.line, err.col), (1, 6));
    }
}
