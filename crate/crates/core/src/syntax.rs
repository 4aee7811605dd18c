//! Tokenizer and cursor shared by the formula, LTL and specification parsers.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Position in the source text, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError { span, message: message.into() }
    }
}

// Longest first so that `<->` wins over `->` and `..` over `.`.
const PUNCTS: [&str; 26] = [
    "<->", "->", "!=", "..", "(", ")", "[", "]", "{", "}", ",", ".", ":", ";", "=", "!", "&", "|",
    "@", "#", "+", "-", "*", "%", "~", "/",
];

/// Splits `src` into tokens. `//` starts a comment running to end of line.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < bytes.len() {
        let c = bytes[i];
        let span = Span { line, col };
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), span });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let n = src[start..i]
                .parse::<i64>()
                .map_err(|_| ParseError::new(span, "integer literal out of range"))?;
            out.push(Token { tok: Tok::Int(n), span });
            continue;
        }
        match PUNCTS.iter().find(|p| src[i..].starts_with(**p)) {
            Some(p) => {
                i += p.len();
                col += p.len();
                out.push(Token { tok: Tok::Punct(p), span });
            }
            None => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::new(span, format!("unexpected character `{ch}`")));
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, col } });
    Ok(out)
}

/// Read position over a token slice. The slice must end with [`Tok::Eof`].
#[derive(Clone, Debug)]
pub struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Token]) -> Self {
        debug_assert!(matches!(toks.last(), Some(Token { tok: Tok::Eof, .. })));
        Cursor { toks, pos: 0 }
    }

    pub fn tokens(&self) -> &'a [Token] {
        self.toks
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn reset(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub fn peek(&self) -> &'a Tok {
        &self.peek_token().tok
    }

    pub fn peek_at(&self, ahead: usize) -> &'a Tok {
        let i = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn peek_token(&self) -> &'a Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    pub fn span(&self) -> Span {
        self.peek_token().span
    }

    pub fn next(&mut self) -> &'a Token {
        let t = self.peek_token();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.span(), message)
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(format!("expected {wanted}, found {}", self.peek()))
    }

    pub fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Span), ParseError> {
        match self.peek() {
            Tok::Ident(s) => {
                let span = self.span();
                self.next();
                Ok((s.clone(), span))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub fn expect_int(&mut self) -> Result<i64, ParseError> {
        let negative = self.eat_punct("-");
        match self.peek() {
            Tok::Int(n) => {
                let n = *n;
                self.next();
                Ok(if negative { -n } else { n })
            }
            _ => Err(self.unexpected("integer")),
        }
    }

    /// An identifier, optionally followed by literal indices `[3]` which are
    /// folded into the name (`fork[1]`).
    pub fn expect_name(&mut self) -> Result<(String, Span), ParseError> {
        let (mut name, span) = self.expect_ident()?;
        while self.is_punct("[") && matches!(self.peek_at(1), Tok::Int(_)) {
            self.next();
            let n = self.expect_int()?;
            self.expect_punct("]")?;
            name = format!("{name}[{n}]");
        }
        Ok((name, span))
    }

    pub fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

/// True for names that print back as a single [`Cursor::expect_name`] token run.
pub fn is_plain_name(name: &str) -> bool {
    let base_end = name.find('[').unwrap_or(name.len());
    let base = &name[..base_end];
    let mut chars = base.chars();
    let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    if !head_ok || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return false;
    }
    let mut rest = &name[base_end..];
    while !rest.is_empty() {
        let Some(close) = rest.find(']') else { return false };
        if !rest.starts_with('[') || rest[1..close].parse::<i64>().is_err() {
            return false;
        }
        rest = &rest[close + 1..];
    }
    true
}
