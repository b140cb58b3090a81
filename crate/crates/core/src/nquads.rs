//! Line-oriented N-Quads reader restricted to named-graph quads.
//!
//! Every statement must carry an IRI graph label; triples in the default graph
//! are rejected. Lines starting with `#` are comments.

use thiserror::Error;

use crate::iri::{canonicalize_iri, Iri};
use crate::term::{Literal, Quad, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parses a whole document. Blank node labels are returned as written.
pub fn parse_nquads(text: &str) -> Result<Vec<Quad>, SyntaxError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let chars: Vec<char> = raw.chars().collect();
        let mut line = LineParser { chars: &chars, pos: 0, line: idx + 1 };
        if let Some(q) = line.statement()? {
            out.push(q);
        }
    }
    Ok(out)
}

/// Serializes quads one per line, in the order given.
pub fn write_nquads<'a>(quads: impl IntoIterator<Item = &'a Quad>) -> String {
    let mut out = String::new();
    for q in quads {
        out.push_str(&q.to_string());
        out.push('\n');
    }
    out
}

struct LineParser<'a> {
    chars: &'a [char],
    pos: usize,
    line: usize,
}

impl LineParser<'_> {
    fn err<T>(&self, at: usize, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError { line: self.line, column: at + 1, message: message.into() })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c == ' ' || c == '\t' || c == '\r') {
            self.pos += 1;
        }
    }

    fn at_end_or_comment(&mut self) -> bool {
        self.skip_ws();
        matches!(self.peek(), None | Some('#'))
    }

    fn statement(&mut self) -> Result<Option<Quad>, SyntaxError> {
        if self.at_end_or_comment() {
            return Ok(None);
        }
        let subject = match self.peek() {
            Some('<') => Term::iri(self.iri()?),
            Some('_') => self.blank()?,
            _ => return self.err(self.pos, "expected subject IRI or blank node"),
        };
        self.skip_ws();
        if self.peek() != Some('<') {
            return self.err(self.pos, "expected predicate IRI");
        }
        let predicate = self.iri()?;
        self.skip_ws();
        let object = match self.peek() {
            Some('<') => Term::iri(self.iri()?),
            Some('_') => self.blank()?,
            Some('"') => Term::literal(self.literal()?),
            _ => return self.err(self.pos, "expected object IRI, blank node or literal"),
        };
        self.skip_ws();
        let graph = match self.peek() {
            Some('<') => self.iri()?,
            Some('_') => return self.err(self.pos, "graph label must be an IRI"),
            Some('.') => return self.err(self.pos, "expected graph IRI (default-graph triples are not accepted)"),
            _ => return self.err(self.pos, "expected graph IRI"),
        };
        self.skip_ws();
        if self.peek() != Some('.') {
            return self.err(self.pos, "expected '.'");
        }
        self.pos += 1;
        if !self.at_end_or_comment() {
            return self.err(self.pos, "unexpected content after '.'");
        }
        Ok(Some(Quad { subject, predicate, object, graph }))
    }

    fn hex_escape(&mut self, digits: usize) -> Result<char, SyntaxError> {
        let start = self.pos;
        let mut value = 0u32;
        for _ in 0..digits {
            match self.peek().and_then(|c| c.to_digit(16)) {
                Some(d) => value = value * 16 + d,
                None => return self.err(self.pos, "invalid hex escape"),
            }
            self.pos += 1;
        }
        match char::from_u32(value) {
            Some(c) => Ok(c),
            None => self.err(start, "escape is not a unicode scalar value"),
        }
    }

    fn iri(&mut self) -> Result<Iri, SyntaxError> {
        let open = self.pos;
        self.pos += 1;
        let mut body = String::new();
        // Column of each character of `body`, for mapping IRI errors back.
        let mut columns = Vec::new();
        loop {
            let at = self.pos;
            match self.peek() {
                None => return self.err(open, "unterminated IRI"),
                Some('>') => {
                    self.pos += 1;
                    break;
                }
                Some('\\') => {
                    self.pos += 1;
                    let c = match self.peek() {
                        Some('u') => {
                            self.pos += 1;
                            self.hex_escape(4)?
                        }
                        Some('U') => {
                            self.pos += 1;
                            self.hex_escape(8)?
                        }
                        _ => return self.err(at, "only \\u and \\U escapes are allowed in IRIs"),
                    };
                    body.push(c);
                    columns.push(at);
                }
                Some(c) => {
                    self.pos += 1;
                    body.push(c);
                    columns.push(at);
                }
            }
        }
        canonicalize_iri(&body).or_else(|e| {
            let at = e.position().and_then(|p| columns.get(p).copied()).unwrap_or(open);
            self.err(at, format!("invalid IRI: {e}"))
        })
    }

    fn blank(&mut self) -> Result<Term, SyntaxError> {
        let start = self.pos;
        if self.chars.get(self.pos + 1) != Some(&':') {
            return self.err(start, "expected '_:'");
        }
        self.pos += 2;
        let label_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || matches!(c, '_' | '-' | '.')) {
            self.pos += 1;
        }
        while self.pos > label_start && self.chars[self.pos - 1] == '.' {
            self.pos -= 1;
        }
        if self.pos == label_start {
            return self.err(start, "empty blank node label");
        }
        let label: String = self.chars[label_start..self.pos].iter().collect();
        Ok(Term::blank(label))
    }

    fn literal(&mut self) -> Result<Literal, SyntaxError> {
        let open = self.pos;
        self.pos += 1;
        let mut lexical = String::new();
        loop {
            let at = self.pos;
            match self.peek() {
                None => return self.err(open, "unterminated string literal"),
                Some('"') => {
                    self.pos += 1;
                    break;
                }
                Some('\\') => {
                    self.pos += 1;
                    let c = match self.peek() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => {
                            self.pos += 1;
                            lexical.push(self.hex_escape(4)?);
                            continue;
                        }
                        Some('U') => {
                            self.pos += 1;
                            lexical.push(self.hex_escape(8)?);
                            continue;
                        }
                        _ => return self.err(at, "invalid escape sequence"),
                    };
                    self.pos += 1;
                    lexical.push(c);
                }
                Some(c) => {
                    self.pos += 1;
                    lexical.push(c);
                }
            }
        }
        match self.peek() {
            Some('^') => {
                if self.chars.get(self.pos + 1) != Some(&'^') {
                    return self.err(self.pos, "expected '^^'");
                }
                self.pos += 2;
                if self.peek() != Some('<') {
                    return self.err(self.pos, "expected datatype IRI");
                }
                let dt = self.iri()?;
                Ok(Literal::typed(lexical, dt))
            }
            Some('@') => {
                self.pos += 1;
                let start = self.pos;
                let mut seg_len = 0;
                let mut first = true;
                loop {
                    match self.peek() {
                        Some(c) if c.is_ascii_alphabetic() || (!first && c.is_ascii_digit()) => {
                            seg_len += 1;
                            self.pos += 1;
                        }
                        Some('-') if seg_len > 0 => {
                            first = false;
                            seg_len = 0;
                            self.pos += 1;
                        }
                        _ => break,
                    }
                }
                if seg_len == 0 {
                    return self.err(start, "malformed language tag");
                }
                let tag: String = self.chars[start..self.pos].iter().collect();
                Ok(Literal::lang(lexical, &tag))
            }
            _ => Ok(Literal::plain(lexical)),
        }
    }
}
