use super::parser::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Word(String),
    /// Digit-led run: integers and timestamps.
    Number(String),
    Iri(String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Eq,
    Carets,
    At,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("'{w}'"),
            Tok::Number(n) => format!("'{n}'"),
            Tok::Iri(i) => format!("<{i}>"),
            Tok::Str(_) => "string".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Eq => "'='".into(),
            Tok::Carets => "'^^'".into(),
            Tok::At => "'@'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn error(&self, line: usize, column: usize, expected: &[&str], found: String) -> ParseError {
        ParseError {
            line,
            column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn hex(&mut self, digits: usize) -> Result<char, ParseError> {
        let (line, column) = (self.line, self.column);
        let mut value = 0u32;
        for _ in 0..digits {
            match self.peek().and_then(|c| c.to_digit(16)) {
                Some(d) => {
                    self.bump();
                    value = value * 16 + d;
                }
                None => {
                    let found = self.peek().map(|c| format!("{c:?}")).unwrap_or("end of input".into());
                    return Err(self.error(self.line, self.column, &["hex digit"], found));
                }
            }
        }
        char::from_u32(value)
            .ok_or_else(|| self.error(line, column, &["unicode scalar value"], format!("{value:#x}")))
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut lx = Lexer { chars: text.chars().peekable(), line: 1, column: 1 };
    let mut out = Vec::new();
    loop {
        while matches!(lx.peek(), Some(c) if c.is_whitespace()) {
            lx.bump();
        }
        let (line, column) = (lx.line, lx.column);
        let Some(c) = lx.peek() else {
            out.push(Spanned { tok: Tok::Eof, line, column });
            return Ok(out);
        };
        let tok = match c {
            '#' => {
                while matches!(lx.peek(), Some(c) if c != '\n') {
                    lx.bump();
                }
                continue;
            }
            '{' | '}' | '(' | ')' | ',' | '=' | '@' => {
                lx.bump();
                match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '=' => Tok::Eq,
                    _ => Tok::At,
                }
            }
            '^' => {
                lx.bump();
                if lx.peek() != Some('^') {
                    return Err(lx.error(line, column, &["'^^'"], "'^'".into()));
                }
                lx.bump();
                Tok::Carets
            }
            '<' => {
                lx.bump();
                let mut body = String::new();
                loop {
                    match lx.bump() {
                        Some('>') => break,
                        Some('\n') | None => {
                            return Err(lx.error(line, column, &["'>'"], "unterminated IRI".into()))
                        }
                        Some(c) => body.push(c),
                    }
                }
                Tok::Iri(body)
            }
            '"' => {
                lx.bump();
                let mut s = String::new();
                loop {
                    match lx.bump() {
                        Some('"') => break,
                        Some('\\') => {
                            let (el, ec) = (lx.line, lx.column);
                            let esc = match lx.bump() {
                                Some('n') => '\n',
                                Some('t') => '\t',
                                Some('r') => '\r',
                                Some('b') => '\u{8}',
                                Some('f') => '\u{c}',
                                Some('"') => '"',
                                Some('\'') => '\'',
                                Some('\\') => '\\',
                                Some('u') => lx.hex(4)?,
                                Some('U') => lx.hex(8)?,
                                other => {
                                    let found = other.map(|c| format!("'\\{c}'")).unwrap_or("end of input".into());
                                    return Err(lx.error(el, ec, &["escape sequence"], found));
                                }
                            };
                            s.push(esc);
                        }
                        Some(c) => s.push(c),
                        None => {
                            return Err(lx.error(line, column, &["'\"'"], "unterminated string".into()))
                        }
                    }
                }
                Tok::Str(s)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut w = String::new();
                while matches!(lx.peek(), Some(c) if c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-')) {
                    w.push(lx.bump().expect("peeked"));
                }
                Tok::Word(w)
            }
            c if c.is_ascii_digit() => {
                let mut w = String::new();
                while matches!(lx.peek(), Some(c) if c.is_ascii_alphanumeric() || matches!(c, ':' | '.' | '+' | '-')) {
                    w.push(lx.bump().expect("peeked"));
                }
                Tok::Number(w)
            }
            other => {
                return Err(lx.error(line, column, &["token"], format!("{other:?}")));
            }
        };
        out.push(Spanned { tok, line, column });
    }
}
