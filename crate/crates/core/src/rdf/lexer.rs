//! Character cursor shared by the N-Triples and Turtle readers.

use super::term::{BlankNode, Iri, Literal};
use super::vocab::xsd;
use super::ParseError;

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor::at_line(src, 1)
    }

    pub fn at_line(src: &'a str, line: usize) -> Self {
        Cursor {
            src,
            pos: 0,
            line,
            column: 1,
        }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    pub fn position(&self) -> (usize, usize) {
        (self.line, self.column)
    }

    /// Steps back over one ASCII character on the current line.
    pub fn unbump_ascii(&mut self) {
        self.pos -= 1;
        self.column -= 1;
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    pub fn unsupported(&self, construct: impl Into<String>) -> ParseError {
        ParseError::Unsupported {
            line: self.line,
            column: self.column,
            construct: construct.into(),
        }
    }

    /// Skips spaces and tabs only.
    pub fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.bump();
        }
    }

    /// Skips whitespace, newlines and `#` comments.
    pub fn skip_ws_and_comments(&mut self) {
        loop {
            match self.peek() {
                Some(' ' | '\t' | '\n' | '\r') => {
                    self.bump();
                }
                Some('#') => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    /// `<...>` with `\u` escapes resolved.
    pub fn iri_ref(&mut self) -> Result<Iri, ParseError> {
        let (line, column) = (self.line, self.column);
        self.expect('<')?;
        let mut value = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.error("unterminated IRI")),
                Some('>') => break,
                Some('\\') => value.push(self.unicode_escape()?),
                Some(c) => value.push(c),
            }
        }
        Iri::new(value).map_err(|e| ParseError::Syntax {
            line,
            column,
            message: e.to_string(),
        })
    }

    /// `_:label`
    pub fn blank_node(&mut self) -> Result<BlankNode, ParseError> {
        let (line, column) = (self.line, self.column);
        if !self.eat_str("_:") {
            return Err(self.error("expected blank node"));
        }
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '\u{b7}') {
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        // a trailing '.' terminates the statement, not the label
        while label.ends_with('.') {
            label.pop();
            self.unbump_ascii();
        }
        if label.is_empty() {
            return Err(ParseError::Syntax {
                line,
                column,
                message: "empty blank node label".into(),
            });
        }
        BlankNode::new(label.clone()).map_err(|_| ParseError::Unsupported {
            line,
            column,
            construct: format!("blank node label _:{label} (labels must be alphanumeric)"),
        })
    }

    fn unicode_escape(&mut self) -> Result<char, ParseError> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error("invalid escape in IRI")),
        };
        self.hex_char(width)
    }

    fn hex_char(&mut self, width: usize) -> Result<char, ParseError> {
        let mut code = 0u32;
        for _ in 0..width {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error("invalid hex digit in escape"))?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or_else(|| self.error("escape is not a Unicode scalar value"))
    }

    /// A quoted string body. Handles `"`, `'` and their long (triple-quoted)
    /// forms when `allow_long` is set.
    pub fn string(&mut self, allow_long: bool) -> Result<String, ParseError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.error("expected string")),
        };
        let long_delim: String = std::iter::repeat_n(quote, 3).collect();
        let long = allow_long && self.rest().starts_with(&long_delim);
        if long {
            self.eat_str(&long_delim);
        } else {
            self.bump();
        }
        let mut out = String::new();
        loop {
            if long && self.rest().starts_with(&long_delim) {
                // a run of more than three quotes ends with the last three
                let run = self.rest().chars().take_while(|&c| c == quote).count();
                for _ in 0..run - 3 {
                    out.push(quote);
                    self.bump();
                }
                self.eat_str(&long_delim);
                return Ok(out);
            }
            match self.bump() {
                None => return Err(self.error("unterminated string")),
                Some('\n' | '\r') if !long => return Err(self.error("newline in string")),
                Some(c) if c == quote && !long => return Ok(out),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        _ => return Err(self.error("invalid string escape")),
                    };
                    out.push(c);
                }
                Some(c) => out.push(c),
            }
        }
    }

    /// `@tag` following a string.
    pub fn lang_tag(&mut self) -> Result<String, ParseError> {
        self.expect('@')?;
        let mut tag = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '-' {
                tag.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Ok(tag)
    }

    /// Builds a literal, mapping term errors to positioned syntax errors.
    pub fn make_literal(
        &self,
        lexical: String,
        lang: Option<String>,
        datatype: Option<Iri>,
    ) -> Result<Literal, ParseError> {
        let result = match (lang, datatype) {
            (Some(tag), _) => Literal::lang(lexical, tag),
            (None, Some(dt)) => Literal::typed(lexical, dt),
            (None, None) => Literal::typed(lexical, xsd::string()),
        };
        result.map_err(|e| self.error(e.to_string()))
    }
}
