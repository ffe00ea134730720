use std::fmt;

use super::{ParseError, Span};
use crate::pivot::CompareOp;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    Real(f64),
    Op(CompareOp),
    Semi,
    Comma,
    LBracket,
    RBracket,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Int(i) => write!(f, "integer {i}"),
            Tok::Real(x) => write!(f, "number {x}"),
            Tok::Op(op) => write!(f, "`{op}`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    src: &'a str,
    offset: usize,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        self.src[self.offset..].chars().nth(1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span {
            line: self.line,
            column: self.column,
            offset: self.offset,
            len: 0,
        }
    }

    fn close(&self, mut start: Span) -> Span {
        start.len = self.offset - start.offset;
        start
    }
}

fn lex_error(span: Span, message: impl Into<String>) -> ParseError {
    ParseError {
        message: message.into(),
        expected: Vec::new(),
        span,
    }
}

/// Split a script into tokens. `#` starts a comment running to the end of
/// the line.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut c = Cursor {
        src,
        offset: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        while let Some(ch) = c.peek() {
            if ch.is_whitespace() {
                c.bump();
            } else if ch == '#' {
                while c.peek().is_some_and(|ch| ch != '\n') {
                    c.bump();
                }
            } else {
                break;
            }
        }
        let start = c.here();
        let Some(ch) = c.peek() else {
            out.push(Token {
                tok: Tok::Eof,
                span: start,
            });
            return Ok(out);
        };
        let tok = match ch {
            ';' | ',' | '[' | ']' => {
                c.bump();
                match ch {
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    '[' => Tok::LBracket,
                    _ => Tok::RBracket,
                }
            }
            '=' | '!' | '<' | '>' => {
                c.bump();
                let eq = c.peek() == Some('=');
                if eq {
                    c.bump();
                }
                match (ch, eq) {
                    ('=', true) => Tok::Op(CompareOp::Eq),
                    ('!', true) => Tok::Op(CompareOp::Ne),
                    ('<', false) => Tok::Op(CompareOp::Lt),
                    ('<', true) => Tok::Op(CompareOp::Le),
                    ('>', false) => Tok::Op(CompareOp::Gt),
                    ('>', true) => Tok::Op(CompareOp::Ge),
                    _ => {
                        return Err(lex_error(
                            c.close(start),
                            format!("unexpected `{ch}`; did you mean `{ch}=`?"),
                        ))
                    }
                }
            }
            '"' => {
                c.bump();
                let mut text = String::new();
                loop {
                    match c.bump() {
                        None => return Err(lex_error(c.close(start), "unterminated string")),
                        Some('"') => break,
                        Some('\\') => {
                            let esc = c.here();
                            match c.bump() {
                                Some('"') => text.push('"'),
                                Some('\\') => text.push('\\'),
                                Some('n') => text.push('\n'),
                                Some('t') => text.push('\t'),
                                Some('r') => text.push('\r'),
                                Some(other) => {
                                    return Err(lex_error(
                                        c.close(esc),
                                        format!("unknown escape `\\{other}`"),
                                    ))
                                }
                                None => {
                                    return Err(lex_error(c.close(start), "unterminated string"))
                                }
                            }
                        }
                        Some(other) => text.push(other),
                    }
                }
                Tok::Str(text)
            }
            '-' | '0'..='9' => {
                if ch == '-' && !c.peek2().is_some_and(|d| d.is_ascii_digit()) {
                    c.bump();
                    return Err(lex_error(c.close(start), "unexpected `-`"));
                }
                let begin = c.offset;
                c.bump();
                let mut real = false;
                while let Some(d) = c.peek() {
                    if d.is_ascii_digit() {
                        c.bump();
                    } else if d == '.' && !real && c.peek2().is_some_and(|d| d.is_ascii_digit()) {
                        real = true;
                        c.bump();
                    } else if (d == 'e' || d == 'E')
                        && (c.peek2().is_some_and(|d| d.is_ascii_digit() || d == '-' || d == '+'))
                    {
                        real = true;
                        c.bump();
                        if matches!(c.peek(), Some('-' | '+')) {
                            c.bump();
                        }
                    } else {
                        break;
                    }
                }
                let text = &src[begin..c.offset];
                let span = c.close(start);
                if real {
                    Tok::Real(
                        text.parse()
                            .map_err(|_| lex_error(span, format!("malformed number `{text}`")))?,
                    )
                } else {
                    Tok::Int(
                        text.parse()
                            .map_err(|_| lex_error(span, format!("integer `{text}` out of range")))?,
                    )
                }
            }
            ch if ch.is_ascii_alphabetic() || ch == '_' => {
                let begin = c.offset;
                while c
                    .peek()
                    .is_some_and(|d| d.is_ascii_alphanumeric() || d == '_')
                {
                    c.bump();
                }
                Tok::Ident(src[begin..c.offset].to_string())
            }
            other => {
                c.bump();
                return Err(lex_error(
                    c.close(start),
                    format!("unexpected character `{other}`"),
                ));
            }
        };
        out.push(Token {
            tok,
            span: c.close(start),
        });
    }
}
