//! Pivot scripts.
//!
//! ```text
//! select Team where name == "Florida State";
//! pivot Player;
//! group by position desc;
//! bins "WR";
//! describe;
//! ```
//!
//! Statements end with `;`. Keywords are case-insensitive; class names and
//! attribute keys are bare identifiers or double-quoted strings.

mod ast;
mod exec;
mod format;
mod lexer;
mod parser;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{Script, SortOrder, Statement, StmtKind};
pub use exec::{execute, ExecError, ExecErrorKind, Executor, Output};
pub use format::{format_script, quote_name};
pub use lexer::{tokenize, Tok, Token};
pub use parser::parse;

/// Location of a token or statement: 1-based line and column (in
/// characters), byte offset and byte length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub len: usize,
}

impl Span {
    /// Smallest span covering both.
    pub fn to(self, end: Span) -> Span {
        Span {
            len: (end.offset + end.len).saturating_sub(self.offset),
            ..self
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
pub struct ParseError {
    pub message: String,
    pub expected: Vec<String>,
    pub span: Span,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}
