use super::ast::{Script, SortOrder, Statement, StmtKind};
use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, Span};
use crate::graph::{AttrValue, Direction};
use crate::pivot::{AttrPredicate, CompareOp, DegreePredicate, Literal, PivotMode, Predicate};

const STATEMENTS: [&str; 14] = [
    "load", "select", "pivot", "filter", "group", "bins", "snip", "scope", "undo", "clear",
    "describe", "export", "adapt", "end of input",
];

/// Parse a whole script, stopping at the first error.
pub fn parse(src: &str) -> Result<Script, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        loaded: false,
    };
    let mut statements = Vec::new();
    while p.peek().tok != Tok::Eof {
        statements.push(p.statement()?);
    }
    Ok(Script { statements })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    loaded: bool,
}

fn is_kw(tok: &Tok, kw: &str) -> bool {
    matches!(tok, Tok::Ident(s) if s.eq_ignore_ascii_case(kw))
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError {
            message: format!("unexpected {}", t.tok),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            span: t.span,
        })
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if is_kw(&self.peek().tok, kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Span, ParseError> {
        let span = self.peek().span;
        if self.eat_kw(kw) {
            Ok(span)
        } else {
            self.error(&[&format!("`{kw}`")])
        }
    }

    /// A class name or attribute key: bare identifier or quoted string.
    fn name(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) | Tok::Str(s) => {
                let out = (s.clone(), self.peek().span);
                self.pos += 1;
                Ok(out)
            }
            _ => self.error(&[what]),
        }
    }

    fn string(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let out = (s.clone(), self.peek().span);
                self.pos += 1;
                Ok(out)
            }
            _ => self.error(&[what]),
        }
    }

    fn int(&mut self, what: &str) -> Result<(i64, Span), ParseError> {
        match self.peek().tok {
            Tok::Int(i) => {
                let span = self.peek().span;
                self.pos += 1;
                Ok((i, span))
            }
            _ => self.error(&[what]),
        }
    }

    fn unsigned(&mut self, what: &str) -> Result<(u32, Span), ParseError> {
        let at = self.peek().span;
        let (i, span) = self.int(what)?;
        u32::try_from(i).map(|v| (v, span)).map_err(|_| ParseError {
            message: format!("{i} is not a valid {what}"),
            expected: vec![what.to_string()],
            span: at,
        })
    }

    fn optional_format(&mut self) -> Result<Option<String>, ParseError> {
        if self.eat_kw("format") {
            Ok(Some(self.name("format name")?.0))
        } else {
            Ok(None)
        }
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        let head = self.peek().clone();
        let Tok::Ident(word) = &head.tok else {
            return self.error(&STATEMENTS);
        };
        let word = word.to_ascii_lowercase();
        if !STATEMENTS.contains(&word.as_str()) {
            return self.error(&STATEMENTS);
        }
        self.pos += 1;
        let mut arg = None;
        let kind = match word.as_str() {
            "load" => {
                if self.loaded {
                    return Err(ParseError {
                        message: "duplicate load; a script loads one graph".into(),
                        expected: Vec::new(),
                        span: head.span,
                    });
                }
                self.loaded = true;
                let (path, span) = self.string("graph path string")?;
                arg = Some(span);
                StmtKind::Load {
                    path,
                    format: self.optional_format()?,
                }
            }
            "select" => {
                let (class, span) = self.name("class name")?;
                arg = Some(span);
                let predicates = if self.eat_kw("where") {
                    self.predicates()?
                } else {
                    Vec::new()
                };
                StmtKind::Select { class, predicates }
            }
            "pivot" => {
                let (class, span) = self.name("class name")?;
                arg = Some(span);
                let via = if self.eat_kw("via") {
                    Some(self.name("edge class name")?.0)
                } else {
                    None
                };
                let mode = if self.eat_kw("mode") {
                    Some(self.mode()?)
                } else {
                    None
                };
                StmtKind::Pivot { class, via, mode }
            }
            "filter" => {
                arg = Some(self.peek().span);
                StmtKind::Filter {
                    predicates: self.predicates()?,
                }
            }
            "group" => {
                self.expect_kw("by")?;
                let (key, span) = self.name("attribute key")?;
                arg = Some(span);
                let order = if self.eat_kw("asc") {
                    Some(SortOrder::Asc)
                } else if self.eat_kw("desc") {
                    Some(SortOrder::Desc)
                } else {
                    None
                };
                let bins = if self.eat_kw("bins") {
                    Some(self.unsigned("bin count")?.0 as usize)
                } else {
                    None
                };
                StmtKind::Group { key, order, bins }
            }
            "bins" => {
                let (first, span) = self.string("bin label string")?;
                let mut labels = vec![first];
                let mut last = span;
                while self.peek().tok == Tok::Comma {
                    self.pos += 1;
                    let (label, s) = self.string("bin label string")?;
                    labels.push(label);
                    last = s;
                }
                arg = Some(span.to(last));
                StmtKind::Bins { labels }
            }
            "snip" => {
                let (filter, span) = self.unsigned("filter id")?;
                arg = Some(span);
                StmtKind::Snip { filter }
            }
            "scope" => {
                arg = Some(self.peek().span);
                if self.eat_kw("on") {
                    StmtKind::Scope { on: true }
                } else if self.eat_kw("off") {
                    StmtKind::Scope { on: false }
                } else {
                    return self.error(&["`on`", "`off`"]);
                }
            }
            "undo" => StmtKind::Undo,
            "clear" => StmtKind::Clear,
            "describe" => StmtKind::Describe,
            "export" => {
                let (path, span) = self.string("output path string")?;
                arg = Some(span);
                StmtKind::Export {
                    path,
                    format: self.optional_format()?,
                }
            }
            "adapt" => {
                if self.eat_kw("report") {
                    StmtKind::AdaptReport
                } else if self.eat_kw("apply") {
                    let (proposal, span) = self.unsigned("proposal id")?;
                    arg = Some(span);
                    StmtKind::AdaptApply { proposal }
                } else {
                    return self.error(&["`report`", "`apply`"]);
                }
            }
            _ => unreachable!("checked against STATEMENTS"),
        };
        let end = self.peek().span;
        if self.peek().tok != Tok::Semi {
            return self.error(&["`;`"]);
        }
        self.pos += 1;
        Ok(Statement {
            kind,
            span: head.span.to(end),
            arg_span: arg,
        })
    }

    fn mode(&mut self) -> Result<PivotMode, ParseError> {
        const MODES: [&str; 5] = ["fanin", "fanout", "intersect", "smart", "scope"];
        if let Tok::Ident(s) = &self.peek().tok {
            let lower = s.to_ascii_lowercase();
            if MODES.contains(&lower.as_str()) {
                self.pos += 1;
                return Ok(lower.parse().expect("mode keywords parse"));
            }
        }
        self.error(&MODES)
    }

    fn predicates(&mut self) -> Result<Vec<Predicate>, ParseError> {
        let mut out = vec![self.predicate()?];
        while self.eat_kw("and") {
            out.push(self.predicate()?);
        }
        Ok(out)
    }

    fn op(&mut self) -> Result<CompareOp, ParseError> {
        let op = match &self.peek().tok {
            Tok::Op(op) => *op,
            t if is_kw(t, "contains") => CompareOp::Contains,
            t if is_kw(t, "in") => CompareOp::In,
            _ => return self.error(&["comparison operator"]),
        };
        self.pos += 1;
        Ok(op)
    }

    fn predicate(&mut self) -> Result<Predicate, ParseError> {
        if is_kw(&self.peek().tok, "degree") {
            self.pos += 1;
            let direction = if self.eat_kw("any") {
                Direction::Any
            } else if self.eat_kw("out") {
                Direction::Outgoing
            } else if is_kw(&self.peek().tok, "in")
                && !matches!(self.tokens[self.pos + 1].tok, Tok::LBracket | Tok::Int(_))
            {
                self.pos += 1;
                Direction::Incoming
            } else {
                Direction::Any
            };
            let op = self.op()?;
            let (value, _) = self.int("integer")?;
            return Ok(Predicate::Degree(DegreePredicate {
                direction,
                op,
                value,
            }));
        }
        let (key, _) = self.name("attribute key")?;
        let op = self.op()?;
        let value = self.literal()?;
        Ok(Predicate::Attribute(AttrPredicate { key, op, value }))
    }

    fn scalar(&mut self) -> Result<AttrValue, ParseError> {
        let v = match &self.peek().tok {
            Tok::Str(s) => AttrValue::Text(s.clone()),
            Tok::Int(i) => AttrValue::Int(*i),
            Tok::Real(x) => AttrValue::Real(*x),
            t if is_kw(t, "true") => AttrValue::Bool(true),
            t if is_kw(t, "false") => AttrValue::Bool(false),
            t if is_kw(t, "null") => AttrValue::Null,
            _ => return self.error(&["literal"]),
        };
        self.pos += 1;
        Ok(v)
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        if self.peek().tok != Tok::LBracket {
            return Ok(Literal::Value(self.scalar()?));
        }
        self.pos += 1;
        let mut items = Vec::new();
        if self.peek().tok != Tok::RBracket {
            items.push(self.scalar()?);
            while self.peek().tok == Tok::Comma {
                self.pos += 1;
                items.push(self.scalar()?);
            }
        }
        if self.peek().tok != Tok::RBracket {
            return self.error(&["`,`", "`]`"]);
        }
        self.pos += 1;
        Ok(Literal::List(items))
    }
}
