//! The `.tm` text format: a parser and a canonical printer.
//!
//! See `docs/grammar.md` for the grammar. `parse(&emit(&d))` equals `d` for
//! every document `d` produced by `parse`.

mod lexer;
mod parser;
mod printer;

use crate::document::Span;
use crate::model::Diagnostic;

pub use parser::parse;
pub use printer::emit;

/// Words that cannot name a variable or event because expressions use them.
pub const RESERVED: [&str; 7] = ["and", "or", "not", "true", "false", "min", "max"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{}:{}: expected {expected}, found {found}", .span.line, .span.column)]
    Syntax { span: Span, expected: String, found: String },
    #[error("{}:{}: `{path}` does not name a declared element", .span.line, .span.column)]
    UnresolvedPath { span: Span, path: String },
    #[error("{}:{}: `{id}` is already declared", .span.line, .span.column)]
    DuplicateId { span: Span, id: String },
    #[error("{}:{}: {message}", .span.line, .span.column)]
    Semantic { span: Span, message: String },
    #[error("{}:{}: model is not well formed: {}", .span.line, .span.column, fmt_diagnostics(.diagnostics))]
    Invalid { span: Span, diagnostics: Vec<Diagnostic> },
}

fn fmt_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::UnresolvedPath { span, .. }
            | ParseError::DuplicateId { span, .. }
            | ParseError::Semantic { span, .. }
            | ParseError::Invalid { span, .. } => *span,
        }
    }
}
