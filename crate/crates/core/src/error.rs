// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use thiserror::Error;

/// Classification of runtime failures. The string forms are part of the
/// trace file format and of CLI diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorKind {
    /// Two updates to the same location with different values.
    Clash,
    /// Division or modulus by zero, or integer overflow.
    Arith,
    /// Scripted oracle exhausted or query mismatch.
    Script,
    /// Interactive oracle reached end of input.
    Aborted,
    /// Oracle or geometric constructor applied outside its domain.
    OracleDomain,
    /// Ill-sorted value at a runtime boundary.
    Sort,
    /// Isomorphism check asked to move builtin-sort values.
    UnsupportedIso,
    /// A map that is not a total bijection on an enum universe.
    Bijection,
    /// Trace recorded for a different program.
    ProgramMismatch,
    /// Traces over different vocabularies.
    VocabularyMismatch,
    /// Unknown corpus entry or corpus file.
    UnknownEntry,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Clash => "clash",
            ErrorKind::Arith => "arith",
            ErrorKind::Script => "script",
            ErrorKind::Aborted => "aborted",
            ErrorKind::OracleDomain => "oracle-domain",
            ErrorKind::Sort => "sort",
            ErrorKind::UnsupportedIso => "unsupported-iso",
            ErrorKind::Bijection => "bijection",
            ErrorKind::ProgramMismatch => "program-mismatch",
            ErrorKind::VocabularyMismatch => "vocabulary-mismatch",
            ErrorKind::UnknownEntry => "unknown-entry",
        }
    }

    pub fn parse(s: &str) -> Option<ErrorKind> {
        const ALL: [ErrorKind; 11] = [
            ErrorKind::Clash,
            ErrorKind::Arith,
            ErrorKind::Script,
            ErrorKind::Aborted,
            ErrorKind::OracleDomain,
            ErrorKind::Sort,
            ErrorKind::UnsupportedIso,
            ErrorKind::Bijection,
            ErrorKind::ProgramMismatch,
            ErrorKind::VocabularyMismatch,
            ErrorKind::UnknownEntry,
        ];
        ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error raised while executing a program or checking a property.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind}: {message}")]
pub struct RuntimeError {
    pub kind: ErrorKind,
    pub message: String,
}

impl RuntimeError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        RuntimeError {
            kind,
            message: message.into(),
        }
    }
}

/// Category of a load-time (parse or static check) failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownSymbol,
    Arity,
    Sort,
    Duplicate,
    /// `iterate` body mentions an oracle symbol.
    InteractiveFixpoint,
    /// Halting condition mentions an oracle symbol.
    InteractiveHalt,
}

impl ParseErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::UnknownSymbol => "unknown-symbol",
            ParseErrorKind::Arity => "arity",
            ParseErrorKind::Sort => "sort",
            ParseErrorKind::Duplicate => "duplicate",
            ParseErrorKind::InteractiveFixpoint => "interactive-fixpoint",
            ParseErrorKind::InteractiveHalt => "interactive-halt",
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error raised while reading program, state, script, or trace text.
/// Line and column are 1-based; 0 means "no position".
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            kind,
            line,
            col,
            message: message.into(),
        }
    }

    pub fn unpositioned(kind: ParseErrorKind, message: impl Into<String>) -> Self {
        ParseError::new(kind, 0, 0, message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
