// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! Interpreter and property-checking harness for basic interactive
//! abstract state machines.
//!
//! A program is a vocabulary plus one step rule built from assignments,
//! conditionals, and bounded `par` blocks, iterated either `do until` a
//! halting condition holds or until a fixed point. Nondeterministic and
//! probabilistic choices are delegated to oracles; a run's behavior is the
//! sequence of its update sets together with its oracle interactions.
//!
//! ```
//! use basm::{corpus, Value};
//!
//! let trace = corpus::corpus_run("euclid", &corpus::Overrides::new().set("a", 12).set("b", 8)).unwrap();
//! assert_eq!(trace.steps.len(), 3);
//! assert_eq!(trace.final_var("d"), Value::Int(4));
//! ```

pub mod checks;
pub mod corpus;
pub mod error;
pub mod geometry;
pub mod json;
pub mod oracles;
pub mod semantics;
pub mod state;
pub mod syntax;
pub mod trace;
pub mod value;
pub mod vocab;

pub use error::{Error, ErrorKind, ParseError, ParseErrorKind, Result, RuntimeError};
pub use oracles::{Interaction, OraclePolicy, OracleSession, Query, ScriptMode};
pub use semantics::{eval_term, replay, run, step, DEFAULT_MAX_STEPS};
pub use state::{Bijection, Location, State, UpdateSet};
pub use syntax::{Body, Program, Rule, Term};
pub use trace::{Outcome, StepRecord, Trace};
pub use value::{Sort, Value};
pub use vocab::{Symbol, SymbolKind, Vocabulary};

pub(crate) fn digest_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
