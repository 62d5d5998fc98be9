// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! Interaction-labeled traces and their JSON-lines file format.
//!
//! ```text
//! {"programId":..,"vocabId":..,"initialState":[{"loc":..,"value":..},..]}
//! {"index":1,"updates":[{"loc":..,"value":..}],"interactions":[{"oracle":..,"args":[..],"answer":..}],"halted":false}
//! ...
//! {"outcome":"halted","finalState":[..]}
//! ```
//! Error outcomes carry `"outcome":"error","error":{"kind":..,"message":..}`
//! before `finalState`. Field order is fixed.

use std::fmt;

use serde_json::{json, Map, Value as Json};

use crate::error::{ErrorKind, ParseError, ParseErrorKind, RuntimeError};
use crate::json::{location_from_json, location_to_json, value_from_json, value_to_json};
use crate::oracles::Interaction;
use crate::state::{Interp, State, UpdateSet};
use crate::vocab::Vocabulary;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    /// 1-based position in the run.
    pub index: u64,
    pub updates: UpdateSet,
    /// Cache misses of this step, in evaluation order.
    pub interactions: Vec<Interaction>,
    pub halted_after: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Halted,
    StepLimit,
    Error { kind: ErrorKind, message: String },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Halted => "halted",
            Outcome::StepLimit => "step-limit",
            Outcome::Error { .. } => "error",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Error { kind, message } => write!(f, "error({kind}): {message}"),
            other => f.write_str(other.label()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    /// Hash of the canonical program text.
    pub program_id: String,
    /// Hash of the canonical vocabulary text.
    pub vocab_id: String,
    pub initial_state: Interp,
    pub steps: Vec<StepRecord>,
    pub final_state: Interp,
    pub outcome: Outcome,
}

fn interp_to_json(interp: &Interp) -> Json {
    Json::Array(
        interp
            .iter()
            .map(|(l, v)| json!({ "loc": location_to_json(l), "value": value_to_json(v) }))
            .collect(),
    )
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::Syntax, line, 1, msg)
}

fn field<'a>(obj: &'a Map<String, Json>, key: &str, line: usize) -> Result<&'a Json, ParseError> {
    obj.get(key)
        .ok_or_else(|| syntax(line, format!("missing field `{key}`")))
}

fn bindings_from_json(j: &Json, line: usize) -> Result<Vec<(crate::state::Location, crate::value::Value)>, ParseError> {
    let items = j
        .as_array()
        .ok_or_else(|| syntax(line, "expected an array of bindings"))?;
    items
        .iter()
        .map(|item| {
            let obj = item
                .as_object()
                .ok_or_else(|| syntax(line, "binding must be an object"))?;
            Ok((
                location_from_json(field(obj, "loc", line)?)?,
                value_from_json(field(obj, "value", line)?)?,
            ))
        })
        .collect()
}

impl StepRecord {
    pub fn to_json(&self) -> Json {
        let updates: Vec<Json> = self
            .updates
            .iter()
            .map(|u| json!({ "loc": location_to_json(&u.location), "value": value_to_json(&u.value) }))
            .collect();
        let interactions: Vec<Json> = self.interactions.iter().map(Interaction::to_json).collect();
        json!({
            "index": self.index,
            "updates": updates,
            "interactions": interactions,
            "halted": self.halted_after,
        })
    }
}

impl Trace {
    pub fn initial(&self, vocab: std::sync::Arc<Vocabulary>) -> Result<State, RuntimeError> {
        State::from_bindings(vocab, self.initial_state.clone())
    }

    /// Total number of oracle interactions.
    pub fn interaction_count(&self) -> usize {
        self.steps.iter().map(|s| s.interactions.len()).sum()
    }

    /// Value of a nullary location in the final state.
    pub fn final_var(&self, name: &str) -> crate::value::Value {
        self.final_state
            .get(&crate::state::Location::var(name))
            .cloned()
            .unwrap_or(crate::value::Value::Undef)
    }

    /// Whether firing the recorded update sets from the initial state
    /// reproduces the final state.
    pub fn updates_reproduce_final(&self, vocab: std::sync::Arc<Vocabulary>) -> bool {
        let Ok(mut s) = self.initial(vocab) else {
            return false;
        };
        for step in &self.steps {
            match s.apply_updates(&step.updates) {
                Ok(next) => s = next,
                Err(_) => return false,
            }
        }
        s.interp() == &self.final_state
    }

    /// One JSON object per line, newline-terminated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let header = json!({
            "programId": self.program_id,
            "vocabId": self.vocab_id,
            "initialState": interp_to_json(&self.initial_state),
        });
        out.push_str(&header.to_string());
        out.push('\n');
        for s in &self.steps {
            out.push_str(&s.to_json().to_string());
            out.push('\n');
        }
        let mut footer = Map::new();
        footer.insert("outcome".into(), Json::from(self.outcome.label()));
        if let Outcome::Error { kind, message } = &self.outcome {
            footer.insert("error".into(), json!({ "kind": kind.as_str(), "message": message }));
        }
        footer.insert("finalState".into(), interp_to_json(&self.final_state));
        out.push_str(&Json::Object(footer).to_string());
        out.push('\n');
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Trace, ParseError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        if lines.len() < 2 {
            return Err(syntax(lines.len(), "trace needs a header and a final line"));
        }
        let parse = |(n, l): (usize, &str)| -> Result<(usize, Map<String, Json>), ParseError> {
            match serde_json::from_str::<Json>(l) {
                Ok(Json::Object(m)) => Ok((n, m)),
                Ok(_) => Err(syntax(n, "expected a JSON object")),
                Err(e) => Err(ParseError::new(ParseErrorKind::Syntax, n, e.column(), e.to_string())),
            }
        };
        let (hn, header) = parse(lines[0])?;
        let str_field = |m: &Map<String, Json>, k: &str, n: usize| -> Result<String, ParseError> {
            field(m, k, n)?
                .as_str()
                .map(str::to_string)
                .ok_or_else(|| syntax(n, format!("`{k}` must be a string")))
        };
        let program_id = str_field(&header, "programId", hn)?;
        let vocab_id = str_field(&header, "vocabId", hn)?;
        let initial_state: Interp = bindings_from_json(field(&header, "initialState", hn)?, hn)?
            .into_iter()
            .collect();
        let mut steps = Vec::new();
        for &(n, l) in &lines[1..lines.len() - 1] {
            let (n, m) = parse((n, l))?;
            let index = field(&m, "index", n)?
                .as_u64()
                .ok_or_else(|| syntax(n, "`index` must be a natural number"))?;
            let updates: UpdateSet = bindings_from_json(field(&m, "updates", n)?, n)?
                .into_iter()
                .collect();
            let interactions = field(&m, "interactions", n)?
                .as_array()
                .ok_or_else(|| syntax(n, "`interactions` must be an array"))?
                .iter()
                .map(Interaction::from_json)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ParseError::new(e.kind, n, 1, e.message))?;
            let halted_after = field(&m, "halted", n)?
                .as_bool()
                .ok_or_else(|| syntax(n, "`halted` must be a boolean"))?;
            steps.push(StepRecord {
                index,
                updates,
                interactions,
                halted_after,
            });
        }
        let (fnum, footer) = parse(lines[lines.len() - 1])?;
        let outcome = match str_field(&footer, "outcome", fnum)?.as_str() {
            "halted" => Outcome::Halted,
            "step-limit" => Outcome::StepLimit,
            "error" => {
                let err = field(&footer, "error", fnum)?
                    .as_object()
                    .ok_or_else(|| syntax(fnum, "`error` must be an object"))?;
                let kind = str_field(err, "kind", fnum)?;
                Outcome::Error {
                    kind: ErrorKind::parse(&kind)
                        .ok_or_else(|| syntax(fnum, format!("unknown error kind `{kind}`")))?,
                    message: str_field(err, "message", fnum)?,
                }
            }
            other => return Err(syntax(fnum, format!("unknown outcome `{other}`"))),
        };
        let final_state = bindings_from_json(field(&footer, "finalState", fnum)?, fnum)?
            .into_iter()
            .collect();
        Ok(Trace {
            program_id,
            vocab_id,
            initial_state,
            steps,
            final_state,
            outcome,
        })
    }
}
