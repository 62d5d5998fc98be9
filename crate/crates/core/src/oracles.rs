// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! The oracle protocol: queries, answering policies, and the per-step
//! answer cache.
//!
//! Within one step a repeated query is answered from the cache and leaves
//! no new log entry. Across steps the same query is asked afresh and may be
//! answered differently.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use serde_json::json;

use crate::error::{ErrorKind, ParseError, ParseErrorKind, RuntimeError};
use crate::geometry::intersect_circles;
use crate::json::{value_from_json, value_to_json, values_from_json, values_to_json};
use crate::syntax::parse_literal;
use crate::value::{Sort, Value};
use crate::vocab::Vocabulary;

/// splitmix64 (Steele, Lea, Flood). Bit-exact:
///
/// ```text
/// state += 0x9E3779B97F4A7C15
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB
/// return z ^ (z >> 31)
/// ```
/// with wrapping 64-bit arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `[lo, hi]` by rejection sampling.
    ///
    /// With `span = hi - lo + 1`, draws are rejected while
    /// `x < (2^64 - span) mod span`; the result is `lo + x mod span`. A span
    /// of `2^64` returns `lo + x` directly.
    pub fn next_in_range(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi as i128 - lo as i128 + 1) as u128;
        if span > u64::MAX as u128 {
            return lo.wrapping_add(self.next_u64() as i64);
        }
        let span = span as u64;
        let threshold = span.wrapping_neg() % span;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return (lo as i128 + (x % span) as i128) as i64;
            }
        }
    }

    /// Uniform `f64` in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Query {
    pub oracle: String,
    pub args: Vec<Value>,
}

impl Query {
    pub fn new(oracle: impl Into<String>, args: Vec<Value>) -> Self {
        Query {
            oracle: oracle.into(),
            args,
        }
    }

    /// `{"oracle": .., "args": [..]}`.
    pub fn to_json(&self) -> serde_json::Value {
        json!({ "oracle": self.oracle, "args": values_to_json(&self.args) })
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<_> = self.args.iter().map(Value::to_string).collect();
        write!(f, "{}({})", self.oracle, args.join(", "))
    }
}

/// One answered query, as recorded in the session log.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interaction {
    pub query: Query,
    pub answer: Value,
}

impl Interaction {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "oracle": self.query.oracle,
            "args": values_to_json(&self.query.args),
            "answer": value_to_json(&self.answer),
        })
    }

    pub fn from_json(j: &serde_json::Value) -> Result<Interaction, ParseError> {
        let entry = ScriptEntry::from_json(j)?;
        Ok(Interaction {
            query: Query::new(
                entry.oracle,
                entry.args.ok_or_else(|| {
                    ParseError::unpositioned(ParseErrorKind::Syntax, "interaction needs `args`")
                })?,
            ),
            answer: entry.answer,
        })
    }
}

/// The answers a builtin rule may give to a query.
#[derive(Clone, Debug, PartialEq)]
pub enum Choices {
    Finite(Vec<Value>),
    /// Every integer in the closed range.
    IntRange(i64, i64),
}

impl Choices {
    fn first(&self) -> Value {
        match self {
            Choices::Finite(vs) => vs[0].clone(),
            Choices::IntRange(lo, _) => Value::Int(*lo),
        }
    }
}

/// What the session needs to know about the oracle being asked.
pub struct OracleSpec<'a> {
    pub result_sort: &'a Sort,
    pub vocab: &'a Vocabulary,
    /// Library value of a static symbol reclassified as an oracle.
    pub fixed: Option<Value>,
}

/// The deterministic candidate set behind each builtin oracle.
///
/// `I` yields both circle intersections in lexicographic order, `Random`
/// the integer segment, enum- and Boolean-valued oracles their universe.
pub fn builtin_choices(query: &Query, spec: &OracleSpec<'_>) -> Result<Choices, RuntimeError> {
    let domain = |msg: String| RuntimeError::new(ErrorKind::OracleDomain, msg);
    if let Some(v) = &spec.fixed {
        return Ok(Choices::Finite(vec![v.clone()]));
    }
    match (query.oracle.as_str(), query.args.as_slice()) {
        ("I", [Value::Circle(a), Value::Circle(b)]) => {
            let (p, q) = intersect_circles(a, b)
                .map_err(|e| domain(format!("{query}: {}", e.message)))?;
            return Ok(Choices::Finite(vec![Value::Point(p), Value::Point(q)]));
        }
        ("Random", [Value::Int(lo), Value::Int(hi)]) => {
            if lo > hi {
                return Err(domain(format!("{query}: empty segment [{lo}, {hi}]")));
            }
            return Ok(Choices::IntRange(*lo, *hi));
        }
        _ => {}
    }
    match spec.result_sort {
        Sort::Boolean => Ok(Choices::Finite(vec![Value::Bool(false), Value::Bool(true)])),
        Sort::Enum(name) => Ok(Choices::Finite(
            spec.vocab
                .members(name)
                .unwrap_or_default()
                .iter()
                .cloned()
                .map(Value::Member)
                .collect(),
        )),
        _ => Err(domain(format!("no builtin answering rule for {query}"))),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScriptMode {
    /// Oracle name and, when the entry lists them, arguments must match.
    #[default]
    Strict,
    /// Only the oracle name must match.
    BySymbol,
}

impl ScriptMode {
    pub fn parse(s: &str) -> Option<ScriptMode> {
        match s {
            "strict" => Some(ScriptMode::Strict),
            "by-symbol" => Some(ScriptMode::BySymbol),
            _ => None,
        }
    }
}

/// One line of a script file: `{"oracle": .., "args": [..], "answer": ..}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScriptEntry {
    pub oracle: String,
    pub args: Option<Vec<Value>>,
    pub answer: Value,
}

impl ScriptEntry {
    pub fn from_json(j: &serde_json::Value) -> Result<ScriptEntry, ParseError> {
        let syntax = |m: &str| ParseError::unpositioned(ParseErrorKind::Syntax, m.to_string());
        let obj = j.as_object().ok_or_else(|| syntax("script entry must be an object"))?;
        let oracle = obj
            .get("oracle")
            .and_then(|o| o.as_str())
            .ok_or_else(|| syntax("script entry needs a string `oracle`"))?
            .to_string();
        let args = obj.get("args").map(values_from_json).transpose()?;
        let answer = value_from_json(obj.get("answer").ok_or_else(|| syntax("script entry needs `answer`"))?)?;
        Ok(ScriptEntry { oracle, args, answer })
    }

    fn matches(&self, q: &Query, mode: ScriptMode) -> bool {
        if self.oracle != q.oracle {
            return false;
        }
        match (mode, &self.args) {
            (ScriptMode::BySymbol, _) | (ScriptMode::Strict, None) => true,
            (ScriptMode::Strict, Some(args)) => {
                args.len() == q.args.len() && args.iter().zip(&q.args).all(|(a, b)| a.semantic_eq(b))
            }
        }
    }
}

/// Parses a JSON-lines script; blank lines are skipped.
pub fn parse_script(text: &str) -> Result<Vec<ScriptEntry>, ParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let at = |e: ParseError| ParseError::new(e.kind, i + 1, 1, e.message);
            let j: serde_json::Value = serde_json::from_str(l)
                .map_err(|e| ParseError::new(ParseErrorKind::Syntax, i + 1, e.column(), e.to_string()))?;
            ScriptEntry::from_json(&j).map_err(at)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Script {
    /// Consumed front to back, one entry per cache miss.
    Sequence {
        entries: Vec<ScriptEntry>,
        mode: ScriptMode,
    },
    /// Fixed answer per query, reusable across steps.
    Table(Vec<(Query, Value)>),
}

/// Terminal (or pipe) used by the interactive policy.
pub struct InteractiveIo {
    pub input: Box<dyn BufRead + Send>,
    pub prompt: Box<dyn Write + Send>,
}

impl fmt::Debug for InteractiveIo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("InteractiveIo")
    }
}

#[derive(Debug)]
pub enum OraclePolicy {
    /// First builtin candidate: the lexicographically smaller intersection
    /// point, the lower end of a `Random` segment.
    Builtin,
    Scripted(Script),
    /// Uniform choice among builtin candidates, driven by splitmix64.
    UniformRandom { seed: u64 },
    /// Prompts on `prompt` with the query as a JSON line and reads one
    /// literal (or candidate index) per line from `input`.
    Interactive(InteractiveIo),
}

impl OraclePolicy {
    pub fn scripted(entries: Vec<ScriptEntry>, mode: ScriptMode) -> Self {
        OraclePolicy::Scripted(Script::Sequence { entries, mode })
    }

    /// Strict sequence replaying a recorded log.
    pub fn replaying(log: &[Interaction]) -> Self {
        OraclePolicy::scripted(
            log.iter()
                .map(|i| ScriptEntry {
                    oracle: i.query.oracle.clone(),
                    args: Some(i.query.args.clone()),
                    answer: i.answer.clone(),
                })
                .collect(),
            ScriptMode::Strict,
        )
    }
}

#[derive(Debug)]
pub struct OracleSession {
    policy: OraclePolicy,
    cache: HashMap<Query, Value>,
    prng: SplitMix64,
    log: Vec<Interaction>,
    step_start: usize,
    cursor: usize,
}

impl OracleSession {
    pub fn new(policy: OraclePolicy) -> Self {
        let seed = match &policy {
            OraclePolicy::UniformRandom { seed } => *seed,
            _ => 0,
        };
        OracleSession {
            policy,
            cache: HashMap::new(),
            prng: SplitMix64::new(seed),
            log: Vec::new(),
            step_start: 0,
            cursor: 0,
        }
    }

    /// Step boundary: empties the answer cache.
    pub fn begin_step(&mut self) {
        self.cache.clear();
        self.step_start = self.log.len();
    }

    pub fn log(&self) -> &[Interaction] {
        &self.log
    }

    /// Interactions since the last [`OracleSession::begin_step`].
    pub fn step_interactions(&self) -> &[Interaction] {
        &self.log[self.step_start..]
    }

    pub fn policy(&self) -> &OraclePolicy {
        &self.policy
    }

    pub fn prng_state(&self) -> u64 {
        self.prng.state()
    }

    /// Uniform integer in `[lo, hi]` from the session's generator.
    pub fn uniform_random(&mut self, lo: i64, hi: i64) -> Result<i64, RuntimeError> {
        if lo > hi {
            return Err(RuntimeError::new(
                ErrorKind::OracleDomain,
                format!("empty segment [{lo}, {hi}]"),
            ));
        }
        Ok(self.prng.next_in_range(lo, hi))
    }

    /// Answers a query, from the cache when it was already asked this step.
    pub fn ask(&mut self, query: Query, spec: &OracleSpec<'_>) -> Result<Value, RuntimeError> {
        if let Some(answer) = self.cache.get(&query) {
            return Ok(answer.clone());
        }
        let answer = self.consult(&query, spec)?;
        if answer.is_undef() || !spec.vocab.has_sort(&answer, spec.result_sort) {
            return Err(RuntimeError::new(
                ErrorKind::Sort,
                format!("answer {answer} to {query} is not a {}", spec.result_sort),
            ));
        }
        self.cache.insert(query.clone(), answer.clone());
        self.log.push(Interaction {
            query,
            answer: answer.clone(),
        });
        Ok(answer)
    }

    fn consult(&mut self, query: &Query, spec: &OracleSpec<'_>) -> Result<Value, RuntimeError> {
        match &mut self.policy {
            OraclePolicy::Builtin => Ok(builtin_choices(query, spec)?.first()),
            OraclePolicy::UniformRandom { .. } => match builtin_choices(query, spec)? {
                Choices::IntRange(lo, hi) => Ok(Value::Int(self.prng.next_in_range(lo, hi))),
                Choices::Finite(vs) => {
                    let i = self.prng.next_in_range(0, vs.len() as i64 - 1);
                    Ok(vs[i as usize].clone())
                }
            },
            OraclePolicy::Scripted(Script::Sequence { entries, mode }) => {
                let entry = entries.get(self.cursor).ok_or_else(|| {
                    RuntimeError::new(ErrorKind::Script, format!("script exhausted at {query}"))
                })?;
                if !entry.matches(query, *mode) {
                    let expected = match &entry.args {
                        Some(args) => Query::new(entry.oracle.clone(), args.clone()).to_string(),
                        None => entry.oracle.clone(),
                    };
                    return Err(RuntimeError::new(
                        ErrorKind::Script,
                        format!("script entry {} expects {expected}, got {query}", self.cursor + 1),
                    ));
                }
                self.cursor += 1;
                Ok(entry.answer.clone())
            }
            OraclePolicy::Scripted(Script::Table(table)) => table
                .iter()
                .find(|(q, _)| {
                    q.oracle == query.oracle
                        && q.args.len() == query.args.len()
                        && q.args.iter().zip(&query.args).all(|(a, b)| a.semantic_eq(b))
                })
                .map(|(_, a)| a.clone())
                .ok_or_else(|| {
                    RuntimeError::new(ErrorKind::Script, format!("no scripted answer for {query}"))
                }),
            OraclePolicy::Interactive(io) => {
                let choices = builtin_choices(query, spec).ok();
                let mut prompt = query.to_json();
                if let Some(Choices::Finite(vs)) = &choices {
                    prompt["candidates"] = values_to_json(vs);
                }
                let aborted = |e: std::io::Error| RuntimeError::new(ErrorKind::Aborted, e.to_string());
                loop {
                    writeln!(io.prompt, "{prompt}").map_err(aborted)?;
                    io.prompt.flush().map_err(aborted)?;
                    let mut line = String::new();
                    if io.input.read_line(&mut line).map_err(aborted)? == 0 {
                        return Err(RuntimeError::new(
                            ErrorKind::Aborted,
                            format!("end of input while asking {query}"),
                        ));
                    }
                    let line = line.trim();
                    let answer = match (&choices, parse_literal(line)) {
                        (Some(Choices::Finite(vs)), Ok(Value::Int(i)))
                            if *spec.result_sort != Sort::Integer =>
                        {
                            usize::try_from(i).ok().and_then(|i| vs.get(i).cloned())
                        }
                        (_, Ok(v)) => Some(v),
                        (_, Err(_)) => None,
                    };
                    match answer {
                        Some(v) if !v.is_undef() && spec.vocab.has_sort(&v, spec.result_sort) => {
                            return Ok(v)
                        }
                        _ => {
                            writeln!(io.prompt, "not a {} answer: {line}", spec.result_sort)
                                .map_err(aborted)?;
                        }
                    }
                }
            }
        }
    }
}
