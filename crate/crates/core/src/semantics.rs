// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! Term evaluation, one-step update-set computation, the run loop, and
//! replay.
//!
//! Static functions are strict in `undef` (any `undef` argument yields
//! `undef`) except `=` and `!=`. An oracle term with an `undef` argument
//! evaluates to `undef` without issuing a query. A guard that is not `true`
//! takes the else branch.

use std::collections::BTreeSet;

use crate::error::{ErrorKind, RuntimeError};
use crate::geometry::{self, Circle};
use crate::oracles::{Interaction, OraclePolicy, OracleSession, OracleSpec, Query};
use crate::state::{Location, State, UpdateSet};
use crate::syntax::{op, operator_signature, Body, Program, Rule, Term};
use crate::trace::{Outcome, StepRecord, Trace};
use crate::value::{Sort, Value};
use crate::vocab::SymbolKind;

/// Default step budget for [`run`].
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

/// What one step touched: locations read and distinct queries answered.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub reads: BTreeSet<Location>,
    pub queries: BTreeSet<Query>,
}

impl StepStats {
    /// Reads plus queries; bounded by the exploration witness size.
    pub fn work(&self) -> usize {
        self.reads.len() + self.queries.len()
    }
}

struct Evaluator<'a> {
    program: &'a Program,
    state: &'a State,
    session: &'a mut OracleSession,
    stats: StepStats,
}

fn arith(msg: impl Into<String>) -> RuntimeError {
    RuntimeError::new(ErrorKind::Arith, msg)
}

fn int_args<const N: usize>(name: &str, args: &[Value]) -> Result<[i64; N], RuntimeError> {
    let mut out = [0; N];
    for (slot, a) in out.iter_mut().zip(args) {
        *slot = a
            .as_int()
            .ok_or_else(|| RuntimeError::new(ErrorKind::Sort, format!("`{name}` expects integers, got {a}")))?;
    }
    Ok(out)
}

fn bool_args<const N: usize>(name: &str, args: &[Value]) -> Result<[bool; N], RuntimeError> {
    let mut out = [false; N];
    for (slot, a) in out.iter_mut().zip(args) {
        *slot = a
            .as_bool()
            .ok_or_else(|| RuntimeError::new(ErrorKind::Sort, format!("`{name}` expects booleans, got {a}")))?;
    }
    Ok(out)
}

/// `base^exp mod modulus` by square-and-multiply over `u128`.
pub fn powmod(base: i64, exp: i64, modulus: i64) -> Result<i64, RuntimeError> {
    if modulus <= 0 {
        return Err(arith(format!("powmod modulus {modulus} is not positive")));
    }
    if exp < 0 {
        return Err(arith(format!("powmod exponent {exp} is negative")));
    }
    let m = modulus as u128;
    let mut b = base.rem_euclid(modulus) as u128;
    let mut e = exp as u64;
    let mut acc = 1u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    Ok(acc as i64)
}

/// Value of a static symbol or operator on fully evaluated arguments.
pub fn apply_static(name: &str, args: &[Value]) -> Result<Value, RuntimeError> {
    if name == op::EQ || name == op::NE {
        let eq = args[0].semantic_eq(&args[1]);
        return Ok(Value::Bool(if name == op::EQ { eq } else { !eq }));
    }
    if args.iter().any(Value::is_undef) {
        return Ok(Value::Undef);
    }
    let overflow = || arith(format!("integer overflow in `{name}`"));
    Ok(match name {
        op::ADD => {
            let [a, b] = int_args(name, args)?;
            Value::Int(a.checked_add(b).ok_or_else(overflow)?)
        }
        op::SUB => {
            let [a, b] = int_args(name, args)?;
            Value::Int(a.checked_sub(b).ok_or_else(overflow)?)
        }
        op::MUL => {
            let [a, b] = int_args(name, args)?;
            Value::Int(a.checked_mul(b).ok_or_else(overflow)?)
        }
        op::DIV | op::MOD => {
            let [a, b] = int_args(name, args)?;
            if b == 0 {
                return Err(arith(format!("{a} {name} 0")));
            }
            let r = if name == op::DIV {
                a.checked_div_euclid(b)
            } else {
                a.checked_rem_euclid(b)
            };
            Value::Int(r.ok_or_else(overflow)?)
        }
        op::NEG => {
            let [a] = int_args(name, args)?;
            Value::Int(a.checked_neg().ok_or_else(overflow)?)
        }
        op::POWMOD => {
            let [a, e, m] = int_args(name, args)?;
            Value::Int(powmod(a, e, m)?)
        }
        op::LT | op::LE | op::GT | op::GE => {
            let [a, b] = int_args(name, args)?;
            Value::Bool(match name {
                op::LT => a < b,
                op::LE => a <= b,
                op::GT => a > b,
                _ => a >= b,
            })
        }
        op::AND => {
            let [a, b] = bool_args(name, args)?;
            Value::Bool(a && b)
        }
        op::OR => {
            let [a, b] = bool_args(name, args)?;
            Value::Bool(a || b)
        }
        op::NOT => {
            let [a] = bool_args(name, args)?;
            Value::Bool(!a)
        }
        "M" | "Cl" | "L" | "Inc" => {
            let point = |i: usize| {
                args[i].as_point().ok_or_else(|| {
                    RuntimeError::new(ErrorKind::Sort, format!("`{name}` expects points, got {}", args[i]))
                })
            };
            match name {
                "M" => Value::Point(geometry::midpoint(point(0)?, point(1)?)),
                "Cl" => Value::Circle(Circle::new(point(0)?, point(1)?)?),
                "L" => Value::Line(geometry::line_through(point(0)?, point(1)?)?),
                _ => {
                    let c = args[1].as_circle().ok_or_else(|| {
                        RuntimeError::new(ErrorKind::Sort, format!("`Inc` expects a circle, got {}", args[1]))
                    })?;
                    Value::Bool(geometry::incident(point(0)?, &c))
                }
            }
        }
        _ => {
            return Err(RuntimeError::new(
                ErrorKind::Sort,
                format!("no library interpretation for `{name}`"),
            ))
        }
    })
}

impl Evaluator<'_> {
    fn term(&mut self, t: &Term) -> Result<Value, RuntimeError> {
        match t {
            Term::Const(v) => Ok(v.clone()),
            Term::Var(name) => self.app(name, &[]),
            Term::App(name, args) => self.app(name, args),
        }
    }

    fn result_sort(&self, name: &str) -> Sort {
        operator_signature(name)
            .map(|(_, r)| r)
            .or_else(|| self.program.vocab().symbol(name).map(|s| s.result_sort.clone()))
            .unwrap_or(Sort::Boolean)
    }

    fn app(&mut self, name: &str, args: &[Term]) -> Result<Value, RuntimeError> {
        let args = args
            .iter()
            .map(|a| self.term(a))
            .collect::<Result<Vec<_>, _>>()?;
        if self.program.is_oracle(name) {
            if args.iter().any(Value::is_undef) {
                return Ok(Value::Undef);
            }
            let fixed = match self.program.vocab().symbol(name) {
                Some(s) if s.kind == SymbolKind::Oracle => None,
                _ => Some(apply_static(name, &args)?),
            };
            let sort = self.result_sort(name);
            let spec = OracleSpec {
                result_sort: &sort,
                vocab: self.program.vocab(),
                fixed,
            };
            let query = Query::new(name, args);
            self.stats.queries.insert(query.clone());
            return self.session.ask(query, &spec);
        }
        match self.program.vocab().symbol(name) {
            Some(sym) if sym.kind == SymbolKind::Dynamic => {
                if args.iter().any(Value::is_undef) {
                    return Ok(Value::Undef);
                }
                let loc = Location::new(name, args);
                let v = self.state.get(&loc);
                self.stats.reads.insert(loc);
                Ok(v)
            }
            _ => apply_static(name, &args),
        }
    }

    fn rule(&mut self, r: &Rule, out: &mut UpdateSet) -> Result<(), RuntimeError> {
        match r {
            Rule::Skip => Ok(()),
            Rule::Assign { target, value } => {
                let (name, arg_terms) = match target {
                    Term::Var(n) => (n, &[][..]),
                    Term::App(n, a) => (n, &a[..]),
                    Term::Const(_) => unreachable!("rejected by the checker"),
                };
                let args = arg_terms
                    .iter()
                    .map(|a| self.term(a))
                    .collect::<Result<Vec<_>, _>>()?;
                let loc = Location::new(name.clone(), args);
                if loc.args.iter().any(Value::is_undef) {
                    return Err(RuntimeError::new(
                        ErrorKind::Sort,
                        format!("cannot update {loc}: undefined argument"),
                    ));
                }
                let v = self.term(value)?;
                out.insert(loc, v);
                out.check()
            }
            Rule::Cond {
                guard,
                then,
                otherwise,
            } => {
                if self.term(guard)? == Value::Bool(true) {
                    self.rule(then, out)
                } else if let Some(o) = otherwise {
                    self.rule(o, out)
                } else {
                    Ok(())
                }
            }
            Rule::Par(rules) => {
                for r in rules {
                    let mut child = UpdateSet::new();
                    self.rule(r, &mut child)?;
                    out.union(child)?;
                }
                Ok(())
            }
        }
    }
}

/// Evaluates a term; returns its value and the interactions it caused.
pub fn eval_term(
    program: &Program,
    state: &State,
    term: &Term,
    session: &mut OracleSession,
) -> Result<(Value, Vec<Interaction>), RuntimeError> {
    let before = session.log().len();
    let mut ev = Evaluator {
        program,
        state,
        session,
        stats: StepStats::default(),
    };
    let v = ev.term(term)?;
    Ok((v, ev.session.log()[before..].to_vec()))
}

/// Evaluates a term and reports what it read, including on failure.
pub fn eval_term_with_stats(
    program: &Program,
    state: &State,
    term: &Term,
    session: &mut OracleSession,
) -> (Result<Value, RuntimeError>, StepStats) {
    let mut ev = Evaluator {
        program,
        state,
        session,
        stats: StepStats::default(),
    };
    let v = ev.term(term);
    (v, ev.stats)
}

/// Update set and interactions of one step of `rule`. The caller opens the
/// step with [`OracleSession::begin_step`].
pub fn step(
    program: &Program,
    state: &State,
    rule: &Rule,
    session: &mut OracleSession,
) -> Result<(UpdateSet, Vec<Interaction>), RuntimeError> {
    step_with_stats(program, state, rule, session).map(|(u, i, _)| (u, i))
}

pub fn step_with_stats(
    program: &Program,
    state: &State,
    rule: &Rule,
    session: &mut OracleSession,
) -> Result<(UpdateSet, Vec<Interaction>, StepStats), RuntimeError> {
    let before = session.log().len();
    let mut ev = Evaluator {
        program,
        state,
        session,
        stats: StepStats::default(),
    };
    let mut updates = UpdateSet::new();
    ev.rule(rule, &mut updates)?;
    let stats = ev.stats;
    Ok((updates, session.log()[before..].to_vec(), stats))
}

fn halted(program: &Program, state: &State) -> Result<bool, RuntimeError> {
    match program.body().halt() {
        None => Ok(false),
        Some(h) => {
            // halting conditions are oracle-free, so this session is never asked
            let mut quiet = OracleSession::new(OraclePolicy::Builtin);
            let (v, _) = eval_term(program, state, h, &mut quiet)?;
            Ok(v == Value::Bool(true))
        }
    }
}

/// Runs `program` from `init` under `policy` for at most `max_steps` steps.
pub fn run(program: &Program, init: &State, policy: OraclePolicy, max_steps: u64) -> Trace {
    let mut session = OracleSession::new(policy);
    run_with_session(program, init, &mut session, max_steps)
}

pub fn run_with_session(
    program: &Program,
    init: &State,
    session: &mut OracleSession,
    max_steps: u64,
) -> Trace {
    let mut trace = Trace {
        program_id: program.id(),
        vocab_id: program.vocab().id(),
        initial_state: init.interp().clone(),
        steps: Vec::new(),
        final_state: init.interp().clone(),
        outcome: Outcome::StepLimit,
    };
    let mut state = init.clone();
    let fail = |trace: &mut Trace, state: &State, e: RuntimeError| {
        trace.outcome = Outcome::Error {
            kind: e.kind,
            message: e.message,
        };
        trace.final_state = state.interp().clone();
    };
    match halted(program, &state) {
        Ok(true) => {
            trace.outcome = Outcome::Halted;
            return trace;
        }
        Ok(false) => {}
        Err(e) => {
            fail(&mut trace, &state, e);
            return trace;
        }
    }
    for index in 1..=max_steps {
        session.begin_step();
        let (updates, interactions) = match step(program, &state, program.body().step(), session) {
            Ok(r) => r,
            Err(e) => {
                fail(&mut trace, &state, e);
                return trace;
            }
        };
        let fixed_point =
            matches!(program.body(), Body::Iterate { .. }) && state.is_fixed_by(&updates);
        state = match state.apply_updates(&updates) {
            Ok(s) => s,
            Err(e) => {
                fail(&mut trace, &state, e);
                return trace;
            }
        };
        let stop = match fixed_point {
            true => true,
            false => match halted(program, &state) {
                Ok(h) => h,
                Err(e) => {
                    trace.steps.push(StepRecord {
                        index,
                        updates,
                        interactions,
                        halted_after: false,
                    });
                    fail(&mut trace, &state, e);
                    return trace;
                }
            },
        };
        trace.steps.push(StepRecord {
            index,
            updates,
            interactions,
            halted_after: stop,
        });
        if stop {
            trace.outcome = Outcome::Halted;
            break;
        }
    }
    trace.final_state = state.into_interp();
    trace
}

/// Result of re-running a trace with its recorded answers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayVerdict {
    Match,
    /// First disagreement; `step` is the 1-based index when a step differs.
    Mismatch { step: Option<u64>, reason: String },
}

impl ReplayVerdict {
    pub fn is_match(&self) -> bool {
        matches!(self, ReplayVerdict::Match)
    }
}

/// Re-runs `program` from the trace's initial state, answering every query
/// with the recorded answers in order, and compares step by step.
pub fn replay_verdict(trace: &Trace, program: &Program) -> Result<ReplayVerdict, RuntimeError> {
    if trace.program_id != program.id() {
        return Err(RuntimeError::new(
            ErrorKind::ProgramMismatch,
            format!("trace recorded for program {}, not {}", trace.program_id, program.id()),
        ));
    }
    let init = State::from_bindings(program.vocab().clone(), trace.initial_state.clone())?;
    let answers: Vec<Interaction> = trace
        .steps
        .iter()
        .flat_map(|s| s.interactions.iter().cloned())
        .collect();
    let budget = trace.steps.len() as u64 + u64::from(matches!(trace.outcome, Outcome::Error { .. }));
    let again = run(program, &init, OraclePolicy::replaying(&answers), budget);
    for (i, recorded) in trace.steps.iter().enumerate() {
        let Some(fresh) = again.steps.get(i) else {
            return Ok(ReplayVerdict::Mismatch {
                step: Some(recorded.index),
                reason: format!("replay stopped early: {}", again.outcome),
            });
        };
        if fresh != recorded {
            let what = if fresh.updates != recorded.updates {
                "updates"
            } else if fresh.interactions != recorded.interactions {
                "interactions"
            } else {
                "halting flag"
            };
            return Ok(ReplayVerdict::Mismatch {
                step: Some(recorded.index),
                reason: format!("{what} differ"),
            });
        }
    }
    if again.steps.len() != trace.steps.len() {
        return Ok(ReplayVerdict::Mismatch {
            step: None,
            reason: format!("replay ran {} steps, trace has {}", again.steps.len(), trace.steps.len()),
        });
    }
    let oracle_failure = |k: ErrorKind| matches!(k, ErrorKind::Script | ErrorKind::Aborted);
    let outcome_ok = match (&trace.outcome, &again.outcome) {
        (Outcome::Error { kind: a, .. }, Outcome::Error { kind: b, .. }) => {
            a == b || (oracle_failure(*a) && oracle_failure(*b))
        }
        (a, b) => a == b,
    };
    if !outcome_ok {
        return Ok(ReplayVerdict::Mismatch {
            step: None,
            reason: format!("outcome {} vs recorded {}", again.outcome, trace.outcome),
        });
    }
    if again.final_state != trace.final_state {
        return Ok(ReplayVerdict::Mismatch {
            step: None,
            reason: "final states differ".into(),
        });
    }
    Ok(ReplayVerdict::Match)
}

/// True iff replaying the recorded answers reproduces every step exactly.
pub fn replay(trace: &Trace, program: &Program) -> Result<bool, RuntimeError> {
    replay_verdict(trace, program).map(|v| v.is_match())
}
