// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! Runnable property checks: bounded exploration, isomorphism invariance,
//! replay determinism, and strict behavioral equivalence of traces.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{ErrorKind, RuntimeError};
use crate::geometry::{Circle, Line, Point};
use crate::oracles::{Interaction, OraclePolicy, OracleSession, Query, Script, SplitMix64};
use crate::semantics::{eval_term_with_stats, replay_verdict, step_with_stats, ReplayVerdict, StepStats};
use crate::state::{Bijection, Location, State, UpdateSet};
use crate::syntax::{Program, Term};
use crate::trace::Trace;
use crate::value::{Sort, Value};
use crate::vocab::{Decl, Symbol, SymbolKind, Vocabulary};

/// Closed terms of the program text that determine a step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub terms: BTreeSet<Term>,
}

impl Witness {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.terms.contains(t)
    }
}

/// All subterms of the step rule's guards, right-hand sides, and assignment
/// targets, and of the halting condition.
pub fn exploration_witness(program: &Program) -> Witness {
    let mut terms = BTreeSet::new();
    let body = program.body();
    for t in body.step().terms().into_iter().chain(body.halt()) {
        terms.extend(t.subterms().into_iter().cloned());
    }
    Witness { terms }
}

/// Outcome of a check; it passes iff `failures` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub check_name: String,
    pub trials: u64,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn new(check_name: impl Into<String>) -> Self {
        CheckReport {
            check_name: check_name.into(),
            trials: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    /// Adds another report's trials and failures.
    pub fn absorb(&mut self, other: CheckReport) {
        self.trials += other.trials;
        self.failures.extend(other.failures);
    }
}

/// Computes one step. The interpreter is the real implementation; tests
/// substitute broken ones.
pub trait Stepper {
    fn step(
        &self,
        program: &Program,
        state: &State,
        session: &mut OracleSession,
    ) -> Result<(UpdateSet, Vec<Interaction>, StepStats), RuntimeError>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Interpreter;

impl Stepper for Interpreter {
    fn step(
        &self,
        program: &Program,
        state: &State,
        session: &mut OracleSession,
    ) -> Result<(UpdateSet, Vec<Interaction>, StepStats), RuntimeError> {
        session.begin_step();
        step_with_stats(program, state, program.body().step(), session)
    }
}

type StepResult = Result<(UpdateSet, Vec<Interaction>), ErrorKind>;

fn summarize(r: Result<(UpdateSet, Vec<Interaction>, StepStats), RuntimeError>) -> StepResult {
    r.map(|(u, i, _)| (u, i)).map_err(|e| e.kind)
}

fn describe(r: &StepResult) -> String {
    match r {
        Ok((u, i)) => {
            let us: Vec<String> = u.iter().map(|u| format!("{} := {}", u.location, u.value)).collect();
            let is: Vec<String> = i.iter().map(|i| format!("{} -> {}", i.query, i.answer)).collect();
            format!("updates {{{}}} interactions [{}]", us.join(", "), is.join(", "))
        }
        Err(k) => format!("error {k}"),
    }
}

fn describe_state(s: &State) -> String {
    let parts: Vec<String> = s.interp().iter().map(|(l, v)| format!("{l} = {v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

fn random_value(sort: &Sort, vocab: &Vocabulary, rng: &mut SplitMix64) -> Value {
    let coord = |rng: &mut SplitMix64| rng.next_in_range(-20, 20) as f64 + 0.5;
    let point = |rng: &mut SplitMix64| Point::new(coord(rng), coord(rng));
    match sort {
        Sort::Integer => Value::Int(rng.next_in_range(-1000, 1000)),
        Sort::Boolean => Value::Bool(rng.next_in_range(0, 1) == 1),
        Sort::Point => Value::Point(point(rng)),
        Sort::Circle => {
            let c = point(rng);
            Value::Circle(Circle::new(c, Point::new(c.x + 1.0, c.y)).expect("unit radius"))
        }
        Sort::Line => {
            let p = point(rng);
            Value::Line(Line::new(p, Point::new(p.x + 1.0, p.y + 2.0)).expect("distinct points"))
        }
        Sort::Enum(name) => {
            let members = vocab.members(name).unwrap_or(&[]);
            if members.is_empty() {
                Value::Undef
            } else {
                let i = rng.next_in_range(0, members.len() as i64 - 1);
                Value::Member(members[i as usize].clone())
            }
        }
    }
}

/// State giving every nullary dynamic symbol, and a few applied locations,
/// a random well-sorted value. Used when no program-specific sampler exists.
pub fn random_state(vocab: &Arc<Vocabulary>, rng: &mut SplitMix64) -> State {
    let mut bindings = Vec::new();
    for sym in vocab.symbols().filter(|s| s.kind == SymbolKind::Dynamic) {
        let count = if sym.arg_sorts.is_empty() { 1 } else { 3 };
        for _ in 0..count {
            let args = sym.arg_sorts.iter().map(|s| random_value(s, vocab, rng)).collect();
            bindings.push((Location::new(sym.name.clone(), args), random_value(&sym.result_sort, vocab, rng)));
        }
    }
    let mut seen = BTreeSet::new();
    bindings.retain(|(l, _): &(Location, Value)| !l.args.iter().any(Value::is_undef) && seen.insert(l.clone()));
    State::from_bindings(vocab.clone(), bindings).expect("random values are well sorted")
}

fn fresh_name(vocab: &Vocabulary, base: &str) -> String {
    let mut name = base.to_string();
    while vocab.symbol(&name).is_some() || vocab.sort(&name).is_some() || vocab.member_sort(&name).is_some() {
        name.push('_');
    }
    name
}

/// Vocabulary of `program` plus one fresh dynamic `g(Integer): Integer`
/// that the program cannot mention.
fn with_junk_symbol(vocab: &Vocabulary) -> (Arc<Vocabulary>, String) {
    let name = fresh_name(vocab, "g");
    let mut extended = vocab.clone();
    extended
        .push(Decl::Symbol(Symbol::new(
            name.clone(),
            vec![Sort::Integer],
            Sort::Integer,
            SymbolKind::Dynamic,
        )))
        .expect("fresh name");
    (Arc::new(extended), name)
}

/// Locations the witness terms read in `state`, answering oracle queries
/// from `answers`.
fn witness_reads(program: &Program, witness: &Witness, state: &State, answers: &[Interaction]) -> BTreeSet<Location> {
    let table: Vec<(Query, Value)> = answers.iter().map(|i| (i.query.clone(), i.answer.clone())).collect();
    let mut session = OracleSession::new(OraclePolicy::Scripted(Script::Table(table)));
    let mut reads = BTreeSet::new();
    for t in &witness.terms {
        let (_, stats) = eval_term_with_stats(program, state, t, &mut session);
        reads.extend(stats.reads);
    }
    reads
}

/// Copy of `x` (over an extended vocabulary) that differs only at locations
/// outside `protected`, including junk locations of a fresh symbol.
fn perturb(program: &Program, x: &State, protected: &BTreeSet<Location>, rng: &mut SplitMix64) -> State {
    let vocab = program.vocab();
    let (extended, junk) = with_junk_symbol(vocab);
    let mut bindings: Vec<(Location, Value)> = x.interp().iter().map(|(l, v)| (l.clone(), v.clone())).collect();
    let mut candidates: Vec<(Location, Sort)> = Vec::new();
    for sym in vocab.symbols().filter(|s| s.kind == SymbolKind::Dynamic) {
        for _ in 0..3 {
            let args = sym.arg_sorts.iter().map(|s| random_value(s, vocab, rng)).collect();
            candidates.push((Location::new(sym.name.clone(), args), sym.result_sort.clone()));
            if sym.arg_sorts.is_empty() {
                break;
            }
        }
    }
    let mut touched = BTreeSet::new();
    for (loc, sort) in candidates {
        if protected.contains(&loc) || loc.args.iter().any(Value::is_undef) || !touched.insert(loc.clone()) {
            continue;
        }
        let v = if rng.next_in_range(0, 3) == 0 {
            Value::Undef
        } else {
            random_value(&sort, vocab, rng)
        };
        bindings.retain(|(l, _)| l != &loc);
        bindings.push((loc, v));
    }
    for _ in 0..rng.next_in_range(1, 4) {
        let loc = Location::new(junk.clone(), vec![Value::Int(rng.next_in_range(-100, 100))]);
        bindings.retain(|(l, _)| l != &loc);
        bindings.push((loc, Value::Int(rng.next_in_range(-1000, 1000))));
    }
    State::from_bindings(extended, bindings).expect("perturbation keeps sorts")
}

/// For each trial, draws a state `X`, builds `Y` agreeing with `X` on every
/// witness term, and steps both with the same oracle answers (recorded on
/// `X` by a seeded uniform policy, replayed strictly on `Y`). Also checks
/// that the work of the step on `X` stays within the witness size.
pub fn check_bounded_exploration(
    program: &Program,
    sampler: &dyn Fn(&mut SplitMix64) -> State,
    trials: u64,
    seed: u64,
) -> CheckReport {
    check_bounded_exploration_with(&Interpreter, program, sampler, trials, seed)
}

pub fn check_bounded_exploration_with(
    stepper: &dyn Stepper,
    program: &Program,
    sampler: &dyn Fn(&mut SplitMix64) -> State,
    trials: u64,
    seed: u64,
) -> CheckReport {
    let witness = exploration_witness(program);
    let mut report = CheckReport::new("bexp");
    let mut rng = SplitMix64::new(seed);
    for trial in 0..trials {
        report.trials += 1;
        let x = sampler(&mut rng);
        let answer_seed = rng.next_u64();
        let mut record = OracleSession::new(OraclePolicy::UniformRandom { seed: answer_seed });
        let on_x = stepper.step(program, &x, &mut record);
        if let Ok((_, _, stats)) = &on_x {
            if stats.work() > witness.len() {
                report.failures.push(format!(
                    "trial {trial}: step read {} locations and asked {} queries, witness has {} terms; X = {}",
                    stats.reads.len(),
                    stats.queries.len(),
                    witness.len(),
                    describe_state(&x)
                ));
            }
        }
        let answers = record.log().to_vec();
        let y = perturb(program, &x, &witness_reads(program, &witness, &x, &answers), &mut rng);
        let mut replay = OracleSession::new(OraclePolicy::replaying(&answers));
        let on_y = stepper.step(program, &y, &mut replay);
        let (rx, ry) = (summarize(on_x), summarize(on_y));
        if rx != ry {
            report.failures.push(format!(
                "trial {trial} (answer seed {answer_seed}): X = {} gives {}; Y = {} gives {}",
                describe_state(&x),
                describe(&rx),
                describe_state(&y),
                describe(&ry)
            ));
        }
    }
    report
}

fn transport_interactions(pi: &Bijection, log: &[Interaction]) -> Vec<Interaction> {
    log.iter()
        .map(|i| Interaction {
            query: Query::new(i.query.oracle.clone(), i.query.args.iter().map(|a| pi.value(a)).collect()),
            answer: pi.value(&i.answer),
        })
        .collect()
}

/// Compares `step(π X)` with `π(step X)`: `X` is stepped with `answers`
/// replayed strictly, `π X` with the answers transported through `π`.
pub fn check_iso_invariance(
    program: &Program,
    state: &State,
    bijection: &Bijection,
    answers: &[Interaction],
) -> Result<CheckReport, RuntimeError> {
    check_iso_invariance_with(&Interpreter, program, state, bijection, answers)
}

pub fn check_iso_invariance_with(
    stepper: &dyn Stepper,
    program: &Program,
    state: &State,
    bijection: &Bijection,
    answers: &[Interaction],
) -> Result<CheckReport, RuntimeError> {
    bijection.validate(program.vocab())?;
    let moved = state.transport(bijection)?;
    let mut report = CheckReport::new("iso");
    report.trials = 1;
    let mut on_x = OracleSession::new(OraclePolicy::replaying(answers));
    let expected = summarize(stepper.step(program, state, &mut on_x))
        .map(|(u, i)| (bijection.update_set(&u), transport_interactions(bijection, &i)));
    let mut on_moved = OracleSession::new(OraclePolicy::replaying(&transport_interactions(bijection, answers)));
    let got = summarize(stepper.step(program, &moved, &mut on_moved));
    if expected != got {
        report.failures.push(format!(
            "bijection {bijection} on X = {}: transported step gives {}, step of transported state gives {}",
            describe_state(state),
            describe(&expected),
            describe(&got)
        ));
    }
    Ok(report)
}

/// Iso invariance for every bijection of the enum universes, answering
/// the queries of `X` from `policy`.
pub fn check_iso_all(program: &Program, state: &State, policy: OraclePolicy) -> Result<CheckReport, RuntimeError> {
    let mut session = OracleSession::new(policy);
    // errors surface again in the per-bijection comparison
    let _ = Interpreter.step(program, state, &mut session);
    let answers = session.log().to_vec();
    let mut report = CheckReport::new("iso");
    for pi in Bijection::all(program.vocab()) {
        report.absorb(check_iso_invariance(program, state, &pi, &answers)?);
    }
    Ok(report)
}

/// First difference between two traces under strict stepwise equivalence,
/// or `None` when they are equivalent.
pub fn equivalence_difference(t1: &Trace, t2: &Trace) -> Result<Option<String>, RuntimeError> {
    if t1.vocab_id != t2.vocab_id {
        return Err(RuntimeError::new(
            ErrorKind::VocabularyMismatch,
            format!("traces use vocabularies {} and {}", t1.vocab_id, t2.vocab_id),
        ));
    }
    for (a, b) in t1.steps.iter().zip(&t2.steps) {
        if a.updates != b.updates {
            return Ok(Some(format!("step {}: update sets differ", a.index)));
        }
        if a.interactions != b.interactions {
            return Ok(Some(format!("step {}: interactions differ", a.index)));
        }
    }
    if t1.steps.len() != t2.steps.len() {
        return Ok(Some(format!(
            "step counts differ: {} vs {}",
            t1.steps.len(),
            t2.steps.len()
        )));
    }
    if t1.outcome.label() != t2.outcome.label() || t1.outcome != t2.outcome {
        return Ok(Some(format!("outcomes differ: {} vs {}", t1.outcome, t2.outcome)));
    }
    Ok(None)
}

/// Strict reading: equal update sets and equal interaction sequences at
/// every step, and the same outcome. Initial states are not compared.
pub fn behaviorally_equivalent(t1: &Trace, t2: &Trace) -> Result<bool, RuntimeError> {
    equivalence_difference(t1, t2).map(|d| d.is_none())
}

pub fn equivalence_report(t1: &Trace, t2: &Trace) -> Result<CheckReport, RuntimeError> {
    let mut report = CheckReport::new("equiv");
    report.trials = 1;
    report.failures.extend(equivalence_difference(t1, t2)?);
    Ok(report)
}

pub fn replay_report(traces: &[Trace], program: &Program) -> Result<CheckReport, RuntimeError> {
    let mut report = CheckReport::new("replay");
    for (i, t) in traces.iter().enumerate() {
        report.trials += 1;
        if let ReplayVerdict::Mismatch { step, reason } = replay_verdict(t, program)? {
            let at = step.map(|s| format!(" at step {s}")).unwrap_or_default();
            report.failures.push(format!("trace {i}{at}: {reason}"));
        }
    }
    Ok(report)
}

/// Steps whose interaction list asks the same query twice.
pub fn cache_law_violations(trace: &Trace) -> Vec<u64> {
    trace
        .steps
        .iter()
        .filter(|s| {
            let mut seen = BTreeSet::new();
            !s.interactions.iter().all(|i| seen.insert(&i.query))
        })
        .map(|s| s.index)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::op;

    const EUCLID: &str = "vocab { var a: Integer; var b: Integer; var d: Integer; }
do until d = a { if b > 0 then par { a := b; b := a mod b } else d := a }";

    #[test]
    fn euclid_witness_contains_the_expected_terms() {
        let p = Program::parse(EUCLID).unwrap();
        let w = exploration_witness(&p);
        let (a, b, d) = (Term::var("a"), Term::var("b"), Term::var("d"));
        for t in [
            Term::binary(op::GT, b.clone(), Term::int(0)),
            b.clone(),
            Term::int(0),
            a.clone(),
            Term::binary(op::MOD, a.clone(), b.clone()),
            d.clone(),
            Term::binary(op::EQ, d, a),
        ] {
            assert!(w.contains(&t), "missing {t:?}");
        }
    }

    #[test]
    fn single_assignment_witness() {
        let p = Program::parse("vocab { var x: Integer; } do until x = 1 { x := 1 }").unwrap();
        let step_only: BTreeSet<Term> = p
            .body()
            .step()
            .terms()
            .into_iter()
            .flat_map(|t| t.subterms().into_iter().cloned())
            .collect();
        assert_eq!(step_only, BTreeSet::from([Term::int(1), Term::var("x")]));
    }

    #[test]
    fn zero_trials_is_a_vacuous_pass() {
        let p = Program::parse(EUCLID).unwrap();
        let sampler = |_: &mut SplitMix64| State::empty(p.vocab().clone());
        let r = check_bounded_exploration(&p, &sampler, 0, 1);
        assert!(r.passed());
        assert_eq!(r.trials, 0);
    }

    #[test]
    fn report_json_field_order() {
        let r = CheckReport::new("bexp");
        assert_eq!(r.to_json(), r#"{"checkName":"bexp","trials":0,"failures":[]}"#);
    }
}
