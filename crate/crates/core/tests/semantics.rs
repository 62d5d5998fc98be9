// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use basm::semantics::{replay_verdict, step_with_stats, ReplayVerdict};
use basm::syntax::{parse_state, parse_term};
use basm::{
    eval_term, replay, run, step, ErrorKind, Location, OraclePolicy, OracleSession, Outcome, Program, State,
    UpdateSet, Value,
};
use proptest::prelude::*;

const EUCLID: &str = "vocab { var a: Integer; var b: Integer; var d: Integer; }
do until d = a { if b > 0 then par { a := b; b := a mod b } else d := a }";

const IMPLICIT: &str = "vocab { var a: Integer; var b: Integer; var d: Integer; }
iterate { if b > 0 then par { a := b; b := a mod b } else d := a }";

const PRIMALITY: &str = "vocab {
  var n: Integer; var k: Integer; var i: Integer; var a: Integer; var prime: Boolean;
  oracle Random(Integer, Integer): Integer;
}
do until prime = false or i > k or n < 4 {
  par {
    a := Random(2, n - 2);
    i := i + 1;
    if powmod(Random(2, n - 2), n - 1, n) != 1 then prime := false
  }
}";

fn state(p: &Program, text: &str) -> State {
    parse_state(p.vocab().clone(), text).unwrap()
}

fn updates(pairs: &[(&str, i64)]) -> UpdateSet {
    pairs.iter().map(|(l, v)| (Location::var(*l), Value::Int(*v))).collect()
}

fn eval(p: &Program, s: &State, term: &str) -> (Value, usize) {
    let t = parse_term(p, term).unwrap();
    let mut session = OracleSession::new(OraclePolicy::Builtin);
    session.begin_step();
    let (v, log) = eval_term(p, s, &t, &mut session).unwrap();
    (v, log.len())
}

#[test]
fn eval_mod_and_comparison() {
    let p = Program::parse(EUCLID).unwrap();
    assert_eq!(eval(&p, &state(&p, "a := 12\nb := 8"), "a mod b"), (Value::Int(4), 0));
    assert_eq!(eval(&p, &state(&p, "b := 0"), "b > 0"), (Value::Bool(false), 0));
}

#[test]
fn mod_by_zero_is_arith() {
    let p = Program::parse(EUCLID).unwrap();
    let t = parse_term(&p, "a mod b").unwrap();
    let mut session = OracleSession::new(OraclePolicy::Builtin);
    let err = eval_term(&p, &state(&p, "a := 3\nb := 0"), &t, &mut session).unwrap_err();
    assert_eq!(err.kind, ErrorKind::Arith);
}

#[test]
fn repeated_oracle_term_is_asked_once_per_step() {
    let p = Program::parse(PRIMALITY).unwrap();
    let s = state(&p, "n := 7");
    let t = parse_term(&p, "Random(2, n - 2) - Random(2, n - 2)").unwrap();
    let mut session = OracleSession::new(OraclePolicy::UniformRandom { seed: 3 });
    session.begin_step();
    let (v, log) = eval_term(&p, &s, &t, &mut session).unwrap();
    assert_eq!(v, Value::Int(0));
    assert_eq!(log.len(), 1);
}

#[test]
fn apply_updates_examples() {
    let p = Program::parse(EUCLID).unwrap();
    let s = state(&p, "a := 12\nb := 8");
    let t = s.apply_updates(&updates(&[("a", 8), ("b", 4)])).unwrap();
    assert_eq!(t, state(&p, "a := 8\nb := 4"));
    assert_eq!(s.apply_updates(&UpdateSet::new()).unwrap(), s);
    let bad: UpdateSet = [(Location::var("d"), Value::Int(4)), (Location::var("d"), Value::Int(5))]
        .into_iter()
        .collect();
    let err = s.apply_updates(&bad).unwrap_err();
    assert_eq!(err.kind, ErrorKind::Clash);
    assert!(err.message.contains("at d"), "{}", err.message);
}

#[test]
fn assigning_undef_clears_the_location() {
    let p = Program::parse(EUCLID).unwrap();
    let s = state(&p, "a := 12");
    let mut u = UpdateSet::new();
    u.insert(Location::var("a"), Value::Undef);
    assert!(s.apply_updates(&u).unwrap().interp().is_empty());
}

#[test]
fn euclid_step_examples() {
    let p = Program::parse(EUCLID).unwrap();
    let mut session = OracleSession::new(OraclePolicy::Builtin);
    let (u, i) = step(&p, &state(&p, "a := 12\nb := 8"), p.body().step(), &mut session).unwrap();
    assert_eq!(u, updates(&[("a", 8), ("b", 4)]));
    assert!(i.is_empty());
    let (u, _) = step(&p, &state(&p, "a := 4\nb := 0"), p.body().step(), &mut session).unwrap();
    assert_eq!(u, updates(&[("d", 4)]));
}

#[test]
fn parallel_clash_is_an_error_outcome_with_partial_trace() {
    let p = Program::parse("vocab { var x: Integer; var y: Integer; }
do until y = 2 { if y = 1 then par { x := 1; x := 2 } else y := 1 }")
    .unwrap();
    let t = run(&p, &State::empty(p.vocab().clone()), OraclePolicy::Builtin, 10);
    assert_eq!(t.steps.len(), 1);
    match &t.outcome {
        Outcome::Error { kind, message } => {
            assert_eq!(*kind, ErrorKind::Clash);
            assert!(message.contains("clash at x"));
        }
        o => panic!("unexpected outcome {o}"),
    }
    assert_eq!(t.final_var("y"), Value::Int(1));
}

#[test]
fn euclid_run_takes_three_steps() {
    let p = Program::parse(EUCLID).unwrap();
    let t = run(&p, &state(&p, "a := 12\nb := 8"), OraclePolicy::Builtin, 100);
    assert_eq!(t.outcome, Outcome::Halted);
    assert_eq!(t.steps.len(), 3);
    assert_eq!(t.final_var("d"), Value::Int(4));
    assert!(t.steps.last().unwrap().halted_after);
    assert!(t.updates_reproduce_final(p.vocab().clone()));
}

#[test]
fn implicit_iteration_reaches_a_fixed_point() {
    let p = Program::parse(IMPLICIT).unwrap();
    let t = run(&p, &state(&p, "a := 12\nb := 8"), OraclePolicy::Builtin, 100);
    assert_eq!(t.outcome, Outcome::Halted);
    assert_eq!(t.final_var("d"), Value::Int(4));
    let last = t.steps.last().unwrap();
    let before = State::from_bindings(p.vocab().clone(), t.final_state.clone()).unwrap();
    assert!(before.is_fixed_by(&last.updates));
    assert_eq!(t.steps.len(), 4);
}

#[test]
fn halting_is_checked_before_the_first_step() {
    let p = Program::parse(EUCLID).unwrap();
    let t = run(&p, &state(&p, "a := 3\nd := 3"), OraclePolicy::Builtin, 100);
    assert_eq!(t.outcome, Outcome::Halted);
    assert!(t.steps.is_empty());
}

#[test]
fn step_limit() {
    let p = Program::parse("vocab { var x: Integer; } do until x < 0 { x := x + 1 }").unwrap();
    let s = State::from_bindings(p.vocab().clone(), [(Location::var("x"), Value::Int(0))]).unwrap();
    let t = run(&p, &s, OraclePolicy::Builtin, 5);
    assert_eq!(t.outcome, Outcome::StepLimit);
    assert_eq!(t.steps.len(), 5);
    assert_eq!(t.final_var("x"), Value::Int(5));
}

#[test]
fn primality_n7_is_prime_for_every_seed() {
    let p = Program::parse(PRIMALITY).unwrap();
    let s = state(&p, "n := 7\nk := 2\ni := 1\na := 1\nprime := true");
    for seed in 0..50 {
        let t = run(&p, &s, OraclePolicy::UniformRandom { seed }, 100);
        assert_eq!(t.outcome, Outcome::Halted);
        assert_eq!(t.final_var("prime"), Value::Bool(true));
        assert_eq!(t.steps.len(), 2);
    }
}

#[test]
fn the_tested_base_is_the_stored_base() {
    let p = Program::parse(PRIMALITY).unwrap();
    let s = state(&p, "n := 15\nk := 1\ni := 1\na := 1\nprime := true");
    for seed in 0..200 {
        let t = run(&p, &s, OraclePolicy::UniformRandom { seed }, 10);
        let a = t.final_var("a").as_int().unwrap();
        let liar = (0..14).fold(1, |acc, _| acc * a % 15) == 1;
        assert_eq!(t.final_var("prime"), Value::Bool(liar), "seed {seed}, a = {a}");
    }
}

#[test]
fn replay_detects_an_altered_answer() {
    let p = Program::parse(PRIMALITY).unwrap();
    let s = state(&p, "n := 91\nk := 3\ni := 1\na := 1\nprime := true");
    let t = run(&p, &s, OraclePolicy::UniformRandom { seed: 11 }, 100);
    assert!(replay(&t, &p).unwrap());
    let mut altered = t.clone();
    let first = &mut altered.steps[0].interactions[0];
    let old = first.answer.as_int().unwrap();
    first.answer = Value::Int(if old == 2 { 3 } else { 2 });
    match replay_verdict(&altered, &p).unwrap() {
        ReplayVerdict::Mismatch { step, .. } => assert_eq!(step, Some(1)),
        ReplayVerdict::Match => panic!("altered trace replayed"),
    }
}

#[test]
fn replay_rejects_a_different_program() {
    let p = Program::parse(EUCLID).unwrap();
    let q = Program::parse(IMPLICIT).unwrap();
    let t = run(&p, &state(&p, "a := 12\nb := 8"), OraclePolicy::Builtin, 100);
    assert_eq!(replay(&t, &q).unwrap_err().kind, ErrorKind::ProgramMismatch);
}

#[test]
fn reclassified_mod_is_logged_as_an_interaction() {
    let p = Program::parse(EUCLID).unwrap().with_oracle_statics(["mod"]).unwrap();
    let t = run(&p, &state(&p, "a := 12\nb := 8"), OraclePolicy::Builtin, 100);
    assert_eq!(t.final_var("d"), Value::Int(4));
    assert_eq!(t.interaction_count(), 2);
    assert!(replay(&t, &p).unwrap());
}

#[test]
fn mod_cannot_be_reclassified_in_implicit_iteration() {
    let p = Program::parse(IMPLICIT).unwrap();
    assert!(p.with_oracle_statics(["mod"]).is_err());
}

#[test]
fn undefined_oracle_argument_asks_nothing() {
    let p = Program::parse(PRIMALITY).unwrap();
    let mut session = OracleSession::new(OraclePolicy::Builtin);
    let (u, i, stats) = step_with_stats(&p, &State::empty(p.vocab().clone()), p.body().step(), &mut session).unwrap();
    assert!(i.is_empty());
    assert!(stats.queries.is_empty());
    assert_eq!(u.get(&Location::var("a")), Some(&Value::Undef));
}

fn arb_euclid_state() -> impl Strategy<Value = BTreeMap<&'static str, i64>> {
    (0i64..500, 0i64..500, prop::option::of(0i64..500)).prop_map(|(a, b, d)| {
        let mut m = BTreeMap::from([("a", a), ("b", b)]);
        if let Some(d) = d {
            m.insert("d", d);
        }
        m
    })
}

proptest! {
    #[test]
    fn step_is_deterministic(init in arb_euclid_state()) {
        let p = Program::parse(EUCLID).unwrap();
        let s = State::from_bindings(
            p.vocab().clone(),
            init.iter().map(|(k, v)| (Location::var(*k), Value::Int(*v))),
        ).unwrap();
        let mut s1 = OracleSession::new(OraclePolicy::Builtin);
        let mut s2 = OracleSession::new(OraclePolicy::Builtin);
        prop_assert_eq!(
            step(&p, &s, p.body().step(), &mut s1).map_err(|e| e.kind),
            step(&p, &s, p.body().step(), &mut s2).map_err(|e| e.kind)
        );
    }

    #[test]
    fn frame_property(init in arb_euclid_state(), a in prop::option::of(0i64..9), d in prop::option::of(0i64..9)) {
        let p = Program::parse(EUCLID).unwrap();
        let s = State::from_bindings(
            p.vocab().clone(),
            init.iter().map(|(k, v)| (Location::var(*k), Value::Int(*v))),
        ).unwrap();
        let mut u = UpdateSet::new();
        if let Some(a) = a { u.insert(Location::var("a"), Value::Int(a)); }
        if let Some(d) = d { u.insert(Location::var("d"), Value::Int(d)); }
        let t = s.apply_updates(&u).unwrap();
        for name in ["a", "b", "d"] {
            let loc = Location::var(name);
            let expected = u.get(&loc).cloned().unwrap_or_else(|| s.get(&loc));
            prop_assert_eq!(t.get(&loc), expected);
        }
    }

    #[test]
    fn run_then_replay(seed in any::<u64>(), n in 5i64..300, k in 1i64..4) {
        let p = Program::parse(PRIMALITY).unwrap();
        let s = state(&p, &format!("n := {n}\nk := {k}\ni := 1\na := 1\nprime := true"));
        let t = run(&p, &s, OraclePolicy::UniformRandom { seed }, 100);
        prop_assert!(replay(&t, &p).unwrap());
        prop_assert!(t.updates_reproduce_final(p.vocab().clone()));
        let replayed = run(&p, &s, OraclePolicy::replaying(
            &t.steps.iter().flat_map(|s| s.interactions.clone()).collect::<Vec<_>>()), 100);
        prop_assert_eq!(replayed, t);
    }
}
