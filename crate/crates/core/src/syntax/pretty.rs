// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;

use super::{op, Body, Program, Rule, Term};
use crate::value::Value;
use crate::vocab::{sort_list, Decl, Vocabulary};

const INDENT: &str = "  ";

fn infix(name: &str) -> Option<(u8, &'static str)> {
    Some(match name {
        op::OR => (1, "or"),
        op::AND => (2, "and"),
        op::EQ => (4, "="),
        op::NE => (4, "!="),
        op::LT => (4, "<"),
        op::LE => (4, "<="),
        op::GT => (4, ">"),
        op::GE => (4, ">="),
        op::ADD => (5, "+"),
        op::SUB => (5, "-"),
        op::MUL => (6, "*"),
        op::DIV => (6, "div"),
        op::MOD => (6, "mod"),
        _ => return None,
    })
}

const NOT_PREC: u8 = 3;
const UNARY_PREC: u8 = 7;
const ATOM_PREC: u8 = 8;

fn prec(t: &Term) -> u8 {
    match t {
        Term::Const(Value::Int(n)) if *n < 0 => UNARY_PREC,
        Term::App(name, args) if args.len() == 2 && infix(name).is_some() => infix(name).unwrap().0,
        Term::App(name, args) if name == op::NOT && args.len() == 1 => NOT_PREC,
        Term::App(name, args) if name == op::NEG && args.len() == 1 => UNARY_PREC,
        _ => ATOM_PREC,
    }
}

fn term_at(out: &mut String, t: &Term, ctx: u8) {
    let p = prec(t);
    let paren = p < ctx;
    if paren {
        out.push('(');
    }
    match t {
        Term::Const(v) => write!(out, "{v}").unwrap(),
        Term::Var(name) => out.push_str(name),
        Term::App(name, args) => {
            if let (Some((level, sym)), 2) = (infix(name), args.len()) {
                // comparisons do not chain
                let (l, r) = if level == 4 { (level + 1, level + 1) } else { (level, level + 1) };
                term_at(out, &args[0], l);
                write!(out, " {sym} ").unwrap();
                term_at(out, &args[1], r);
            } else if name == op::NOT && args.len() == 1 {
                out.push_str("not ");
                term_at(out, &args[0], NOT_PREC);
            } else if name == op::NEG && args.len() == 1 {
                out.push('-');
                if matches!(args[0], Term::Const(Value::Int(_))) {
                    out.push('(');
                    term_at(out, &args[0], 0);
                    out.push(')');
                } else {
                    term_at(out, &args[0], UNARY_PREC);
                }
            } else {
                out.push_str(name);
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    term_at(out, a, 0);
                }
                out.push(')');
            }
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn pretty_term(t: &Term) -> String {
    let mut out = String::new();
    term_at(&mut out, t, 0);
    out
}

/// Whether the rule's text ends in an `if` that a following `else` would attach to.
fn open_tail(r: &Rule) -> bool {
    match r {
        Rule::Cond { otherwise: None, .. } => true,
        Rule::Cond {
            otherwise: Some(o), ..
        } => open_tail(o),
        _ => false,
    }
}

fn rule_at(out: &mut String, r: &Rule, depth: usize) {
    let pad = INDENT.repeat(depth);
    match r {
        Rule::Skip => out.push_str("skip"),
        Rule::Assign { target, value } => {
            write!(out, "{} := {}", pretty_term(target), pretty_term(value)).unwrap()
        }
        Rule::Cond {
            guard,
            then,
            otherwise,
        } => {
            write!(out, "if {} then ", pretty_term(guard)).unwrap();
            // an else-less conditional in the then-branch would capture our else
            let wrap = otherwise.is_some() && open_tail(then);
            if wrap {
                write!(out, "{{\n{pad}{INDENT}").unwrap();
                rule_at(out, then, depth + 1);
                write!(out, "\n{pad}}}").unwrap();
            } else {
                rule_at(out, then, depth);
            }
            if let Some(o) = otherwise {
                write!(out, "\n{pad}else ").unwrap();
                rule_at(out, o, depth);
            }
        }
        Rule::Par(rules) => {
            if rules.is_empty() {
                out.push_str("par { }");
                return;
            }
            out.push_str("par {");
            for (i, r) in rules.iter().enumerate() {
                write!(out, "\n{pad}{INDENT}").unwrap();
                rule_at(out, r, depth + 1);
                if i + 1 < rules.len() {
                    out.push(';');
                }
            }
            write!(out, "\n{pad}}}").unwrap();
        }
    }
}

pub fn pretty_rule(r: &Rule) -> String {
    let mut out = String::new();
    rule_at(&mut out, r, 0);
    out
}

pub fn pretty_vocab(v: &Vocabulary) -> String {
    let mut out = String::from("vocab {\n");
    for d in v.decls() {
        out.push_str(INDENT);
        match d {
            Decl::Enum { name, members } => {
                write!(out, "enum {name} = {{{}}};", members.join(", ")).unwrap()
            }
            Decl::Symbol(s) => {
                write!(out, "{} {}", s.kind.keyword(), s.name).unwrap();
                if !s.arg_sorts.is_empty() {
                    write!(out, "({})", sort_list(&s.arg_sorts)).unwrap();
                }
                write!(out, ": {};", s.result_sort).unwrap();
            }
        }
        out.push('\n');
    }
    out.push('}');
    out
}

/// Canonical program text; parsing it yields a structurally equal program.
pub fn pretty(p: &Program) -> String {
    let mut out = pretty_vocab(p.vocab());
    out.push('\n');
    match p.body() {
        Body::DoUntil { halt, step } => {
            write!(out, "do until {} {{\n{INDENT}", pretty_term(halt)).unwrap();
            rule_at(&mut out, step, 1);
        }
        Body::Iterate { step } => {
            write!(out, "iterate {{\n{INDENT}").unwrap();
            rule_at(&mut out, step, 1);
        }
    }
    out.push_str("\n}\n");
    out
}
