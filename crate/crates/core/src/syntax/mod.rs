// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! Terms, rules, and programs of the ASM language, with the static checks
//! that every program passes before it can run.
//!
//! A step rule is built only from assignments, conditionals, and `par`
//! blocks whose width is fixed by the program text. Iteration exists only
//! at the top level, as `do until H { R }` or `iterate { R }`.

mod lexer;
mod parser;
mod pretty;

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{ParseError, ParseErrorKind};
use crate::value::{Sort, Value};
use crate::vocab::{SymbolKind, Vocabulary};

pub use parser::{parse_literal, parse_location, parse_program, parse_state, parse_term};
pub use pretty::{pretty, pretty_rule, pretty_term, pretty_vocab};

/// Binary and unary operators. Their names are the `App` symbol names.
pub mod op {
    pub const EQ: &str = "=";
    pub const NE: &str = "!=";
    pub const LT: &str = "<";
    pub const LE: &str = "<=";
    pub const GT: &str = ">";
    pub const GE: &str = ">=";
    pub const ADD: &str = "+";
    pub const SUB: &str = "-";
    pub const MUL: &str = "*";
    pub const DIV: &str = "div";
    pub const MOD: &str = "mod";
    pub const NEG: &str = "neg";
    pub const AND: &str = "and";
    pub const OR: &str = "or";
    pub const NOT: &str = "not";
    pub const POWMOD: &str = "powmod";
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Literal: integer, boolean, `undef`, or enum member.
    Const(Value),
    /// Nullary symbol.
    Var(String),
    /// Symbol or operator applied to arguments.
    App(String, Vec<Term>),
}

impl Term {
    pub fn int(n: i64) -> Term {
        Term::Const(Value::Int(n))
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn binary(op: &str, lhs: Term, rhs: Term) -> Term {
        Term::App(op.to_string(), vec![lhs, rhs])
    }

    /// Pre-order traversal including `self`.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = vec![self];
        if let Term::App(_, args) = self {
            for a in args {
                out.extend(a.subterms());
            }
        }
        out
    }

    pub fn head(&self) -> Option<&str> {
        match self {
            Term::Const(_) => None,
            Term::Var(s) | Term::App(s, _) => Some(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Skip,
    /// `target := value`; `target` is a dynamic `Var` or `App`.
    Assign { target: Term, value: Term },
    Cond {
        guard: Term,
        then: Box<Rule>,
        otherwise: Option<Box<Rule>>,
    },
    Par(Vec<Rule>),
}

impl Rule {
    pub fn assign(target: Term, value: Term) -> Rule {
        Rule::Assign { target, value }
    }

    pub fn cond(guard: Term, then: Rule, otherwise: Option<Rule>) -> Rule {
        Rule::Cond {
            guard,
            then: Box::new(then),
            otherwise: otherwise.map(Box::new),
        }
    }

    /// Every term occurring in the rule: guards, right-hand sides, and
    /// assignment targets.
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Rule::Skip => Vec::new(),
            Rule::Assign { target, value } => vec![target, value],
            Rule::Cond {
                guard,
                then,
                otherwise,
            } => {
                let mut out = vec![guard];
                out.extend(then.terms());
                if let Some(o) = otherwise {
                    out.extend(o.terms());
                }
                out
            }
            Rule::Par(rules) => rules.iter().flat_map(Rule::terms).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Body {
    /// Run `step` until `halt` holds, checking before each step.
    DoUntil { halt: Term, step: Rule },
    /// Run `step` until it produces no change.
    Iterate { step: Rule },
}

impl Body {
    pub fn step(&self) -> &Rule {
        match self {
            Body::DoUntil { step, .. } | Body::Iterate { step } => step,
        }
    }

    pub fn halt(&self) -> Option<&Term> {
        match self {
            Body::DoUntil { halt, .. } => Some(halt),
            Body::Iterate { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    vocab: Arc<Vocabulary>,
    body: Body,
    oracle_statics: BTreeSet<String>,
}

impl Program {
    /// Checks sorts, arities, assignment targets, and the oracle
    /// restrictions on halting conditions and `iterate` bodies.
    pub fn new(vocab: Vocabulary, body: Body) -> Result<Program, ParseError> {
        let program = Program {
            vocab: Arc::new(vocab),
            body,
            oracle_statics: BTreeSet::new(),
        };
        program.check()?;
        Ok(program)
    }

    pub fn parse(text: &str) -> Result<Program, ParseError> {
        parse_program(text)
    }

    /// Reclassifies static symbols or arithmetic operators (e.g. `mod`) as
    /// deterministic oracles: they keep their library meaning but every
    /// application becomes a logged interaction.
    pub fn with_oracle_statics<I, S>(mut self, names: I) -> Result<Program, ParseError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for name in names {
            let name = name.into();
            let known = operator_signature(&name).is_some()
                || matches!(self.vocab.symbol(&name), Some(s) if s.kind == SymbolKind::Static);
            if !known {
                return Err(ParseError::unpositioned(
                    ParseErrorKind::UnknownSymbol,
                    format!("`{name}` is not a static symbol"),
                ));
            }
            self.oracle_statics.insert(name);
        }
        self.check()?;
        Ok(self)
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn oracle_statics(&self) -> &BTreeSet<String> {
        &self.oracle_statics
    }

    pub fn pretty(&self) -> String {
        pretty(self)
    }

    /// Hex SHA-256 of the canonical program text.
    pub fn id(&self) -> String {
        crate::digest_hex(self.pretty().as_bytes())
    }

    /// Whether evaluating `name` goes through an oracle session.
    pub fn is_oracle(&self, name: &str) -> bool {
        self.oracle_statics.contains(name)
            || matches!(self.vocab.symbol(name), Some(s) if s.kind == SymbolKind::Oracle)
    }

    pub fn mentions_oracle(&self, term: &Term) -> bool {
        term.subterms()
            .into_iter()
            .any(|t| t.head().is_some_and(|h| self.is_oracle(h)))
    }

    fn check(&self) -> Result<(), ParseError> {
        let checker = Checker { program: self };
        checker.rule(self.body.step())?;
        match &self.body {
            Body::DoUntil { halt, .. } => {
                checker.expect(halt, &Sort::Boolean, "halting condition")?;
                if self.mentions_oracle(halt) {
                    return Err(ParseError::unpositioned(
                        ParseErrorKind::InteractiveHalt,
                        "halting condition must not query an oracle",
                    ));
                }
            }
            Body::Iterate { step } => {
                if step.terms().into_iter().any(|t| self.mentions_oracle(t)) {
                    return Err(ParseError::unpositioned(
                        ParseErrorKind::InteractiveFixpoint,
                        "iterate body queries an oracle; use `do until` with an explicit halting condition",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Sort of a term (`None` for a bare `undef`).
    pub fn term_sort(&self, term: &Term) -> Result<Option<Sort>, ParseError> {
        Checker { program: self }.term(term)
    }
}

/// Signatures of predeclared operators other than the polymorphic `=`/`!=`.
pub fn operator_signature(name: &str) -> Option<(Vec<Sort>, Sort)> {
    use Sort::*;
    Some(match name {
        op::LT | op::LE | op::GT | op::GE => (vec![Integer, Integer], Boolean),
        op::ADD | op::SUB | op::MUL | op::DIV | op::MOD => (vec![Integer, Integer], Integer),
        op::NEG => (vec![Integer], Integer),
        op::POWMOD => (vec![Integer, Integer, Integer], Integer),
        op::AND | op::OR => (vec![Boolean, Boolean], Boolean),
        op::NOT => (vec![Boolean], Boolean),
        op::EQ | op::NE => return None,
        _ => return None,
    })
}

struct Checker<'a> {
    program: &'a Program,
}

fn err(kind: ParseErrorKind, msg: String) -> ParseError {
    ParseError::unpositioned(kind, msg)
}

fn compatible(a: &Option<Sort>, b: &Sort) -> bool {
    a.as_ref().is_none_or(|a| a == b)
}

impl Checker<'_> {
    fn vocab(&self) -> &Vocabulary {
        &self.program.vocab
    }

    fn term(&self, term: &Term) -> Result<Option<Sort>, ParseError> {
        match term {
            Term::Const(Value::Undef) => Ok(None),
            Term::Const(Value::Int(_)) => Ok(Some(Sort::Integer)),
            Term::Const(Value::Bool(_)) => Ok(Some(Sort::Boolean)),
            Term::Const(Value::Member(m)) => self
                .vocab()
                .member_sort(m)
                .map(Some)
                .ok_or_else(|| err(ParseErrorKind::UnknownSymbol, format!("unknown enum member `{m}`"))),
            Term::Const(v) => Err(err(
                ParseErrorKind::Syntax,
                format!("geometric literal {v} cannot appear in a program"),
            )),
            Term::Var(name) => self.app(name, &[]),
            Term::App(name, args) => self.app(name, args),
        }
    }

    fn app(&self, name: &str, args: &[Term]) -> Result<Option<Sort>, ParseError> {
        let arg_sorts = args
            .iter()
            .map(|a| self.term(a))
            .collect::<Result<Vec<_>, _>>()?;
        if name == op::EQ || name == op::NE {
            if args.len() != 2 {
                return Err(err(ParseErrorKind::Arity, format!("`{name}` takes 2 arguments")));
            }
            if let (Some(a), Some(b)) = (&arg_sorts[0], &arg_sorts[1]) {
                if a != b {
                    return Err(err(
                        ParseErrorKind::Sort,
                        format!("cannot compare {a} with {b}"),
                    ));
                }
            }
            return Ok(Some(Sort::Boolean));
        }
        let (expected, result) = match operator_signature(name) {
            Some(sig) => sig,
            None => {
                let sym = self.vocab().symbol(name).ok_or_else(|| {
                    err(ParseErrorKind::UnknownSymbol, format!("unknown symbol `{name}`"))
                })?;
                (sym.arg_sorts.clone(), sym.result_sort.clone())
            }
        };
        if expected.len() != args.len() {
            return Err(err(
                ParseErrorKind::Arity,
                format!("`{name}` takes {} arguments, got {}", expected.len(), args.len()),
            ));
        }
        for (i, (got, want)) in arg_sorts.iter().zip(&expected).enumerate() {
            if !compatible(got, want) {
                return Err(err(
                    ParseErrorKind::Sort,
                    format!(
                        "argument {} of `{name}` must be {want}, found {}",
                        i + 1,
                        got.as_ref().map_or("undef", |s| s.name())
                    ),
                ));
            }
        }
        Ok(Some(result))
    }

    fn expect(&self, term: &Term, sort: &Sort, what: &str) -> Result<(), ParseError> {
        let got = self.term(term)?;
        if !compatible(&got, sort) {
            return Err(err(
                ParseErrorKind::Sort,
                format!("{what} must be {sort}, found {}", got.map_or("undef".to_string(), |s| s.to_string())),
            ));
        }
        Ok(())
    }

    fn rule(&self, rule: &Rule) -> Result<(), ParseError> {
        match rule {
            Rule::Skip => Ok(()),
            Rule::Assign { target, value } => {
                let (name, args) = match target {
                    Term::Var(n) => (n, &[][..]),
                    Term::App(n, a) => (n, &a[..]),
                    Term::Const(v) => {
                        return Err(err(ParseErrorKind::Syntax, format!("cannot assign to literal {v}")))
                    }
                };
                let sym = self.vocab().symbol(name).ok_or_else(|| {
                    err(ParseErrorKind::UnknownSymbol, format!("unknown symbol `{name}`"))
                })?;
                if sym.kind != SymbolKind::Dynamic {
                    return Err(err(
                        ParseErrorKind::Sort,
                        format!("cannot assign to {} symbol `{name}`", sym.kind.keyword()),
                    ));
                }
                if args.iter().any(|a| self.program.mentions_oracle(a)) {
                    return Err(err(
                        ParseErrorKind::Sort,
                        format!("location arguments of `{name}` must not query an oracle"),
                    ));
                }
                let result = self.term(target)?.expect("dynamic symbols have a sort");
                self.expect(value, &result, &format!("value assigned to `{name}`"))
            }
            Rule::Cond {
                guard,
                then,
                otherwise,
            } => {
                self.expect(guard, &Sort::Boolean, "guard")?;
                self.rule(then)?;
                if let Some(o) = otherwise {
                    self.rule(o)?;
                }
                Ok(())
            }
            Rule::Par(rules) => rules.iter().try_for_each(|r| self.rule(r)),
        }
    }
}

/// Checks one rule against a vocabulary, without whole-program restrictions.
pub(crate) fn check_fragment(vocab: &Arc<Vocabulary>, rule: &Rule) -> Result<(), ParseError> {
    let scratch = Program {
        vocab: vocab.clone(),
        body: Body::Iterate { step: Rule::Skip },
        oracle_statics: BTreeSet::new(),
    };
    Checker { program: &scratch }.rule(rule)
}

pub(crate) fn check_term_fragment(
    vocab: &Arc<Vocabulary>,
    term: &Term,
    sort: &Sort,
    what: &str,
) -> Result<(), ParseError> {
    let scratch = Program {
        vocab: vocab.clone(),
        body: Body::Iterate { step: Rule::Skip },
        oracle_statics: BTreeSet::new(),
    };
    Checker { program: &scratch }.expect(term, sort, what)
}
