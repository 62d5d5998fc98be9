// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use super::lexer::{tokenize, Tok, Token};
use super::{check_fragment, check_term_fragment, op, Body, Program, Rule, Term};
use crate::error::{ParseError, ParseErrorKind};
use crate::geometry::{Circle, Line, Point};
use crate::state::{Location, State};
use crate::value::{Sort, Value};
use crate::vocab::{Decl, Symbol, SymbolKind, Vocabulary};

const KEYWORDS: &[&str] = &[
    "vocab", "enum", "var", "static", "oracle", "do", "until", "iterate", "if", "then", "else",
    "par", "skip", "and", "or", "not", "mod", "div", "true", "false", "undef",
];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    vocab: Option<Arc<Vocabulary>>,
}

type PResult<T> = Result<T, ParseError>;

fn at(tok: &Token, e: ParseError) -> ParseError {
    if e.line == 0 {
        ParseError::new(e.kind, tok.line, tok.col, e.message)
    } else {
        e
    }
}

impl Parser {
    fn new(text: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            vocab: None,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::new(ParseErrorKind::Syntax, t.line, t.col, msg)
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Float(x) => format!("`{x}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(&self.peek().tok, Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.next();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{p}`, found {}", Self::describe(&self.peek().tok))))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", Self::describe(&self.peek().tok))))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match &self.peek().tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {}", Self::describe(other)))),
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        match &self.peek().tok {
            Tok::Eof => Ok(()),
            other => Err(self.error(format!("unexpected {} after end", Self::describe(other)))),
        }
    }

    fn vocab(&self) -> &Arc<Vocabulary> {
        self.vocab.as_ref().expect("vocabulary parsed first")
    }

    // ---- declarations ----

    fn sort(&mut self, vocab: &Vocabulary) -> PResult<Sort> {
        let tok = self.peek().clone();
        let name = self.ident()?;
        vocab.sort(&name).ok_or_else(|| {
            ParseError::new(ParseErrorKind::UnknownSymbol, tok.line, tok.col, format!("unknown sort `{name}`"))
        })
    }

    fn vocab_block(&mut self) -> PResult<Vocabulary> {
        self.expect_kw("vocab")?;
        self.expect_punct("{")?;
        let mut vocab = Vocabulary::new(Vec::new())?;
        while !self.eat_punct("}") {
            let tok = self.peek().clone();
            let decl = if self.eat_kw("enum") {
                let name = self.ident()?;
                self.expect_punct("=")?;
                self.expect_punct("{")?;
                let mut members = vec![self.ident()?];
                while self.eat_punct(",") {
                    members.push(self.ident()?);
                }
                self.expect_punct("}")?;
                Decl::Enum { name, members }
            } else {
                let kind = if self.eat_kw("var") {
                    SymbolKind::Dynamic
                } else if self.eat_kw("static") {
                    SymbolKind::Static
                } else if self.eat_kw("oracle") {
                    SymbolKind::Oracle
                } else {
                    return Err(self.error(format!(
                        "expected declaration, found {}",
                        Self::describe(&self.peek().tok)
                    )));
                };
                let name = self.ident()?;
                let mut args = Vec::new();
                if self.eat_punct("(") {
                    args.push(self.sort(&vocab)?);
                    while self.eat_punct(",") {
                        args.push(self.sort(&vocab)?);
                    }
                    self.expect_punct(")")?;
                }
                self.expect_punct(":")?;
                let result = self.sort(&vocab)?;
                Decl::Symbol(Symbol::new(name, args, result, kind))
            };
            self.expect_punct(";")?;
            vocab.push(decl).map_err(|e| at(&tok, e))?;
        }
        Ok(vocab)
    }

    // ---- rules ----

    fn rule(&mut self) -> PResult<Rule> {
        let tok = self.peek().clone();
        if self.eat_kw("skip") {
            return Ok(Rule::Skip);
        }
        if self.eat_kw("if") {
            let guard = self.term()?;
            check_term_fragment(self.vocab(), &guard, &Sort::Boolean, "guard").map_err(|e| at(&tok, e))?;
            self.expect_kw("then")?;
            let then = self.rule()?;
            let otherwise = if self.eat_kw("else") {
                Some(self.rule()?)
            } else {
                None
            };
            return Ok(Rule::cond(guard, then, otherwise));
        }
        if self.eat_kw("par") {
            self.expect_punct("{")?;
            let mut rules = Vec::new();
            while !self.eat_punct("}") {
                rules.push(self.rule()?);
                if !self.eat_punct(";") {
                    self.expect_punct("}")?;
                    break;
                }
            }
            return Ok(Rule::Par(rules));
        }
        if self.eat_punct("{") {
            let r = self.rule()?;
            self.expect_punct("}")?;
            return Ok(r);
        }
        if let Tok::Ident(s) = &tok.tok {
            if KEYWORDS.contains(&s.as_str()) {
                return Err(self.error(format!("`{s}` cannot start a rule")));
            }
            let target = self.atom()?;
            if !self.eat_punct(":=") {
                return Err(self.error(format!(
                    "expected `:=`, found {}",
                    Self::describe(&self.peek().tok)
                )));
            }
            let value = self.term()?;
            let rule = Rule::assign(target, value);
            check_fragment(self.vocab(), &rule).map_err(|e| at(&tok, e))?;
            return Ok(rule);
        }
        Err(self.error(format!("expected rule, found {}", Self::describe(&tok.tok))))
    }

    // ---- terms ----

    fn term(&mut self) -> PResult<Term> {
        let mut lhs = self.and_term()?;
        while self.eat_kw("or") {
            lhs = Term::binary(op::OR, lhs, self.and_term()?);
        }
        Ok(lhs)
    }

    fn and_term(&mut self) -> PResult<Term> {
        let mut lhs = self.not_term()?;
        while self.eat_kw("and") {
            lhs = Term::binary(op::AND, lhs, self.not_term()?);
        }
        Ok(lhs)
    }

    fn not_term(&mut self) -> PResult<Term> {
        if self.eat_kw("not") {
            return Ok(Term::app(op::NOT, vec![self.not_term()?]));
        }
        self.cmp_term()
    }

    fn cmp_term(&mut self) -> PResult<Term> {
        let lhs = self.add_term()?;
        for o in [op::EQ, op::NE, op::LE, op::GE, op::LT, op::GT] {
            if self.eat_punct(o) {
                let rhs = self.add_term()?;
                return Ok(Term::binary(o, lhs, rhs));
            }
        }
        Ok(lhs)
    }

    fn add_term(&mut self) -> PResult<Term> {
        let mut lhs = self.mul_term()?;
        loop {
            if self.eat_punct("+") {
                lhs = Term::binary(op::ADD, lhs, self.mul_term()?);
            } else if self.eat_punct("-") {
                lhs = Term::binary(op::SUB, lhs, self.mul_term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn mul_term(&mut self) -> PResult<Term> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_punct("*") {
                lhs = Term::binary(op::MUL, lhs, self.unary()?);
            } else if self.eat_kw("mod") {
                lhs = Term::binary(op::MOD, lhs, self.unary()?);
            } else if self.eat_kw("div") {
                lhs = Term::binary(op::DIV, lhs, self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.is_punct("-") {
            if let Tok::Int(n) = *self.peek_at(1) {
                let tok = self.next();
                self.next();
                return negate(n)
                    .map(Term::int)
                    .ok_or_else(|| ParseError::new(ParseErrorKind::Syntax, tok.line, tok.col, "integer out of range"));
            }
            self.next();
            return Ok(Term::app(op::NEG, vec![self.unary()?]));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Term> {
        let tok = self.next();
        match &tok.tok {
            Tok::Int(n) => i64::try_from(*n).map(Term::int).map_err(|_| {
                ParseError::new(ParseErrorKind::Syntax, tok.line, tok.col, "integer out of range")
            }),
            Tok::Punct("(") => {
                let t = self.term()?;
                self.expect_punct(")")?;
                Ok(t)
            }
            Tok::Ident(s) if s == "true" => Ok(Term::Const(Value::Bool(true))),
            Tok::Ident(s) if s == "false" => Ok(Term::Const(Value::Bool(false))),
            Tok::Ident(s) if s == "undef" => Ok(Term::Const(Value::Undef)),
            Tok::Ident(s) if s == op::POWMOD || !KEYWORDS.contains(&s.as_str()) => {
                let name = s.clone();
                if self.eat_punct("(") {
                    let mut args = vec![self.term()?];
                    while self.eat_punct(",") {
                        args.push(self.term()?);
                    }
                    self.expect_punct(")")?;
                    return Ok(Term::App(name, args));
                }
                let vocab = self.vocab();
                if vocab.member_sort(&name).is_some() {
                    return Ok(Term::Const(Value::Member(name)));
                }
                if vocab.symbol(&name).is_none() {
                    return Err(ParseError::new(
                        ParseErrorKind::UnknownSymbol,
                        tok.line,
                        tok.col,
                        format!("unknown symbol `{name}`"),
                    ));
                }
                Ok(Term::Var(name))
            }
            other => Err(ParseError::new(
                ParseErrorKind::Syntax,
                tok.line,
                tok.col,
                format!("expected term, found {}", Self::describe(other)),
            )),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let vocab = self.vocab_block()?;
        self.vocab = Some(Arc::new(vocab));
        let start = self.peek().clone();
        let mut halt_tok = start.clone();
        let body = if self.eat_kw("do") {
            self.expect_kw("until")?;
            halt_tok = self.peek().clone();
            let halt = self.term()?;
            check_term_fragment(self.vocab(), &halt, &Sort::Boolean, "halting condition")
                .map_err(|e| at(&halt_tok, e))?;
            self.expect_punct("{")?;
            let step = self.rule()?;
            self.expect_punct("}")?;
            Body::DoUntil { halt, step }
        } else if self.eat_kw("iterate") {
            self.expect_punct("{")?;
            let step = self.rule()?;
            self.expect_punct("}")?;
            Body::Iterate { step }
        } else {
            return Err(self.error(format!(
                "expected `do until` or `iterate`, found {}",
                Self::describe(&start.tok)
            )));
        };
        self.expect_eof()?;
        let vocab = Arc::try_unwrap(self.vocab.take().unwrap()).unwrap_or_else(|a| (*a).clone());
        Program::new(vocab, body).map_err(|e| match e.kind {
            ParseErrorKind::InteractiveHalt => at(&halt_tok, e),
            _ => at(&start, e),
        })
    }

    // ---- literals ----

    fn number(&mut self) -> PResult<f64> {
        let neg = self.eat_punct("-");
        let x = match self.next().tok {
            Tok::Int(n) => n as f64,
            Tok::Float(x) => x,
            other => {
                self.pos -= 1;
                return Err(self.error(format!("expected number, found {}", Self::describe(&other))));
            }
        };
        Ok(if neg { -x } else { x })
    }

    fn point_lit(&mut self) -> PResult<Point> {
        self.expect_kw("point")?;
        self.expect_punct("(")?;
        let x = self.number()?;
        self.expect_punct(",")?;
        let y = self.number()?;
        self.expect_punct(")")?;
        Ok(Point::new(x, y))
    }

    fn literal(&mut self) -> PResult<Value> {
        let tok = self.peek().clone();
        let domain = |e: crate::error::RuntimeError| {
            ParseError::new(ParseErrorKind::Sort, tok.line, tok.col, e.message)
        };
        match &tok.tok {
            Tok::Punct("-") => {
                self.next();
                match self.next().tok {
                    Tok::Int(n) => negate(n).map(Value::Int).ok_or_else(|| {
                        ParseError::new(ParseErrorKind::Syntax, tok.line, tok.col, "integer out of range")
                    }),
                    _ => Err(ParseError::new(ParseErrorKind::Syntax, tok.line, tok.col, "expected integer after `-`")),
                }
            }
            Tok::Int(n) => {
                let n = *n;
                self.next();
                i64::try_from(n).map(Value::Int).map_err(|_| {
                    ParseError::new(ParseErrorKind::Syntax, tok.line, tok.col, "integer out of range")
                })
            }
            Tok::Ident(s) => match s.as_str() {
                "true" => {
                    self.next();
                    Ok(Value::Bool(true))
                }
                "false" => {
                    self.next();
                    Ok(Value::Bool(false))
                }
                "undef" => {
                    self.next();
                    Ok(Value::Undef)
                }
                "point" if matches!(self.peek_at(1), Tok::Punct("(")) => Ok(Value::Point(self.point_lit()?)),
                "circle" if matches!(self.peek_at(1), Tok::Punct("(")) => {
                    self.next();
                    self.expect_punct("(")?;
                    let c = self.point_lit()?;
                    self.expect_punct(",")?;
                    let t = self.point_lit()?;
                    self.expect_punct(")")?;
                    Ok(Value::Circle(Circle::new(c, t).map_err(domain)?))
                }
                "line" if matches!(self.peek_at(1), Tok::Punct("(")) => {
                    self.next();
                    self.expect_punct("(")?;
                    let a = self.point_lit()?;
                    self.expect_punct(",")?;
                    let b = self.point_lit()?;
                    self.expect_punct(")")?;
                    Ok(Value::Line(Line::new(a, b).map_err(domain)?))
                }
                _ => Ok(Value::Member(self.ident()?)),
            },
            other => Err(self.error(format!("expected literal, found {}", Self::describe(other)))),
        }
    }

    fn location(&mut self) -> PResult<Location> {
        let symbol = self.ident()?;
        let mut args = Vec::new();
        if self.eat_punct("(") {
            args.push(self.literal()?);
            while self.eat_punct(",") {
                args.push(self.literal()?);
            }
            self.expect_punct(")")?;
        }
        Ok(Location::new(symbol, args))
    }
}

fn negate(n: u64) -> Option<i64> {
    0i64.checked_sub_unsigned(n)
}

/// Parses a complete `.basm` program.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    Parser::new(text)?.program()
}

/// Parses a term over the program's vocabulary and checks its sorts.
pub fn parse_term(program: &Program, text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    p.vocab = Some(program.vocab().clone());
    let t = p.term()?;
    p.expect_eof()?;
    program.term_sort(&t)?;
    Ok(t)
}

/// Parses one literal: integer, `true`/`false`/`undef`, `point(x, y)`,
/// `circle(point, point)`, `line(point, point)`, or an enum member name.
/// Member names are not checked against any vocabulary.
pub fn parse_literal(text: &str) -> Result<Value, ParseError> {
    let mut p = Parser::new(text)?;
    let v = p.literal()?;
    p.expect_eof()?;
    Ok(v)
}

/// Parses `symbol` or `symbol(lit, ...)`.
pub fn parse_location(text: &str) -> Result<Location, ParseError> {
    let mut p = Parser::new(text)?;
    let l = p.location()?;
    p.expect_eof()?;
    Ok(l)
}

/// Parses a state file: one `location := literal` binding per line, `#`
/// comments, blank lines ignored. Unlisted locations are `undef`.
pub fn parse_state(vocab: Arc<Vocabulary>, text: &str) -> Result<State, ParseError> {
    let mut bindings = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let fix = |e: ParseError| {
            ParseError::new(e.kind, lineno + 1, if e.line == 0 { 0 } else { e.col }, e.message)
        };
        let mut p = Parser::new(line).map_err(fix)?;
        if matches!(p.peek().tok, Tok::Eof) {
            continue;
        }
        let loc = p.location().map_err(fix)?;
        p.expect_punct(":=").map_err(fix)?;
        let value = p.literal().map_err(fix)?;
        p.expect_eof().map_err(fix)?;
        let sym = vocab.symbol(&loc.symbol).ok_or_else(|| {
            ParseError::new(ParseErrorKind::UnknownSymbol, lineno + 1, 1, format!("unknown symbol `{}`", loc.symbol))
        })?;
        if sym.kind != SymbolKind::Dynamic {
            return Err(ParseError::new(
                ParseErrorKind::Sort,
                lineno + 1,
                1,
                format!("`{}` is {}, only dynamic symbols have state", sym.name, sym.kind.keyword()),
            ));
        }
        if bindings.iter().any(|(l, _)| l == &loc) {
            return Err(ParseError::new(
                ParseErrorKind::Duplicate,
                lineno + 1,
                1,
                format!("{loc} bound twice"),
            ));
        }
        let single: crate::state::UpdateSet = [(loc.clone(), value.clone())].into_iter().collect();
        State::empty(vocab.clone())
            .apply_updates(&single)
            .map_err(|e| ParseError::new(ParseErrorKind::Sort, lineno + 1, 1, e.message))?;
        bindings.push((loc, value));
    }
    State::from_bindings(vocab, bindings)
        .map_err(|e| ParseError::unpositioned(ParseErrorKind::Sort, e.message))
}
