// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! Vocabularies: declared enum sorts and typed function symbols.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{ParseError, ParseErrorKind};
use crate::value::{Sort, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    /// Interpreted by the background library; never stored in a state.
    Static,
    /// Program variable or updatable function; its locations make up the state.
    Dynamic,
    /// Answered by the environment through an oracle session.
    Oracle,
}

impl SymbolKind {
    pub fn keyword(self) -> &'static str {
        match self {
            SymbolKind::Static => "static",
            SymbolKind::Dynamic => "var",
            SymbolKind::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arg_sorts: Vec<Sort>,
    pub result_sort: Sort,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn new(
        name: impl Into<String>,
        arg_sorts: Vec<Sort>,
        result_sort: Sort,
        kind: SymbolKind,
    ) -> Self {
        Symbol {
            name: name.into(),
            arg_sorts,
            result_sort,
            kind,
        }
    }

    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.keyword(), self.name)?;
        if !self.arg_sorts.is_empty() {
            let args: Vec<_> = self.arg_sorts.iter().map(Sort::name).collect();
            write!(f, "({})", args.join(", "))?;
        }
        write!(f, ": {}", self.result_sort)
    }
}

/// One declaration in a `vocab { ... }` block, in source order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Enum { name: String, members: Vec<String> },
    Symbol(Symbol),
}

/// Signatures of the geometric library behind `static` declarations.
pub fn library_signature(name: &str) -> Option<(Vec<Sort>, Sort)> {
    use Sort::*;
    Some(match name {
        "M" => (vec![Point, Point], Point),
        "Cl" => (vec![Point, Point], Circle),
        "L" => (vec![Point, Point], Line),
        "Inc" => (vec![Point, Circle], Boolean),
        _ => return None,
    })
}

/// Oracles with a builtin answering rule must be declared with this signature.
pub fn builtin_oracle_signature(name: &str) -> Option<(Vec<Sort>, Sort)> {
    use Sort::*;
    Some(match name {
        "I" => (vec![Circle, Circle], Point),
        "Random" => (vec![Integer, Integer], Integer),
        _ => return None,
    })
}

/// Names the language predeclares; users cannot redeclare them.
pub const PREDECLARED: &[&str] = &[
    "powmod", "mod", "div", "and", "or", "not", "true", "false", "undef",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    decls: Vec<Decl>,
    symbols: BTreeMap<String, Symbol>,
    enums: BTreeMap<String, Vec<String>>,
    member_sort: BTreeMap<String, String>,
}

impl Vocabulary {
    pub fn new(decls: Vec<Decl>) -> Result<Self, ParseError> {
        let mut vocab = Vocabulary {
            decls: Vec::new(),
            symbols: BTreeMap::new(),
            enums: BTreeMap::new(),
            member_sort: BTreeMap::new(),
        };
        for decl in decls {
            vocab.push(decl)?;
        }
        Ok(vocab)
    }

    /// Adds one declaration, validating it against those already present.
    pub fn push(&mut self, decl: Decl) -> Result<(), ParseError> {
        let dup = |what: &str, name: &str| {
            ParseError::unpositioned(ParseErrorKind::Duplicate, format!("{what} `{name}` declared twice"))
        };
        match &decl {
            Decl::Enum { name, members } => {
                if Sort::builtin(name).is_some() || self.enums.contains_key(name) {
                    return Err(dup("sort", name));
                }
                if members.is_empty() {
                    return Err(ParseError::unpositioned(
                        ParseErrorKind::Sort,
                        format!("enum `{name}` has no members"),
                    ));
                }
                let mut seen = BTreeSet::new();
                for m in members {
                    if !seen.insert(m) || self.member_sort.contains_key(m) {
                        return Err(dup("enum member", m));
                    }
                    if self.symbols.contains_key(m) || PREDECLARED.contains(&m.as_str()) {
                        return Err(dup("name", m));
                    }
                }
                for m in members {
                    self.member_sort.insert(m.clone(), name.clone());
                }
                self.enums.insert(name.clone(), members.clone());
            }
            Decl::Symbol(sym) => {
                if self.symbols.contains_key(&sym.name)
                    || self.member_sort.contains_key(&sym.name)
                    || PREDECLARED.contains(&sym.name.as_str())
                {
                    return Err(dup("symbol", &sym.name));
                }
                for sort in sym.arg_sorts.iter().chain([&sym.result_sort]) {
                    if let Sort::Enum(e) = sort {
                        if !self.enums.contains_key(e) {
                            return Err(ParseError::unpositioned(
                                ParseErrorKind::UnknownSymbol,
                                format!("unknown sort `{e}`"),
                            ));
                        }
                    }
                }
                let expected = match sym.kind {
                    SymbolKind::Static => match library_signature(&sym.name) {
                        Some(sig) => Some(sig),
                        None => {
                            return Err(ParseError::unpositioned(
                                ParseErrorKind::UnknownSymbol,
                                format!("no library interpretation for static `{}`", sym.name),
                            ))
                        }
                    },
                    SymbolKind::Oracle => builtin_oracle_signature(&sym.name),
                    SymbolKind::Dynamic => None,
                };
                if let Some((args, result)) = expected {
                    if args != sym.arg_sorts || result != sym.result_sort {
                        return Err(ParseError::unpositioned(
                            ParseErrorKind::Sort,
                            format!("`{}` must be declared as ({}): {}", sym.name, sort_list(&args), result),
                        ));
                    }
                }
                self.symbols.insert(sym.name.clone(), sym.clone());
            }
        }
        self.decls.push(decl);
        Ok(())
    }

    /// Resolves a sort name against builtins and declared enums.
    pub fn sort(&self, name: &str) -> Option<Sort> {
        Sort::builtin(name).or_else(|| {
            self.enums
                .contains_key(name)
                .then(|| Sort::Enum(name.to_string()))
        })
    }

    pub fn decls(&self) -> &[Decl] {
        &self.decls
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }

    pub fn members(&self, enum_name: &str) -> Option<&[String]> {
        self.enums.get(enum_name).map(Vec::as_slice)
    }

    pub fn enums(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.enums.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Sort of an enum member name.
    pub fn member_sort(&self, member: &str) -> Option<Sort> {
        self.member_sort.get(member).map(|s| Sort::Enum(s.clone()))
    }

    /// Whether `value` inhabits `sort`. `undef` inhabits every sort.
    pub fn has_sort(&self, value: &Value, sort: &Sort) -> bool {
        match (value, sort) {
            (Value::Undef, _) => true,
            (Value::Int(_), Sort::Integer)
            | (Value::Bool(_), Sort::Boolean)
            | (Value::Point(_), Sort::Point)
            | (Value::Circle(_), Sort::Circle)
            | (Value::Line(_), Sort::Line) => true,
            (Value::Member(m), Sort::Enum(e)) => self.member_sort.get(m) == Some(e),
            _ => false,
        }
    }

    /// Hex SHA-256 of the canonical declaration text.
    pub fn id(&self) -> String {
        crate::digest_hex(crate::syntax::pretty_vocab(self).as_bytes())
    }
}

pub(crate) fn sort_list(sorts: &[Sort]) -> String {
    sorts.iter().map(Sort::name).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enum_decl(name: &str, members: &[&str]) -> Decl {
        Decl::Enum {
            name: name.into(),
            members: members.iter().map(|m| m.to_string()).collect(),
        }
    }

    #[test]
    fn enum_members_must_be_nonempty_and_unique() {
        assert!(Vocabulary::new(vec![enum_decl("E", &[])]).is_err());
        assert!(Vocabulary::new(vec![enum_decl("E", &["u", "u"])]).is_err());
        assert!(Vocabulary::new(vec![enum_decl("E", &["u"]), enum_decl("F", &["u"])]).is_err());
        let v = Vocabulary::new(vec![enum_decl("E", &["u", "v"])]).unwrap();
        assert_eq!(v.member_sort("v"), Some(Sort::Enum("E".into())));
    }

    #[test]
    fn static_symbols_need_a_library_entry() {
        let ok = Symbol::new("M", vec![Sort::Point, Sort::Point], Sort::Point, SymbolKind::Static);
        assert!(Vocabulary::new(vec![Decl::Symbol(ok)]).is_ok());
        let bad = Symbol::new("M", vec![Sort::Point], Sort::Point, SymbolKind::Static);
        assert_eq!(
            Vocabulary::new(vec![Decl::Symbol(bad)]).unwrap_err().kind,
            ParseErrorKind::Sort
        );
        let unknown = Symbol::new("Foo", vec![], Sort::Integer, SymbolKind::Static);
        assert_eq!(
            Vocabulary::new(vec![Decl::Symbol(unknown)]).unwrap_err().kind,
            ParseErrorKind::UnknownSymbol
        );
    }

    #[test]
    fn names_are_unique() {
        let a = Symbol::new("a", vec![], Sort::Integer, SymbolKind::Dynamic);
        assert!(Vocabulary::new(vec![Decl::Symbol(a.clone()), Decl::Symbol(a)]).is_err());
        let p = Symbol::new("powmod", vec![], Sort::Integer, SymbolKind::Dynamic);
        assert!(Vocabulary::new(vec![Decl::Symbol(p)]).is_err());
    }
}
