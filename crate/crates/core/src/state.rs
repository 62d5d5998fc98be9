// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! States as finite-support interpretations of dynamic symbols, update sets,
//! and the two ways a state changes: firing an update set and renaming
//! along an isomorphism.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{ErrorKind, RuntimeError};
use crate::value::{Sort, Value};
use crate::vocab::{SymbolKind, Vocabulary};

/// A dynamic symbol applied to a tuple of values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub symbol: String,
    pub args: Vec<Value>,
}

impl Location {
    pub fn new(symbol: impl Into<String>, args: Vec<Value>) -> Self {
        Location {
            symbol: symbol.into(),
            args,
        }
    }

    pub fn var(symbol: impl Into<String>) -> Self {
        Location::new(symbol, Vec::new())
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)?;
        if !self.args.is_empty() {
            let args: Vec<_> = self.args.iter().map(Value::to_string).collect();
            write!(f, "({})", args.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Update {
    pub location: Location,
    pub value: Value,
}

/// The updates produced by one step.
///
/// Stored as a set, so it may hold an inconsistent pair; [`UpdateSet::check`]
/// detects that and every state transition calls it first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct UpdateSet {
    updates: BTreeSet<Update>,
}

impl UpdateSet {
    pub fn new() -> Self {
        UpdateSet::default()
    }

    pub fn insert(&mut self, location: Location, value: Value) {
        self.updates.insert(Update { location, value });
    }

    /// Adds all of `other`, failing on the first clash introduced.
    pub fn union(&mut self, other: UpdateSet) -> Result<(), RuntimeError> {
        self.updates.extend(other.updates);
        self.check()
    }

    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Update> {
        self.updates.iter()
    }

    pub fn get(&self, location: &Location) -> Option<&Value> {
        self.updates
            .iter()
            .find(|u| &u.location == location)
            .map(|u| &u.value)
    }

    /// Fails with `clash` if two updates share a location but not a value.
    pub fn check(&self) -> Result<(), RuntimeError> {
        let mut prev: Option<&Update> = None;
        for u in &self.updates {
            if let Some(p) = prev {
                if p.location == u.location && !p.value.semantic_eq(&u.value) {
                    return Err(RuntimeError::new(
                        ErrorKind::Clash,
                        format!(
                            "clash at {}: {} vs {}",
                            u.location, p.value, u.value
                        ),
                    ));
                }
            }
            prev = Some(u);
        }
        Ok(())
    }

    pub fn is_consistent(&self) -> bool {
        self.check().is_ok()
    }
}

impl FromIterator<(Location, Value)> for UpdateSet {
    fn from_iter<I: IntoIterator<Item = (Location, Value)>>(iter: I) -> Self {
        let mut set = UpdateSet::new();
        for (l, v) in iter {
            set.insert(l, v);
        }
        set
    }
}

/// Finite-support interpretation: locations absent from the map read `undef`.
pub type Interp = BTreeMap<Location, Value>;

#[derive(Clone, Debug, PartialEq)]
pub struct State {
    vocab: Arc<Vocabulary>,
    interp: Interp,
}

impl State {
    /// The state in which every location is `undef`.
    pub fn empty(vocab: Arc<Vocabulary>) -> Self {
        State {
            vocab,
            interp: Interp::new(),
        }
    }

    /// Builds a state from bindings, checking each against the vocabulary.
    pub fn from_bindings(
        vocab: Arc<Vocabulary>,
        bindings: impl IntoIterator<Item = (Location, Value)>,
    ) -> Result<Self, RuntimeError> {
        let updates: UpdateSet = bindings.into_iter().collect();
        State::empty(vocab).apply_updates(&updates)
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn interp(&self) -> &Interp {
        &self.interp
    }

    pub fn into_interp(self) -> Interp {
        self.interp
    }

    pub fn get(&self, location: &Location) -> Value {
        self.interp.get(location).cloned().unwrap_or(Value::Undef)
    }

    pub fn get_var(&self, name: &str) -> Value {
        self.get(&Location::var(name))
    }

    /// Universe of an enum sort; builtin sorts are unbounded and yield `None`.
    pub fn universe(&self, sort: &Sort) -> Option<&[String]> {
        match sort {
            Sort::Enum(name) => self.vocab.members(name),
            _ => None,
        }
    }

    fn check_update(&self, u: &Update) -> Result<(), RuntimeError> {
        let sort_err = |msg: String| RuntimeError::new(ErrorKind::Sort, msg);
        let sym = self
            .vocab
            .symbol(&u.location.symbol)
            .ok_or_else(|| sort_err(format!("unknown symbol `{}`", u.location.symbol)))?;
        if sym.kind != SymbolKind::Dynamic {
            return Err(sort_err(format!("`{}` is not dynamic", sym.name)));
        }
        if sym.arity() != u.location.args.len() {
            return Err(sort_err(format!(
                "`{}` takes {} arguments, location has {}",
                sym.name,
                sym.arity(),
                u.location.args.len()
            )));
        }
        for (arg, sort) in u.location.args.iter().zip(&sym.arg_sorts) {
            if arg.is_undef() || !self.vocab.has_sort(arg, sort) {
                return Err(sort_err(format!(
                    "argument {arg} of {} is not a {sort}",
                    u.location
                )));
            }
        }
        if !self.vocab.has_sort(&u.value, &sym.result_sort) {
            return Err(sort_err(format!(
                "value {} for {} is not a {}",
                u.value, u.location, sym.result_sort
            )));
        }
        Ok(())
    }

    /// Fires a consistent, well-sorted update set. Assigning `undef` drops
    /// the location from the support.
    pub fn apply_updates(&self, updates: &UpdateSet) -> Result<State, RuntimeError> {
        updates.check()?;
        let mut interp = self.interp.clone();
        for u in updates.iter() {
            self.check_update(u)?;
            if u.value.is_undef() {
                interp.remove(&u.location);
            } else {
                interp.insert(u.location.clone(), u.value.clone());
            }
        }
        Ok(State {
            vocab: self.vocab.clone(),
            interp,
        })
    }

    /// True iff firing `updates` would leave every location's value unchanged.
    pub fn is_fixed_by(&self, updates: &UpdateSet) -> bool {
        updates
            .iter()
            .all(|u| self.get(&u.location).semantic_eq(&u.value))
    }

    /// Renames every enum member through the bijection.
    pub fn transport(&self, bijection: &Bijection) -> Result<State, RuntimeError> {
        bijection.validate(&self.vocab)?;
        let interp = self
            .interp
            .iter()
            .map(|(l, v)| (bijection.location(l), bijection.value(v)))
            .collect();
        Ok(State {
            vocab: self.vocab.clone(),
            interp,
        })
    }
}

/// Per-enum-sort renaming of members. Sorts not mentioned map identically.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bijection {
    maps: BTreeMap<String, BTreeMap<String, String>>,
}

impl Bijection {
    pub fn identity() -> Self {
        Bijection::default()
    }

    /// Adds the pairs for one sort. Validation happens against a vocabulary.
    pub fn with_sort<I, A, B>(mut self, sort: impl Into<String>, pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        self.maps.insert(
            sort.into(),
            pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
        );
        self
    }

    pub fn is_identity(&self) -> bool {
        self.maps.values().all(|m| m.iter().all(|(a, b)| a == b))
    }

    /// Checks that every listed sort is an enum and every map is a total
    /// bijection on that enum's universe.
    pub fn validate(&self, vocab: &Vocabulary) -> Result<(), RuntimeError> {
        for (sort, map) in &self.maps {
            if Sort::builtin(sort).is_some() {
                return Err(RuntimeError::new(
                    ErrorKind::UnsupportedIso,
                    format!("cannot move values of builtin sort {sort}"),
                ));
            }
            let universe = vocab.members(sort).ok_or_else(|| {
                RuntimeError::new(ErrorKind::Bijection, format!("unknown enum sort {sort}"))
            })?;
            let domain: BTreeSet<&String> = map.keys().collect();
            let image: BTreeSet<&String> = map.values().collect();
            let universe: BTreeSet<&String> = universe.iter().collect();
            if domain != universe || image != universe {
                return Err(RuntimeError::new(
                    ErrorKind::Bijection,
                    format!("map on {sort} is not a total bijection of its universe"),
                ));
            }
        }
        Ok(())
    }

    pub fn value(&self, v: &Value) -> Value {
        match v {
            Value::Member(m) => self
                .maps
                .values()
                .find_map(|map| map.get(m))
                .map(|n| Value::Member(n.clone()))
                .unwrap_or_else(|| v.clone()),
            _ => v.clone(),
        }
    }

    pub fn location(&self, l: &Location) -> Location {
        Location::new(l.symbol.clone(), l.args.iter().map(|a| self.value(a)).collect())
    }

    pub fn update_set(&self, u: &UpdateSet) -> UpdateSet {
        u.iter()
            .map(|u| (self.location(&u.location), self.value(&u.value)))
            .collect()
    }

    pub fn inverse(&self) -> Bijection {
        Bijection {
            maps: self
                .maps
                .iter()
                .map(|(s, m)| {
                    (
                        s.clone(),
                        m.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
                    )
                })
                .collect(),
        }
    }

    /// Every bijection of the vocabulary's enum universes (product of the
    /// per-sort permutation groups), identity first.
    pub fn all(vocab: &Vocabulary) -> Vec<Bijection> {
        let mut out = vec![Bijection::identity()];
        for (sort, members) in vocab.enums() {
            let perms = permutations(members);
            out = out
                .into_iter()
                .flat_map(|b| {
                    perms.iter().map(move |p| {
                        b.clone()
                            .with_sort(sort, members.iter().cloned().zip(p.iter().cloned()))
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for Bijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .maps
            .values()
            .flat_map(|m| m.iter().map(|(a, b)| format!("{a}->{b}")))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn permutations(items: &[String]) -> Vec<Vec<String>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}
