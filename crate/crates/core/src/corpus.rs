// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! The bundled example programs, their initial states, scripts, and golden
//! traces. Files live under `corpus/<name>/` at the repository root and are
//! embedded at build time.

use num_rational::Ratio;

use crate::error::{Error, ErrorKind, ParseError, RuntimeError};
use crate::geometry::{self, Circle, Point};
use crate::oracles::{parse_script, OraclePolicy, Script, ScriptEntry, ScriptMode, SplitMix64, Query};
use crate::semantics::{powmod, run, DEFAULT_MAX_STEPS};
use crate::state::{Location, State, UpdateSet};
use crate::syntax::{parse_state, Program};
use crate::trace::Trace;
use crate::value::Value;

#[derive(Clone, Copy, Debug)]
pub struct CorpusFile {
    pub name: &'static str,
    pub text: &'static str,
}

/// A golden trace and the run that produces it.
#[derive(Clone, Copy, Debug)]
pub struct Golden {
    pub file: CorpusFile,
    pub init: &'static str,
    /// Policy in [`PolicySpec::parse`] syntax.
    pub policy: &'static str,
}

#[derive(Clone, Copy, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub program: CorpusFile,
    pub inits: &'static [CorpusFile],
    pub scripts: &'static [CorpusFile],
    pub goldens: &'static [Golden],
    pub default_init: &'static str,
    pub default_policy: &'static str,
}

macro_rules! file {
    ($entry:literal, $path:literal) => {
        CorpusFile {
            name: $path,
            text: include_str!(concat!("../../../corpus/", $entry, "/", $path)),
        }
    };
}

macro_rules! golden {
    ($entry:literal, $path:literal, $init:literal, $policy:literal) => {
        Golden {
            file: file!($entry, $path),
            init: $init,
            policy: $policy,
        }
    };
}

pub const ENTRIES: &[CorpusEntry] = &[
    CorpusEntry {
        name: "euclid",
        program: file!("euclid", "program.basm"),
        inits: &[file!("euclid", "init/a12b8.state"), file!("euclid", "init/a1071b462.state")],
        scripts: &[],
        goldens: &[golden!("euclid", "golden/a12b8.jsonl", "init/a12b8.state", "builtin")],
        default_init: "init/a12b8.state",
        default_policy: "builtin",
    },
    CorpusEntry {
        name: "euclid-implicit",
        program: file!("euclid-implicit", "program.basm"),
        inits: &[file!("euclid-implicit", "init/a12b8.state")],
        scripts: &[],
        goldens: &[golden!("euclid-implicit", "golden/a12b8.jsonl", "init/a12b8.state", "builtin")],
        default_init: "init/a12b8.state",
        default_policy: "builtin",
    },
    CorpusEntry {
        name: "euclid-while",
        program: file!("euclid-while", "program.basm"),
        inits: &[file!("euclid-while", "init/a12b8.state")],
        scripts: &[],
        goldens: &[golden!("euclid-while", "golden/a12b8.jsonl", "init/a12b8.state", "builtin")],
        default_init: "init/a12b8.state",
        default_policy: "builtin",
    },
    CorpusEntry {
        name: "tangent",
        program: file!("tangent", "program.basm"),
        inits: &[file!("tangent", "init/default.state")],
        scripts: &[file!("tangent", "scripts/choice0.jsonl"), file!("tangent", "scripts/choice1.jsonl")],
        goldens: &[
            golden!("tangent", "golden/choice0.jsonl", "init/default.state", "script:scripts/choice0.jsonl"),
            golden!("tangent", "golden/choice1.jsonl", "init/default.state", "script:scripts/choice1.jsonl"),
        ],
        default_init: "init/default.state",
        default_policy: "builtin",
    },
    CorpusEntry {
        name: "primality",
        program: file!("primality", "program.basm"),
        inits: &[
            file!("primality", "init/n7k2.state"),
            file!("primality", "init/n9k1.state"),
            file!("primality", "init/n15k3.state"),
        ],
        scripts: &[file!("primality", "scripts/a2.jsonl")],
        goldens: &[
            golden!("primality", "golden/n7k2-seed42.jsonl", "init/n7k2.state", "uniform:42"),
            golden!("primality", "golden/n9k1-a2.jsonl", "init/n9k1.state", "script-by-symbol:scripts/a2.jsonl"),
            golden!("primality", "golden/n15k3-seed7.jsonl", "init/n15k3.state", "uniform:7"),
        ],
        default_init: "init/n7k2.state",
        default_policy: "uniform:42",
    },
    CorpusEntry {
        name: "enum-graph",
        program: file!("enum-graph", "program.basm"),
        inits: &[file!("enum-graph", "init/cycle.state"), file!("enum-graph", "init/self-loop.state")],
        scripts: &[file!("enum-graph", "scripts/labels.jsonl")],
        goldens: &[golden!("enum-graph", "golden/cycle.jsonl", "init/cycle.state", "script:scripts/labels.jsonl")],
        default_init: "init/cycle.state",
        default_policy: "builtin",
    },
];

fn unknown(what: String) -> Error {
    RuntimeError::new(ErrorKind::UnknownEntry, what).into()
}

pub fn entry(name: &str) -> Result<&'static CorpusEntry, Error> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| unknown(format!("no corpus entry `{name}`")))
}

/// Answering policy in a reusable form (policies themselves own IO).
#[derive(Clone, Debug, PartialEq)]
pub enum PolicySpec {
    Builtin,
    Uniform(u64),
    Script(Script),
}

impl PolicySpec {
    /// `builtin`, `uniform:<seed>`, `script:<file>`, or
    /// `script-by-symbol:<file>`; script files resolve inside the entry.
    pub fn parse(spec: &str, entry: &CorpusEntry) -> Result<PolicySpec, Error> {
        let bad = || unknown(format!("bad policy `{spec}`"));
        match spec.split_once(':') {
            None if spec == "builtin" => Ok(PolicySpec::Builtin),
            Some(("uniform", seed)) => seed.parse().map(PolicySpec::Uniform).map_err(|_| bad()),
            Some((mode @ ("script" | "script-by-symbol"), file)) => {
                let mode = if mode == "script" {
                    ScriptMode::Strict
                } else {
                    ScriptMode::BySymbol
                };
                let text = entry.file(file)?;
                Ok(PolicySpec::Script(Script::Sequence {
                    entries: parse_script(text)?,
                    mode,
                }))
            }
            _ => Err(bad()),
        }
    }

    pub fn to_policy(&self) -> OraclePolicy {
        match self {
            PolicySpec::Builtin => OraclePolicy::Builtin,
            PolicySpec::Uniform(seed) => OraclePolicy::UniformRandom { seed: *seed },
            PolicySpec::Script(s) => OraclePolicy::Scripted(s.clone()),
        }
    }
}

impl CorpusEntry {
    pub fn parse_program(&self) -> Result<Program, ParseError> {
        Program::parse(self.program.text)
    }

    /// Any embedded file by its path inside the entry directory.
    pub fn file(&self, path: &str) -> Result<&'static str, Error> {
        std::iter::once(&self.program)
            .chain(self.inits)
            .chain(self.scripts)
            .chain(self.goldens.iter().map(|g| &g.file))
            .find(|f| f.name == path)
            .map(|f| f.text)
            .ok_or_else(|| unknown(format!("no file `{path}` in corpus entry `{}`", self.name)))
    }

    pub fn init_state(&self, program: &Program, path: &str) -> Result<State, Error> {
        Ok(parse_state(program.vocab().clone(), self.file(path)?)?)
    }

    /// Random initial state for property checks.
    pub fn sample_init(&self, program: &Program, rng: &mut SplitMix64) -> State {
        let vocab = program.vocab().clone();
        let int = |n: i64| Value::Int(n);
        let bindings: Vec<(Location, Value)> = match self.name {
            "euclid" | "euclid-implicit" | "euclid-while" => {
                let a = rng.next_in_range(0, 10_000);
                let b = rng.next_in_range(0, a);
                vec![(Location::var("a"), int(a)), (Location::var("b"), int(b))]
            }
            "tangent" => {
                let (p, c, q) = sample_tangent_config(rng);
                vec![
                    (Location::var("p"), Value::Point(p)),
                    (Location::var("C"), Value::Circle(c)),
                    (Location::var("q"), Value::Point(q)),
                ]
            }
            "primality" => vec![
                (Location::var("n"), int(rng.next_in_range(5, 200))),
                (Location::var("k"), int(rng.next_in_range(1, 3))),
                (Location::var("i"), int(1)),
                (Location::var("a"), int(1)),
                (Location::var("prime"), Value::Bool(true)),
            ],
            "enum-graph" => {
                let node = |rng: &mut SplitMix64| {
                    Value::Member(if rng.next_in_range(0, 1) == 0 { "u" } else { "v" }.into())
                };
                let mut out = vec![(Location::var("cur"), node(rng))];
                for m in ["u", "v"] {
                    let at = || vec![Value::Member(m.into())];
                    out.push((Location::new("next", at()), node(rng)));
                    out.push((Location::new("seen", at()), Value::Bool(rng.next_in_range(0, 1) == 1)));
                }
                out
            }
            _ => Vec::new(),
        };
        State::from_bindings(vocab, bindings).expect("sampler produces well-sorted states")
    }
}

/// A state reachable from a sampled initial state in a few steps, taken
/// under a seeded uniform policy.
pub fn sample_reachable(entry: &CorpusEntry, program: &Program, rng: &mut SplitMix64) -> State {
    let init = entry.sample_init(program, rng);
    let steps = rng.next_in_range(0, 6) as u64;
    let seed = rng.next_u64();
    let trace = run(program, &init, OraclePolicy::UniformRandom { seed }, steps);
    State::from_bindings(program.vocab().clone(), trace.final_state).expect("reachable states are well sorted")
}

/// Center `p`, a circle about it, and a point `q` well outside the circle.
pub fn sample_tangent_config(rng: &mut SplitMix64) -> (Point, Circle, Point) {
    let coord = |rng: &mut SplitMix64, lo: f64, hi: f64| lo + (hi - lo) * rng.next_f64();
    let p = Point::new(coord(rng, -50.0, 50.0), coord(rng, -50.0, 50.0));
    let radius = coord(rng, 0.5, 20.0);
    let angle = coord(rng, 0.0, std::f64::consts::TAU);
    let through = Point::new(p.x + radius * angle.cos(), p.y + radius * angle.sin());
    let dist = radius * coord(rng, 1.2, 5.0);
    let heading = coord(rng, 0.0, std::f64::consts::TAU);
    let q = Point::new(p.x + dist * heading.cos(), p.y + dist * heading.sin());
    let c = Circle::new(p, through).expect("radius is at least 0.5");
    (p, c, q)
}

/// Changes to an entry's default run.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub init: Option<String>,
    pub set: Vec<(Location, Value)>,
    pub policy: Option<PolicySpec>,
    /// For `tangent`: answer every `I` query with this candidate index.
    pub choice: Option<usize>,
    pub max_steps: Option<u64>,
}

impl Overrides {
    pub fn new() -> Self {
        Overrides::default()
    }

    pub fn init(mut self, path: impl Into<String>) -> Self {
        self.init = Some(path.into());
        self
    }

    /// Overrides a nullary location of the initial state.
    pub fn set(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.set.push((Location::var(name), value.into()));
        self
    }

    pub fn policy(mut self, policy: PolicySpec) -> Self {
        self.policy = Some(policy);
        self
    }

    pub fn choice(mut self, index: usize) -> Self {
        self.choice = Some(index);
        self
    }

    pub fn max_steps(mut self, n: u64) -> Self {
        self.max_steps = Some(n);
        self
    }
}

/// Runs a corpus entry with its defaults, adjusted by `overrides`.
pub fn corpus_run(name: &str, overrides: &Overrides) -> Result<Trace, Error> {
    let entry = entry(name)?;
    let program = entry.parse_program()?;
    let init_path = overrides.init.as_deref().unwrap_or(entry.default_init);
    let mut init = entry.init_state(&program, init_path)?;
    if !overrides.set.is_empty() {
        let updates: UpdateSet = overrides.set.iter().cloned().collect();
        init = init.apply_updates(&updates)?;
    }
    let policy = match (&overrides.policy, overrides.choice) {
        (_, Some(index)) => tangent_choice_policy(&init, index)?,
        (Some(p), None) => p.to_policy(),
        (None, None) => PolicySpec::parse(entry.default_policy, entry)?.to_policy(),
    };
    Ok(run(
        &program,
        &init,
        policy,
        overrides.max_steps.unwrap_or(DEFAULT_MAX_STEPS),
    ))
}

/// Table policy answering `I(C, D)` with candidate `index`, where `D` is the
/// circle the tangent construction draws through `q` about the midpoint.
pub fn tangent_choice_policy(init: &State, index: usize) -> Result<OraclePolicy, Error> {
    let domain = |m: &str| Error::from(RuntimeError::new(ErrorKind::OracleDomain, m.to_string()));
    let p = init.get_var("p").as_point().ok_or_else(|| domain("p is not a point"))?;
    let q = init.get_var("q").as_point().ok_or_else(|| domain("q is not a point"))?;
    let c = init.get_var("C").as_circle().ok_or_else(|| domain("C is not a circle"))?;
    let d = Circle::new(geometry::midpoint(p, q), q)?;
    let (lo, hi) = geometry::intersect_circles(&c, &d)?;
    let answer = match index {
        0 => lo,
        1 => hi,
        _ => return Err(domain("choice must be 0 or 1")),
    };
    Ok(OraclePolicy::Scripted(Script::Table(vec![(
        Query::new("I", vec![Value::Circle(c), Value::Circle(d)]),
        Value::Point(answer),
    )])))
}

/// Script entries answering the tangent's `I` queries with candidate `index`
/// (one entry per step that asks).
pub fn tangent_choice_script(init: &State, index: usize, asks: usize) -> Result<Vec<ScriptEntry>, Error> {
    let OraclePolicy::Scripted(Script::Table(table)) = tangent_choice_policy(init, index)? else {
        unreachable!()
    };
    let (q, a) = table.into_iter().next().expect("one entry");
    Ok((0..asks)
        .map(|_| ScriptEntry {
            oracle: q.oracle.clone(),
            args: Some(q.args.clone()),
            answer: a.clone(),
        })
        .collect())
}

/// Exact fraction of bases `a` in `[2, n-2]` with `a^(n-1) mod n = 1`.
pub fn liar_rate(n: i64) -> Result<Ratio<i64>, RuntimeError> {
    if n < 5 {
        return Err(RuntimeError::new(
            ErrorKind::OracleDomain,
            format!("liar rate needs n >= 5, got {n}"),
        ));
    }
    let mut liars = 0;
    for a in 2..=n - 2 {
        if powmod(a, n - 1, n)? == 1 {
            liars += 1;
        }
    }
    Ok(Ratio::new(liars, n - 3))
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<Point> for Value {
    fn from(p: Point) -> Self {
        Value::Point(p)
    }
}

impl From<Circle> for Value {
    fn from(c: Circle) -> Self {
        Value::Circle(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses_with_its_inits() {
        for e in ENTRIES {
            let p = e.parse_program().unwrap_or_else(|err| panic!("{}: {err}", e.name));
            for init in e.inits {
                e.init_state(&p, init.name)
                    .unwrap_or_else(|err| panic!("{}/{}: {err}", e.name, init.name));
            }
        }
    }

    #[test]
    fn unknown_entry() {
        let err = corpus_run("nope", &Overrides::new()).unwrap_err();
        assert!(matches!(err, Error::Runtime(e) if e.kind == ErrorKind::UnknownEntry));
    }

    #[test]
    fn liar_rate_needs_n_at_least_5() {
        assert!(liar_rate(4).is_err());
    }
}
