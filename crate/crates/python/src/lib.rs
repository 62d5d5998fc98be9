// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! Python bindings: `import basm`.
//!
//! Values cross the boundary in the trace-file encoding: integers and
//! booleans as Python `int` and `bool`, `undef` as `None`, and everything
//! else as its literal text.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyInt, PyString};

use basm::checks::{self, CheckReport};
use basm::corpus::{self, Overrides, PolicySpec};
use basm::geometry::{self, Circle, Point};
use basm::oracles::{parse_script, SplitMix64};
use basm::state::Interp;
use basm::syntax::{parse_literal, parse_state, pretty_term};
use basm::{OraclePolicy, Outcome, ScriptMode, Value, DEFAULT_MAX_STEPS};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Undef => py.None(),
        Value::Int(n) => n.into_pyobject(py)?.into_any().unbind(),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any().unbind(),
        other => PyString::new(py, &other.to_string()).into_any().unbind(),
    })
}

fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    if obj.is_none() {
        Ok(Value::Undef)
    } else if obj.is_instance_of::<PyBool>() {
        Ok(Value::Bool(obj.extract()?))
    } else if obj.is_instance_of::<PyInt>() {
        Ok(Value::Int(obj.extract()?))
    } else {
        let text: String = obj.extract()?;
        parse_literal(&text).map_err(value_err)
    }
}

fn interp_to_dict<'py>(py: Python<'py>, interp: &Interp) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (loc, v) in interp {
        d.set_item(loc.to_string(), to_py(py, v)?)?;
    }
    Ok(d)
}

/// A parsed and sort-checked program.
#[pyclass(name = "Program", module = "basm", frozen)]
struct PyProgram {
    inner: basm::Program,
}

#[pymethods]
impl PyProgram {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_program(text)
    }

    fn pretty(&self) -> String {
        self.inner.pretty()
    }

    /// Hex SHA-256 of the canonical text.
    #[getter]
    fn id(&self) -> String {
        self.inner.id()
    }

    /// The bounded-exploration witness, as pretty-printed terms.
    fn witness(&self) -> Vec<String> {
        checks::exploration_witness(&self.inner)
            .terms
            .iter()
            .map(pretty_term)
            .collect()
    }

    /// A copy with the named statics or operators answered through the
    /// oracle session.
    fn with_oracle_statics(&self, names: Vec<String>) -> PyResult<Self> {
        let inner = self.inner.clone().with_oracle_statics(names).map_err(value_err)?;
        Ok(PyProgram { inner })
    }

    fn __repr__(&self) -> String {
        format!("Program(id={:?})", &self.inner.id()[..12])
    }
}

/// A recorded run: steps with their updates and interactions, plus outcome.
#[pyclass(name = "Trace", module = "basm", frozen)]
struct PyTrace {
    inner: basm::Trace,
}

#[pymethods]
impl PyTrace {
    #[staticmethod]
    fn from_jsonl(text: &str) -> PyResult<Self> {
        let inner = basm::Trace::from_jsonl(text).map_err(value_err)?;
        Ok(PyTrace { inner })
    }

    fn to_jsonl(&self) -> String {
        self.inner.to_jsonl()
    }

    #[getter]
    fn program_id(&self) -> &str {
        &self.inner.program_id
    }

    #[getter]
    fn vocab_id(&self) -> &str {
        &self.inner.vocab_id
    }

    /// `"halted"`, `"step-limit"`, or `"error"`.
    #[getter]
    fn outcome(&self) -> &'static str {
        self.inner.outcome.label()
    }

    /// `(kind, message)` when the run stopped on an error.
    #[getter]
    fn error(&self) -> Option<(String, String)> {
        match &self.inner.outcome {
            Outcome::Error { kind, message } => Some((kind.to_string(), message.clone())),
            _ => None,
        }
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.steps.len()
    }

    #[getter]
    fn interaction_count(&self) -> usize {
        self.inner.interaction_count()
    }

    #[getter]
    fn initial_state<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        interp_to_dict(py, &self.inner.initial_state)
    }

    #[getter]
    fn final_state<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        interp_to_dict(py, &self.inner.final_state)
    }

    fn final_var(&self, py: Python<'_>, name: &str) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.final_var(name))
    }

    fn __len__(&self) -> usize {
        self.inner.steps.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Trace(steps={}, outcome={})", self.inner.steps.len(), self.inner.outcome)
    }
}

#[pyclass(name = "CheckReport", module = "basm", frozen, get_all)]
struct PyCheckReport {
    check_name: String,
    trials: u64,
    failures: Vec<String>,
}

impl From<CheckReport> for PyCheckReport {
    fn from(r: CheckReport) -> Self {
        PyCheckReport {
            check_name: r.check_name,
            trials: r.trials,
            failures: r.failures,
        }
    }
}

#[pymethods]
impl PyCheckReport {
    #[getter]
    fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn __repr__(&self) -> String {
        format!(
            "CheckReport({}, trials={}, failures={})",
            self.check_name,
            self.trials,
            self.failures.len()
        )
    }
}

#[pyfunction]
fn parse_program(text: &str) -> PyResult<PyProgram> {
    let inner = basm::Program::parse(text).map_err(value_err)?;
    Ok(PyProgram { inner })
}

fn policy_from_args(
    policy: &str,
    seed: Option<u64>,
    script: Option<&str>,
    script_mode: &str,
) -> PyResult<OraclePolicy> {
    match policy {
        "builtin" => Ok(OraclePolicy::Builtin),
        "uniform" => Ok(OraclePolicy::UniformRandom { seed: seed.unwrap_or(0) }),
        "script" => {
            let text = script.ok_or_else(|| PyValueError::new_err("policy 'script' needs script="))?;
            let entries = parse_script(text).map_err(value_err)?;
            let mode = ScriptMode::parse(script_mode)
                .ok_or_else(|| PyValueError::new_err(format!("unknown script mode {script_mode:?}")))?;
            Ok(OraclePolicy::scripted(entries, mode))
        }
        other => Err(PyValueError::new_err(format!("unknown policy {other:?}"))),
    }
}

/// Runs `program` from the state text `init` (empty state if omitted).
/// `script` is the text of a JSONL script file.
#[pyfunction]
#[pyo3(signature = (program, init=None, policy="builtin", seed=None, script=None, script_mode="strict", max_steps=DEFAULT_MAX_STEPS))]
fn run(
    program: &PyProgram,
    init: Option<&str>,
    policy: &str,
    seed: Option<u64>,
    script: Option<&str>,
    script_mode: &str,
    max_steps: u64,
) -> PyResult<PyTrace> {
    let vocab = program.inner.vocab().clone();
    let state = parse_state(vocab, init.unwrap_or("")).map_err(value_err)?;
    let policy = policy_from_args(policy, seed, script, script_mode)?;
    Ok(PyTrace {
        inner: basm::run(&program.inner, &state, policy, max_steps),
    })
}

/// Re-executes `trace` against `program`, answering from the recorded log.
#[pyfunction]
fn replay(trace: &PyTrace, program: &PyProgram) -> PyResult<bool> {
    basm::replay(&trace.inner, &program.inner).map_err(runtime_err)
}

#[pyfunction]
fn behaviorally_equivalent(a: &PyTrace, b: &PyTrace) -> PyResult<bool> {
    checks::behaviorally_equivalent(&a.inner, &b.inner).map_err(value_err)
}

#[pyfunction]
fn equivalence_report(a: &PyTrace, b: &PyTrace) -> PyResult<PyCheckReport> {
    checks::equivalence_report(&a.inner, &b.inner)
        .map(Into::into)
        .map_err(value_err)
}

#[pyfunction]
fn corpus_names() -> Vec<&'static str> {
    corpus::ENTRIES.iter().map(|e| e.name).collect()
}

/// Runs a corpus entry. `set` overrides nullary locations of the initial
/// state; `policy` uses the `builtin` / `uniform:N` / `script:FILE` forms.
#[pyfunction]
#[pyo3(signature = (name, init=None, set=None, policy=None, choice=None, max_steps=None))]
fn corpus_run(
    name: &str,
    init: Option<String>,
    set: Option<BTreeMap<String, Bound<'_, PyAny>>>,
    policy: Option<&str>,
    choice: Option<usize>,
    max_steps: Option<u64>,
) -> PyResult<PyTrace> {
    let entry = corpus::entry(name).map_err(value_err)?;
    let mut o = Overrides::new();
    if let Some(path) = init {
        o = o.init(path);
    }
    for (k, v) in set.unwrap_or_default() {
        o = o.set(&k, from_py(&v)?);
    }
    if let Some(spec) = policy {
        o = o.policy(PolicySpec::parse(spec, entry).map_err(value_err)?);
    }
    if let Some(i) = choice {
        o = o.choice(i);
    }
    if let Some(n) = max_steps {
        o = o.max_steps(n);
    }
    let inner = corpus::corpus_run(name, &o).map_err(value_err)?;
    Ok(PyTrace { inner })
}

#[pyfunction]
#[pyo3(signature = (name, trials=100, seed=0))]
fn check_bounded_exploration(name: &str, trials: u64, seed: u64) -> PyResult<PyCheckReport> {
    let entry = corpus::entry(name).map_err(value_err)?;
    let program = entry.parse_program().map_err(value_err)?;
    let sampler = |rng: &mut SplitMix64| corpus::sample_reachable(entry, &program, rng);
    Ok(checks::check_bounded_exploration(&program, &sampler, trials, seed).into())
}

/// Fraction of bases in [2, n - 2] that pass the Fermat test for `n`.
#[pyfunction]
fn liar_rate<'py>(py: Python<'py>, n: i64) -> PyResult<Bound<'py, PyAny>> {
    let r = corpus::liar_rate(n).map_err(value_err)?;
    py.import("fractions")?.getattr("Fraction")?.call1((*r.numer(), *r.denom()))
}

fn circle(c: ((f64, f64), (f64, f64))) -> PyResult<Circle> {
    let ((cx, cy), (tx, ty)) = c;
    Circle::new(Point::new(cx, cy), Point::new(tx, ty)).map_err(value_err)
}

/// Both intersection points of circles given as `(center, through)` pairs,
/// lexicographically ordered.
#[pyfunction]
fn intersect_circles(
    a: ((f64, f64), (f64, f64)),
    b: ((f64, f64), (f64, f64)),
) -> PyResult<((f64, f64), (f64, f64))> {
    let (p, q) = geometry::intersect_circles(&circle(a)?, &circle(b)?).map_err(value_err)?;
    Ok(((p.x, p.y), (q.x, q.y)))
}

/// `count` draws from [lo, hi] under the same generator as the `uniform`
/// policy.
#[pyfunction]
#[pyo3(signature = (seed, lo, hi, count=1))]
fn uniform_random(seed: u64, lo: i64, hi: i64, count: usize) -> PyResult<Vec<i64>> {
    if lo > hi {
        return Err(PyValueError::new_err(format!("empty range [{lo}, {hi}]")));
    }
    let mut rng = SplitMix64::new(seed);
    Ok((0..count).map(|_| rng.next_in_range(lo, hi)).collect())
}

#[pymodule]
#[pyo3(name = "basm")]
fn basm_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProgram>()?;
    m.add_class::<PyTrace>()?;
    m.add_class::<PyCheckReport>()?;
    m.add_function(wrap_pyfunction!(parse_program, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    m.add_function(wrap_pyfunction!(behaviorally_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(equivalence_report, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_names, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_run, m)?)?;
    m.add_function(wrap_pyfunction!(check_bounded_exploration, m)?)?;
    m.add_function(wrap_pyfunction!(liar_rate, m)?)?;
    m.add_function(wrap_pyfunction!(intersect_circles, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_random, m)?)?;
    Ok(())
}
