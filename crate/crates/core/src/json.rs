// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON encoding of values and locations shared by trace, script, and
//! report files.
//!
//! Integers and booleans are JSON numbers and booleans, `undef` is `null`,
//! and every other value is a string holding its literal text
//! (`"point(2.5, -4.330127018922193)"`, `"u"`). Locations are strings in
//! term syntax (`"a"`, `"f(u)"`).

use serde_json::Value as Json;

use crate::error::{ParseError, ParseErrorKind};
use crate::state::Location;
use crate::syntax::{parse_literal, parse_location};
use crate::value::Value;

pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Undef => Json::Null,
        Value::Int(n) => Json::from(*n),
        Value::Bool(b) => Json::Bool(*b),
        other => Json::String(other.to_string()),
    }
}

pub fn value_from_json(j: &Json) -> Result<Value, ParseError> {
    match j {
        Json::Null => Ok(Value::Undef),
        Json::Bool(b) => Ok(Value::Bool(*b)),
        Json::Number(n) => n.as_i64().map(Value::Int).ok_or_else(|| {
            ParseError::unpositioned(ParseErrorKind::Syntax, format!("non-integer number {n}"))
        }),
        Json::String(s) => parse_literal(s),
        other => Err(ParseError::unpositioned(
            ParseErrorKind::Syntax,
            format!("expected a value, found {other}"),
        )),
    }
}

pub fn values_to_json(vs: &[Value]) -> Json {
    Json::Array(vs.iter().map(value_to_json).collect())
}

pub fn values_from_json(j: &Json) -> Result<Vec<Value>, ParseError> {
    match j {
        Json::Array(items) => items.iter().map(value_from_json).collect(),
        other => Err(ParseError::unpositioned(
            ParseErrorKind::Syntax,
            format!("expected an array of values, found {other}"),
        )),
    }
}

pub fn location_to_json(l: &Location) -> Json {
    Json::String(l.to_string())
}

pub fn location_from_json(j: &Json) -> Result<Location, ParseError> {
    match j {
        Json::String(s) => parse_location(s),
        other => Err(ParseError::unpositioned(
            ParseErrorKind::Syntax,
            format!("expected a location string, found {other}"),
        )),
    }
}
