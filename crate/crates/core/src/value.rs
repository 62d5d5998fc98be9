// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::geometry::{Circle, Line, Point};

/// A sort of the background structure or a declared enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Integer,
    Boolean,
    Point,
    Circle,
    Line,
    /// Declared finite sort; members live in the vocabulary.
    Enum(String),
}

impl Sort {
    pub fn name(&self) -> &str {
        match self {
            Sort::Integer => "Integer",
            Sort::Boolean => "Boolean",
            Sort::Point => "Point",
            Sort::Circle => "Circle",
            Sort::Line => "Line",
            Sort::Enum(name) => name,
        }
    }

    pub fn builtin(name: &str) -> Option<Sort> {
        Some(match name {
            "Integer" => Sort::Integer,
            "Boolean" => Sort::Boolean,
            "Point" => Sort::Point,
            "Circle" => Sort::Circle,
            "Line" => Sort::Line,
            _ => return None,
        })
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, Sort::Enum(_))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A runtime value. `Undef` inhabits every sort.
///
/// `Eq`, `Ord`, and `Hash` are exact (floats compare by bit pattern) so that
/// values can key locations and oracle caches. The `=` of the program
/// language is [`Value::semantic_eq`], which compares geometry within
/// [`crate::geometry::EPS`].
#[derive(Clone, Debug)]
pub enum Value {
    Undef,
    Int(i64),
    Bool(bool),
    Point(Point),
    Circle(Circle),
    Line(Line),
    /// Enum member, by name. Member names are unique across a vocabulary.
    Member(String),
}

impl Value {
    pub fn is_undef(&self) -> bool {
        matches!(self, Value::Undef)
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_point(&self) -> Option<Point> {
        match self {
            Value::Point(p) => Some(*p),
            _ => None,
        }
    }

    pub fn as_circle(&self) -> Option<Circle> {
        match self {
            Value::Circle(c) => Some(*c),
            _ => None,
        }
    }

    pub fn as_line(&self) -> Option<Line> {
        match self {
            Value::Line(l) => Some(*l),
            _ => None,
        }
    }

    /// Equality of the program language: `undef` equals only `undef`,
    /// geometry is compared as point sets within tolerance.
    pub fn semantic_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Point(a), Value::Point(b)) => a.approx_eq(*b),
            (Value::Circle(a), Value::Circle(b)) => a.approx_eq(b),
            (Value::Line(a), Value::Line(b)) => a.approx_eq(b),
            _ => self == other,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Undef => 0,
            Value::Bool(_) => 1,
            Value::Int(_) => 2,
            Value::Member(_) => 3,
            Value::Point(_) => 4,
            Value::Circle(_) => 5,
            Value::Line(_) => 6,
        }
    }

    fn coords(&self) -> Vec<f64> {
        match self {
            Value::Point(p) => vec![p.x, p.y],
            Value::Circle(c) => vec![c.center.x, c.center.y, c.through.x, c.through.y],
            Value::Line(l) => vec![l.p1.x, l.p1.y, l.p2.x, l.p2.y],
            _ => Vec::new(),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Member(a), Value::Member(b)) => a.cmp(b),
            _ if self.rank() == other.rank() => {
                let (a, b) = (self.coords(), other.coords());
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Int(n) => n.hash(state),
            Value::Bool(b) => b.hash(state),
            Value::Member(m) => m.hash(state),
            _ => {
                for c in self.coords() {
                    c.to_bits().hash(state);
                }
            }
        }
    }
}

struct Coord(f64);

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Debug output is the shortest string that round-trips.
        write!(f, "{:?}", self.0)
    }
}

struct PointLit(Point);

impl fmt::Display for PointLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "point({}, {})", Coord(self.0.x), Coord(self.0.y))
    }
}

/// Literal syntax shared by state files, trace files, and scripts.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Undef => f.write_str("undef"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Point(p) => write!(f, "{}", PointLit(*p)),
            Value::Circle(c) => write!(
                f,
                "circle({}, {})",
                PointLit(c.center),
                PointLit(c.through)
            ),
            Value::Line(l) => write!(f, "line({}, {})", PointLit(l.p1), PointLit(l.p2)),
            Value::Member(m) => f.write_str(m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undef_equals_only_undef() {
        assert!(Value::Undef.semantic_eq(&Value::Undef));
        assert!(!Value::Undef.semantic_eq(&Value::Int(0)));
        assert!(!Value::Bool(false).semantic_eq(&Value::Undef));
    }

    #[test]
    fn geometry_equality_is_tolerant() {
        let a = Value::Point(Point::new(1.0, 2.0));
        let b = Value::Point(Point::new(1.0 + 1e-12, 2.0));
        assert!(a.semantic_eq(&b));
        assert_ne!(a, b);
        let c1 = Circle::new(Point::new(0.0, 0.0), Point::new(5.0, 0.0)).unwrap();
        let c2 = Circle::new(Point::new(0.0, 0.0), Point::new(0.0, -5.0)).unwrap();
        assert!(Value::Circle(c1).semantic_eq(&Value::Circle(c2)));
    }

    #[test]
    fn literal_display() {
        let p = Value::Point(Point::new(2.5, -4.330127018922193));
        assert_eq!(p.to_string(), "point(2.5, -4.330127018922193)");
        assert_eq!(Value::Point(Point::new(5.0, 0.0)).to_string(), "point(5.0, 0.0)");
        assert_eq!(Value::Int(-3).to_string(), "-3");
        assert_eq!(Value::Undef.to_string(), "undef");
    }
}
