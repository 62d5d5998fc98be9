// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! Euclidean-plane kernel: points, circles given by center and a point on
//! the rim, lines through two points, and the circle-circle intersection
//! that backs the `I` oracle.
//!
//! Coordinates are `f64`. Kernel comparisons use [`EPS`].

use std::cmp::Ordering;

use crate::error::{ErrorKind, RuntimeError};

/// Tolerance for point equality and incidence.
pub const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn approx_eq(self, other: Point) -> bool {
        (self.x - other.x).abs() < EPS && (self.y - other.y).abs() < EPS
    }

    /// Lexicographic order on (x, y), total over all bit patterns.
    pub fn lex_cmp(self, other: Point) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

/// Circle centered at `center` passing through `through`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub through: Point,
}

impl Circle {
    /// Fails unless the radius exceeds [`EPS`].
    pub fn new(center: Point, through: Point) -> Result<Self, RuntimeError> {
        if center.dist(through) <= EPS {
            return Err(RuntimeError::new(
                ErrorKind::OracleDomain,
                "circle needs a through-point distinct from its center",
            ));
        }
        Ok(Circle { center, through })
    }

    pub fn radius(&self) -> f64 {
        self.center.dist(self.through)
    }

    /// Same circle as a point set.
    pub fn approx_eq(&self, other: &Circle) -> bool {
        self.center.approx_eq(other.center) && (self.radius() - other.radius()).abs() < EPS
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub p1: Point,
    pub p2: Point,
}

impl Line {
    pub fn new(p1: Point, p2: Point) -> Result<Self, RuntimeError> {
        line_through(p1, p2)
    }

    /// Same line as a point set.
    pub fn approx_eq(&self, other: &Line) -> bool {
        dist_point_line(other.p1, self) < EPS && dist_point_line(other.p2, self) < EPS
    }
}

pub fn midpoint(p: Point, q: Point) -> Point {
    Point::new((p.x + q.x) / 2.0, (p.y + q.y) / 2.0)
}

pub fn line_through(p: Point, q: Point) -> Result<Line, RuntimeError> {
    if p.dist(q) <= EPS {
        return Err(RuntimeError::new(
            ErrorKind::OracleDomain,
            "line needs two distinct points",
        ));
    }
    Ok(Line { p1: p, p2: q })
}

/// Distance from `x` to the infinite line `l`, via the normalized cross product.
pub fn dist_point_line(x: Point, l: &Line) -> f64 {
    let dx = l.p2.x - l.p1.x;
    let dy = l.p2.y - l.p1.y;
    let cross = dx * (x.y - l.p1.y) - dy * (x.x - l.p1.x);
    cross.abs() / dx.hypot(dy)
}

/// `|dist(s, center) - radius| < EPS`.
pub fn incident(s: Point, c: &Circle) -> bool {
    (s.dist(c.center) - c.radius()).abs() < EPS
}

/// Both intersection points of two circles, lexicographically ordered.
///
/// Tangent circles yield the double point twice. Disjoint, nested, and
/// concentric circles are outside the domain.
pub fn intersect_circles(a: &Circle, b: &Circle) -> Result<(Point, Point), RuntimeError> {
    let (ra, rb) = (a.radius(), b.radius());
    let dx = b.center.x - a.center.x;
    let dy = b.center.y - a.center.y;
    let d = dx.hypot(dy);
    if d <= EPS {
        return Err(RuntimeError::new(
            ErrorKind::OracleDomain,
            "concentric circles have no isolated intersection",
        ));
    }
    if d > ra + rb + EPS || d < (ra - rb).abs() - EPS {
        return Err(RuntimeError::new(
            ErrorKind::OracleDomain,
            "circles do not intersect",
        ));
    }
    // foot of the common chord, measured from a's center along the center line
    let along = (d * d + ra * ra - rb * rb) / (2.0 * d);
    let h = (ra * ra - along * along).max(0.0).sqrt();
    let (ux, uy) = (dx / d, dy / d);
    let foot = Point::new(a.center.x + along * ux, a.center.y + along * uy);
    let p = Point::new(foot.x - h * uy, foot.y + h * ux);
    let q = Point::new(foot.x + h * uy, foot.y - h * ux);
    Ok(if p.lex_cmp(q) == Ordering::Greater {
        (q, p)
    } else {
        (p, q)
    })
}
