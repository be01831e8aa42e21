use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::ValidationError;
use crate::geometry::Point;

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Aabb {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Self {
            min_x,
            min_y,
            max_x,
            max_y,
        }
    }

    pub fn of_points(pts: &[Point]) -> Self {
        let mut b = Aabb::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            b.min_x = b.min_x.min(p.x);
            b.min_y = b.min_y.min(p.y);
            b.max_x = b.max_x.max(p.x);
            b.max_y = b.max_y.max(p.y);
        }
        b
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    /// Closed containment.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    /// Closed overlap test.
    pub fn overlaps(&self, o: &Aabb) -> bool {
        self.min_x <= o.max_x && o.min_x <= self.max_x && self.min_y <= o.max_y && o.min_y <= self.max_y
    }
}

/// Closed convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
    aabb: Aabb,
}

impl ConvexPolygon {
    /// Accepts either winding; rejects fewer than three vertices, collinear or
    /// repeated vertices and non-convex outlines.
    pub fn new(mut vertices: Vec<Point>) -> Result<Self, ValidationError> {
        let n = vertices.len();
        if n < 3 {
            return Err(ValidationError::new("obstacles", "polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(ValidationError::new("obstacles", "non-finite vertex"));
        }
        let area2: f64 = (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum();
        if area2.abs() < 1e-12 {
            return Err(ValidationError::new("obstacles", "polygon vertices are collinear"));
        }
        if area2 < 0.0 {
            vertices.reverse();
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if a.distance(b) < 1e-12 {
                return Err(ValidationError::new("obstacles", "repeated polygon vertex"));
            }
            if b.sub(a).cross(c.sub(b)) <= 0.0 {
                return Err(ValidationError::new("obstacles", "polygon is not strictly convex"));
            }
        }
        let aabb = Aabb::of_points(&vertices);
        Ok(Self { vertices, aabb })
    }

    pub fn rectangle(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Self::new(vec![
            Point::new(min_x, min_y),
            Point::new(max_x, min_y),
            Point::new(max_x, max_y),
            Point::new(min_x, max_y),
        ])
        .expect("rectangle with positive extent")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn aabb(&self) -> &Aabb {
        &self.aabb
    }

    pub fn contains_point(&self, p: Point) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            b.sub(a).cross(p.sub(a)) >= 0.0
        })
    }

    /// Every edge pushed outward by `margin`, corners mitered.
    pub fn inflated(&self, margin: f64) -> Self {
        if margin <= 0.0 {
            return self.clone();
        }
        let n = self.vertices.len();
        let normal = |i: usize| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let e = b.sub(a);
            Point::new(e.y, -e.x).scale(1.0 / e.norm())
        };
        let vertices: Vec<Point> = (0..n)
            .map(|i| {
                let n0 = normal((i + n - 1) % n);
                let n1 = normal(i);
                let k = margin / (1.0 + n0.dot(n1));
                self.vertices[i].add(n0.add(n1).scale(k))
            })
            .collect();
        let aabb = Aabb::of_points(&vertices);
        Self { vertices, aabb }
    }
}

fn project(pts: &[Point], axis: Point) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in pts {
        let d = p.dot(axis);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (lo, hi)
}

fn separated_along_edges(a: &[Point], b: &[Point]) -> bool {
    let n = a.len();
    for i in 0..n {
        let e = a[(i + 1) % n].sub(a[i]);
        let axis = Point::new(-e.y, e.x);
        let (alo, ahi) = project(a, axis);
        let (blo, bhi) = project(b, axis);
        if ahi < blo || bhi < alo {
            return true;
        }
    }
    false
}

/// Separating-axis test for two closed convex polygons. Touching counts as
/// intersecting.
pub fn polygons_intersect(a: &[Point], b: &[Point]) -> bool {
    !(separated_along_edges(a, b) || separated_along_edges(b, a))
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 {
        (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.distance(a.add(ab.scale(t)))
}

/// Euclidean distance between two convex polygons, zero when they intersect.
pub fn polygon_distance(a: &[Point], b: &[Point]) -> f64 {
    if polygons_intersect(a, b) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (p, q) in [(a, b), (b, a)] {
        let m = q.len();
        for &v in p {
            for j in 0..m {
                best = best.min(point_segment_distance(v, q[j], q[(j + 1) % m]));
            }
        }
    }
    best
}
