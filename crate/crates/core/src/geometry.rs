//! Planar primitives: points, placement boxes, circle intersections, minimum enclosing circle.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SncError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub(crate) fn lex_cmp(self, other: Point) -> std::cmp::Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }
}

/// Horizontal and vertical limits on the drone position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_l: f64,
    pub x_u: f64,
    pub y_l: f64,
    pub y_u: f64,
    pub h_l: f64,
    pub h_u: f64,
}

impl Bounds {
    pub fn new(x: (f64, f64), y: (f64, f64), h: (f64, f64)) -> Result<Self> {
        let b = Self {
            x_l: x.0,
            x_u: x.1,
            y_l: y.0,
            y_u: y.1,
            h_l: h.0,
            h_u: h.1,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.x_l <= self.x_u && self.y_l <= self.y_u && self.h_l >= 0.0 && self.h_l <= self.h_u;
        let finite = [self.x_l, self.x_u, self.y_l, self.y_u, self.h_l]
            .iter()
            .all(|v| v.is_finite());
        if !ok || !finite || self.h_u.is_nan() {
            return Err(SncError::InvalidParameter(format!("invalid bounds {self:?}")));
        }
        Ok(())
    }

    /// Square box `[-half, half]²` with unlimited altitude.
    pub fn square(half: f64) -> Self {
        Self {
            x_l: -half,
            x_u: half,
            y_l: -half,
            y_u: half,
            h_l: 0.0,
            h_u: f64::INFINITY,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.contains_tol(p, 0.0)
    }

    pub fn contains_tol(&self, p: Point, tol: f64) -> bool {
        p.x >= self.x_l - tol && p.x <= self.x_u + tol && p.y >= self.y_l - tol && p.y <= self.y_u + tol
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(self.x_l, self.x_u), p.y.clamp(self.y_l, self.y_u))
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x_l, self.y_l),
            Point::new(self.x_u, self.y_l),
            Point::new(self.x_l, self.y_u),
            Point::new(self.x_u, self.y_u),
        ]
    }
}

/// Intersection points of two circles of equal radius `r` centred at `a` and `b`.
pub fn equal_circle_intersections(a: Point, b: Point, r: f64) -> Vec<Point> {
    let d2 = a.dist2(b);
    if d2 == 0.0 || d2 > 4.0 * r * r {
        return Vec::new();
    }
    let d = d2.sqrt();
    let mid = Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    let h = (r * r - 0.25 * d2).max(0.0).sqrt();
    let (ux, uy) = (-(b.y - a.y) / d, (b.x - a.x) / d);
    vec![
        Point::new(mid.x + h * ux, mid.y + h * uy),
        Point::new(mid.x - h * ux, mid.y - h * uy),
    ]
}

/// Points where the circle `(c, r)` crosses the edges of the box.
pub fn circle_box_intersections(c: Point, r: f64, b: &Bounds) -> Vec<Point> {
    let mut out = Vec::new();
    for x in [b.x_l, b.x_u] {
        let dx = x - c.x;
        let s = r * r - dx * dx;
        if s >= 0.0 {
            let h = s.sqrt();
            for y in [c.y - h, c.y + h] {
                if y >= b.y_l && y <= b.y_u {
                    out.push(Point::new(x, y));
                }
            }
        }
    }
    for y in [b.y_l, b.y_u] {
        let dy = y - c.y;
        let s = r * r - dy * dy;
        if s >= 0.0 {
            let h = s.sqrt();
            for x in [c.x - h, c.x + h] {
                if x >= b.x_l && x <= b.x_u {
                    out.push(Point::new(x, y));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    fn contains(&self, p: Point) -> bool {
        p.dist(self.center) <= self.radius * (1.0 + 1e-12) + 1e-9
    }
}

fn circle_two(a: Point, b: Point) -> Circle {
    let center = Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    Circle {
        center,
        radius: 0.5 * a.dist(b),
    }
}

fn circle_three(a: Point, b: Point, c: Point) -> Circle {
    let (bx, by) = (b.x - a.x, b.y - a.y);
    let (cx, cy) = (c.x - a.x, c.y - a.y);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-12 {
        // Collinear: the farthest pair spans the others.
        let pairs = [circle_two(a, b), circle_two(a, c), circle_two(b, c)];
        return pairs.into_iter().max_by(|p, q| p.radius.total_cmp(&q.radius)).unwrap();
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    Circle {
        center: Point::new(a.x + ux, a.y + uy),
        radius: ux.hypot(uy),
    }
}

/// Smallest circle containing all `points` (incremental Welzl, input order).
/// Returns `None` for an empty slice.
pub fn min_enclosing_circle(points: &[Point]) -> Option<Circle> {
    let first = *points.first()?;
    let mut c = Circle {
        center: first,
        radius: 0.0,
    };
    for i in 1..points.len() {
        if c.contains(points[i]) {
            continue;
        }
        c = Circle {
            center: points[i],
            radius: 0.0,
        };
        for j in 0..i {
            if c.contains(points[j]) {
                continue;
            }
            c = circle_two(points[i], points[j]);
            for k in 0..j {
                if !c.contains(points[k]) {
                    c = circle_three(points[i], points[j], points[k]);
                }
            }
        }
    }
    Some(c)
}
