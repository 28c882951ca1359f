//! Closed polylines and the planar geometry the solvers share.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum spacing between consecutive vertices.
pub const MIN_SPACING: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Rotation by -90 degrees: `(x, y) -> (y, -x)`.
    #[inline]
    pub fn rot_cw(self) -> Point {
        Point::new(self.y, -self.x)
    }

    pub fn normalized(self) -> Point {
        let n = self.norm();
        if n > 0.0 {
            self * (1.0 / n)
        } else {
            self
        }
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Distance from `p` to the segment `a`-`b`.
pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.distance(a + ab * t)
}

/// Closed polyline with positive signed area (counter-clockwise in the
/// `x`-right/`y`-up sense of the shoelace formula).
///
/// Construction rejects fewer than four vertices and consecutive vertices
/// closer than [`MIN_SPACING`], and reverses clockwise input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ContourJson", try_from = "ContourJson")]
pub struct Contour {
    vertices: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct ContourJson {
    closed: bool,
    vertices: Vec<[f64; 2]>,
}

impl From<Contour> for ContourJson {
    fn from(c: Contour) -> Self {
        Self {
            closed: true,
            vertices: c.vertices.iter().map(|p| [p.x, p.y]).collect(),
        }
    }
}

impl TryFrom<ContourJson> for Contour {
    type Error = Error;

    fn try_from(doc: ContourJson) -> Result<Self> {
        if !doc.closed {
            return Err(Error::InvalidContour(
                "open contours are not supported".into(),
            ));
        }
        Self::new(
            doc.vertices
                .into_iter()
                .map(|[x, y]| Point::new(x, y))
                .collect(),
        )
    }
}

impl Contour {
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 4 {
            return Err(Error::InvalidContour(format!(
                "need at least 4 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices
            .iter()
            .position(|v| !(v.x.is_finite() && v.y.is_finite()))
        {
            return Err(Error::InvalidContour(format!("vertex {i} is not finite")));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i].distance(vertices[(i + 1) % n]) <= MIN_SPACING {
                return Err(Error::InvalidContour(format!(
                    "vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        if shoelace(&vertices) < 0.0 {
            vertices.reverse();
        }
        Ok(Self { vertices })
    }

    /// Like [`Contour::new`] but first drops vertices that coincide with
    /// their predecessor.
    pub fn from_points_dedup(points: Vec<Point>) -> Result<Self> {
        let mut out: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if out.last().is_none_or(|q| q.distance(p) > MIN_SPACING) {
                out.push(p);
            }
        }
        while out.len() > 1 && out[0].distance(*out.last().unwrap()) <= MIN_SPACING {
            out.pop();
        }
        Self::new(out)
    }

    /// Regular `n`-gon inscribed in the circle.
    pub fn circle(center: Point, radius: f64, n: usize) -> Result<Self> {
        let pts = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                center + Point::new(t.cos(), t.sin()) * radius
            })
            .collect();
        Self::new(pts)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Iterates `(a, b)` over every edge, including the closing one.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.distance(b)).sum()
    }

    pub fn mean_spacing(&self) -> f64 {
        self.perimeter() / self.len() as f64
    }

    pub fn vertex_centroid(&self) -> Point {
        let s = self
            .vertices
            .iter()
            .fold(Point::default(), |acc, &v| acc + v);
        s * (1.0 / self.len() as f64)
    }

    /// Algebraic least-squares circle through the vertices, `(center, radius)`.
    pub fn fit_circle(&self) -> (Point, f64) {
        fit_circle(&self.vertices)
    }

    /// Even-odd point-in-polygon test.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Unsigned distance from `p` to the polyline.
    pub fn distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    /// Points along the polyline at arclength spacing no larger than `step`,
    /// including every vertex.
    pub fn dense_samples(&self, step: f64) -> Vec<Point> {
        let mut out = Vec::new();
        for (a, b) in self.edges() {
            let len = a.distance(b);
            let n = (len / step).ceil().max(1.0) as usize;
            for k in 0..n {
                out.push(a + (b - a) * (k as f64 / n as f64));
            }
        }
        out
    }

    /// `{"closed": true, "vertices": [[x, y], ...]}`
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("contour serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn shoelace(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>()
}

/// Kasa fit: minimizes the algebraic residual of `x^2 + y^2 = 2ax + 2by + c`.
pub fn fit_circle(points: &[Point]) -> (Point, f64) {
    let n = points.len() as f64;
    // center the data first for conditioning
    let m = points.iter().fold(Point::default(), |acc, &p| acc + p) * (1.0 / n);
    let (mut suu, mut suv, mut svv, mut suuu, mut svvv, mut suvv, mut svuu) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let u = p.x - m.x;
        let v = p.y - m.y;
        suu += u * u;
        suv += u * v;
        svv += v * v;
        suuu += u * u * u;
        svvv += v * v * v;
        suvv += u * v * v;
        svuu += v * u * u;
    }
    let r1 = 0.5 * (suuu + suvv);
    let r2 = 0.5 * (svvv + svuu);
    let det = suu * svv - suv * suv;
    let (uc, vc) = if det.abs() > 0.0 {
        ((r1 * svv - r2 * suv) / det, (suu * r2 - suv * r1) / det)
    } else {
        (0.0, 0.0)
    };
    let r = (uc * uc + vc * vc + (suu + svv) / n).sqrt();
    (Point::new(uc + m.x, vc + m.y), r)
}
