//! Points, vectors, sampled paths, proper oriented lines and the real-valued
//! winding number of a vector field along a path.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::khalimsky::{unwrap_angle_path, UnwrapOptions};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vector {
    pub dx: f64,
    pub dy: f64,
}

pub const fn pt(x: f64, y: f64) -> Point {
    Point { x, y }
}

pub const fn vec2(dx: f64, dy: f64) -> Vector {
    Vector { dx, dy }
}

impl Point {
    pub const ORIGIN: Point = pt(0.0, 0.0);

    pub fn new(x: f64, y: f64) -> Self {
        pt(x, y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, other: Point) -> f64 {
        (other - self).norm()
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        pt(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Vector {
    pub const ZERO: Vector = vec2(0.0, 0.0);

    pub fn new(dx: f64, dy: f64) -> Self {
        vec2(dx, dy)
    }

    pub fn from_angle(angle: f64) -> Self {
        vec2(angle.cos(), angle.sin())
    }

    pub fn norm(self) -> f64 {
        self.dx.hypot(self.dy)
    }

    pub fn dot(self, other: Vector) -> f64 {
        self.dx * other.dx + self.dy * other.dy
    }

    /// z-component of the planar cross product; positive when `other` points to
    /// the left of `self`.
    pub fn cross(self, other: Vector) -> f64 {
        self.dx * other.dy - self.dy * other.dx
    }

    /// Rotation by +90 degrees.
    pub fn rot90(self) -> Vector {
        vec2(-self.dy, self.dx)
    }

    pub fn normalized(self) -> Option<Vector> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.dx.is_finite() && self.dy.is_finite()
    }
}

impl Add<Vector> for Point {
    type Output = Point;
    fn add(self, v: Vector) -> Point {
        pt(self.x + v.dx, self.y + v.dy)
    }
}

impl AddAssign<Vector> for Point {
    fn add_assign(&mut self, v: Vector) {
        self.x += v.dx;
        self.y += v.dy;
    }
}

impl Sub<Vector> for Point {
    type Output = Point;
    fn sub(self, v: Vector) -> Point {
        pt(self.x - v.dx, self.y - v.dy)
    }
}

impl Sub for Point {
    type Output = Vector;
    fn sub(self, other: Point) -> Vector {
        vec2(self.x - other.x, self.y - other.y)
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, o: Vector) -> Vector {
        vec2(self.dx + o.dx, self.dy + o.dy)
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, o: Vector) -> Vector {
        vec2(self.dx - o.dx, self.dy - o.dy)
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        vec2(self.dx * s, self.dy * s)
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        vec2(-self.dx, -self.dy)
    }
}

/// Counterclockwise angle of `v` from the positive x-axis, in `[0, 2π)`.
pub fn angle_of(v: Vector) -> Result<f64> {
    if v.dx == 0.0 && v.dy == 0.0 || !v.is_finite() {
        return Err(Error::ZeroVector { t: None });
    }
    let a = v.dy.atan2(v.dx);
    let a = if a < 0.0 { a + TAU } else { a };
    // atan2 can return exactly -0.0 or a value that rounds up to 2π.
    Ok(if a >= TAU { 0.0 } else { a })
}

/// Reduce an angle difference to `(-π, π]`.
pub fn wrap_pi(d: f64) -> f64 {
    let r = (d + PI).rem_euclid(TAU) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn new(min: Point, max: Point) -> Self {
        BoundingBox {
            min: pt(min.x.min(max.x), min.y.min(max.y)),
            max: pt(min.x.max(max.x), min.y.max(max.y)),
        }
    }

    pub fn square(half: f64) -> Self {
        BoundingBox::new(pt(-half, -half), pt(half, half))
    }

    /// The default working box `[-8, 8]²`.
    pub fn working() -> Self {
        BoundingBox::square(8.0)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        self.min.lerp(self.max, 0.5)
    }

    /// Grow each side by `fraction` of the box size (0.2 → 20%).
    pub fn inflated(&self, fraction: f64) -> Self {
        let mx = self.width() * fraction;
        let my = self.height() * fraction;
        BoundingBox::new(
            pt(self.min.x - mx, self.min.y - my),
            pt(self.max.x + mx, self.max.y + my),
        )
    }

    pub fn expanded(&self, amount: f64) -> Self {
        BoundingBox::new(
            pt(self.min.x - amount, self.min.y - amount),
            pt(self.max.x + amount, self.max.y + amount),
        )
    }

    pub fn including(&self, p: Point) -> Self {
        BoundingBox {
            min: pt(self.min.x.min(p.x), self.min.y.min(p.y)),
            max: pt(self.max.x.max(p.x), self.max.y.max(p.y)),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    fn overlaps(&self, other: &BoundingBox, slack: f64) -> bool {
        self.min.x <= other.max.x + slack
            && other.min.x <= self.max.x + slack
            && self.min.y <= other.max.y + slack
            && other.min.y <= self.max.y + slack
    }

    fn of_points(points: &[Point]) -> Self {
        let mut b = BoundingBox { min: points[0], max: points[0] };
        for &p in &points[1..] {
            b = b.including(p);
        }
        b
    }
}

/// A sampled path `[0, 1] → ℝ²`, linear between vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPath {
    vertices: Vec<Point>,
    params: Vec<f64>,
}

impl PolyPath {
    pub fn new(vertices: Vec<Point>, params: Vec<f64>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidInput("a path needs at least two vertices".into()));
        }
        if vertices.len() != params.len() {
            return Err(Error::InvalidInput("vertex and parameter counts differ".into()));
        }
        if params[0] != 0.0 || *params.last().unwrap() != 1.0 {
            return Err(Error::InvalidInput("parameters must run from 0 to 1".into()));
        }
        if params.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("parameters must be strictly increasing".into()));
        }
        if let Some(k) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::ZeroTangent(k));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("non-finite vertex".into()));
        }
        Ok(PolyPath { vertices, params })
    }

    /// Parametrize by normalized chord length.
    pub fn from_vertices(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidInput("a path needs at least two vertices".into()));
        }
        let mut acc = Vec::with_capacity(vertices.len());
        let mut s = 0.0;
        acc.push(0.0);
        for w in vertices.windows(2) {
            s += w[0].distance(w[1]);
            acc.push(s);
        }
        if s <= 0.0 {
            return Err(Error::ZeroTangent(0));
        }
        let n = acc.len();
        let params: Vec<f64> = acc
            .iter()
            .enumerate()
            .map(|(k, a)| if k + 1 == n { 1.0 } else { a / s })
            .collect();
        PolyPath::new(vertices, params)
    }

    /// Sample `f` at `segments + 1` uniform parameters.
    pub fn from_fn(segments: usize, f: impl Fn(f64) -> Point) -> Result<Self> {
        let segments = segments.max(1);
        let params: Vec<f64> = (0..=segments).map(|k| k as f64 / segments as f64).collect();
        let vertices = params.iter().map(|&t| f(t)).collect();
        PolyPath::new(vertices, params)
    }

    pub fn segment(a: Point, b: Point, segments: usize) -> Result<Self> {
        PolyPath::from_fn(segments, |t| a.lerp(b, t))
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn start(&self) -> Point {
        self.vertices[0]
    }

    pub fn end(&self) -> Point {
        *self.vertices.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    /// Point at parameter `t`, clamped to `[0, 1]`.
    pub fn at(&self, t: f64) -> Point {
        let t = t.clamp(0.0, 1.0);
        let k = match self.params.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(k) => return self.vertices[k],
            Err(k) => k,
        };
        let (t0, t1) = (self.params[k - 1], self.params[k]);
        self.vertices[k - 1].lerp(self.vertices[k], (t - t0) / (t1 - t0))
    }

    pub fn reversed(&self) -> PolyPath {
        let vertices = self.vertices.iter().rev().copied().collect();
        let n = self.params.len();
        let params = self
            .params
            .iter()
            .rev()
            .enumerate()
            .map(|(k, p)| if k == 0 { 0.0 } else if k + 1 == n { 1.0 } else { 1.0 - p })
            .collect();
        PolyPath { vertices, params }
    }
}

/// Closest point to `p` on segment `[a, b]`, with its fractional position.
pub fn closest_on_segment(p: Point, a: Point, b: Point) -> (Point, f64) {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return (a, 0.0);
    }
    let s = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (a + ab * s, s)
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0
        && d3 != 0.0
        && d4 != 0.0
}

/// Minimum distance between segments `[a, b]` and `[c, d]`.
pub fn segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    if segments_cross(a, b, c, d) {
        return 0.0;
    }
    let d1 = closest_on_segment(a, c, d).0.distance(a);
    let d2 = closest_on_segment(b, c, d).0.distance(b);
    let d3 = closest_on_segment(c, a, b).0.distance(c);
    let d4 = closest_on_segment(d, a, b).0.distance(d);
    d1.min(d2).min(d3).min(d4)
}

const CHUNK: usize = 32;

struct Chunked<'a> {
    points: &'a [Point],
    boxes: Vec<(usize, usize, BoundingBox)>,
}

impl<'a> Chunked<'a> {
    fn new(points: &'a [Point]) -> Self {
        let mut boxes = Vec::new();
        let mut start = 0;
        while start + 1 < points.len() {
            let end = (start + CHUNK).min(points.len() - 1);
            boxes.push((start, end, BoundingBox::of_points(&points[start..=end])));
            start = end;
        }
        Chunked { points, boxes }
    }
}

/// Minimum distance between two polylines, with early exit once below `stop_below`.
pub fn polyline_distance(p: &[Point], q: &[Point], stop_below: f64) -> f64 {
    let cp = Chunked::new(p);
    let cq = Chunked::new(q);
    let mut best = f64::INFINITY;
    for &(s0, e0, b0) in &cp.boxes {
        for &(s1, e1, b1) in &cq.boxes {
            if !b0.overlaps(&b1, best.min(1e300)) {
                continue;
            }
            for i in s0..e0 {
                for j in s1..e1 {
                    let d = segment_distance(cp.points[i], cp.points[i + 1], cq.points[j], cq.points[j + 1]);
                    if d < best {
                        best = d;
                        if best < stop_below {
                            return best;
                        }
                    }
                }
            }
        }
    }
    best
}

/// True when two non-adjacent segments of the polyline meet.
pub fn polyline_self_intersects(p: &[Point]) -> bool {
    let c = Chunked::new(p);
    for (a, &(s0, e0, b0)) in c.boxes.iter().enumerate() {
        for &(s1, e1, b1) in &c.boxes[a..] {
            if !b0.overlaps(&b1, 0.0) {
                continue;
            }
            for i in s0..e0 {
                for j in s1.max(i + 2)..e1 {
                    if segments_cross(p[i], p[i + 1], p[j], p[j + 1]) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

pub type CurveFn = Arc<dyn Fn(f64) -> Point + Send + Sync>;

/// A proper oriented topological line, carried analytically where possible.
#[derive(Clone)]
pub enum OrientedLine {
    /// `ℝ × {y}` oriented toward `+x`.
    HorizontalAt(f64),
    /// Parametrization `t ∈ ℝ → Point`, oriented by increasing `t`.
    Analytic(CurveFn),
    /// Traced polyline that leaves the working box at both ends.
    Traced(PolyPath),
}

impl fmt::Debug for OrientedLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrientedLine::HorizontalAt(y) => write!(f, "HorizontalAt({y})"),
            OrientedLine::Analytic(_) => write!(f, "Analytic(..)"),
            OrientedLine::Traced(p) => write!(f, "Traced({} vertices)", p.len()),
        }
    }
}

const ANALYTIC_STEP: f64 = 1.0 / 64.0;
const ANALYTIC_MAX_STEPS: usize = 100_000;

impl OrientedLine {
    /// Straight line through `p` with direction `d`.
    pub fn straight(p: Point, d: Vector) -> Self {
        OrientedLine::Analytic(Arc::new(move |t| p + d * t))
    }

    pub fn vertical(x: f64) -> Self {
        OrientedLine::straight(pt(x, 0.0), vec2(0.0, 1.0))
    }

    /// Polyline representative covering `bbox`, in line orientation.
    pub fn representative(&self, bbox: &BoundingBox) -> Vec<Point> {
        match self {
            OrientedLine::HorizontalAt(y) => {
                let pad = 1.0;
                vec![pt(bbox.min.x - pad, *y), pt(bbox.max.x + pad, *y)]
            }
            OrientedLine::Analytic(c) => {
                let mut fwd = vec![c(0.0)];
                let mut t = 0.0;
                for _ in 0..ANALYTIC_MAX_STEPS {
                    t += ANALYTIC_STEP;
                    let p = c(t);
                    fwd.push(p);
                    if !bbox.contains(p) {
                        break;
                    }
                }
                let mut back = Vec::new();
                let mut t = 0.0;
                for _ in 0..ANALYTIC_MAX_STEPS {
                    t -= ANALYTIC_STEP;
                    let p = c(t);
                    back.push(p);
                    if !bbox.contains(p) {
                        break;
                    }
                }
                back.reverse();
                back.extend(fwd);
                back
            }
            OrientedLine::Traced(p) => p.vertices().to_vec(),
        }
    }

    /// Representative vertices lying inside `bbox` (at least 64 for rows).
    pub fn samples_in(&self, bbox: &BoundingBox) -> Vec<Point> {
        if let OrientedLine::HorizontalAt(y) = self {
            if !(bbox.min.y <= *y && *y <= bbox.max.y) {
                return Vec::new();
            }
            return (0..=64).map(|k| pt(bbox.min.x + bbox.width() * k as f64 / 64.0, *y)).collect();
        }
        self.representative(bbox).into_iter().filter(|p| bbox.contains(*p)).collect()
    }

    /// Check that the representative leaves `bbox` at both ends and has no
    /// self-intersections.
    pub fn check_proper(&self, bbox: &BoundingBox) -> Result<()> {
        let rep = self.representative(bbox);
        if bbox.contains(rep[0]) || bbox.contains(*rep.last().unwrap()) {
            return Err(Error::InvalidInput("line does not leave the working box".into()));
        }
        if polyline_self_intersects(&rep) {
            return Err(Error::InvalidInput("line representative self-intersects".into()));
        }
        Ok(())
    }
}

/// True iff the traced representatives of the two lines come within `tol`.
pub fn lines_intersect(g1: &OrientedLine, g2: &OrientedLine, bbox: &BoundingBox, tol: f64) -> bool {
    if let (OrientedLine::HorizontalAt(a), OrientedLine::HorizontalAt(b)) = (g1, g2) {
        return (a - b).abs() < tol;
    }
    let r1 = g1.representative(bbox);
    let r2 = g2.representative(bbox);
    polyline_distance(&r1, &r2, tol) < tol
}

/// Default intersection tolerance in plane units.
pub const INTERSECT_TOL: f64 = 1e-6;

/// Winding number of a nowhere-zero field sampled along `[0, 1]`:
/// `(s̃(1) − s̃(0)) / 2π` for a continuous unwrap `s̃` of its angle.
pub fn winding_number<F>(field_along_path: F, samples: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<Vector>,
{
    let opts = UnwrapOptions { initial_samples: samples.max(2), ..UnwrapOptions::default() };
    winding_number_with(field_along_path, &opts)
}

pub fn winding_number_with<F>(mut field_along_path: F, opts: &UnwrapOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<Vector>,
{
    let unwrap = unwrap_angle_path(
        |t| {
            let v = field_along_path(t)?;
            angle_of(v).map_err(|_| Error::ZeroVector { t: Some(t) })
        },
        opts,
    )?;
    Ok((unwrap.end - unwrap.start) / TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn angle_reference_values() {
        assert_eq!(angle_of(vec2(1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(angle_of(vec2(0.0, 1.0)).unwrap(), FRAC_PI_2);
        assert!((angle_of(vec2(-1.0, -1.0)).unwrap() - 5.0 * PI / 4.0).abs() < 1e-15);
        assert_eq!(angle_of(vec2(-1.0, -0.0)).unwrap(), PI);
        assert!(matches!(angle_of(Vector::ZERO), Err(Error::ZeroVector { .. })));
    }

    #[test]
    fn winding_reference_values() {
        let w = winding_number(|_| Ok(vec2(1.0, 0.0)), 16).unwrap();
        assert_eq!(w, 0.0);
        let w = winding_number(|t| Ok(Vector::from_angle(TAU * t)), 16).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
        let w = winding_number(|t| Ok(Vector::from_angle(-3.0 * TAU * t)), 16).unwrap();
        assert!((w + 3.0).abs() < 1e-12);
    }

    #[test]
    fn winding_reports_zero_parameter() {
        let err = winding_number(|t| Ok(vec2(t - 0.5, 0.0)), 4).unwrap_err();
        assert_eq!(err, Error::ZeroVector { t: Some(0.5) });
    }

    #[test]
    fn polypath_validation_and_lookup() {
        assert!(PolyPath::new(vec![pt(0.0, 0.0)], vec![0.0]).is_err());
        assert!(PolyPath::new(vec![pt(0.0, 0.0), pt(0.0, 0.0)], vec![0.0, 1.0]).is_err());
        assert!(PolyPath::new(vec![pt(0.0, 0.0), pt(1.0, 0.0)], vec![0.0, 0.5]).is_err());
        let p = PolyPath::from_vertices(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 3.0)]).unwrap();
        assert_eq!(p.params(), &[0.0, 0.25, 1.0]);
        assert_eq!(p.at(0.625), pt(1.0, 1.5));
        let r = p.reversed();
        assert_eq!(r.start(), pt(1.0, 3.0));
        assert_eq!(r.at(0.375), pt(1.0, 1.5));
    }

    #[test]
    fn intersection_reference_cases() {
        let b = BoundingBox::working();
        let h1 = OrientedLine::HorizontalAt(1.0);
        let h2 = OrientedLine::HorizontalAt(2.0);
        assert!(!lines_intersect(&h1, &h2, &b, INTERSECT_TOL));
        assert!(lines_intersect(&h1, &OrientedLine::vertical(0.0), &b, INTERSECT_TOL));
        assert!(!lines_intersect(&OrientedLine::vertical(0.0), &OrientedLine::vertical(0.5), &b, INTERSECT_TOL));
    }

    #[test]
    fn properness_of_library_lines() {
        let b = BoundingBox::working();
        OrientedLine::HorizontalAt(1.0).check_proper(&b).unwrap();
        OrientedLine::straight(pt(0.3, -0.2), vec2(1.0, 2.0)).check_proper(&b).unwrap();
        let looped = PolyPath::from_vertices(vec![
            pt(-20.0, 0.0),
            pt(1.0, 0.0),
            pt(1.0, 1.0),
            pt(0.0, 1.0),
            pt(0.0, -1.0),
            pt(20.0, -1.0),
        ])
        .unwrap();
        assert!(OrientedLine::Traced(looped).check_proper(&b).is_err());
    }

    #[test]
    fn segment_distance_cases() {
        let d = segment_distance(pt(0.0, 0.0), pt(1.0, 0.0), pt(0.5, 0.25), pt(0.5, 2.0));
        assert!((d - 0.25).abs() < 1e-15);
        assert_eq!(segment_distance(pt(0.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0), pt(1.0, 0.0)), 0.0);
    }
}
