//! Oriented non-singular plane foliations: leaf tracing, side classification,
//! the topological angle `θ̇`, pushforward under plane homeomorphisms,
//! transversality, and the standard example families.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::integrate::rk4_step;
use crate::khalimsky::KClass;
use crate::plane::{closest_on_segment, pt, vec2, BoundingBox, OrientedLine, Point, PolyPath, Vector};

pub type FieldFn = Arc<dyn Fn(Point) -> Vector + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type MapFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;

#[derive(Clone)]
pub enum FoliationKind {
    /// Leaves are level sets of `h`, oriented by `J∇h` (J = rotation by +90°),
    /// so the left side of a leaf is where `h` is smaller.
    FirstIntegral { h: ScalarFn, grad: FieldFn },
    /// Leaves are integral curves of a unit vector field.
    UnitField(FieldFn),
}

#[derive(Clone)]
pub struct Foliation {
    kind: FoliationKind,
    label: String,
}

impl fmt::Debug for Foliation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Foliation").field("label", &self.label).finish_non_exhaustive()
    }
}

impl Foliation {
    pub fn unit_field(label: impl Into<String>, field: impl Fn(Point) -> Vector + Send + Sync + 'static) -> Self {
        Foliation { kind: FoliationKind::UnitField(Arc::new(field)), label: label.into() }
    }

    pub fn first_integral(
        label: impl Into<String>,
        h: impl Fn(Point) -> f64 + Send + Sync + 'static,
        grad: impl Fn(Point) -> Vector + Send + Sync + 'static,
    ) -> Self {
        Foliation {
            kind: FoliationKind::FirstIntegral { h: Arc::new(h), grad: Arc::new(grad) },
            label: label.into(),
        }
    }

    pub fn kind(&self) -> &FoliationKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Unit tangent of the oriented leaf through `p`.
    pub fn direction(&self, p: Point) -> Result<Vector> {
        let v = match &self.kind {
            FoliationKind::UnitField(x) => x(p),
            FoliationKind::FirstIntegral { grad, .. } => grad(p).rot90(),
        };
        v.normalized().ok_or(Error::ZeroVector { t: None })
    }

    fn direction_or_zero(&self, p: Point) -> Vector {
        self.direction(p).unwrap_or(Vector::ZERO)
    }

    /// Foliation whose leaves are the images of the leaves of `self` under `h`.
    pub fn pushforward(&self, h: &PlaneHomeo) -> Foliation {
        let base = self.clone();
        let h = h.clone();
        let label = format!("{}∘{}", h.label(), self.label);
        Foliation::unit_field(label, move |w| {
            let z = h.apply_inverse(w);
            let v = h.push_vector(z, base.direction_or_zero(z));
            v.normalized().unwrap_or(Vector::ZERO)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub step: f64,
    /// Fractional inflation of the working box before a trace counts as exited.
    pub margin: f64,
    pub max_steps: usize,
    /// Largest allowed angle between a step chord and the bisector of the end
    /// tangents.
    pub tangent_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { step: 1.0 / 128.0, margin: 0.2, max_steps: 10_000, tangent_tol: 1e-3 }
    }
}

/// A traced half-leaf starting at `base`.
#[derive(Debug, Clone)]
pub struct LeafArc {
    pub base: Point,
    pub arc: PolyPath,
    pub direction: Direction,
}

/// One RK4 step along `sign·X`, checked against two half steps: the angle
/// between the two chords must stay within `tangent_tol`.
fn traced_step(f: &Foliation, p: Point, h: f64, sign: f64, tangent_tol: f64) -> Result<Point> {
    f.direction(p)?;
    let field = |x: Point| f.direction_or_zero(x) * sign;
    let q = rk4_step(&field, p, h);
    let fine = rk4_step(&field, rk4_step(&field, p, 0.5 * h), 0.5 * h);
    let (coarse, fine) = (q - p, fine - p);
    if coarse.norm() == 0.0 || fine.norm() == 0.0 {
        return Err(Error::ZeroVector { t: None });
    }
    let deviation = coarse.cross(fine).atan2(coarse.dot(fine)).abs();
    if deviation > tangent_tol {
        return Err(Error::StepTooLarge { deviation });
    }
    Ok(q)
}

fn trace_vertices(
    f: &Foliation,
    z: Point,
    direction: Direction,
    bbox: &BoundingBox,
    opts: &TraceOptions,
) -> Result<Vec<Point>> {
    if !(opts.step > 0.0) || !z.is_finite() {
        return Err(Error::InvalidInput("trace needs a finite start and a positive step".into()));
    }
    let outer = bbox.inflated(opts.margin);
    let sign = direction.sign();
    let mut pts = vec![z];
    let mut p = z;
    for _ in 0..opts.max_steps {
        p = traced_step(f, p, opts.step, sign, opts.tangent_tol)?;
        pts.push(p);
        if !outer.contains(p) {
            return Ok(pts);
        }
    }
    Err(Error::BoxNeverExited { steps: opts.max_steps })
}

/// Integrate the leaf through `z` in `direction` until it leaves the inflated box.
pub fn leaf_trace(
    f: &Foliation,
    z: Point,
    direction: Direction,
    bbox: &BoundingBox,
    opts: &TraceOptions,
) -> Result<LeafArc> {
    let pts = trace_vertices(f, z, direction, bbox, opts)?;
    Ok(LeafArc { base: z, arc: PolyPath::from_vertices(pts)?, direction })
}

/// Position of a point relative to an oriented leaf through a base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideClass {
    OnLeafForward,
    Left,
    OnLeafBackward,
    Right,
}

impl From<SideClass> for KClass {
    fn from(s: SideClass) -> KClass {
        match s {
            SideClass::OnLeafForward => KClass::Zero,
            SideClass::Left => KClass::One,
            SideClass::OnLeafBackward => KClass::Two,
            SideClass::Right => KClass::MinusOne,
        }
    }
}

impl From<KClass> for SideClass {
    fn from(k: KClass) -> SideClass {
        match k {
            KClass::Zero => SideClass::OnLeafForward,
            KClass::One => SideClass::Left,
            KClass::Two => SideClass::OnLeafBackward,
            KClass::MinusOne => SideClass::Right,
        }
    }
}

/// The whole traced leaf through a base point, in leaf orientation.
#[derive(Debug, Clone)]
pub struct LeafChart {
    base: Point,
    vertices: Vec<Point>,
    /// Signed arc length of each vertex measured from `base`.
    arclength: Vec<f64>,
}

/// Nearest point on a traced leaf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub point: Point,
    pub distance: f64,
    /// Signed arc length from the base point (positive on the forward half).
    pub arclength: f64,
    /// Leaf tangent at the nearest point.
    pub tangent: Vector,
}

impl LeafChart {
    pub fn trace(f: &Foliation, z: Point, bbox: &BoundingBox, opts: &TraceOptions) -> Result<Self> {
        let fwd = trace_vertices(f, z, Direction::Forward, bbox, opts)?;
        let back = trace_vertices(f, z, Direction::Backward, bbox, opts)?;
        let base_index = back.len() - 1;
        let mut vertices: Vec<Point> = back.into_iter().rev().collect();
        vertices.extend_from_slice(&fwd[1..]);
        let mut arclength = vec![0.0; vertices.len()];
        for k in base_index + 1..vertices.len() {
            arclength[k] = arclength[k - 1] + vertices[k].distance(vertices[k - 1]);
        }
        for k in (0..base_index).rev() {
            arclength[k] = arclength[k + 1] - vertices[k].distance(vertices[k + 1]);
        }
        Ok(LeafChart { base: z, vertices, arclength })
    }

    pub fn base(&self) -> Point {
        self.base
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn as_line(&self) -> Result<OrientedLine> {
        Ok(OrientedLine::Traced(PolyPath::from_vertices(self.vertices.clone())?))
    }

    pub fn nearest(&self, p: Point) -> Nearest {
        let mut best = Nearest { point: self.base, distance: f64::INFINITY, arclength: 0.0, tangent: Vector::ZERO };
        for k in 0..self.vertices.len() - 1 {
            let (a, b) = (self.vertices[k], self.vertices[k + 1]);
            let (q, s) = closest_on_segment(p, a, b);
            let d = q.distance(p);
            if d < best.distance {
                best = Nearest {
                    point: q,
                    distance: d,
                    arclength: self.arclength[k] + s * (self.arclength[k + 1] - self.arclength[k]),
                    tangent: b - a,
                };
            }
        }
        best
    }

    /// Classify `p` against this leaf. Points within `tol_leaf` are on the leaf;
    /// points in `[tol_leaf, 2·tol_leaf)` are ambiguous.
    pub fn classify(&self, p: Point, tol_leaf: f64) -> Result<SideClass> {
        if p == self.base {
            return Err(Error::DiagonalPoint);
        }
        let n = self.nearest(p);
        if n.distance < tol_leaf {
            let s = if n.arclength != 0.0 { n.arclength } else { n.tangent.dot(p - self.base) };
            return Ok(if s >= 0.0 { SideClass::OnLeafForward } else { SideClass::OnLeafBackward });
        }
        if n.distance < 2.0 * tol_leaf {
            return Err(Error::AmbiguousSide { distance: n.distance });
        }
        Ok(if n.tangent.cross(p - n.point) > 0.0 { SideClass::Left } else { SideClass::Right })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaOptions {
    pub tol_leaf: f64,
    pub bbox: BoundingBox,
    pub trace: TraceOptions,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        ThetaOptions { tol_leaf: 1e-4, bbox: BoundingBox::working(), trace: TraceOptions::default() }
    }
}

/// Topological angle `θ̇(z, z′, F)`: `0̇` forward on the leaf of `z`, `1̇` on its
/// left, `2̇` backward on it, `-1̇` on its right.
pub fn theta_dot(f: &Foliation, z: Point, zp: Point, opts: &ThetaOptions) -> Result<KClass> {
    if z == zp {
        return Err(Error::DiagonalPoint);
    }
    if let FoliationKind::FirstIntegral { h, .. } = &f.kind {
        let dh = h(zp) - h(z);
        if dh.abs() >= 2.0 * opts.tol_leaf {
            return Ok(if dh < 0.0 { KClass::One } else { KClass::MinusOne });
        }
        if dh.abs() >= opts.tol_leaf {
            return Err(Error::AmbiguousSide { distance: dh.abs() });
        }
    }
    let bbox = opts.bbox.including(z).including(zp).expanded(1.0);
    let chart = LeafChart::trace(f, z, &bbox, &opts.trace)?;
    Ok(chart.classify(zp, opts.tol_leaf)?.into())
}

/// The point at arc length `eps` along the forward leaf through `z`.
pub fn forward_on_leaf(f: &Foliation, z: Point, eps: f64, opts: &TraceOptions) -> Result<Point> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("leaf push needs eps > 0, got {eps}")));
    }
    let n = (eps / opts.step).ceil().max(1.0) as usize;
    let h = eps / n as f64;
    let mut p = z;
    for _ in 0..n {
        p = traced_step(f, p, h, 1.0, opts.tangent_tol)?;
    }
    Ok(p)
}

/// Vertices of the forward leaf through `z` at arc lengths `0, step, 2·step, …`,
/// ending with the point at exactly `length`.
pub fn forward_arc(f: &Foliation, z: Point, length: f64, opts: &TraceOptions) -> Result<Vec<Point>> {
    if !(length >= 0.0) || !length.is_finite() {
        return Err(Error::InvalidInput(format!("arc length {length} must be finite and nonnegative")));
    }
    let full = (length / opts.step).floor() as usize;
    let mut pts = Vec::with_capacity(full + 2);
    pts.push(z);
    let mut p = z;
    for _ in 0..full {
        p = traced_step(f, p, opts.step, 1.0, opts.tangent_tol)?;
        pts.push(p);
    }
    let rest = length - full as f64 * opts.step;
    if rest > 0.0 {
        pts.push(traced_step(f, p, rest, 1.0, opts.tangent_tol)?);
    }
    Ok(pts)
}

pub type JacobianFn = Arc<dyn Fn(Point) -> [[f64; 2]; 2] + Send + Sync>;

/// An orientation-preserving plane homeomorphism given with its inverse.
#[derive(Clone)]
pub struct PlaneHomeo {
    forward: MapFn,
    inverse: MapFn,
    jacobian: Option<JacobianFn>,
    label: String,
}

impl fmt::Debug for PlaneHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlaneHomeo({})", self.label)
    }
}

const JACOBIAN_STEP: f64 = 1e-6;

impl PlaneHomeo {
    pub fn from_fns(
        label: impl Into<String>,
        forward: impl Fn(Point) -> Point + Send + Sync + 'static,
        inverse: impl Fn(Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        PlaneHomeo { forward: Arc::new(forward), inverse: Arc::new(inverse), jacobian: None, label: label.into() }
    }

    pub fn identity() -> Self {
        PlaneHomeo::affine("identity", [[1.0, 0.0], [0.0, 1.0]], vec2(0.0, 0.0)).unwrap()
    }

    /// `p ↦ M·p + offset` with `det M > 0`.
    pub fn affine(label: impl Into<String>, m: [[f64; 2]; 2], offset: Vector) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(det > 0.0) {
            return Err(Error::InvalidInput(format!("affine map with det {det} is not orientation preserving")));
        }
        let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
        let fwd = move |p: Point| pt(m[0][0] * p.x + m[0][1] * p.y + offset.dx, m[1][0] * p.x + m[1][1] * p.y + offset.dy);
        let back = move |p: Point| {
            let (x, y) = (p.x - offset.dx, p.y - offset.dy);
            pt(inv[0][0] * x + inv[0][1] * y, inv[1][0] * x + inv[1][1] * y)
        };
        Ok(PlaneHomeo {
            forward: Arc::new(fwd),
            inverse: Arc::new(back),
            jacobian: Some(Arc::new(move |_| m)),
            label: label.into(),
        })
    }

    pub fn translation(shift: Vector) -> Self {
        PlaneHomeo::affine(format!("translate({},{})", shift.dx, shift.dy), [[1.0, 0.0], [0.0, 1.0]], shift).unwrap()
    }

    /// `(x, y) ↦ (x + c·y, y)`; preserves every horizontal line.
    pub fn shear(c: f64) -> Self {
        PlaneHomeo::affine(format!("shear({c})"), [[1.0, c], [0.0, 1.0]], Vector::ZERO).unwrap()
    }

    /// Rotation by `angle` about `center`.
    pub fn rotation(center: Point, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let m = [[c, -s], [s, c]];
        let offset = vec2(center.x - (c * center.x - s * center.y), center.y - (s * center.x + c * center.y));
        PlaneHomeo::affine(format!("rotate({angle})"), m, offset).unwrap()
    }

    /// `(x, y) ↦ (x, y + c·sin(πy)/(1 + x²))` for `|c|·π < 1`: bends the plane
    /// vertically while fixing every integer row pointwise.
    pub fn strip_bend(c: f64) -> Result<Self> {
        if !(c.abs() * PI < 1.0) {
            return Err(Error::InvalidInput(format!("strip bend amplitude {c} is not invertible")));
        }
        let bump = |x: f64| 1.0 / (1.0 + x * x);
        let forward = move |p: Point| pt(p.x, p.y + c * bump(p.x) * (PI * p.y).sin());
        let inverse = move |p: Point| {
            // y ↦ y + a·sin(πy) is increasing: safeguarded Newton inside a bracket.
            let a = c * bump(p.x);
            let g = |y: f64| y + a * (PI * y).sin() - p.y;
            let (mut lo, mut hi) = (p.y - a.abs() - 1e-12, p.y + a.abs() + 1e-12);
            let mut y = p.y;
            for _ in 0..100 {
                let v = g(y);
                if v == 0.0 {
                    return pt(p.x, y);
                }
                if v < 0.0 {
                    lo = y;
                } else {
                    hi = y;
                }
                let next = y - v / (1.0 + a * PI * (PI * y).cos());
                let next = if lo < next && next < hi { next } else { 0.5 * (lo + hi) };
                if next == y || hi - lo <= f64::EPSILON * y.abs().max(1.0) {
                    break;
                }
                y = next;
            }
            pt(p.x, y)
        };
        let jacobian = move |p: Point| {
            let b = bump(p.x);
            let db = -2.0 * p.x * b * b;
            [[1.0, 0.0], [c * db * (PI * p.y).sin(), 1.0 + c * b * PI * (PI * p.y).cos()]]
        };
        Ok(PlaneHomeo {
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            jacobian: Some(Arc::new(jacobian)),
            label: format!("strip_bend({c})"),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, p: Point) -> Point {
        (self.forward)(p)
    }

    pub fn apply_inverse(&self, p: Point) -> Point {
        (self.inverse)(p)
    }

    pub fn jacobian(&self, p: Point) -> [[f64; 2]; 2] {
        if let Some(j) = &self.jacobian {
            return j(p);
        }
        let h = JACOBIAN_STEP * (1.0 + p.x.abs().max(p.y.abs()));
        let dx = (self.apply(p + vec2(h, 0.0)) - self.apply(p - vec2(h, 0.0))) * (0.5 / h);
        let dy = (self.apply(p + vec2(0.0, h)) - self.apply(p - vec2(0.0, h))) * (0.5 / h);
        [[dx.dx, dy.dx], [dx.dy, dy.dy]]
    }

    /// Differential `Dh(p)·v`.
    pub fn push_vector(&self, p: Point, v: Vector) -> Vector {
        let m = self.jacobian(p);
        vec2(m[0][0] * v.dx + m[0][1] * v.dy, m[1][0] * v.dx + m[1][1] * v.dy)
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &PlaneHomeo) -> PlaneHomeo {
        let (f1, f2) = (self.forward.clone(), other.forward.clone());
        let (i1, i2) = (self.inverse.clone(), other.inverse.clone());
        PlaneHomeo::from_fns(
            format!("{}∘{}", self.label, other.label),
            move |p| f1(f2(p)),
            move |p| i2(i1(p)),
        )
    }

    fn grid(bbox: &BoundingBox, n: usize) -> impl Iterator<Item = Point> + '_ {
        let n = n.max(2);
        (0..n).flat_map(move |i| {
            (0..n).map(move |j| {
                pt(
                    bbox.min.x + bbox.width() * i as f64 / (n - 1) as f64,
                    bbox.min.y + bbox.height() * j as f64 / (n - 1) as f64,
                )
            })
        })
    }

    /// `forward ∘ inverse = id` (and the reverse) within `tol` on an `n × n` grid.
    pub fn check_inverse(&self, bbox: &BoundingBox, n: usize, tol: f64) -> Result<()> {
        for p in Self::grid(bbox, n) {
            let e1 = self.apply(self.apply_inverse(p)).distance(p);
            let e2 = self.apply_inverse(self.apply(p)).distance(p);
            if e1.max(e2) > tol || !e1.is_finite() || !e2.is_finite() {
                return Err(Error::InvalidInput(format!("{} is not inverted at {p} (error {})", self.label, e1.max(e2))));
            }
        }
        Ok(())
    }

    /// Small positively oriented triangles stay positively oriented.
    pub fn check_orientation(&self, bbox: &BoundingBox, n: usize) -> Result<()> {
        let d = 1e-3;
        for p in Self::grid(bbox, n) {
            let a = self.apply(p);
            let b = self.apply(p + vec2(d, 0.0));
            let c = self.apply(p + vec2(0.0, d));
            if !((b - a).cross(c - a) > 0.0) {
                return Err(Error::InvalidInput(format!("{} reverses orientation near {p}", self.label)));
            }
        }
        Ok(())
    }
}

/// `θ̇` of the pushforward foliation `hF`, evaluated through `h⁻¹`.
pub fn pushforward_theta(f: &Foliation, h: &PlaneHomeo, w: Point, wp: Point, opts: &ThetaOptions) -> Result<KClass> {
    if w == wp {
        return Err(Error::DiagonalPoint);
    }
    theta_dot(f, h.apply_inverse(w), h.apply_inverse(wp), opts)
}

/// `cross(X(γ), γ′) > 0` at every vertex of the sampled path.
pub fn is_positively_transverse(f: &Foliation, path: &PolyPath) -> Result<bool> {
    let v = path.vertices();
    for k in 0..v.len() {
        let tangent = if k + 1 < v.len() { v[k + 1] - v[k] } else { v[k] - v[k - 1] };
        if tangent.norm() == 0.0 {
            return Err(Error::ZeroTangent(k));
        }
        if !(f.direction(v[k])?.cross(tangent) > 0.0) {
            return Ok(false);
        }
        if k + 1 < v.len() && !(f.direction(v[k + 1])?.cross(tangent) > 0.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Foliation by integral curves of `−J·X`, which every flow line of `X` crosses
/// positively (`cross(−JX, X) = |X|²`).
pub fn orthogonal_foliation(x: FieldFn, label: impl Into<String>) -> Foliation {
    Foliation::unit_field(label, move |p| {
        let v = x(p);
        vec2(v.dy, -v.dx)
    })
}

/// The traced integral curve of the unit field `x` through `z`.
pub fn flow_line(x: FieldFn, z: Point, bbox: &BoundingBox, opts: &TraceOptions) -> Result<OrientedLine> {
    let f = Foliation { kind: FoliationKind::UnitField(x), label: "flow".into() };
    LeafChart::trace(&f, z, bbox, opts)?.as_line()
}

/// Horizontal foliation with leaves oriented toward `+x`.
pub fn horizontal() -> Foliation {
    Foliation::unit_field("horizontal", |_| vec2(1.0, 0.0))
}

/// Width of the flat collars at each edge of the spiral band.
pub const BAND_COLLAR: f64 = 0.1;

/// Unit field `X_n = (cos θ_n(y), sin θ_n(y))` turning by `nπ` across the band
/// `1 < y < 2`: `θ_n = 0` below `1 + BAND_COLLAR`, `nπ` above `2 − BAND_COLLAR`,
/// and a smoothstep ramp in between. Its index between the rows `y = 1` and
/// `y = 2` is `n/2`; `n = 1` is the Reeb model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandSpiral {
    pub n: i64,
}

impl BandSpiral {
    pub fn new(n: i64) -> Self {
        BandSpiral { n }
    }

    fn ramp(s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        s * s * (3.0 - 2.0 * s)
    }

    fn ramp_position(y: f64) -> f64 {
        (y - 1.0 - BAND_COLLAR) / (1.0 - 2.0 * BAND_COLLAR)
    }

    pub fn theta(&self, y: f64) -> f64 {
        self.n as f64 * PI * Self::ramp(Self::ramp_position(y))
    }

    pub fn vector_at(&self, p: Point) -> Vector {
        Vector::from_angle(self.theta(p.y))
    }

    pub fn field(&self) -> FieldFn {
        let s = *self;
        Arc::new(move |p| s.vector_at(p))
    }

    /// Foliation by the flow lines of `X_n`.
    pub fn foliation(&self) -> Foliation {
        let s = *self;
        Foliation::unit_field(format!("band_spiral({})", self.n), move |p| s.vector_at(p))
    }

    /// Transverse foliation by integral curves of `−J·X_n`.
    pub fn orthogonal(&self) -> Foliation {
        orthogonal_foliation(self.field(), format!("orthogonal(band_spiral({}))", self.n))
    }

    /// Heights strictly inside the band where `X_n` is vertical; the orthogonal
    /// foliation has a horizontal leaf there.
    pub fn barrier_levels(&self) -> Vec<f64> {
        let m = self.n.unsigned_abs();
        (0..m)
            .map(|k| {
                let target = (k as f64 + 0.5) / m as f64;
                let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if Self::ramp(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                1.0 + BAND_COLLAR + 0.5 * (lo + hi) * (1.0 - 2.0 * BAND_COLLAR)
            })
            .collect()
    }
}

/// Pairs `(z_k, z_k′)` on a common leaf, `z_k′` forward of `z_k`, converging to a
/// pair on different leaves. Built from the U-shaped leaves of the Reeb band.
#[derive(Debug, Clone)]
pub struct DiscontinuityWitness {
    pub pairs: Vec<(Point, Point)>,
    pub limit: (Point, Point),
}

/// Witness that `θ̇` is not continuous for the Reeb model `band_spiral(1)`:
/// basepoints slide down toward the lower collar and their leaves return across
/// `x = 0` near the upper collar.
pub fn reeb_discontinuity_witness(offsets: &[f64], opts: &TraceOptions) -> Result<DiscontinuityWitness> {
    let f = BandSpiral::new(1).foliation();
    let low = 1.0 + BAND_COLLAR;
    let high = 2.0 - BAND_COLLAR;
    let bbox = BoundingBox::new(pt(-10.0, 0.0), pt(1e4, 3.0));
    let mut pairs = Vec::with_capacity(offsets.len());
    for &delta in offsets {
        let z = pt(0.0, low + delta);
        let arc = trace_vertices(&f, z, Direction::Forward, &bbox, opts)?;
        let crossing = arc
            .windows(2)
            .find(|w| w[0].y > 1.5 && w[0].x > 0.0 && w[1].x <= 0.0)
            .map(|w| w[0].lerp(w[1], w[0].x / (w[0].x - w[1].x)))
            .ok_or_else(|| Error::InvalidInput(format!("leaf from {z} never returned to x = 0")))?;
        pairs.push((z, crossing));
    }
    Ok(DiscontinuityWitness { pairs, limit: (pt(0.0, low), pt(0.0, high)) })
}
