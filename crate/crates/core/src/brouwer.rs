//! Brouwer homeomorphisms: explicit maps, time-one maps of unit flows and
//! compactly supported perturbations, with orbits, sampled fixed-point-freeness
//! and Brouwer-line checks.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::foliation::{BandSpiral, FieldFn, Foliation, LeafChart, MapFn, PlaneHomeo, SideClass, TraceOptions};
use crate::integrate::flow_for;
use crate::plane::{pt, vec2, BoundingBox, Point, Vector};

/// Default flow integration step.
pub const DEFAULT_FLOW_STEP: f64 = 1.0 / 64.0;
/// Displacements shorter than this count as suspected fixed points.
pub const DEFAULT_TOL_FIX: f64 = 1e-3;

/// Radial displacement bump `w ↦ w + v·ρ(|w − c|/R)` with `ρ(r) = (1 − r²)²`
/// on the disk and zero outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: Point,
    pub radius: f64,
    pub vector: Vector,
}

/// `max |ρ′|` for the bump profile, attained at `r = 1/√3`.
const PROFILE_LIPSCHITZ: f64 = 1.5396;

impl Bump {
    fn profile(&self, w: Point) -> f64 {
        let r = w.distance(self.center) / self.radius;
        if r >= 1.0 {
            0.0
        } else {
            let s = 1.0 - r * r;
            s * s
        }
    }

    pub fn scaled(&self, s: f64) -> Bump {
        Bump { vector: self.vector * s, ..*self }
    }

    /// The bump is a homeomorphism when its displacement is a contraction.
    pub fn is_invertible(&self) -> bool {
        self.radius > 0.0 && self.vector.norm() * PROFILE_LIPSCHITZ < 0.9 * self.radius
    }

    pub fn apply(&self, w: Point) -> Point {
        w + self.vector * self.profile(w)
    }

    pub fn apply_inverse(&self, w: Point) -> Point {
        let mut u = w;
        for _ in 0..500 {
            let next = w - self.vector * self.profile(u);
            if next.distance(u) <= 1e-16 {
                return next;
            }
            u = next;
        }
        u
    }
}

#[derive(Clone)]
pub enum BrouwerMap {
    Explicit { forward: MapFn, inverse: MapFn, label: String },
    FlowTimeOne { field: FieldFn, step: f64, label: String },
    /// `bump ∘ base`.
    Perturbed { base: Arc<BrouwerMap>, bump: Bump },
}

impl fmt::Debug for BrouwerMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BrouwerMap({})", self.label())
    }
}

impl BrouwerMap {
    pub fn explicit(
        label: impl Into<String>,
        forward: impl Fn(Point) -> Point + Send + Sync + 'static,
        inverse: impl Fn(Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        BrouwerMap::Explicit { forward: Arc::new(forward), inverse: Arc::new(inverse), label: label.into() }
    }

    pub fn label(&self) -> String {
        match self {
            BrouwerMap::Explicit { label, .. } | BrouwerMap::FlowTimeOne { label, .. } => label.clone(),
            BrouwerMap::Perturbed { base, bump } => format!("bump@{}∘{}", bump.center, base.label()),
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        match self {
            BrouwerMap::Explicit { forward, .. } => forward(p),
            BrouwerMap::FlowTimeOne { field, step, .. } => flow_for(&|q| field(q), p, 1.0, *step),
            BrouwerMap::Perturbed { base, bump } => bump.apply(base.apply(p)),
        }
    }

    pub fn apply_inverse(&self, p: Point) -> Point {
        match self {
            BrouwerMap::Explicit { inverse, .. } => inverse(p),
            BrouwerMap::FlowTimeOne { field, step, .. } => flow_for(&|q| field(q), p, -1.0, *step),
            BrouwerMap::Perturbed { base, bump } => base.apply_inverse(bump.apply_inverse(p)),
        }
    }

    /// `f^n(p)` for any integer `n`.
    pub fn iterate(&self, p: Point, n: i64) -> Point {
        let mut q = p;
        for _ in 0..n.unsigned_abs() {
            q = if n > 0 { self.apply(q) } else { self.apply_inverse(q) };
        }
        q
    }

    /// `h ∘ f ∘ h⁻¹`.
    pub fn conjugate(&self, h: &PlaneHomeo) -> BrouwerMap {
        let (f1, h1) = (self.clone(), h.clone());
        let (f2, h2) = (self.clone(), h.clone());
        BrouwerMap::explicit(
            format!("{}∘{}∘{}⁻¹", h.label(), self.label(), h.label()),
            move |p| h1.apply(f1.apply(h1.apply_inverse(p))),
            move |p| h2.apply(f2.apply_inverse(h2.apply_inverse(p))),
        )
    }

    /// Sampled certification on an `n × n` grid of `bbox`: no displacement shorter
    /// than `tol_fix`, `f(f⁻¹(p))` within `tol_inverse` of `p`, and for explicit
    /// maps small triangles keep their orientation. Flow maps have Jacobian
    /// `exp ∫ div X > 0` and bumps are contractive perturbations of the identity,
    /// so both preserve orientation by construction.
    pub fn verify(&self, bbox: &BoundingBox, n: usize, tol_fix: f64, tol_inverse: f64) -> Result<()> {
        let n = n.max(2);
        let d = 1e-4;
        for i in 0..n {
            for j in 0..n {
                let p = pt(
                    bbox.min.x + bbox.width() * i as f64 / (n - 1) as f64,
                    bbox.min.y + bbox.height() * j as f64 / (n - 1) as f64,
                );
                let fp = self.apply(p);
                displacement_at(p, fp, tol_fix)?;
                let back = self.apply(self.apply_inverse(p)).distance(p);
                if !(back <= tol_inverse) {
                    return Err(Error::InvalidInput(format!("{} is not inverted at {p} (error {back})", self.label())));
                }
                if !matches!(self, BrouwerMap::Explicit { .. }) {
                    continue;
                }
                let (a, b) = (self.apply(p + vec2(d, 0.0)), self.apply(p + vec2(0.0, d)));
                if !((a - fp).cross(b - fp) > 0.0) {
                    return Err(Error::InvalidInput(format!("{} reverses orientation near {p}", self.label())));
                }
            }
        }
        Ok(())
    }
}

/// The horizontal translation `T(x, y) = (x + 1, y)`.
pub fn translation_t() -> BrouwerMap {
    BrouwerMap::explicit("T", |p| pt(p.x + 1.0, p.y), |p| pt(p.x - 1.0, p.y))
}

/// Time-one map of a unit field by fixed-step RK4; the inverse integrates
/// backward in time.
pub fn flow_time_one(field: FieldFn, step: f64, label: impl Into<String>) -> Result<BrouwerMap> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidInput(format!("flow step {step} must lie in (0, 1]")));
    }
    Ok(BrouwerMap::FlowTimeOne { field, step, label: label.into() })
}

/// Time-one map of the Reeb band model `band_spiral(1)`.
pub fn reeb_r() -> BrouwerMap {
    flow_time_one(BandSpiral::new(1).field(), DEFAULT_FLOW_STEP, "R").unwrap()
}

fn displacement_at(p: Point, fp: Point, tol_fix: f64) -> Result<Vector> {
    let v = fp - p;
    let d = v.norm();
    if !(d >= tol_fix) {
        return Err(Error::FixedPointSuspected { at: p, displacement: d });
    }
    Ok(v)
}

/// `f(z) − z`.
pub fn displacement(f: &BrouwerMap, z: Point, tol_fix: f64) -> Result<Vector> {
    displacement_at(z, f.apply(z), tol_fix)
}

/// Iterates `f^n(seed)` for `n_min ≤ n ≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    seed: Point,
    n_min: i64,
    points: Vec<Point>,
}

impl Orbit {
    pub fn seed(&self) -> Point {
        self.seed
    }

    pub fn range(&self) -> (i64, i64) {
        (self.n_min, self.n_min + self.points.len() as i64 - 1)
    }

    pub fn get(&self, n: i64) -> Option<Point> {
        usize::try_from(n - self.n_min).ok().and_then(|k| self.points.get(k)).copied()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }
}

/// Cap on iterations spent confirming that an orbit leaves the box.
const ESCAPE_CAP: usize = 10_000;

/// Cached iterates of `seed`, after checking that consecutive iterates are
/// distinct and that the orbit leaves `bbox` in both time directions.
pub fn orbit(f: &BrouwerMap, seed: Point, n_min: i64, n_max: i64, bbox: &BoundingBox, tol_fix: f64) -> Result<Orbit> {
    if n_min > n_max {
        return Err(Error::InvalidInput(format!("empty orbit range {n_min}..={n_max}")));
    }
    let mut points = vec![f.iterate(seed, n_min)];
    for _ in n_min..n_max {
        let p = *points.last().unwrap();
        let q = f.apply(p);
        displacement_at(p, q, tol_fix)?;
        points.push(q);
    }
    for forward in [true, false] {
        let mut p = seed;
        let mut escaped = false;
        for _ in 0..ESCAPE_CAP {
            let q = if forward { f.apply(p) } else { f.apply_inverse(p) };
            displacement_at(p, q, tol_fix)?;
            p = q;
            if !bbox.contains(p) {
                escaped = true;
                break;
            }
        }
        if !escaped {
            return Err(Error::NonEscaping { seed });
        }
    }
    Ok(Orbit { seed, n_min, points })
}

/// Offset used for off-leaf samples in [`brouwer_line_check`].
pub const LINE_CHECK_OFFSET: f64 = 0.05;

/// Checks `f(L(λ)) ⊂ L(λ)` and `f⁻¹(R(λ)) ⊂ R(λ)` for the leaf `λ` through
/// `leaf_seed` on `n_samples` points: points of the leaf itself and points offset
/// to either side of it, at least 2 units inside `bbox`.
pub fn brouwer_line_check(
    f: &BrouwerMap,
    fol: &Foliation,
    leaf_seed: Point,
    bbox: &BoundingBox,
    n_samples: usize,
    tol_leaf: f64,
    opts: &TraceOptions,
) -> Result<bool> {
    let chart = LeafChart::trace(fol, leaf_seed, bbox, opts)?;
    let inner = bbox.expanded(-2.0);
    let verts: Vec<Point> = chart.vertices().iter().copied().filter(|p| inner.contains(*p)).collect();
    if verts.len() < 2 {
        return Err(Error::InvalidInput(format!("leaf through {leaf_seed} barely meets the inner box")));
    }
    let left_of = |p: Point| -> Result<bool> {
        match chart.classify(p, tol_leaf) {
            Ok(SideClass::Left) => Ok(true),
            Ok(_) => Ok(false),
            Err(Error::DiagonalPoint) => Ok(false),
            Err(e) => Err(e),
        }
    };
    let right_of = |p: Point| -> Result<bool> {
        match chart.classify(p, tol_leaf) {
            Ok(SideClass::Right) => Ok(true),
            Ok(_) => Ok(false),
            Err(Error::DiagonalPoint) => Ok(false),
            Err(e) => Err(e),
        }
    };
    for k in 0..n_samples {
        let w = verts[k * (verts.len() - 1) / n_samples.saturating_sub(1).max(1)];
        let normal = fol.direction(w)?.rot90();
        let ok = match k % 3 {
            0 => left_of(f.apply(w))? && right_of(f.apply_inverse(w))?,
            1 => left_of(f.apply(w + normal * LINE_CHECK_OFFSET))?,
            _ => right_of(f.apply_inverse(w - normal * LINE_CHECK_OFFSET))?,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fixed-point check around a bump: a fixed point of `bump ∘ f` must have its
/// `f`-image inside the disk, so it is enough to sample `f⁻¹` of the disk. Short
/// displacements and displacement directions that swing by more than a quarter
/// turn between neighbouring samples are both reported.
fn check_bump_fixed_points(f: &BrouwerMap, bump: &Bump, tol_fix: f64) -> Result<()> {
    let (radii, angles) = (24usize, 48usize);
    let mut rows: Vec<Vec<(Point, Vector)>> = Vec::with_capacity(radii + 1);
    for i in 0..=radii {
        let r = bump.radius * i as f64 / radii as f64;
        let mut row = Vec::with_capacity(angles);
        for j in 0..angles {
            let a = std::f64::consts::TAU * j as f64 / angles as f64;
            let w = pt(bump.center.x + r * a.cos(), bump.center.y + r * a.sin());
            let z = f.apply_inverse(w);
            row.push((z, displacement_at(z, bump.apply(w), tol_fix)?));
        }
        rows.push(row);
    }
    let swing = |(za, da): (Point, Vector), (zb, db): (Point, Vector)| -> Result<()> {
        if da.dot(db) < 0.0 {
            return Err(Error::FixedPointSuspected { at: za.lerp(zb, 0.5), displacement: da.norm().min(db.norm()) });
        }
        Ok(())
    };
    for i in 0..=radii {
        for j in 0..angles {
            swing(rows[i][j], rows[i][(j + 1) % angles])?;
            if i < radii {
                swing(rows[i][j], rows[i + 1][j])?;
            }
        }
    }
    Ok(())
}

/// Isotopy parameters checked by [`perturb_rel_orbits`].
pub const ISOTOPY_PARAMETERS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// `bump ∘ f`, after checking that the bump disk keeps clear of every protected
/// orbit point and that `bump_s ∘ f` is fixed-point free for every sampled
/// isotopy parameter `s`.
pub fn perturb_rel_orbits(
    f: &BrouwerMap,
    bump: Bump,
    protected: &[Orbit],
    bbox: &BoundingBox,
    tol_fix: f64,
) -> Result<BrouwerMap> {
    if !bump.is_invertible() {
        return Err(Error::InvalidInput(format!("bump {bump:?} is not invertible")));
    }
    const MARGIN: f64 = 0.05;
    for o in protected {
        if let Some(p) = o.points().iter().find(|p| p.distance(bump.center) < bump.radius + MARGIN) {
            return Err(Error::OrbitTouched(*p));
        }
    }
    for s in ISOTOPY_PARAMETERS {
        let b = bump.scaled(s);
        check_bump_fixed_points(f, &b, tol_fix)?;
        let g = BrouwerMap::Perturbed { base: Arc::new(f.clone()), bump: b };
        let n = 17;
        for i in 0..n {
            for j in 0..n {
                let p = pt(
                    bbox.min.x + bbox.width() * i as f64 / (n - 1) as f64,
                    bbox.min.y + bbox.height() * j as f64 / (n - 1) as f64,
                );
                displacement(&g, p, tol_fix)?;
            }
        }
    }
    Ok(BrouwerMap::Perturbed { base: Arc::new(f.clone()), bump })
}
