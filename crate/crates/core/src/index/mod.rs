//! The three planar indices in exact quarter-turn arithmetic: the winding index
//! of a flow between two leaves, the Le Roux index of a Brouwer homeomorphism
//! between two orbits, and the foliation index between two transverse lines.

mod scenario;
mod witness;

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::brouwer::BrouwerMap;
use crate::error::{Error, Result};
use crate::foliation::{forward_on_leaf, is_positively_transverse, FieldFn, Foliation, PlaneHomeo, TraceOptions};
use crate::khalimsky::{
    lift_angle_path, lift_sequence, sample_class_path, sigma, sigma_tilde, EndpointRule, LiftOptions, UnwrapOptions,
};
use crate::plane::{
    angle_of, lines_intersect, winding_number_with, wrap_pi, BoundingBox, OrientedLine, Point, PolyPath, Vector,
};

pub use scenario::{
    evaluate, theorem_a_check, ChoiceReport, FamilySpec, LineSpec, MapSpec, Numerics, PathSpec, Scenario, ScenarioParts,
    TheoremReport, WitnessSpec,
};
pub use witness::{HandelWitness, Justification, StrMap, ROW_TOL};

/// A half-integer index stored as an integer number of quarter turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexValue {
    quarters: i64,
}

impl IndexValue {
    pub const ZERO: IndexValue = IndexValue { quarters: 0 };

    /// Fails with `ParityViolation` on an odd quarter count.
    pub fn from_quarters(quarters: i64) -> Result<Self> {
        if quarters % 2 != 0 {
            return Err(Error::ParityViolation(quarters));
        }
        Ok(IndexValue { quarters })
    }

    pub fn from_halves(halves: i64) -> Self {
        IndexValue { quarters: 2 * halves }
    }

    pub fn quarters(self) -> i64 {
        self.quarters
    }

    pub fn halves(self) -> i64 {
        self.quarters / 2
    }

    pub fn as_f64(self) -> f64 {
        self.quarters as f64 / 4.0
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.halves())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Ph,
    Leroux,
    Foliation,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ph, Method::Leroux, Method::Foliation];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ph => "ph",
            Method::Leroux => "leroux",
            Method::Foliation => "foliation",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown method {s:?} (expected ph, leroux or foliation)")))
    }
}

/// One computed index with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub method: Method,
    pub value: IndexValue,
    /// Continuous winding of the same field, in turns.
    pub float_oracle: f64,
    pub samples_used: usize,
    pub refinement_depth: usize,
    /// Set when the value comes from a convention rather than a computation.
    pub reason: Option<String>,
}

fn lift_options(unwrap: UnwrapOptions, tol_snap: f64, endpoints: EndpointRule) -> LiftOptions {
    LiftOptions { unwrap, tol_snap, endpoints }
}

fn angle_at(v: Vector, t: f64) -> Result<f64> {
    angle_of(v).map_err(|_| Error::ZeroVector { t: Some(t) })
}

/// Winding index of the unit field `x` between two of its leaves joined by
/// `path`, after straightening the leaves by `h`: the lift difference of the
/// angle of `Dh·X` along `path`. The pushed field must be horizontal at both
/// endpoints.
pub fn poincare_hopf_index(
    x: &FieldFn,
    h: &PlaneHomeo,
    path: &PolyPath,
    unwrap: UnwrapOptions,
    tol_snap: f64,
) -> Result<MethodResult> {
    let lift = lift_angle_path(
        |t| {
            let p = path.at(t);
            angle_at(h.push_vector(p, x(p)), t)
        },
        &lift_options(unwrap, tol_snap, EndpointRule::RequireAxis),
    )?;
    let value = IndexValue::from_quarters(lift.difference())?;
    Ok(MethodResult {
        method: Method::Ph,
        value,
        float_oracle: (lift.unwrap.end - lift.unwrap.start) / TAU,
        samples_used: lift.unwrap.samples,
        refinement_depth: lift.unwrap.depth,
        reason: None,
    })
}

/// Le Roux index of `f` between the orbits normalized by `witness`: the lift
/// difference of the angle of `h(f(α(t))) − h(α(t))` for a path `α` whose
/// image under `h` runs from `ℤ×{1}` to `ℤ×{2}`.
pub fn leroux_index_via_theta(
    f: &BrouwerMap,
    witness: &HandelWitness,
    path: &PolyPath,
    unwrap: UnwrapOptions,
    tol_snap: f64,
    tol_fix: f64,
) -> Result<MethodResult> {
    let h = witness.homeo();
    witness.check_lattice_point(h.apply(path.start()), 1)?;
    witness.check_lattice_point(h.apply(path.end()), 2)?;
    let lift = lift_angle_path(
        |t| {
            let p = path.at(t);
            let v = h.apply(f.apply(p)) - h.apply(p);
            if !(v.norm() >= tol_fix) {
                return Err(Error::FixedPointSuspected { at: p, displacement: v.norm() });
            }
            angle_at(v, t)
        },
        &lift_options(unwrap, tol_snap, EndpointRule::RequireAxis),
    )?;
    let value = IndexValue::from_quarters(lift.difference())?;
    Ok(MethodResult {
        method: Method::Leroux,
        value,
        float_oracle: (lift.unwrap.end - lift.unwrap.start) / TAU,
        samples_used: lift.unwrap.samples,
        refinement_depth: lift.unwrap.depth,
        reason: None,
    })
}

/// Inputs shared by [`foliation_index`] and [`intuitive_index_float`].
#[derive(Debug, Clone)]
pub struct FoliationIndexInput<'a> {
    pub foliation: &'a Foliation,
    pub lines: (&'a OrientedLine, &'a OrientedLine),
    pub str_map: &'a StrMap,
    /// Push lengths along the leaves at the start and end of `path`; the length
    /// is interpolated linearly in between.
    pub eps: (f64, f64),
    pub path: &'a PolyPath,
    pub bbox: BoundingBox,
    pub trace: TraceOptions,
}

impl FoliationIndexInput<'_> {
    fn eps_at(&self, t: f64) -> f64 {
        self.eps.0 + (self.eps.1 - self.eps.0) * t
    }

    /// `h(α′(t)) − h(α(t))` with `α′(t)` pushed forward along the leaf.
    fn pair_vector(&self, t: f64) -> Result<Vector> {
        let p = self.path.at(t);
        let q = forward_on_leaf(self.foliation, p, self.eps_at(t), &self.trace)?;
        let h = &self.str_map.h;
        Ok(h.apply(q) - h.apply(p))
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps.0 > 0.0 && self.eps.1 > 0.0) {
            return Err(Error::InvalidInput("push lengths must be positive".into()));
        }
        for line in [self.lines.0, self.lines.1] {
            let rep: Vec<Point> = line.samples_in(&self.bbox);
            if rep.len() < 2 {
                return Err(Error::InvalidInput("line misses the working box".into()));
            }
            if !is_positively_transverse(self.foliation, &PolyPath::from_vertices(rep)?)? {
                return Err(Error::NotTransverse);
            }
        }
        let h = &self.str_map.h;
        for (p, row) in [(self.path.start(), 1.0), (self.path.end(), 2.0)] {
            let w = h.apply(p);
            if !((w.y - row).abs() <= ROW_TOL) {
                return Err(Error::InvalidInput(format!("path endpoint {p} maps to {w}, off the row y = {row}")));
            }
        }
        Ok(())
    }
}

/// Foliation index between two positively transverse lines: zero if they meet,
/// otherwise a quarter of the lift difference of the pair field
/// `h(α′) − h(α)`, whose endpoint classes must be odd.
pub fn foliation_index(input: &FoliationIndexInput<'_>, unwrap: UnwrapOptions, tol_snap: f64) -> Result<MethodResult> {
    if lines_intersect(input.lines.0, input.lines.1, &input.bbox, crate::plane::INTERSECT_TOL) {
        return Ok(MethodResult {
            method: Method::Foliation,
            value: IndexValue::ZERO,
            float_oracle: 0.0,
            samples_used: 0,
            refinement_depth: 0,
            reason: Some("intersecting".into()),
        });
    }
    input.validate()?;
    let lift = lift_angle_path(
        |t| angle_at(input.pair_vector(t)?, t),
        &lift_options(unwrap, tol_snap, EndpointRule::SnapOrQuantize),
    )?;
    if lift.theta_start.rem_euclid(2) == 0 {
        return Err(Error::EndpointEvenClass { t: 0.0 });
    }
    if lift.theta_end.rem_euclid(2) == 0 {
        return Err(Error::EndpointEvenClass { t: 1.0 });
    }
    let value = IndexValue::from_quarters(lift.difference())?;
    Ok(MethodResult {
        method: Method::Foliation,
        value,
        float_oracle: intuitive_index_float(input, unwrap)?,
        samples_used: lift.unwrap.samples,
        refinement_depth: lift.unwrap.depth,
        reason: None,
    })
}

/// Continuous winding, in turns, of the pair field `h(α′) − h(α)`.
pub fn intuitive_index_float(input: &FoliationIndexInput<'_>, unwrap: UnwrapOptions) -> Result<f64> {
    winding_number_with(|t| input.pair_vector(t), &unwrap)
}

/// The same index through the discrete route: sample the Khalimsky classes
/// `σ(angle(h(α′) − h(α)))` along the path, refine until consecutive classes are
/// compatible, and lift the sequence from the start value `σ̃(s̃(0))`.
pub fn foliation_index_discrete(
    input: &FoliationIndexInput<'_>,
    initial_samples: usize,
    max_depth: usize,
    tol_axis: f64,
) -> Result<IndexValue> {
    if lines_intersect(input.lines.0, input.lines.1, &input.bbox, crate::plane::INTERSECT_TOL) {
        return Ok(IndexValue::ZERO);
    }
    input.validate()?;
    let seq = sample_class_path(|t| Ok(Some(sigma(angle_at(input.pair_vector(t)?, t)?, tol_axis))), initial_samples, max_depth)?;
    let theta0 = sigma_tilde(wrap_pi(angle_at(input.pair_vector(0.0)?, 0.0)?));
    if theta0.rem_euclid(2) == 0 {
        return Err(Error::EndpointEvenClass { t: 0.0 });
    }
    let lifted = lift_sequence(&seq, theta0)?;
    let end = *lifted.last().unwrap();
    if end.rem_euclid(2) == 0 {
        return Err(Error::EndpointEvenClass { t: 1.0 });
    }
    IndexValue::from_quarters(end - theta0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{horizontal, BandSpiral};
    use crate::plane::{pt, vec2};
    use std::sync::Arc;

    #[test]
    fn index_value_arithmetic() {
        let v = IndexValue::from_quarters(6).unwrap();
        assert_eq!((v.halves(), v.quarters(), v.as_f64()), (3, 6, 1.5));
        assert_eq!(v.to_string(), "3/2");
        assert_eq!(IndexValue::from_halves(-1).to_string(), "-1/2");
        assert_eq!(IndexValue::from_quarters(3), Err(Error::ParityViolation(3)));
        assert_eq!("leroux".parse::<Method>().unwrap(), Method::Leroux);
        assert!("pH".parse::<Method>().is_err());
    }

    #[test]
    fn ph_examples() {
        let path = PolyPath::segment(pt(0.0, 1.0), pt(0.0, 2.0), 16).unwrap();
        let id = PlaneHomeo::identity();
        let u = UnwrapOptions::default();
        let constant: FieldFn = Arc::new(|_| vec2(1.0, 0.0));
        assert_eq!(poincare_hopf_index(&constant, &id, &path, u, 1e-6).unwrap().value, IndexValue::ZERO);
        for (n, halves) in [(1, 1), (4, 4), (-3, -3)] {
            let r = poincare_hopf_index(&BandSpiral::new(n).field(), &id, &path, u, 1e-6).unwrap();
            assert_eq!(r.value.halves(), halves);
            assert!((r.float_oracle - n as f64 / 2.0).abs() < 1e-12);
        }
        let tilted: FieldFn = Arc::new(|_| vec2(1.0, 0.3));
        assert!(matches!(
            poincare_hopf_index(&tilted, &id, &path, u, 1e-6),
            Err(Error::EndpointNotOnAxisClass { .. })
        ));
    }

    #[test]
    fn horizontal_foliation_between_verticals() {
        // Upward verticals are positively transverse to the +x horizontal
        // foliation; a quarter-turn rotation sends them to the rows.
        let f = horizontal();
        let (g1, g2) = (OrientedLine::vertical(0.0), OrientedLine::vertical(1.0));
        let h = PlaneHomeo::affine("rot", [[0.0, -1.0], [1.0, 0.0]], vec2(0.0, 1.0)).unwrap();
        let s = StrMap::certify(h, (&g1, &g2), &BoundingBox::working()).unwrap();
        let path = PolyPath::segment(pt(0.0, 0.5), pt(1.0, -0.5), 8).unwrap();
        let input = FoliationIndexInput {
            foliation: &f,
            lines: (&g1, &g2),
            str_map: &s,
            eps: (1e-2, 1e-2),
            path: &path,
            bbox: BoundingBox::working(),
            trace: TraceOptions::default(),
        };
        let r = foliation_index(&input, UnwrapOptions::default(), 1e-6).unwrap();
        assert_eq!(r.value, IndexValue::ZERO);
        assert!(r.float_oracle.abs() < 1e-9);
        assert_eq!(foliation_index_discrete(&input, 16, 40, 1e-7).unwrap(), IndexValue::ZERO);
        let rows = (OrientedLine::HorizontalAt(1.0), OrientedLine::HorizontalAt(2.0));
        let input = FoliationIndexInput { lines: (&rows.0, &rows.1), ..input };
        assert_eq!(foliation_index(&input, UnwrapOptions::default(), 1e-6), Err(Error::NotTransverse));
    }

    #[test]
    fn intersecting_lines_give_zero() {
        let f = BandSpiral::new(3).orthogonal();
        let g1 = OrientedLine::straight(pt(0.0, 1.0), vec2(1.0, 0.0));
        let g2 = OrientedLine::straight(pt(0.0, 1.0), vec2(1.0, 0.01));
        let s = StrMap::unchecked(PlaneHomeo::identity());
        let path = PolyPath::segment(pt(0.0, 1.0), pt(0.0, 2.0), 4).unwrap();
        let input = FoliationIndexInput {
            foliation: &f,
            lines: (&g1, &g2),
            str_map: &s,
            eps: (1e-2, 1e-2),
            path: &path,
            bbox: BoundingBox::working(),
            trace: TraceOptions::default(),
        };
        let r = foliation_index(&input, UnwrapOptions::default(), 1e-6).unwrap();
        assert_eq!((r.value, r.reason.as_deref()), (IndexValue::ZERO, Some("intersecting")));
    }
}
