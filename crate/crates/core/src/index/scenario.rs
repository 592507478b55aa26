use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::witness::{HandelWitness, Justification, StrMap};
use super::{
    foliation_index, leroux_index_via_theta, poincare_hopf_index, FoliationIndexInput, IndexValue, Method,
    MethodResult,
};
use crate::brouwer::{flow_time_one, orbit, perturb_rel_orbits, translation_t, BrouwerMap, Bump};
use crate::error::{Error, Result};
use crate::foliation::{flow_line, orthogonal_foliation, BandSpiral, FieldFn, Foliation, PlaneHomeo, TraceOptions};
use crate::khalimsky::UnwrapOptions;
use crate::plane::{lines_intersect, pt, vec2, BoundingBox, OrientedLine, Point, PolyPath, Vector, INTERSECT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySpec {
    /// The constant field `(1, 0)`.
    Horizontal,
    BandSpiral(i64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    Translation,
    FlowTimeOne,
    /// The family's model map (translation for `Horizontal`, time-one flow
    /// otherwise) followed by the listed bumps.
    Perturbed { bumps: Vec<Bump> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineSpec {
    /// The traced flow line of the family field through a point.
    FlowLine(Point),
    /// `ℝ×{y}` oriented toward `+x`.
    Row(f64),
    Straight { point: Point, direction: Vector },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WitnessSpec {
    Identity,
    /// `(x, y) ↦ (x + c·y, y)`.
    Shear(f64),
    /// `(x, y) ↦ (−x, 3 − y)`, exchanging the rows `y = 1` and `y = 2`.
    HalfTurn,
}

impl WitnessSpec {
    pub fn homeo(self) -> PlaneHomeo {
        match self {
            WitnessSpec::Identity => PlaneHomeo::identity(),
            WitnessSpec::Shear(c) => PlaneHomeo::shear(c),
            WitnessSpec::HalfTurn => PlaneHomeo::rotation(pt(0.0, 1.5), std::f64::consts::PI),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathSpec {
    /// Straight segment between the two seeds.
    Segment,
    /// `α(t) = (1 − t)·x₁ + t·x₂ + a·sin(πt) + b·sin(2πt)`.
    Wiggle { a: Vector, b: Vector },
}

impl PathSpec {
    pub fn build(self, x1: Point, x2: Point) -> Result<PolyPath> {
        match self {
            PathSpec::Segment => PolyPath::segment(x1, x2, 64),
            PathSpec::Wiggle { a, b } => PolyPath::from_fn(128, |t| {
                let s = (std::f64::consts::PI * t).sin();
                let s2 = (std::f64::consts::TAU * t).sin();
                x1.lerp(x2, t) + a * s + b * s2
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub eps: f64,
    pub tol_leaf: f64,
    pub tol_snap: f64,
    pub tol_fix: f64,
    pub max_depth: usize,
    pub initial_samples: usize,
    pub step_leaf: f64,
    pub step_flow: f64,
    pub tangent_tol: f64,
    pub whitney_n: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            eps: 1e-2,
            tol_leaf: 1e-4,
            tol_snap: 1e-6,
            tol_fix: 1e-3,
            max_depth: 40,
            initial_samples: 32,
            step_leaf: 1.0 / 128.0,
            step_flow: 1.0 / 64.0,
            tangent_tol: 1e-3,
            whitney_n: 32,
        }
    }
}

impl Numerics {
    pub fn unwrap(&self) -> UnwrapOptions {
        UnwrapOptions { initial_samples: self.initial_samples, max_depth: self.max_depth, ..UnwrapOptions::default() }
    }

    pub fn trace(&self) -> TraceOptions {
        TraceOptions { step: self.step_leaf, tangent_tol: self.tangent_tol, ..TraceOptions::default() }
    }

    /// Both integration steps halved.
    pub fn refined(&self) -> Numerics {
        Numerics { step_leaf: self.step_leaf / 2.0, step_flow: self.step_flow / 2.0, ..*self }
    }
}

/// A complete index computation: a flow family with its transverse foliation,
/// a Brouwer map, two orbits with their trajectories, and a normalizing map.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub family: FamilySpec,
    pub map: MapSpec,
    pub seeds: (Point, Point),
    pub lines: (LineSpec, LineSpec),
    pub witness: WitnessSpec,
    pub path: PathSpec,
    pub numerics: Numerics,
    pub verify_choices: bool,
    pub seed: u64,
}

/// Everything a scenario builds before the index computations.
#[derive(Clone)]
pub struct ScenarioParts {
    pub field: FieldFn,
    pub transverse: Foliation,
    pub map: BrouwerMap,
    pub lines: (OrientedLine, OrientedLine),
    pub str_map: StrMap,
    pub handel: HandelWitness,
    pub path: PolyPath,
    pub bbox: BoundingBox,
}

impl std::fmt::Debug for ScenarioParts {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScenarioParts")
            .field("transverse", &self.transverse)
            .field("map", &self.map)
            .field("lines", &self.lines)
            .field("str_map", &self.str_map)
            .field("handel", &self.handel)
            .finish_non_exhaustive()
    }
}

/// Orbit iterates protected from perturbation bumps, on each side of a seed.
const PROTECTED_RANGE: i64 = 10;

impl Scenario {
    /// Flow of `band_spiral(n)` with its orthogonal foliation, trajectories
    /// through `(0, 1)` and `(0, 2)` and the identity witness.
    pub fn band_spiral(n: i64) -> Self {
        Scenario {
            name: format!("band_spiral({n})"),
            family: FamilySpec::BandSpiral(n),
            map: MapSpec::FlowTimeOne,
            seeds: (pt(0.0, 1.0), pt(0.0, 2.0)),
            lines: (LineSpec::FlowLine(pt(0.0, 1.0)), LineSpec::FlowLine(pt(0.0, 2.0))),
            witness: WitnessSpec::Identity,
            path: PathSpec::Segment,
            numerics: Numerics::default(),
            verify_choices: false,
            seed: 0,
        }
    }

    /// The translation `T` with the field `(1, 0)` and downward vertical leaves.
    pub fn horizontal() -> Self {
        Scenario {
            name: "horizontal".into(),
            family: FamilySpec::Horizontal,
            map: MapSpec::Translation,
            ..Scenario::band_spiral(0)
        }
    }

    /// The same scenario with the roles of the two orbits exchanged and the
    /// half-turn witness.
    pub fn swapped(&self) -> Self {
        Scenario {
            name: format!("{} (swapped)", self.name),
            seeds: (self.seeds.1, self.seeds.0),
            lines: (self.lines.1, self.lines.0),
            witness: WitnessSpec::HalfTurn,
            ..self.clone()
        }
    }

    pub fn field(&self) -> FieldFn {
        match self.family {
            FamilySpec::Horizontal => Arc::new(|_| vec2(1.0, 0.0)),
            FamilySpec::BandSpiral(n) => BandSpiral::new(n).field(),
        }
    }

    fn model_map(&self) -> Result<BrouwerMap> {
        match self.family {
            FamilySpec::Horizontal => Ok(translation_t()),
            FamilySpec::BandSpiral(n) => flow_time_one(self.field(), self.numerics.step_flow, format!("flow(band_spiral({n}))")),
        }
    }

    fn line(&self, spec: LineSpec, bbox: &BoundingBox) -> Result<OrientedLine> {
        match spec {
            LineSpec::FlowLine(p) => flow_line(self.field(), p, bbox, &self.numerics.trace()),
            LineSpec::Row(y) => Ok(OrientedLine::HorizontalAt(y)),
            LineSpec::Straight { point, direction } => {
                if direction.norm() == 0.0 {
                    return Err(Error::InvalidInput("straight line needs a nonzero direction".into()));
                }
                Ok(OrientedLine::straight(point, direction))
            }
        }
    }

    pub fn justification(&self) -> Justification {
        match (self.family, &self.map) {
            (FamilySpec::Horizontal, _) | (_, MapSpec::Translation) | (FamilySpec::BandSpiral(0), _) => {
                Justification::ExplicitModel
            }
            (FamilySpec::BandSpiral(n), _) => {
                Justification::StrDaggerSeparated { barrier: pt(0.0, BandSpiral::new(n).barrier_levels()[0]) }
            }
        }
    }

    /// Protected orbits of the model map through both seeds.
    pub fn protected_orbits(&self, base: &BrouwerMap, bbox: &BoundingBox) -> Result<Vec<crate::brouwer::Orbit>> {
        [self.seeds.0, self.seeds.1]
            .into_iter()
            .map(|s| orbit(base, s, -PROTECTED_RANGE, PROTECTED_RANGE, bbox, self.numerics.tol_fix))
            .collect()
    }

    pub fn build(&self) -> Result<ScenarioParts> {
        let bbox = BoundingBox::working();
        if self.seeds.0 == self.seeds.1 {
            return Err(Error::InvalidInput("the two orbit seeds coincide".into()));
        }
        let field = self.field();
        let transverse = orthogonal_foliation(field.clone(), format!("orthogonal({})", self.name));
        let map = match &self.map {
            MapSpec::Translation => translation_t(),
            MapSpec::FlowTimeOne => self.model_map()?,
            MapSpec::Perturbed { bumps } => {
                let base = self.model_map()?;
                let protected = self.protected_orbits(&base, &bbox)?;
                let mut f = base;
                for b in bumps {
                    f = perturb_rel_orbits(&f, *b, &protected, &bbox, self.numerics.tol_fix)?;
                }
                f
            }
        };
        let lines = (self.line(self.lines.0, &bbox)?, self.line(self.lines.1, &bbox)?);
        let (r0, r1) = (lines.0.samples_in(&bbox), lines.1.samples_in(&bbox));
        if r0.len() == r1.len() && r0.iter().zip(&r1).all(|(a, b)| a.distance(*b) < 1e-12) {
            return Err(Error::InvalidInput("the two lines coincide".into()));
        }
        let h = self.witness.homeo();
        let str_map = if lines_intersect(&lines.0, &lines.1, &bbox, INTERSECT_TOL) {
            StrMap::unchecked(h.clone())
        } else {
            StrMap::certify(h.clone(), (&lines.0, &lines.1), &bbox)?
        };
        let handel = HandelWitness::certify(
            &map,
            h,
            self.seeds,
            self.justification(),
            &transverse,
            &bbox,
            &self.numerics.trace(),
        )?;
        let path = self.path.build(self.seeds.0, self.seeds.1)?;
        Ok(ScenarioParts { field, transverse, map, lines, str_map, handel, path, bbox })
    }

    pub fn compute(&self, parts: &ScenarioParts, method: Method) -> Result<MethodResult> {
        let nm = &self.numerics;
        match method {
            Method::Ph => poincare_hopf_index(&parts.field, &parts.str_map.h, &parts.path, nm.unwrap(), nm.tol_snap),
            Method::Leroux => {
                leroux_index_via_theta(&parts.map, &parts.handel, &parts.path, nm.unwrap(), nm.tol_snap, nm.tol_fix)
            }
            Method::Foliation => foliation_index(&self.foliation_input(parts, &parts.str_map, &parts.path, (nm.eps, nm.eps)), nm.unwrap(), nm.tol_snap),
        }
    }

    pub fn foliation_input<'a>(
        &self,
        parts: &'a ScenarioParts,
        str_map: &'a StrMap,
        path: &'a PolyPath,
        eps: (f64, f64),
    ) -> FoliationIndexInput<'a> {
        FoliationIndexInput {
            foliation: &parts.transverse,
            lines: (&parts.lines.0, &parts.lines.1),
            str_map,
            eps,
            path,
            bbox: parts.bbox,
            trace: self.numerics.trace(),
        }
    }

    /// Foliation index over random choices: 5 basepoint pairs (a point on each
    /// line plus a push length) × 3 connecting paths × 2 straightening maps (the
    /// scenario's and its composition with the shear `(x + y, y)`).
    pub fn choice_independence(&self, parts: &ScenarioParts) -> Result<ChoiceReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0xC401CE);
        let shear = StrMap::certify(
            PlaneHomeo::shear(1.0).compose(&parts.str_map.h),
            (&parts.lines.0, &parts.lines.1),
            &parts.bbox,
        )?;
        let maps = [&parts.str_map, &shear];
        let inner = BoundingBox::square(3.0);
        let (c0, c1) = (parts.lines.0.samples_in(&inner), parts.lines.1.samples_in(&inner));
        if c0.is_empty() || c1.is_empty() {
            return Err(Error::InvalidInput("lines miss the central box".into()));
        }
        let mut values = Vec::with_capacity(30);
        for pair in 0..5 {
            let x1 = c0[rng.gen_range(0..c0.len())];
            let x2 = c1[rng.gen_range(0..c1.len())];
            let eps = (rng.gen_range(5e-3..2e-2), rng.gen_range(5e-3..2e-2));
            for k in 0..3 {
                let spec = if k == 0 {
                    PathSpec::Segment
                } else {
                    PathSpec::Wiggle {
                        a: vec2(rng.gen_range(-1.5..1.5), rng.gen_range(-1.0..1.0)),
                        b: vec2(rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5)),
                    }
                };
                let path = spec.build(x1, x2)?;
                for (m, s) in maps.iter().enumerate() {
                    let input = self.foliation_input(parts, s, &path, eps);
                    let r = foliation_index(&input, self.numerics.unwrap(), self.numerics.tol_snap)?;
                    values.push((format!("pair {pair} path {k} map {m}"), r.value));
                }
            }
        }
        let consistent = values.windows(2).all(|w| w[0].1 == w[1].1);
        Ok(ChoiceReport { values, consistent })
    }

    /// Le Roux index of the map followed by `count` random bumps that keep clear
    /// of the protected orbits and stay fixed-point free along the isotopy.
    /// Returns the unperturbed value and one value per bump.
    pub fn isotopy_invariance(&self, parts: &ScenarioParts, count: usize) -> Result<(IndexValue, Vec<IndexValue>)> {
        let nm = &self.numerics;
        let base = self.compute(parts, Method::Leroux)?.value;
        let protected = self.protected_orbits(&parts.map, &parts.bbox)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0xB0B5);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            if attempts > 100 * count.max(1) {
                return Err(Error::InvalidInput("could not place admissible bumps".into()));
            }
            let radius = rng.gen_range(0.2..0.45);
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            let size = rng.gen_range(0.2..0.95) * 0.9 * radius / 1.54;
            let bump = Bump {
                center: pt(rng.gen_range(-2.0..2.0), rng.gen_range(0.5..2.5)),
                radius,
                vector: vec2(size * angle.cos(), size * angle.sin()),
            };
            let g = match perturb_rel_orbits(&parts.map, bump, &protected, &parts.bbox, nm.tol_fix) {
                Ok(g) => g,
                Err(Error::OrbitTouched(_)) | Err(Error::FixedPointSuspected { .. }) => continue,
                Err(e) => return Err(e),
            };
            let v = leroux_index_via_theta(&g, &parts.handel, &parts.path, nm.unwrap(), nm.tol_snap, nm.tol_fix)?;
            out.push(v.value);
        }
        Ok((base, out))
    }
}

/// Foliation index values over the sampled choices.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceReport {
    pub values: Vec<(String, IndexValue)>,
    pub consistent: bool,
}

/// Result of evaluating a scenario.
#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub name: String,
    pub results: Vec<MethodResult>,
    /// Stage and error of the first failure, if any.
    pub failure: Option<(String, Error)>,
    pub choices: Option<ChoiceReport>,
    /// All computed values agree, no stage failed, and sampled choices agree.
    pub verdict: bool,
    pub wall_ms: u128,
}

impl TheoremReport {
    pub fn value(&self, method: Method) -> Option<IndexValue> {
        self.results.iter().find(|r| r.method == method).map(|r| r.value)
    }

    pub fn result(&self, method: Method) -> Option<&MethodResult> {
        self.results.iter().find(|r| r.method == method)
    }
}

/// Runs the requested methods on a scenario (and the choice suite when the
/// scenario asks for it). Errors are recorded in the report with their stage.
pub fn evaluate(scenario: &Scenario, methods: &[Method]) -> TheoremReport {
    let start = Instant::now();
    let mut report = TheoremReport {
        name: scenario.name.clone(),
        results: Vec::new(),
        failure: None,
        choices: None,
        verdict: false,
        wall_ms: 0,
    };
    let parts = match scenario.build() {
        Ok(p) => p,
        Err(e) => {
            report.failure = Some(("load".into(), e));
            report.wall_ms = start.elapsed().as_millis();
            return report;
        }
    };
    for &m in methods {
        match scenario.compute(&parts, m) {
            Ok(r) => report.results.push(r),
            Err(e) => {
                report.failure = Some((m.name().into(), e));
                break;
            }
        }
    }
    if report.failure.is_none() && scenario.verify_choices {
        match scenario.choice_independence(&parts) {
            Ok(c) => report.choices = Some(c),
            Err(e) => report.failure = Some(("choices".into(), e)),
        }
    }
    let agree = report.results.windows(2).all(|w| w[0].value == w[1].value);
    let choices_ok = report.choices.as_ref().is_none_or(|c| {
        c.consistent && report.results.iter().all(|r| r.method != Method::Foliation || c.values[0].1 == r.value)
    });
    report.verdict = report.failure.is_none() && agree && choices_ok;
    report.wall_ms = start.elapsed().as_millis();
    report
}

/// All three indices on one scenario; the verdict asserts they coincide.
pub fn theorem_a_check(scenario: &Scenario) -> TheoremReport {
    evaluate(scenario, &Method::ALL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_scenario_is_zero() {
        let r = theorem_a_check(&Scenario::horizontal());
        assert!(r.verdict, "{r:?}");
        assert!(r.results.iter().all(|m| m.value == IndexValue::ZERO));
        assert!(r.result(Method::Foliation).unwrap().float_oracle.abs() < 1e-9);
    }

    #[test]
    fn reeb_band_is_one_half() {
        let r = theorem_a_check(&Scenario::band_spiral(1));
        assert!(r.verdict, "{r:?}");
        assert_eq!(r.value(Method::Leroux), Some(IndexValue::from_halves(1)));
    }

    #[test]
    fn intersecting_lines_give_zero_foliation_index() {
        let mut s = Scenario::horizontal();
        s.lines = (
            LineSpec::Straight { point: pt(0.0, 1.0), direction: vec2(1.0, 0.2) },
            LineSpec::Straight { point: pt(0.0, 2.0), direction: vec2(1.0, -0.2) },
        );
        let parts = s.build().unwrap();
        let r = s.compute(&parts, Method::Foliation).unwrap();
        assert_eq!(r.value, IndexValue::ZERO);
        assert_eq!(r.reason.as_deref(), Some("intersecting"));
    }

    #[test]
    fn load_rejects_equal_lines() {
        let mut s = Scenario::band_spiral(2);
        s.lines.1 = s.lines.0;
        assert!(matches!(s.build(), Err(Error::InvalidInput(_))));
        let mut s = Scenario::band_spiral(2);
        s.seeds.1 = s.seeds.0;
        assert!(s.build().is_err());
    }
}
