//! The Whitney size function `μ` on finite sampled sets and the leaf-size
//! function `τ`.
//!
//! `μ(A) = Σ_{i≥0} 2^{-(i+1)}·sup_{x,y∈A} |m_i(x) − m_i(y)|` with
//! `m_i(p) = 1/(1 + d(p, q_i))` for a dense enumeration `q_0, q_1, …` of dyadic
//! points. Truncating at `N` terms leaves a tail of at most `2^{-N}`.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::foliation::{forward_arc, forward_on_leaf, Foliation, TraceOptions};
use crate::plane::{pt, Point};

/// Default number of series terms.
pub const DEFAULT_TERMS: usize = 32;

/// Dense dyadic enumeration, version `dyadic-spiral-v1`.
///
/// Level `m` covers `[−4(m+1), 4(m+1))²` with points `(j, k)/2^m`. A dyadic point
/// whose reduced denominator is `2^r` is enumerated at level `max(r, l)`, where
/// `l` is the first level whose square contains it. Within a level, points are
/// ordered by max-norm, then polar angle in `[0, 2π)`, then Euclidean norm.
/// Level 0 is the 64 integer points of `[−4, 3]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasePointScheme {
    points: Vec<Point>,
}

pub const SCHEME_VERSION: &str = "dyadic-spiral-v1";

fn reduced_level(v: f64, max_level: u32) -> u32 {
    (0..=max_level).find(|&r| (v * f64::from(1u32 << r)).fract() == 0.0).unwrap_or(max_level + 1)
}

fn region_level(p: Point) -> u32 {
    let mut l = 0u32;
    loop {
        let half = 4.0 * f64::from(l + 1);
        if -half <= p.x && p.x < half && -half <= p.y && p.y < half {
            return l;
        }
        l += 1;
    }
}

fn polar_angle(p: Point) -> f64 {
    if p.x == 0.0 && p.y == 0.0 {
        return 0.0;
    }
    let a = p.y.atan2(p.x);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

fn level_points(m: u32) -> Vec<Point> {
    let scale = f64::from(1u32 << m);
    let half = 4 * (m as i64 + 1) * (1i64 << m);
    let mut pts = Vec::new();
    for j in -half..half {
        for k in -half..half {
            let p = pt(j as f64 / scale, k as f64 / scale);
            let r = reduced_level(p.x, m).max(reduced_level(p.y, m));
            if r.max(region_level(p)) == m {
                pts.push(p);
            }
        }
    }
    pts.sort_by(|a, b| {
        let key = |p: &Point| (p.x.abs().max(p.y.abs()), polar_angle(*p), p.x.hypot(p.y));
        let (ka, kb) = (key(a), key(b));
        ka.0.partial_cmp(&kb.0)
            .unwrap_or(Ordering::Equal)
            .then(ka.1.partial_cmp(&kb.1).unwrap_or(Ordering::Equal))
            .then(ka.2.partial_cmp(&kb.2).unwrap_or(Ordering::Equal))
    });
    pts
}

impl BasePointScheme {
    /// The first `n` points of the enumeration.
    pub fn new(n: usize) -> Self {
        let mut points = Vec::with_capacity(n);
        let mut m = 0;
        while points.len() < n {
            points.extend(level_points(m));
            m += 1;
        }
        points.truncate(n);
        BasePointScheme { points }
    }

    pub fn standard() -> Self {
        BasePointScheme::new(DEFAULT_TERMS)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Result<Point> {
        self.points.get(i).copied().ok_or(Error::IndexOutOfScheme(i))
    }

    /// `m_i(p) = 1/(1 + d(p, q_i))`.
    pub fn m(&self, i: usize, p: Point) -> Result<f64> {
        Ok(1.0 / (1.0 + p.distance(self.point(i)?)))
    }
}

/// A finite nonempty sample of a compact set.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSet {
    points: Vec<Point>,
}

impl SampledSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("sampled set must be nonempty".into()));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("sampled set contains non-finite point {p}")));
        }
        Ok(SampledSet { points })
    }

    pub fn singleton(p: Point) -> Self {
        SampledSet { points: vec![p] }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }
}

/// A truncated series value; the true `μ` lies in `[value, value + tail]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuValue {
    pub value: f64,
    pub tail: f64,
}

fn tail_bound(terms: usize) -> f64 {
    0.5f64.powi(terms as i32)
}

/// Running per-term oscillation of `m_i` over a growing point set.
struct Oscillation<'a> {
    scheme: &'a [Point],
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl<'a> Oscillation<'a> {
    fn new(scheme: &'a [Point]) -> Self {
        Oscillation { scheme, lo: vec![f64::INFINITY; scheme.len()], hi: vec![f64::NEG_INFINITY; scheme.len()] }
    }

    fn add(&mut self, p: Point) {
        for (i, q) in self.scheme.iter().enumerate() {
            let m = 1.0 / (1.0 + p.distance(*q));
            self.lo[i] = self.lo[i].min(m);
            self.hi[i] = self.hi[i].max(m);
        }
    }

    fn value(&self) -> f64 {
        let mut w = 1.0;
        let mut total = 0.0;
        for (lo, hi) in self.lo.iter().zip(&self.hi) {
            w *= 0.5;
            total += w * (hi - lo);
        }
        total
    }
}

/// `μ(A)` truncated after `terms` terms of the series.
pub fn mu(scheme: &BasePointScheme, set: &SampledSet, terms: usize) -> Result<MuValue> {
    if terms == 0 {
        return Err(Error::InvalidInput("μ needs at least one term".into()));
    }
    if terms > scheme.len() {
        return Err(Error::IndexOutOfScheme(terms - 1));
    }
    let mut osc = Oscillation::new(&scheme.points[..terms]);
    for p in &set.points {
        osc.add(*p);
    }
    Ok(MuValue { value: osc.value(), tail: tail_bound(terms) })
}

/// Lower estimates of `τ(z) = μ(φ_z⁺)`: for each arc length `L` in the schedule,
/// `μ` of the traced forward leaf from `z` up to length `L`. Sample sets are
/// nested, so the estimates are nondecreasing.
pub fn tau(
    f: &Foliation,
    z: Point,
    scheme: &BasePointScheme,
    terms: usize,
    schedule: &[f64],
    opts: &TraceOptions,
) -> Result<Vec<MuValue>> {
    if terms == 0 || terms > scheme.len() {
        return Err(Error::IndexOutOfScheme(terms.saturating_sub(1)));
    }
    if schedule.iter().any(|l| !(*l >= 0.0)) || schedule.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("arc-length schedule must be nonnegative and increasing".into()));
    }
    let Some(&longest) = schedule.last() else { return Ok(Vec::new()) };
    let vertices = forward_arc(f, z, longest, opts)?;
    let mut osc = Oscillation::new(&scheme.points[..terms]);
    let mut out = Vec::with_capacity(schedule.len());
    let mut next_vertex = 0usize;
    for &l in schedule {
        // Vertices strictly before `l`, then the point at exactly `l`.
        while next_vertex < vertices.len() - 1 && (next_vertex as f64) * opts.step < l {
            osc.add(vertices[next_vertex]);
            next_vertex += 1;
        }
        let k = next_vertex.saturating_sub(1);
        let rest = l - k as f64 * opts.step;
        let end = if l == longest {
            *vertices.last().unwrap()
        } else if next_vertex == 0 || rest <= 0.0 {
            vertices[next_vertex.min(vertices.len() - 1)]
        } else {
            forward_on_leaf(f, vertices[k], rest, opts)?
        };
        osc.add(end);
        out.push(MuValue { value: osc.value(), tail: tail_bound(terms) });
    }
    Ok(out)
}

/// Which random sets the property suite draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corpus {
    Mixed,
    Singletons,
}

/// Outcome of one property group of the suite.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub group: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Group {
    result: PropertyResult,
}

impl Group {
    fn new(name: &'static str) -> Self {
        Group { result: PropertyResult { group: name, trials: 0, failures: 0, counterexample: None } }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.result.trials += 1;
        if !ok {
            self.result.failures += 1;
            if self.result.counterexample.is_none() {
                self.result.counterexample = Some(detail());
            }
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, half: f64) -> Point {
    pt(rng.gen_range(-half..half), rng.gen_range(-half..half))
}

fn random_set(rng: &mut ChaCha8Rng, corpus: Corpus) -> Vec<Point> {
    let n = match corpus {
        Corpus::Mixed => rng.gen_range(1..=12),
        Corpus::Singletons => 1,
    };
    (0..n).map(|_| random_point(rng, 6.0)).collect()
}

/// Seeded randomized checks of the five Whitney properties at sampled level.
///
/// * (i) singletons have value exactly 0 and two distinct points a positive one;
/// * (ii) duplicating points changes nothing, and refining a sampled segment of
///   mesh `h` moves the value by at most `h`;
/// * (iii) adding points never decreases the value;
/// * (iv) adding a point farther from `q_0` than all of `A` strictly increases it;
/// * (v) moving every point by at most `δ` moves the value by at most `2δ + 2·tail`.
pub fn property_suite(trials: usize, seed: u64, corpus: Corpus) -> Result<Vec<PropertyResult>> {
    let scheme = BasePointScheme::standard();
    let terms = DEFAULT_TERMS;
    let tail = tail_bound(terms);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g1 = Group::new("singleton");
    let mut g2 = Group::new("closure");
    let mut g3 = Group::new("monotone");
    let mut g4 = Group::new("strict");
    let mut g5 = Group::new("continuity");
    let value = |pts: &[Point]| -> Result<f64> { Ok(mu(&scheme, &SampledSet::new(pts.to_vec())?, terms)?.value) };
    for _ in 0..trials {
        let a = random_set(&mut rng, corpus);
        let va = value(&a)?;

        let p = a[0];
        let single = value(&[p])?;
        g1.check(single == 0.0, || format!("μ({{{p}}}) = {single}"));
        let q = p + crate::plane::vec2(rng.gen_range(0.01..1.0), rng.gen_range(-1.0..1.0));
        let pair = value(&[p, q])?;
        g1.check(pair > 0.0, || format!("μ({{{p}, {q}}}) = {pair}"));

        let mut dup = a.clone();
        dup.extend(a.iter().rev().copied());
        let vd = value(&dup)?;
        g2.check(vd == va, || format!("duplicates changed μ from {va} to {vd}"));
        let (s0, s1) = (random_point(&mut rng, 5.0), random_point(&mut rng, 5.0));
        let k = rng.gen_range(2..40usize);
        let coarse: Vec<Point> = (0..=k).map(|j| s0.lerp(s1, j as f64 / k as f64)).collect();
        let fine: Vec<Point> = (0..=2 * k).map(|j| s0.lerp(s1, j as f64 / (2 * k) as f64)).collect();
        let h = s0.distance(s1) / k as f64;
        let (vc, vf) = (value(&coarse)?, value(&fine)?);
        g2.check((vf - vc).abs() <= h + 1e-15, || format!("refining mesh {h} moved μ from {vc} to {vf}"));

        let mut b = a.clone();
        for _ in 0..rng.gen_range(1..6) {
            b.push(random_point(&mut rng, 6.0));
        }
        let vb = value(&b)?;
        g3.check(va <= vb, || format!("μ decreased from {va} to {vb} when adding points"));

        let q0 = scheme.point(0)?;
        let far = a.iter().map(|p| p.distance(q0)).fold(0.0, f64::max);
        let dir = rng.gen_range(0.0..TAU);
        let r = far + rng.gen_range(0.05..3.0);
        let extra = pt(q0.x + r * dir.cos(), q0.y + r * dir.sin());
        let mut c = a.clone();
        c.push(extra);
        let vc = value(&c)?;
        g4.check(vc > va, || format!("adding {extra} did not increase μ = {va}"));

        let delta = rng.gen_range(1e-6..0.5);
        let moved: Vec<Point> = a
            .iter()
            .map(|p| {
                let t = rng.gen_range(0.0..TAU);
                let s = rng.gen_range(0.0..=delta);
                pt(p.x + s * t.cos(), p.y + s * t.sin())
            })
            .collect();
        let vm = value(&moved)?;
        g5.check((vm - va).abs() <= 2.0 * delta + 2.0 * tail, || {
            format!("moving by {delta} changed μ from {va} to {vm}")
        });
    }
    let witness = value(&[pt(0.0, 0.0), pt(1.0, 0.0)])? - value(&[pt(0.0, 0.0)])?;
    g4.check(witness > 2.0 * tail, || format!("μ({{0,e1}}) − μ({{0}}) = {witness}"));
    Ok([g1, g2, g3, g4, g5].into_iter().map(|g| g.result).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::horizontal;

    #[test]
    fn scheme_starts_with_integer_spiral() {
        let s = BasePointScheme::new(200);
        assert_eq!(&s.points()[..9], &[
            pt(0.0, 0.0),
            pt(1.0, 0.0),
            pt(1.0, 1.0),
            pt(0.0, 1.0),
            pt(-1.0, 1.0),
            pt(-1.0, 0.0),
            pt(-1.0, -1.0),
            pt(0.0, -1.0),
            pt(1.0, -1.0),
        ]);
        assert!(s.points()[..64].iter().all(|p| p.x.fract() == 0.0 && p.y.fract() == 0.0));
        assert_eq!(s.point(64).unwrap(), pt(0.5, 0.0));
        let mut seen = s.points().to_vec();
        seen.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
        seen.dedup();
        assert_eq!(seen.len(), 200);
    }

    #[test]
    fn scheme_covers_unit_cells() {
        let s = BasePointScheme::new(64);
        for cx in -4..4 {
            for cy in -4..4 {
                let hit = s.points().iter().any(|p| {
                    p.x >= cx as f64 && p.x < (cx + 1) as f64 && p.y >= cy as f64 && p.y < (cy + 1) as f64
                });
                assert!(hit, "cell ({cx},{cy}) missed");
            }
        }
    }

    #[test]
    fn level_sizes() {
        assert_eq!(level_points(0).len(), 64);
        assert_eq!(level_points(1).len(), 32 * 32 - 64);
        assert_eq!(level_points(2).len(), 96 * 96 - 32 * 32);
    }

    #[test]
    fn m_examples() {
        let s = BasePointScheme::standard();
        let q = s.point(3).unwrap();
        assert_eq!(s.m(3, q).unwrap(), 1.0);
        assert_eq!(s.m(3, pt(q.x + 1.0, q.y)).unwrap(), 0.5);
        assert_eq!(s.m(3, pt(q.x, q.y - 3.0)).unwrap(), 0.25);
        assert_eq!(s.m(32, q), Err(Error::IndexOutOfScheme(32)));
    }

    #[test]
    fn mu_singleton_and_bounds() {
        let s = BasePointScheme::standard();
        let v = mu(&s, &SampledSet::singleton(pt(0.3, -2.0)), 20).unwrap();
        assert_eq!(v, MuValue { value: 0.0, tail: 0.5f64.powi(20) });
        let v = mu(&s, &SampledSet::new(vec![pt(-100.0, 0.0), pt(100.0, 0.0)]).unwrap(), 32).unwrap();
        assert!(v.value < 1.0);
        assert!(mu(&s, &SampledSet::singleton(Point::ORIGIN), 33).is_err());
        assert!(SampledSet::new(vec![]).is_err());
    }

    #[test]
    fn tau_schedule_behaviour() {
        let s = BasePointScheme::standard();
        let t = TraceOptions::default();
        let est = tau(&horizontal(), Point::ORIGIN, &s, 32, &[0.0, 1e-3, 0.3, 1.0, 2.5, 4.0], &t).unwrap();
        assert_eq!(est[0].value, 0.0);
        assert!(est[1].value < 2e-3);
        assert!(est.windows(2).all(|w| w[0].value <= w[1].value));
        let direct = mu(&s, &SampledSet::new(vec![Point::ORIGIN, pt(2.5, 0.0)]).unwrap(), 32).unwrap();
        assert!(est[4].value >= direct.value);
        assert!(tau(&horizontal(), Point::ORIGIN, &s, 32, &[1.0, 0.5], &t).is_err());
    }

    #[test]
    fn suite_vacuous_and_singletons() {
        let r = property_suite(0, 1, Corpus::Mixed).unwrap();
        assert_eq!(r.len(), 5);
        assert!(r.iter().all(|g| g.passed()));
        let r = property_suite(50, 9, Corpus::Singletons).unwrap();
        assert!(r.iter().all(|g| g.passed()), "{r:?}");
    }
}
