//! Quarter-turn angle classes in `ℤ/4ℤ` with the Khalimsky topology, their
//! quantizers, and integer lifting of sampled class paths.
//!
//! Odd classes (`±1̇`) are open points, even classes (`0̇`, `2̇`) are closed. A
//! sampled path of classes is compatible with a continuous path exactly when
//! every step either repeats a class or moves to a circularly adjacent class of
//! the opposite parity.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use crate::error::{Error, Result};
use crate::plane::wrap_pi;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KClass {
    MinusOne,
    Zero,
    One,
    Two,
}

impl KClass {
    pub const ALL: [KClass; 4] = [KClass::MinusOne, KClass::Zero, KClass::One, KClass::Two];

    /// Representative in `{-1, 0, 1, 2}`.
    pub fn value(self) -> i64 {
        match self {
            KClass::MinusOne => -1,
            KClass::Zero => 0,
            KClass::One => 1,
            KClass::Two => 2,
        }
    }

    /// `mod₄` of an arbitrary integer.
    pub fn from_int(k: i64) -> KClass {
        match k.rem_euclid(4) {
            0 => KClass::Zero,
            1 => KClass::One,
            2 => KClass::Two,
            _ => KClass::MinusOne,
        }
    }

    pub fn is_odd(self) -> bool {
        matches!(self, KClass::MinusOne | KClass::One)
    }

    pub fn is_even(self) -> bool {
        !self.is_odd()
    }

    /// Signed step in `{-1, 0, 1}` from `self` to `other`, when compatible.
    fn step_to(self, other: KClass) -> Option<i64> {
        match (other.value() - self.value()).rem_euclid(4) {
            0 => Some(0),
            1 => Some(1),
            3 => Some(-1),
            _ => None,
        }
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KClass::MinusOne => "-1̇",
            KClass::Zero => "0̇",
            KClass::One => "1̇",
            KClass::Two => "2̇",
        };
        f.write_str(s)
    }
}

/// An integer lift value together with the class it lifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KLift {
    theta: i64,
}

impl KLift {
    pub fn new(theta: i64) -> Self {
        KLift { theta }
    }

    pub fn theta(self) -> i64 {
        self.theta
    }

    pub fn origin_class(self) -> KClass {
        KClass::from_int(self.theta)
    }
}

/// A sampled `ℤ/4ℤ`-valued path.
#[derive(Debug, Clone, PartialEq)]
pub struct KSequence {
    samples: Vec<KClass>,
    params: Vec<f64>,
}

impl KSequence {
    pub fn new(samples: Vec<KClass>, params: Vec<f64>) -> Result<Self> {
        if samples.is_empty() || samples.len() != params.len() {
            return Err(Error::InvalidInput(
                "class sequence needs matching, non-empty samples and parameters".into(),
            ));
        }
        if params.iter().any(|t| !(0.0..=1.0).contains(t)) || params.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("parameters must increase strictly within [0, 1]".into()));
        }
        Ok(KSequence { samples, params })
    }

    /// Uniformly parametrized sequence.
    pub fn uniform(samples: Vec<KClass>) -> Result<Self> {
        let n = samples.len();
        let params = if n == 1 {
            vec![0.0]
        } else {
            (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
        };
        KSequence::new(samples, params)
    }

    pub fn samples(&self) -> &[KClass] {
        &self.samples
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn reversed(&self) -> KSequence {
        let samples = self.samples.iter().rev().copied().collect();
        let params = self.params.iter().rev().map(|t| 1.0 - t).collect();
        KSequence { samples, params }
    }

    pub fn is_compatible(&self) -> bool {
        self.samples.windows(2).all(|w| k_step_compatible(w[0], w[1]))
    }
}

/// Quantizer `ℝ/2πℤ → ℤ/4ℤ`: `0̇` on the positive axis, `1̇` on the upper half,
/// `2̇` on the negative axis, `-1̇` on the lower half. Angles within `tol_axis`
/// of `0` or `π` snap to the even class.
pub fn sigma(t: f64, tol_axis: f64) -> KClass {
    let t = t.rem_euclid(TAU);
    if t <= tol_axis || TAU - t <= tol_axis {
        KClass::Zero
    } else if (t - PI).abs() <= tol_axis {
        KClass::Two
    } else if t < PI {
        KClass::One
    } else {
        KClass::MinusOne
    }
}

/// Integer lift of [`sigma`]: `2k` at `t = kπ` and `2k + 1` on `(kπ, (k+1)π)`.
///
/// Satisfies `σ̃(kπ) = 2k` and `mod₄ ∘ σ̃ = σ ∘ mod₂π`.
pub fn sigma_tilde(t: f64) -> i64 {
    let u = t / PI;
    (u.floor() + u.ceil()) as i64
}

/// Whether a sampled step `a → b` can come from a Khalimsky-continuous path.
pub fn k_step_compatible(a: KClass, b: KClass) -> bool {
    a.step_to(b).is_some()
}

/// Lift a compatible class sequence to integers starting from `theta0`.
pub fn lift_sequence(seq: &KSequence, theta0: i64) -> Result<Vec<i64>> {
    if KClass::from_int(theta0) != seq.samples[0] {
        return Err(Error::InvalidInput(format!(
            "start value {theta0} does not lift class {}",
            seq.samples[0]
        )));
    }
    let mut out = Vec::with_capacity(seq.len());
    let mut theta = theta0;
    out.push(theta);
    for (k, w) in seq.samples.windows(2).enumerate() {
        theta += w[0].step_to(w[1]).ok_or(Error::ForbiddenTransition(k + 1))?;
        out.push(theta);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnwrapOptions {
    /// Uniform samples taken before adaptive refinement.
    pub initial_samples: usize,
    /// Maximum bisection depth below the initial grid.
    pub max_depth: usize,
    /// Consecutive wrapped angle differences must stay strictly below this.
    pub guard: f64,
}

impl Default for UnwrapOptions {
    fn default() -> Self {
        UnwrapOptions { initial_samples: 32, max_depth: 40, guard: FRAC_PI_2 }
    }
}

/// Result of a continuous unwrap `s̃` of an angle path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unwrap {
    /// `s̃(0)`, in `(-π, π]`.
    pub start: f64,
    /// `s̃(1)`.
    pub end: f64,
    /// Number of sampler evaluations.
    pub samples: usize,
    /// Deepest bisection level reached.
    pub depth: usize,
}

/// Parameter width below which an axis crossing is no longer bracketed.
const CROSSING_WIDTH: f64 = 1e-14;

struct Unwrapper<'a, F> {
    sampler: &'a mut F,
    opts: &'a UnwrapOptions,
    total: f64,
    samples: usize,
    depth: usize,
}

impl<F: FnMut(f64) -> Result<f64>> Unwrapper<'_, F> {
    fn eval(&mut self, t: f64) -> Result<f64> {
        self.samples += 1;
        (self.sampler)(t)
    }

    fn interval(&mut self, t0: f64, a0: f64, t1: f64, a1: f64, depth: usize) -> Result<()> {
        let d = wrap_pi(a1 - a0);
        if d.abs() < self.opts.guard {
            if t1 - t0 > CROSSING_WIDTH {
                for axis in [f64::sin, f64::cos] {
                    if axis(a0) * axis(a1) < 0.0 {
                        return self.split_at_crossing(t0, a0, t1, a1, axis, depth);
                    }
                }
            }
            self.total += d;
            self.depth = self.depth.max(depth);
            return Ok(());
        }
        if depth >= self.opts.max_depth {
            return Err(Error::RefinementExhausted { depth });
        }
        let tm = 0.5 * (t0 + t1);
        let am = self.eval(tm)?;
        self.interval(t0, a0, tm, am, depth + 1)?;
        self.interval(tm, am, t1, a1, depth + 1)
    }

    /// Brackets a sign change of `axis(angle)` and unwraps each side separately,
    /// so a full turn squeezed between two samples cannot alias to a small step.
    fn split_at_crossing(&mut self, t0: f64, a0: f64, t1: f64, a1: f64, axis: fn(f64) -> f64, depth: usize) -> Result<()> {
        let (mut l, mut al, mut r, mut ar) = (t0, a0, t1, a1);
        while r - l > CROSSING_WIDTH {
            let tm = 0.5 * (l + r);
            if tm <= l || tm >= r {
                break;
            }
            let am = self.eval(tm)?;
            if axis(am) * axis(a0) > 0.0 {
                (l, al) = (tm, am);
            } else {
                (r, ar) = (tm, am);
            }
        }
        self.interval(t0, a0, l, al, depth)?;
        self.interval(l, al, r, ar, depth)?;
        self.interval(r, ar, t1, a1, depth)
    }
}

/// Continuous unwrap of an angle path by adaptive bisection under the guard;
/// every axis crossing is bracketed before a step is accepted.
pub fn unwrap_angle_path<F>(mut sampler: F, opts: &UnwrapOptions) -> Result<Unwrap>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = opts.initial_samples.max(2);
    let mut u = Unwrapper { sampler: &mut sampler, opts, total: 0.0, samples: 0, depth: 0 };
    let a_start = u.eval(0.0)?;
    let mut prev = (0.0, a_start);
    for k in 1..n {
        let t = k as f64 / (n - 1) as f64;
        let a = u.eval(t)?;
        u.interval(prev.0, prev.1, t, a, 0)?;
        prev = (t, a);
    }
    let start = wrap_pi(a_start);
    Ok(Unwrap { start, end: start + u.total, samples: u.samples, depth: u.depth })
}

/// How path endpoints are converted to lift values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointRule {
    /// Endpoints must sit on a quarter-turn axis (within `tol_snap`).
    RequireAxis,
    /// Snap endpoints near an axis; quantize the rest with [`sigma_tilde`].
    SnapOrQuantize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftOptions {
    pub unwrap: UnwrapOptions,
    pub tol_snap: f64,
    pub endpoints: EndpointRule,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions {
            unwrap: UnwrapOptions::default(),
            tol_snap: 1e-6,
            endpoints: EndpointRule::RequireAxis,
        }
    }
}

/// Integer lift values at both ends of a sampled angle path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleLift {
    pub theta_start: i64,
    pub theta_end: i64,
    pub unwrap: Unwrap,
}

impl AngleLift {
    pub fn difference(&self) -> i64 {
        self.theta_end - self.theta_start
    }
}

fn quantize_endpoint(s: f64, tol_snap: f64, rule: EndpointRule) -> Result<i64> {
    let k = (s / FRAC_PI_2).round();
    if (s - k * FRAC_PI_2).abs() <= tol_snap {
        return Ok(k as i64);
    }
    match rule {
        EndpointRule::RequireAxis => Err(Error::EndpointNotOnAxisClass { angle: s }),
        EndpointRule::SnapOrQuantize => Ok(sigma_tilde(s)),
    }
}

/// Lift of the quantized angle along a path: `(σ̃(s̃(0)), σ̃(s̃(1)))` for the
/// continuous unwrap `s̃`, with endpoints snapped onto quarter-turn axes.
pub fn lift_angle_path<F>(angle_sampler: F, opts: &LiftOptions) -> Result<AngleLift>
where
    F: FnMut(f64) -> Result<f64>,
{
    let unwrap = unwrap_angle_path(angle_sampler, &opts.unwrap)?;
    let theta_start = quantize_endpoint(unwrap.start, opts.tol_snap, opts.endpoints)?;
    let theta_end = quantize_endpoint(unwrap.end, opts.tol_snap, opts.endpoints)?;
    Ok(AngleLift { theta_start, theta_end, unwrap })
}

/// Sample a class-valued path on `[0, 1]`, bisecting every incompatible step
/// until the sequence is Khalimsky compatible. The classifier may answer
/// `None` for parameters it cannot decide; nearby parameters are tried instead.
pub fn sample_class_path<F>(mut classify: F, initial_samples: usize, max_depth: usize) -> Result<KSequence>
where
    F: FnMut(f64) -> Result<Option<KClass>>,
{
    const PROBES: [f64; 7] = [0.5, 0.375, 0.625, 0.25, 0.75, 0.125, 0.875];

    fn probe<F: FnMut(f64) -> Result<Option<KClass>>>(
        classify: &mut F,
        t0: f64,
        t1: f64,
        depth: usize,
    ) -> Result<(f64, KClass)> {
        for frac in PROBES {
            let t = t0 + (t1 - t0) * frac;
            if let Some(c) = classify(t)? {
                return Ok((t, c));
            }
        }
        Err(Error::RefinementExhausted { depth })
    }

    #[allow(clippy::too_many_arguments)]
    fn fill<F: FnMut(f64) -> Result<Option<KClass>>>(
        classify: &mut F,
        (t0, c0): (f64, KClass),
        (t1, c1): (f64, KClass),
        depth: usize,
        max_depth: usize,
        out: &mut (Vec<KClass>, Vec<f64>),
    ) -> Result<()> {
        if k_step_compatible(c0, c1) {
            out.0.push(c1);
            out.1.push(t1);
            return Ok(());
        }
        if depth >= max_depth {
            return Err(Error::RefinementExhausted { depth });
        }
        let mid = probe(classify, t0, t1, depth)?;
        fill(classify, (t0, c0), mid, depth + 1, max_depth, out)?;
        fill(classify, mid, (t1, c1), depth + 1, max_depth, out)
    }

    let n = initial_samples.max(2);
    let mut grid = Vec::with_capacity(n);
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        let c = match classify(t)? {
            Some(c) => (t, c),
            None if k == 0 || k + 1 == n => {
                return Err(Error::InvalidInput(format!("path endpoint at t={t} cannot be classified")))
            }
            None => continue,
        };
        grid.push(c);
    }
    let mut out = (vec![grid[0].1], vec![grid[0].0]);
    for w in grid.windows(2) {
        fill(&mut classify, w[0], w[1], 0, max_depth, &mut out)?;
    }
    KSequence::new(out.0, out.1)
}
