//! Acceptance criteria, one pass/fail line each. Runs without the libtest
//! harness so the summary is always printed.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use leafwind_core::brouwer::{brouwer_line_check, flow_time_one, DEFAULT_FLOW_STEP};
use leafwind_core::foliation::{
    forward_on_leaf, horizontal, leaf_trace, reeb_discontinuity_witness, theta_dot, BandSpiral, Direction, Foliation,
    PlaneHomeo, ThetaOptions, TraceOptions,
};
use leafwind_core::index::{theorem_a_check, IndexValue, Method, Scenario};
use leafwind_core::khalimsky::{
    lift_sequence, sample_class_path, sigma, sigma_tilde, KClass, KSequence,
};
use leafwind_core::plane::{pt, vec2, wrap_pi, BoundingBox, Point};
use leafwind_core::whitney::{mu, property_suite, tau, BasePointScheme, Corpus, SampledSet};
use leafwind_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N_RANGE: std::ops::RangeInclusive<i64> = 0..=5;
const FLOAT_ORACLE_TOL: f64 = 1e-6;
const THEOREM_A_BUDGET: Duration = Duration::from_secs(60);
const CHOICES_PER_SCENARIO: usize = 30;
const BUMPS_PER_SCENARIO: usize = 10;
const SIGMA_TILDE_POINTS: usize = 10_000;
const RANDOM_SEQUENCES: usize = 1_000;
const THETA_PAIRS: usize = 1_000;
const CONTINUITY_PATHS: usize = 100;
const LEAVES_PER_N: usize = 20;
const POINTS_PER_LEAF: usize = 100;
const WHITNEY_TRIALS: usize = 1_000;
const WHITNEY_GOLDEN_TERMS: usize = 20;
const MU_TWO_POINT_GOLDEN: f64 = 0.39853441844876375;
const TAU_RAY_GOLDEN: f64 = 0.6564948139599239;
const CONVERGENCE_TOL: f64 = 1e-6;

type Outcome = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn expected(n: i64) -> IndexValue {
    IndexValue::from_quarters(2 * n).unwrap()
}

fn theorem_a() -> Outcome {
    let start = Instant::now();
    for n in N_RANGE {
        let r = theorem_a_check(&Scenario::band_spiral(n));
        ensure(r.verdict && r.results.len() == 3, || format!("n={n}: {r:?}"))?;
        for m in &r.results {
            ensure(m.value == expected(n) && m.value.quarters() == 2 * n, || {
                format!("n={n}: {} gave {}", m.method, m.value)
            })?;
            let err = (m.float_oracle - n as f64 / 2.0).abs();
            ensure(err < FLOAT_ORACLE_TOL, || format!("n={n}: {} float oracle off by {err:e}", m.method))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < THEOREM_A_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("ph = leroux = foliation = n/2 for n = 0..5 in {:.1} s", elapsed.as_secs_f64()))
}

fn choice_independence() -> Outcome {
    for n in N_RANGE {
        let s = Scenario::band_spiral(n);
        let parts = s.build().map_err(|e| format!("n={n}: {e}"))?;
        let c = s.choice_independence(&parts).map_err(|e| format!("n={n}: {e}"))?;
        let matches = c.values.iter().filter(|(_, v)| *v == expected(n)).count();
        ensure(c.values.len() == CHOICES_PER_SCENARIO && matches == CHOICES_PER_SCENARIO, || {
            format!("n={n}: {matches}/{} match", c.values.len())
        })?;
    }
    Ok(format!("{CHOICES_PER_SCENARIO}/{CHOICES_PER_SCENARIO} exact matches for each n"))
}

fn isotopy_invariance() -> Outcome {
    for n in N_RANGE {
        let s = Scenario::band_spiral(n);
        let parts = s.build().map_err(|e| format!("n={n}: {e}"))?;
        let (base, bumped) = s.isotopy_invariance(&parts, BUMPS_PER_SCENARIO).map_err(|e| format!("n={n}: {e}"))?;
        ensure(base == expected(n), || format!("n={n}: base {base}"))?;
        ensure(bumped.len() == BUMPS_PER_SCENARIO && bumped.iter().all(|v| *v == base), || {
            format!("n={n}: {bumped:?}")
        })?;
    }
    Ok(format!("{BUMPS_PER_SCENARIO} rel-orbit bumps per scenario leave the Le Roux index unchanged"))
}

fn random_compatible_sequence(rng: &mut ChaCha8Rng) -> KSequence {
    let len = rng.gen_range(1..=40);
    let mut k = rng.gen_range(-1..=2);
    let mut out = vec![KClass::from_int(k)];
    for _ in 1..len {
        k += rng.gen_range(-1..=1);
        out.push(KClass::from_int(k));
    }
    KSequence::uniform(out).unwrap()
}

fn khalimsky_suite() -> Outcome {
    use KClass::*;
    let table = [(0.0, Zero), (PI / 2.0, One), (PI, Two), (3.0 * PI / 2.0, MinusOne)];
    for (t, c) in table {
        ensure(sigma(t, 0.0) == c, || format!("σ({t}) ≠ {c}"))?;
    }
    for k in -8i64..=8 {
        ensure(sigma_tilde(k as f64 * PI) == 2 * k, || format!("σ̃({k}π) = {}", sigma_tilde(k as f64 * PI)))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..SIGMA_TILDE_POINTS {
        let t = rng.gen_range(-50.0..50.0);
        ensure(KClass::from_int(sigma_tilde(t)) == sigma(t.rem_euclid(TAU), 0.0), || format!("diagram fails at {t}"))?;
    }
    for _ in 0..RANDOM_SEQUENCES {
        let seq = random_compatible_sequence(&mut rng);
        let first = seq.samples()[0].value();
        let base = lift_sequence(&seq, first).map_err(|e| e.to_string())?;
        let shift = 4 * rng.gen_range(-5..=5);
        let shifted = lift_sequence(&seq, first + shift).map_err(|e| e.to_string())?;
        ensure(base.iter().zip(&shifted).all(|(a, b)| b - a == shift), || format!("lift not unique mod 4: {seq:?}"))?;
        ensure(lift_sequence(&seq, first + 1).is_err(), || "lift accepted a wrong start class".into())?;
        let rev = lift_sequence(&seq.reversed(), *base.last().unwrap()).map_err(|e| e.to_string())?;
        ensure(rev.iter().rev().eq(base.iter()), || format!("reversal not antisymmetric: {seq:?}"))?;
    }
    Ok(format!(
        "σ table, σ̃(kπ) = 2k, diagram on {SIGMA_TILDE_POINTS} points, {RANDOM_SEQUENCES} sequences"
    ))
}

fn random_pair(rng: &mut ChaCha8Rng, bbox: &BoundingBox) -> (Point, Point) {
    let z = pt(rng.gen_range(bbox.min.x..bbox.max.x), rng.gen_range(bbox.min.y..bbox.max.y));
    let mut zp = pt(rng.gen_range(bbox.min.x..bbox.max.x), rng.gen_range(bbox.min.y..bbox.max.y));
    if rng.gen_bool(0.25) {
        zp.y = z.y;
    }
    (z, zp)
}

fn horizontal_reduction(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let f = horizontal();
    let opts = ThetaOptions::default();
    let bbox = BoundingBox::square(4.0);
    for _ in 0..THETA_PAIRS {
        let (z, zp) = random_pair(rng, &bbox);
        let d = zp - z;
        let got = theta_dot(&f, z, zp, &opts);
        let want = sigma(d.dy.atan2(d.dx), 0.0);
        match got {
            Ok(c) => ensure(c == want, || format!("θ̇({z}, {zp}) = {c}, σ∘Angle = {want}"))?,
            Err(Error::AmbiguousSide { .. }) if d.dy.abs() < 2.0 * opts.tol_leaf => {}
            Err(e) => return Err(format!("θ̇({z}, {zp}): {e}")),
        }
    }
    Ok(())
}

/// A point backward along the leaf through `z`.
fn backward_on_leaf(f: &Foliation, z: Point, bbox: &BoundingBox, opts: &TraceOptions) -> Point {
    let arc = leaf_trace(f, z, Direction::Backward, bbox, opts).unwrap();
    arc.arc.vertices()[arc.arc.len().min(40) - 1]
}

fn equivariance(rng: &mut ChaCha8Rng) -> std::result::Result<usize, String> {
    let f = BandSpiral::new(1).orthogonal();
    let homeos = [
        PlaneHomeo::translation(vec2(0.3, -0.2)),
        PlaneHomeo::shear(0.5),
        PlaneHomeo::strip_bend(0.2).unwrap(),
    ];
    let window = BoundingBox::new(pt(-1.5, 0.5), pt(1.5, 2.5));
    let opts = ThetaOptions { bbox: BoundingBox::square(3.0), ..ThetaOptions::default() };
    let mut skipped = 0;
    for h in &homeos {
        let pushed = f.pushforward(h);
        for k in 0..THETA_PAIRS {
            let (z, zp) = match k % 4 {
                0 => {
                    let z = pt(rng.gen_range(-1.5..1.5), rng.gen_range(0.5..2.5));
                    (z, forward_on_leaf(&f, z, rng.gen_range(0.05..0.5), &opts.trace).unwrap())
                }
                1 => {
                    let z = pt(rng.gen_range(-1.5..1.5), rng.gen_range(0.5..2.5));
                    (z, backward_on_leaf(&f, z, &opts.bbox, &opts.trace))
                }
                _ => random_pair(rng, &window),
            };
            let before = theta_dot(&f, z, zp, &opts);
            let after = theta_dot(&pushed, h.apply(z), h.apply(zp), &opts);
            match (before, after) {
                (Ok(a), Ok(b)) => ensure(a == b, || format!("{}: θ̇({z}, {zp}) = {a} but pushed gives {b}", h.label()))?,
                (Err(Error::AmbiguousSide { .. }), _) | (_, Err(Error::AmbiguousSide { .. })) => skipped += 1,
                (a, b) => return Err(format!("{}: θ̇({z}, {zp}): {a:?} / {b:?}", h.label())),
            }
        }
    }
    Ok(skipped)
}

/// Random pair paths `z(t)`, `z′(t) = z(t) + r(t)·e^{iφ(t)}` with `φ` linear, so
/// the lift difference is `σ̃(φ(1)) − σ̃(φ(0))` once `φ(0)` lies in `(−π, π]`.
fn continuity(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let f = horizontal();
    let opts = ThetaOptions::default();
    for _ in 0..CONTINUITY_PATHS {
        let a = pt(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let b = pt(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let phi0 = wrap_pi(rng.gen_range(-PI..PI));
        let phi1 = phi0 + rng.gen_range(-3.0 * PI..3.0 * PI);
        let (r0, r1) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
        let pair = |t: f64| {
            let z = a.lerp(b, t);
            let phi = phi0 + (phi1 - phi0) * t;
            let r = r0 + (r1 - r0) * t;
            (z, pt(z.x + r * phi.cos(), z.y + r * phi.sin()))
        };
        let seq = sample_class_path(
            |t| {
                let (z, zp) = pair(t);
                match theta_dot(&f, z, zp, &opts) {
                    Ok(c) => Ok(Some(c)),
                    Err(Error::AmbiguousSide { .. }) => Ok(None),
                    Err(e) => Err(e),
                }
            },
            32,
            40,
        )
        .map_err(|e| e.to_string())?;
        ensure(seq.is_compatible(), || "sampled class path is not compatible".into())?;
        let start = sigma_tilde(phi0);
        let lift = lift_sequence(&seq, start).map_err(|e| e.to_string())?;
        let want = sigma_tilde(phi1) - start;
        ensure(lift.last().unwrap() - start == want, || {
            format!("lift difference {} ≠ {want} for φ {phi0} → {phi1}", lift.last().unwrap() - start)
        })?;
    }
    Ok(())
}

fn discontinuity() -> std::result::Result<(), String> {
    let trace = TraceOptions { step: 1.0 / 32.0, max_steps: 200_000, ..TraceOptions::default() };
    let w = reeb_discontinuity_witness(&[0.1, 0.03, 0.01, 3e-3, 1e-3], &trace).map_err(|e| e.to_string())?;
    let f = BandSpiral::new(1).foliation();
    let wide = ThetaOptions { bbox: BoundingBox::new(pt(-10.0, 0.0), pt(1e4, 3.0)), trace, ..ThetaOptions::default() };
    for (z, zp) in &w.pairs {
        let c = theta_dot(&f, *z, *zp, &wide).map_err(|e| e.to_string())?;
        ensure(c == KClass::Zero, || format!("θ̇({z}, {zp}) = {c}"))?;
    }
    let gaps: Vec<f64> = w.pairs.iter().map(|(z, zp)| z.distance(w.limit.0) + zp.distance(w.limit.1)).collect();
    ensure(gaps.windows(2).all(|g| g[1] < g[0]) && *gaps.last().unwrap() < 1e-2, || format!("pairs do not converge: {gaps:?}"))?;
    let limit = theta_dot(&f, w.limit.0, w.limit.1, &ThetaOptions::default()).map_err(|e| e.to_string())?;
    ensure(limit == KClass::One, || format!("limit class {limit}"))
}

fn theta_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    horizontal_reduction(&mut rng).map_err(|e| format!("horizontal reduction: {e}"))?;
    let skipped = equivariance(&mut rng).map_err(|e| format!("equivariance: {e}"))?;
    continuity(&mut rng).map_err(|e| format!("continuity: {e}"))?;
    discontinuity().map_err(|e| format!("discontinuity witness: {e}"))?;
    Ok(format!(
        "reduction, equivariance ({skipped} gray-zone pairs skipped), {CONTINUITY_PATHS} continuous paths, Reeb witness"
    ))
}

fn brouwer_lines() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let bbox = BoundingBox::working();
    let trace = TraceOptions::default();
    for n in N_RANGE {
        let b = BandSpiral::new(n);
        let f = flow_time_one(b.field(), DEFAULT_FLOW_STEP, format!("flow({n})")).map_err(|e| e.to_string())?;
        let fol = b.orthogonal();
        for _ in 0..LEAVES_PER_N {
            let seed = pt(rng.gen_range(-4.0..4.0), rng.gen_range(-2.0..5.0));
            let ok = brouwer_line_check(&f, &fol, seed, &bbox, POINTS_PER_LEAF, 1e-4, &trace)
                .map_err(|e| format!("n={n}, leaf {seed}: {e}"))?;
            ensure(ok, || format!("n={n}: leaf through {seed} is not a Brouwer line"))?;
        }
    }
    Ok(format!("{LEAVES_PER_N} leaves × {POINTS_PER_LEAF} points for each n"))
}

/// Level-0 base points, re-derived: the integer points of `[−4, 3]²` ordered by
/// max-norm, angle in `[0, 2π)`, then norm.
fn oracle_base_points(n: usize) -> Vec<Point> {
    let mut pts: Vec<Point> = (-4..4).flat_map(|j| (-4..4).map(move |k| pt(j as f64, k as f64))).collect();
    let key = |p: &Point| {
        let a = if p.x == 0.0 && p.y == 0.0 { 0.0 } else { p.y.atan2(p.x).rem_euclid(TAU) };
        (p.x.abs().max(p.y.abs()), a, p.x.hypot(p.y))
    };
    pts.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    pts.truncate(n);
    pts
}

fn m(p: Point, q: Point) -> f64 {
    1.0 / (1.0 + p.distance(q))
}

fn whitney_suite() -> Outcome {
    let results = property_suite(WHITNEY_TRIALS, 7, Corpus::Mixed).map_err(|e| e.to_string())?;
    for r in &results {
        ensure(r.passed(), || format!("group {}: {} failures, e.g. {:?}", r.group, r.failures, r.counterexample))?;
    }
    let q = oracle_base_points(WHITNEY_GOLDEN_TERMS);
    let weight = |i: usize| 0.5f64.powi(i as i32 + 1);
    let two_oracle: f64 = q.iter().enumerate().map(|(i, q)| weight(i) * (m(Point::ORIGIN, *q) - m(pt(1.0, 0.0), *q)).abs()).sum();
    let ray_oracle: f64 = q
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let near = pt(q.x.clamp(0.0, 4.0), 0.0);
            weight(i) * (m(near, *q) - m(Point::ORIGIN, *q).min(m(pt(4.0, 0.0), *q)))
        })
        .sum();
    let scheme = BasePointScheme::new(WHITNEY_GOLDEN_TERMS);
    let two = SampledSet::new(vec![Point::ORIGIN, pt(1.0, 0.0)]).map_err(|e| e.to_string())?;
    let mu_two = mu(&scheme, &two, WHITNEY_GOLDEN_TERMS).map_err(|e| e.to_string())?.value;
    let trace = TraceOptions { step: 1.0 / 1024.0, ..TraceOptions::default() };
    let tau_ray = tau(&horizontal(), Point::ORIGIN, &scheme, WHITNEY_GOLDEN_TERMS, &[4.0], &trace)
        .map_err(|e| e.to_string())?[0]
        .value;
    let bound = 2f64.powi(-32);
    for (name, got, oracle, golden) in
        [("μ two-point", mu_two, two_oracle, MU_TWO_POINT_GOLDEN), ("τ ray", tau_ray, ray_oracle, TAU_RAY_GOLDEN)]
    {
        ensure((got - golden).abs() < bound && (oracle - golden).abs() < bound, || {
            format!("{name}: computed {got}, oracle {oracle}, golden {golden}")
        })?;
    }
    Ok(format!("{} groups × {WHITNEY_TRIALS} trials, goldens within 2^-32", results.len()))
}

fn convergence() -> Outcome {
    let mut worst = 0.0f64;
    for n in N_RANGE {
        let s = Scenario::band_spiral(n);
        let mut fine = s.clone();
        fine.numerics = s.numerics.refined();
        let (a, b) = (theorem_a_check(&s), theorem_a_check(&fine));
        ensure(a.verdict && b.verdict, || format!("n={n}: {:?} / {:?}", a.failure, b.failure))?;
        for m in Method::ALL {
            let (ra, rb) = (a.result(m).unwrap(), b.result(m).unwrap());
            ensure(ra.value == rb.value, || format!("n={n}: {m} moved from {} to {}", ra.value, rb.value))?;
            let d = (ra.float_oracle - rb.float_oracle).abs();
            worst = worst.max(d);
            ensure(d < CONVERGENCE_TOL, || format!("n={n}: {m} float oracle moved by {d:e}"))?;
        }
    }
    Ok(format!("halved steps change no value; largest float change {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("theorem A harness", theorem_a),
        ("choice independence", choice_independence),
        ("Le Roux isotopy invariance", isotopy_invariance),
        ("Khalimsky suite", khalimsky_suite),
        ("θ̇ suite", theta_suite),
        ("Brouwer lines", brouwer_lines),
        ("Whitney suite", whitney_suite),
        ("step-halving convergence", convergence),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({secs:.1} s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} ({secs:.1} s)", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
