use crate::plane::{Point, Vector};

/// One classical fourth-order Runge–Kutta step for an autonomous field.
pub(crate) fn rk4_step(field: &dyn Fn(Point) -> Vector, p: Point, h: f64) -> Point {
    let k1 = field(p);
    let k2 = field(p + k1 * (0.5 * h));
    let k3 = field(p + k2 * (0.5 * h));
    let k4 = field(p + k3 * h);
    p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Integrate for total time `duration` (may be negative) with steps no longer
/// than `max_step`.
pub(crate) fn flow_for(field: &dyn Fn(Point) -> Vector, p: Point, duration: f64, max_step: f64) -> Point {
    if duration == 0.0 {
        return p;
    }
    let n = (duration.abs() / max_step).ceil().max(1.0) as usize;
    let h = duration / n as f64;
    (0..n).fold(p, |q, _| rk4_step(field, q, h))
}
