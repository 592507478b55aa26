use crate::brouwer::BrouwerMap;
use crate::error::{Error, Result};
use crate::foliation::{Foliation, LeafChart, PlaneHomeo, TraceOptions};
use crate::plane::{BoundingBox, OrientedLine, Point};

/// Distance within which a point counts as lying on a row or lattice point.
pub const ROW_TOL: f64 = 1e-6;

/// A homeomorphism carrying `Γ₁` onto `ℝ×{1}` and `Γ₂` onto `ℝ×{2}`.
#[derive(Debug, Clone)]
pub struct StrMap {
    pub h: PlaneHomeo,
    /// Whether `h` keeps each line's orientation pointing toward `+x`; recorded,
    /// not required.
    pub keeps_orientation: Option<(bool, bool)>,
}

impl StrMap {
    /// Checks on the sampled lines that `h(Γ_i)` lies on `ℝ×{i}` within
    /// [`ROW_TOL`].
    pub fn certify(h: PlaneHomeo, lines: (&OrientedLine, &OrientedLine), bbox: &BoundingBox) -> Result<Self> {
        let mut keeps = [false; 2];
        for (k, (line, row)) in [(lines.0, 1.0), (lines.1, 2.0)].into_iter().enumerate() {
            let rep: Vec<Point> = line.samples_in(bbox);
            if rep.len() < 2 {
                return Err(Error::WitnessInvalid(format!("line {} misses the working box", k + 1)));
            }
            let image: Vec<Point> = rep.iter().map(|p| h.apply(*p)).collect();
            if let Some(w) = image.iter().find(|w| !((w.y - row).abs() <= ROW_TOL)) {
                return Err(Error::WitnessInvalid(format!("{} sends line {} to {w}, off the row y = {row}", h.label(), k + 1)));
            }
            keeps[k] = image.last().unwrap().x > image[0].x;
        }
        Ok(StrMap { h, keeps_orientation: Some((keeps[0], keeps[1])) })
    }

    /// A StrMap taken on trust (used when the lines meet and no map exists).
    pub fn unchecked(h: PlaneHomeo) -> Self {
        StrMap { h, keeps_orientation: None }
    }
}

/// Why `h` normalizes the map to one of the model maps.
#[derive(Debug, Clone, PartialEq)]
pub enum Justification {
    /// `h ∘ f ∘ h⁻¹` is itself a model map.
    ExplicitModel,
    /// `h` straightens the two trajectories and a leaf of the transverse
    /// foliation through `barrier` separates them.
    StrDaggerSeparated { barrier: Point },
}

/// A homeomorphism sending two orbits of `f` onto `ℤ×{1}` and `ℤ×{2}`.
#[derive(Debug, Clone)]
pub struct HandelWitness {
    h: PlaneHomeo,
    justification: Justification,
}

/// Iterates checked on each side of the seeds.
const ORBIT_CHECK: i64 = 3;

impl HandelWitness {
    /// Checks `h(f^k(x_i)) ∈ ℤ×{i}` for `|k| ≤ 3`, and for a separated witness that
    /// the leaf of `transverse` through the barrier point stays strictly between
    /// the rows after applying `h`, on a horizontal within [`ROW_TOL`].
    pub fn certify(
        f: &BrouwerMap,
        h: PlaneHomeo,
        seeds: (Point, Point),
        justification: Justification,
        transverse: &Foliation,
        bbox: &BoundingBox,
        trace: &TraceOptions,
    ) -> Result<Self> {
        let w = HandelWitness { h, justification };
        for (seed, row) in [(seeds.0, 1), (seeds.1, 2)] {
            let mut prev: Option<f64> = None;
            for k in -ORBIT_CHECK..=ORBIT_CHECK {
                let p = w.h.apply(f.iterate(seed, k));
                w.check_lattice_point(p, row)?;
                if let Some(x) = prev {
                    if (p.x - x).abs().round() != 1.0 {
                        return Err(Error::WitnessInvalid(format!("orbit of {seed} skips lattice points near {p}")));
                    }
                }
                prev = Some(p.x);
            }
        }
        if let Justification::StrDaggerSeparated { barrier } = w.justification {
            let chart = LeafChart::trace(transverse, barrier, bbox, trace)?;
            let level = w.h.apply(barrier).y;
            if !(1.0 < level && level < 2.0) {
                return Err(Error::WitnessInvalid(format!("barrier {barrier} is not between the rows")));
            }
            if let Some(p) = chart.vertices().iter().map(|p| w.h.apply(*p)).find(|q| !((q.y - level).abs() <= ROW_TOL)) {
                return Err(Error::WitnessInvalid(format!("barrier leaf leaves its row near {p}")));
            }
        }
        Ok(w)
    }

    pub fn homeo(&self) -> &PlaneHomeo {
        &self.h
    }

    pub fn justification(&self) -> &Justification {
        &self.justification
    }

    /// `h ∘ f ∘ h⁻¹`.
    pub fn normalized(&self, f: &BrouwerMap) -> BrouwerMap {
        f.conjugate(&self.h)
    }

    pub(crate) fn check_lattice_point(&self, w: Point, row: i32) -> Result<()> {
        if (w.y - f64::from(row)).abs() <= ROW_TOL && (w.x - w.x.round()).abs() <= ROW_TOL {
            Ok(())
        } else {
            Err(Error::WitnessInvalid(format!("{w} is not on the lattice row ℤ×{{{row}}}")))
        }
    }
}
