use thiserror::Error;

use crate::plane::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero vector encountered at parameter {t:?}")]
    ZeroVector { t: Option<f64> },

    #[error("forbidden Khalimsky transition at step {0}")]
    ForbiddenTransition(usize),

    #[error("adaptive refinement exhausted at depth {depth}")]
    RefinementExhausted { depth: usize },

    #[error("endpoint angle {angle} is not within snapping tolerance of a quarter turn")]
    EndpointNotOnAxisClass { angle: f64 },

    #[error("endpoint pair landed on an even (horizontal) class at parameter {t}")]
    EndpointEvenClass { t: f64 },

    #[error("integration step too large: tangent deviation {deviation} rad")]
    StepTooLarge { deviation: f64 },

    #[error("leaf never left the working box within {steps} steps")]
    BoxNeverExited { steps: usize },

    #[error("points coincide (diagonal)")]
    DiagonalPoint,

    #[error("point lies in the ambiguous band at distance {distance} from the leaf")]
    AmbiguousSide { distance: f64 },

    #[error("base point index {0} is outside the enumerated scheme")]
    IndexOutOfScheme(usize),

    #[error("suspected fixed point near {at:?} (|f(z) - z| = {displacement})")]
    FixedPointSuspected { at: Point, displacement: f64 },

    #[error("orbit of {seed:?} does not escape the working box")]
    NonEscaping { seed: Point },

    #[error("perturbation support touches protected orbit point {0:?}")]
    OrbitTouched(Point),

    #[error("invalid witness: {0}")]
    WitnessInvalid(String),

    #[error("line is not positively transverse to the foliation")]
    NotTransverse,

    #[error("zero tangent on sampled path at vertex {0}")]
    ZeroTangent(usize),

    #[error("quarter count {0} is odd")]
    ParityViolation(i64),

    #[error("index depends on choices: {0}")]
    ChoiceDependence(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
