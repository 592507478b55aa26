//! Planar index computations for non-singular flows, Brouwer homeomorphisms and
//! transverse foliations.
//!
//! Three integer-valued (in half units) indices are computed between two
//! distinguished objects of the plane:
//!
//! * the winding index of a non-singular vector field between two leaves,
//! * the Le Roux index of a Brouwer homeomorphism between two orbits, obtained by
//!   lifting the quantized angle of the displacement field,
//! * the foliation index between two oriented lines transverse to a foliation,
//!   obtained by lifting the topological angle of pairs pushed along leaves.
//!
//! All index arithmetic is carried out in integer quarter turns; floating point
//! is confined to angle unwrapping under a quarter-turn guard.

pub mod brouwer;
pub mod error;
pub mod foliation;
pub mod index;
pub mod khalimsky;
pub mod plane;
pub mod whitney;

mod integrate;

pub use error::{Error, Result};
pub use index::{IndexValue, Method, Scenario};
pub use khalimsky::KClass;
pub use plane::{BoundingBox, Point, PolyPath, Vector};
