//! Sphere sampling, reflections, circles on the unit sphere of R^3, and
//! random orthogonal maps.
//!
//! Constructions are validated at 1e-12; identities derived from them
//! (involution, isometry, circle membership) hold to 1e-9.

mod reflect;
mod rotation;
mod sphere;
pub mod vector;

pub use reflect::{reflect_axis, reflect_span_plane, reflect_through_line, span_partner};
pub use rotation::{random_rotation, Rotation};
pub use sphere::{circle_point, sample_circle, sample_half_sphere, sample_sphere, SphereCircle};
pub use vector::{UnitVector, UNIT_TOL};

/// Tolerance for identities derived from exact constructions.
pub const IDENTITY_TOL: f64 = 1e-9;
