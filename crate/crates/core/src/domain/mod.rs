//! Shared domain types: points, fields, operator orders, polynomials,
//! quadrature settings and geometric constants.

pub mod field;
pub mod geom;
pub mod order;
pub mod point;
pub mod polynomial;
pub mod radial;
pub mod spec;

pub use field::{DecayHint, ScalarField, Smoothness};
pub use geom::{ball_volume, factorial, gamma_half, geom_constants, sphere_area, GeomConstants};
pub use order::FracOrder;
pub use point::{Point, MAX_DIM};
pub use polynomial::{poly_fit, MultiIndex, PolyFit, Polynomial};
pub use radial::{Envelope, RadialForm};
pub use spec::QuadratureSpec;
