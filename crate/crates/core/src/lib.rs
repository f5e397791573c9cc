//! Exact control allocation for tilt-rotor propeller-wing units.
//!
//! The forward map from propeller thrust and tilt angle to planar forces is
//! lifted to a system of polynomial equations, whose solutions are read off
//! as eigenvalues of multiplication matrices on the quotient algebra of a
//! Groebner basis.
//!
//! * [`aero`] forward maps and aircraft configuration
//! * [`poly`] polynomial arithmetic and Buchberger's algorithm
//! * [`zerodim`] normal sets, multiplication matrices and root extraction
//! * [`alloc`] polynomial system construction, allocation branches and the
//!   CG-level wrench distribution

// `!(x <= y)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aero;
pub mod alloc;
pub mod error;
pub mod poly;
pub mod scalar;
pub mod zerodim;

pub use error::{AeroError, AllocError, ConfigError, PolyError, SolverError};
pub use scalar::{Field, Rational, Zp};

/// Polynomials with exact rational coefficients.
pub type QPoly = poly::Polynomial<Rational>;
/// Polynomials over Z/(2^61 - 1).
pub type ModPoly = poly::Polynomial<Zp>;
/// Floating point polynomials.
pub type FPoly = poly::Polynomial<f64>;
pub type QSystem = poly::PolySystem<Rational>;
pub type QBasis = poly::GroebnerBasis<Rational>;
pub type FBasis = poly::GroebnerBasis<f64>;

pub type FlightCondition = aero::FlightCondition<f64>;
pub type PlanarForce = aero::PlanarForce<f64>;
pub type ActuatorInput = aero::ActuatorInput<f64>;
pub type AircraftConfig = aero::AircraftConfig<f64>;
pub type LocalFlow = aero::LocalFlow<f64>;
pub type FlightConditionF32 = aero::FlightCondition<f32>;
pub type AircraftConfigF32 = aero::AircraftConfig<f32>;
