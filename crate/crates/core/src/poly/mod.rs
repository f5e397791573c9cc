//! Sparse multivariate polynomials over a [`Field`](crate::scalar::Field),
//! monomial orders, division, and reduced Groebner bases.

pub(crate) mod division;
pub mod groebner;
mod monomial;
mod polynomial;
pub mod text;

pub use division::{divide, normal_form, s_polynomial, ReductionStep};
pub use groebner::{
    buchberger, buchberger_traced, buchberger_with_stats, verify_groebner, verify_groebner_exact,
    BuchbergerConfig, BuchbergerStats, GroebnerBasis, Origin, Trace, TraceSlot, Verification,
};
pub use monomial::{Monomial, MonomialOrder, OrderKind};
pub use polynomial::{PolySystem, Polynomial};
