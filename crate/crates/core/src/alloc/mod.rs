//! Force allocation for one propeller-wing unit and the CG-level layer above
//! it.
//!
//! The coupled branch inverts the design model exactly through its lifted
//! polynomial system. The decoupled branch treats the propeller as a free
//! thrust vector next to a clean wing and is valid down to hover. [`allocate`]
//! blends the two by airspeed and slipstream overlap.

mod allocator;
mod cg;
mod system;

use serde::{Deserialize, Serialize};

use crate::aero::{ActuatorInput, FlightCondition, PlanarForce};
use crate::error::AeroError;

pub use allocator::{
    allocate, allocate_coupled, allocate_decoupled, shared_cache, AllocOptions, Allocator,
    BlendPolicy, Candidate, CoupledSolve, SolvePath,
};
pub use cg::{
    allocate_surfaces, combine_uncertainty, diagonally_dominant, distribute_wrench, phi, CGWrench,
    CombinedUncertainty, PropellerLayout, SurfaceAllocation, SurfaceModel, UncertaintyModel,
    WrenchDistribution,
};
pub use system::{build_system, lifted_point, VARIABLES, VAR_C, VAR_S, VAR_T, VAR_V, VAR_W};

/// Requested planar force at a flight condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RequestWire", into = "RequestWire")]
pub struct AllocRequest {
    pub cond: FlightCondition<f64>,
    pub force: PlanarForce<f64>,
    /// The request is what remains after control surfaces took their share.
    /// Carried through for bookkeeping; allocation does not depend on it.
    pub surface_budget: bool,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RequestWire {
    v_inf: f64,
    rho: f64,
    alpha_inf: f64,
    F_x: f64,
    F_z: f64,
    #[serde(default)]
    surface_budget: bool,
}

impl From<RequestWire> for AllocRequest {
    fn from(w: RequestWire) -> Self {
        AllocRequest {
            cond: FlightCondition {
                v_inf: w.v_inf,
                rho: w.rho,
                alpha_inf: w.alpha_inf,
            },
            force: PlanarForce::new(w.F_x, w.F_z),
            surface_budget: w.surface_budget,
        }
    }
}

impl From<AllocRequest> for RequestWire {
    fn from(r: AllocRequest) -> Self {
        RequestWire {
            v_inf: r.cond.v_inf,
            rho: r.cond.rho,
            alpha_inf: r.cond.alpha_inf,
            F_x: r.force.fx,
            F_z: r.force.fz,
            surface_budget: r.surface_budget,
        }
    }
}

impl AllocRequest {
    pub fn new(cond: FlightCondition<f64>, force: PlanarForce<f64>) -> Self {
        AllocRequest {
            cond,
            force,
            surface_budget: false,
        }
    }

    pub fn validate(&self) -> Result<(), AeroError> {
        self.cond.validate()?;
        if !self.force.is_finite() {
            return Err(AeroError::InvalidParameter {
                what: "force",
                detail: "must be finite".into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Coupled,
    Decoupled,
    Blended,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Coupled => "coupled",
            Branch::Decoupled => "decoupled",
            Branch::Blended => "blended",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AllocResult {
    pub command: ActuatorInput<f64>,
    pub branch: Branch,
    /// Relative force error against the design model; absent where that
    /// model is undefined (`v_inf = 0`).
    pub residual_design: Option<f64>,
    /// Relative force error against the full model.
    pub residual_full: f64,
    /// Physically admissible roots found by the coupled solver.
    pub n_candidates: usize,
    /// Wall time of the allocation, seconds.
    pub latency: f64,
    /// Weight of the coupled command in the blend.
    pub weight: f64,
    pub path: SolvePath,
    /// The command was clamped to actuator limits.
    pub saturated: bool,
}
