//! Planar forward map of a tilting propeller mounted ahead of a wing section.
//!
//! Forces are expressed in the body frame: `x` points forward along the
//! chord line, `z` points up. The tilt angle `delta` rotates the thrust axis
//! from `x` (cruise, `delta = 0`) to `z` (hover, `delta = pi/2`). The free
//! stream approaches from the front with angle of attack `alpha_inf`.
//!
//! Two maps are provided:
//!
//! * [`forward_full`] composes actuator-disk theory, slipstream contraction,
//!   chord coverage and clean-wing aerodynamics.
//! * [`forward_design`] is the simplified map the allocator inverts; its
//!   simplifications are toggled by [`DesignFlags`].

mod config;
mod interaction;
mod propeller;
mod wing;

use serde::{Deserialize, Serialize};

use crate::error::AeroError;
use crate::scalar::Real;

pub use config::{AircraftConfig, Limits, MountingGeometry, PropellerParams, WingParams};
pub use interaction::{
    forward_design, forward_full, local_flow, overlap_blend, DesignFlags, Overlap,
};
pub use propeller::{flow_decompose, induced_velocity, thrust_from_speed};
pub use wing::{clean_wing_force, wing_alpha, wing_coefficients, wing_forces, WingForce};

/// Free-stream state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlightCondition<F> {
    /// Airspeed magnitude, m/s.
    pub v_inf: F,
    /// Air density, kg/m³.
    pub rho: F,
    /// Free-stream angle of attack, rad.
    pub alpha_inf: F,
}

impl<F: Real> FlightCondition<F> {
    pub fn new(v_inf: F, rho: F, alpha_inf: F) -> Result<Self, AeroError> {
        let cond = FlightCondition {
            v_inf,
            rho,
            alpha_inf,
        };
        cond.validate()?;
        Ok(cond)
    }

    /// Builds the condition from body-axis velocity components `u` (forward)
    /// and `w` (downward relative wind, positive for positive angle of attack).
    pub fn from_components(u: F, w: F, rho: F) -> Result<Self, AeroError> {
        if u.is_zero() && w.is_zero() {
            return Self::new(F::zero(), rho, F::zero());
        }
        if !(u > F::zero()) {
            return Err(AeroError::InvalidParameter {
                what: "u",
                detail: format!("{u} must be positive"),
            });
        }
        Self::new(u.hypot(w), rho, (w / u).atan())
    }

    pub fn validate(&self) -> Result<(), AeroError> {
        if !(self.rho > F::zero() && self.rho.is_finite()) {
            return Err(AeroError::InvalidParameter {
                what: "rho",
                detail: format!("{} must be positive", self.rho),
            });
        }
        if !(self.v_inf >= F::zero() && self.v_inf.is_finite()) {
            return Err(AeroError::InvalidParameter {
                what: "v_inf",
                detail: format!("{} must be non-negative", self.v_inf),
            });
        }
        if !(self.alpha_inf.abs() < F::FRAC_PI_2()) {
            return Err(AeroError::InvalidParameter {
                what: "alpha_inf",
                detail: format!("|{}| must be below pi/2", self.alpha_inf),
            });
        }
        Ok(())
    }

    /// Free-stream dynamic pressure `rho v^2 / 2`.
    pub fn dynamic_pressure(&self) -> F {
        F::lit(0.5) * self.rho * self.v_inf * self.v_inf
    }
}

/// Thrust and tilt angle of one propeller.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorInput<F> {
    /// Thrust, N.
    #[serde(rename = "T")]
    pub thrust: F,
    /// Tilt angle, rad.
    pub delta: F,
}

impl<F: Real> ActuatorInput<F> {
    pub fn new(thrust: F, delta: F) -> Self {
        ActuatorInput { thrust, delta }
    }

    pub fn validate(&self, cfg: &AircraftConfig<F>) -> Result<(), AeroError> {
        if !(self.thrust >= F::zero() && self.thrust <= cfg.propeller.max_thrust) {
            return Err(AeroError::InvalidParameter {
                what: "T",
                detail: format!("{} outside [0, {}]", self.thrust, cfg.propeller.max_thrust),
            });
        }
        if !(self.delta >= cfg.limits.delta_min && self.delta <= cfg.limits.delta_max) {
            return Err(AeroError::InvalidParameter {
                what: "delta",
                detail: format!(
                    "{} outside [{}, {}]",
                    self.delta, cfg.limits.delta_min, cfg.limits.delta_max
                ),
            });
        }
        Ok(())
    }

    /// Clamps thrust and tilt into the actuator limits.
    pub fn saturate(&self, cfg: &AircraftConfig<F>) -> Self {
        ActuatorInput {
            thrust: self.thrust.max(F::zero()).min(cfg.propeller.max_thrust),
            delta: cfg.limits.clamp_delta(self.delta),
        }
    }
}

/// Force in the body x-z plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanarForce<F> {
    #[serde(rename = "F_x")]
    pub fx: F,
    #[serde(rename = "F_z")]
    pub fz: F,
}

impl<F: Real> PlanarForce<F> {
    pub fn new(fx: F, fz: F) -> Self {
        PlanarForce { fx, fz }
    }

    pub fn zero() -> Self {
        PlanarForce {
            fx: F::zero(),
            fz: F::zero(),
        }
    }

    pub fn norm(&self) -> F {
        self.fx.hypot(self.fz)
    }

    pub fn is_finite(&self) -> bool {
        self.fx.is_finite() && self.fz.is_finite()
    }

    /// `|self - reference| / |reference|`, or the absolute error when the
    /// reference vanishes.
    pub fn relative_error(&self, reference: &Self) -> F {
        let err = (*self - *reference).norm();
        let scale = reference.norm();
        if scale > F::zero() {
            err / scale
        } else {
            err
        }
    }
}

impl<F: Real> std::ops::Add for PlanarForce<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        PlanarForce {
            fx: self.fx + rhs.fx,
            fz: self.fz + rhs.fz,
        }
    }
}

impl<F: Real> std::ops::Sub for PlanarForce<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        PlanarForce {
            fx: self.fx - rhs.fx,
            fz: self.fz - rhs.fz,
        }
    }
}

/// Flow quantities seen by the wing behind a thrusting propeller.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalFlow<F> {
    /// Free-stream component along the thrust axis, m/s.
    pub v_parallel: F,
    /// Free-stream component normal to the thrust axis, m/s.
    pub v_perp: F,
    /// Fully developed slipstream speed, m/s.
    pub v_i: F,
    /// Slipstream speed at the disk, m/s.
    pub v_ip: F,
    /// Slipstream speed at the wing, m/s.
    pub v_iw: F,
    /// Local wing angle of attack, rad.
    pub alpha_w: F,
    /// Fraction of the chord covered by the slipstream.
    pub kappa: F,
    /// Distance from the propeller center to where the slipstream edge
    /// crosses the chord line, m.
    pub x_w: F,
    /// Contracted slipstream radius, m.
    pub r_local: F,
}

impl<F: Real> LocalFlow<F> {
    /// Squared local airspeed at the wing.
    pub fn airspeed_sq(&self) -> F {
        self.v_iw * self.v_iw + self.v_perp * self.v_perp
    }

    /// Magnitude of the fully developed slipstream velocity.
    pub fn slipstream_speed(&self) -> F {
        self.v_i.hypot(self.v_perp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flight_condition_validation() {
        assert!(FlightCondition::new(10.0, 1.2, 0.1).is_ok());
        assert!(FlightCondition::new(10.0, 0.0, 0.1).is_err());
        assert!(FlightCondition::new(-1.0, 1.2, 0.1).is_err());
        assert!(FlightCondition::new(10.0, 1.2, 1.6).is_err());
        let c = FlightCondition::from_components(10.0, 1.0, 1.2).unwrap();
        assert!((c.v_inf - 101f64.sqrt()).abs() < 1e-12);
        assert!((c.alpha_inf - 0.1f64.atan()).abs() < 1e-15);
        assert_eq!(
            FlightCondition::from_components(0.0, 0.0, 1.2)
                .unwrap()
                .v_inf,
            0.0
        );
        assert!(FlightCondition::from_components(-3.0, 1.0, 1.2).is_err());
    }

    #[test]
    fn actuator_limits() {
        let cfg = AircraftConfig::<f64>::reference();
        assert!(ActuatorInput::new(100.0, 0.3).validate(&cfg).is_ok());
        assert!(ActuatorInput::new(500.0, 0.3).validate(&cfg).is_err());
        assert!(ActuatorInput::new(100.0, -0.1).validate(&cfg).is_err());
        let s = ActuatorInput::new(500.0, -0.1).saturate(&cfg);
        assert_eq!((s.thrust, s.delta), (400.0, 0.0));
    }

    #[test]
    fn force_json_names() {
        let f = PlanarForce::new(1.5, -2.0);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"F_x":1.5,"F_z":-2.0}"#);
        let a: ActuatorInput<f64> = serde_json::from_str(r#"{"T": 3.0, "delta": 0.5}"#).unwrap();
        assert_eq!(a, ActuatorInput::new(3.0, 0.5));
        assert!(
            (PlanarForce::new(3.0f64, 4.0).relative_error(&PlanarForce::new(3.0, 0.0)) - 4.0 / 3.0)
                .abs()
                < 1e-15
        );
    }
}
