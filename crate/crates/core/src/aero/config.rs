//! Aircraft configuration: propeller, wing, mounting geometry and actuator
//! limits. JSON field names follow the usual aerodynamic symbols (`A_p`,
//! `c_T`, `cl_alpha`, ...); all quantities are SI, angles in radians.

use serde::{Deserialize, Serialize};

use crate::error::{AeroError, ConfigError};
use crate::scalar::Real;

fn invalid(what: &'static str, detail: impl Into<String>) -> AeroError {
    AeroError::InvalidParameter {
        what,
        detail: detail.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "F: Deserialize<'de>"))]
pub struct PropellerParams<F> {
    /// Disk area, m².
    #[serde(rename = "A_p")]
    pub area: F,
    /// Disk radius, m. Derived from the area when absent.
    #[serde(rename = "r_p", default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<F>,
    /// Diameter, m.
    #[serde(rename = "D")]
    pub diameter: F,
    #[serde(rename = "c_T")]
    pub thrust_coeff: F,
    /// Efficiency factor in (0, 1].
    #[serde(rename = "eta_p")]
    pub efficiency: F,
    /// Maximum thrust, N.
    #[serde(rename = "T_max")]
    pub max_thrust: F,
}

impl<F: Real> PropellerParams<F> {
    pub fn radius(&self) -> F {
        self.radius.unwrap_or_else(|| (self.area / F::PI()).sqrt())
    }

    pub fn validate(&self) -> Result<(), AeroError> {
        if !(self.area > F::zero()) {
            return Err(invalid("A_p", format!("{} must be positive", self.area)));
        }
        if !(self.diameter > F::zero()) {
            return Err(invalid("D", format!("{} must be positive", self.diameter)));
        }
        if !(self.efficiency > F::zero() && self.efficiency <= F::one()) {
            return Err(invalid(
                "eta_p",
                format!("{} outside (0, 1]", self.efficiency),
            ));
        }
        if !(self.max_thrust > F::zero()) {
            return Err(invalid(
                "T_max",
                format!("{} must be positive", self.max_thrust),
            ));
        }
        if !self.thrust_coeff.is_finite() {
            return Err(invalid("c_T", "not finite"));
        }
        if let Some(r) = self.radius {
            let disk = F::PI() * r * r;
            if !(r > F::zero()) || ((disk - self.area) / self.area).abs() > F::lit(1e-9) {
                return Err(invalid(
                    "r_p",
                    format!("pi * r_p^2 = {disk} does not match A_p = {}", self.area),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WingParams<F> {
    /// Wing (section) area, m².
    #[serde(rename = "A_w")]
    pub area: F,
    /// Chord length, m.
    #[serde(rename = "c_w")]
    pub chord: F,
    pub cl0: F,
    /// Lift slope, 1/rad.
    pub cl_alpha: F,
    pub cd0: F,
    /// Drag curvature, 1/rad².
    pub cd_alpha: F,
    /// Lift per control surface deflection, 1/rad.
    pub cl_ds: F,
    /// Drag per control surface deflection, 1/rad.
    pub cd_ds: F,
}

impl<F: Real> WingParams<F> {
    pub fn validate(&self) -> Result<(), AeroError> {
        if !(self.area > F::zero()) {
            return Err(invalid("A_w", format!("{} must be positive", self.area)));
        }
        if !(self.chord > F::zero()) {
            return Err(invalid("c_w", format!("{} must be positive", self.chord)));
        }
        if !(self.cl_alpha > F::zero()) {
            return Err(invalid(
                "cl_alpha",
                format!("{} must be positive", self.cl_alpha),
            ));
        }
        if !(self.cd0 >= F::zero()) {
            return Err(invalid("cd0", format!("{} must be non-negative", self.cd0)));
        }
        if !(self.cd_alpha >= F::zero()) {
            return Err(invalid(
                "cd_alpha",
                format!("{} must be non-negative", self.cd_alpha),
            ));
        }
        if !(self.cl0.is_finite() && self.cl_ds.is_finite() && self.cd_ds.is_finite()) {
            return Err(invalid("wing", "non-finite coefficient"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MountingGeometry<F> {
    /// Propeller center to wing leading edge, m.
    pub x_p: F,
    /// Wake development factor in [0, 1].
    pub f_w: F,
}

impl<F: Real> MountingGeometry<F> {
    pub fn validate(&self) -> Result<(), AeroError> {
        if !(self.x_p >= F::zero()) {
            return Err(invalid("x_p", format!("{} must be non-negative", self.x_p)));
        }
        if !(self.f_w >= F::zero() && self.f_w <= F::one()) {
            return Err(invalid("f_w", format!("{} outside [0, 1]", self.f_w)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits<F> {
    pub delta_min: F,
    pub delta_max: F,
}

impl<F: Real> Limits<F> {
    pub fn validate(&self) -> Result<(), AeroError> {
        if !(self.delta_min >= F::zero()
            && self.delta_min <= self.delta_max
            && self.delta_max <= F::FRAC_PI_2())
        {
            return Err(invalid(
                "limits",
                format!(
                    "[{}, {}] not within [0, pi/2]",
                    self.delta_min, self.delta_max
                ),
            ));
        }
        Ok(())
    }

    pub fn clamp_delta(&self, delta: F) -> F {
        delta.max(self.delta_min).min(self.delta_max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AircraftConfig<F> {
    pub propeller: PropellerParams<F>,
    pub wing: WingParams<F>,
    pub mounting: MountingGeometry<F>,
    pub limits: Limits<F>,
}

impl<F: Real> AircraftConfig<F> {
    pub fn validate(&self) -> Result<(), AeroError> {
        self.propeller.validate()?;
        self.wing.validate()?;
        self.mounting.validate()?;
        self.limits.validate()
    }

    /// Reference configuration used throughout the tests. The propeller disk
    /// is 0.8 m across and its slipstream covers the whole 0.2 m chord for
    /// every tilt angle.
    pub fn reference() -> Self {
        let l = F::lit;
        let radius = l(0.4);
        AircraftConfig {
            propeller: PropellerParams {
                area: F::PI() * radius * radius,
                radius: Some(radius),
                diameter: l(0.8),
                thrust_coeff: l(0.1),
                efficiency: l(0.8),
                max_thrust: l(400.0),
            },
            wing: WingParams {
                area: l(0.75),
                chord: l(0.2),
                cl0: l(0.4),
                cl_alpha: l(5.7),
                cd0: l(0.03),
                cd_alpha: l(1.0),
                cl_ds: l(2.0),
                cd_ds: l(0.05),
            },
            mounting: MountingGeometry {
                x_p: l(0.05),
                f_w: l(1.0),
            },
            limits: Limits {
                delta_min: F::zero(),
                delta_max: F::FRAC_PI_2(),
            },
        }
    }

    /// `2 / (eta_p * rho * A_p)`: maps thrust to the squared induced speed
    /// increment.
    pub fn disk_loading_factor(&self, rho: F) -> F {
        F::lit(2.0) / (self.propeller.efficiency * rho * self.propeller.area)
    }
}

impl<F: Real + serde::de::DeserializeOwned> AircraftConfig<F> {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl Default for AircraftConfig<f64> {
    fn default() -> Self {
        Self::reference()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_is_valid() {
        let cfg = AircraftConfig::<f64>::reference();
        cfg.validate().unwrap();
        assert!((cfg.propeller.radius() - 0.4).abs() < 1e-15);
        AircraftConfig::<f32>::reference().validate().unwrap();
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let cfg = AircraftConfig::<f64>::reference();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert!(text.contains("\"A_p\""));
        assert!(text.contains("\"cl_alpha\""));
        assert_eq!(AircraftConfig::<f64>::from_json(&text).unwrap(), cfg);
        let bad = text.replacen("\"x_p\"", "\"bogus\": 1.0, \"x_p\"", 1);
        assert!(matches!(
            AircraftConfig::<f64>::from_json(&bad),
            Err(ConfigError::Json(_))
        ));
    }

    #[test]
    fn invariant_violations() {
        let mut cfg = AircraftConfig::<f64>::reference();
        cfg.propeller.radius = Some(0.41);
        assert!(cfg.validate().is_err());
        cfg.propeller.radius = None;
        cfg.validate().unwrap();
        cfg.propeller.efficiency = 1.2;
        assert!(cfg.validate().is_err());
        let mut cfg = AircraftConfig::<f64>::reference();
        cfg.limits.delta_max = 2.0;
        assert!(cfg.validate().is_err());
        let mut cfg = AircraftConfig::<f64>::reference();
        cfg.mounting.f_w = -0.1;
        assert!(cfg.validate().is_err());
    }
}
