//! Forward-map surfaces over a grid of actuator inputs.

use std::io::Write;

use serde::{Deserialize, Serialize};
use tiltalloc::aero::{
    forward_design, forward_full, ActuatorInput, AircraftConfig, DesignFlags, FlightCondition,
};

use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self.n {
            0 => Vec::new(),
            1 => vec![self.min],
            n => (0..n)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub conditions: Vec<FlightCondition<f64>>,
    #[serde(rename = "T")]
    pub thrust: Axis,
    pub delta: Axis,
}

impl SweepSpec {
    pub fn reference(cfg: &AircraftConfig<f64>) -> Self {
        SweepSpec {
            conditions: vec![
                FlightCondition {
                    v_inf: 0.0,
                    rho: 1.225,
                    alpha_inf: 0.0,
                },
                FlightCondition {
                    v_inf: 8.0,
                    rho: 1.225,
                    alpha_inf: 0.05,
                },
                FlightCondition {
                    v_inf: 17.5,
                    rho: 1.0,
                    alpha_inf: 0.13,
                },
            ],
            thrust: Axis {
                min: 0.0,
                max: cfg.propeller.max_thrust,
                n: 21,
            },
            delta: Axis {
                min: cfg.limits.delta_min,
                max: cfg.limits.delta_max,
                n: 19,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub v_inf: f64,
    pub rho: f64,
    pub alpha_inf: f64,
    #[serde(rename = "T")]
    pub thrust: f64,
    pub delta: f64,
    pub full_fx: f64,
    pub full_fz: f64,
    pub design_fx: Option<f64>,
    pub design_fz: Option<f64>,
}

/// Both forward maps on the grid; the design columns are empty where that
/// model is undefined.
pub fn run_sweep(
    cfg: &AircraftConfig<f64>,
    spec: &SweepSpec,
) -> Result<Vec<SweepRow>, HarnessError> {
    let mut rows = Vec::new();
    for cond in &spec.conditions {
        cond.validate()?;
        for &t in &spec.thrust.values() {
            for &d in &spec.delta.values() {
                let input = ActuatorInput::new(t, d);
                let full = forward_full(&input, cond, cfg)?;
                let design = forward_design(&input, cond, cfg, DesignFlags::default()).ok();
                rows.push(SweepRow {
                    v_inf: cond.v_inf,
                    rho: cond.rho,
                    alpha_inf: cond.alpha_inf,
                    thrust: t,
                    delta: d,
                    full_fx: full.fx,
                    full_fz: full.fz,
                    design_fx: design.map(|f| f.fx),
                    design_fz: design.map(|f| f.fz),
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
