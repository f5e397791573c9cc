//! Brute-force inversion of the design model, independent of the polynomial
//! machinery: a dense grid search followed by damped Newton iterations with
//! a central-difference Jacobian.

use serde::Serialize;
use tiltalloc::aero::{forward_design, ActuatorInput, AircraftConfig, DesignFlags, PlanarForce};
use tiltalloc::alloc::AllocRequest;

use crate::HarnessError;

pub const MAX_ITERATIONS: usize = 50;
pub const TOLERANCE: f64 = 1e-9;
const FD_STEP: f64 = 1e-6;
const SEEDS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub command: ActuatorInput<f64>,
    /// `|F(x) - F_req| / |F_req|`.
    pub residual: f64,
    pub iterations: usize,
}

fn eval(
    x: [f64; 2],
    req: &AllocRequest,
    cfg: &AircraftConfig<f64>,
    flags: DesignFlags,
) -> Option<PlanarForce<f64>> {
    forward_design(&ActuatorInput::new(x[0], x[1]), &req.cond, cfg, flags)
        .ok()
        .filter(|f| f.is_finite())
}

fn clamp(x: [f64; 2], cfg: &AircraftConfig<f64>) -> [f64; 2] {
    [
        x[0].clamp(0.0, cfg.propeller.max_thrust),
        cfg.limits.clamp_delta(x[1]),
    ]
}

struct Problem<'a> {
    req: &'a AllocRequest,
    cfg: &'a AircraftConfig<f64>,
    flags: DesignFlags,
    scale: f64,
}

impl Problem<'_> {
    fn residual(&self, x: [f64; 2]) -> f64 {
        eval(x, self.req, self.cfg, self.flags)
            .map_or(f64::INFINITY, |f| (f - self.req.force).norm() / self.scale)
    }

    fn jacobian(&self, x: [f64; 2]) -> Option<[[f64; 2]; 2]> {
        let mut j = [[0.0; 2]; 2];
        for k in 0..2 {
            let h = FD_STEP * x[k].abs().max(1.0);
            let (mut lo, mut hi) = (x, x);
            lo[k] -= h;
            hi[k] += h;
            let (a, b) = (
                eval(lo, self.req, self.cfg, self.flags)?,
                eval(hi, self.req, self.cfg, self.flags)?,
            );
            j[0][k] = (b.fx - a.fx) / (2.0 * h);
            j[1][k] = (b.fz - a.fz) / (2.0 * h);
        }
        Some(j)
    }

    /// Damped Newton from `x`; returns the last iterate, its residual and the
    /// number of iterations.
    fn newton(&self, mut x: [f64; 2]) -> (OracleResult, bool) {
        let mut r = self.residual(x);
        let mut it = 0;
        while r > TOLERANCE && it < MAX_ITERATIONS {
            it += 1;
            let Some(j) = self.jacobian(x) else { break };
            let Some(f) = eval(x, self.req, self.cfg, self.flags) else {
                break;
            };
            let (gx, gz) = (f.fx - self.req.force.fx, f.fz - self.req.force.fz);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let dx = [
                -(j[1][1] * gx - j[0][1] * gz) / det,
                -(-j[1][0] * gx + j[0][0] * gz) / det,
            ];
            let mut step = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let cand = clamp([x[0] + step * dx[0], x[1] + step * dx[1]], self.cfg);
                let rc = self.residual(cand);
                if rc < r {
                    x = cand;
                    r = rc;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (
            OracleResult {
                command: ActuatorInput::new(x[0], x[1]),
                residual: r,
                iterations: it,
            },
            r <= TOLERANCE,
        )
    }
}

/// Inverts [`forward_design`] for `req` over the actuator box.
///
/// Newton runs from the best local minima of a `grid_n x grid_n` grid over
/// `[0, T_max] x [delta_min, delta_max]`. Among converged solutions the one
/// with the smallest thrust, then the smallest `|delta|`, is returned.
pub fn oracle_invert(
    req: &AllocRequest,
    cfg: &AircraftConfig<f64>,
    flags: DesignFlags,
    grid_n: usize,
) -> Result<OracleResult, HarnessError> {
    if grid_n < 16 {
        return Err(HarnessError::Invalid(format!(
            "grid_n = {grid_n} is below 16"
        )));
    }
    let scale = if req.force.norm() > 0.0 {
        req.force.norm()
    } else {
        1.0
    };
    let p = Problem {
        req,
        cfg,
        flags,
        scale,
    };
    let (t_max, lim) = (cfg.propeller.max_thrust, cfg.limits);
    let at = |i: usize, j: usize| {
        let t = t_max * i as f64 / (grid_n - 1) as f64;
        let d = lim.delta_min + (lim.delta_max - lim.delta_min) * j as f64 / (grid_n - 1) as f64;
        [t, d]
    };
    let grid: Vec<Vec<f64>> = (0..grid_n)
        .map(|i| (0..grid_n).map(|j| p.residual(at(i, j))).collect())
        .collect();
    let mut minima = Vec::new();
    for i in 0..grid_n {
        for j in 0..grid_n {
            let r = grid[i][j];
            if !r.is_finite() {
                continue;
            }
            let local = (i.saturating_sub(1)..(i + 2).min(grid_n))
                .flat_map(|a| (j.saturating_sub(1)..(j + 2).min(grid_n)).map(move |b| (a, b)))
                .all(|(a, b)| grid[a][b] >= r);
            if local {
                minima.push((r, i, j));
            }
        }
    }
    minima.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<OracleResult> = None;
    let mut converged: Vec<OracleResult> = Vec::new();
    for &(_, i, j) in minima.iter().take(SEEDS) {
        let (res, ok) = p.newton(at(i, j));
        if ok {
            converged.push(res);
        }
        if best.is_none_or(|b| res.residual < b.residual) {
            best = Some(res);
        }
    }
    converged.sort_by(|a, b| {
        (a.command.thrust, a.command.delta.abs())
            .partial_cmp(&(b.command.thrust, b.command.delta.abs()))
            .expect("finite")
    });
    match (converged.first(), best) {
        (Some(c), _) => Ok(*c),
        (None, Some(b)) => Err(HarnessError::OracleNoConvergence {
            residual: b.residual,
            command: b.command,
        }),
        (None, None) => Err(HarnessError::OracleNoConvergence {
            residual: f64::INFINITY,
            command: ActuatorInput::new(f64::NAN, f64::NAN),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tiltalloc::aero::FlightCondition;

    #[test]
    fn recovers_design_input() {
        let cfg = AircraftConfig::reference();
        let cond = FlightCondition::new(17.0, 1.0, 0.12).unwrap();
        let f = forward_design(
            &ActuatorInput::new(150.0, 0.3),
            &cond,
            &cfg,
            DesignFlags::default(),
        )
        .unwrap();
        let r = oracle_invert(
            &AllocRequest::new(cond, f),
            &cfg,
            DesignFlags::default(),
            32,
        )
        .unwrap();
        assert!((r.command.thrust - 150.0).abs() <= 1e-6 * 150.0);
        assert!((r.command.delta - 0.3).abs() <= 1e-6 * 0.3);
        assert!(
            oracle_invert(&AllocRequest::new(cond, f), &cfg, DesignFlags::default(), 8).is_err()
        );
    }

    #[test]
    fn clean_wing_gives_zero_thrust() {
        let cfg = AircraftConfig::reference();
        let cond = FlightCondition::new(16.0, 1.1, 0.1).unwrap();
        let f = forward_design(
            &ActuatorInput::new(0.0, 0.7),
            &cond,
            &cfg,
            DesignFlags::default(),
        )
        .unwrap();
        let r = oracle_invert(
            &AllocRequest::new(cond, f),
            &cfg,
            DesignFlags::default(),
            16,
        )
        .unwrap();
        assert!(r.command.thrust < 1e-6, "{:?}", r);
    }
}
