use std::sync::{Arc, OnceLock};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::system::{build_system, VAR_C, VAR_S, VAR_T, VAR_V};
use super::{AllocRequest, AllocResult, Branch};
use crate::aero::{
    clean_wing_force, forward_design, forward_full, local_flow, ActuatorInput, AircraftConfig,
    DesignFlags,
};
use crate::error::AllocError;
use crate::poly::{buchberger, BuchbergerConfig, MonomialOrder};
use crate::scalar::Rational;
use crate::zerodim::{
    filter_real, normal_set, solve_roots, MultiplicationMatrices, RootSolve, SolveOptions,
    TemplateCache,
};

/// How the roots of the coupled system were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolvePath {
    /// Replay of a cached template.
    Warm,
    /// Exact Groebner basis of this request.
    Cold,
    /// No polynomial solve (decoupled branch).
    Direct,
}

impl SolvePath {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolvePath::Warm => "warm",
            SolvePath::Cold => "cold",
            SolvePath::Direct => "direct",
        }
    }
}

#[derive(Clone, Debug)]
pub struct AllocOptions {
    pub flags: DesignFlags,
    pub solve: SolveOptions,
    pub groebner: BuchbergerConfig,
    /// Roots with `max |Im x_k| <= imag_tol (1 + max |x_k|)` count as real.
    pub imag_tol: f64,
    /// Admissible `|s^2 + c^2 - 1|`.
    pub unit_tol: f64,
    /// Candidates whose design residuals are both below this are ranked by
    /// thrust, then tilt.
    pub tie_tol: f64,
    /// Below this fraction of `T_max` the coupled result is checked against
    /// the decoupled branch.
    pub low_thrust_fraction: f64,
    pub use_cache: bool,
}

impl Default for AllocOptions {
    fn default() -> Self {
        AllocOptions {
            flags: DesignFlags::default(),
            solve: SolveOptions {
                newton_steps: 3,
                ..SolveOptions::default()
            },
            groebner: BuchbergerConfig::default(),
            imag_tol: 1e-6,
            unit_tol: 1e-6,
            tie_tol: 1e-9,
            low_thrust_fraction: 0.01,
            use_cache: true,
        }
    }
}

/// Blend between the coupled and decoupled commands.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BlendPolicy {
    /// Weight `kappa * ramp(v_inf)`: `kappa` is the slipstream overlap at the
    /// decoupled tilt, the ramp rises linearly from 0 at `v_couple_min` to 1
    /// at `v_full`.
    Overlap { v_couple_min: f64, v_full: f64 },
    /// Constant coupled weight, still forced to 0 below `v_couple_min`.
    Fixed { weight: f64, v_couple_min: f64 },
}

impl Default for BlendPolicy {
    fn default() -> Self {
        BlendPolicy::Overlap {
            v_couple_min: 3.0,
            v_full: 8.0,
        }
    }
}

impl BlendPolicy {
    fn v_couple_min(&self) -> f64 {
        match *self {
            BlendPolicy::Overlap { v_couple_min, .. } | BlendPolicy::Fixed { v_couple_min, .. } => {
                v_couple_min
            }
        }
    }
}

/// A real root of the coupled system mapped back to actuator space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub command: ActuatorInput<f64>,
    pub residual_design: f64,
    /// Inside every physical filter without clamping.
    pub admissible: bool,
}

#[derive(Clone, Debug)]
pub struct CoupledSolve {
    pub roots: RootSolve,
    pub path: SolvePath,
    /// Admissible candidates, best first.
    pub admissible: Vec<Candidate>,
    /// Real roots outside the limits, clamped into them, best first.
    pub saturated: Vec<Candidate>,
}

static SHARED: OnceLock<Arc<TemplateCache>> = OnceLock::new();

/// Process-wide template cache used by the free allocation functions.
pub fn shared_cache() -> Arc<TemplateCache> {
    SHARED
        .get_or_init(|| Arc::new(TemplateCache::new()))
        .clone()
}

/// Allocator for one aircraft configuration.
///
/// Cheap to clone; clones share the template cache.
#[derive(Clone, Debug)]
pub struct Allocator {
    cfg: AircraftConfig<f64>,
    opts: AllocOptions,
    cache: Arc<TemplateCache>,
    order: MonomialOrder,
}

impl Allocator {
    pub fn new(cfg: AircraftConfig<f64>) -> Self {
        Self::with_options(cfg, AllocOptions::default(), Arc::new(TemplateCache::new()))
    }

    pub fn with_options(
        cfg: AircraftConfig<f64>,
        opts: AllocOptions,
        cache: Arc<TemplateCache>,
    ) -> Self {
        Allocator {
            cfg,
            opts,
            cache,
            order: MonomialOrder::grevlex(super::VARIABLES.len()),
        }
    }

    pub fn config(&self) -> &AircraftConfig<f64> {
        &self.cfg
    }

    pub fn options(&self) -> &AllocOptions {
        &self.opts
    }

    pub fn cache(&self) -> &Arc<TemplateCache> {
        &self.cache
    }

    /// Roots of the lifted system, from the template cache when possible.
    pub fn solve(
        &self,
        req: &AllocRequest,
        cold: bool,
    ) -> Result<(RootSolve, SolvePath), AllocError> {
        let float = build_system::<f64>(&req.cond, &req.force, &self.cfg, self.opts.flags)?;
        let warm = self.opts.use_cache && !cold;
        let mut failed_replay = false;
        if warm {
            for t in self.cache.variants(&float, &self.order) {
                let r = t
                    .evaluate(&float)
                    .and_then(|m| solve_roots(t.normal_set(), &m, &float, &self.opts.solve));
                if let Ok(r) = r {
                    return Ok((r, SolvePath::Warm));
                }
                failed_replay = true;
            }
        }
        let exact = build_system::<Rational>(&req.cond, &req.force, &self.cfg, self.opts.flags)?;
        let gb = if failed_replay {
            self.cache
                .compile_variant(&exact, &self.order, &self.opts.groebner)?
                .1
        } else if warm {
            match self
                .cache
                .get_or_compile(&exact, &self.order, &self.opts.groebner)?
            {
                (_, Some(gb)) => gb,
                (_, None) => buchberger(&exact, &self.order, &self.opts.groebner)?,
            }
        } else {
            buchberger(&exact, &self.order, &self.opts.groebner)?
        };
        let ns = normal_set(&gb)?;
        let mats = MultiplicationMatrices::build(&gb, &ns)?.to_f64();
        Ok((
            solve_roots(&ns, &mats, &float, &self.opts.solve)?,
            SolvePath::Cold,
        ))
    }

    /// Solves the coupled system and sorts its real roots into admissible and
    /// clamped candidates.
    pub fn coupled_candidates(
        &self,
        req: &AllocRequest,
        cold: bool,
    ) -> Result<CoupledSolve, AllocError> {
        let (roots, path) = self.solve(req, cold)?;
        let t_max = self.cfg.propeller.max_thrust;
        let lim = &self.cfg.limits;
        let slack_t = 1e-9 * t_max;
        let slack_d = 1e-9;
        let mut admissible = Vec::new();
        let mut saturated = Vec::new();
        for x in filter_real(&roots.roots, self.opts.imag_tol) {
            let (t, s, c, v) = (x[VAR_T], x[VAR_S], x[VAR_C], x[VAR_V]);
            if (s * s + c * c - 1.0).abs() > self.opts.unit_tol || v < -1e-9 * (1.0 + v.abs()) {
                continue;
            }
            let delta = s.atan2(c);
            let inside = t >= -slack_t
                && t <= t_max + slack_t
                && delta >= lim.delta_min - slack_d
                && delta <= lim.delta_max + slack_d;
            let command = ActuatorInput::new(t, delta).saturate(&self.cfg);
            let Ok(f) = forward_design(&command, &req.cond, &self.cfg, self.opts.flags) else {
                continue;
            };
            let cand = Candidate {
                command,
                residual_design: f.relative_error(&req.force),
                admissible: inside,
            };
            if inside {
                admissible.push(cand);
            } else {
                saturated.push(cand);
            }
        }
        let tie = self.opts.tie_tol;
        let key = |c: &Candidate| {
            let r = if c.residual_design <= tie {
                0.0
            } else {
                c.residual_design
            };
            (r, c.command.thrust, c.command.delta.abs())
        };
        let cmp = |a: &Candidate, b: &Candidate| key(a).partial_cmp(&key(b)).expect("finite keys");
        admissible.sort_by(cmp);
        saturated.sort_by(|a, b| {
            a.residual_design
                .total_cmp(&b.residual_design)
                .then(cmp(a, b))
        });
        Ok(CoupledSolve {
            roots,
            path,
            admissible,
            saturated,
        })
    }

    /// Exact inversion of the design model.
    pub fn allocate_coupled(&self, req: &AllocRequest) -> Result<AllocResult, AllocError> {
        self.coupled(req, false)
    }

    /// [`Allocator::allocate_coupled`] with the basis recomputed from scratch.
    pub fn allocate_coupled_cold(&self, req: &AllocRequest) -> Result<AllocResult, AllocError> {
        self.coupled(req, true)
    }

    fn coupled(&self, req: &AllocRequest, cold: bool) -> Result<AllocResult, AllocError> {
        let start = Instant::now();
        req.validate()?;
        if !(req.cond.v_inf > 0.0) {
            return Err(AllocError::Precondition(
                "coupled allocation requires v_inf > 0",
            ));
        }
        let solve = match self.coupled_candidates(req, cold) {
            Ok(s) => s,
            Err(e) => {
                // Near T = 0 the design model barely depends on the tilt and
                // the lifted ideal degenerates.
                let dec = self.allocate_decoupled(req, 0.0)?;
                if dec.command.thrust
                    < self.opts.low_thrust_fraction * self.cfg.propeller.max_thrust
                {
                    return Ok(AllocResult {
                        latency: start.elapsed().as_secs_f64(),
                        ..dec
                    });
                }
                return Err(e);
            }
        };
        let n = solve.admissible.len();
        let Some(best) = solve.admissible.first() else {
            return Err(AllocError::NoFeasibleSolution {
                candidates: solve.roots.roots.len(),
            });
        };
        let mut result = self.finish(
            req,
            best.command,
            Branch::Coupled,
            solve.path,
            1.0,
            false,
            n,
        )?;
        if best.command.thrust < self.opts.low_thrust_fraction * self.cfg.propeller.max_thrust {
            let dec = self.allocate_decoupled(req, 0.0)?;
            if dec.residual_design.unwrap_or(f64::INFINITY)
                < result.residual_design.unwrap_or(f64::INFINITY)
            {
                result = AllocResult {
                    n_candidates: n,
                    ..dec
                };
            }
        }
        result.latency = start.elapsed().as_secs_f64();
        Ok(result)
    }

    /// Thrust vector equal to the request minus the clean-wing force.
    /// `hold_delta` is returned when that difference vanishes.
    pub fn allocate_decoupled(
        &self,
        req: &AllocRequest,
        hold_delta: f64,
    ) -> Result<AllocResult, AllocError> {
        let start = Instant::now();
        req.validate()?;
        let net = req.force - clean_wing_force(&req.cond, &self.cfg);
        let raw = if net.norm() > 0.0 {
            ActuatorInput::new(net.norm(), net.fz.atan2(net.fx))
        } else {
            ActuatorInput::new(0.0, hold_delta)
        };
        let command = raw.saturate(&self.cfg);
        let saturated = command != raw;
        let mut r = self.finish(
            req,
            command,
            Branch::Decoupled,
            SolvePath::Direct,
            0.0,
            saturated,
            0,
        )?;
        r.latency = start.elapsed().as_secs_f64();
        Ok(r)
    }

    /// Coupled weight for `req` given the decoupled command.
    pub fn blend_weight(
        &self,
        req: &AllocRequest,
        decoupled: &ActuatorInput<f64>,
        policy: &BlendPolicy,
    ) -> Result<f64, AllocError> {
        let v = req.cond.v_inf;
        if !(v >= policy.v_couple_min()) {
            return Ok(0.0);
        }
        let w = match *policy {
            BlendPolicy::Fixed { weight, .. } => weight,
            BlendPolicy::Overlap {
                v_couple_min,
                v_full,
            } => {
                let ramp = if v_full > v_couple_min {
                    (v - v_couple_min) / (v_full - v_couple_min)
                } else {
                    1.0
                };
                let kappa = local_flow(decoupled, &req.cond, &self.cfg)?.kappa;
                kappa * ramp
            }
        };
        Ok(w.clamp(0.0, 1.0))
    }

    /// Blended allocation valid over the whole speed range.
    ///
    /// When the coupled system has no admissible root, its real roots are
    /// clamped into the actuator limits and moved along the active limit to
    /// the least design residual; the best of these stands in for the coupled
    /// command and the result is flagged as saturated. Without any real root
    /// the decoupled command is used alone.
    pub fn allocate(
        &self,
        req: &AllocRequest,
        policy: &BlendPolicy,
    ) -> Result<AllocResult, AllocError> {
        let start = Instant::now();
        let dec = self.allocate_decoupled(req, 0.0)?;
        let w = self.blend_weight(req, &dec.command, policy)?;
        let mut out = if w <= 0.0 {
            dec
        } else {
            match self.coupled_or_clamped(req) {
                Some((coupled, n, path, clamped)) => {
                    let command = if w >= 1.0 {
                        coupled
                    } else {
                        ActuatorInput::new(
                            w * coupled.thrust + (1.0 - w) * dec.command.thrust,
                            w * coupled.delta + (1.0 - w) * dec.command.delta,
                        )
                    };
                    let branch = if w >= 1.0 {
                        Branch::Coupled
                    } else {
                        Branch::Blended
                    };
                    let saturated = clamped || (w < 1.0 && dec.saturated);
                    self.finish(req, command, branch, path, w, saturated, n)?
                }
                None => dec,
            }
        };
        out.latency = start.elapsed().as_secs_f64();
        Ok(out)
    }

    fn coupled_or_clamped(
        &self,
        req: &AllocRequest,
    ) -> Option<(ActuatorInput<f64>, usize, SolvePath, bool)> {
        let solve = self.coupled_candidates(req, false).ok()?;
        let n = solve.admissible.len();
        if let Some(best) = solve.admissible.first() {
            if best.command.thrust < self.opts.low_thrust_fraction * self.cfg.propeller.max_thrust {
                let dec = self.allocate_decoupled(req, 0.0).ok()?;
                if dec.residual_design.unwrap_or(f64::INFINITY) < best.residual_design {
                    return Some((dec.command, n, solve.path, dec.saturated));
                }
            }
            return Some((best.command, n, solve.path, false));
        }
        solve
            .saturated
            .iter()
            .map(|c| self.refine_on_limits(req, c))
            .min_by(|a, b| a.residual_design.total_cmp(&b.residual_design))
            .map(|c| (c.command, 0, solve.path, true))
    }

    /// Least-squares command on the actuator limit the candidate was clamped
    /// onto: the free coordinate is scanned and then refined by golden-section
    /// search.
    pub fn refine_on_limits(&self, req: &AllocRequest, cand: &Candidate) -> Candidate {
        let t_max = self.cfg.propeller.max_thrust;
        let lim = &self.cfg.limits;
        let cmd = cand.command;
        let residual = |c: ActuatorInput<f64>| {
            forward_design(&c, &req.cond, &self.cfg, self.opts.flags)
                .map_or(f64::INFINITY, |f| f.relative_error(&req.force))
        };
        let mut best = *cand;
        let mut consider = |c: ActuatorInput<f64>, r: f64| {
            if r < best.residual_design {
                best = Candidate {
                    command: c,
                    residual_design: r,
                    admissible: false,
                };
            }
        };
        let on_delta_limit = cmd.delta == lim.delta_min || cmd.delta == lim.delta_max;
        let on_thrust_limit = cmd.thrust == 0.0 || cmd.thrust == t_max;
        if on_delta_limit {
            let f = |t: f64| residual(ActuatorInput::new(t, cmd.delta));
            let t = line_minimum(f, 0.0, t_max);
            consider(ActuatorInput::new(t, cmd.delta), f(t));
        }
        if on_thrust_limit {
            let f = |d: f64| residual(ActuatorInput::new(cmd.thrust, d));
            let d = line_minimum(f, lim.delta_min, lim.delta_max);
            consider(ActuatorInput::new(cmd.thrust, d), f(d));
        }
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        req: &AllocRequest,
        command: ActuatorInput<f64>,
        branch: Branch,
        path: SolvePath,
        weight: f64,
        saturated: bool,
        n_candidates: usize,
    ) -> Result<AllocResult, AllocError> {
        let residual_design = if req.cond.v_inf > 0.0 {
            forward_design(&command, &req.cond, &self.cfg, self.opts.flags)
                .ok()
                .map(|f| f.relative_error(&req.force))
        } else {
            None
        };
        let residual_full =
            forward_full(&command, &req.cond, &self.cfg)?.relative_error(&req.force);
        Ok(AllocResult {
            command,
            branch,
            residual_design,
            residual_full,
            n_candidates,
            latency: 0.0,
            weight,
            path,
            saturated,
        })
    }
}

const LINE_SCAN: usize = 64;
const GOLDEN_STEPS: usize = 60;

/// Minimizer of `f` on `[a, b]`: the best of an even scan, polished by
/// golden-section search on the neighbouring bracket.
fn line_minimum(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = (b - a) / LINE_SCAN as f64;
    let at = |i: usize| a + h * i as f64;
    let i = (0..=LINE_SCAN)
        .min_by(|&i, &j| f(at(i)).total_cmp(&f(at(j))))
        .unwrap_or(0);
    let (mut lo, mut hi) = (at(i.saturating_sub(1)), at((i + 1).min(LINE_SCAN)));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = if f1 <= f2 { x1 } else { x2 };
    if f(at(i)) < f(x) {
        at(i)
    } else {
        x
    }
}

/// [`Allocator::allocate_coupled`] with default options and the shared
/// template cache.
pub fn allocate_coupled(
    req: &AllocRequest,
    cfg: &AircraftConfig<f64>,
) -> Result<AllocResult, AllocError> {
    Allocator::with_options(*cfg, AllocOptions::default(), shared_cache()).allocate_coupled(req)
}

/// [`Allocator::allocate_decoupled`] holding `delta = 0` for a vanishing
/// net force.
pub fn allocate_decoupled(
    req: &AllocRequest,
    cfg: &AircraftConfig<f64>,
) -> Result<AllocResult, AllocError> {
    Allocator::with_options(*cfg, AllocOptions::default(), shared_cache())
        .allocate_decoupled(req, 0.0)
}

/// [`Allocator::allocate`] with default options and the shared template
/// cache.
pub fn allocate(
    req: &AllocRequest,
    cfg: &AircraftConfig<f64>,
    policy: &BlendPolicy,
) -> Result<AllocResult, AllocError> {
    Allocator::with_options(*cfg, AllocOptions::default(), shared_cache()).allocate(req, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aero::{FlightCondition, PlanarForce};
    use std::f64::consts::FRAC_PI_2;

    fn alloc() -> Allocator {
        Allocator::with_options(
            AircraftConfig::reference(),
            AllocOptions::default(),
            shared_cache(),
        )
    }

    fn req(v: f64, rho: f64, a: f64, f: PlanarForce<f64>) -> AllocRequest {
        AllocRequest::new(FlightCondition::new(v, rho, a).unwrap(), f)
    }

    #[test]
    fn coupled_round_trip() {
        let a = alloc();
        let cond = FlightCondition::new(17.0, 1.0, 0.12).unwrap();
        let f = forward_design(
            &ActuatorInput::new(150.0, 0.3),
            &cond,
            a.config(),
            DesignFlags::default(),
        )
        .unwrap();
        let r = a.allocate_coupled(&AllocRequest::new(cond, f)).unwrap();
        assert_eq!(r.branch, Branch::Coupled);
        assert!(r.residual_design.unwrap() <= 1e-6);
        assert!((r.command.thrust - 150.0).abs() < 1e-6 && (r.command.delta - 0.3).abs() < 1e-8);
        assert!(r.latency > 0.0 && r.n_candidates >= 1);
    }

    #[test]
    fn decoupled_examples() {
        let a = alloc();
        let r = a
            .allocate_decoupled(&req(0.0, 1.2, 0.0, PlanarForce::new(0.0, 300.0)), 0.0)
            .unwrap();
        assert_eq!(r.command.thrust, 300.0);
        assert!((r.command.delta - FRAC_PI_2).abs() < 1e-15);
        assert!(r.residual_design.is_none());
        let r = a
            .allocate_decoupled(&req(0.0, 1.2, 0.0, PlanarForce::new(300.0, 0.0)), 0.0)
            .unwrap();
        assert_eq!((r.command.thrust, r.command.delta), (300.0, 0.0));
        let cond = FlightCondition::new(12.0, 1.1, 0.1).unwrap();
        let clean = clean_wing_force(&cond, a.config());
        let r = a
            .allocate_decoupled(&AllocRequest::new(cond, clean), 0.4)
            .unwrap();
        assert_eq!((r.command.thrust, r.command.delta), (0.0, 0.4));
        let r = a
            .allocate_decoupled(&req(0.0, 1.2, 0.0, PlanarForce::zero()), 0.25)
            .unwrap();
        assert_eq!((r.command.thrust, r.command.delta), (0.0, 0.25));
    }

    #[test]
    fn blend_regions() {
        let a = alloc();
        let hover = req(1.0, 1.2, 0.0, PlanarForce::new(5.0, 200.0));
        let r = a.allocate(&hover, &BlendPolicy::default()).unwrap();
        assert_eq!(r.branch, Branch::Decoupled);
        assert_eq!(
            r.command,
            a.allocate_decoupled(&hover, 0.0).unwrap().command
        );
        let cruise = req(17.0, 1.0, 0.12, PlanarForce::new(60.0, 100.0));
        let r = a.allocate(&cruise, &BlendPolicy::default()).unwrap();
        assert_eq!(r.branch, Branch::Coupled);
        let c = a.allocate_coupled(&cruise).unwrap().command;
        assert!(
            (r.command.thrust - c.thrust).abs() < 1e-9 && (r.command.delta - c.delta).abs() < 1e-12
        );
        let mid = req(5.0, 1.2, 0.05, PlanarForce::new(10.0, 150.0));
        let r = a.allocate(&mid, &BlendPolicy::default()).unwrap();
        assert_eq!(r.branch, Branch::Blended);
        assert!(r.weight > 0.0 && r.weight < 1.0);
    }

    #[test]
    fn request_json() {
        let r: AllocRequest = serde_json::from_str(
            r#"{"v_inf": 15, "rho": 1.2, "alpha_inf": 0.1, "F_x": 60, "F_z": 100}"#,
        )
        .unwrap();
        assert_eq!(r.force, PlanarForce::new(60.0, 100.0));
        assert!(!r.surface_budget);
        assert!(serde_json::from_str::<AllocRequest>(
            r#"{"v_inf": 15, "rho": 1.2, "alpha_inf": 0.1, "F_x": 60, "F_z": 100, "x": 1}"#
        )
        .is_err());
        let back: AllocRequest = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
