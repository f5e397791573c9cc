//! Experiment harness around `tiltalloc`: Monte-Carlo accuracy campaigns,
//! latency benchmarks, forward-map sweeps and a brute-force inversion oracle.

pub mod bench;
pub mod campaign;
pub mod oracle;
pub mod stats;
pub mod sweep;

use std::fs;
use std::path::Path;

use thiserror::Error;
use tiltalloc::aero::{ActuatorInput, AircraftConfig};
use tiltalloc::alloc::{build_system, AllocRequest, Allocator};
use tiltalloc::poly::{buchberger, text::to_text, MonomialOrder};
use tiltalloc::zerodim::{normal_set, solve_roots, MultiplicationMatrices};
use tiltalloc::{AeroError, AllocError, Rational, SolverError};

pub use bench::{run_bench, BenchReport, BenchSpec};
pub use campaign::{run_montecarlo, CampaignReport, CampaignSpec, Mode};
pub use oracle::{oracle_invert, OracleResult};
pub use sweep::{run_sweep, SweepRow, SweepSpec};

/// Pass/fail thresholds shared by the CLI and the acceptance suite.
pub mod gates {
    /// Largest relative full-model error over the Monte-Carlo envelope.
    pub const MC_MAX_RESIDUAL_FULL: f64 = 0.15;
    pub const MC_MEDIAN_RESIDUAL_FULL: f64 = 0.05;
    /// Bound published for the original aircraft constants.
    pub const PUBLISHED_MAX_RESIDUAL_FULL: f64 = 0.08;
    /// Solver exactness against the design model.
    pub const DESIGN_RESIDUAL: f64 = 1e-6;
    /// Advisory warm-path median latency, seconds.
    pub const WARM_MEDIAN_SECONDS: f64 = 0.010;
    /// Coupled allocator versus oracle, relative.
    pub const ORACLE_AGREEMENT: f64 = 1e-6;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("oracle did not converge (best residual {residual:e} at T = {}, delta = {})", command.thrust, command.delta)]
    OracleNoConvergence {
        residual: f64,
        command: ActuatorInput<f64>,
    },
    #[error(transparent)]
    Alloc(#[from] AllocError),
    #[error(transparent)]
    Aero(#[from] AeroError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Relative distance of two commands: thrust scaled by `T_max`, tilt by the
/// tilt range.
pub fn command_gap(
    a: &ActuatorInput<f64>,
    b: &ActuatorInput<f64>,
    cfg: &AircraftConfig<f64>,
) -> f64 {
    let dt = (a.thrust - b.thrust).abs() / cfg.propeller.max_thrust;
    let dd = (a.delta - b.delta).abs() / (cfg.limits.delta_max - cfg.limits.delta_min);
    dt.max(dd)
}

/// Writes the lifted system (text format), its normal set, the
/// multiplication matrices (CSV) and all complex roots (JSON `[re, im]`
/// pairs) of `req` into `dir`.
pub fn dump_structure(
    alloc: &Allocator,
    req: &AllocRequest,
    dir: &Path,
) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    let flags = alloc.options().flags;
    let exact = build_system::<Rational>(&req.cond, &req.force, alloc.config(), flags)?;
    let names: Vec<&str> = exact.var_names.iter().map(String::as_str).collect();
    let order = MonomialOrder::grevlex(names.len());
    let text: Vec<String> = exact
        .polys
        .iter()
        .map(|p| to_text(p, &names, &order))
        .collect();
    fs::write(dir.join("system.txt"), text.join("\n") + "\n")?;
    let gb = buchberger(&exact, &order, &alloc.options().groebner).map_err(SolverError::from)?;
    let ns = normal_set(&gb)?;
    let ns_text: Vec<String> = ns
        .monomials
        .iter()
        .map(|m| format!("{:?}", m.exponents()))
        .collect();
    fs::write(dir.join("normal_set.txt"), ns_text.join("\n") + "\n")?;
    let mats = MultiplicationMatrices::build(&gb, &ns)?.to_f64();
    fs::write(dir.join("matrices.csv"), mats.to_csv(&exact.var_names))?;
    let roots = solve_roots(&ns, &mats, &exact.to_f64(), &alloc.options().solve)?;
    fs::write(
        dir.join("roots.json"),
        serde_json::to_string_pretty(&roots.to_json())?,
    )?;
    Ok(())
}
