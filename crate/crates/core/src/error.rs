use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AeroError {
    #[error("invalid {what}: {detail}")]
    InvalidParameter { what: &'static str, detail: String },
    #[error("domain error: eta_p * rho * A_p = {0} must be positive")]
    Domain(f64),
    #[error("degenerate flow: wing angle denominator {0} is not positive")]
    DegenerateFlow(f64),
    #[error("singular geometry: cos(delta) = {0} is not positive")]
    SingularGeometry(f64),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },
    #[error("variable order {0:?} is not a permutation")]
    InvalidPermutation(Vec<usize>),
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("empty polynomial system")]
    EmptySystem,
    #[error("resource limit exceeded after {steps} reduction steps ({pairs} pairs)")]
    ResourceLimit { steps: usize, pairs: usize },
    #[error("coefficient {0} has no image in the target field")]
    Unrepresentable(String),
    #[error("parse error at `{fragment}`: {reason}")]
    Parse {
        fragment: String,
        reason: &'static str,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("ideal is not zero-dimensional: no leading monomial is a pure power of variable {0}")]
    NotZeroDimensional(usize),
    #[error("eigenvalue iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error(
        "random combination stayed degenerate after {attempts} draws (worst residual {residual:e})"
    )]
    DegenerateCombination { attempts: usize, residual: f64 },
    #[error("matrix set is inconsistent with the normal set: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AllocError {
    #[error("no feasible solution among {candidates} candidate roots")]
    NoFeasibleSolution { candidates: usize },
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("singular surface effectiveness matrix at q = {0}")]
    SingularSurfaces(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Aero(#[from] AeroError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("could not parse configuration: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] AeroError),
}
