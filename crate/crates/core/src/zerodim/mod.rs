//! Solutions of zero-dimensional polynomial systems from a Groebner basis.
//!
//! The quotient `K[x]/I` is spanned by the [`NormalSet`]. Multiplication by
//! each variable is a linear map on it; the eigenvalues of these commuting
//! [`MultiplicationMatrices`] are the coordinates of the solutions. Roots
//! are read off from the eigenvectors of a random linear combination.

mod eigen;
mod matrix;
pub mod template;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::SolverError;
use crate::poly::{GroebnerBasis, Monomial, MonomialOrder, PolySystem, Polynomial};
use crate::scalar::{Field, Real};

pub use eigen::{
    balance, eigen_decompose, eigenvalues, eigenvector, hessenberg, max_residual,
    EigenDecomposition, EigenPair,
};
pub use matrix::Matrix;
pub use template::{Template, TemplateCache};

/// Standard monomials of a zero-dimensional ideal, ascending in the basis
/// order (so the unit monomial comes first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalSet {
    pub monomials: Vec<Monomial>,
}

impl NormalSet {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.monomials.iter().position(|x| x == m)
    }

    pub fn is_closed_under_division(&self) -> bool {
        self.monomials.iter().all(|m| {
            (0..m.nvars()).all(|i| {
                let mut e = m.exponents().to_vec();
                if e[i] == 0 {
                    return true;
                }
                e[i] -= 1;
                self.index_of(&Monomial::new(e)).is_some()
            })
        })
    }
}

/// Monomials not divisible by any leading monomial of `gb`.
pub fn normal_set<K: Field>(gb: &GroebnerBasis<K>) -> Result<NormalSet, SolverError> {
    let n = gb.nvars();
    if gb.is_trivial() {
        return Ok(NormalSet {
            monomials: Vec::new(),
        });
    }
    let lms = gb.leading_monomials();
    let mut bound = vec![u32::MAX; n];
    for lm in &lms {
        if let Some(v) = lm.pure_power_of() {
            bound[v] = bound[v].min(lm.exponents()[v]);
        }
    }
    if let Some(v) = bound.iter().position(|&b| b == u32::MAX) {
        return Err(SolverError::NotZeroDimensional(v));
    }
    let mut out = Vec::new();
    let mut e = vec![0u32; n];
    'outer: loop {
        let m = Monomial::new(e.clone());
        if !lms.iter().any(|lm| lm.divides(&m)) {
            out.push(m);
        }
        for i in 0..n {
            e[i] += 1;
            if e[i] < bound[i] {
                continue 'outer;
            }
            e[i] = 0;
        }
        break;
    }
    out.sort_by(|a, b| gb.order.cmp(a, b));
    Ok(NormalSet { monomials: out })
}

/// Matrix of multiplication by `x_var`: column `j` holds the coordinates of
/// `normal_form(x_var * m_j)`.
pub fn multiplication_matrix<K: Field>(
    gb: &GroebnerBasis<K>,
    ns: &NormalSet,
    var: usize,
) -> Result<Matrix<K>, SolverError> {
    let n = gb.nvars();
    let size = ns.len();
    let mut out = Matrix::filled(size, size, K::zero());
    let xk = Monomial::var(n, var);
    for (j, m) in ns.monomials.iter().enumerate() {
        let prod = m.mul(&xk);
        if let Some(i) = ns.index_of(&prod) {
            out[(i, j)] = K::one();
            continue;
        }
        let nf = gb.normal_form(&Polynomial::monomial(prod, K::one()))?;
        for (mono, c) in nf.terms() {
            let i = ns.index_of(mono).ok_or_else(|| {
                SolverError::Inconsistent(format!(
                    "normal form term {:?} outside the normal set",
                    mono.exponents()
                ))
            })?;
            out[(i, j)] = c.clone();
        }
    }
    Ok(out)
}

/// One multiplication matrix per variable.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicationMatrices<T> {
    pub matrices: Vec<Matrix<T>>,
}

impl<K: Field> MultiplicationMatrices<K> {
    pub fn build(gb: &GroebnerBasis<K>, ns: &NormalSet) -> Result<Self, SolverError> {
        let matrices = (0..gb.nvars())
            .map(|k| multiplication_matrix(gb, ns, k))
            .collect::<Result<_, _>>()?;
        Ok(MultiplicationMatrices { matrices })
    }

    /// Single conversion of every exact entry to `f64`.
    pub fn to_f64(&self) -> MultiplicationMatrices<f64> {
        MultiplicationMatrices {
            matrices: self.matrices.iter().map(|m| m.map(Field::to_f64)).collect(),
        }
    }
}

impl<F: Real> MultiplicationMatrices<F> {
    pub fn dim(&self) -> usize {
        self.matrices.first().map_or(0, Matrix::rows)
    }

    /// `max ||M_j M_k - M_k M_j|| / (||M_j|| ||M_k||)` over all pairs.
    pub fn commutator_defect(&self) -> F {
        let mut worst = F::zero();
        for j in 0..self.matrices.len() {
            for k in (j + 1)..self.matrices.len() {
                let (a, b) = (&self.matrices[j], &self.matrices[k]);
                let scale = a.frobenius_norm() * b.frobenius_norm();
                if scale.is_zero() {
                    continue;
                }
                let d = a.matmul(b).sub(&b.matmul(a)).frobenius_norm();
                worst = worst.max(d / scale);
            }
        }
        worst
    }

    /// One CSV block per variable, preceded by a `# M_k` comment line.
    pub fn to_csv(&self, var_names: &[String]) -> String {
        let mut out = String::new();
        for (k, m) in self.matrices.iter().enumerate() {
            let name = var_names.get(k).cloned().unwrap_or_else(|| format!("x{k}"));
            out.push_str(&format!("# M_{name}\n"));
            out.push_str(&m.to_csv());
        }
        out
    }
}

/// How the coordinates of a root were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Extraction {
    /// `v^H M_k v / v^H v` on a right eigenvector of the combination.
    Rayleigh,
    /// Evaluation functional: a left eigenvector scaled by its unit entry.
    ReadOff,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateRoot {
    #[serde(serialize_with = "serialize_pairs")]
    pub coords: Vec<Complex64>,
    /// `max |p(x)|` over the original system.
    pub residual: f64,
    /// `max |p(x)| / (1 + ||p||_1)`.
    pub scaled_residual: f64,
    /// `max |Im x_k|`.
    pub imag_norm: f64,
    pub extraction: Extraction,
}

fn serialize_pairs<S: serde::Serializer>(coords: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(coords.iter().map(|c| [c.re, c.im]))
}

impl CandidateRoot {
    fn new(coords: Vec<Complex64>, system: &PolySystem<f64>, extraction: Extraction) -> Self {
        let imag_norm = coords.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        CandidateRoot {
            residual: system.max_residual(&coords),
            scaled_residual: system.scaled_residual(&coords),
            coords,
            imag_norm,
            extraction,
        }
    }

    fn max_abs(&self) -> f64 {
        self.coords.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub seed: u64,
    /// Additional draws of the combination weights after the first.
    pub max_redraws: usize,
    /// Bound on the scaled residual of every root.
    pub residual_tol: f64,
    /// Minimum eigenvalue separation of the combination, relative to
    /// `1 + max |lambda|`.
    pub separation_tol: f64,
    /// Agreement required between Rayleigh and read-off coordinates.
    pub crosscheck_tol: f64,
    /// Complex Newton steps applied to each root of a square system.
    pub newton_steps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 0x5eed,
            max_redraws: 5,
            residual_tol: 1e-6,
            separation_tol: 1e-8,
            crosscheck_tol: 1e-6,
            newton_steps: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RootSolve {
    pub roots: Vec<CandidateRoot>,
    pub weights: Vec<f64>,
    pub attempts: usize,
    pub min_separation: f64,
    /// Roots where the two extraction methods disagreed.
    pub crosscheck_failures: usize,
    /// Largest Rayleigh/read-off disagreement among roots where the read-off
    /// is defined.
    pub crosscheck_gap: f64,
}

impl RootSolve {
    pub fn worst_scaled_residual(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| r.scaled_residual)
            .fold(0.0, f64::max)
    }

    /// Roots as JSON: one array of `[re, im]` pairs per root.
    pub fn to_json(&self) -> serde_json::Value {
        roots_to_json(&self.roots)
    }
}

pub fn roots_to_json(roots: &[CandidateRoot]) -> serde_json::Value {
    serde_json::Value::Array(
        roots
            .iter()
            .map(|r| serde_json::json!(r.coords.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>()))
            .collect(),
    )
}

fn coord_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = 1.0 + a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

/// All complex roots of `original` from matrices consistent with `ns`.
///
/// Weights `a ~ U[-1, 1]^n` are drawn from `opts.seed`; the combination
/// `M(a)` is redrawn when its eigenvalues cluster or a root fails the
/// residual bound. Clustered eigenvalues that survive every redraw are
/// returned as repeated roots.
pub fn solve_roots(
    ns: &NormalSet,
    mats: &MultiplicationMatrices<f64>,
    original: &PolySystem<f64>,
    opts: &SolveOptions,
) -> Result<RootSolve, SolverError> {
    let n = mats.matrices.len();
    if n != original.nvars() {
        return Err(SolverError::Inconsistent(format!(
            "{n} matrices for {} variables",
            original.nvars()
        )));
    }
    if mats.dim() != ns.len()
        || mats
            .matrices
            .iter()
            .any(|m| m.rows() != ns.len() || !m.is_square())
    {
        return Err(SolverError::Inconsistent(format!(
            "matrix size does not match normal set of {}",
            ns.len()
        )));
    }
    if ns.is_empty() {
        return Ok(RootSolve {
            roots: Vec::new(),
            weights: Vec::new(),
            attempts: 0,
            min_separation: f64::INFINITY,
            crosscheck_failures: 0,
            crosscheck_gap: 0.0,
        });
    }
    let unit = ns
        .index_of(&Monomial::one(n))
        .ok_or_else(|| SolverError::Inconsistent("normal set lacks 1".into()))?;
    let jac = newton_jacobian(original, opts.newton_steps);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<RootSolve> = None;
    for attempt in 1..=opts.max_redraws + 1 {
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let combo = Matrix::linear_combination(&weights, &mats.matrices);
        let eig = eigen_decompose(&combo, true)?;
        let left = eig.left.as_ref().expect("requested");
        let lam_scale = 1.0 + eig.values.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let min_sep = eig.min_separation() / lam_scale;
        let (mut roots, mut failures, mut gap) = (Vec::with_capacity(ns.len()), 0, 0.0f64);
        for (v, u) in eig.right.iter().zip(left) {
            let rayleigh = rayleigh_coords(&mats.matrices, v);
            let mut root = CandidateRoot::new(rayleigh, original, Extraction::Rayleigh);
            if u[unit].norm() > 1e-8 {
                let readoff = readoff_coords(&mats.matrices, u, unit);
                let g = coord_gap(&root.coords, &readoff);
                gap = gap.max(g);
                if g > opts.crosscheck_tol {
                    failures += 1;
                    let alt = CandidateRoot::new(readoff, original, Extraction::ReadOff);
                    if alt.scaled_residual < root.scaled_residual {
                        root = alt;
                    }
                }
            }
            if let Some(j) = &jac {
                root = polish(root, original, j, opts.newton_steps);
            }
            roots.push(root);
        }
        let solve = RootSolve {
            roots,
            weights,
            attempts: attempt,
            min_separation: min_sep,
            crosscheck_failures: failures,
            crosscheck_gap: gap,
        };
        let sound = solve.worst_scaled_residual() <= opts.residual_tol;
        if sound && min_sep > opts.separation_tol {
            return Ok(solve);
        }
        let better = match &best {
            None => true,
            Some(b) => match (sound, b.worst_scaled_residual() <= opts.residual_tol) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => solve.min_separation > b.min_separation,
                (false, false) => solve.worst_scaled_residual() < b.worst_scaled_residual(),
            },
        };
        if better {
            best = Some(solve);
        }
    }
    let best = best.expect("at least one attempt");
    if best.worst_scaled_residual() <= opts.residual_tol {
        Ok(best)
    } else {
        Err(SolverError::DegenerateCombination {
            attempts: opts.max_redraws + 1,
            residual: best.worst_scaled_residual(),
        })
    }
}

fn rayleigh_coords(mats: &[Matrix<f64>], v: &[Complex64]) -> Vec<Complex64> {
    let vv: f64 = v.iter().map(|x| x.norm_sqr()).sum();
    mats.iter()
        .map(|m| {
            let mv = m.mul_vec_complex(v);
            v.iter()
                .zip(&mv)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
                / vv
        })
        .collect()
}

/// `x_k = (u^T M_k)_unit / u_unit`: column `unit` of `M_k` holds the normal
/// form of `x_k` itself.
fn readoff_coords(mats: &[Matrix<f64>], u: &[Complex64], unit: usize) -> Vec<Complex64> {
    mats.iter()
        .map(|m| {
            (0..m.rows())
                .map(|i| u[i] * m[(i, unit)])
                .sum::<Complex64>()
                / u[unit]
        })
        .collect()
}

fn newton_jacobian(system: &PolySystem<f64>, steps: usize) -> Option<Vec<Vec<Polynomial<f64>>>> {
    (steps > 0 && system.polys.len() == system.nvars()).then(|| {
        system
            .polys
            .iter()
            .map(|p| (0..system.nvars()).map(|k| p.derivative(k)).collect())
            .collect()
    })
}

fn polish(
    root: CandidateRoot,
    system: &PolySystem<f64>,
    jac: &[Vec<Polynomial<f64>>],
    steps: usize,
) -> CandidateRoot {
    let mut best = root;
    for _ in 0..steps {
        let x = &best.coords;
        let f: Vec<Complex64> = system.polys.iter().map(|p| -p.eval_complex(x)).collect();
        let j: Vec<Vec<Complex64>> = jac
            .iter()
            .map(|row| row.iter().map(|d| d.eval_complex(x)).collect())
            .collect();
        let Some(dx) = solve_complex(j, f) else { break };
        let next: Vec<Complex64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let cand = CandidateRoot::new(next, system, best.extraction);
        if !(cand.scaled_residual < best.scaled_residual) {
            break;
        }
        best = cand;
    }
    best
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub fn solve_complex(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))?;
        if a[piv][k].norm() == 0.0 || !a[piv][k].norm().is_finite() {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot = &top[k];
        for (i, row) in rest.iter_mut().enumerate() {
            let f = row[k] / pivot[k];
            for (x, p) in row[k..n].iter_mut().zip(&pivot[k..n]) {
                *x -= f * p;
            }
            let bk = b[k];
            b[k + 1 + i] -= f * bk;
        }
    }
    for k in (0..n).rev() {
        let s: Complex64 = (k + 1..n).map(|j| a[k][j] * b[j]).sum();
        b[k] = (b[k] - s) / a[k][k];
    }
    b.iter()
        .all(|x| x.re.is_finite() && x.im.is_finite())
        .then_some(b)
}

/// Real parts of the roots whose imaginary parts are at most
/// `imag_tol * (1 + max |x_k|)`; the boundary case is kept.
pub fn filter_real(roots: &[CandidateRoot], imag_tol: f64) -> Vec<Vec<f64>> {
    roots
        .iter()
        .filter(|r| r.imag_norm <= imag_tol * (1.0 + r.max_abs()))
        .map(|r| r.coords.iter().map(|c| c.re).collect())
        .collect()
}

/// Groups points closer than `tol` (max-norm) and reports multiplicities.
pub fn cluster_points(points: &[Vec<f64>], tol: f64) -> Vec<(Vec<f64>, usize)> {
    let mut out: Vec<(Vec<f64>, usize)> = Vec::new();
    for p in points {
        let hit = out
            .iter_mut()
            .find(|(q, _)| p.iter().zip(q.iter()).all(|(a, b)| (a - b).abs() < tol));
        match hit {
            Some((_, count)) => *count += 1,
            None => out.push((p.clone(), 1)),
        }
    }
    out
}

/// Groebner basis, normal set and matrices in one call.
pub fn quotient_structure<K: Field>(
    system: &PolySystem<K>,
    order: &MonomialOrder,
    cfg: &crate::poly::BuchbergerConfig,
) -> Result<(GroebnerBasis<K>, NormalSet, MultiplicationMatrices<K>), SolverError> {
    let gb = crate::poly::buchberger(system, order, cfg)?;
    let ns = normal_set(&gb)?;
    let mats = MultiplicationMatrices::build(&gb, &ns)?;
    Ok((gb, ns, mats))
}
