//! Dense nonsymmetric eigenproblem: balancing, Householder reduction to
//! upper Hessenberg form, Francis double-shift QR for the eigenvalues and
//! complex inverse iteration for the eigenvectors.

use num_complex::Complex;

use super::matrix::Matrix;
use crate::error::SolverError;
use crate::scalar::Real;

/// Iterations allowed per eigenvalue before giving up.
const MAX_ITS: usize = 60;

#[derive(Clone, Debug)]
pub struct EigenPair<F> {
    pub value: Complex<F>,
    /// Unit 2-norm.
    pub vector: Vec<Complex<F>>,
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition<F> {
    pub values: Vec<Complex<F>>,
    /// Right eigenvectors, `M v = lambda v`.
    pub right: Vec<Vec<Complex<F>>>,
    /// Left eigenvectors, `u^T M = lambda u^T`, when requested.
    pub left: Option<Vec<Vec<Complex<F>>>>,
}

impl<F: Real> EigenDecomposition<F> {
    pub fn pairs(&self) -> Vec<EigenPair<F>> {
        self.values
            .iter()
            .zip(&self.right)
            .map(|(v, x)| EigenPair {
                value: *v,
                vector: x.clone(),
            })
            .collect()
    }

    /// Smallest distance between two eigenvalues (infinite for `n < 2`).
    pub fn min_separation(&self) -> F {
        let mut best = F::infinity();
        for i in 0..self.values.len() {
            for j in (i + 1)..self.values.len() {
                best = best.min((self.values[i] - self.values[j]).norm());
            }
        }
        best
    }
}

/// Diagonal similarity `D^-1 A D` with power-of-two entries that equalizes
/// row and column norms. Returns the balanced matrix and the diagonal of `D`.
pub fn balance<F: Real>(a: &Matrix<F>) -> (Matrix<F>, Vec<F>) {
    let n = a.rows();
    let mut b = a.clone();
    let mut scale = vec![F::one(); n];
    let radix = F::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (F::zero(), F::zero());
            for j in 0..n {
                if j != i {
                    c = c + b[(j, i)].abs();
                    r = r + b[(i, j)].abs();
                }
            }
            if c.is_zero() || r.is_zero() {
                continue;
            }
            let s = c + r;
            let mut f = F::one();
            let mut g = r / radix;
            while c < g {
                f = f * radix;
                c = c * sqrdx;
            }
            g = r * radix;
            while c > g {
                f = f / radix;
                c = c / sqrdx;
            }
            if (c + r) / f < F::lit(0.95) * s {
                done = false;
                let g = F::one() / f;
                scale[i] = scale[i] * f;
                for j in 0..n {
                    b[(i, j)] = b[(i, j)] * g;
                }
                for j in 0..n {
                    b[(j, i)] = b[(j, i)] * f;
                }
            }
        }
    }
    (b, scale)
}

/// Orthogonal similarity to upper Hessenberg form.
pub fn hessenberg<F: Real>(a: &Matrix<F>) -> Matrix<F> {
    let n = a.rows();
    let mut h = a.clone();
    if n < 3 {
        return h;
    }
    let two = F::lit(2.0);
    for k in 0..n - 2 {
        let norm = (k + 1..n)
            .fold(F::zero(), |acc, i| acc + h[(i, k)] * h[(i, k)])
            .sqrt();
        if norm.is_zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let alpha = if x0 >= F::zero() { -norm } else { norm };
        let mut v: Vec<F> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let vnorm = v.iter().fold(F::zero(), |acc, x| acc + *x * *x).sqrt();
        if vnorm.is_zero() {
            continue;
        }
        for x in v.iter_mut() {
            *x = *x / vnorm;
        }
        for j in k..n {
            let s = v
                .iter()
                .enumerate()
                .fold(F::zero(), |acc, (i, vi)| acc + *vi * h[(k + 1 + i, j)]);
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] = h[(k + 1 + i, j)] - two * *vi * s;
            }
        }
        for i in 0..n {
            let s = v
                .iter()
                .enumerate()
                .fold(F::zero(), |acc, (j, vj)| acc + h[(i, k + 1 + j)] * *vj);
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] = h[(i, k + 1 + j)] - two * s * *vj;
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = F::zero();
        }
    }
    h
}

fn sign<F: Real>(a: F, b: F) -> F {
    if b >= F::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// iteration with exceptional shifts. The matrix is overwritten.
fn hqr<F: Real>(a: &mut Matrix<F>) -> Result<Vec<Complex<F>>, SolverError> {
    let n = a.rows() as isize;
    let mut w = vec![Complex::new(F::zero(), F::zero()); n as usize];
    let eps = F::epsilon();
    let at = |a: &Matrix<F>, i: isize, j: isize| a[(i as usize, j as usize)];
    let mut anorm = F::zero();
    for i in 0..n {
        for j in (i - 1).max(0)..n {
            anorm = anorm + at(a, i, j).abs();
        }
    }
    let mut nn = n - 1;
    let mut t = F::zero();
    let (mut p, mut q, mut r);
    let (mut x, mut y, mut z);
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l > 0 {
                let mut s = at(a, l - 1, l - 1).abs() + at(a, l, l).abs();
                if s.is_zero() {
                    s = anorm;
                }
                if at(a, l, l - 1).abs() <= eps * s {
                    a[(l as usize, (l - 1) as usize)] = F::zero();
                    break;
                }
                l -= 1;
            }
            x = at(a, nn, nn);
            if l == nn {
                w[nn as usize] = Complex::new(x + t, F::zero());
                nn -= 1;
            } else {
                y = at(a, nn - 1, nn - 1);
                let ww = at(a, nn, nn - 1) * at(a, nn - 1, nn);
                if l == nn - 1 {
                    p = F::lit(0.5) * (y - x);
                    q = p * p + ww;
                    z = q.abs().sqrt();
                    x = x + t;
                    if q >= F::zero() {
                        z = p + sign(z, p);
                        let hi = x + z;
                        let lo = if z.is_zero() { hi } else { x - ww / z };
                        w[(nn - 1) as usize] = Complex::new(hi, F::zero());
                        w[nn as usize] = Complex::new(lo, F::zero());
                    } else {
                        w[nn as usize] = Complex::new(x + p, -z);
                        w[(nn - 1) as usize] = Complex::new(x + p, z);
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITS {
                        return Err(SolverError::NoConvergence(MAX_ITS));
                    }
                    let mut ww = ww;
                    if its > 0 && its.is_multiple_of(10) {
                        t = t + x;
                        for i in 0..=nn {
                            a[(i as usize, i as usize)] = at(a, i, i) - x;
                        }
                        let s = at(a, nn, nn - 1).abs() + at(a, nn - 1, nn - 2).abs();
                        x = F::lit(0.75) * s;
                        y = x;
                        ww = F::lit(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = at(a, m, m);
                        r = x - z;
                        let s = y - z;
                        p = (r * s - ww) / at(a, m + 1, m) + at(a, m, m + 1);
                        q = at(a, m + 1, m + 1) - z - r - s;
                        r = at(a, m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p = p / s;
                        q = q / s;
                        r = r / s;
                        if m == l {
                            break;
                        }
                        let u = at(a, m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (at(a, m - 1, m - 1).abs() + z.abs() + at(a, m + 1, m + 1).abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nn - 1 {
                        a[((i + 2) as usize, i as usize)] = F::zero();
                        if i != m {
                            a[((i + 2) as usize, (i - 1) as usize)] = F::zero();
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = at(a, k, k - 1);
                            q = at(a, k + 1, k - 1);
                            r = if k + 1 != nn {
                                at(a, k + 2, k - 1)
                            } else {
                                F::zero()
                            };
                            x = p.abs() + q.abs() + r.abs();
                            if !x.is_zero() {
                                p = p / x;
                                q = q / x;
                                r = r / x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if !s.is_zero() {
                            if k == m {
                                if l != m {
                                    a[(k as usize, (k - 1) as usize)] = -at(a, k, k - 1);
                                }
                            } else {
                                a[(k as usize, (k - 1) as usize)] = -s * x;
                            }
                            p = p + s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q = q / p;
                            r = r / p;
                            for j in k..=nn {
                                p = at(a, k, j) + q * at(a, k + 1, j);
                                if k + 1 != nn {
                                    p = p + r * at(a, k + 2, j);
                                    a[((k + 2) as usize, j as usize)] = at(a, k + 2, j) - p * z;
                                }
                                a[((k + 1) as usize, j as usize)] = at(a, k + 1, j) - p * y;
                                a[(k as usize, j as usize)] = at(a, k, j) - p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * at(a, i, k) + y * at(a, i, k + 1);
                                if k + 1 != nn {
                                    p = p + z * at(a, i, k + 2);
                                    a[(i as usize, (k + 2) as usize)] = at(a, i, k + 2) - p * r;
                                }
                                a[(i as usize, (k + 1) as usize)] = at(a, i, k + 1) - p * q;
                                a[(i as usize, k as usize)] = at(a, i, k) - p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok(w)
}

/// All eigenvalues of a square matrix.
pub fn eigenvalues<F: Real>(m: &Matrix<F>) -> Result<Vec<Complex<F>>, SolverError> {
    check_input(m)?;
    let (b, _) = balance(m);
    let mut h = hessenberg(&b);
    hqr(&mut h)
}

fn check_input<F: Real>(m: &Matrix<F>) -> Result<(), SolverError> {
    if !m.is_square() {
        return Err(SolverError::Inconsistent(format!(
            "{}x{} matrix is not square",
            m.rows(),
            m.cols()
        )));
    }
    if m.to_rows().iter().flatten().any(|x| !x.is_finite()) {
        return Err(SolverError::Inconsistent("non-finite matrix entry".into()));
    }
    Ok(())
}

/// Solves `(A - shift I) x = b` in place by Gaussian elimination with partial
/// pivoting. Exactly singular pivots are replaced by `tiny`.
fn shifted_solve<F: Real>(a: &Matrix<F>, shift: Complex<F>, b: &mut [Complex<F>], tiny: F) {
    let n = a.rows();
    let mut lu: Vec<Complex<F>> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let d = if i == j {
                shift
            } else {
                Complex::new(F::zero(), F::zero())
            };
            lu.push(Complex::new(a[(i, j)], F::zero()) - d);
        }
    }
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| {
                lu[i * n + k]
                    .norm()
                    .partial_cmp(&lu[j * n + k].norm())
                    .unwrap()
            })
            .unwrap();
        if piv != k {
            for j in 0..n {
                lu.swap(k * n + j, piv * n + j);
            }
            b.swap(k, piv);
        }
        if lu[k * n + k].norm() <= tiny {
            lu[k * n + k] = Complex::new(tiny, F::zero());
        }
        let d = lu[k * n + k];
        for i in k + 1..n {
            let f = lu[i * n + k] / d;
            if f.norm().is_zero() {
                continue;
            }
            for j in k..n {
                let u = lu[k * n + j];
                lu[i * n + j] = lu[i * n + j] - f * u;
            }
            let bk = b[k];
            b[i] = b[i] - f * bk;
        }
    }
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s = s - lu[k * n + j] * b[j];
        }
        b[k] = s / lu[k * n + k];
    }
}

fn normalize<F: Real>(v: &mut [Complex<F>]) -> F {
    let norm = v.iter().fold(F::zero(), |acc, x| acc + x.norm_sqr()).sqrt();
    if norm > F::zero() {
        for x in v.iter_mut() {
            *x = x.unscale(norm);
        }
    }
    norm
}

/// Unit eigenvector of `a` for the eigenvalue estimate `lambda`, by inverse
/// iteration.
pub fn eigenvector<F: Real>(a: &Matrix<F>, lambda: Complex<F>) -> Vec<Complex<F>> {
    let n = a.rows();
    let scale = a.max_abs().max(F::min_positive_value());
    let tiny = F::epsilon() * scale;
    // Deterministic start vector with no special structure.
    let mut v: Vec<Complex<F>> = (0..n)
        .map(|i| {
            Complex::new(
                F::one() + F::lit(0.1) * F::lit(i as f64).sin(),
                F::lit(0.01) * F::lit(i as f64),
            )
        })
        .collect();
    normalize(&mut v);
    let mut prev_res = F::infinity();
    for _ in 0..4 {
        let mut next = v.clone();
        shifted_solve(a, lambda, &mut next, tiny);
        if normalize(&mut next).is_zero()
            || next.iter().any(|x| !x.re.is_finite() || !x.im.is_finite())
        {
            break;
        }
        let av = a.mul_vec_complex(&next);
        let res = av
            .iter()
            .zip(&next)
            .fold(F::zero(), |acc, (y, x)| acc + (*y - *x * lambda).norm_sqr())
            .sqrt();
        v = next;
        if res <= F::epsilon() * scale * F::lit(16.0) || res >= prev_res {
            break;
        }
        prev_res = res;
    }
    v
}

/// Eigenvalues with unit right eigenvectors and, if `with_left`, unit left
/// eigenvectors.
pub fn eigen_decompose<F: Real>(
    m: &Matrix<F>,
    with_left: bool,
) -> Result<EigenDecomposition<F>, SolverError> {
    check_input(m)?;
    let (b, d) = balance(m);
    let mut h = hessenberg(&b);
    let values = hqr(&mut h)?;
    // Eigenvectors of the balanced matrix map back through D (right) and
    // D^-1 (left).
    let back = |y: Vec<Complex<F>>, inverse: bool| {
        let mut x: Vec<Complex<F>> = y
            .into_iter()
            .zip(&d)
            .map(|(yi, di)| {
                if inverse {
                    yi.unscale(*di)
                } else {
                    yi.scale(*di)
                }
            })
            .collect();
        normalize(&mut x);
        x
    };
    let right = values
        .iter()
        .map(|l| back(eigenvector(&b, *l), false))
        .collect();
    let left = with_left.then(|| {
        let bt = b.transpose();
        values
            .iter()
            .map(|l| back(eigenvector(&bt, *l), true))
            .collect()
    });
    Ok(EigenDecomposition {
        values,
        right,
        left,
    })
}

/// `max_l |M v_l - lambda_l v_l|` over the right eigenpairs.
pub fn max_residual<F: Real>(m: &Matrix<F>, eig: &EigenDecomposition<F>) -> F {
    eig.values
        .iter()
        .zip(&eig.right)
        .fold(F::zero(), |acc, (l, v)| {
            let mv = m.mul_vec_complex(v);
            let r = mv
                .iter()
                .zip(v)
                .fold(F::zero(), |s, (y, x)| s + (*y - *x * *l).norm_sqr())
                .sqrt();
            acc.max(r)
        })
}
