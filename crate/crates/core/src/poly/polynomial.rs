use std::collections::BTreeMap;

use num_complex::Complex64;

use super::monomial::{Monomial, MonomialOrder};
use crate::error::PolyError;
use crate::scalar::Field;

/// Sparse multivariate polynomial with no stored zero coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<K> {
    nvars: usize,
    terms: BTreeMap<Monomial, K>,
}

impl<K: Field> Polynomial<K> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: K) -> Self {
        Self::monomial(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, var: usize) -> Self {
        Self::monomial(Monomial::var(nvars, var), K::one())
    }

    pub fn monomial(m: Monomial, c: K) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    /// Builds a polynomial, summing repeated monomials and dropping zeros.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, K)>,
    ) -> Result<Self, PolyError> {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(PolyError::VariableCountMismatch {
                    left: nvars,
                    right: m.nvars(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &K)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&K> {
        self.terms.get(m)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Terms in descending order under `order`.
    pub fn sorted_terms(&self, order: &MonomialOrder) -> Vec<(Monomial, K)> {
        let mut v: Vec<_> = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        v.sort_by(|a, b| order.cmp(&b.0, &a.0));
        v
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &K)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub fn leading_monomial(&self, order: &MonomialOrder) -> Option<&Monomial> {
        self.leading_term(order).map(|(m, _)| m)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: K) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::VariableCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul_ref(cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, r: &K) -> Self {
        if r.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.mul_ref(r)))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-K::one())
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &K) -> Self {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(t, d)| (t.mul(m), d.mul_ref(c)))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Polynomial::constant(self.nvars, K::one());
        for _ in 0..e {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Partial derivative with respect to `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponents()[var];
            if e == 0 {
                continue;
            }
            let mut ex = m.exponents().to_vec();
            ex[var] -= 1;
            out.add_term(Monomial::new(ex), c.mul_ref(&K::from_i64(e as i64)));
        }
        out
    }

    /// Scales so the leading coefficient under `order` is one.
    pub fn monic(&self, order: &MonomialOrder) -> Self {
        match self.leading_term(order) {
            Some((_, lc)) => self.scale(&lc.inv()),
            None => self.clone(),
        }
    }

    pub fn map_coeffs<L: Field>(
        &self,
        mut f: impl FnMut(&K) -> Option<L>,
    ) -> Result<Polynomial<L>, PolyError> {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let mapped = f(c).ok_or_else(|| PolyError::Unrepresentable(format!("{c:?}")))?;
            out.add_term(m.clone(), mapped);
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> Polynomial<f64> {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.to_f64()))
                .collect(),
        }
    }

    /// Sum of absolute coefficient values (as `f64`).
    pub fn coeff_norm1(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).sum()
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .zip(x)
                    .fold(c.to_f64(), |acc, (&e, &xi)| acc * xi.powi(e as i32))
            })
            .sum()
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .zip(x)
                    .fold(Complex64::new(c.to_f64(), 0.0), |acc, (&e, xi)| {
                        acc * xi.powu(e)
                    })
            })
            .sum()
    }

    /// Exact evaluation in the coefficient field.
    pub fn eval(&self, x: &[K]) -> K {
        let mut acc = K::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (&e, xi) in m.exponents().iter().zip(x) {
                for _ in 0..e {
                    t = t.mul_ref(xi);
                }
            }
            acc = acc + t;
        }
        acc
    }
}

/// An ordered list of polynomials over common, named variables.
#[derive(Clone, PartialEq, Debug)]
pub struct PolySystem<K> {
    pub polys: Vec<Polynomial<K>>,
    pub var_names: Vec<String>,
}

impl<K: Field> PolySystem<K> {
    pub fn new(polys: Vec<Polynomial<K>>, var_names: Vec<String>) -> Result<Self, PolyError> {
        if polys.is_empty() {
            return Err(PolyError::EmptySystem);
        }
        for p in &polys {
            if p.nvars() != var_names.len() {
                return Err(PolyError::VariableCountMismatch {
                    left: var_names.len(),
                    right: p.nvars(),
                });
            }
        }
        Ok(PolySystem { polys, var_names })
    }

    pub fn nvars(&self) -> usize {
        self.var_names.len()
    }

    pub fn to_f64(&self) -> PolySystem<f64> {
        PolySystem {
            polys: self.polys.iter().map(Polynomial::to_f64).collect(),
            var_names: self.var_names.clone(),
        }
    }

    pub fn map_coeffs<L: Field>(
        &self,
        mut f: impl FnMut(&K) -> Option<L>,
    ) -> Result<PolySystem<L>, PolyError> {
        let polys = self
            .polys
            .iter()
            .map(|p| p.map_coeffs(&mut f))
            .collect::<Result<_, _>>()?;
        Ok(PolySystem {
            polys,
            var_names: self.var_names.clone(),
        })
    }

    /// Largest `|p(x)|` over the system.
    pub fn max_residual(&self, x: &[Complex64]) -> f64 {
        self.polys
            .iter()
            .map(|p| p.eval_complex(x).norm())
            .fold(0.0, f64::max)
    }

    /// Largest scaled residual `|p(x)| / (1 + ||p||_1)` over the system.
    pub fn scaled_residual(&self, x: &[Complex64]) -> f64 {
        self.polys
            .iter()
            .map(|p| p.eval_complex(x).norm() / (1.0 + p.coeff_norm1()))
            .fold(0.0, f64::max)
    }
}
