use std::cmp::Ordering;

use super::monomial::{Monomial, MonomialOrder};
use super::polynomial::Polynomial;
use crate::error::PolyError;
use crate::scalar::Field;

/// Terms sorted strictly descending under a fixed order. Working
/// representation for division and Buchberger.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct SortedPoly<K> {
    pub(crate) terms: Vec<(Monomial, K)>,
}

impl<K: Field> SortedPoly<K> {
    pub(crate) fn from_poly(p: &Polynomial<K>, order: &MonomialOrder) -> Self {
        SortedPoly {
            terms: p.sorted_terms(order),
        }
    }

    pub(crate) fn to_poly(&self, nvars: usize) -> Polynomial<K> {
        Polynomial::from_terms(nvars, self.terms.iter().cloned())
            .expect("consistent variable count")
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    pub(crate) fn lc(&self) -> &K {
        &self.terms[0].1
    }

    pub(crate) fn make_monic(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        let inv = self.terms[0].1.inv();
        self.terms[0].1 = K::one();
        for t in self.terms.iter_mut().skip(1) {
            t.1 = t.1.mul_ref(&inv);
        }
    }

    /// `self - coef * shift * g`, merged in order.
    pub(crate) fn sub_scaled(
        &self,
        coef: &K,
        shift: &Monomial,
        g: &SortedPoly<K>,
        order: &MonomialOrder,
    ) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = g
            .terms
            .iter()
            .map(|(m, c)| (m.mul(shift), c.mul_ref(coef)))
            .peekable();
        loop {
            let ord = match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => order.cmp(&x.0, &y.0),
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (None, None) => break,
            };
            match ord {
                Ordering::Greater => out.push(a.next().unwrap().clone()),
                Ordering::Less => {
                    let (m, c) = b.next().unwrap();
                    out.push((m, -c));
                }
                Ordering::Equal => {
                    let (m, c) = a.next().unwrap();
                    let (_, d) = b.next().unwrap();
                    let s = c.sub_ref(&d);
                    if !s.is_zero() {
                        out.push((m.clone(), s));
                    }
                }
            }
        }
        SortedPoly { terms: out }
    }
}

/// One elimination step: the term with monomial `term` was cancelled using
/// divisor `divisor`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub term: Monomial,
    pub divisor: usize,
}

pub(crate) struct Reduction<K> {
    pub(crate) remainder: SortedPoly<K>,
    pub(crate) quotients: Option<Vec<Vec<(Monomial, K)>>>,
    pub(crate) steps: usize,
}

/// Full multivariate division of `h` by `divisors` (indices into `pool`).
/// The first divisor, in the given order, whose leading monomial divides the
/// current term is used.
pub(crate) fn reduce<K: Field>(
    mut h: SortedPoly<K>,
    pool: &[SortedPoly<K>],
    divisors: &[usize],
    order: &MonomialOrder,
    mut record: Option<&mut Vec<ReductionStep>>,
    with_quotients: bool,
    step_budget: usize,
) -> Result<Reduction<K>, PolyError> {
    let mut remainder: Vec<(Monomial, K)> = Vec::new();
    let mut quotients = with_quotients.then(|| vec![Vec::new(); pool.len()]);
    let mut steps = 0usize;
    // `h` holds the part not yet examined; its leading term is the next one.
    while !h.terms.is_empty() {
        let (m, c) = h.terms[0].clone();
        let hit = divisors.iter().copied().find(|&k| pool[k].lm().divides(&m));
        match hit {
            Some(k) => {
                steps += 1;
                if steps > step_budget {
                    return Err(PolyError::ResourceLimit { steps, pairs: 0 });
                }
                let g = &pool[k];
                let shift = g.lm().quotient_of(&m).expect("divisibility checked");
                let coef = c / g.lc().clone();
                if let Some(rec) = record.as_deref_mut() {
                    rec.push(ReductionStep {
                        term: m.clone(),
                        divisor: k,
                    });
                }
                if let Some(q) = quotients.as_mut() {
                    q[k].push((shift.clone(), coef.clone()));
                }
                let mut next = h.sub_scaled(&coef, &shift, g, order);
                // Exact fields cancel the leading term on their own; rounding
                // fields may leave a residue that must not be re-examined.
                if !K::EXACT && next.terms.first().is_some_and(|t| t.0 == m) {
                    next.terms.remove(0);
                }
                h = next;
            }
            None => {
                remainder.push(h.terms.remove(0));
            }
        }
    }
    Ok(Reduction {
        remainder: SortedPoly { terms: remainder },
        quotients,
        steps,
    })
}

fn sorted_basis<K: Field>(
    basis: &[Polynomial<K>],
    order: &MonomialOrder,
    nvars: usize,
) -> Result<Vec<SortedPoly<K>>, PolyError> {
    basis
        .iter()
        .map(|b| {
            if b.nvars() != nvars {
                return Err(PolyError::VariableCountMismatch {
                    left: nvars,
                    right: b.nvars(),
                });
            }
            if b.is_zero() {
                return Err(PolyError::ZeroPolynomial);
            }
            Ok(SortedPoly::from_poly(b, order))
        })
        .collect()
}

/// Remainder of `p` on division by `basis`; no remainder term is divisible
/// by a leading monomial of `basis`.
pub fn normal_form<K: Field>(
    p: &Polynomial<K>,
    basis: &[Polynomial<K>],
    order: &MonomialOrder,
) -> Result<Polynomial<K>, PolyError> {
    if basis.is_empty() {
        return Err(PolyError::EmptySystem);
    }
    let pool = sorted_basis(basis, order, p.nvars())?;
    let idx: Vec<usize> = (0..pool.len()).collect();
    let red = reduce(
        SortedPoly::from_poly(p, order),
        &pool,
        &idx,
        order,
        None,
        false,
        usize::MAX,
    )?;
    Ok(red.remainder.to_poly(p.nvars()))
}

/// Division with quotients: returns `(q, r)` with `p = sum q_i * basis_i + r`.
pub fn divide<K: Field>(
    p: &Polynomial<K>,
    basis: &[Polynomial<K>],
    order: &MonomialOrder,
) -> Result<(Vec<Polynomial<K>>, Polynomial<K>), PolyError> {
    if basis.is_empty() {
        return Err(PolyError::EmptySystem);
    }
    let n = p.nvars();
    let pool = sorted_basis(basis, order, n)?;
    let idx: Vec<usize> = (0..pool.len()).collect();
    let red = reduce(
        SortedPoly::from_poly(p, order),
        &pool,
        &idx,
        order,
        None,
        true,
        usize::MAX,
    )?;
    let quotients = red
        .quotients
        .expect("requested")
        .into_iter()
        .map(|terms| Polynomial::from_terms(n, terms))
        .collect::<Result<_, _>>()?;
    Ok((quotients, red.remainder.to_poly(n)))
}

pub(crate) fn s_poly_sorted<K: Field>(
    p: &SortedPoly<K>,
    q: &SortedPoly<K>,
    order: &MonomialOrder,
) -> SortedPoly<K> {
    let lcm = p.lm().lcm(q.lm());
    let sp = p.lm().quotient_of(&lcm).expect("lcm");
    let sq = q.lm().quotient_of(&lcm).expect("lcm");
    let zero = SortedPoly { terms: Vec::new() };
    let left = zero.sub_scaled(&(-p.lc().inv()), &sp, p, order);
    let mut out = left.sub_scaled(&q.lc().inv(), &sq, q, order);
    if !K::EXACT && out.terms.first().is_some_and(|t| t.0 == lcm) {
        out.terms.remove(0);
    }
    out
}

/// `lcm/LT(p) * p - lcm/LT(q) * q`.
pub fn s_polynomial<K: Field>(
    p: &Polynomial<K>,
    q: &Polynomial<K>,
    order: &MonomialOrder,
) -> Result<Polynomial<K>, PolyError> {
    if p.nvars() != q.nvars() {
        return Err(PolyError::VariableCountMismatch {
            left: p.nvars(),
            right: q.nvars(),
        });
    }
    if p.is_zero() || q.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let s = s_poly_sorted(
        &SortedPoly::from_poly(p, order),
        &SortedPoly::from_poly(q, order),
        order,
    );
    Ok(s.to_poly(p.nvars()))
}
