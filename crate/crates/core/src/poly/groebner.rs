//! Buchberger's algorithm with the normal selection strategy, the product
//! (coprime leading monomials) criterion and the chain criterion.
//!
//! Besides the reduced basis, a run can record a [`Trace`]: the sequence of
//! S-pairs that produced new basis elements, every elimination step, and the
//! support of every intermediate element. The trace depends only on monomial
//! data, so it can be replayed over a different coefficient field for any
//! parameter instance with the same generic support (see
//! `zerodim::template`).

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::division::{reduce, s_poly_sorted, ReductionStep, SortedPoly};
use super::monomial::{Monomial, MonomialOrder};
use super::polynomial::{PolySystem, Polynomial};
use crate::error::PolyError;
use crate::scalar::{Field, Rational};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BuchbergerConfig {
    pub max_pairs: usize,
    pub max_reduction_steps: usize,
}

impl Default for BuchbergerConfig {
    fn default() -> Self {
        BuchbergerConfig {
            max_pairs: 100_000,
            max_reduction_steps: 5_000_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BuchbergerStats {
    pub pairs_created: usize,
    pub pairs_reduced: usize,
    pub zero_reductions: usize,
    pub product_criterion: usize,
    pub chain_criterion: usize,
    pub reduction_steps: usize,
}

/// A reduced Groebner basis, sorted by ascending leading monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis<K> {
    pub elements: Vec<Polynomial<K>>,
    pub order: MonomialOrder,
}

impl<K: Field> GroebnerBasis<K> {
    pub fn nvars(&self) -> usize {
        self.order.nvars()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.elements
            .iter()
            .map(|g| g.leading_monomial(&self.order).expect("nonzero").clone())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True when the basis is {1}, i.e. the system has no solutions.
    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
            && self.elements[0]
                .leading_monomial(&self.order)
                .is_some_and(Monomial::is_one)
    }

    pub fn normal_form(&self, p: &Polynomial<K>) -> Result<Polynomial<K>, PolyError> {
        super::division::normal_form(p, &self.elements, &self.order)
    }
}

/// Where a basis slot came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    /// Generator `k` of the input system, made monic.
    Input(usize),
    /// Reduced S-polynomial of slots `i` and `j`.
    SPair(usize, usize),
    /// Tail reduction of slot `k` against the minimal basis.
    Interreduce(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSlot {
    pub origin: Origin,
    pub steps: Vec<ReductionStep>,
    /// Monomials of the finished (monic) element, leading monomial first.
    pub support: Vec<Monomial>,
}

/// Structural record of a Buchberger run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub order: MonomialOrder,
    pub n_inputs: usize,
    pub slots: Vec<TraceSlot>,
    /// Slots of the reduced basis, in the same order as
    /// [`GroebnerBasis::elements`].
    pub reduced: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
struct Pair {
    i: usize,
    j: usize,
}

struct Engine<'a, K> {
    order: &'a MonomialOrder,
    cfg: &'a BuchbergerConfig,
    basis: Vec<SortedPoly<K>>,
    pending: Vec<Pair>,
    pending_set: HashSet<(usize, usize)>,
    stats: BuchbergerStats,
    trace: Option<Vec<TraceSlot>>,
}

impl<'a, K: Field> Engine<'a, K> {
    fn push_slot(
        &mut self,
        poly: SortedPoly<K>,
        origin: Origin,
        steps: Vec<ReductionStep>,
    ) -> usize {
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceSlot {
                origin,
                steps,
                support: poly.terms.iter().map(|(m, _)| m.clone()).collect(),
            });
        }
        self.basis.push(poly);
        self.basis.len() - 1
    }

    fn add_pairs_for(&mut self, new: usize) -> Result<(), PolyError> {
        for i in 0..new {
            self.stats.pairs_created += 1;
            if self.stats.pairs_created > self.cfg.max_pairs {
                return Err(PolyError::ResourceLimit {
                    steps: self.stats.reduction_steps,
                    pairs: self.stats.pairs_created,
                });
            }
            self.pending.push(Pair { i, j: new });
            self.pending_set.insert((i, new));
        }
        Ok(())
    }

    fn lcm(&self, p: &Pair) -> Monomial {
        self.basis[p.i].lm().lcm(self.basis[p.j].lm())
    }

    /// Index of the pending pair with the smallest lcm (degree first, then
    /// the monomial order, then creation order).
    fn select(&self) -> usize {
        let mut best = 0;
        let mut best_lcm = self.lcm(&self.pending[0]);
        for (k, p) in self.pending.iter().enumerate().skip(1) {
            let l = self.lcm(p);
            let better = match l.degree().cmp(&best_lcm.degree()) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => {
                    self.order.cmp(&l, &best_lcm) == std::cmp::Ordering::Less
                }
            };
            if better {
                best = k;
                best_lcm = l;
            }
        }
        best
    }

    fn key(a: usize, b: usize) -> (usize, usize) {
        (a.min(b), a.max(b))
    }

    fn chain_skips(&self, p: &Pair, lcm: &Monomial) -> bool {
        (0..self.basis.len()).any(|k| {
            k != p.i
                && k != p.j
                && self.basis[k].lm().divides(lcm)
                && !self.pending_set.contains(&Self::key(p.i, k))
                && !self.pending_set.contains(&Self::key(p.j, k))
        })
    }

    fn run(&mut self) -> Result<(), PolyError> {
        while !self.pending.is_empty() {
            let idx = self.select();
            let pair = self.pending.swap_remove(idx);
            self.pending_set.remove(&(pair.i, pair.j));
            let (gi, gj) = (&self.basis[pair.i], &self.basis[pair.j]);
            if gi.lm().coprime(gj.lm()) {
                self.stats.product_criterion += 1;
                continue;
            }
            let lcm = gi.lm().lcm(gj.lm());
            if self.chain_skips(&pair, &lcm) {
                self.stats.chain_criterion += 1;
                continue;
            }
            self.stats.pairs_reduced += 1;
            let s = s_poly_sorted(gi, gj, self.order);
            let divisors: Vec<usize> = (0..self.basis.len()).collect();
            let mut steps = Vec::new();
            let budget = self
                .cfg
                .max_reduction_steps
                .saturating_sub(self.stats.reduction_steps);
            let rec = self.trace.is_some().then_some(&mut steps);
            let red = reduce(s, &self.basis, &divisors, self.order, rec, false, budget).map_err(
                |_| PolyError::ResourceLimit {
                    steps: self.cfg.max_reduction_steps,
                    pairs: self.stats.pairs_created,
                },
            )?;
            self.stats.reduction_steps += red.steps;
            let mut h = red.remainder;
            if h.is_zero() {
                self.stats.zero_reductions += 1;
                continue;
            }
            h.make_monic();
            let new = self.push_slot(h, Origin::SPair(pair.i, pair.j), steps);
            self.add_pairs_for(new)?;
        }
        Ok(())
    }

    /// Drops elements whose leading monomial is divisible by another's, then
    /// tail-reduces the survivors. Returns slot indices sorted by ascending
    /// leading monomial.
    fn reduce_basis(&mut self) -> Result<Vec<usize>, PolyError> {
        let n = self.basis.len();
        let mut minimal: Vec<usize> = Vec::new();
        for i in 0..n {
            let lm_i = self.basis[i].lm();
            let redundant = (0..n).any(|j| {
                j != i && {
                    let lm_j = self.basis[j].lm();
                    // Equal leading monomials: keep the earliest slot.
                    lm_j.divides(lm_i) && (lm_j != lm_i || j < i)
                }
            });
            if !redundant {
                minimal.push(i);
            }
        }
        let mut reduced = Vec::with_capacity(minimal.len());
        for &i in &minimal {
            let others: Vec<usize> = minimal.iter().copied().filter(|&j| j != i).collect();
            let mut steps = Vec::new();
            let rec = self.trace.is_some().then_some(&mut steps);
            let budget = self
                .cfg
                .max_reduction_steps
                .saturating_sub(self.stats.reduction_steps);
            let red = reduce(
                self.basis[i].clone(),
                &self.basis,
                &others,
                self.order,
                rec,
                false,
                budget,
            )?;
            self.stats.reduction_steps += red.steps;
            let mut r = red.remainder;
            r.make_monic();
            reduced.push((i, r, steps));
        }
        let mut slots = Vec::with_capacity(reduced.len());
        for (i, r, steps) in reduced {
            slots.push(self.push_slot(r, Origin::Interreduce(i), steps));
        }
        slots.sort_by(|&a, &b| self.order.cmp(self.basis[a].lm(), self.basis[b].lm()));
        Ok(slots)
    }
}

fn run_buchberger<K: Field>(
    system: &PolySystem<K>,
    order: &MonomialOrder,
    cfg: &BuchbergerConfig,
    record: bool,
) -> Result<(GroebnerBasis<K>, BuchbergerStats, Option<Trace>), PolyError> {
    let n = system.nvars();
    if order.nvars() != n {
        return Err(PolyError::VariableCountMismatch {
            left: order.nvars(),
            right: n,
        });
    }
    if system.polys.iter().all(Polynomial::is_zero) {
        return Err(PolyError::EmptySystem);
    }
    let mut eng = Engine {
        order,
        cfg,
        basis: Vec::new(),
        pending: Vec::new(),
        pending_set: HashSet::new(),
        stats: BuchbergerStats::default(),
        trace: record.then(Vec::new),
    };
    for (k, p) in system.polys.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let mut sp = SortedPoly::from_poly(p, order);
        sp.make_monic();
        let slot = eng.push_slot(sp, Origin::Input(k), Vec::new());
        eng.add_pairs_for(slot)?;
    }
    eng.run()?;
    let reduced = eng.reduce_basis()?;
    let elements = reduced.iter().map(|&s| eng.basis[s].to_poly(n)).collect();
    let gb = GroebnerBasis {
        elements,
        order: order.clone(),
    };
    let trace = eng.trace.take().map(|slots| Trace {
        order: order.clone(),
        n_inputs: system.polys.len(),
        slots,
        reduced,
    });
    Ok((gb, eng.stats, trace))
}

/// Reduced Groebner basis of the ideal generated by `system`.
pub fn buchberger<K: Field>(
    system: &PolySystem<K>,
    order: &MonomialOrder,
    cfg: &BuchbergerConfig,
) -> Result<GroebnerBasis<K>, PolyError> {
    run_buchberger(system, order, cfg, false).map(|(gb, _, _)| gb)
}

pub fn buchberger_with_stats<K: Field>(
    system: &PolySystem<K>,
    order: &MonomialOrder,
    cfg: &BuchbergerConfig,
) -> Result<(GroebnerBasis<K>, BuchbergerStats), PolyError> {
    run_buchberger(system, order, cfg, false).map(|(gb, st, _)| (gb, st))
}

/// Like [`buchberger`], additionally returning the structural trace.
pub fn buchberger_traced<K: Field>(
    system: &PolySystem<K>,
    order: &MonomialOrder,
    cfg: &BuchbergerConfig,
) -> Result<(GroebnerBasis<K>, Trace), PolyError> {
    run_buchberger(system, order, cfg, true).map(|(gb, _, t)| (gb, t.expect("recorded")))
}

/// Outcome of re-checking a basis against Buchberger's criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub s_pairs_checked: usize,
    pub nonzero_s_remainders: usize,
    pub nonzero_generator_remainders: usize,
    pub monic: bool,
    pub reduced: bool,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.nonzero_s_remainders == 0
            && self.nonzero_generator_remainders == 0
            && self.monic
            && self.reduced
    }
}

/// Re-verifies every postcondition of a reduced Groebner basis for the ideal
/// of `system`: all S-polynomials reduce to zero, every generator reduces to
/// zero, leading coefficients are one, and no basis leading monomial divides
/// a term of another element.
pub fn verify_groebner<K: Field>(
    gb: &GroebnerBasis<K>,
    system: &PolySystem<K>,
) -> Result<Verification, PolyError> {
    let o = &gb.order;
    let sorted: Vec<SortedPoly<K>> = gb
        .elements
        .iter()
        .map(|g| SortedPoly::from_poly(g, o))
        .collect();
    let all: Vec<usize> = (0..sorted.len()).collect();
    let mut v = Verification {
        s_pairs_checked: 0,
        nonzero_s_remainders: 0,
        nonzero_generator_remainders: 0,
        monic: sorted.iter().all(|g| g.lc().is_one()),
        reduced: true,
    };
    for i in 0..sorted.len() {
        for j in (i + 1)..sorted.len() {
            v.s_pairs_checked += 1;
            let s = s_poly_sorted(&sorted[i], &sorted[j], o);
            let r = reduce(s, &sorted, &all, o, None, false, usize::MAX)?;
            if !r.remainder.is_zero() {
                v.nonzero_s_remainders += 1;
            }
        }
        for j in 0..sorted.len() {
            if i != j
                && sorted[j]
                    .terms
                    .iter()
                    .any(|(m, _)| sorted[i].lm().divides(m))
            {
                v.reduced = false;
            }
        }
    }
    for p in &system.polys {
        if p.is_zero() {
            continue;
        }
        let r = reduce(
            SortedPoly::from_poly(p, o),
            &sorted,
            &all,
            o,
            None,
            false,
            usize::MAX,
        )?;
        if !r.remainder.is_zero() {
            v.nonzero_generator_remainders += 1;
        }
    }
    Ok(v)
}

/// [`verify_groebner`] for rational bases by fraction-free pseudo-division
/// over the integers.
///
/// Every polynomial is scaled to a primitive integer polynomial, and a
/// reduction step forms `lc(g) h - c x^a g` instead of dividing. Scaling by
/// nonzero integers does not change whether a remainder vanishes, so the
/// outcome equals the rational check while avoiding a gcd per coefficient
/// operation. A reduction stops at the first term no leading monomial
/// divides.
pub fn verify_groebner_exact(
    gb: &GroebnerBasis<Rational>,
    system: &PolySystem<Rational>,
) -> Result<Verification, PolyError> {
    let o = &gb.order;
    let basis: Vec<IntPoly> = gb
        .elements
        .iter()
        .map(|g| IntPoly::from_rational(g, o))
        .collect();
    let mut v = Verification {
        s_pairs_checked: 0,
        nonzero_s_remainders: 0,
        nonzero_generator_remainders: 0,
        monic: gb
            .elements
            .iter()
            .all(|g| g.leading_term(o).is_some_and(|(_, c)| c.is_one())),
        reduced: true,
    };
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            v.s_pairs_checked += 1;
            if !basis[i].s_poly(&basis[j], o).reduces_to_zero(&basis, o) {
                v.nonzero_s_remainders += 1;
            }
        }
        for j in 0..basis.len() {
            if i != j && basis[j].terms.iter().any(|(m, _)| basis[i].lm().divides(m)) {
                v.reduced = false;
            }
        }
    }
    for p in system.polys.iter().filter(|p| !p.is_zero()) {
        if !IntPoly::from_rational(p, o).reduces_to_zero(&basis, o) {
            v.nonzero_generator_remainders += 1;
        }
    }
    Ok(v)
}

/// Integer polynomial with terms in descending order.
#[derive(Clone, Debug)]
struct IntPoly {
    terms: Vec<(Monomial, BigInt)>,
}

impl IntPoly {
    fn from_rational(p: &Polynomial<Rational>, o: &MonomialOrder) -> Self {
        let sorted = p.sorted_terms(o);
        let den = sorted
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut out = IntPoly {
            terms: sorted
                .into_iter()
                .map(|(m, c)| (m, c.numer() * &den / c.denom()))
                .collect(),
        };
        out.make_primitive();
        out
    }

    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    fn make_primitive(&mut self) {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                return;
            }
        }
        if !g.is_zero() {
            for t in &mut self.terms {
                t.1 /= &g;
            }
        }
    }

    /// `a * self[1..] - b * x^shift * g[1..]`: the leading terms are assumed
    /// to cancel.
    fn combine_tails(
        &self,
        a: &BigInt,
        b: &BigInt,
        shift: &Monomial,
        g: &IntPoly,
        o: &MonomialOrder,
    ) -> IntPoly {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut x = self.terms[1..]
            .iter()
            .map(|(m, c)| (m.clone(), a * c))
            .peekable();
        let mut y = g.terms[1..]
            .iter()
            .map(|(m, c)| (m.mul(shift), b * c))
            .peekable();
        loop {
            let ord = match (x.peek(), y.peek()) {
                (Some(p), Some(q)) => o.cmp(&p.0, &q.0),
                (Some(_), None) => std::cmp::Ordering::Greater,
                (None, Some(_)) => std::cmp::Ordering::Less,
                (None, None) => break,
            };
            match ord {
                std::cmp::Ordering::Greater => out.push(x.next().expect("peeked")),
                std::cmp::Ordering::Less => {
                    let (m, c) = y.next().expect("peeked");
                    out.push((m, -c));
                }
                std::cmp::Ordering::Equal => {
                    let (m, c) = x.next().expect("peeked");
                    let (_, d) = y.next().expect("peeked");
                    let s = c - d;
                    if !s.is_zero() {
                        out.push((m, s));
                    }
                }
            }
        }
        IntPoly { terms: out }
    }

    fn s_poly(&self, other: &IntPoly, o: &MonomialOrder) -> IntPoly {
        let l = self.lm().lcm(other.lm());
        let (u, w) = (
            self.lm().quotient_of(&l).expect("lcm"),
            other.lm().quotient_of(&l).expect("lcm"),
        );
        let (a, b) = (&self.terms[0].1, &other.terms[0].1);
        let g = a.gcd(b);
        // (b/g) x^u self - (a/g) x^w other
        let lifted = IntPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(&u), c.clone()))
                .collect(),
        };
        let mut s = lifted.combine_tails(&(b / &g), &(a / &g), &w, other, o);
        s.make_primitive();
        s
    }

    fn max_bits(&self) -> u64 {
        self.terms.iter().map(|(_, c)| c.bits()).max().unwrap_or(0)
    }

    /// The content is removed only once coefficients have doubled in length
    /// since the last removal; a gcd per step costs more than the growth.
    fn reduces_to_zero(mut self, basis: &[IntPoly], o: &MonomialOrder) -> bool {
        let mut limit = 2 * self.max_bits() + 64;
        while let Some((m, c)) = self.terms.first() {
            let Some(g) = basis.iter().find(|g| g.lm().divides(m)) else {
                return false;
            };
            let shift = g.lm().quotient_of(m).expect("divisibility checked");
            let lc = &g.terms[0].1;
            let d = c.gcd(lc);
            self = self.combine_tails(&(lc / &d), &(c / &d), &shift, g, o);
            if self.max_bits() > limit {
                self.make_primitive();
                limit = 2 * self.max_bits() + 64;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::text::parse_polynomial;
    use crate::scalar::{Rational, Zp};

    fn sys(polys: &[&str], vars: &[&str]) -> PolySystem<Rational> {
        PolySystem::new(
            polys
                .iter()
                .map(|s| parse_polynomial(s, vars).unwrap())
                .collect(),
            vars.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn lex_example() {
        let s = sys(&["x^2 - 1", "y - x"], &["x", "y"]);
        let o = MonomialOrder::lex(2);
        let gb = buchberger(&s, &o, &BuchbergerConfig::default()).unwrap();
        let expect = vec![
            parse_polynomial("y^2 - 1", &["x", "y"]).unwrap(),
            parse_polynomial("x - y", &["x", "y"]).unwrap(),
        ];
        assert_eq!(gb.elements, expect);
        assert!(verify_groebner(&gb, &s).unwrap().ok());
    }

    #[test]
    fn single_linear_generator() {
        let s = sys(&["x - 1"], &["x"]);
        let gb = buchberger(&s, &MonomialOrder::grevlex(1), &BuchbergerConfig::default()).unwrap();
        assert_eq!(gb.elements, s.polys);
    }

    #[test]
    fn circle_and_line() {
        let s = sys(&["x^2 + y^2 - 1", "x - y"], &["x", "y"]);
        let o = MonomialOrder::grevlex(2);
        let gb = buchberger(&s, &o, &BuchbergerConfig::default()).unwrap();
        let lms = gb.leading_monomials();
        assert_eq!(
            lms,
            vec![Monomial::new(vec![1, 0]), Monomial::new(vec![0, 2])]
        );
        assert_eq!(
            gb.elements[1],
            parse_polynomial("y^2 - 1/2", &["x", "y"]).unwrap()
        );
    }

    #[test]
    fn exact_verification_agrees() {
        let vars = ["x", "y", "z"];
        let s = sys(
            &["2/3*x^2 - y*z + 1/5", "x*y - 3/7*z", "y^2 - x + z^2 - 2"],
            &vars,
        );
        let o = MonomialOrder::grevlex(3);
        let gb = buchberger(&s, &o, &BuchbergerConfig::default()).unwrap();
        assert_eq!(
            verify_groebner_exact(&gb, &s).unwrap(),
            verify_groebner(&gb, &s).unwrap()
        );
        assert!(verify_groebner_exact(&gb, &s).unwrap().ok());
        // the generators themselves are not a basis
        let raw = GroebnerBasis {
            elements: s.polys.iter().map(|p| p.monic(&o)).collect(),
            order: o.clone(),
        };
        let (a, b) = (
            verify_groebner_exact(&raw, &s).unwrap(),
            verify_groebner(&raw, &s).unwrap(),
        );
        assert!(a.nonzero_s_remainders > 0);
        assert_eq!(a.nonzero_s_remainders, b.nonzero_s_remainders);
        let other = sys(&["x - 1", "y", "z"], &vars);
        assert_eq!(
            verify_groebner_exact(&gb, &other)
                .unwrap()
                .nonzero_generator_remainders,
            3
        );
    }

    #[test]
    fn inconsistent_system_gives_unit_ideal() {
        let s = sys(&["x - 1", "x - 2"], &["x"]);
        let gb = buchberger(&s, &MonomialOrder::grevlex(1), &BuchbergerConfig::default()).unwrap();
        assert!(gb.is_trivial());
    }

    #[test]
    fn budget_is_enforced() {
        let s = sys(
            &["x^2 + y^2 + z^2 - 3", "x*y - z", "x - y + 2*z^2 - 1"],
            &["x", "y", "z"],
        );
        let cfg = BuchbergerConfig {
            max_pairs: 100,
            max_reduction_steps: 5,
        };
        let err = buchberger(&s, &MonomialOrder::grevlex(3), &cfg).unwrap_err();
        assert!(matches!(err, PolyError::ResourceLimit { .. }));
    }

    #[test]
    fn modular_run_matches_rational_structure() {
        let s = sys(
            &["x^2 + y^2 + z^2 - 3", "x*y - z", "x - y + 2*z^2 - 1"],
            &["x", "y", "z"],
        );
        let o = MonomialOrder::grevlex(3);
        let q = buchberger(&s, &o, &BuchbergerConfig::default()).unwrap();
        let m = buchberger(
            &s.map_coeffs(Zp::from_rational).unwrap(),
            &o,
            &BuchbergerConfig::default(),
        )
        .unwrap();
        assert_eq!(q.leading_monomials(), m.leading_monomials());
        for (gq, gm) in q.elements.iter().zip(&m.elements) {
            assert_eq!(&gq.map_coeffs(Zp::from_rational).unwrap(), gm);
        }
    }

    #[test]
    fn trace_records_reduced_slots() {
        let s = sys(&["x^2 + y^2 - 1", "x - y"], &["x", "y"]);
        let (gb, trace) =
            buchberger_traced(&s, &MonomialOrder::grevlex(2), &BuchbergerConfig::default())
                .unwrap();
        assert_eq!(trace.reduced.len(), gb.len());
        for (slot, g) in trace.reduced.iter().zip(&gb.elements) {
            let support: Vec<_> = g
                .sorted_terms(&gb.order)
                .into_iter()
                .map(|(m, _)| m)
                .collect();
            assert_eq!(trace.slots[*slot].support, support);
            assert!(matches!(trace.slots[*slot].origin, Origin::Interreduce(_)));
        }
    }
}
