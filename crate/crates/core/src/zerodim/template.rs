//! Compiled replay of a Buchberger run for a family of systems sharing one
//! support pattern.
//!
//! An exact run records which S-pairs produced basis elements and every
//! elimination step (see [`crate::poly::Trace`]). For another member of the
//! family the same steps, applied in floating point, produce the basis and
//! the multiplication matrices without pair selection, divisibility search
//! or big-number arithmetic. Everything is resolved to dense monomial ids at
//! compile time, so evaluation is a sequence of scaled row updates.
//!
//! Replay is only valid for parameter values as generic as the compiling
//! instance; callers must check the roots it yields.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, RwLock};

use super::{normal_set, Matrix, MultiplicationMatrices, NormalSet};
use crate::error::SolverError;
use crate::poly::division::{reduce, SortedPoly};
use crate::poly::{
    buchberger_traced, BuchbergerConfig, GroebnerBasis, Monomial, MonomialOrder, Origin,
    PolySystem, ReductionStep,
};
use crate::scalar::{Field, Rational};

/// `buf[dst] -= c * slot[src]` for every `(dst, src)`, where `c` is
/// `buf[pivot]` read before the update.
#[derive(Clone, Debug)]
struct Elim {
    pivot: u32,
    divisor: usize,
    /// Target ids of the divisor's non-leading terms.
    targets: Vec<u32>,
}

#[derive(Clone, Debug)]
enum Start {
    Input {
        index: usize,
        monomials: Vec<Monomial>,
        ids: Vec<u32>,
    },
    SPair {
        left: usize,
        left_ids: Vec<u32>,
        right: usize,
        right_ids: Vec<u32>,
        cancel: u32,
    },
    Copy {
        slot: usize,
        ids: Vec<u32>,
    },
    Unit {
        id: u32,
    },
}

#[derive(Clone, Debug)]
struct Program {
    start: Start,
    elims: Vec<Elim>,
    /// Ids read out at the end, leading monomial first for basis slots.
    output: Vec<u32>,
    touched: Vec<u32>,
}

#[derive(Debug)]
pub struct Template {
    order: MonomialOrder,
    nvars: usize,
    signature: u64,
    n_ids: usize,
    slots: Vec<Program>,
    basis_slots: Vec<usize>,
    normal_set: NormalSet,
    /// `columns[k][j]` produces column `j` of the matrix of variable `k`.
    columns: Vec<Vec<Column>>,
}

#[derive(Clone, Debug)]
enum Column {
    Unit(usize),
    Reduced(Program),
}

/// Hash of the order and the monomial supports of a system.
pub fn support_signature<K: Field>(system: &PolySystem<K>, order: &MonomialOrder) -> u64 {
    let mut h = DefaultHasher::new();
    format!("{order:?}").hash(&mut h);
    for p in &system.polys {
        let mut ms: Vec<&Monomial> = p.terms().map(|(m, _)| m).collect();
        ms.sort();
        ms.hash(&mut h);
    }
    h.finish()
}

struct Ids(HashMap<Monomial, u32>);

impl Ids {
    fn get(&mut self, m: Monomial) -> u32 {
        let next = self.0.len() as u32;
        *self.0.entry(m).or_insert(next)
    }
}

fn dedup(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v.dedup();
    v
}

fn compile_elims(
    steps: &[ReductionStep],
    supports: &[Vec<Monomial>],
    ids: &mut Ids,
    touched: &mut Vec<u32>,
) -> Vec<Elim> {
    steps
        .iter()
        .map(|st| {
            let sup = &supports[st.divisor];
            let shift = sup[0].quotient_of(&st.term).expect("recorded divisibility");
            let targets: Vec<u32> = sup[1..].iter().map(|m| ids.get(m.mul(&shift))).collect();
            let pivot = ids.get(st.term.clone());
            touched.push(pivot);
            touched.extend_from_slice(&targets);
            Elim {
                pivot,
                divisor: st.divisor,
                targets,
            }
        })
        .collect()
}

impl Template {
    /// Runs the exact computation on `system` and compiles its trace.
    pub fn compile(
        system: &PolySystem<Rational>,
        order: &MonomialOrder,
        cfg: &BuchbergerConfig,
    ) -> Result<(Template, GroebnerBasis<Rational>), SolverError> {
        let (gb, trace) = buchberger_traced(system, order, cfg)?;
        let ns = normal_set(&gb)?;
        let n = system.nvars();
        let mut ids = Ids(HashMap::new());
        let supports: Vec<Vec<Monomial>> = trace.slots.iter().map(|s| s.support.clone()).collect();
        let mut slots = Vec::with_capacity(trace.slots.len());
        for slot in &trace.slots {
            let mut touched = Vec::new();
            let start = match &slot.origin {
                Origin::Input(k) => {
                    let monomials: Vec<Monomial> = system.polys[*k]
                        .sorted_terms(order)
                        .into_iter()
                        .map(|(m, _)| m)
                        .collect();
                    let sid: Vec<u32> = monomials.iter().map(|m| ids.get(m.clone())).collect();
                    touched.extend_from_slice(&sid);
                    Start::Input {
                        index: *k,
                        monomials,
                        ids: sid,
                    }
                }
                Origin::SPair(i, j) => {
                    let (a, b) = (&supports[*i], &supports[*j]);
                    let lcm = a[0].lcm(&b[0]);
                    let sa = a[0].quotient_of(&lcm).expect("lcm");
                    let sb = b[0].quotient_of(&lcm).expect("lcm");
                    let left_ids: Vec<u32> = a.iter().map(|m| ids.get(m.mul(&sa))).collect();
                    let right_ids: Vec<u32> = b.iter().map(|m| ids.get(m.mul(&sb))).collect();
                    touched.extend_from_slice(&left_ids);
                    touched.extend_from_slice(&right_ids);
                    Start::SPair {
                        left: *i,
                        left_ids,
                        right: *j,
                        right_ids,
                        cancel: ids.get(lcm),
                    }
                }
                Origin::Interreduce(i) => {
                    let sid: Vec<u32> = supports[*i].iter().map(|m| ids.get(m.clone())).collect();
                    touched.extend_from_slice(&sid);
                    Start::Copy { slot: *i, ids: sid }
                }
            };
            let elims = compile_elims(&slot.steps, &supports, &mut ids, &mut touched);
            let output: Vec<u32> = slot.support.iter().map(|m| ids.get(m.clone())).collect();
            touched.extend_from_slice(&output);
            slots.push(Program {
                start,
                elims,
                output,
                touched: dedup(touched),
            });
        }

        // Normal forms of x_k * m_j, recorded against the reduced basis.
        let pool: Vec<SortedPoly<Rational>> = gb
            .elements
            .iter()
            .map(|g| SortedPoly::from_poly(g, order))
            .collect();
        let all: Vec<usize> = (0..pool.len()).collect();
        let ns_ids: Vec<u32> = ns.monomials.iter().map(|m| ids.get(m.clone())).collect();
        let mut columns = Vec::with_capacity(n);
        for k in 0..n {
            let xk = Monomial::var(n, k);
            let mut col = Vec::with_capacity(ns.len());
            for m in &ns.monomials {
                let prod = m.mul(&xk);
                if let Some(i) = ns.index_of(&prod) {
                    col.push(Column::Unit(i));
                    continue;
                }
                let mut steps = Vec::new();
                let start = SortedPoly {
                    terms: vec![(prod.clone(), Rational::from_i64(1))],
                };
                reduce(
                    start,
                    &pool,
                    &all,
                    order,
                    Some(&mut steps),
                    false,
                    cfg.max_reduction_steps,
                )?;
                // Divisor indices refer to basis positions; map them to slots.
                let steps: Vec<ReductionStep> = steps
                    .into_iter()
                    .map(|s| ReductionStep {
                        term: s.term,
                        divisor: trace.reduced[s.divisor],
                    })
                    .collect();
                let id = ids.get(prod);
                let mut touched = vec![id];
                let elims = compile_elims(&steps, &supports, &mut ids, &mut touched);
                touched.extend_from_slice(&ns_ids);
                col.push(Column::Reduced(Program {
                    start: Start::Unit { id },
                    elims,
                    output: ns_ids.clone(),
                    touched: dedup(touched),
                }));
            }
            columns.push(col);
        }
        let template = Template {
            order: order.clone(),
            nvars: n,
            signature: support_signature(system, order),
            n_ids: ids.0.len(),
            slots,
            basis_slots: trace.reduced.clone(),
            normal_set: ns,
            columns,
        };
        Ok((template, gb))
    }

    pub fn normal_set(&self) -> &NormalSet {
        &self.normal_set
    }

    pub fn signature(&self) -> u64 {
        self.signature
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    /// Number of recorded basis slots.
    pub fn n_slots(&self) -> usize {
        self.slots.len()
    }

    /// Whether `system` has the support pattern this template was built for.
    pub fn matches<K: Field>(&self, system: &PolySystem<K>) -> bool {
        system.nvars() == self.nvars && support_signature(system, &self.order) == self.signature
    }

    /// Multiplication matrices of `system`, replayed in `f64`.
    pub fn evaluate(
        &self,
        system: &PolySystem<f64>,
    ) -> Result<MultiplicationMatrices<f64>, SolverError> {
        if !self.matches(system) {
            return Err(SolverError::Inconsistent(
                "support pattern differs from the template".into(),
            ));
        }
        let mut buf = vec![0.0f64; self.n_ids];
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(self.slots.len());
        for prog in &self.slots {
            let out = run(prog, &mut buf, &values, system)?;
            let lead = out[0];
            let scale = out.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            if !(lead.abs() > 1e-12 * scale) || !lead.is_finite() {
                return Err(SolverError::Inconsistent(
                    "vanishing leading coefficient in replay".into(),
                ));
            }
            values.push(out.iter().map(|x| x / lead).collect());
        }
        let size = self.normal_set.len();
        let mut matrices = Vec::with_capacity(self.nvars);
        for col in &self.columns {
            let mut m = Matrix::<f64>::zeros(size, size);
            for (j, c) in col.iter().enumerate() {
                match c {
                    Column::Unit(i) => m[(*i, j)] = 1.0,
                    Column::Reduced(prog) => {
                        for (i, x) in run(prog, &mut buf, &values, system)?
                            .into_iter()
                            .enumerate()
                        {
                            m[(i, j)] = x;
                        }
                    }
                }
            }
            matrices.push(m);
        }
        Ok(MultiplicationMatrices { matrices })
    }

    /// The replayed reduced basis as `(monomial, coefficient)` lists.
    pub fn evaluate_basis(&self, system: &PolySystem<f64>) -> Result<Vec<Vec<f64>>, SolverError> {
        let mut buf = vec![0.0f64; self.n_ids];
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(self.slots.len());
        for prog in &self.slots {
            let out = run(prog, &mut buf, &values, system)?;
            let lead = out[0];
            values.push(out.iter().map(|x| x / lead).collect());
        }
        Ok(self
            .basis_slots
            .iter()
            .map(|&s| values[s].clone())
            .collect())
    }
}

fn run(
    prog: &Program,
    buf: &mut [f64],
    slots: &[Vec<f64>],
    system: &PolySystem<f64>,
) -> Result<Vec<f64>, SolverError> {
    match &prog.start {
        Start::Input {
            index,
            monomials,
            ids,
        } => {
            let p = &system.polys[*index];
            for (m, &id) in monomials.iter().zip(ids) {
                let c = p.coeff(m).copied().unwrap_or(0.0);
                buf[id as usize] = c;
            }
        }
        Start::SPair {
            left,
            left_ids,
            right,
            right_ids,
            cancel,
        } => {
            for (x, &id) in slots[*left].iter().zip(left_ids) {
                buf[id as usize] += x;
            }
            for (x, &id) in slots[*right].iter().zip(right_ids) {
                buf[id as usize] -= x;
            }
            buf[*cancel as usize] = 0.0;
        }
        Start::Copy { slot, ids } => {
            for (x, &id) in slots[*slot].iter().zip(ids) {
                buf[id as usize] = *x;
            }
        }
        Start::Unit { id } => buf[*id as usize] = 1.0,
    }
    for e in &prog.elims {
        let c = buf[e.pivot as usize];
        buf[e.pivot as usize] = 0.0;
        if c == 0.0 {
            continue;
        }
        for (x, &t) in slots[e.divisor][1..].iter().zip(&e.targets) {
            buf[t as usize] -= c * x;
        }
    }
    let out: Vec<f64> = prog.output.iter().map(|&id| buf[id as usize]).collect();
    for &id in &prog.touched {
        buf[id as usize] = 0.0;
    }
    if out.iter().any(|x| !x.is_finite()) {
        return Err(SolverError::Inconsistent(
            "non-finite value in replay".into(),
        ));
    }
    Ok(out)
}

/// Templates keyed by support signature.
///
/// A template compiled at one parameter value can fail to replay at another
/// that is special for it (a pivot that vanishes identically, say). Such
/// values get a template of their own, so each support keeps up to
/// [`TemplateCache::MAX_VARIANTS`] of them, tried in order. Compilation
/// holds the write lock; lookups share the read lock.
#[derive(Debug, Default)]
pub struct TemplateCache {
    map: RwLock<HashMap<u64, Vec<Arc<Template>>>>,
}

impl TemplateCache {
    pub const MAX_VARIANTS: usize = 4;

    pub fn new() -> Self {
        Self::default()
    }

    /// First template stored for the support of `system`.
    pub fn get(&self, system: &PolySystem<f64>, order: &MonomialOrder) -> Option<Arc<Template>> {
        self.variants(system, order).into_iter().next()
    }

    /// Every template stored for the support of `system`, oldest first.
    pub fn variants(&self, system: &PolySystem<f64>, order: &MonomialOrder) -> Vec<Arc<Template>> {
        let key = support_signature(system, order);
        self.map
            .read()
            .expect("cache lock")
            .get(&key)
            .cloned()
            .unwrap_or_default()
    }

    /// Returns the cached template for the support of `system`, compiling it
    /// from `system` when absent. The exact basis is returned when it was
    /// computed by this call.
    pub fn get_or_compile(
        &self,
        system: &PolySystem<Rational>,
        order: &MonomialOrder,
        cfg: &BuchbergerConfig,
    ) -> Result<(Arc<Template>, Option<GroebnerBasis<Rational>>), SolverError> {
        let key = support_signature(system, order);
        if let Some(t) = self
            .map
            .read()
            .expect("cache lock")
            .get(&key)
            .and_then(|v| v.first())
        {
            return Ok((t.clone(), None));
        }
        let mut w = self.map.write().expect("cache lock");
        if let Some(t) = w.get(&key).and_then(|v| v.first()) {
            return Ok((t.clone(), None));
        }
        let (t, gb) = Template::compile(system, order, cfg)?;
        let t = Arc::new(t);
        w.entry(key).or_default().push(t.clone());
        Ok((t, Some(gb)))
    }

    /// Compiles a template from `system` and stores it next to the existing
    /// ones for its support while there is room.
    pub fn compile_variant(
        &self,
        system: &PolySystem<Rational>,
        order: &MonomialOrder,
        cfg: &BuchbergerConfig,
    ) -> Result<(Arc<Template>, GroebnerBasis<Rational>), SolverError> {
        let (t, gb) = Template::compile(system, order, cfg)?;
        let t = Arc::new(t);
        let mut w = self.map.write().expect("cache lock");
        let slot = w.entry(t.signature).or_default();
        if slot.len() < Self::MAX_VARIANTS {
            slot.push(t.clone());
        }
        Ok((t, gb))
    }

    pub fn insert(&self, template: Template) -> Arc<Template> {
        let t = Arc::new(template);
        self.map
            .write()
            .expect("cache lock")
            .entry(t.signature)
            .or_default()
            .push(t.clone());
        t
    }

    /// Number of stored templates over all supports.
    pub fn len(&self) -> usize {
        self.map
            .read()
            .expect("cache lock")
            .values()
            .map(Vec::len)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.map.write().expect("cache lock").clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::text::parse_polynomial;
    use crate::zerodim::MultiplicationMatrices;

    fn sys(polys: &[String], vars: &[&str]) -> PolySystem<Rational> {
        PolySystem::new(
            polys
                .iter()
                .map(|p| parse_polynomial(p, vars).unwrap())
                .collect(),
            vars.iter().map(|v| v.to_string()).collect(),
        )
        .unwrap()
    }

    fn family(a: i64, b: i64, c: i64) -> PolySystem<Rational> {
        sys(
            &[
                format!("x^2 + {a}*y^2 + z^2 - {b}"),
                format!("x*y - {c}*z + 1"),
                format!("x - y + 2*z^2 - {a}"),
            ],
            &["x", "y", "z"],
        )
    }

    #[test]
    fn replay_matches_exact_on_family() {
        let order = MonomialOrder::grevlex(3);
        let cfg = BuchbergerConfig::default();
        let (t, _) = Template::compile(&family(2, 7, 3), &order, &cfg).unwrap();
        for (a, b, c) in [(2, 7, 3), (3, 5, 2), (5, 11, 7)] {
            let s = family(a, b, c);
            assert!(t.matches(&s.to_f64()));
            let gb = crate::poly::buchberger(&s, &order, &cfg).unwrap();
            let ns = normal_set(&gb).unwrap();
            assert_eq!(&ns, t.normal_set());
            let exact = MultiplicationMatrices::build(&gb, &ns).unwrap().to_f64();
            let warm = t.evaluate(&s.to_f64()).unwrap();
            for (e, w) in exact.matrices.iter().zip(&warm.matrices) {
                let err = e.sub(w).max_abs();
                assert!(err <= 1e-9 * (1.0 + e.max_abs()), "{err}");
            }
        }
    }

    #[test]
    fn cache_compiles_once() {
        let order = MonomialOrder::grevlex(3);
        let cache = TemplateCache::new();
        let (_, fresh) = cache
            .get_or_compile(&family(2, 7, 3), &order, &BuchbergerConfig::default())
            .unwrap();
        assert!(fresh.is_some());
        let (_, fresh) = cache
            .get_or_compile(&family(3, 5, 2), &order, &BuchbergerConfig::default())
            .unwrap();
        assert!(fresh.is_none());
        assert_eq!(cache.len(), 1);
        let other = sys(
            &["x - 1".into(), "y^2 - 2".into(), "z - y".into()],
            &["x", "y", "z"],
        );
        assert!(cache.get(&other.to_f64(), &order).is_none());
    }
}
