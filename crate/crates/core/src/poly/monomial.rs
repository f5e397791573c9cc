use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::PolyError;

/// Exponent vector of a monomial.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    /// The monomial `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        self.divides(other)
            .then(|| Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// `Some(var)` if this is a pure power `x_var^k` with `k >= 1`.
    pub fn pure_power_of(&self) -> Option<usize> {
        let mut found = None;
        for (i, &e) in self.0.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    /// Graded reverse lexicographic.
    Grevlex,
    Lex,
}

/// A global monomial order. `variable_order[0]` is the most significant
/// variable.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub variable_order: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, variable_order: Vec<usize>) -> Result<Self, PolyError> {
        let n = variable_order.len();
        let mut seen = vec![false; n];
        for &v in &variable_order {
            if v >= n || seen[v] {
                return Err(PolyError::InvalidPermutation(variable_order));
            }
            seen[v] = true;
        }
        Ok(MonomialOrder {
            kind,
            variable_order,
        })
    }

    pub fn grevlex(nvars: usize) -> Self {
        MonomialOrder {
            kind: OrderKind::Grevlex,
            variable_order: (0..nvars).collect(),
        }
    }

    pub fn lex(nvars: usize) -> Self {
        MonomialOrder {
            kind: OrderKind::Lex,
            variable_order: (0..nvars).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.variable_order.len()
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Result<Ordering, PolyError> {
        if a.nvars() != b.nvars() || a.nvars() != self.nvars() {
            return Err(PolyError::VariableCountMismatch {
                left: a.nvars(),
                right: b.nvars(),
            });
        }
        Ok(self.cmp(a, b))
    }

    /// Unchecked comparison; callers guarantee matching lengths.
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let (ea, eb) = (a.exponents(), b.exponents());
        match self.kind {
            OrderKind::Lex => {
                for &v in &self.variable_order {
                    match ea[v].cmp(&eb[v]) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            OrderKind::Grevlex => {
                match a.degree().cmp(&b.degree()) {
                    Ordering::Equal => {}
                    o => return o,
                }
                // The last variable with differing exponent decides; the
                // smaller exponent there is the larger monomial.
                for &v in self.variable_order.iter().rev() {
                    match ea[v].cmp(&eb[v]) {
                        Ordering::Equal => continue,
                        o => return o.reverse(),
                    }
                }
                Ordering::Equal
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn grevlex_examples() {
        let o = MonomialOrder::grevlex(2);
        assert_eq!(o.compare(&m(&[0, 0]), &m(&[1, 0])).unwrap(), Ordering::Less);
        assert_eq!(o.compare(&m(&[1, 2]), &m(&[2, 1])).unwrap(), Ordering::Less);
        // x*z vs y^2 in three variables: classic grevlex vs deglex split.
        let o3 = MonomialOrder::grevlex(3);
        assert_eq!(o3.cmp(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Less);
    }

    #[test]
    fn lex_ignores_degree() {
        let o = MonomialOrder::lex(2);
        assert_eq!(
            o.compare(&m(&[1, 0]), &m(&[0, 9])).unwrap(),
            Ordering::Greater
        );
        let swapped = MonomialOrder::new(OrderKind::Lex, vec![1, 0]).unwrap();
        assert_eq!(swapped.cmp(&m(&[1, 0]), &m(&[0, 9])), Ordering::Less);
    }

    #[test]
    fn rejects_bad_input() {
        let o = MonomialOrder::grevlex(2);
        assert!(o.compare(&m(&[1]), &m(&[1, 0])).is_err());
        assert!(MonomialOrder::new(OrderKind::Lex, vec![0, 0]).is_err());
        assert!(MonomialOrder::new(OrderKind::Lex, vec![0, 2]).is_err());
    }

    fn exps() -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::vec(0u32..4, 3)
    }

    proptest! {
        #[test]
        fn orders_are_total_and_multiplicative(a in exps(), b in exps(), c in exps(), lex in any::<bool>()) {
            let o = if lex { MonomialOrder::lex(3) } else { MonomialOrder::grevlex(3) };
            let (a, b, c) = (m(&a), m(&b), m(&c));
            prop_assert_eq!(o.cmp(&a, &b), o.cmp(&b, &a).reverse());
            prop_assert_eq!(o.cmp(&a, &b) == Ordering::Equal, a == b);
            prop_assert_eq!(o.cmp(&a.mul(&c), &b.mul(&c)), o.cmp(&a, &b));
            prop_assert_ne!(o.cmp(&a.mul(&c), &a), Ordering::Less);
        }
    }
}
