//! Sparse rational linear combinations over an ordered key type.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::scalar::Q;

/// A basis key that knows its own (chain) degree and filtration weight.
pub trait Graded: Ord + Clone + Debug {
    fn deg(&self) -> i64;
    fn weight(&self) -> u32 {
        0
    }
}

impl<A: Graded, B: Graded> Graded for (A, B) {
    fn deg(&self) -> i64 {
        self.0.deg() + self.1.deg()
    }
    fn weight(&self) -> u32 {
        self.0.weight() + self.1.weight()
    }
}

/// Finite rational combination of keys; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lin<K: Ord>(BTreeMap<K, Q>);

impl<K: Ord> Default for Lin<K> {
    fn default() -> Self {
        Lin(BTreeMap::new())
    }
}

impl<K: Ord + Debug> Debug for Lin<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.0 {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})·{k:?}")?;
        }
        Ok(())
    }
}

impl<K: Ord + Clone> Lin<K> {
    pub fn zero() -> Self {
        Lin(BTreeMap::new())
    }

    pub fn basis(k: K) -> Self {
        Self::term(k, Q::one())
    }

    pub fn term(k: K, c: Q) -> Self {
        let mut out = Self::zero();
        out.add_term(k, c);
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (K, Q)>) -> Self {
        let mut out = Self::zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, k: &K) -> Q {
        self.0.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, k: K, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(k) {
            btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Lin<K>, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.0 {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Q)> {
        self.0.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.0.keys()
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Lin(self.0.iter().map(|(k, v)| (k.clone(), v * c)).collect())
    }

    /// Extends `f` linearly.
    pub fn apply<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Lin<J>) -> Lin<J> {
        let mut out = Lin::zero();
        for (k, c) in &self.0 {
            out.add_scaled(&f(k), c);
        }
        out
    }

    /// Keeps only the terms whose key satisfies `pred`.
    pub fn filter(&self, mut pred: impl FnMut(&K) -> bool) -> Self {
        Lin(self
            .0
            .iter()
            .filter(|(k, _)| pred(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect())
    }

    pub fn map_keys<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> J) -> Lin<J> {
        Lin::from_terms(self.0.iter().map(|(k, c)| (f(k), c.clone())))
    }
}

impl<K: Graded> Lin<K> {
    /// The common degree of all terms; `None` for zero or inhomogeneous vectors.
    pub fn homogeneous_deg(&self) -> Option<i64> {
        let mut degs = self.0.keys().map(Graded::deg);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn degree_part(&self, deg: i64) -> Self {
        self.filter(|k| k.deg() == deg)
    }

    pub fn weight_part(&self, w: u32) -> Self {
        self.filter(|k| k.weight() == w)
    }

    pub fn truncate_weight(&self, cap: u32) -> Self {
        self.filter(|k| k.weight() <= cap)
    }

    pub fn min_weight(&self) -> Option<u32> {
        self.0.keys().map(Graded::weight).min()
    }
}

impl<K: Ord + Clone> FromIterator<(K, Q)> for Lin<K> {
    fn from_iter<I: IntoIterator<Item = (K, Q)>>(iter: I) -> Self {
        Lin::from_terms(iter)
    }
}

impl<K: Ord + Clone> AddAssign<&Lin<K>> for Lin<K> {
    fn add_assign(&mut self, rhs: &Lin<K>) {
        for (k, v) in &rhs.0 {
            self.add_term(k.clone(), v.clone());
        }
    }
}

impl<K: Ord + Clone> SubAssign<&Lin<K>> for Lin<K> {
    fn sub_assign(&mut self, rhs: &Lin<K>) {
        for (k, v) in &rhs.0 {
            self.add_term(k.clone(), -v.clone());
        }
    }
}

impl<K: Ord + Clone> Add for &Lin<K> {
    type Output = Lin<K>;
    fn add(self, rhs: &Lin<K>) -> Lin<K> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<K: Ord + Clone> Add for Lin<K> {
    type Output = Lin<K>;
    fn add(mut self, rhs: Lin<K>) -> Lin<K> {
        self += &rhs;
        self
    }
}

impl<K: Ord + Clone> Sub for &Lin<K> {
    type Output = Lin<K>;
    fn sub(self, rhs: &Lin<K>) -> Lin<K> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<K: Ord + Clone> Sub for Lin<K> {
    type Output = Lin<K>;
    fn sub(mut self, rhs: Lin<K>) -> Lin<K> {
        self -= &rhs;
        self
    }
}

impl<K: Ord + Clone> Neg for &Lin<K> {
    type Output = Lin<K>;
    fn neg(self) -> Lin<K> {
        Lin(self.0.iter().map(|(k, v)| (k.clone(), -v.clone())).collect())
    }
}

impl<K: Ord + Clone> Neg for Lin<K> {
    type Output = Lin<K>;
    fn neg(self) -> Lin<K> {
        -&self
    }
}

impl<K: Ord + Clone> Mul<&Q> for &Lin<K> {
    type Output = Lin<K>;
    fn mul(self, rhs: &Q) -> Lin<K> {
        self.scale(rhs)
    }
}

/// Sum of linear combinations.
pub fn sum<K: Ord + Clone>(items: impl IntoIterator<Item = Lin<K>>) -> Lin<K> {
    items.into_iter().fold(Lin::zero(), |mut acc, x| {
        acc += &x;
        acc
    })
}

/// Expands `f` multilinearly over all argument vectors. `f` receives basis
/// keys; the product of coefficients is applied to its output.
pub fn multilinear<K, J>(args: &[&Lin<K>], mut f: impl FnMut(&[K]) -> Lin<J>) -> Lin<J>
where
    K: Ord + Clone,
    J: Ord + Clone,
{
    let mut out = Lin::zero();
    if args.iter().any(|a| a.is_zero()) {
        return out;
    }
    let terms: Vec<Vec<(&K, &Q)>> = args.iter().map(|a| a.iter().collect()).collect();
    let mut idx = vec![0usize; args.len()];
    let mut keys: Vec<K> = Vec::with_capacity(args.len());
    loop {
        keys.clear();
        let mut coeff = Q::one();
        for (slot, &i) in idx.iter().enumerate() {
            let (k, c) = terms[slot][i];
            keys.push(k.clone());
            coeff *= c;
        }
        out.add_scaled(&f(&keys), &coeff);
        let mut slot = args.len();
        loop {
            if slot == 0 {
                return out;
            }
            slot -= 1;
            idx[slot] += 1;
            if idx[slot] < terms[slot].len() {
                break;
            }
            idx[slot] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut v = Lin::term(1u32, q(2));
        v.add_term(1, q(-2));
        assert!(v.is_zero());
        v.add_term(3, q(0));
        assert!(v.is_empty());
    }

    #[test]
    fn multilinear_expands_products() {
        let a = Lin::from_terms([(1u32, q(2)), (2, q(3))]);
        let b = Lin::from_terms([(10u32, q(5))]);
        let out = multilinear(&[&a, &b], |ks| Lin::basis(ks[0] * 100 + ks[1]));
        assert_eq!(out, Lin::from_terms([(110, q(10)), (210, q(15))]));
        let empty: Lin<u32> = Lin::zero();
        assert!(multilinear(&[&a, &empty], |_| Lin::basis(0u32)).is_zero());
    }
}
