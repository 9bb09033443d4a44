//! Sparse row echelon form over `Q`, used for quotients by spans.

use std::collections::BTreeMap;

use num_traits::One;

use crate::hopf::add_to_map;
use crate::Q;

pub type Row<K> = BTreeMap<K, Q>;

/// Rows indexed by pivot; the pivot of a row is its smallest key, scaled to 1.
#[derive(Clone, Debug, Default)]
pub struct Echelon<K: Ord + Clone> {
    rows: BTreeMap<K, Row<K>>,
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Echelon { rows: BTreeMap::new() }
    }

    /// Remainder of `v` with no entries in pivot columns; unique per span.
    pub fn reduce(&self, v: &Row<K>) -> Row<K> {
        let mut v = v.clone();
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => v.keys().find(|k| self.rows.contains_key(*k)).cloned(),
                Some(c) => v
                    .range((std::ops::Bound::Excluded(c.clone()), std::ops::Bound::Unbounded))
                    .map(|(k, _)| k)
                    .find(|k| self.rows.contains_key(*k))
                    .cloned(),
            };
            let Some(col) = next else { break };
            let c = v[&col].clone();
            for (k, x) in &self.rows[&col] {
                add_to_map(&mut v, k.clone(), -(&c * x));
            }
            cursor = Some(col);
        }
        v
    }

    /// Insert `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &Row<K>) -> bool {
        let r = self.reduce(v);
        let Some((pivot, lead)) = r.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = Q::one() / lead;
        let row: Row<K> = r.into_iter().map(|(k, c)| (k, c * &inv)).collect();
        self.rows.insert(pivot, row);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn remainder_is_canonical() {
        let mut e = Echelon::new();
        e.insert(&[(0, q(1)), (1, q(1))].into_iter().collect());
        e.insert(&[(1, q(1)), (2, q(-1))].into_iter().collect());
        // (1,0,0) ≡ (0,-1,0) ≡ (0,0,-1)
        let a = e.reduce(&[(0, q(1))].into_iter().collect());
        let b = e.reduce(&[(2, q(-1))].into_iter().collect());
        assert_eq!(a, b);
        assert!(!e.insert(&[(0, q(2)), (2, q(2))].into_iter().collect()));
    }
}
