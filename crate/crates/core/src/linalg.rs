//! Sparse exact linear algebra over the cyclotomic field.

use std::collections::BTreeMap;

use crate::cyclotomic::Scalar;

pub type SparseVec<K> = BTreeMap<K, Scalar>;

fn axpy<K: Ord + Clone>(v: &mut SparseVec<K>, c: &Scalar, row: &SparseVec<K>) {
    for (k, a) in row {
        let t = a * c;
        match v.entry(k.clone()) {
            std::collections::btree_map::Entry::Vacant(e) => {
                if !t.is_zero() {
                    e.insert(t);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &t;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
}

/// Rows in echelon form keyed by pivot, the largest key of each row, normalised to 1.
#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Clone> {
    rows: BTreeMap<K, SparseVec<K>>,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Echelon {
            rows: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the current rows.
    pub fn reduce(&self, mut v: SparseVec<K>) -> SparseVec<K> {
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => v.keys().next_back().cloned(),
                Some(c) => v.range(..c.clone()).next_back().map(|(k, _)| k.clone()),
            };
            let Some(k) = next else { break };
            if let Some(row) = self.rows.get(&k) {
                let c = -&v[&k];
                axpy(&mut v, &c, row);
            }
            cursor = Some(k);
        }
        v
    }

    /// Add `v` to the span; returns the new normalised row when `v` was independent.
    pub fn insert(&mut self, v: SparseVec<K>) -> Option<SparseVec<K>> {
        let mut r = self.reduce(v);
        let (pivot, lead) = r.iter().next_back().map(|(k, c)| (k.clone(), c.clone()))?;
        let inv = lead.invert().expect("nonzero pivot");
        for c in r.values_mut() {
            *c *= &inv;
        }
        self.rows.insert(pivot, r.clone());
        Some(r)
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<K>> {
        self.rows.values()
    }
}

/// Basis of {c : Σ c_j columns[j] = 0}, each vector dense over the columns.
pub fn nullspace<K: Ord + Clone>(columns: &[SparseVec<K>], zero: &Scalar) -> Vec<Vec<Scalar>> {
    // rows carry the combination of columns that produced them, stored under tagged keys
    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    enum Tag<K> {
        Combo(usize),
        Entry(K),
    }
    let n = columns.len();
    let mut ech: Echelon<Tag<K>> = Echelon::new();
    let mut out = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let mut v: SparseVec<Tag<K>> = col.iter().map(|(k, c)| (Tag::Entry(k.clone()), c.clone())).collect();
        v.insert(Tag::Combo(j), Scalar::one(zero.context()));
        let r = ech.reduce(v);
        let has_entry = r.keys().any(|k| matches!(k, Tag::Entry(_)));
        if has_entry {
            ech.insert(r);
        } else {
            let mut dense = vec![zero.clone(); n];
            for (k, c) in r {
                if let Tag::Combo(i) = k {
                    dense[i] = c;
                }
            }
            out.push(dense);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::CyclotomicContext;

    fn sv(ctx: &std::sync::Arc<CyclotomicContext>, e: &[(u32, i64)]) -> SparseVec<u32> {
        e.iter()
            .map(|&(k, c)| (k, Scalar::from_integer(ctx, c)))
            .collect()
    }

    #[test]
    fn echelon_rank() {
        let ctx = CyclotomicContext::new(5).unwrap();
        let mut e = Echelon::new();
        assert!(e.insert(sv(&ctx, &[(0, 1), (1, 2)])).is_some());
        assert!(e.insert(sv(&ctx, &[(0, 2), (1, 4)])).is_none());
        assert!(e.insert(sv(&ctx, &[(1, 1), (2, 1)])).is_some());
        assert!(e.contains(&sv(&ctx, &[(0, 1), (1, 3), (2, 1)])));
        assert!(!e.contains(&sv(&ctx, &[(2, 1)])));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn nullspace_small() {
        let ctx = CyclotomicContext::new(3).unwrap();
        let z = Scalar::zero(&ctx);
        // columns: a=(1,0), b=(0,1), c=(1,1) → kernel spanned by a+b−c
        let cols = vec![sv(&ctx, &[(0, 1)]), sv(&ctx, &[(1, 1)]), sv(&ctx, &[(0, 1), (1, 1)])];
        let k = nullspace(&cols, &z);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(&v[0], &v[1]);
        assert_eq!(&v[0], &-&v[2]);
    }
}
