//! Classical relations on `{0, …, m-1}` and their combinatorial flags.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// A set of ordered pairs `(i, j)` with `i, j < size`. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalRelation {
    size: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl ClassicalRelation {
    pub fn new(size: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in pairs {
            if i >= size || j >= size {
                return Err(Error::IndexOutOfRange(i, j, size));
            }
            set.insert((i, j));
        }
        Ok(ClassicalRelation { size, pairs: set })
    }

    pub fn empty(size: usize) -> Self {
        ClassicalRelation {
            size,
            pairs: BTreeSet::new(),
        }
    }

    /// `Δ = {(i, i)}`.
    pub fn diagonal(size: usize) -> Self {
        ClassicalRelation {
            size,
            pairs: (0..size).map(|i| (i, i)).collect(),
        }
    }

    pub fn full(size: usize) -> Self {
        ClassicalRelation {
            size,
            pairs: (0..size)
                .flat_map(|i| (0..size).map(move |j| (i, j)))
                .collect(),
        }
    }

    /// Relation whose pair `(i, j)` is present iff bit `i * size + j` of
    /// `mask` is set. Enumerates all relations for `size² ≤ 64`.
    pub fn from_mask(size: usize, mask: u64) -> Self {
        assert!(size * size <= 64);
        let pairs = (0..size * size)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| (b / size, b % size))
            .collect();
        ClassicalRelation { size, pairs }
    }

    /// Confusability graph of a column-stochastic matrix `T` (rows are
    /// outputs): `(i, j)` whenever some output is reachable from both.
    pub fn confusability_of(t: &ComplexMatrix) -> Self {
        let (n, m) = t.shape();
        let reach = |i: usize, out: usize| t[(out, i)].norm() > 0.0;
        let pairs = (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .filter(|&(i, j)| (0..n).any(|o| reach(i, o) && reach(j, o)))
            .collect();
        ClassicalRelation { size: m, pairs }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i, j))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size).all(|i| self.contains(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(i, j)| self.contains(j, i))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.pairs().all(|(i, j)| i == j || !self.contains(j, i))
    }

    pub fn is_transitive(&self) -> bool {
        self.pairs()
            .all(|(i, j)| (0..self.size).all(|l| !self.contains(j, l) || self.contains(i, l)))
    }

    /// Pairs with both ends in `subset`, reindexed by position in the
    /// sorted subset.
    pub fn induced(&self, subset: &[usize]) -> Self {
        let mut s = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        let pairs = (0..s.len())
            .flat_map(|a| (0..s.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| self.contains(s[a], s[b]))
            .collect();
        ClassicalRelation {
            size: s.len(),
            pairs,
        }
    }

    /// The induced relation on `subset` is exactly the diagonal.
    pub fn is_independent_set(&self, subset: &[usize]) -> bool {
        let r = self.induced(subset);
        r == ClassicalRelation::diagonal(r.size)
    }
}
