//! Dense subsets of a group of order at most 64, stored as a bitmap.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::group::Group;

/// Maximum group order representable by an [`ElemSet`].
pub const MAX_ORDER: usize = 64;

/// A subset of the elements of a group, one bit per element index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElemSet(pub u64);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn singleton(g: usize) -> Self {
        ElemSet(1 << g)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            ElemSet(u64::MAX)
        } else {
            ElemSet((1u64 << n) - 1)
        }
    }

    pub fn from_elems<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut s = ElemSet::EMPTY;
        for g in it {
            s.insert(g);
        }
        s
    }

    #[inline]
    pub fn contains(self, g: usize) -> bool {
        self.0 >> g & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, g: usize) {
        self.0 |= 1 << g;
    }

    pub fn remove(&mut self, g: usize) {
        self.0 &= !(1 << g);
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: ElemSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest element index, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> ElemIter {
        ElemIter(self.0)
    }

    /// `{ x * g : x in self }`.
    #[inline]
    pub fn mul_right(self, group: &Group, g: usize) -> ElemSet {
        let mut out = 0u64;
        let mut bits = self.0;
        while bits != 0 {
            let x = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            out |= 1 << group.mul(x, g);
        }
        ElemSet(out)
    }

    /// `{ g * x : x in self }`.
    pub fn mul_left(self, group: &Group, g: usize) -> ElemSet {
        let mut out = 0u64;
        for x in self.iter() {
            out |= 1 << group.mul(g, x);
        }
        ElemSet(out)
    }

    /// Element-wise product set `{ x * y : x in self, y in other }`.
    pub fn product(self, group: &Group, other: ElemSet) -> ElemSet {
        let mut out = ElemSet::EMPTY;
        for y in other.iter() {
            out = out.union(self.mul_right(group, y));
        }
        out
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Element names, in index order.
    pub fn names(self, group: &Group) -> Vec<String> {
        self.iter().map(|g| group.name(g).to_string()).collect()
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for ElemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ElemSet::from_elems(iter)
    }
}

pub struct ElemIter(u64);

impl Iterator for ElemIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let g = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_set_ops() {
        let mut s = ElemSet::from_elems([1, 3, 5]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(3));
        s.remove(3);
        assert!(!s.contains(3));
        assert_eq!(s.first(), Some(1));
        assert_eq!(s.to_vec(), vec![1, 5]);
        assert!(ElemSet::from_elems([1]).is_subset(s));
        assert_eq!(ElemSet::full(64), ElemSet(u64::MAX));
        assert_eq!(ElemSet::full(3).to_vec(), vec![0, 1, 2]);
    }
}
