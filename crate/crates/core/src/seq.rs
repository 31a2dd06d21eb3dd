//! Sequences over a finite group and their sets of products.
//!
//! A sequence is an element of the free abelian monoid over `G`, stored as
//! its exponent vector. The set of products `pi(S)` is computed by dynamic
//! programming over the lattice of sub-multisets of `S`:
//!
//! ```text
//! P(empty) = {1}
//! P(M)     = union over g in supp(M) of P(M - g) * g
//! ```
//!
//! The lattice is laid out densely in mixed radix (`v_g + 1` per support
//! element), so the complement of a sub-multiset is `full - index`.

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::elemset::ElemSet;
use crate::group::Group;

/// Default bound on the number of sub-multisets a single lattice may hold.
pub const DEFAULT_LATTICE_CAP: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("sequence has {needed} sub-multisets, above the cap of {cap}")]
    ResourceCap { needed: u128, cap: usize },
    #[error("cannot parse sequence `{literal}`: {reason}")]
    Parse { literal: String, reason: String },
}

/// Canonical byte-string key of an exponent vector.
pub type SeqKey = SmallVec<[u8; 24]>;

/// A sequence over `G`: `exps[g]` is the multiplicity of `g`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sequence {
    exps: Vec<u32>,
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence{:?}", self.terms())
    }
}

impl Sequence {
    /// The empty sequence over a group of order `n`.
    pub fn empty(n: usize) -> Self {
        Sequence { exps: vec![0; n] }
    }

    pub fn from_exps(exps: Vec<u32>) -> Self {
        Sequence { exps }
    }

    pub fn from_terms(n: usize, terms: &[usize]) -> Self {
        let mut s = Sequence::empty(n);
        for &g in terms {
            s.exps[g] += 1;
        }
        s
    }

    /// `g^[k]`.
    pub fn power_of(n: usize, g: usize, k: u32) -> Self {
        let mut s = Sequence::empty(n);
        s.exps[g] = k;
        s
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub(crate) fn exps_mut(&mut self) -> &mut [u32] {
        &mut self.exps
    }

    /// Order of the ambient group.
    pub fn group_order(&self) -> usize {
        self.exps.len()
    }

    #[inline]
    pub fn exp(&self, g: usize) -> u32 {
        self.exps[g]
    }

    pub fn len(&self) -> usize {
        self.exps.iter().map(|&e| e as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn support(&self) -> ElemSet {
        self.exps
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e > 0)
            .map(|(g, _)| g)
            .collect()
    }

    /// Terms in non-decreasing index order.
    pub fn terms(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        for (g, &e) in self.exps.iter().enumerate() {
            out.extend(std::iter::repeat_n(g, e as usize));
        }
        out
    }

    /// Juxtaposition `S . T`.
    pub fn concat(&self, other: &Sequence) -> Sequence {
        Sequence {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    /// `S^[k]`.
    pub fn pow(&self, k: u32) -> Sequence {
        Sequence {
            exps: self.exps.iter().map(|e| e * k).collect(),
        }
    }

    /// Adds one copy of `g`.
    pub fn with(&self, g: usize) -> Sequence {
        let mut s = self.clone();
        s.exps[g] += 1;
        s
    }

    /// `self | other` in the free abelian monoid.
    pub fn divides(&self, other: &Sequence) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other - self` when `self | other`.
    pub fn complement_in(&self, other: &Sequence) -> Option<Sequence> {
        self.divides(other).then(|| Sequence {
            exps: other.exps.iter().zip(&self.exps).map(|(b, a)| b - a).collect(),
        })
    }

    /// Byte key; exponents must fit in a byte.
    pub fn key(&self) -> SeqKey {
        self.exps
            .iter()
            .map(|&e| u8::try_from(e).expect("exponent above 255 in sequence key"))
            .collect()
    }

    pub fn from_key(key: &[u8]) -> Sequence {
        Sequence {
            exps: key.iter().map(|&e| e as u32).collect(),
        }
    }

    /// Number of sub-multisets, `prod (v_g + 1)`.
    pub fn lattice_size(&self) -> u128 {
        self.exps.iter().map(|&e| e as u128 + 1).product()
    }

    /// Product of the terms in index order; always an element of `pi(S)`.
    pub fn ordered_product(&self, group: &Group) -> usize {
        let mut p = 0;
        for (g, &e) in self.exps.iter().enumerate() {
            for _ in 0..e {
                p = group.mul(p, g);
            }
        }
        p
    }

    /// Parses a literal such as `a^2,b^2` or `I^4,J^2`. Names are resolved
    /// against the group; commas inside parentheses do not split terms.
    pub fn parse(group: &Group, literal: &str) -> Result<Sequence, SeqError> {
        let err = |reason: String| SeqError::Parse {
            literal: literal.to_string(),
            reason,
        };
        let mut s = Sequence::empty(group.order());
        let trimmed = literal.trim();
        if trimmed.is_empty() || trimmed == "empty" {
            return Ok(s);
        }
        for term in split_top_level(trimmed) {
            let term = term.trim();
            let (name, k) = match term.rsplit_once('^') {
                Some((name, k)) => {
                    let k: u32 = k
                        .trim()
                        .parse()
                        .map_err(|_| err(format!("bad multiplicity in `{term}`")))?;
                    (name.trim(), k)
                }
                None => (term, 1),
            };
            let g = group
                .index_of(name)
                .ok_or_else(|| err(format!("unknown element `{name}`")))?;
            s.exps[g] += k;
        }
        Ok(s)
    }

    /// Inverse of [`Sequence::parse`]; the empty sequence prints as `empty`.
    pub fn display(&self, group: &Group) -> String {
        if self.is_empty() {
            return "empty".to_string();
        }
        self.exps
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e > 0)
            .map(|(g, &e)| {
                if e == 1 {
                    group.name(g).to_string()
                } else {
                    format!("{}^{}", group.name(g), e)
                }
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Shortlex order on the non-decreasing term lists.
    pub fn shortlex_cmp(&self, other: &Sequence) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.terms().cmp(&other.terms()))
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// The lattice of sub-multisets of a sequence, with `pi` of every node.
pub struct SubLattice<'g> {
    group: &'g Group,
    support: Vec<usize>,
    radix: Vec<usize>,
    stride: Vec<usize>,
    pi: Vec<ElemSet>,
}

impl<'g> SubLattice<'g> {
    pub fn new(group: &'g Group, seq: &Sequence, cap: usize) -> Result<Self, SeqError> {
        let needed = seq.lattice_size();
        if needed > cap as u128 {
            return Err(SeqError::ResourceCap { needed, cap });
        }
        let support: Vec<usize> = seq.support().iter().collect();
        let radix: Vec<usize> = support.iter().map(|&g| seq.exp(g) as usize + 1).collect();
        let mut stride = Vec::with_capacity(radix.len());
        let mut acc = 1;
        for &r in &radix {
            stride.push(acc);
            acc *= r;
        }
        let size = acc;
        let mut pi = vec![ElemSet::EMPTY; size];
        pi[0] = ElemSet::singleton(group.identity());
        let mut digits = vec![0usize; support.len()];
        for idx in 1..size {
            // odometer increment
            for d in digits.iter_mut().zip(&radix) {
                *d.0 += 1;
                if *d.0 < *d.1 {
                    break;
                }
                *d.0 = 0;
            }
            let mut acc = ElemSet::EMPTY;
            for (k, &d) in digits.iter().enumerate() {
                if d > 0 {
                    acc = acc.union(pi[idx - stride[k]].mul_right(group, support[k]));
                }
            }
            pi[idx] = acc;
        }
        Ok(SubLattice {
            group,
            support,
            radix,
            stride,
            pi,
        })
    }

    pub fn size(&self) -> usize {
        self.pi.len()
    }

    /// Index of the whole sequence.
    pub fn full(&self) -> usize {
        self.pi.len() - 1
    }

    #[inline]
    pub fn pi(&self, idx: usize) -> ElemSet {
        self.pi[idx]
    }

    #[inline]
    pub fn is_product_one(&self, idx: usize) -> bool {
        self.pi[idx].contains(self.group.identity())
    }

    #[inline]
    pub fn complement(&self, idx: usize) -> usize {
        self.full() - idx
    }

    pub fn digit(&self, idx: usize, k: usize) -> usize {
        idx / self.stride[k] % self.radix[k]
    }

    /// Number of terms of the sub-multiset `idx`.
    pub fn len_of(&self, idx: usize) -> usize {
        (0..self.support.len()).map(|k| self.digit(idx, k)).sum()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn stride(&self, k: usize) -> usize {
        self.stride[k]
    }

    pub fn sequence_of(&self, idx: usize) -> Sequence {
        let mut s = Sequence::empty(self.group.order());
        for (k, &g) in self.support.iter().enumerate() {
            s.exps[g] = self.digit(idx, k) as u32;
        }
        s
    }

    /// Index of a sub-multiset, if it is one.
    pub fn index_of(&self, sub: &Sequence) -> Option<usize> {
        let mut idx = 0;
        for g in sub.support().iter() {
            let k = self.support.iter().position(|&h| h == g)?;
            let e = sub.exp(g) as usize;
            if e >= self.radix[k] {
                return None;
            }
            idx += e * self.stride[k];
        }
        Some(idx)
    }

    /// Calls `f` on every sub-multiset of `idx`, including `0` and `idx`.
    pub fn for_each_sub(&self, idx: usize, mut f: impl FnMut(usize) -> bool) {
        let bound: SmallVec<[usize; 24]> =
            (0..self.support.len()).map(|k| self.digit(idx, k)).collect();
        let mut cur: SmallVec<[usize; 24]> = SmallVec::from_elem(0, bound.len());
        let mut sub = 0usize;
        loop {
            if !f(sub) {
                return;
            }
            let mut k = 0;
            loop {
                if k == bound.len() {
                    return;
                }
                if cur[k] < bound[k] {
                    cur[k] += 1;
                    sub += self.stride[k];
                    break;
                }
                sub -= cur[k] * self.stride[k];
                cur[k] = 0;
                k += 1;
            }
        }
    }

    /// Union of `pi(T)` over all non-empty sub-multisets `T`.
    pub fn subsequence_products(&self) -> ElemSet {
        self.pi[1..].iter().fold(ElemSet::EMPTY, |acc, &p| acc.union(p))
    }

    /// `true` if the sub-multiset `idx` splits into two non-empty
    /// product-one parts.
    pub fn splits(&self, idx: usize) -> bool {
        let mut found = false;
        self.for_each_sub(idx, |t| {
            if t != 0 && t != idx && self.is_product_one(t) && self.is_product_one(idx - t) {
                found = true;
                return false;
            }
            true
        });
        found
    }

    /// Atom test for the sub-multiset `idx`.
    pub fn is_atom(&self, idx: usize) -> bool {
        idx != 0 && self.is_product_one(idx) && !self.splits(idx)
    }
}

/// The set of products `pi(S)`; `pi(empty) = {1}`.
pub fn product_set(group: &Group, seq: &Sequence) -> Result<ElemSet, SeqError> {
    product_set_with_cap(group, seq, DEFAULT_LATTICE_CAP)
}

pub fn product_set_with_cap(
    group: &Group,
    seq: &Sequence,
    cap: usize,
) -> Result<ElemSet, SeqError> {
    if seq.len() <= 1 {
        return Ok(ElemSet::singleton(seq.ordered_product(group)));
    }
    let lattice = SubLattice::new(group, seq, cap)?;
    Ok(lattice.pi(lattice.full()))
}

/// The set of subsequence products `Pi(S)`.
pub fn subsequence_products(group: &Group, seq: &Sequence) -> Result<ElemSet, SeqError> {
    if seq.is_empty() {
        return Ok(ElemSet::EMPTY);
    }
    let lattice = SubLattice::new(group, seq, DEFAULT_LATTICE_CAP)?;
    Ok(lattice.subsequence_products())
}

pub fn is_product_one(group: &Group, seq: &Sequence) -> Result<bool, SeqError> {
    Ok(product_set(group, seq)?.contains(group.identity()))
}

pub fn is_product_one_free(group: &Group, seq: &Sequence) -> Result<bool, SeqError> {
    Ok(!subsequence_products(group, seq)?.contains(group.identity()))
}
