//! Atoms of the monoid of product-one sequences, Davenport constants,
//! divisibility in `B(G)` and sets of factorization lengths.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elemset::ElemSet;
use crate::group::{analyze, Group};
use crate::seq::{SeqError, SeqKey, Sequence, SubLattice, DEFAULT_LATTICE_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("{what} is not a product-one sequence")]
    NotProductOne { what: String },
    #[error("sequence of length {len} is too long for length sets (max {max})")]
    TooLong { len: usize, max: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Lengths are stored as a bitmask, so at most this many atoms per factorization.
pub const MAX_FACTORIZATION_LENGTH: usize = 127;

/// All atoms of `B(G0)`, sorted by length and then by term list.
#[derive(Debug, Clone)]
pub struct AtomSet {
    pub support: ElemSet,
    pub atoms: Vec<Sequence>,
    pub by_length: BTreeMap<usize, Vec<usize>>,
    pub max_length: usize,
}

impl AtomSet {
    fn from_atoms(support: ElemSet, mut atoms: Vec<Sequence>) -> Self {
        atoms.sort_by(|a, b| a.shortlex_cmp(b));
        let mut by_length: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, a) in atoms.iter().enumerate() {
            by_length.entry(a.len()).or_default().push(i);
        }
        let max_length = by_length.keys().next_back().copied().unwrap_or(0);
        AtomSet {
            support,
            atoms,
            by_length,
            max_length,
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Atom test for a single sequence.
pub fn is_atom(group: &Group, seq: &Sequence) -> Result<bool, SeqError> {
    if seq.is_empty() {
        return Ok(false);
    }
    let lattice = SubLattice::new(group, seq, DEFAULT_LATTICE_CAP)?;
    Ok(lattice.is_atom(lattice.full()))
}

/// Visits every canonical multiset over `elems` with `1 <= len <= max_len`,
/// passing the sequence and the product of its terms in index order.
fn visit_multisets(
    group: &Group,
    elems: &[usize],
    max_len: usize,
    f: &mut dyn FnMut(&Sequence, usize) -> Result<(), SeqError>,
) -> Result<(), SeqError> {
    fn rec(
        group: &Group,
        elems: &[usize],
        from: usize,
        left: usize,
        seq: &mut Sequence,
        prod: usize,
        f: &mut dyn FnMut(&Sequence, usize) -> Result<(), SeqError>,
    ) -> Result<(), SeqError> {
        if left == 0 {
            return Ok(());
        }
        for k in from..elems.len() {
            let g = elems[k];
            seq.exps_mut()[g] += 1;
            let p = group.mul(prod, g);
            let res = f(seq, p).and_then(|_| rec(group, elems, k, left - 1, seq, p, f));
            seq.exps_mut()[g] -= 1;
            res?;
        }
        Ok(())
    }
    let mut seq = Sequence::empty(group.order());
    rec(group, elems, 0, max_len, &mut seq, group.identity(), f)
}

fn atom_candidates(group: &Group, support: ElemSet) -> Vec<usize> {
    support.iter().filter(|&g| g != group.identity()).collect()
}

/// Atoms of `B(G0)` of exactly the given length.
pub fn atoms_of_length(
    group: &Group,
    support: ElemSet,
    len: usize,
) -> Result<Vec<Sequence>, SeqError> {
    if len == 1 && support.contains(group.identity()) {
        let mut out = vec![Sequence::power_of(group.order(), group.identity(), 1)];
        out.extend(atoms_in_range(group, support, 1, 1)?);
        return Ok(out);
    }
    atoms_in_range(group, support, len, len)
}

fn atoms_in_range(
    group: &Group,
    support: ElemSet,
    min_len: usize,
    max_len: usize,
) -> Result<Vec<Sequence>, SeqError> {
    let derived = analyze(group).commutator.members;
    let elems = atom_candidates(group, support);
    let mut out = Vec::new();
    visit_multisets(group, &elems, max_len, &mut |s, prod| {
        if s.len() >= min_len && derived.contains(prod) && is_atom(group, s)? {
            out.push(s.clone());
        }
        Ok(())
    })?;
    out.sort_by(|a, b| a.shortlex_cmp(b));
    Ok(out)
}

/// All atoms of `B(G0)` (default `G0 = G`); atoms have length at most `|G|`.
pub fn enumerate_atoms(group: &Group, support: Option<ElemSet>) -> Result<AtomSet, SeqError> {
    let support = support.unwrap_or_else(|| group.all());
    let mut atoms = atoms_in_range(group, support, 1, group.order())?;
    if support.contains(group.identity()) {
        atoms.push(Sequence::power_of(group.order(), group.identity(), 1));
    }
    Ok(AtomSet::from_atoms(support, atoms))
}

/// Small and large Davenport constants with witnesses.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DavenportReport {
    pub small: usize,
    pub large: usize,
    pub free_witness: Sequence,
    pub atom_witness: Sequence,
}

/// Longest product-one-free sequence over `support`, found by extending
/// free sequences only.
pub fn longest_free_sequence(group: &Group, support: ElemSet) -> Result<Sequence, SeqError> {
    fn rec(
        group: &Group,
        elems: &[usize],
        from: usize,
        seq: &Sequence,
        best: &mut Sequence,
    ) -> Result<(), SeqError> {
        if seq.len() > best.len() {
            *best = seq.clone();
        }
        for k in from..elems.len() {
            let next = seq.with(elems[k]);
            let lattice = SubLattice::new(group, &next, DEFAULT_LATTICE_CAP)?;
            if !lattice.subsequence_products().contains(group.identity()) {
                rec(group, elems, k, &next, best)?;
            }
        }
        Ok(())
    }
    let elems = atom_candidates(group, support);
    let mut best = Sequence::empty(group.order());
    rec(group, &elems, 0, &Sequence::empty(group.order()), &mut best)?;
    Ok(best)
}

/// `d(G0)` and `D(G0)` (default `G0 = G`).
pub fn davenport(group: &Group, support: Option<ElemSet>) -> Result<DavenportReport, FactorError> {
    let support = support.unwrap_or_else(|| group.all());
    let free = longest_free_sequence(group, support)?;
    let atoms = enumerate_atoms(group, Some(support))?;
    let atom_witness = atoms
        .by_length
        .get(&atoms.max_length)
        .and_then(|ix| ix.first())
        .map(|&i| atoms.atoms[i].clone())
        .unwrap_or_else(|| Sequence::empty(group.order()));
    if support == group.all() && !free.is_empty() {
        let pis = crate::seq::subsequence_products(group, &free)?;
        let mut expected = group.all();
        expected.remove(group.identity());
        if pis != expected {
            return Err(FactorError::Invariant(format!(
                "maximal product-one-free sequence {} does not reach every non-identity element",
                free.display(group)
            )));
        }
    }
    if free.len() + 1 > atoms.max_length {
        return Err(FactorError::Invariant(format!(
            "d + 1 = {} exceeds D = {}",
            free.len() + 1,
            atoms.max_length
        )));
    }
    Ok(DavenportReport {
        small: free.len(),
        large: atoms.max_length,
        free_witness: free,
        atom_witness,
    })
}

fn require_product_one(group: &Group, s: &Sequence, what: &str) -> Result<(), FactorError> {
    if !crate::seq::is_product_one(group, s)? {
        return Err(FactorError::NotProductOne {
            what: format!("{what} `{}`", s.display(group)),
        });
    }
    Ok(())
}

/// Divisibility in `B(G)`: `U | W` in `F(G)` and `W - U` is product-one.
pub fn divides_in_b(group: &Group, u: &Sequence, w: &Sequence) -> Result<bool, FactorError> {
    require_product_one(group, u, "divisor")?;
    require_product_one(group, w, "dividend")?;
    match u.complement_in(w) {
        None => Ok(false),
        Some(rest) => Ok(crate::seq::is_product_one(group, &rest)?),
    }
}

/// A set of factorization lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthSet {
    pub lengths: Vec<usize>,
    pub factorizations: Option<u64>,
}

impl LengthSet {
    /// Successive differences of the sorted lengths.
    pub fn delta(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.lengths.windows(2).map(|w| w[1] - w[0]).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn min(&self) -> Option<usize> {
        self.lengths.first().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.lengths.last().copied()
    }
}

pub(crate) fn mask_to_vec(mask: u128) -> Vec<usize> {
    (0..128).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Memoized computation of sets of lengths over a fixed list of atoms.
///
/// `L(X)` is the union over atoms `A` containing the smallest term of `X`
/// of `1 + L(X - A)`, with `L(empty) = {0}`. A sequence outside `B(G)` gets
/// the empty set, so no product sets are needed. The memo is shared by all
/// queries on the same engine.
pub struct LengthEngine {
    n: usize,
    atoms: Vec<Sequence>,
    /// atoms grouped by their smallest term
    by_min: Vec<Vec<usize>>,
    memo: FxHashMap<SeqKey, u128>,
    count_memo: FxHashMap<SeqKey, u64>,
}

impl LengthEngine {
    /// Engine over all atoms of `B(G)` up to the given length.
    pub fn new(group: &Group, atoms: &AtomSet) -> Self {
        Self::from_atoms(group.order(), atoms.atoms.clone())
    }

    pub fn from_atoms(n: usize, atoms: Vec<Sequence>) -> Self {
        let mut by_min = vec![Vec::new(); n];
        for (i, a) in atoms.iter().enumerate() {
            if let Some(g) = a.support().first() {
                by_min[g].push(i);
            }
        }
        LengthEngine {
            n,
            atoms,
            by_min,
            memo: FxHashMap::default(),
            count_memo: FxHashMap::default(),
        }
    }

    /// Engine over exactly the atoms dividing `b` in `F(G)`.
    pub fn for_sequence(group: &Group, b: &Sequence) -> Result<Self, SeqError> {
        let lattice = SubLattice::new(group, b, DEFAULT_LATTICE_CAP)?;
        let mut atoms = Vec::new();
        for idx in 1..lattice.size() {
            if lattice.is_atom(idx) {
                atoms.push(lattice.sequence_of(idx));
            }
        }
        Ok(Self::from_atoms(group.order(), atoms))
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn atoms(&self) -> &[Sequence] {
        &self.atoms
    }

    /// Bitmask of `L(x)`; zero iff `x` is not in `B(G)`.
    pub fn lengths_mask(&mut self, x: &Sequence) -> Result<u128, FactorError> {
        if x.len() > MAX_FACTORIZATION_LENGTH {
            return Err(FactorError::TooLong {
                len: x.len(),
                max: MAX_FACTORIZATION_LENGTH,
            });
        }
        debug_assert_eq!(x.group_order(), self.n);
        Ok(self.mask_rec(x.exps()))
    }

    fn mask_rec(&mut self, x: &[u32]) -> u128 {
        let Some(g0) = x.iter().position(|&e| e > 0) else {
            return 1;
        };
        let key: SeqKey = x.iter().map(|&e| e as u8).collect();
        if let Some(&m) = self.memo.get(&key) {
            return m;
        }
        let mut acc = 0u128;
        let mut rest = x.to_vec();
        for ai in 0..self.by_min[g0].len() {
            let a = self.by_min[g0][ai];
            let atom = self.atoms[a].exps();
            if !atom.iter().zip(x).all(|(p, q)| p <= q) {
                continue;
            }
            for (r, (q, p)) in rest.iter_mut().zip(x.iter().zip(atom)) {
                *r = q - p;
            }
            let sub = self.mask_rec(&rest);
            acc |= sub << 1;
        }
        self.memo.insert(key, acc);
        acc
    }

    /// `L(x)`, optionally with the number of distinct factorizations.
    pub fn lengths(&mut self, x: &Sequence, count: bool) -> Result<LengthSet, FactorError> {
        let mask = self.lengths_mask(x)?;
        let factorizations = if count {
            Some(self.count_rec(x.exps()))
        } else {
            None
        };
        Ok(LengthSet {
            lengths: mask_to_vec(mask),
            factorizations,
        })
    }

    /// Number of factorizations: the atoms containing the smallest term
    /// `g0` are chosen together as a non-decreasing run covering every copy
    /// of `g0`, then the remainder (free of `g0`) is counted recursively.
    fn count_rec(&mut self, x: &[u32]) -> u64 {
        let Some(g0) = x.iter().position(|&e| e > 0) else {
            return 1;
        };
        let key: SeqKey = x.iter().map(|&e| e as u8).collect();
        if let Some(&c) = self.count_memo.get(&key) {
            return c;
        }
        let candidates = self.by_min[g0].clone();
        let mut rest = x.to_vec();
        let total = self.count_runs(&candidates, 0, g0, &mut rest);
        self.count_memo.insert(key, total);
        total
    }

    fn count_runs(&mut self, cands: &[usize], from: usize, g0: usize, rest: &mut Vec<u32>) -> u64 {
        if rest[g0] == 0 {
            let r = rest.clone();
            return self.count_rec(&r);
        }
        let mut total = 0u64;
        for k in from..cands.len() {
            let atom = self.atoms[cands[k]].exps().to_vec();
            if !atom.iter().zip(rest.iter()).all(|(p, q)| p <= q) {
                continue;
            }
            for (r, p) in rest.iter_mut().zip(&atom) {
                *r -= p;
            }
            total = total.saturating_add(self.count_runs(cands, k, g0, rest));
            for (r, p) in rest.iter_mut().zip(&atom) {
                *r += p;
            }
        }
        total
    }
}

/// `L(B)` for a product-one sequence `B`; `L(empty) = {0}`.
pub fn factorization_lengths(
    group: &Group,
    b: &Sequence,
    count: bool,
) -> Result<LengthSet, FactorError> {
    if b.is_empty() {
        return Ok(LengthSet {
            lengths: vec![0],
            factorizations: count.then_some(1),
        });
    }
    require_product_one(group, b, "sequence")?;
    let mut engine = LengthEngine::for_sequence(group, b)?;
    let ls = engine.lengths(b, count)?;
    if ls.lengths.is_empty() {
        return Err(FactorError::Invariant(format!(
            "product-one sequence {} has no factorization",
            b.display(group)
        )));
    }
    Ok(ls)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(spec: &str) -> Group {
        Group::parse(spec).unwrap()
    }

    fn s(group: &Group, lit: &str) -> Sequence {
        Sequence::parse(group, lit).unwrap()
    }

    #[test]
    fn atom_examples() {
        let q = g("Q8");
        assert!(is_atom(&q, &s(&q, "I^4,J^2")).unwrap());
        assert!(is_atom(&q, &s(&q, "E")).unwrap());
        assert!(!is_atom(&q, &s(&q, "I,-I,J,-J")).unwrap());
        let c5 = g("C5");
        assert!(!is_atom(&c5, &s(&c5, "g,g4,g2,g3")).unwrap());
        assert!(!is_atom(&q, &Sequence::empty(8)).unwrap());
    }

    #[test]
    fn atoms_of_c3() {
        let c3 = g("C3");
        let atoms = enumerate_atoms(&c3, None).unwrap();
        let shown: Vec<String> = atoms.atoms.iter().map(|a| a.display(&c3)).collect();
        assert_eq!(shown, vec!["1", "g,g2", "g^3", "g2^3"]);
        assert_eq!(atoms.max_length, 3);
        let c1 = g("C1");
        assert_eq!(enumerate_atoms(&c1, None).unwrap().len(), 1);
    }

    #[test]
    fn davenport_small_groups() {
        for (spec, d, dd) in [("Q8", 4, 6), ("D6", 3, 6), ("C6", 5, 6), ("C1", 0, 1)] {
            let r = davenport(&g(spec), None).unwrap();
            assert_eq!((r.small, r.large), (d, dd), "{spec}");
            assert_eq!(r.free_witness.len(), d);
            assert_eq!(r.atom_witness.len(), dd);
        }
    }

    #[test]
    fn divisibility_in_b() {
        let q = g("Q8");
        assert!(!divides_in_b(&q, &s(&q, "I^4"), &s(&q, "I^4,J^2")).unwrap());
        let w = s(&q, "I^4,J^2");
        assert!(divides_in_b(&q, &w, &w).unwrap());
        let d6 = g("D6");
        assert!(divides_in_b(&d6, &s(&d6, "b^2"), &s(&d6, "b^2,a^3")).unwrap());
        assert!(matches!(
            divides_in_b(&d6, &s(&d6, "b"), &s(&d6, "b^2")),
            Err(FactorError::NotProductOne { .. })
        ));
    }

    #[test]
    fn lengths_examples() {
        let c3 = g("C3");
        let l = factorization_lengths(&c3, &s(&c3, "g^3,g2^3"), true).unwrap();
        assert_eq!(l.lengths, vec![2, 3]);
        assert_eq!(l.factorizations, Some(2));
        let q = g("Q8");
        let l = factorization_lengths(&q, &s(&q, "I^4,J^2"), true).unwrap();
        assert_eq!(l.lengths, vec![1]);
        assert_eq!(l.factorizations, Some(1));
        let l = factorization_lengths(&q, &Sequence::empty(8), false).unwrap();
        assert_eq!(l.lengths, vec![0]);
        let l = factorization_lengths(&q, &s(&q, "I^4,J^2,-I^4,-J^2"), false).unwrap();
        assert!(l.lengths.contains(&2));
        assert!(l.max().unwrap() >= 6);
    }
}
