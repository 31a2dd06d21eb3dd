//! Arithmetic invariants of `B(G)`: unions of sets of lengths, their maxima
//! and minima, the set of distances, the `omega` invariant, and Davenport
//! constants of finite commutative semigroups.

use std::collections::BTreeSet;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::class_semigroup::{ClassError, ClassSemigroup};
use crate::factor::{
    divides_in_b, enumerate_atoms, mask_to_vec, AtomSet, FactorError, LengthEngine,
};
use crate::group::{analyze, Group};
use crate::seq::{SeqError, SeqKey, Sequence};

pub const DEFAULT_PRODUCT_BUDGET: u128 = 50_000_000;
pub const DEFAULT_SEARCH_BUDGET: usize = 200_000;
pub const DEFAULT_SEMIGROUP_BUDGET: usize = 50_000_000;
/// Memo entries kept by a length engine before it is cleared.
const MEMO_LIMIT: usize = 8_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error("{what} needs {needed} steps, above the budget of {budget}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        budget: u128,
    },
    #[error("semigroup has {size} elements; at most 128 are supported")]
    SemigroupTooLarge { size: usize },
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// `U_k(G)` with its extremes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionReport {
    pub k: usize,
    pub union: Vec<usize>,
    pub rho: usize,
    pub lambda: usize,
    pub is_interval: bool,
    /// distinct products of `k` identity-free atoms that were examined
    pub products: usize,
}

/// Advances a non-decreasing tuple over `0..m`; `false` after the last one.
fn next_tuple(idx: &mut [usize], m: usize) -> bool {
    let Some(p) = idx.iter().rposition(|&i| i + 1 < m) else {
        return false;
    };
    let v = idx[p] + 1;
    for q in &mut idx[p..] {
        *q = v;
    }
    true
}

fn is_interval(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[1] == w[0] + 1)
}

/// Computes `U_1, ..., U_k` at once, sharing atoms and the length memo.
pub struct UnionComputer {
    atoms: Vec<Sequence>,
    engine: LengthEngine,
    n: usize,
    budget: u128,
    /// `primed[m]`: union of `L(B)` over identity-free `B` with `m in L(B)`
    primed: Vec<(u128, usize)>,
}

impl UnionComputer {
    pub fn new(group: &Group, atoms: &AtomSet) -> Self {
        let id = group.identity();
        let free: Vec<Sequence> = atoms
            .atoms
            .iter()
            .filter(|a| a.exp(id) == 0)
            .cloned()
            .collect();
        UnionComputer {
            engine: LengthEngine::from_atoms(group.order(), free.clone()),
            atoms: free,
            n: group.order(),
            budget: DEFAULT_PRODUCT_BUDGET,
            primed: vec![(1, 1)],
        }
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    fn primed(&mut self, m: usize) -> Result<(u128, usize), ArithError> {
        while self.primed.len() <= m {
            let j = self.primed.len();
            let needed = binomial(self.atoms.len() as u128 + j as u128 - 1, j as u128);
            if needed > self.budget {
                return Err(ArithError::BudgetExceeded {
                    what: format!("products of {j} atoms"),
                    needed,
                    budget: self.budget,
                });
            }
            let mut acc = 0u128;
            let mut seen: FxHashSet<SeqKey> = FxHashSet::default();
            let mut idx = vec![0usize; j];
            if !self.atoms.is_empty() {
                loop {
                    let mut exps = vec![0u32; self.n];
                    for &i in &idx {
                        for (e, a) in exps.iter_mut().zip(self.atoms[i].exps()) {
                            *e += a;
                        }
                    }
                    let prod = Sequence::from_exps(exps);
                    if seen.insert(prod.key()) {
                        acc |= self.engine.lengths_mask(&prod)?;
                        if self.engine.memo_len() > MEMO_LIMIT {
                            self.engine = LengthEngine::from_atoms(self.n, self.atoms.clone());
                        }
                    }
                    if !next_tuple(&mut idx, self.atoms.len()) {
                        break;
                    }
                }
            }
            let count = seen.len();
            self.primed.push((acc, count));
        }
        Ok(self.primed[m])
    }

    /// `U_k(G)`. Copies of `1_G` are prime and shift lengths by one, so
    /// `U_k = union over j of (j + U'_{k-j})` with `U'` over identity-free
    /// sequences and `U'_0 = {0}`.
    pub fn union(&mut self, k: usize) -> Result<UnionReport, ArithError> {
        let mut mask = 0u128;
        let mut products = 0;
        for j in 0..=k {
            let (m, c) = self.primed(k - j)?;
            if k - j == k {
                products = c;
            }
            mask |= m << j;
        }
        let union = mask_to_vec(mask);
        Ok(UnionReport {
            k,
            rho: *union.last().unwrap_or(&0),
            lambda: *union.first().unwrap_or(&0),
            is_interval: is_interval(&union),
            union,
            products,
        })
    }
}

pub fn unions_of_lengths(group: &Group, k: usize) -> Result<UnionReport, ArithError> {
    let atoms = enumerate_atoms(group, None)?;
    UnionComputer::new(group, &atoms).union(k)
}

/// `rho_k` for `k <= k_max` checked against the known bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoReport {
    pub large_davenport: usize,
    pub rho: Vec<usize>,
    pub unions: Vec<UnionReport>,
    /// human-readable descriptions of every bound that failed
    pub violations: Vec<String>,
}

pub fn rho_bounds_check(group: &Group, k_max: usize) -> Result<RhoReport, ArithError> {
    let atoms = enumerate_atoms(group, None)?;
    let dd = atoms.max_length;
    let mut uc = UnionComputer::new(group, &atoms);
    let mut unions = Vec::new();
    for k in 1..=k_max {
        unions.push(uc.union(k)?);
    }
    let rho: Vec<usize> = unions.iter().map(|u| u.rho).collect();
    let mut violations = Vec::new();
    let r = |k: usize| rho[k - 1];
    for k in 1..=k_max {
        if 2 * r(k) > k * dd && k >= 2 {
            violations.push(format!("rho_{k} = {} exceeds k D / 2 = {}", r(k), k * dd / 2));
        }
        if !unions[k - 1].is_interval {
            violations.push(format!("U_{k} = {:?} is not an interval", unions[k - 1].union));
        }
        if k % 2 == 0 && r(k) != k / 2 * dd {
            violations.push(format!("rho_{k} = {} differs from {}", r(k), k / 2 * dd));
        }
        if k % 2 == 1 && k >= 3 {
            let h = k / 2;
            if r(k) < 1 + h * dd || 2 * r(k) > 2 * h * dd + dd {
                violations.push(format!(
                    "rho_{k} = {} outside [{}, {}]",
                    r(k),
                    1 + h * dd,
                    h * dd + dd / 2
                ));
            }
        }
        for i in 1..k {
            if r(i) + r(k - i) > r(k) {
                violations.push(format!("rho_{i} + rho_{} > rho_{k}", k - i));
            }
        }
    }
    Ok(RhoReport {
        large_davenport: dd,
        rho,
        unions,
        violations,
    })
}

/// Union of the distance sets of `L(B)` over `B` with `|B| <= length_bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub delta: Vec<usize>,
    pub length_bound: usize,
    /// `true` only when `length_bound` reaches a cap the caller certified
    pub exact: bool,
    pub sequences: usize,
    /// a sequence realizing the largest distance
    pub witness: Option<Sequence>,
}

pub fn delta_set(
    group: &Group,
    length_bound: usize,
    certified_cap: Option<usize>,
) -> Result<DeltaReport, ArithError> {
    let atoms = enumerate_atoms(group, None)?;
    let id = group.identity();
    let free: Vec<Sequence> = atoms.atoms.iter().filter(|a| a.exp(id) == 0).cloned().collect();
    let mut engine = LengthEngine::from_atoms(group.order(), free);
    let derived = analyze(group).commutator.members;
    let elems: Vec<usize> = group.elements().filter(|&g| g != id).collect();
    let needed = binomial((elems.len() + length_bound) as u128, length_bound as u128);
    if needed > DEFAULT_PRODUCT_BUDGET {
        return Err(ArithError::BudgetExceeded {
            what: format!("sequences of length at most {length_bound}"),
            needed,
            budget: DEFAULT_PRODUCT_BUDGET,
        });
    }
    let mut delta = BTreeSet::new();
    let mut sequences = 0;
    let mut witness: Option<(usize, Sequence)> = None;
    let mut stack: Vec<(Sequence, usize, usize)> = vec![(Sequence::empty(group.order()), 0, id)];
    while let Some((seq, from, prod)) = stack.pop() {
        if !seq.is_empty() && derived.contains(prod) {
            let mask = engine.lengths_mask(&seq)?;
            if mask != 0 {
                sequences += 1;
                let ls = mask_to_vec(mask);
                for w in ls.windows(2) {
                    let d = w[1] - w[0];
                    delta.insert(d);
                    if witness.as_ref().is_none_or(|(best, _)| d > *best) {
                        witness = Some((d, seq.clone()));
                    }
                }
            }
        }
        if seq.len() < length_bound {
            for k in (from..elems.len()).rev() {
                stack.push((seq.with(elems[k]), k, group.mul(prod, elems[k])));
            }
        }
    }
    Ok(DeltaReport {
        delta: delta.into_iter().collect(),
        length_bound,
        exact: certified_cap.is_some_and(|c| length_bound >= c),
        sequences,
        witness: witness.map(|w| w.1),
    })
}

/// Davenport constants of a finite commutative semigroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemigroupDavenport {
    pub small: usize,
    pub large: usize,
    /// longest sequence with no proper sub-sum equal to its total
    pub witness: Vec<usize>,
}

type Bits = u128;

fn shift(op: &[Vec<usize>], set: Bits, c: usize) -> Bits {
    let mut out = 0;
    let mut bits = set;
    while bits != 0 {
        let x = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        out |= 1 << op[x][c];
    }
    out
}

/// `d(C)` and `D(C)` for the commutative semigroup with operation table
/// `op` and neutral element `zero`. Sequences without a proper sub-sum equal
/// to the total are closed under taking subsequences, so they are searched
/// by extension only.
pub fn semigroup_davenport(op: &[Vec<usize>], zero: usize) -> Result<SemigroupDavenport, ArithError> {
    semigroup_davenport_with_budget(op, zero, DEFAULT_SEMIGROUP_BUDGET)
}

pub fn semigroup_davenport_with_budget(
    op: &[Vec<usize>],
    zero: usize,
    budget: usize,
) -> Result<SemigroupDavenport, ArithError> {
    let size = op.len();
    if size > 128 {
        return Err(ArithError::SemigroupTooLarge { size });
    }
    struct Search<'a> {
        op: &'a [Vec<usize>],
        nodes: usize,
        budget: usize,
        best: Vec<usize>,
        cur: Vec<usize>,
    }
    impl Search<'_> {
        // `all`: every sub-sum of cur; `proper`: sub-sums of proper subsequences
        fn rec(&mut self, from: usize, total: usize, all: Bits, proper: Bits) -> Result<(), ()> {
            if self.cur.len() > self.best.len() {
                self.best = self.cur.clone();
            }
            for c in from..self.op.len() {
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(());
                }
                let t = self.op[total][c];
                let proper2 = all | shift(self.op, proper, c);
                if proper2 >> t & 1 == 1 {
                    continue;
                }
                let all2 = all | shift(self.op, all, c);
                self.cur.push(c);
                let r = self.rec(c, t, all2, proper2);
                self.cur.pop();
                r?;
            }
            Ok(())
        }
    }
    let mut s = Search {
        op,
        nodes: 0,
        budget,
        best: Vec::new(),
        cur: Vec::new(),
    };
    let z: Bits = 1 << zero;
    if s.rec(0, zero, z, 0).is_err() {
        return Err(ArithError::BudgetExceeded {
            what: "irredundant sequence search".into(),
            needed: s.nodes as u128,
            budget: budget as u128,
        });
    }
    Ok(SemigroupDavenport {
        small: s.best.len(),
        large: s.best.len() + 1,
        witness: s.best,
    })
}

/// Bounds on `omega(G)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaReport {
    /// per atom, the largest verified irreducible witness size
    pub per_atom: Vec<(Sequence, usize)>,
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    pub large_davenport: usize,
    /// `d` of the class semigroup used for the upper bound (absent for abelian `G`)
    pub class_small_davenport: Option<usize>,
    pub search_complete: bool,
}

/// `u` divides the product of `factors` in `B(G)`, but not the product of
/// any proper subfamily. By monotonicity it suffices to drop one factor.
pub fn is_irreducible_witness(
    group: &Group,
    u: &Sequence,
    factors: &[Sequence],
) -> Result<bool, FactorError> {
    let total = factors
        .iter()
        .fold(Sequence::empty(group.order()), |acc, f| acc.concat(f));
    if !divides_in_b(group, u, &total)? {
        return Ok(false);
    }
    for skip in 0..factors.len() {
        let part = factors
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .fold(Sequence::empty(group.order()), |acc, (_, f)| acc.concat(f));
        if u.divides(&part) && divides_in_b(group, u, &part)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `g_1 . g_1^-1, ..., g_l . g_l^-1` for `u = g_1 ... g_l`.
pub fn inverse_pair_witness(group: &Group, u: &Sequence) -> Vec<Sequence> {
    u.terms()
        .into_iter()
        .map(|g| {
            let mut s = Sequence::power_of(group.order(), g, 1);
            s.exps_mut()[group.inv(g)] += 1;
            s
        })
        .collect()
}

/// `omega(G)` bracketed by verified witnesses from below and by
/// `D(G) + d(C)` from above (`D(G)` for abelian `G`).
pub fn omega(
    group: &Group,
    atoms: &AtomSet,
    class: Option<&ClassSemigroup>,
    search_budget: usize,
) -> Result<OmegaReport, ArithError> {
    let dd = atoms.max_length;
    let (upper, class_small) = if group.is_abelian() {
        (dd, None)
    } else {
        let c = match class {
            Some(c) => semigroup_davenport(&c.op, c.zero)?,
            None => {
                let built = ClassSemigroup::build(group)?;
                semigroup_davenport(&built.op, built.zero)?
            }
        };
        (dd + c.small, Some(c.small))
    };

    let mut per_atom = Vec::with_capacity(atoms.len());
    for u in &atoms.atoms {
        let w = inverse_pair_witness(group, u);
        let n = if is_irreducible_witness(group, u, &w)? { w.len() } else { 0 };
        per_atom.push((u.clone(), n));
    }
    let mut lower = per_atom.iter().map(|p| p.1).max().unwrap_or(0);

    // look for witnesses with more factors than the current lower bound
    let mut spent = 0usize;
    let mut complete = lower >= upper;
    let mut n = lower + 1;
    while n <= upper && spent < search_budget {
        let mut found = false;
        let mut exhausted = true;
        'atoms: for (ui, u) in atoms.atoms.iter().enumerate() {
            let mut idx = vec![0usize; n];
            loop {
                spent += 1;
                if spent > search_budget {
                    exhausted = false;
                    break 'atoms;
                }
                let factors: Vec<Sequence> = idx.iter().map(|&i| atoms.atoms[i].clone()).collect();
                let total = factors
                    .iter()
                    .fold(Sequence::empty(group.order()), |acc, f| acc.concat(f));
                if u.divides(&total) && is_irreducible_witness(group, u, &factors)? {
                    per_atom[ui].1 = per_atom[ui].1.max(n);
                    found = true;
                    break 'atoms;
                }
                if !next_tuple(&mut idx, atoms.len()) {
                    break;
                }
            }
        }
        if found {
            lower = n;
            n += 1;
            continue;
        }
        if exhausted {
            // no witness with n factors; larger n is still open
            n += 1;
            if n > upper {
                complete = true;
            }
        } else {
            break;
        }
    }
    Ok(OmegaReport {
        per_atom,
        lower,
        upper,
        exact: lower == upper,
        large_davenport: dd,
        class_small_davenport: class_small,
        search_complete: complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(spec: &str) -> Group {
        Group::parse(spec).unwrap()
    }

    #[test]
    fn unions_small() {
        let d6 = g("D6");
        let u1 = unions_of_lengths(&d6, 1).unwrap();
        assert_eq!(u1.union, vec![1]);
        let u2 = unions_of_lengths(&d6, 2).unwrap();
        assert_eq!(u2.union, vec![2, 3, 4, 5, 6]);
        let c4 = g("C4");
        let r = rho_bounds_check(&c4, 3).unwrap();
        assert_eq!(r.rho[1], 4);
        assert!(r.violations.is_empty(), "{:?}", r.violations);
    }

    #[test]
    fn semigroup_davenport_of_cyclic_groups() {
        for n in 1..=8 {
            let c = g(&format!("C{n}"));
            let r = semigroup_davenport(&c.table(), 0).unwrap();
            assert_eq!(r.large, n, "C{n}");
            assert_eq!(r.small + 1, r.large);
            assert_eq!(r.witness.len(), r.small);
        }
    }

    #[test]
    fn delta_examples() {
        let c3 = g("C3");
        assert_eq!(delta_set(&c3, 8, None).unwrap().delta, vec![1]);
        let c1 = g("C1");
        let r = delta_set(&c1, 5, None).unwrap();
        assert!(r.delta.is_empty());
        assert!(!r.exact);
    }

    #[test]
    fn omega_cyclic() {
        for n in 3..=5 {
            let c = g(&format!("C{n}"));
            let atoms = enumerate_atoms(&c, None).unwrap();
            let r = omega(&c, &atoms, None, 1000).unwrap();
            assert_eq!((r.lower, r.upper), (n, n));
            assert!(r.exact);
        }
    }
}
