//! Structural verdicts on `B(G)`: Property P, seminormality, the Krull
//! property, root closure, and divisor-closed submonoids.
//!
//! Membership in the quotient group. The class group of the complete
//! integral closure is `q(F(G)) / q(B(G))`, and `S q(B(G)) -> g G'` (any
//! `g in pi(S)`) is an isomorphism onto `G/G'`. Hence a sequence `S` lies in
//! `q(B(G))` iff its class is trivial iff `pi(S)` meets `G'`; since `pi(S)`
//! lies in a single coset, this is `pi(S) ⊆ G'`. All witness searches below
//! range over sequences with that property.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::elemset::ElemSet;
use crate::factor::{atoms_of_length, divides_in_b, factorization_lengths, is_atom, FactorError};
use crate::group::{analyze, Group};
use crate::seq::{is_product_one, SeqError, SeqKey, Sequence, SubLattice, DEFAULT_LATTICE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    PropertyP,
    Seminormal,
    Krull,
    RootClosed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Holds {
    True,
    False,
    UnknownUpToBound,
}

/// Outcome of a structural check. `False` always carries a re-validated
/// witness; `True` carries the reason (a theorem or an exhausted search).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: Property,
    pub holds: Holds,
    pub witness: Option<Sequence>,
    /// labelled, human-readable parts of the witness
    pub details: BTreeMap<String, String>,
    pub reason: String,
    pub bound: Option<usize>,
}

impl Verdict {
    fn new(property: Property, holds: Holds, reason: impl Into<String>, bound: Option<usize>) -> Self {
        Verdict {
            property,
            holds,
            witness: None,
            details: BTreeMap::new(),
            reason: reason.into(),
            bound,
        }
    }
}

/// `true` iff the product-one sequence `s` is an atom or a product of two.
pub fn at_most_two_atoms(group: &Group, s: &Sequence) -> Result<bool, SeqError> {
    let lattice = SubLattice::new(group, s, DEFAULT_LATTICE_CAP)?;
    let full = lattice.full();
    if lattice.is_atom(full) {
        return Ok(true);
    }
    let mut found = false;
    lattice.for_each_sub(full, |t| {
        let c = full - t;
        if t != 0 && t <= c && lattice.is_product_one(t) && lattice.is_product_one(c) && lattice.is_atom(t) && lattice.is_atom(c) {
            found = true;
            return false;
        }
        true
    });
    Ok(found)
}

/// A failure of Property P: splitting `term = h1 h2` in `atom` gives
/// `split`, which needs at least three atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyPFailure {
    pub atom: Sequence,
    pub term: usize,
    pub h1: usize,
    pub h2: usize,
    pub split: Sequence,
    pub lengths: Vec<usize>,
}

/// Re-checks a Property P counterexample from scratch.
pub fn check_property_p_failure(
    group: &Group,
    atom: &Sequence,
    term: usize,
    h1: usize,
    h2: usize,
) -> Result<PropertyPFailure, String> {
    if !is_atom(group, atom).map_err(|e| e.to_string())? {
        return Err(format!("{} is not an atom", atom.display(group)));
    }
    if atom.exp(term) == 0 {
        return Err(format!("{} does not occur in {}", group.name(term), atom.display(group)));
    }
    if group.mul(h1, h2) != term {
        return Err(format!("{} {} != {}", group.name(h1), group.name(h2), group.name(term)));
    }
    let split = split_term(atom, term, h1, h2);
    let ls = factorization_lengths(group, &split, false).map_err(|e| e.to_string())?;
    if ls.min().is_some_and(|m| m <= 2) {
        return Err(format!("{} has a factorization of length {:?}", split.display(group), ls.min()));
    }
    Ok(PropertyPFailure {
        atom: atom.clone(),
        term,
        h1,
        h2,
        split,
        lengths: ls.lengths,
    })
}

fn split_term(atom: &Sequence, term: usize, h1: usize, h2: usize) -> Sequence {
    let mut s = atom.clone();
    s.exps_mut()[term] -= 1;
    s.exps_mut()[h1] += 1;
    s.exps_mut()[h2] += 1;
    s
}

/// Property P over all atoms of length at most `max_length` (default `|G|`,
/// which covers every atom since `D(G) <= |G|`).
pub fn property_p(group: &Group, max_length: Option<usize>) -> Result<Verdict, FactorError> {
    let large = group.order();
    let bound = max_length.unwrap_or(large);
    let id = group.identity();
    let mut cache: FxHashMap<SeqKey, bool> = FxHashMap::default();
    let mut checked = 0usize;
    for len in 1..=bound.min(large) {
        for u in atoms_of_length(group, group.all(), len)? {
            for g in u.support().iter() {
                for h1 in group.elements() {
                    let h2 = group.mul(group.inv(h1), g);
                    if h1 == id || h2 == id {
                        continue; // 1_G is prime: the split is 1_G . U
                    }
                    let split = split_term(&u, g, h1, h2);
                    checked += 1;
                    let key = split.key();
                    let ok = match cache.get(&key) {
                        Some(&ok) => ok,
                        None => {
                            let ok = at_most_two_atoms(group, &split)?;
                            cache.insert(key, ok);
                            ok
                        }
                    };
                    if !ok {
                        let f = check_property_p_failure(group, &u, g, h1, h2)
                            .map_err(FactorError::Invariant)?;
                        let mut v = Verdict::new(
                            Property::PropertyP,
                            Holds::False,
                            "splitting one term of an atom needs three or more atoms",
                            Some(bound),
                        );
                        v.witness = Some(u.clone());
                        v.details.insert("atom".into(), u.display(group));
                        v.details.insert(
                            "split".into(),
                            format!("{} = {} {}", group.name(g), group.name(h1), group.name(h2)),
                        );
                        v.details.insert("result".into(), f.split.display(group));
                        v.details.insert("lengths".into(), format!("{:?}", f.lengths));
                        return Ok(v);
                    }
                }
            }
        }
    }
    if bound >= large {
        Ok(Verdict::new(
            Property::PropertyP,
            Holds::True,
            format!("all {checked} splits of all atoms checked (atoms have length at most |G| = {large})"),
            Some(bound),
        ))
    } else {
        Ok(Verdict::new(
            Property::PropertyP,
            Holds::UnknownUpToBound,
            format!("no failure among atoms of length at most {bound}"),
            Some(bound),
        ))
    }
}

/// `S` lies in `q(B(G))` but not in `B(G)`, and `S^[k]` is product-one.
fn root_candidates(
    group: &Group,
    bound: usize,
    mut accept: impl FnMut(&Sequence) -> Result<bool, SeqError>,
) -> Result<Option<Sequence>, SeqError> {
    let id = group.identity();
    let derived = analyze(group).commutator.members;
    let elems: Vec<usize> = group.elements().filter(|&g| g != id).collect();
    for len in 1..=bound {
        let mut found: Option<Sequence> = None;
        let mut stack: Vec<(Sequence, usize, usize)> = vec![(Sequence::empty(group.order()), 0, id)];
        while let Some((seq, from, prod)) = stack.pop() {
            if seq.len() == len {
                if derived.contains(prod) && !is_product_one(group, &seq)? && accept(&seq)? {
                    found = Some(seq);
                    break;
                }
                continue;
            }
            for k in (from..elems.len()).rev() {
                stack.push((seq.with(elems[k]), k, group.mul(prod, elems[k])));
            }
        }
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Re-checks a seminormality counterexample from scratch.
pub fn check_seminormality_witness(group: &Group, s: &Sequence) -> Result<(), String> {
    let derived = analyze(group).commutator.members;
    let pi = crate::seq::product_set(group, s).map_err(|e| e.to_string())?;
    if !pi.is_subset(derived) {
        return Err(format!("pi({}) is not inside G'", s.display(group)));
    }
    let po = |t: &Sequence| is_product_one(group, t).map_err(|e| e.to_string());
    if po(s)? {
        return Err(format!("{} is product-one", s.display(group)));
    }
    if !po(&s.pow(2))? || !po(&s.pow(3))? {
        return Err(format!("a power of {} is not product-one", s.display(group)));
    }
    Ok(())
}

pub fn seminormality(group: &Group, length_bound: usize) -> Result<Verdict, SeqError> {
    let st = analyze(group);
    let found = root_candidates(group, length_bound, |s| {
        Ok(is_product_one(group, &s.pow(2))? && is_product_one(group, &s.pow(3))?)
    })?;
    if let Some(s) = found {
        check_seminormality_witness(group, &s).expect("search witness re-validates");
        let mut v = Verdict::new(
            Property::Seminormal,
            Holds::False,
            "S lies in the quotient group and S^[2], S^[3] are product-one, but S is not",
            Some(length_bound),
        );
        v.details.insert("S".into(), s.display(group));
        v.details.insert("pi(S)".into(), pi_names(group, &s)?);
        v.witness = Some(s);
        return Ok(v);
    }
    let (holds, reason) = if group.is_abelian() {
        (Holds::True, "G is abelian, so B(G) is Krull and hence seminormal".to_string())
    } else if st.commutator.order() == 2 {
        (Holds::True, "|G'| = 2 forces seminormality".to_string())
    } else {
        (
            Holds::UnknownUpToBound,
            format!("no counterexample of length at most {length_bound}"),
        )
    };
    Ok(Verdict::new(Property::Seminormal, holds, reason, Some(length_bound)))
}

fn pi_names(group: &Group, s: &Sequence) -> Result<String, SeqError> {
    Ok(format!("{{{}}}", crate::seq::product_set(group, s)?.names(group).join(", ")))
}

/// Smallest `k` in `2..=exp(G)` with `S^[k]` product-one.
fn root_exponent(group: &Group, s: &Sequence) -> Result<Option<u32>, SeqError> {
    for k in 2..=group.exponent() as u32 {
        if is_product_one(group, &s.pow(k))? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// `g . h . g^-1 . (g h^-1 g^-1)` for the first non-commuting pair.
pub fn noncommuting_atom(group: &Group) -> Option<(usize, usize, Sequence)> {
    for g in group.elements() {
        for h in group.elements() {
            if !group.commutes(g, h) {
                let x = group.mul(group.mul(g, group.inv(h)), group.inv(g));
                let u = Sequence::from_terms(group.order(), &[g, h, group.inv(g), x]);
                return Some((g, h, u));
            }
        }
    }
    None
}

fn root_closure_verdict(group: &Group, length_bound: usize, property: Property) -> Result<Verdict, SeqError> {
    if group.is_abelian() {
        return Ok(Verdict::new(
            property,
            Holds::True,
            "G is abelian: B(G) -> F(G) is a divisor homomorphism",
            None,
        ));
    }
    let found = root_candidates(group, length_bound, |s| Ok(root_exponent(group, s)?.is_some()))?;
    let mut v = match &found {
        Some(s) => {
            let k = root_exponent(group, s)?.expect("witness has a root exponent");
            let mut v = Verdict::new(
                property,
                Holds::False,
                "S lies in the quotient group, S^[k] is product-one, but S is not",
                Some(length_bound),
            );
            v.details.insert("S".into(), s.display(group));
            v.details.insert("k".into(), k.to_string());
            v.details.insert("pi(S)".into(), pi_names(group, s)?);
            v.witness = Some(s.clone());
            v
        }
        None => Verdict::new(
            property,
            Holds::UnknownUpToBound,
            format!("no root-closure witness of length at most {length_bound}"),
            Some(length_bound),
        ),
    };
    if property == Property::Krull {
        if let Some((g, h, u)) = noncommuting_atom(group) {
            let atom = is_atom(group, &u)?;
            v.details.insert(
                "noncommuting atom".into(),
                format!("{} (g = {}, h = {}, atom: {atom})", u.display(group), group.name(g), group.name(h)),
            );
        }
    }
    Ok(v)
}

/// Krull verdict: true exactly for abelian `G`; otherwise a root-closure
/// failure is exhibited.
pub fn krull_witness(group: &Group, length_bound: usize) -> Result<Verdict, SeqError> {
    root_closure_verdict(group, length_bound, Property::Krull)
}

pub fn root_closed(group: &Group, length_bound: usize) -> Result<Verdict, SeqError> {
    root_closure_verdict(group, length_bound, Property::RootClosed)
}

/// The support of the smallest divisor-closed submonoid containing `seqs`,
/// checked against every product-one sequence over it up to `bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub support: ElemSet,
    pub bound: usize,
    pub checked: usize,
    /// a product-one sequence over the support that divides no product of
    /// the inputs in `B(G)` (never expected)
    pub counterexample: Option<Sequence>,
}

pub fn divisor_closed_closure(
    group: &Group,
    seqs: &[Sequence],
    bound: usize,
) -> Result<ClosureReport, FactorError> {
    for s in seqs {
        if !is_product_one(group, s)? {
            return Err(FactorError::NotProductOne {
                what: format!("input `{}`", s.display(group)),
            });
        }
    }
    let support = seqs.iter().fold(ElemSet::EMPTY, |acc, s| acc.union(s.support()));
    let elems: Vec<usize> = support.iter().collect();
    let mut checked = 0;
    let mut counterexample = None;
    let mut stack: Vec<(Sequence, usize)> = vec![(Sequence::empty(group.order()), 0)];
    while let Some((s, from)) = stack.pop() {
        if !s.is_empty() && is_product_one(group, &s)? {
            checked += 1;
            // one input per term
            let product = s.terms().into_iter().fold(Sequence::empty(group.order()), |acc, g| {
                let b = seqs.iter().find(|b| b.exp(g) > 0).expect("term lies in some support");
                acc.concat(b)
            });
            if !divides_in_b(group, &s, &product)? {
                counterexample = Some(s.clone());
                break;
            }
        }
        if s.len() < bound {
            for k in (from..elems.len()).rev() {
                stack.push((s.with(elems[k]), k));
            }
        }
    }
    Ok(ClosureReport {
        support,
        bound,
        checked,
        counterexample,
    })
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
    fn seminormality_verdicts() {
        let d6 = g("D6");
        let v = seminormality(&d6, 4).unwrap();
        assert_eq!(v.holds, Holds::False);
        assert!(check_seminormality_witness(&d6, &s(&d6, "a,b^2")).is_ok());
        assert_eq!(seminormality(&g("D8"), 4).unwrap().holds, Holds::True);
        assert_eq!(seminormality(&g("C5"), 4).unwrap().holds, Holds::True);
    }

    #[test]
    fn krull_verdicts() {
        assert_eq!(krull_witness(&g("C6"), 4).unwrap().holds, Holds::True);
        let d6 = g("D6");
        let v = krull_witness(&d6, 4).unwrap();
        assert_eq!(v.holds, Holds::False);
        let q = g("Q8");
        let v = krull_witness(&q, 4).unwrap();
        assert_eq!(v.holds, Holds::False);
        assert!(v.details["noncommuting atom"].contains("atom: true"));
        assert_eq!(root_exponent(&d6, &s(&d6, "a,b^2")).unwrap(), Some(2));
    }

    #[test]
    fn property_p_small() {
        assert_eq!(property_p(&g("Q8"), None).unwrap().holds, Holds::True);
        assert_eq!(property_p(&g("D6"), None).unwrap().holds, Holds::True);
        assert_eq!(property_p(&g("C5"), None).unwrap().holds, Holds::True);
        assert_eq!(property_p(&g("C5"), Some(3)).unwrap().holds, Holds::UnknownUpToBound);
    }

    #[test]
    fn closure_examples() {
        let d6 = g("D6");
        let r = divisor_closed_closure(&d6, &[s(&d6, "b^2")], 4).unwrap();
        assert_eq!(r.support.names(&d6), vec!["b"]);
        let r = divisor_closed_closure(&d6, &[s(&d6, "a^3"), s(&d6, "b^2")], 5).unwrap();
        assert_eq!(r.support.names(&d6), vec!["a", "b"]);
        assert!(r.counterexample.is_none());
        assert!(r.checked > 3);
        let r = divisor_closed_closure(&d6, &[], 4).unwrap();
        assert!(r.support.is_empty());
        assert_eq!(r.checked, 0);
    }

    #[test]
    fn dihedral_18_fails_property_p() {
        let d = g("D18");
        let v = property_p(&d, Some(7)).unwrap();
        assert_eq!(v.holds, Holds::False);
        let f = check_property_p_failure(&d, &s(&d, "a^3,a8^2,b,a4b"), d.index_of("b").unwrap(), 3, d.index_of("a6b").unwrap()).unwrap();
        assert_eq!(f.lengths, vec![3]);
    }

    #[test]
    fn reflection_split_in_dihedral_18_still_factors_in_two() {
        let d = g("D18");
        let (a, b) = (d.index_of("a").unwrap(), d.index_of("b").unwrap());
        let ba = |j| d.mul(b, d.pow(a, j));
        let u = Sequence::from_terms(d.order(), &[b, b, ba(1), ba(1), ba(1), d.pow(a, 2), ba(5)]);
        assert!(is_atom(&d, &u).unwrap());
        let split = split_term(&u, d.pow(a, 2), ba(2), ba(4));
        assert_eq!(factorization_lengths(&d, &split, false).unwrap().lengths, vec![2, 3]);
        assert!(check_property_p_failure(&d, &u, d.pow(a, 2), ba(2), ba(4)).is_err());
        // a^2 = a . a turns the atom into an atom
        let split = split_term(&u, d.pow(a, 2), a, a);
        assert!(is_atom(&d, &split).unwrap());
    }
}
