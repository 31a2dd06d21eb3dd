//! Exhaustive comparisons against factorial-time oracles.

use std::collections::BTreeSet;

use prodone_core::factor::enumerate_atoms;
use prodone_core::{product_set, ElemSet, Group, Sequence};

/// All products of all orderings of `terms`.
fn permutation_products(group: &Group, terms: &mut [usize], k: usize, acc: usize, out: &mut ElemSet) {
    if k == terms.len() {
        out.insert(acc);
        return;
    }
    for i in k..terms.len() {
        terms.swap(k, i);
        permutation_products(group, terms, k + 1, group.mul(acc, terms[k]), out);
        terms.swap(k, i);
    }
}

fn pi_oracle(group: &Group, s: &Sequence) -> ElemSet {
    let mut out = ElemSet::EMPTY;
    permutation_products(group, &mut s.terms(), 0, group.identity(), &mut out);
    out
}

fn product_one_oracle(group: &Group, s: &Sequence) -> bool {
    pi_oracle(group, s).contains(group.identity())
}

/// Every multiset over `0..n` of length at most `max_len`.
fn multisets(n: usize, max_len: usize) -> Vec<Sequence> {
    let mut out = vec![Sequence::empty(n)];
    let mut frontier = vec![(Sequence::empty(n), 0)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (s, from) in frontier {
            for g in from..n {
                let t = s.with(g);
                out.push(t.clone());
                next.push((t, g));
            }
        }
        frontier = next;
    }
    out
}

/// Proper non-empty sub-multisets.
fn proper_subs(s: &Sequence) -> Vec<Sequence> {
    let exps = s.exps();
    let mut out = Vec::new();
    let mut cur = vec![0u32; exps.len()];
    loop {
        let mut i = 0;
        while i < exps.len() && cur[i] == exps[i] {
            cur[i] = 0;
            i += 1;
        }
        if i == exps.len() {
            break;
        }
        cur[i] += 1;
        let t = Sequence::from_exps(cur.clone());
        if t.len() != s.len() {
            out.push(t);
        }
    }
    out
}

fn groups_up_to(order: usize) -> Vec<Group> {
    ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C2xC2", "C2xC4", "C2xC2xC2", "D6", "D8", "Q8"]
        .iter()
        .map(|s| Group::parse(s).unwrap())
        .filter(|g| g.order() <= order)
        .collect()
}

#[test]
fn product_sets_match_all_orderings() {
    for g in groups_up_to(8) {
        for s in multisets(g.order(), 6) {
            assert_eq!(product_set(&g, &s).unwrap(), pi_oracle(&g, &s), "{}", s.display(&g));
        }
    }
}

#[test]
fn atoms_match_naive_enumeration() {
    for g in groups_up_to(6) {
        let naive: BTreeSet<Sequence> = multisets(g.order(), g.order())
            .into_iter()
            .filter(|s| !s.is_empty() && product_one_oracle(&g, s))
            .filter(|s| {
                !proper_subs(s).iter().any(|t| {
                    product_one_oracle(&g, t) && product_one_oracle(&g, &t.complement_in(s).unwrap())
                })
            })
            .collect();
        let got: BTreeSet<Sequence> = enumerate_atoms(&g, None).unwrap().atoms.into_iter().collect();
        assert_eq!(got, naive, "{}", g.order());
    }
}
