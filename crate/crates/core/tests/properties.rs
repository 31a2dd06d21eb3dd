use std::sync::OnceLock;

use proptest::prelude::*;

use prodone_core::class_semigroup::ClassSemigroup;
use prodone_core::factor::is_atom;
use prodone_core::seq::{is_product_one, is_product_one_free};
use prodone_core::{analyze, arith, product_set, Group, Sequence};

const SPECS: &[&str] = &["C4", "C6", "C2xC2", "C2xC4", "D6", "D8", "Q8", "D10", "D12", "C3xD6"];

fn groups() -> &'static [Group] {
    static GROUPS: OnceLock<Vec<Group>> = OnceLock::new();
    GROUPS.get_or_init(|| SPECS.iter().map(|s| Group::parse(s).unwrap()).collect())
}

fn seq_in(max_len: usize) -> impl Strategy<Value = (usize, Sequence)> {
    (0..groups().len()).prop_flat_map(move |i| {
        let n = groups()[i].order();
        prop::collection::vec(0..n, 0..=max_len).prop_map(move |t| (i, Sequence::from_terms(n, &t)))
    })
}

fn two_seqs(max_len: usize) -> impl Strategy<Value = (usize, Sequence, Sequence)> {
    (0..groups().len()).prop_flat_map(move |i| {
        let n = groups()[i].order();
        (
            prop::collection::vec(0..n, 0..=max_len),
            prop::collection::vec(0..n, 0..=max_len),
        )
            .prop_map(move |(a, b)| (i, Sequence::from_terms(n, &a), Sequence::from_terms(n, &b)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn products_lie_in_one_coset((i, s) in seq_in(8)) {
        let g = &groups()[i];
        let st = analyze(g);
        let pi = product_set(g, &s).unwrap();
        let p = pi.first().unwrap();
        for q in pi.iter() {
            prop_assert!(st.commutator.contains(g.mul(p, g.inv(q))));
        }
    }

    #[test]
    fn product_sets_multiply_into_concatenation((i, s, t) in two_seqs(5)) {
        let g = &groups()[i];
        let pst = product_set(g, &s.concat(&t)).unwrap();
        let ps = product_set(g, &s).unwrap();
        let pt = product_set(g, &t).unwrap();
        for x in ps.iter() {
            for y in pt.iter() {
                prop_assert!(pst.contains(g.mul(x, y)));
            }
        }
    }

    #[test]
    fn single_product_iff_commuting_support((i, s) in seq_in(7)) {
        let g = &groups()[i];
        let supp: Vec<usize> = s.support().iter().collect();
        let commuting = supp.iter().all(|&x| supp.iter().all(|&y| g.commutes(x, y)));
        prop_assert_eq!(product_set(g, &s).unwrap().len() == 1, commuting);
    }

    #[test]
    fn closing_off_a_sequence_gives_product_one((i, s) in seq_in(8)) {
        let g = &groups()[i];
        let closed = s.with(g.inv(s.ordered_product(g)));
        prop_assert!(is_product_one(g, &closed).unwrap());
    }

    #[test]
    fn inverse_of_a_product_completes_a_free_sequence_to_an_atom((i, s) in seq_in(6)) {
        let g = &groups()[i];
        prop_assume!(!s.is_empty() && is_product_one_free(g, &s).unwrap());
        for p in product_set(g, &s).unwrap().iter() {
            prop_assert!(is_atom(g, &s.with(g.inv(p))).unwrap());
        }
    }
}

const SEMIGROUP_SPECS: &[&str] = &["C4", "C2xC2", "D6", "D8", "Q8"];

fn semigroups() -> &'static [ClassSemigroup] {
    static CS: OnceLock<Vec<ClassSemigroup>> = OnceLock::new();
    CS.get_or_init(|| {
        SEMIGROUP_SPECS
            .iter()
            .map(|s| ClassSemigroup::build(&Group::parse(s).unwrap()).unwrap())
            .collect()
    })
}

fn small_davenport(cs: &ClassSemigroup) -> usize {
    arith::semigroup_davenport(&cs.op, cs.zero).unwrap().small
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Completing `f a_1 ... a_n` to product-one, a subfamily of at most
    /// `d(C)` of the `a_i` already does it.
    #[test]
    fn few_factors_suffice_to_stay_product_one(
        c in 0..SEMIGROUP_SPECS.len(),
        raw in prop::collection::vec(prop::collection::vec(any::<prop::sample::Index>(), 1..=3), 2..=7),
    ) {
        let cs = &semigroups()[c];
        let g = &cs.group;
        let n = g.order();
        let mut parts: Vec<Sequence> = raw
            .iter()
            .map(|p| Sequence::from_terms(n, &p.iter().map(|ix| ix.index(n)).collect::<Vec<_>>()))
            .collect();
        let total = parts.iter().fold(Sequence::empty(n), |acc, p| acc.concat(p));
        let last = parts.len() - 1;
        parts[last] = parts[last].with(g.inv(total.ordered_product(g)));
        let (f, a) = parts.split_first().unwrap();
        let d = small_davenport(cs);
        let found = (0u32..1 << a.len()).filter(|m| m.count_ones() as usize <= d).any(|m| {
            let prod = a
                .iter()
                .enumerate()
                .filter(|(k, _)| m >> k & 1 == 1)
                .fold(f.clone(), |acc, (_, x)| acc.concat(x));
            is_product_one(g, &prod).unwrap()
        });
        prop_assert!(found);
    }
}

fn all_sequences(n: usize, max_len: usize) -> Vec<Sequence> {
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

#[test]
fn equivalent_sequences_share_product_sets() {
    for cs in semigroups() {
        let g = &cs.group;
        for s in all_sequences(g.order(), 5) {
            assert_eq!(cs.pi_sets[cs.class_of(&s)], product_set(g, &s).unwrap());
        }
    }
}

#[test]
fn zero_class_is_product_one_over_the_center() {
    for cs in semigroups() {
        let g = &cs.group;
        let center = cs.structure.center.members;
        for s in all_sequences(g.order(), 5) {
            let central = s.support().is_subset(center) && is_product_one(g, &s).unwrap();
            assert_eq!(cs.class_of(&s) == cs.zero, central, "{}", s.display(g));
        }
    }
}

#[test]
fn singletons_are_pairwise_inequivalent() {
    for cs in semigroups() {
        let g = &cs.group;
        let mut classes: Vec<usize> = g.elements().map(|x| cs.class_of(&Sequence::from_terms(g.order(), &[x]))).collect();
        classes.sort_unstable();
        classes.dedup();
        assert_eq!(classes.len(), g.order());
    }
}

#[test]
fn accepting_idempotents_have_subgroup_product_sets() {
    for cs in semigroups() {
        let g = &cs.group;
        for &e in &cs.idempotents {
            if !cs.accept[e] {
                continue;
            }
            let p = cs.pi_sets[e];
            assert!(p.is_subset(cs.structure.commutator.members));
            assert!(p.contains(g.identity()));
            for x in p.iter() {
                assert!(p.contains(g.inv(x)));
                for y in p.iter() {
                    assert!(p.contains(g.mul(x, y)));
                }
            }
        }
    }
}

/// Groups whose commutator subgroup has order two.
fn small_derived() -> impl Iterator<Item = &'static ClassSemigroup> {
    semigroups().iter().filter(|cs| cs.structure.commutator.order() == 2)
}

#[test]
fn size_bound_when_derived_subgroup_has_order_two() {
    let mut seen = 0;
    for cs in small_derived() {
        let g = &cs.group;
        let bound = cs.structure.center.order()
            + g.elements()
                .filter(|&x| !cs.structure.is_central(x))
                .map(|x| g.elem_order(x))
                .product::<usize>();
        assert!(cs.size() <= bound);
        seen += 1;
    }
    assert_eq!(seen, 2);
}

#[test]
fn odd_powers_collapse_when_derived_subgroup_has_order_two() {
    for cs in small_derived() {
        let g = &cs.group;
        let n = g.order();
        for x in g.elements() {
            for k in (1..=2 * g.elem_order(x) + 1).step_by(2) {
                let xk = g.pow(x, k);
                if cs.structure.is_central(xk) {
                    continue;
                }
                let lhs = cs.class_of(&Sequence::power_of(n, x, k as u32));
                assert_eq!(lhs, cs.class_of(&Sequence::from_terms(n, &[xk])));
            }
        }
    }
}

#[test]
fn noncommuting_cyclic_subsemigroups_are_disjoint() {
    for cs in small_derived() {
        let g = &cs.group;
        let n = g.order();
        for x in g.elements() {
            for y in g.elements() {
                if g.commutes(x, y) {
                    continue;
                }
                let cx = cs.class_of(&Sequence::from_terms(n, &[x]));
                let cy = cs.class_of(&Sequence::from_terms(n, &[y]));
                let sx = cs.cyclic_subsemigroup(cx);
                let sy = cs.cyclic_subsemigroup(cy);
                assert!(sx.iter().all(|c| !sy.contains(c)));
                for &u in &sx {
                    for &v in &sy {
                        assert!(cs.quotient_copy.contains(&cs.add(u, v)));
                    }
                }
            }
        }
    }
}
