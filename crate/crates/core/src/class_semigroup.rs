//! The class semigroup of `B(G)` in `F(G)`: sequences modulo
//! `S ~ S'  <=>  for all T: (S.T in B(G)) <=> (S'.T in B(G))`.
//!
//! Construction:
//!
//! 1. Central terms are collapsed into one `Z(G)`-valued coordinate
//!    (`z.h ~ zh` for central `z`, and `B(Z(G))` is the class of the empty
//!    sequence).
//! 2. Each non-central `g` gets a fold `(t_g, p_g)`: `g^[t] ~ g^[t+p]`. The
//!    period is `ord(g)` (equal classes have equal product sets, which forces
//!    `ord(g) | p`; conversely `g^[t] ~ g^[t+ord g]` for large `t`). The
//!    threshold is found by building the automaton with slack thresholds and
//!    reading off the first `k` with `g^[k] ~ g^[k+p]`.
//! 3. On the folded grid the coarsest congruence refining "same product set"
//!    is computed by Moore-style partition refinement. Equivalent sequences
//!    have equal product sets, so this is the syntactic congruence.
//! 4. The result is validated against direct product-set computations on
//!    exhaustive short sequences and seeded random long ones, against a
//!    rebuild with larger thresholds, and against its structural invariants.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elemset::ElemSet;
use crate::group::{analyze, Group, GroupStructure};
use crate::seq::{SeqError, Sequence, SubLattice, DEFAULT_LATTICE_CAP};

pub const DEFAULT_SEED: u64 = 0x05ee_d0fc_1a55;
pub const DEFAULT_RANDOM_SAMPLES: usize = 1000;
pub const DEFAULT_MAX_RETRIES: usize = 3;
/// Exhaustive recognition checks stop after this many sequences.
pub const EXHAUSTIVE_BUDGET: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("folded grid has {states} states, above the budget of {cap}")]
    BudgetExceeded { states: u128, cap: usize },
    #[error("no fold found for element {element} within context cap {cap}")]
    FoldNotFound { element: String, cap: usize },
    #[error("class semigroup failed validation after {retries} retries: {reason}")]
    ValidationFailure { reason: String, retries: usize },
}

/// Per-element fold `e -> e` if `e < t`, else `t + (e - t) mod p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldParams {
    pub threshold: Vec<usize>,
    pub period: Vec<usize>,
}

impl FoldParams {
    pub fn fold(&self, g: usize, e: u64) -> u64 {
        let t = self.threshold[g] as u64;
        let p = self.period[g] as u64;
        if e < t {
            e
        } else {
            t + (e - t) % p
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Largest threshold tried per element (default: max element order + 2).
    pub context_cap: Option<usize>,
    /// Exhaustive recognition length (default: `d(G) + 4`).
    pub check_length: Option<usize>,
    pub random_samples: usize,
    pub seed: u64,
    pub max_retries: usize,
    pub state_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            context_cap: None,
            check_length: None,
            random_samples: DEFAULT_RANDOM_SAMPLES,
            seed: DEFAULT_SEED,
            max_retries: DEFAULT_MAX_RETRIES,
            state_cap: DEFAULT_LATTICE_CAP,
        }
    }
}

/// What the validation step actually checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub check_length: usize,
    pub exhaustive_samples: usize,
    /// `false` when the exhaustive pass hit [`EXHAUSTIVE_BUDGET`].
    pub exhaustive_complete: bool,
    pub random_samples: usize,
    pub random_max_length: usize,
    pub seed: u64,
    pub retries: usize,
    pub threshold_stable: bool,
}

/// The folded grid: a `Z(G)` coordinate and one folded exponent per
/// non-central element. State index is `z + |Z| * (mixed radix digits)`.
#[derive(Debug, Clone)]
struct Grid {
    order: usize,
    center: Vec<usize>,
    zpos: Vec<usize>,
    nc: Vec<usize>,
    ncpos: Vec<usize>,
    threshold: Vec<usize>,
    radix: Vec<usize>,
    stride: Vec<usize>,
    size: usize,
}

const NONE: usize = usize::MAX;

impl Grid {
    fn new(
        group: &Group,
        st: &GroupStructure,
        thresholds: &[usize],
        cap: usize,
    ) -> Result<Grid, ClassError> {
        let n = group.order();
        let center: Vec<usize> = st.center.members.iter().collect();
        let mut zpos = vec![NONE; n];
        for (i, &z) in center.iter().enumerate() {
            zpos[z] = i;
        }
        let nc: Vec<usize> = group.elements().filter(|&g| zpos[g] == NONE).collect();
        let mut ncpos = vec![NONE; n];
        for (i, &g) in nc.iter().enumerate() {
            ncpos[g] = i;
        }
        let threshold: Vec<usize> = nc.iter().map(|&g| thresholds[g]).collect();
        let radix: Vec<usize> = nc
            .iter()
            .zip(&threshold)
            .map(|(&g, &t)| t + group.elem_order(g))
            .collect();
        let states: u128 =
            center.len() as u128 * radix.iter().map(|&r| r as u128).product::<u128>();
        if states > cap as u128 {
            return Err(ClassError::BudgetExceeded { states, cap });
        }
        let mut stride = Vec::with_capacity(radix.len());
        let mut acc = center.len();
        for &r in &radix {
            stride.push(acc);
            acc *= r;
        }
        Ok(Grid {
            order: n,
            center,
            zpos,
            nc,
            ncpos,
            threshold,
            radix,
            stride,
            size: acc,
        })
    }

    fn digit(&self, s: usize, k: usize) -> usize {
        s / self.stride[k] % self.radix[k]
    }

    fn z_of(&self, s: usize) -> usize {
        self.center[s % self.center.len()]
    }

    fn step(&self, group: &Group, s: usize, g: usize) -> usize {
        let k = self.ncpos[g];
        if k == NONE {
            let nz = self.center.len();
            let zi = s % nz;
            let z2 = self.zpos[group.mul(self.center[zi], g)];
            s - zi + z2
        } else {
            let d = self.digit(s, k);
            let d2 = if d + 1 == self.radix[k] {
                self.threshold[k]
            } else {
                d + 1
            };
            s - d * self.stride[k] + d2 * self.stride[k]
        }
    }

    /// State of an arbitrary sequence.
    fn state_of(&self, group: &Group, seq: &Sequence) -> usize {
        let mut z = group.identity();
        let mut s = 0;
        for (g, &e) in seq.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let k = self.ncpos[g];
            if k == NONE {
                z = group.mul(z, group.pow(g, e as usize % group.elem_order(g)));
            } else {
                let t = self.threshold[k];
                let p = self.radix[k] - t;
                let e = e as usize;
                let d = if e < t { e } else { t + (e - t) % p };
                s += d * self.stride[k];
            }
        }
        s + self.zpos[z]
    }

    /// Canonical representative sequence of a state.
    fn sequence_of(&self, group: &Group, s: usize) -> Sequence {
        let mut out = Sequence::empty(self.order);
        let z = self.z_of(s);
        if z != group.identity() {
            out.exps_mut()[z] = 1;
        }
        for (k, &g) in self.nc.iter().enumerate() {
            out.exps_mut()[g] = self.digit(s, k) as u32;
        }
        out
    }

    /// Product sets of every state, from one lattice over the largest
    /// folded non-central sequence.
    fn product_sets(&self, group: &Group) -> Result<Vec<ElemSet>, ClassError> {
        let mut top = Sequence::empty(self.order);
        for (k, &g) in self.nc.iter().enumerate() {
            top.exps_mut()[g] = self.radix[k] as u32 - 1;
        }
        let lattice = SubLattice::new(group, &top, usize::MAX)?;
        let nz = self.center.len();
        Ok((0..self.size)
            .map(|s| lattice.pi(s / nz).mul_left(group, self.center[s % nz]))
            .collect())
    }
}

/// Coarsest congruence on the grid refining equality of product sets.
/// Returns the class id of every state and the number of classes.
fn refine(group: &Group, grid: &Grid, pis: &[ElemSet]) -> (Vec<u32>, usize) {
    let gens: Vec<usize> = group.elements().filter(|&g| g != group.identity()).collect();
    let trans: Vec<u32> = (0..grid.size)
        .flat_map(|s| gens.iter().map(move |&g| grid.step(group, s, g) as u32))
        .collect();
    let mut ids: FxHashMap<ElemSet, u32> = FxHashMap::default();
    let mut class: Vec<u32> = pis
        .iter()
        .map(|p| {
            let next = ids.len() as u32;
            *ids.entry(*p).or_insert(next)
        })
        .collect();
    let mut count = ids.len();
    let m = gens.len();
    loop {
        let mut keys: FxHashMap<Vec<u32>, u32> = FxHashMap::default();
        let mut next = vec![0u32; grid.size];
        let mut key = Vec::with_capacity(m + 1);
        for s in 0..grid.size {
            key.clear();
            key.push(class[s]);
            key.extend(trans[s * m..(s + 1) * m].iter().map(|&t| class[t as usize]));
            let fresh = keys.len() as u32;
            next[s] = *keys.entry(key.clone()).or_insert(fresh);
        }
        let new_count = keys.len();
        class = next;
        if new_count == count {
            return (class, count);
        }
        count = new_count;
    }
}

/// Class semigroup as an explicit finite commutative monoid. Classes are
/// numbered by their shortlex-least representative, so class `0` is the
/// class of the empty sequence.
#[derive(Debug, Clone)]
pub struct ClassSemigroup {
    pub group: Group,
    pub structure: GroupStructure,
    pub folds: FoldParams,
    pub reps: Vec<Sequence>,
    /// `trans[x][g]` is the class of `rep_x . g`.
    pub trans: Vec<Vec<usize>>,
    pub op: Vec<Vec<usize>>,
    pub zero: usize,
    pub accept: Vec<bool>,
    pub pi_sets: Vec<ElemSet>,
    pub idempotents: Vec<usize>,
    pub units: Vec<usize>,
    pub quotient_copy: Vec<usize>,
    pub validation: Validation,
    grid: Grid,
    state_class: Vec<u32>,
}

/// Idempotents with their Rees order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdempotentStructure {
    pub idempotents: Vec<usize>,
    /// pairs `(e, f)` with `e <= f`, i.e. `e + f = e`, `e != f`
    pub rees_order: Vec<(usize, usize)>,
    pub smallest: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupReport {
    pub units: Vec<usize>,
    /// `unit_map[i]` is the class of the `i`-th central element.
    pub unit_map: Vec<(usize, usize)>,
    pub quotient_copy: Vec<usize>,
    /// `quotient_map[c]` is the class carrying coset `c` of `G'`.
    pub quotient_map: Vec<usize>,
    /// `coset_of_class[x]` is the coset of `G'` containing `pi(x)`.
    pub coset_of_class: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub is_clifford: bool,
    pub regular: Vec<usize>,
    pub non_regular: Vec<usize>,
}

impl ClassSemigroup {
    pub fn build(group: &Group) -> Result<ClassSemigroup, ClassError> {
        Self::build_with(group, &BuildOptions::default())
    }

    pub fn build_with(group: &Group, opts: &BuildOptions) -> Result<ClassSemigroup, ClassError> {
        let st = analyze(group);
        let ctx_cap = opts
            .context_cap
            .unwrap_or_else(|| group.elements().map(|g| group.elem_order(g)).max().unwrap_or(1) + 2);
        let free = crate::factor::longest_free_sequence(group, group.all())?;
        let check_length = opts.check_length.unwrap_or(free.len() + 4);
        let mut folds = discover_folds_with(group, &st, ctx_cap, opts.state_cap)?;
        let mut last_reason = String::new();
        for retry in 0..=opts.max_retries {
            let built = Self::assemble(group, &st, folds.clone(), opts.state_cap)?;
            match built.validate(opts, check_length, retry) {
                Ok(mut c) => {
                    c.validation.retries = retry;
                    return Ok(c);
                }
                Err(reason) => last_reason = reason,
            }
            for g in group.elements() {
                if !st.is_central(g) {
                    folds.threshold[g] += 1;
                }
            }
        }
        Err(ClassError::ValidationFailure {
            reason: last_reason,
            retries: opts.max_retries,
        })
    }

    fn assemble(
        group: &Group,
        st: &GroupStructure,
        folds: FoldParams,
        cap: usize,
    ) -> Result<ClassSemigroup, ClassError> {
        let grid = Grid::new(group, st, &folds.threshold, cap)?;
        let pis = grid.product_sets(group)?;
        let (raw_class, count) = refine(group, &grid, &pis);

        // shortlex-least representative per class
        let mut best: Vec<Option<(usize, Vec<usize>, usize)>> = vec![None; count];
        for s in 0..grid.size {
            let seq = grid.sequence_of(group, s);
            let cand = (seq.len(), seq.terms(), s);
            let slot = &mut best[raw_class[s] as usize];
            if slot.as_ref().is_none_or(|b| (cand.0, &cand.1) < (b.0, &b.1)) {
                *slot = Some(cand);
            }
        }
        let mut order: Vec<(usize, Vec<usize>, usize, usize)> = best
            .into_iter()
            .enumerate()
            .map(|(c, b)| {
                let (len, terms, s) = b.expect("every class has a state");
                (len, terms, s, c)
            })
            .collect();
        order.sort();
        let mut renumber = vec![0u32; count];
        for (i, o) in order.iter().enumerate() {
            renumber[o.3] = i as u32;
        }
        let state_class: Vec<u32> = raw_class.iter().map(|&c| renumber[c as usize]).collect();
        let rep_states: Vec<usize> = order.iter().map(|o| o.2).collect();
        let reps: Vec<Sequence> = rep_states.iter().map(|&s| grid.sequence_of(group, s)).collect();
        let pi_sets: Vec<ElemSet> = rep_states.iter().map(|&s| pis[s]).collect();
        let accept: Vec<bool> = pi_sets.iter().map(|p| p.contains(group.identity())).collect();

        let cls = |seq: &Sequence| state_class[grid.state_of(group, seq)] as usize;
        let trans: Vec<Vec<usize>> = reps
            .iter()
            .map(|r| group.elements().map(|g| cls(&r.with(g))).collect())
            .collect();
        let op: Vec<Vec<usize>> = reps
            .iter()
            .map(|x| reps.iter().map(|y| cls(&x.concat(y))).collect())
            .collect();
        let zero = cls(&Sequence::empty(group.order()));

        let mut c = ClassSemigroup {
            group: group.clone(),
            structure: st.clone(),
            folds,
            reps,
            trans,
            op,
            zero,
            accept,
            pi_sets,
            idempotents: Vec::new(),
            units: Vec::new(),
            quotient_copy: Vec::new(),
            validation: Validation {
                check_length: 0,
                exhaustive_samples: 0,
                exhaustive_complete: false,
                random_samples: 0,
                random_max_length: 0,
                seed: 0,
                retries: 0,
                threshold_stable: false,
            },
            grid,
            state_class,
        };
        c.idempotents = (0..c.size()).filter(|&x| c.op[x][x] == x).collect();
        c.units = (0..c.size())
            .filter(|&x| (0..c.size()).any(|y| c.op[x][y] == c.zero))
            .collect();
        let smallest = c.smallest_idempotent();
        let star = c.reps[smallest].clone();
        let copy: BTreeSet<usize> = group.elements().map(|g| c.class_of(&star.with(g))).collect();
        c.quotient_copy = copy.into_iter().collect();
        Ok(c)
    }

    pub fn size(&self) -> usize {
        self.reps.len()
    }

    /// Class of an arbitrary sequence.
    pub fn class_of(&self, seq: &Sequence) -> usize {
        self.state_class[self.grid.state_of(&self.group, seq)] as usize
    }

    pub fn are_equivalent(&self, s: &Sequence, t: &Sequence) -> bool {
        self.class_of(s) == self.class_of(t)
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        self.op[x][y]
    }

    /// `k * x` for `k >= 1`.
    pub fn multiple(&self, x: usize, k: usize) -> usize {
        let mut acc = x;
        for _ in 1..k {
            acc = self.op[acc][x];
        }
        acc
    }

    /// The cyclic subsemigroup `{x, 2x, 3x, ...}` in order of appearance.
    pub fn cyclic_subsemigroup(&self, x: usize) -> Vec<usize> {
        let mut seen = vec![false; self.size()];
        let mut out = Vec::new();
        let mut cur = x;
        while !seen[cur] {
            seen[cur] = true;
            out.push(cur);
            cur = self.op[cur][x];
        }
        out
    }

    /// Index and period of `x`: `(m + r) x = m x` with `m`, `r` minimal.
    pub fn index_and_period(&self, x: usize) -> (usize, usize) {
        let mut pos = vec![usize::MAX; self.size()];
        let mut cur = x;
        let mut k = 1;
        while pos[cur] == usize::MAX {
            pos[cur] = k;
            cur = self.op[cur][x];
            k += 1;
        }
        (pos[cur], k - pos[cur])
    }

    pub fn smallest_idempotent(&self) -> usize {
        self.idempotents.iter().fold(self.zero, |acc, &e| self.op[acc][e])
    }

    pub fn idempotent_structure(&self) -> IdempotentStructure {
        let mut rees_order = Vec::new();
        for &e in &self.idempotents {
            for &f in &self.idempotents {
                if e != f && self.op[e][f] == e {
                    rees_order.push((e, f));
                }
            }
        }
        IdempotentStructure {
            idempotents: self.idempotents.clone(),
            rees_order,
            smallest: self.smallest_idempotent(),
        }
    }

    /// Units with `g -> [g]` on `Z(G)`, the copy of `G/G'` and the
    /// epimorphism onto `G/G'`. Each map is checked to be an isomorphism
    /// (respectively a surjective homomorphism).
    pub fn unit_and_quotient_subgroups(&self) -> Result<SubgroupReport, String> {
        let g = &self.group;
        let st = &self.structure;
        let n = g.order();
        let cls_of = |x: usize| self.class_of(&Sequence::power_of(n, x, 1));

        let unit_map: Vec<(usize, usize)> = st.center.members.iter().map(|z| (z, cls_of(z))).collect();
        let images: BTreeSet<usize> = unit_map.iter().map(|&(_, c)| c).collect();
        if images.len() != unit_map.len() || images.iter().copied().collect::<Vec<_>>() != self.units {
            return Err(format!(
                "units {:?} are not the bijective image of the center ({:?})",
                self.units, unit_map
            ));
        }
        for &(z1, c1) in &unit_map {
            for &(z2, c2) in &unit_map {
                if self.op[c1][c2] != cls_of(g.mul(z1, z2)) {
                    return Err("center -> units is not a homomorphism".into());
                }
            }
        }

        let quot = &st.abelianization;
        let star = self.reps[self.smallest_idempotent()].clone();
        let mut quotient_map = vec![usize::MAX; quot.order()];
        for x in g.elements() {
            let c = self.class_of(&star.with(x));
            let coset = st.projection[x];
            if quotient_map[coset] == usize::MAX {
                quotient_map[coset] = c;
            } else if quotient_map[coset] != c {
                return Err(format!("quotient copy is not constant on the coset of {}", g.name(x)));
            }
        }
        let distinct: BTreeSet<usize> = quotient_map.iter().copied().collect();
        if distinct.len() != quot.order() {
            return Err("quotient copy is not injective on cosets".into());
        }
        for a in quot.elements() {
            for b in quot.elements() {
                if self.op[quotient_map[a]][quotient_map[b]] != quotient_map[quot.mul(a, b)] {
                    return Err("quotient copy is not a homomorphism".into());
                }
            }
        }

        let mut coset_of_class = Vec::with_capacity(self.size());
        for (x, p) in self.pi_sets.iter().enumerate() {
            let cosets: BTreeSet<usize> = p.iter().map(|h| st.projection[h]).collect();
            if cosets.len() != 1 {
                return Err(format!("product set of class {x} meets several cosets"));
            }
            coset_of_class.push(*cosets.iter().next().unwrap());
        }
        for x in 0..self.size() {
            for y in 0..self.size() {
                if coset_of_class[self.op[x][y]] != quot.mul(coset_of_class[x], coset_of_class[y]) {
                    return Err("class -> coset map is not a homomorphism".into());
                }
            }
        }
        let onto: BTreeSet<usize> = coset_of_class.iter().copied().collect();
        if onto.len() != quot.order() {
            return Err("class -> coset map is not surjective".into());
        }

        Ok(SubgroupReport {
            units: self.units.clone(),
            unit_map,
            quotient_copy: self.quotient_copy.clone(),
            quotient_map,
            coset_of_class,
        })
    }

    /// `x` is regular iff some idempotent `e` has `x + e = x` and `x + y = e`
    /// for some `y`.
    pub fn is_regular(&self, x: usize) -> bool {
        self.idempotents
            .iter()
            .any(|&e| self.op[x][e] == x && (0..self.size()).any(|y| self.op[x][y] == e))
    }

    pub fn regularity_report(&self) -> RegularityReport {
        let (regular, non_regular): (Vec<usize>, Vec<usize>) =
            (0..self.size()).partition(|&x| self.is_regular(x));
        RegularityReport {
            is_clifford: non_regular.is_empty(),
            regular,
            non_regular,
        }
    }

    /// For `|G'| = 2`: every class with a one-point product set `{g}`
    /// generates a cyclic group of order `ord(g)`. Returns the offending
    /// class otherwise.
    pub fn check_singleton_cyclic(&self) -> Result<(), usize> {
        for (x, p) in self.pi_sets.iter().enumerate() {
            if p.len() == 1 {
                let g = p.first().unwrap();
                let (index, period) = self.index_and_period(x);
                if index != 1 || period != self.group.elem_order(g) {
                    return Err(x);
                }
            }
        }
        Ok(())
    }

    /// Structural invariants of a finished class semigroup.
    pub fn check_structure(&self) -> Result<(), String> {
        let n = self.size();
        for x in 0..n {
            if self.op[self.zero][x] != x {
                return Err(format!("empty class is not neutral on class {x}"));
            }
            for y in 0..n {
                if self.op[x][y] != self.op[y][x] {
                    return Err(format!("operation not commutative on ({x}, {y})"));
                }
                for z in 0..n {
                    if self.op[self.op[x][y]][z] != self.op[x][self.op[y][z]] {
                        return Err(format!("operation not associative on ({x}, {y}, {z})"));
                    }
                }
            }
            if self.accept[x] != self.pi_sets[x].contains(self.group.identity()) {
                return Err(format!("acceptance of class {x} disagrees with its product set"));
            }
        }
        let singles: BTreeSet<usize> = self
            .group
            .elements()
            .map(|g| self.class_of(&Sequence::power_of(self.group.order(), g, 1)))
            .collect();
        if singles.len() != self.group.order() {
            return Err("single-term sequences do not give distinct classes".into());
        }
        let derived = self.structure.commutator.members;
        if self.pi_sets[self.smallest_idempotent()] != derived {
            return Err("smallest idempotent does not have product set G'".into());
        }
        for &e in &self.idempotents {
            if self.accept[e] {
                let p = self.pi_sets[e];
                let closed = p.iter().all(|a| p.iter().all(|b| p.contains(self.group.mul(a, b))));
                if !closed || !p.is_subset(derived) {
                    return Err(format!("idempotent class {e} has a product set that is not a subgroup of G'"));
                }
            }
        }
        self.unit_and_quotient_subgroups()?;
        Ok(())
    }

    fn validate(mut self, opts: &BuildOptions, check_length: usize, retry: usize) -> Result<Self, String> {
        self.check_structure()?;
        let group = self.group.clone();

        // exhaustive recognition
        let mut samples = 0usize;
        let mut complete = true;
        let mut failure: Option<String> = None;
        let mut stack: Vec<(Sequence, usize, usize)> = vec![(Sequence::empty(group.order()), 0, self.zero)];
        while let Some((seq, from, cls)) = stack.pop() {
            if samples >= EXHAUSTIVE_BUDGET {
                complete = false;
                break;
            }
            samples += 1;
            let direct = crate::seq::is_product_one(&group, &seq).map_err(|e| e.to_string())?;
            if direct != self.accept[cls] {
                failure = Some(format!("recognition mismatch on {}", seq.display(&group)));
                break;
            }
            if seq.len() < check_length {
                for g in (from..group.order()).rev() {
                    stack.push((seq.with(g), g, self.trans[cls][g]));
                }
            }
        }
        if let Some(f) = failure {
            return Err(f);
        }

        // random longer sequences
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let max_len = 2 * check_length.max(1);
        for _ in 0..opts.random_samples {
            let len = rng.gen_range(check_length + 1..=max_len);
            let mut seq = Sequence::empty(group.order());
            for _ in 0..len {
                seq.exps_mut()[rng.gen_range(0..group.order())] += 1;
            }
            let direct = crate::seq::is_product_one(&group, &seq).map_err(|e| e.to_string())?;
            if direct != self.accept[self.class_of(&seq)] {
                return Err(format!("recognition mismatch on {}", seq.display(&group)));
            }
        }

        // thresholds one larger must give the same semigroup
        let mut bigger = self.folds.clone();
        for g in group.elements() {
            if !self.structure.is_central(g) {
                bigger.threshold[g] += 1;
            }
        }
        let other = Self::assemble(&group, &self.structure, bigger, opts.state_cap).map_err(|e| e.to_string())?;
        if other.size() != self.size() {
            return Err(format!(
                "larger thresholds give {} classes instead of {}",
                other.size(),
                self.size()
            ));
        }
        let map: Vec<usize> = self.reps.iter().map(|r| other.class_of(r)).collect();
        for x in 0..self.size() {
            for y in 0..self.size() {
                if map[self.op[x][y]] != other.op[map[x]][map[y]] {
                    return Err("larger thresholds give a different operation table".into());
                }
            }
        }

        self.validation = Validation {
            check_length,
            exhaustive_samples: samples,
            exhaustive_complete: complete,
            random_samples: opts.random_samples,
            random_max_length: max_len,
            seed: opts.seed,
            retries: retry,
            threshold_stable: true,
        };
        Ok(self)
    }
}

/// Fold thresholds and periods for every element of `G`.
pub fn discover_folds(group: &Group, context_cap: usize) -> Result<FoldParams, ClassError> {
    discover_folds_with(group, &analyze(group), context_cap, DEFAULT_LATTICE_CAP)
}

fn discover_folds_with(
    group: &Group,
    st: &GroupStructure,
    context_cap: usize,
    state_cap: usize,
) -> Result<FoldParams, ClassError> {
    let n = group.order();
    let period: Vec<usize> = group.elements().map(|g| group.elem_order(g)).collect();
    let mut slack: Vec<usize> = group
        .elements()
        .map(|g| usize::from(!st.is_central(g)))
        .collect();
    loop {
        let grid = Grid::new(group, st, &slack, state_cap)?;
        let pis = grid.product_sets(group)?;
        let (class, _) = refine(group, &grid, &pis);
        let mut threshold = vec![0usize; n];
        let mut bumped = false;
        for g in group.elements().filter(|&g| !st.is_central(g)) {
            let cls = |k: usize| class[grid.state_of(group, &Sequence::power_of(n, g, k as u32))];
            match (0..slack[g]).find(|&k| cls(k) == cls(k + period[g])) {
                Some(k) => threshold[g] = k,
                None => {
                    slack[g] += 1;
                    bumped = true;
                    if slack[g] > context_cap {
                        return Err(ClassError::FoldNotFound {
                            element: group.name(g).to_string(),
                            cap: context_cap,
                        });
                    }
                }
            }
        }
        if !bumped {
            return Ok(FoldParams { threshold, period });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(g: &Group, lit: &str) -> Sequence {
        Sequence::parse(g, lit).unwrap()
    }

    #[test]
    fn folds_of_small_groups() {
        let q = Group::parse("Q8").unwrap();
        let f = discover_folds(&q, 6).unwrap();
        let i = q.index_of("I").unwrap();
        assert_eq!((f.threshold[i], f.period[i]), (1, 4));
        assert_eq!((f.threshold[0], f.period[0]), (0, 1));
        let d6 = Group::parse("D6").unwrap();
        let f = discover_folds(&d6, 5).unwrap();
        let b = d6.index_of("b").unwrap();
        assert_eq!((f.threshold[b], f.period[b]), (2, 2));
    }

    #[test]
    fn trivial_and_cyclic() {
        let c1 = Group::parse("C1").unwrap();
        let c = ClassSemigroup::build(&c1).unwrap();
        assert_eq!(c.size(), 1);
        assert!(c.regularity_report().is_clifford);
        let c4 = Group::parse("C4").unwrap();
        let c = ClassSemigroup::build(&c4).unwrap();
        assert_eq!(c.size(), 4);
        assert_eq!(c.units.len(), 4);
    }

    #[test]
    fn dihedral_six_spot_checks() {
        let d6 = Group::parse("D6").unwrap();
        let c = ClassSemigroup::build(&d6).unwrap();
        assert_eq!(c.size(), 26);
        assert!(c.are_equivalent(&s(&d6, "b^2"), &s(&d6, "b^4")));
        assert!(!c.are_equivalent(&s(&d6, "b"), &s(&d6, "b^3")));
        assert_eq!(c.class_of(&Sequence::empty(6)), 0);
        let ids = c.idempotent_structure();
        assert_eq!(ids.idempotents.len(), 6);
        assert_eq!(ids.smallest, c.class_of(&s(&d6, "a^2,b^2")));
        assert_eq!(c.regularity_report().non_regular.len(), 14);
    }
}
