//! Finite groups given by Cayley tables.
//!
//! Elements are dense indices `0..n` with `0` the identity. Every other
//! module speaks indices; names are only used for parsing and display.

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::elemset::{ElemSet, MAX_ORDER};

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("cannot parse group spec `{spec}`: {reason}")]
    Parse { spec: String, reason: String },
    #[error("table is not a group: {0}")]
    Invalid(String),
    #[error("group order {0} exceeds the supported maximum of {MAX_ORDER}")]
    TooLarge(usize),
    #[error("cannot read group file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed group file {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

/// A finite group of order at most 64, stored as a validated Cayley table.
#[derive(Clone, PartialEq, Eq)]
pub struct Group {
    order: usize,
    table: Vec<u8>,
    inv: Vec<u8>,
    elem_order: Vec<usize>,
    names: Vec<String>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("order", &self.order)
            .field("names", &self.names)
            .finish()
    }
}

#[derive(Deserialize)]
struct GroupFile {
    order: usize,
    table: Vec<Vec<usize>>,
    #[serde(default)]
    names: Option<Vec<String>>,
}

impl Group {
    /// Builds a group from a row-major multiplication table.
    ///
    /// The table must have identity at index 0, be a Latin square and be
    /// associative; associativity is checked on all `n^3` triples.
    pub fn from_table(table: Vec<Vec<usize>>, names: Vec<String>) -> Result<Group, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::Invalid("empty table".into()));
        }
        if n > MAX_ORDER {
            return Err(GroupError::TooLarge(n));
        }
        if names.len() != n {
            return Err(GroupError::Invalid(format!(
                "{} names given for a table of order {n}",
                names.len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.contains('^') || name.trim() != name {
                return Err(GroupError::Invalid(format!("bad element name {name:?}")));
            }
            if names[..i].contains(name) {
                return Err(GroupError::Invalid(format!("duplicate element name {name:?}")));
            }
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::Invalid(format!("row {i} has length {}", row.len())));
            }
            let mut seen = ElemSet::EMPTY;
            for &x in row {
                if x >= n {
                    return Err(GroupError::Invalid(format!("entry {x} out of range in row {i}")));
                }
                if seen.contains(x) {
                    return Err(GroupError::Invalid(format!("row {i} is not a permutation")));
                }
                seen.insert(x);
                flat.push(x as u8);
            }
        }
        for j in 0..n {
            let col: ElemSet = (0..n).map(|i| flat[i * n + j] as usize).collect();
            if col.len() != n {
                return Err(GroupError::Invalid(format!("column {j} is not a permutation")));
            }
        }
        for x in 0..n {
            if flat[x] as usize != x || flat[x * n] as usize != x {
                return Err(GroupError::Invalid("index 0 is not a two-sided identity".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = flat[a * n + b] as usize;
                for c in 0..n {
                    let bc = flat[b * n + c] as usize;
                    if flat[ab * n + c] != flat[a * n + bc] {
                        return Err(GroupError::Invalid(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let mut inv = vec![0u8; n];
        for a in 0..n {
            let b = (0..n).find(|&b| flat[a * n + b] == 0).expect("Latin square row");
            if flat[b * n + a] != 0 {
                return Err(GroupError::Invalid(format!("element {a} has no two-sided inverse")));
            }
            inv[a] = b as u8;
        }
        let mut g = Group {
            order: n,
            table: flat,
            inv,
            elem_order: vec![0; n],
            names,
        };
        g.elem_order = (0..n)
            .map(|x| {
                let mut k = 1;
                let mut p = x;
                while p != 0 {
                    p = g.mul(p, x);
                    k += 1;
                }
                k
            })
            .collect();
        Ok(g)
    }

    /// Cyclic group `C_n` with generator `g`; elements `1, g, g2, ..`.
    pub fn cyclic(n: usize) -> Result<Group, GroupError> {
        if n == 0 {
            return Err(GroupError::Invalid("cyclic group of order 0".into()));
        }
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let names = (0..n)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "g".to_string(),
                _ => format!("g{i}"),
            })
            .collect();
        Group::from_table(table, names)
    }

    /// Dihedral group of order `m = 2k` with `a^k = b^2 = 1` and `ba = a^{-1}b`.
    ///
    /// Index `i` is `a^i` and index `k + i` is `a^i b`.
    pub fn dihedral(m: usize) -> Result<Group, GroupError> {
        if m < 2 || m % 2 != 0 {
            return Err(GroupError::Invalid(format!(
                "dihedral order must be even and at least 2, got {m}"
            )));
        }
        let k = m / 2;
        let idx = |i: usize, s: usize| s * k + i;
        let mut table = vec![vec![0; m]; m];
        for s in 0..2 {
            for i in 0..k {
                for t in 0..2 {
                    for j in 0..k {
                        // a^i b^s a^j b^t = a^{i + (-1)^s j} b^{s+t}
                        let e = if s == 0 { (i + j) % k } else { (i + k - j) % k };
                        table[idx(i, s)][idx(j, t)] = idx(e, (s + t) % 2);
                    }
                }
            }
        }
        let power = |i: usize| match i {
            0 => String::new(),
            1 => "a".to_string(),
            _ => format!("a{i}"),
        };
        let mut names = Vec::with_capacity(m);
        for i in 0..k {
            names.push(if i == 0 { "1".to_string() } else { power(i) });
        }
        for i in 0..k {
            names.push(format!("{}b", power(i)));
        }
        Group::from_table(table, names)
    }

    /// Quaternion group with elements `E, I, J, K, -E, -I, -J, -K` in that order.
    pub fn quaternion() -> Group {
        // unit products: (result unit, sign flip) for units 1, i, j, k
        const UNIT: [[(usize, bool); 4]; 4] = [
            [(0, false), (1, false), (2, false), (3, false)],
            [(1, false), (0, true), (3, false), (2, true)],
            [(2, false), (3, true), (0, true), (1, false)],
            [(3, false), (2, false), (1, true), (0, true)],
        ];
        let mut table = vec![vec![0; 8]; 8];
        for a in 0..8 {
            for b in 0..8 {
                let (u, flip) = UNIT[a % 4][b % 4];
                let neg = (a >= 4) ^ (b >= 4) ^ flip;
                table[a][b] = u + if neg { 4 } else { 0 };
            }
        }
        let names = ["E", "I", "J", "K", "-E", "-I", "-J", "-K"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Group::from_table(table, names).expect("quaternion table is a group")
    }

    /// Direct product; elements ordered lexicographically by `(left, right)`.
    pub fn direct_product(left: &Group, right: &Group) -> Result<Group, GroupError> {
        let (n, m) = (left.order, right.order);
        if n * m > MAX_ORDER {
            return Err(GroupError::TooLarge(n * m));
        }
        let mut table = vec![vec![0; n * m]; n * m];
        for a in 0..n * m {
            for b in 0..n * m {
                let x = left.mul(a / m, b / m);
                let y = right.mul(a % m, b % m);
                table[a][b] = x * m + y;
            }
        }
        let names = (0..n * m)
            .map(|a| format!("({},{})", left.name(a / m), right.name(a % m)))
            .collect();
        Group::from_table(table, names)
    }

    /// Loads a group from a JSON file `{ "order": n, "table": [[..]], "names": [..] }`.
    pub fn from_file(path: &Path) -> Result<Group, GroupError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| GroupError::Io {
            path: display.clone(),
            source,
        })?;
        let file: GroupFile = serde_json::from_str(&text).map_err(|source| GroupError::Json {
            path: display.clone(),
            source,
        })?;
        if file.table.len() != file.order {
            return Err(GroupError::Invalid(format!(
                "declared order {} but table has {} rows",
                file.order,
                file.table.len()
            )));
        }
        let names = file
            .names
            .unwrap_or_else(|| (0..file.order).map(|i| format!("e{i}")).collect());
        Group::from_table(file.table, names)
    }

    /// Parses a group spec: `C<n>`, `D<m>`, `Q8`, `<spec>x<spec>` (left
    /// associative) or `file:<path>`.
    pub fn parse(spec: &str) -> Result<Group, GroupError> {
        let spec = spec.trim();
        if let Some(path) = spec.strip_prefix("file:") {
            return Group::from_file(Path::new(path));
        }
        let mut factors = spec.split('x');
        let first = factors.next().unwrap_or_default();
        let mut group = parse_factor(spec, first)?;
        for f in factors {
            let right = parse_factor(spec, f)?;
            group = Group::direct_product(&group, &right)?;
        }
        Ok(group)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// Order of the element `a`.
    #[inline]
    pub fn elem_order(&self, a: usize) -> usize {
        self.elem_order[a]
    }

    /// `a^k` for `k >= 0`.
    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k % self.elem_order[a]).fold(0, |acc, _| self.mul(acc, a))
    }

    /// Commutator `x y x^-1 y^-1`.
    pub fn commutator(&self, x: usize, y: usize) -> usize {
        let xy = self.mul(x, y);
        self.mul(self.mul(xy, self.inv(x)), self.inv(y))
    }

    pub fn commutes(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a + 1..self.order).all(|b| self.commutes(a, b)))
    }

    /// Least common multiple of all element orders.
    pub fn exponent(&self) -> usize {
        self.elem_order.iter().fold(1, |acc, &o| lcm(acc, o))
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn all(&self) -> ElemSet {
        ElemSet::full(self.order)
    }

    /// The table as nested vectors.
    pub fn table(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    /// Byte encoding of the table and names, used as a content key.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.table.len() + 64);
        out.extend_from_slice(&(self.order as u32).to_le_bytes());
        out.extend_from_slice(&self.table);
        for n in &self.names {
            out.extend_from_slice(n.as_bytes());
            out.push(0);
        }
        out
    }
}

fn parse_factor(spec: &str, factor: &str) -> Result<Group, GroupError> {
    let err = |reason: String| GroupError::Parse {
        spec: spec.to_string(),
        reason,
    };
    let factor = factor.trim();
    if factor == "Q8" {
        return Ok(Group::quaternion());
    }
    let (kind, digits) = factor.split_at(factor.chars().next().map_or(0, char::len_utf8));
    let n: usize = digits
        .parse()
        .map_err(|_| err(format!("expected C<n>, D<m> or Q8, found `{factor}`")))?;
    match kind {
        "C" => {
            if n == 0 {
                return Err(err("cyclic order must be at least 1".into()));
            }
            if n > MAX_ORDER {
                return Err(GroupError::TooLarge(n));
            }
            Group::cyclic(n)
        }
        "D" => {
            if n < 2 || n % 2 != 0 {
                return Err(err(format!("dihedral order must be even and at least 2, got {n}")));
            }
            if n > MAX_ORDER {
                return Err(GroupError::TooLarge(n));
            }
            Group::dihedral(n)
        }
        _ => Err(err(format!("unknown group family in `{factor}`"))),
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A subgroup with a generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub members: ElemSet,
    pub generators: Vec<usize>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.contains(g)
    }

    /// Wraps a member set that is already known to be a subgroup, picking
    /// generators greedily in index order.
    fn from_members(group: &Group, members: ElemSet) -> Subgroup {
        let mut generators = Vec::new();
        let mut span = ElemSet::singleton(0);
        for g in members.iter() {
            if !span.contains(g) {
                generators.push(g);
                span = subgroup_generated(group, &generators).members;
            }
        }
        Subgroup { members, generators }
    }
}

/// Smallest subgroup containing `gens`.
pub fn subgroup_generated(group: &Group, gens: &[usize]) -> Subgroup {
    let mut members = ElemSet::singleton(0);
    let mut frontier = vec![0usize];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = group.mul(x, g);
            if !members.contains(y) {
                members.insert(y);
                frontier.push(y);
            }
        }
    }
    Subgroup {
        members,
        generators: gens.to_vec(),
    }
}

/// Center, commutator subgroup and abelianization of a group.
#[derive(Clone, Debug)]
pub struct GroupStructure {
    pub center: Subgroup,
    pub commutator: Subgroup,
    /// The quotient `G/G'`; coset `0` is `G'` itself.
    pub abelianization: Group,
    /// Coset index of every element.
    pub projection: Vec<usize>,
}

impl GroupStructure {
    pub fn is_central(&self, g: usize) -> bool {
        self.center.contains(g)
    }

    /// The `G'`-coset containing `g`, as a member set.
    pub fn coset_of(&self, g: usize) -> ElemSet {
        let c = self.projection[g];
        self.projection
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p == c)
            .map(|(x, _)| x)
            .collect()
    }
}

pub fn analyze(group: &Group) -> GroupStructure {
    let n = group.order();
    let center_members: ElemSet = group
        .elements()
        .filter(|&z| group.elements().all(|x| group.commutes(z, x)))
        .collect();
    let commutators: ElemSet = group
        .elements()
        .flat_map(|x| group.elements().map(move |y| (x, y)))
        .map(|(x, y)| group.commutator(x, y))
        .collect();
    let derived = subgroup_generated(group, &commutators.to_vec()).members;
    let (abelianization, projection) = quotient(group, derived);
    debug_assert_eq!(abelianization.order() * derived.len(), n);
    GroupStructure {
        center: Subgroup::from_members(group, center_members),
        commutator: Subgroup::from_members(group, derived),
        abelianization,
        projection,
    }
}

/// Quotient by a normal subgroup. Cosets are numbered by their smallest
/// element; coset names are `[rep]`.
pub fn quotient(group: &Group, normal: ElemSet) -> (Group, Vec<usize>) {
    let n = group.order();
    let mut projection = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for g in 0..n {
        if projection[g] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(g);
        for h in normal.iter() {
            projection[group.mul(g, h)] = c;
        }
    }
    let k = reps.len();
    let table = (0..k)
        .map(|i| (0..k).map(|j| projection[group.mul(reps[i], reps[j])]).collect())
        .collect();
    let names = reps.iter().map(|&r| format!("[{}]", group.name(r))).collect();
    let q = Group::from_table(table, names).expect("quotient by a normal subgroup is a group");
    (q, projection)
}

/// Invariant factors `d_1 | d_2 | ..` of an abelian group (empty for the
/// trivial group), or `None` if the group is not abelian.
pub fn abelian_invariants(group: &Group) -> Option<Vec<usize>> {
    if !group.is_abelian() {
        return None;
    }
    let n = group.order();
    let mut primes = Vec::new();
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        if m % p == 0 {
            primes.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    // exponents[p][j]: exponent of p in the j-th largest cyclic p-factor
    let mut per_prime: Vec<(usize, Vec<u32>)> = Vec::new();
    for &p in &primes {
        let mut counts = vec![0usize]; // counts[k] = # cyclic factors of exponent >= k
        let mut prev_s = 0u32;
        let mut pk = 1usize;
        loop {
            pk *= p;
            let kernel = group.elements().filter(|&x| group.pow(x, pk) == 0).count();
            // the p^k-torsion has order p^{sum_i min(e_i, k)}
            let s = log_exact(kernel, p);
            let diff = s - prev_s;
            if diff == 0 {
                break;
            }
            counts.push(diff as usize);
            prev_s = s;
        }
        let max_k = counts.len() - 1;
        let mut exps = Vec::new();
        for k in (1..=max_k).rev() {
            let with_at_least_k = counts[k];
            let with_more = if k < max_k { counts[k + 1] } else { 0 };
            for _ in 0..with_at_least_k - with_more {
                exps.push(k as u32);
            }
        }
        per_prime.push((p, exps));
    }
    let rank = per_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut factors: Vec<usize> = (0..rank)
        .map(|j| {
            per_prime
                .iter()
                .map(|(p, e)| e.get(j).map_or(1, |&k| p.pow(k)))
                .product()
        })
        .collect();
    factors.reverse();
    Some(factors)
}

fn log_exact(mut x: usize, p: usize) -> u32 {
    let mut k = 0;
    while x > 1 {
        debug_assert_eq!(x % p, 0);
        x /= p;
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(g: &Group, name: &str) -> usize {
        g.index_of(name).unwrap_or_else(|| panic!("no element {name}"))
    }

    #[test]
    fn quaternion_relations() {
        let q = Group::parse("Q8").unwrap();
        let (i, j, k) = (idx(&q, "I"), idx(&q, "J"), idx(&q, "K"));
        assert_eq!(q.mul(i, j), k);
        assert_eq!(q.mul(j, i), idx(&q, "-K"));
        assert_eq!(q.mul(j, k), i);
        assert_eq!(q.mul(k, i), j);
        assert_eq!(q.mul(q.mul(i, j), k), idx(&q, "-E"));
        assert_eq!(q.elem_order(i), 4);
        assert_eq!(q.elem_order(idx(&q, "-E")), 2);
    }

    #[test]
    fn dihedral_relations() {
        let d6 = Group::parse("D6").unwrap();
        let (a, b) = (idx(&d6, "a"), idx(&d6, "b"));
        assert_eq!(d6.mul(b, a), d6.mul(idx(&d6, "a2"), b));
        assert_eq!(d6.elem_order(a), 3);
        assert_eq!(d6.elem_order(b), 2);
        assert_eq!(d6.name(d6.mul(a, b)), "ab");
        let d8 = Group::parse("D8").unwrap();
        assert_eq!(
            d8.mul(idx(&d8, "b"), idx(&d8, "a")),
            d8.mul(idx(&d8, "a3"), idx(&d8, "b"))
        );
    }

    #[test]
    fn trivial_and_cyclic() {
        let c1 = Group::parse("C1").unwrap();
        assert_eq!(c1.order(), 1);
        assert_eq!(c1.name(0), "1");
        let c4 = Group::parse("C4").unwrap();
        let s = analyze(&c4);
        assert_eq!(s.center.order(), 4);
        assert_eq!(s.commutator.order(), 1);
        assert_eq!(abelian_invariants(&s.abelianization), Some(vec![4]));
    }

    #[test]
    fn structure_of_small_nonabelian_groups() {
        let q = Group::parse("Q8").unwrap();
        let s = analyze(&q);
        assert_eq!(s.center.members, ElemSet::from_elems([0, 4]));
        assert_eq!(s.commutator.members, ElemSet::from_elems([0, 4]));
        assert_eq!(abelian_invariants(&s.abelianization), Some(vec![2, 2]));

        let d6 = Group::parse("D6").unwrap();
        let s = analyze(&d6);
        assert_eq!(s.center.members, ElemSet::singleton(0));
        assert_eq!(s.commutator.members.names(&d6), vec!["1", "a", "a2"]);
        assert_eq!(abelian_invariants(&s.abelianization), Some(vec![2]));
        assert_eq!(abelian_invariants(&d6), None);
    }

    #[test]
    fn generated_subgroups() {
        let q = Group::parse("Q8").unwrap();
        let s = subgroup_generated(&q, &[idx(&q, "I")]);
        assert_eq!(s.members.names(&q), vec!["E", "I", "-E", "-I"]);
        assert_eq!(subgroup_generated(&q, &[]).members, ElemSet::singleton(0));
        let d6 = Group::parse("D6").unwrap();
        let all = subgroup_generated(&d6, &[idx(&d6, "a2"), idx(&d6, "b")]);
        assert_eq!(all.members, d6.all());
    }

    #[test]
    fn products_and_invariants() {
        let g = Group::parse("C2xC2").unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.name(1), "(1,g)");
        assert_eq!(abelian_invariants(&g), Some(vec![2, 2]));
        let g = Group::parse("C2xC3").unwrap();
        assert_eq!(abelian_invariants(&g), Some(vec![6]));
        let g = Group::parse("C2xC4xC2").unwrap();
        assert_eq!(abelian_invariants(&g), Some(vec![2, 2, 4]));
        let g = Group::parse("C3xC9").unwrap();
        assert_eq!(abelian_invariants(&g), Some(vec![3, 9]));
        assert_eq!(abelian_invariants(&Group::parse("C1").unwrap()), Some(vec![]));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Group::parse("Z5"), Err(GroupError::Parse { .. })));
        assert!(matches!(Group::parse("D7"), Err(GroupError::Parse { .. })));
        assert!(matches!(Group::parse("C0"), Err(GroupError::Parse { .. })));
        assert!(matches!(Group::parse("C65"), Err(GroupError::TooLarge(65))));
        assert!(matches!(Group::parse("C9xC9"), Err(GroupError::TooLarge(81))));
        assert!(Group::parse("").is_err());
    }

    #[test]
    fn rejects_non_groups() {
        let names = |n: usize| (0..n).map(|i| format!("e{i}")).collect::<Vec<_>>();
        // not a Latin square
        let t = vec![vec![0, 1], vec![1, 1]];
        assert!(Group::from_table(t, names(2)).is_err());
        // identity not at index 0
        let t = vec![vec![1, 0], vec![0, 1]];
        assert!(Group::from_table(t, names(2)).is_err());
        // Latin square with identity that is not associative
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = Group::from_table(t, names(5)).unwrap_err();
        assert!(err.to_string().contains("associative"), "{err}");
    }

    #[test]
    fn loads_group_file() {
        let dir = std::env::temp_dir().join(format!("prodone-group-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c3.json");
        std::fs::write(
            &path,
            r#"{ "order": 3, "table": [[0,1,2],[1,2,0],[2,0,1]], "names": ["e","x","y"] }"#,
        )
        .unwrap();
        let g = Group::parse(&format!("file:{}", path.display())).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.mul(1, 1), 2);
        assert_eq!(g.name(1), "x");
        std::fs::remove_dir_all(&dir).ok();
    }
}
