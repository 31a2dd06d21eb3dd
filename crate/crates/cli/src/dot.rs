//! Lattice of cyclic subsemigroups of a class semigroup, as Graphviz DOT.

use std::collections::BTreeMap;
use std::fmt::Write as _;

struct Node {
    members: Vec<usize>,
    labels: Vec<String>,
    is_group: bool,
}

fn cyclic(op: &[Vec<usize>], x: usize) -> Vec<usize> {
    let mut seen = vec![x];
    let mut cur = op[x][x];
    while !seen.contains(&cur) {
        seen.push(cur);
        cur = op[cur][x];
    }
    seen.sort_unstable();
    seen
}

fn is_group(op: &[Vec<usize>], members: &[usize]) -> bool {
    members.iter().any(|&e| {
        op[e][e] == e
            && members.iter().all(|&m| op[e][m] == m)
            && members.iter().all(|&m| members.iter().any(|&n| op[m][n] == e))
    })
}

fn set_label(members: &[usize]) -> String {
    let inner: Vec<String> = members.iter().map(|m| m.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Nodes are the distinct cyclic subsemigroups `<x>` plus the `named`
/// subsets, merged when their members coincide; edges are covering
/// containments, drawn upward. Groups are boxes.
pub fn emit_dot(op: &[Vec<usize>], named: &[(&str, Vec<usize>)]) -> String {
    let mut by_members: BTreeMap<Vec<usize>, Vec<String>> = BTreeMap::new();
    for x in 0..op.len() {
        by_members.entry(cyclic(op, x)).or_default().push(format!("<{x}>"));
    }
    for (name, members) in named {
        let mut m = members.clone();
        m.sort_unstable();
        by_members.entry(m).or_default().push((*name).to_string());
    }
    let mut nodes: Vec<Node> = by_members
        .into_iter()
        .map(|(members, labels)| Node {
            is_group: is_group(op, &members),
            members,
            labels,
        })
        .collect();
    nodes.sort_by(|a, b| (a.members.len(), &a.members).cmp(&(b.members.len(), &b.members)));

    let subset = |a: &[usize], b: &[usize]| a.len() < b.len() && a.iter().all(|x| b.binary_search(x).is_ok());
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [fontname=\"Helvetica\"];\n");
    for (i, n) in nodes.iter().enumerate() {
        let shape = if n.is_group { "box" } else { "ellipse" };
        let _ = writeln!(
            out,
            "  n{i} [label=\"{} {}\", shape={shape}];",
            n.labels.join(" "),
            set_label(&n.members)
        );
    }
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            if !subset(&a.members, &b.members) {
                continue;
            }
            let covered = nodes
                .iter()
                .any(|c| subset(&a.members, &c.members) && subset(&c.members, &b.members));
            if !covered {
                let _ = writeln!(out, "  n{i} -> n{j};");
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_semigroup_is_one_node() {
        let dot = emit_dot(&[vec![0]], &[("units", vec![0]), ("quotient", vec![0])]);
        assert_eq!(dot.matches("[label=").count(), 1);
        assert!(!dot.contains("->"));
        assert!(dot.contains("shape=box"));
    }

    #[test]
    fn two_element_group_and_its_identity() {
        let op = vec![vec![0, 1], vec![1, 0]];
        let dot = emit_dot(&op, &[]);
        assert_eq!(dot.matches("[label=").count(), 2);
        assert!(dot.contains("n0 -> n1;"));
    }
}
