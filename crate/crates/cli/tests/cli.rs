use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use prodone::cache::Cache;
use prodone::commands::{self, Context};
use prodone::report::Report;

fn prodone(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_prodone"));
    cmd.args(args).env_remove("PRODONE_CACHE_DIR");
    match cache {
        Some(dir) => cmd.arg("--cache-dir").arg(dir),
        None => cmd.arg("--no-cache"),
    };
    cmd.output().expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let mut full = args.to_vec();
    full.extend(["--json", path.to_str().unwrap()]);
    let out = prodone(&full, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn class_semigroup_of_q8_has_eighteen_classes() {
    let v = json_of(&["class-semigroup", "Q8"]);
    assert_eq!(v["result"]["size"], 18);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["provenance"]["seed"], 0x05ee_d0fc_1a55_u64);
}

#[test]
fn davenport_table_for_d6() {
    let out = prodone(&["davenport", "D6"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let has = |k: &str, v: &str| text.lines().any(|l| {
        let mut parts = l.split('=').map(str::trim);
        parts.next() == Some(k) && parts.next() == Some(v)
    });
    assert!(has("d", "3") && has("D", "6"), "{text}");
}

#[test]
fn krull_check_for_cyclic_group() {
    let v = json_of(&["check", "C4", "--property", "krull"]);
    assert_eq!(v["result"]["holds"], "true");
}

#[test]
fn exit_codes() {
    assert_eq!(prodone(&["group", "X9"], None).status.code(), Some(2));
    assert_eq!(prodone(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(prodone(&["lengths", "D6", "a,q"], None).status.code(), Some(2));
    assert_eq!(prodone(&["davenport", "D6", "--dot", "x.dot"], None).status.code(), Some(2));
    // not product-one
    assert_eq!(prodone(&["lengths", "C3", "g"], None).status.code(), Some(1));
    assert_eq!(prodone(&["lengths", "C3", "g^3,g2^3", "--count"], None).status.code(), Some(0));
}

#[test]
fn second_run_hits_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let first = prodone(&["class-semigroup", "Q8"], Some(dir.path()));
    assert!(first.status.success());
    assert!(!stderr(&first).contains("cache: hit"));
    let second = prodone(&["class-semigroup", "Q8"], Some(dir.path()));
    assert!(stderr(&second).contains("cache: hit"));
    assert!(!stderr(&second).contains("elapsed"));
    assert_eq!(first.stdout, second.stdout);
}

fn only_entry(dir: &Path) -> std::path::PathBuf {
    let entries: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    entries[0].clone()
}

#[test]
fn corrupt_entries_are_evicted_and_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    assert!(prodone(&["davenport", "D8"], Some(dir.path())).status.success());
    let entry = only_entry(dir.path());
    std::fs::write(&entry, "{ not json").unwrap();
    let out = prodone(&["davenport", "D8"], Some(dir.path()));
    assert!(out.status.success());
    assert!(stderr(&out).contains("evicted"));
    let r: Report = serde_json::from_str(&std::fs::read_to_string(&entry).unwrap()).unwrap();
    assert_eq!(r.result["D"], 6);
}

#[test]
fn stale_schema_version_is_a_miss() {
    let dir = tempfile::tempdir().unwrap();
    assert!(prodone(&["davenport", "C5"], Some(dir.path())).status.success());
    let entry = only_entry(dir.path());
    let mut r: Report = serde_json::from_str(&std::fs::read_to_string(&entry).unwrap()).unwrap();
    r.schema_version = 0;
    std::fs::write(&entry, r.to_json()).unwrap();
    let out = prodone(&["davenport", "C5"], Some(dir.path()));
    assert!(!stderr(&out).contains("cache: hit"));
    assert!(stderr(&out).contains("elapsed"));
}

#[test]
fn json_reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert!(prodone(&["class-semigroup", "D6", "--json", p.to_str().unwrap()], None).status.success());
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn reports_round_trip_through_json() {
    let ctx = Context {
        cache: Cache::disabled(),
        bound: None,
        seed: None,
    };
    let reports = [
        commands::group_info(&ctx, "D8").unwrap(),
        commands::atoms(&ctx, "D6").unwrap(),
        commands::davenport_constants(&ctx, "Q8").unwrap(),
        commands::lengths(&ctx, "C3", "g^3,g2^3", true).unwrap(),
        commands::class_semigroup(&ctx, "D6").unwrap(),
        commands::unions(&ctx, "C4").unwrap(),
        commands::delta(&ctx, "C4", None).unwrap(),
        commands::omega(&ctx, "C4").unwrap(),
        commands::semigroup_davenport(&ctx, "Q8").unwrap(),
        commands::check(&ctx, "D6", commands::PropertyArg::Seminormal).unwrap(),
        commands::atlas(&ctx, &["C1".into(), "Q8".into()]).unwrap(),
    ];
    for r in reports {
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}

fn dot_of(group: &str) -> String {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.dot");
    let out = prodone(&["class-semigroup", group, "--dot", path.to_str().unwrap()], None);
    assert!(out.status.success());
    std::fs::read_to_string(path).unwrap()
}

/// Nodes that are not the target of any covering edge.
fn bottom_nodes(dot: &str) -> usize {
    let nodes: Vec<&str> = dot
        .lines()
        .filter(|l| l.contains("[label="))
        .map(|l| l.trim().split(' ').next().unwrap())
        .collect();
    nodes
        .iter()
        .filter(|n| !dot.lines().any(|l| l.trim().ends_with(&format!("-> {n};"))))
        .count()
}

#[test]
fn lattice_bottoms_are_the_idempotents() {
    assert_eq!(bottom_nodes(&dot_of("Q8")), 5);
    assert_eq!(bottom_nodes(&dot_of("D8")), 5);
    assert_eq!(bottom_nodes(&dot_of("D6")), 6);
    let trivial = dot_of("C1");
    assert_eq!(trivial.matches("[label=").count(), 1);
}

#[test]
fn lattice_diagrams_match_golden_files() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for (g, f) in [("Q8", "q8.dot"), ("D6", "d6.dot"), ("D8", "d8.dot")] {
        assert_eq!(dot_of(g), std::fs::read_to_string(golden.join(f)).unwrap(), "{g}");
    }
}
