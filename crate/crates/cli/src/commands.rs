//! One function per subcommand, each producing a [`Report`].

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{Context as _, Result};
use serde_json::{json, Value};

use prodone_core::arith::{self, DEFAULT_SEARCH_BUDGET};
use prodone_core::class_semigroup::{BuildOptions, ClassSemigroup, DEFAULT_SEED};
use prodone_core::factor::{atoms_of_length, davenport, enumerate_atoms, factorization_lengths};
use prodone_core::structure::{self, Holds, Verdict};
use prodone_core::{analyze, Group, GroupError, SeqError, Sequence};

use crate::cache::{Cache, Lookup};
use crate::report::{Provenance, Report};

/// Malformed user input: reported with the grammar and exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const GRAMMAR: &str = "\
group spec:    C<n> | D<2m> | Q8 | <spec>x<spec> | file:<path.json>
sequence:      empty | term[,term...]   with term = <element>[^<multiplicity>]
               e.g. `a^2,b^2` in D6, `I,J` in Q8, `(g,1)^2` in C2xC2";

pub fn parse_group(spec: &str) -> Result<Group> {
    Group::parse(spec).map_err(|e| match e {
        GroupError::Parse { .. } => UsageError(e.to_string()).into(),
        e => anyhow::Error::new(e).context(format!("loading group `{spec}`")),
    })
}

pub fn parse_sequence(group: &Group, literal: &str) -> Result<Sequence> {
    Sequence::parse(group, literal).map_err(|e| match e {
        SeqError::Parse { .. } => UsageError(e.to_string()).into(),
        e => e.into(),
    })
}

pub struct Context {
    pub cache: Cache,
    pub bound: Option<usize>,
    pub seed: Option<u64>,
}

impl Context {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    fn build_options(&self) -> BuildOptions {
        BuildOptions {
            seed: self.seed(),
            ..BuildOptions::default()
        }
    }

    /// Looks the report up in the cache, computing and storing it on a miss.
    fn cached(
        &self,
        group: &Group,
        spec: &str,
        computation: &str,
        parameters: BTreeMap<String, Value>,
        compute: impl FnOnce() -> Result<(Value, Provenance)>,
    ) -> Result<Report> {
        let key = Cache::key(group, computation, &parameters);
        let (lookup, hit) = self.cache.load(&key);
        match (lookup, hit) {
            (Lookup::Hit, Some(mut r)) => {
                eprintln!("cache: hit {key}");
                r.group_spec = spec.to_string();
                return Ok(r);
            }
            (Lookup::Evicted, _) => eprintln!("cache: evicted corrupt entry {key}"),
            _ => {}
        }
        let start = Instant::now();
        let (result, provenance) = compute()?;
        eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
        let report = Report::new(spec, computation, parameters, result, provenance);
        self.cache.store(&key, &report);
        Ok(report)
    }
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn names(group: &Group, elems: impl IntoIterator<Item = usize>) -> Vec<String> {
    elems.into_iter().map(|g| group.name(g).to_string()).collect()
}

pub fn group_info(ctx: &Context, spec: &str) -> Result<Report> {
    let group = parse_group(spec)?;
    ctx.cached(&group, spec, "group", params(&[]), || {
        let st = analyze(&group);
        let orders: BTreeMap<String, usize> =
            group.elements().map(|g| (group.name(g).to_string(), group.elem_order(g))).collect();
        let result = json!({
            "order": group.order(),
            "abelian": group.is_abelian(),
            "exponent": group.exponent(),
            "elements": names(&group, group.elements()),
            "element_orders": orders,
            "center": names(&group, st.center.members.iter()),
            "commutator": names(&group, st.commutator.members.iter()),
            "abelianization_order": st.abelianization.order(),
            "abelianization_invariants": prodone_core::group::abelian_invariants(&st.abelianization),
        });
        Ok((result, Provenance::exact()))
    })
}

pub fn atoms(ctx: &Context, spec: &str) -> Result<Report> {
    let group = parse_group(spec)?;
    let bound = ctx.bound.unwrap_or(group.order());
    ctx.cached(&group, spec, "atoms", params(&[("max_length", json!(bound))]), || {
        let mut list = Vec::new();
        if bound >= group.order() {
            list = enumerate_atoms(&group, None)?.atoms;
        } else {
            for len in 1..=bound {
                list.extend(atoms_of_length(&group, group.all(), len)?);
            }
        }
        let mut by_length: BTreeMap<usize, usize> = BTreeMap::new();
        for a in &list {
            *by_length.entry(a.len()).or_default() += 1;
        }
        let result = json!({
            "count": list.len(),
            "max_length": list.iter().map(Sequence::len).max().unwrap_or(0),
            "by_length": by_length,
            "atoms": list.iter().map(|a| a.display(&group)).collect::<Vec<_>>(),
        });
        let prov = if bound >= group.order() {
            Provenance::exact()
        } else {
            Provenance::bounded(params(&[("max_length", json!(bound))]))
        };
        Ok((result, prov))
    })
}

pub fn davenport_constants(ctx: &Context, spec: &str) -> Result<Report> {
    let group = parse_group(spec)?;
    ctx.cached(&group, spec, "davenport", params(&[]), || {
        let r = davenport(&group, None)?;
        let result = json!({
            "d": r.small,
            "D": r.large,
            "free_witness": r.free_witness.display(&group),
            "atom_witness": r.atom_witness.display(&group),
        });
        Ok((result, Provenance::exact()))
    })
}

pub fn lengths(ctx: &Context, spec: &str, literal: &str, count: bool) -> Result<Report> {
    let group = parse_group(spec)?;
    let seq = parse_sequence(&group, literal)?;
    let p = params(&[("sequence", json!(seq.display(&group))), ("count", json!(count))]);
    ctx.cached(&group, spec, "lengths", p, || {
        let ls = factorization_lengths(&group, &seq, count)?;
        let result = json!({
            "sequence": seq.display(&group),
            "lengths": ls.lengths,
            "min": ls.min(),
            "max": ls.max(),
            "delta": ls.delta(),
            "factorizations": ls.factorizations,
        });
        Ok((result, Provenance::exact()))
    })
}

fn class_semigroup_value(cs: &ClassSemigroup) -> Result<Value> {
    let g = &cs.group;
    let subgroups = cs
        .unit_and_quotient_subgroups()
        .map_err(|e| anyhow::anyhow!("unit group check failed: {e}"))?;
    let idem = cs.idempotent_structure();
    let reg = cs.regularity_report();
    let classes: Vec<Value> = (0..cs.size())
        .map(|x| {
            json!({
                "representative": cs.reps[x].display(g),
                "pi_set": names(g, cs.pi_sets[x].iter()),
                "accepting": cs.accept[x],
            })
        })
        .collect();
    let folds: BTreeMap<String, Value> = g
        .elements()
        .filter(|&x| !cs.structure.is_central(x))
        .map(|x| {
            (
                g.name(x).to_string(),
                json!({ "threshold": cs.folds.threshold[x], "period": cs.folds.period[x] }),
            )
        })
        .collect();
    let units: Vec<Value> = subgroups
        .unit_map
        .iter()
        .map(|&(z, c)| json!({ "element": g.name(z), "class": c }))
        .collect();
    Ok(json!({
        "size": cs.size(),
        "zero": cs.zero,
        "idempotent_count": idem.idempotents.len(),
        "idempotents": idem.idempotents,
        "smallest_idempotent": idem.smallest,
        "smallest_idempotent_pi_set": names(g, cs.pi_sets[idem.smallest].iter()),
        "rees_order": idem.rees_order,
        "clifford": reg.is_clifford,
        "non_regular_count": reg.non_regular.len(),
        "non_regular": reg.non_regular,
        "units": subgroups.units,
        "unit_map": units,
        "quotient_copy": subgroups.quotient_copy,
        "quotient_map": subgroups.quotient_map,
        "folds": folds,
        "classes": classes,
        "op": cs.op,
    }))
}

fn build(ctx: &Context, group: &Group) -> Result<ClassSemigroup> {
    ClassSemigroup::build_with(group, &ctx.build_options()).context("building the class semigroup")
}

fn class_provenance(cs: &ClassSemigroup) -> Provenance {
    let v = &cs.validation;
    let mut p = Provenance::bounded(params(&[
        ("check_length", json!(v.check_length)),
        ("random_max_length", json!(v.random_max_length)),
        ("exhaustive_complete", json!(v.exhaustive_complete)),
        ("retries", json!(v.retries)),
    ]));
    p.validation_samples = Some(v.exhaustive_samples + v.random_samples);
    p.seed = Some(v.seed);
    p
}

pub fn class_semigroup(ctx: &Context, spec: &str) -> Result<Report> {
    let group = parse_group(spec)?;
    ctx.cached(&group, spec, "class-semigroup", params(&[("seed", json!(ctx.seed()))]), || {
        let cs = build(ctx, &group)?;
        Ok((class_semigroup_value(&cs)?, class_provenance(&cs)))
    })
}

pub fn unions(ctx: &Context, spec: &str) -> Result<Report> {
    let group = parse_group(spec)?;
    let k = ctx.bound.unwrap_or(3);
    ctx.cached(&group, spec, "unions", params(&[("k_max", json!(k))]), || {
        let r = arith::rho_bounds_check(&group, k)?;
        Ok((serde_json::to_value(&r)?, Provenance::exact()))
    })
}

pub fn delta(ctx: &Context, spec: &str, cap: Option<usize>) -> Result<Report> {
    let group = parse_group(spec)?;
    let bound = ctx.bound.unwrap_or(8);
    let p = params(&[("length_bound", json!(bound)), ("certified_cap", json!(cap))]);
    ctx.cached(&group, spec, "delta", p, || {
        let r = arith::delta_set(&group, bound, cap)?;
        let result = json!({
            "delta": r.delta,
            "length_bound": r.length_bound,
            "sequences": r.sequences,
            "witness": r.witness.as_ref().map(|w| w.display(&group)),
            "exact": if r.exact { "yes" } else { "unknown" },
        });
        let prov = if r.exact {
            Provenance::exact()
        } else {
            Provenance::bounded(params(&[("length_bound", json!(bound))]))
        };
        Ok((result, prov))
    })
}

pub fn omega(ctx: &Context, spec: &str) -> Result<Report> {
    let group = parse_group(spec)?;
    let budget = ctx.bound.unwrap_or(DEFAULT_SEARCH_BUDGET);
    let p = params(&[("search_budget", json!(budget)), ("seed", json!(ctx.seed()))]);
    ctx.cached(&group, spec, "omega", p, || {
        let atoms = enumerate_atoms(&group, None)?;
        let cs = if group.is_abelian() { None } else { Some(build(ctx, &group)?) };
        let r = arith::omega(&group, &atoms, cs.as_ref(), budget)?;
        let per_atom: Vec<Value> = r
            .per_atom
            .iter()
            .map(|(a, n)| json!({ "atom": a.display(&group), "witness": n }))
            .collect();
        let result = json!({
            "lower": r.lower,
            "upper": r.upper,
            "D": r.large_davenport,
            "class_d": r.class_small_davenport,
            "search_complete": r.search_complete,
            "per_atom": per_atom,
        });
        let prov = if r.exact {
            Provenance::exact()
        } else {
            Provenance::bounded(params(&[("search_budget", json!(budget))]))
        };
        Ok((result, prov))
    })
}

pub fn semigroup_davenport(ctx: &Context, spec: &str) -> Result<Report> {
    let group = parse_group(spec)?;
    ctx.cached(&group, spec, "semigroup-davenport", params(&[("seed", json!(ctx.seed()))]), || {
        let cs = build(ctx, &group)?;
        let r = arith::semigroup_davenport(&cs.op, cs.zero)?;
        let quotient = davenport(&cs.structure.abelianization, None)?.large;
        let result = json!({
            "d": r.small,
            "D": r.large,
            "size": cs.size(),
            "witness": r.witness,
            "abelianization_D": quotient,
        });
        Ok((result, class_provenance(&cs)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PropertyArg {
    P,
    Seminormal,
    Krull,
    RootClosed,
}

fn verdict_value(group: &Group, v: &Verdict) -> Value {
    json!({
        "property": v.property,
        "holds": v.holds,
        "witness": v.witness.as_ref().map(|w| w.display(group)),
        "details": v.details,
        "reason": v.reason,
        "bound": v.bound,
    })
}

pub fn check(ctx: &Context, spec: &str, property: PropertyArg) -> Result<Report> {
    let group = parse_group(spec)?;
    let name = match property {
        PropertyArg::P => "property-p",
        PropertyArg::Seminormal => "seminormal",
        PropertyArg::Krull => "krull",
        PropertyArg::RootClosed => "root-closed",
    };
    let p = params(&[("property", json!(name)), ("bound", json!(ctx.bound))]);
    ctx.cached(&group, spec, "check", p, || {
        let bound = ctx.bound.unwrap_or(6);
        let v = match property {
            PropertyArg::P => structure::property_p(&group, ctx.bound)?,
            PropertyArg::Seminormal => structure::seminormality(&group, bound)?,
            PropertyArg::Krull => structure::krull_witness(&group, bound)?,
            PropertyArg::RootClosed => structure::root_closed(&group, bound)?,
        };
        let prov = if v.holds == Holds::UnknownUpToBound {
            Provenance::bounded(params(&[("bound", json!(v.bound))]))
        } else {
            Provenance::exact()
        };
        Ok((verdict_value(&group, &v), prov))
    })
}

fn atlas_entry(ctx: &Context, spec: &str) -> Value {
    let group = match parse_group(spec) {
        Ok(g) => g,
        Err(e) => return json!({ "group": spec, "error": e.to_string() }),
    };
    let st = analyze(&group);
    let mut entry = json!({
        "group": spec,
        "order": group.order(),
        "abelian": group.is_abelian(),
        "center_order": st.center.order(),
        "commutator_order": st.commutator.order(),
    });
    let obj = entry.as_object_mut().expect("object");
    match davenport(&group, None) {
        Ok(r) => {
            obj.insert("d".into(), json!(r.small));
            obj.insert("D".into(), json!(r.large));
        }
        Err(e) => {
            obj.insert("davenport_error".into(), json!(e.to_string()));
        }
    }
    match build(ctx, &group) {
        Ok(cs) => {
            obj.insert("class_semigroup_size".into(), json!(cs.size()));
            obj.insert("idempotents".into(), json!(cs.idempotents.len()));
            obj.insert("clifford".into(), json!(cs.regularity_report().is_clifford));
        }
        Err(e) => {
            obj.insert("class_semigroup_error".into(), json!(format!("{e:#}")));
        }
    }
    entry
}

pub fn atlas(ctx: &Context, specs: &[String]) -> Result<Report> {
    let start = Instant::now();
    let entries: Vec<Value> = specs.iter().map(|s| atlas_entry(ctx, s)).collect();
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    let mut prov = Provenance::bounded(BTreeMap::new());
    prov.seed = Some(ctx.seed());
    Ok(Report::new(
        &specs.join(" "),
        "atlas",
        params(&[("seed", json!(ctx.seed()))]),
        Value::Array(entries),
        prov,
    ))
}
