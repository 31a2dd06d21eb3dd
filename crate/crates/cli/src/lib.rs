//! Command-line front end: argument parsing, reports, cache and DOT output.

pub mod cache;
pub mod commands;
pub mod dot;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use crate::cache::Cache;
use crate::commands::{Context, PropertyArg, UsageError, GRAMMAR};

#[derive(Debug, Parser)]
#[command(name = "prodone", version, about = "Product-one sequences over finite groups", after_help = GRAMMAR)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report to this file
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Write the cyclic subsemigroup lattice (class-semigroup only)
    #[arg(long, global = true, value_name = "PATH")]
    pub dot: Option<PathBuf>,
    /// Search or length bound; meaning depends on the subcommand
    #[arg(long, global = true, value_name = "N")]
    pub bound: Option<usize>,
    /// Seed for randomized validation
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Cache directory (default: $PRODONE_CACHE_DIR, then the user cache dir)
    #[arg(long, global = true, value_name = "PATH")]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Order, center, commutator subgroup and abelianization
    Group { group: String },
    /// Atoms of B(G); --bound limits their length
    Atoms { group: String },
    /// Small and large Davenport constants
    Davenport { group: String },
    /// Set of lengths of a product-one sequence
    Lengths {
        group: String,
        sequence: String,
        /// Also count factorizations
        #[arg(long)]
        count: bool,
    },
    /// Class semigroup, its idempotents, units and regularity
    ClassSemigroup { group: String },
    /// Unions of sets of lengths U_k for k up to --bound (default 3)
    Unions { group: String },
    /// Set of distances over sequences up to length --bound (default 8)
    Delta {
        group: String,
        /// Length bound known to realize the whole set of distances
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Bounds on the omega invariant; --bound is the search budget
    Omega { group: String },
    /// Davenport constants of the class semigroup
    SemigroupDavenport { group: String },
    /// Structural verdict; --bound is the witness length bound
    Check {
        group: String,
        #[arg(long, value_enum)]
        property: PropertyArg,
    },
    /// Summary over several groups
    Atlas {
        #[arg(required = true)]
        groups: Vec<String>,
    },
}

fn cache_dir(cli: &Cli) -> Option<PathBuf> {
    if cli.no_cache {
        return None;
    }
    if let Some(d) = &cli.cache_dir {
        return Some(d.clone());
    }
    let env = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
    env("PRODONE_CACHE_DIR")
        .or_else(|| env("XDG_CACHE_HOME").map(|d| d.join("prodone")))
        .or_else(|| env("HOME").map(|d| d.join(".cache").join("prodone")))
}

pub fn execute(cli: &Cli) -> Result<()> {
    let cache = match cache_dir(cli) {
        Some(d) => Cache::open(&d),
        None => Cache::disabled(),
    };
    let ctx = Context {
        cache,
        bound: cli.bound,
        seed: cli.seed,
    };
    if cli.dot.is_some() && !matches!(cli.command, Command::ClassSemigroup { .. }) {
        return Err(UsageError("--dot is only available for class-semigroup".into()).into());
    }
    let report = match &cli.command {
        Command::Group { group } => commands::group_info(&ctx, group)?,
        Command::Atoms { group } => commands::atoms(&ctx, group)?,
        Command::Davenport { group } => commands::davenport_constants(&ctx, group)?,
        Command::Lengths { group, sequence, count } => commands::lengths(&ctx, group, sequence, *count)?,
        Command::ClassSemigroup { group } => commands::class_semigroup(&ctx, group)?,
        Command::Unions { group } => commands::unions(&ctx, group)?,
        Command::Delta { group, cap } => commands::delta(&ctx, group, *cap)?,
        Command::Omega { group } => commands::omega(&ctx, group)?,
        Command::SemigroupDavenport { group } => commands::semigroup_davenport(&ctx, group)?,
        Command::Check { group, property } => commands::check(&ctx, group, *property)?,
        Command::Atlas { groups } => commands::atlas(&ctx, groups)?,
    };
    print!("{}", report.render_table());
    if let Some(path) = &cli.json {
        report.write_json(path)?;
    }
    if let Some(path) = &cli.dot {
        std::fs::write(path, dot_for(&report)?)?;
    }
    Ok(())
}

fn dot_for(report: &report::Report) -> Result<String> {
    let r = &report.result;
    let Some(op) = r.get("op").and_then(|v| serde_json::from_value::<Vec<Vec<usize>>>(v.clone()).ok()) else {
        bail!("report has no operation table");
    };
    let list = |k: &str| -> Result<Vec<usize>> {
        Ok(serde_json::from_value(r.get(k).cloned().unwrap_or_default())?)
    };
    Ok(dot::emit_dot(&op, &[("units", list("units")?), ("quotient", list("quotient_copy")?)]))
}

/// Runs the CLI and returns the process exit code: 0 on success, 1 on a
/// computation error, 2 on a usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                eprintln!("\n{GRAMMAR}");
                2
            } else {
                1
            }
        }
    }
}
