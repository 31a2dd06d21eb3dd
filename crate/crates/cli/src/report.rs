//! JSON report envelope and its plain-text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Bumped whenever the layout of any result payload changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub exact: bool,
    pub bounds: BTreeMap<String, Value>,
    pub validation_samples: Option<usize>,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn exact() -> Self {
        Provenance {
            exact: true,
            bounds: BTreeMap::new(),
            validation_samples: None,
            seed: None,
        }
    }

    pub fn bounded(bounds: BTreeMap<String, Value>) -> Self {
        Provenance {
            exact: false,
            bounds,
            validation_samples: None,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub group_spec: String,
    pub computation: String,
    pub parameters: BTreeMap<String, Value>,
    pub result: Value,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(
        group_spec: &str,
        computation: &str,
        parameters: BTreeMap<String, Value>,
        result: Value,
        provenance: Provenance,
    ) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            group_spec: group_spec.to_string(),
            computation: computation.to_string(),
            parameters,
            result,
            provenance,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn write_json(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.to_json()).with_context(|| format!("writing {}", path.display()))
    }

    /// `key = value` lines for the scalar and short-list parts of the result;
    /// long lists are summarised by their length.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.computation, self.group_spec);
        let rows: Vec<(String, String)> = match &self.result {
            Value::Object(map) => map.iter().map(|(k, v)| (k.clone(), short(v))).collect(),
            Value::Array(items) => items.iter().enumerate().map(|(i, v)| (i.to_string(), short(v))).collect(),
            v => vec![("result".into(), short(v))],
        };
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in rows {
            let _ = writeln!(out, "  {k:<width$} = {v}");
        }
        if self.result.get("exact").is_none() {
            let _ = writeln!(out, "  {:<width$} = {}", "exact", self.provenance.exact);
        }
        if let Some(seed) = self.provenance.seed {
            let _ = writeln!(out, "  {:<width$} = {seed}", "seed");
        }
        out
    }
}

const SHORT_LIMIT: usize = 16;

fn short(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) if items.len() > SHORT_LIMIT => format!("[{} items]", items.len()),
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            format!("[{} items]", items.len())
        }
        Value::Object(map) if map.len() > SHORT_LIMIT => format!("{{{} entries}}", map.len()),
        other => other.to_string(),
    }
}
