use anyhow::Result;
use clap::ValueEnum;
use serde_json::{json, Map, Value};

use crate::Command;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub struct Meta {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub modulus_policy: &'static str,
}

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify { .. } => "classify",
        Command::Criterion { .. } => "criterion",
        Command::Scan { .. } => "scan",
        Command::Count { .. } => "count",
        Command::Census { .. } => "census",
        Command::Verify { .. } => "verify",
        Command::Search { .. } => "search",
        Command::Recheck { .. } => "recheck",
        Command::CharsVerify { .. } => "chars-verify",
    }
}

pub fn render(format: Format, meta: &Meta, result: Value) -> Result<String> {
    match format {
        Format::Json => {
            let doc = json!({
                "command": meta.command,
                "version": meta.version,
                "seed": meta.seed,
                "modulus_policy": meta.modulus_policy,
                "result": result,
            });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        Format::Csv => csv(meta, &result),
        Format::Text => {
            let mut out = format!(
                "# cnbase {} {} seed={} modulus_policy={}\n",
                meta.version, meta.command, meta.seed, meta.modulus_policy
            );
            text(&result, 0, &mut out);
            Ok(out)
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Arrays become one row per element; a report carrying `checks` is
/// tabulated by its checks; anything else is a single row.
fn rows(result: &Value) -> Vec<Map<String, Value>> {
    let as_row = |v: &Value| match v {
        Value::Object(m) => m.clone(),
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other.clone());
            m
        }
    };
    match result {
        Value::Array(items) => items.iter().map(as_row).collect(),
        Value::Object(m) if m.get("checks").is_some_and(Value::is_array) => {
            m["checks"].as_array().expect("checked").iter().map(as_row).collect()
        }
        other => vec![as_row(other)],
    }
}

/// Column order of `scan` CSV output.
pub const SCAN_COLUMNS: [&str; 10] = [
    "q", "n", "omega", "omega_source", "Omega", "Omega_eps", "Omega_c", "lhs", "rhs_squared", "holds",
];

fn csv(meta: &Meta, result: &Value) -> Result<String> {
    let rows = rows(result);
    let mut columns: Vec<String> = vec![];
    if meta.command == "scan" {
        columns = SCAN_COLUMNS.iter().map(|c| c.to_string()).collect();
    }
    for r in &rows {
        for k in r.keys() {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(vec![]);
    if !columns.is_empty() {
        w.write_record(&columns)?;
    }
    for r in &rows {
        w.write_record(columns.iter().map(|c| r.get(c).map(cell).unwrap_or_default()))?;
    }
    let body = String::from_utf8(w.into_inner()?)?;
    Ok(format!(
        "# cnbase {} {} seed={} modulus_policy={}\n{body}",
        meta.version, meta.command, meta.seed, meta.modulus_policy
    ))
}

fn text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if x.is_object() || (x.is_array() && x.as_array().unwrap().iter().any(|e| e.is_object())) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    text(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", cell(x)));
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                out.push_str(&format!("{pad}- [{i}]\n"));
                text(x, indent + 1, out);
            }
        }
        other => out.push_str(&format!("{pad}{}\n", cell(other))),
    }
}
