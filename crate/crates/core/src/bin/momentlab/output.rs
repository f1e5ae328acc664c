//! JSON-lines and CSV writers with a provenance header, and the summary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::Duration;

use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use momentlab::Result;

/// One output record; `check` is `None` for informational rows.
pub struct Row {
    pub label: String,
    pub data: Value,
    pub check: Option<bool>,
}

impl Row {
    pub fn info(label: impl Into<String>, data: Value) -> Self {
        Row { label: label.into(), data, check: None }
    }

    pub fn check(label: impl Into<String>, data: Value, pass: bool) -> Self {
        Row { label: label.into(), data, check: Some(pass) }
    }
}

fn sink(path: Option<&str>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn flatten(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(_) => {}
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

fn csv_cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(x) => x.to_string(),
    }
}

/// Scalar fields of the rows as a table; nested objects become dotted columns.
pub fn csv_table(rows: &[Row]) -> String {
    let flat: Vec<Map<String, Value>> = rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            flatten("", &r.data, &mut m);
            m.insert("check".into(), r.check.map_or(Value::Null, |p| Value::from(if p { "pass" } else { "fail" })));
            m
        })
        .collect();
    let mut columns: Vec<String> = Vec::new();
    for m in &flat {
        for k in m.keys() {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
    }
    let mut out = columns.join(",") + "\n";
    for m in &flat {
        out += &columns.iter().map(|c| csv_cell(m.get(c))).collect::<Vec<_>>().join(",");
        out.push('\n');
    }
    out
}

/// Writes all outputs; returns whether every check passed.
pub fn emit(cfg: &RunConfig, rows: &[Row], table: Option<&str>, elapsed: Duration) -> Result<bool> {
    let checks: Vec<&Row> = rows.iter().filter(|r| r.check.is_some()).collect();
    let failed: Vec<&Row> = checks.iter().copied().filter(|r| r.check == Some(false)).collect();
    let vacuous = checks.is_empty() && rows.is_empty();

    let mut w = sink(cfg.output.as_deref())?;
    writeln!(w, "{}", json!({ "type": "provenance", "provenance": cfg.provenance() }))?;
    for r in rows {
        let check = r.check.map_or(Value::Null, |p| Value::from(if p { "pass" } else { "fail" }));
        writeln!(w, "{}", json!({ "type": "row", "label": r.label, "check": check, "data": r.data }))?;
    }
    writeln!(
        w,
        "{}",
        json!({ "type": "summary", "checks": checks.len(), "passed": checks.len() - failed.len(), "failed": failed.len(), "vacuous": vacuous })
    )?;
    w.flush()?;

    if let Some(path) = &cfg.csv {
        let mut c = BufWriter::new(File::create(path)?);
        writeln!(c, "# {}", cfg.provenance())?;
        match table {
            Some(t) => c.write_all(t.as_bytes())?,
            None => c.write_all(csv_table(rows).as_bytes())?,
        }
        c.flush()?;
    }

    let mut e = io::stderr().lock();
    writeln!(
        e,
        "{}: {} rows, {} checks, {} passed, {} failed{} ({:.2}s)",
        cfg.command.name,
        rows.len(),
        checks.len(),
        checks.len() - failed.len(),
        failed.len(),
        if vacuous { ", vacuous" } else { "" },
        elapsed.as_secs_f64()
    )?;
    for r in &failed {
        writeln!(e, "FAIL {}", r.label)?;
    }
    Ok(failed.is_empty())
}
