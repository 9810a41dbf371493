//! Report values, CSV tables and plot companions.

use std::fs;
use std::path::Path;

use polyspec::quad::QuadratureResult;
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub const CSV_SCHEMA: &str = "polyspec-csv/1";
pub const REPORT_SCHEMA: &str = "polyspec-report/1";

/// A reported number: an estimate with its error bar, an exact value, or a
/// value tagged with how it was obtained when no error bar exists (e.g. a
/// sampled maximum, which is only a lower bound).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Num {
    Est(f64, f64),
    Exact(f64),
    Tagged(f64, &'static str),
}

impl Num {
    pub fn value(&self) -> f64 {
        match *self {
            Num::Est(v, _) | Num::Exact(v) | Num::Tagged(v, _) => v,
        }
    }

    fn err_cell(&self) -> String {
        match *self {
            Num::Est(_, e) => fmt(e),
            Num::Exact(_) => "exact".into(),
            Num::Tagged(_, t) => t.into(),
        }
    }
}

impl From<&QuadratureResult> for Num {
    fn from(q: &QuadratureResult) -> Self {
        Num::Est(q.value, q.error_estimate)
    }
}

impl Serialize for Num {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Num::Est(v, e) => json!({ "value": v, "error": e }),
            Num::Exact(v) => json!({ "value": v, "exact": true }),
            Num::Tagged(v, t) => json!({ "value": v, "estimate": t }),
        }
        .serialize(s)
    }
}

/// Shortest round-trip text of a float.
pub fn fmt(x: f64) -> String {
    format!("{x:?}")
}

/// A CSV table whose numeric columns each get a `_err` companion.
pub struct Table {
    command: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

pub enum Cell {
    Num(Num),
    Int(usize),
    Text(String),
}

impl Table {
    /// `columns` are `(name, is_numeric)`: numeric columns are followed by
    /// `name_err` holding an error bar or a tag.
    pub fn new(command: &str, columns: &[(&str, bool)]) -> Self {
        let mut header = Vec::new();
        for &(c, numeric) in columns {
            header.push(c.to_string());
            if numeric {
                header.push(format!("{c}_err"));
            }
        }
        Self {
            command: command.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<Cell>) {
        let mut row = Vec::with_capacity(self.header.len());
        for c in cells {
            match c {
                Cell::Num(n) => {
                    row.push(fmt(n.value()));
                    row.push(n.err_cell());
                }
                Cell::Int(i) => row.push(i.to_string()),
                Cell::Text(t) => row.push(t),
            }
        }
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(io_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(io_err)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(format!("# schema: {CSV_SCHEMA} {}\n{body}", self.command))
    }
}

fn io_err(e: csv::Error) -> CliError {
    CliError::Usage(format!("cannot write CSV: {e}"))
}

/// Plot companion: columns `x, y, y_err, theory` plus optional extras.
pub struct Plot {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub loglog: bool,
    pub polygons: bool,
    pub table: Table,
}

impl Plot {
    pub fn lines(command: &str, title: &str, xlabel: &str, ylabel: &str, loglog: bool) -> Self {
        Self {
            title: title.into(),
            xlabel: xlabel.into(),
            ylabel: ylabel.into(),
            loglog,
            polygons: false,
            table: Table::new(command, &[("x", false), ("y", true), ("theory", false)]),
        }
    }

    pub fn point(&mut self, x: f64, y: Num, theory: Option<f64>) {
        self.table.push(vec![
            Cell::Text(fmt(x)),
            Cell::Num(y),
            Cell::Text(theory.map(fmt).unwrap_or_default()),
        ]);
    }

    fn script(&self, data: &str) -> String {
        PLOT_TEMPLATE
            .replace("{data}", data)
            .replace("{title}", &self.title)
            .replace("{xlabel}", &self.xlabel)
            .replace("{ylabel}", &self.ylabel)
            .replace("{loglog}", if self.loglog { "True" } else { "False" })
            .replace("{polygons}", if self.polygons { "True" } else { "False" })
    }
}

const PLOT_TEMPLATE: &str = r##"# Plot template for polyspec output.
# Usage: python this_file.py [data.csv]
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{data}"
with open(path) as fh:
    rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))

def num(s):
    try:
        return float(s)
    except ValueError:
        return None

fig, ax = plt.subplots()
if {polygons}:
    groups = {}
    for r in rows:
        groups.setdefault(r["image"], []).append((num(r["x"]), num(r["y"])))
    for name, pts in groups.items():
        xs, ys = zip(*(pts + pts[:1]))
        ax.plot(xs, ys, lw=2.0 if name == "0" else 0.8)
    ax.set_aspect("equal")
else:
    x = [num(r["x"]) for r in rows]
    y = [num(r["y"]) for r in rows]
    err = [num(r["y_err"]) or 0.0 for r in rows]
    ax.errorbar(x, y, yerr=err, fmt="o", ms=3, label="computed")
    th = [(a, num(r["theory"])) for a, r in zip(x, rows) if num(r["theory"]) is not None]
    if th:
        ax.plot(*zip(*th), "-", label="theory")
    if {loglog}:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.legend()
ax.set_title("{title}")
ax.set_xlabel("{xlabel}")
ax.set_ylabel("{ylabel}")
fig.tight_layout()
plt.show()
"##;

/// Everything a command produces; written once at the end.
pub struct Outcome {
    pub report: Value,
    pub csv: Option<Table>,
    pub plot: Option<Plot>,
    /// Exit code for a completed run (0, 2 or 3).
    pub code: u8,
}

pub fn wrap_report(command: &str, config: &Value, body: Value) -> Value {
    let mut out = json!({ "schema": REPORT_SCHEMA, "command": command, "config": config });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    out
}

pub fn write_outputs(command: &str, out: &Outcome, dir: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&out.report).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
        let put = |name: String, body: &str| {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display())))
        };
        put(format!("{command}.json"), &format!("{text}\n"))?;
        if let Some(t) = &out.csv {
            put(format!("{command}.csv"), &t.render()?)?;
        }
        if let Some(p) = &out.plot {
            let data = format!("{command}.plot.csv");
            put(data.clone(), &p.table.render()?)?;
            put(format!("{command}.plot.py"), &p.script(&data))?;
        }
    }
    println!("{text}");
    Ok(())
}
