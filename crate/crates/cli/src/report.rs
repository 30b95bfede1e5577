//! Tabular output shared by all commands, rendered as CSV or JSON.

use serde_json::{json, Map, Value};
use std::fmt::Write as _;

pub const CONVENTION: &str = "U(phi) = diag(exp(+i phi/2), exp(-i phi/2)) about +z; \
phase = arg <psi(0)|psi(phi)>; upper hemisphere grows with slope +1/2";

/// Rows sharing one set of labels, e.g. one polar angle.
pub struct Block {
    pub labels: Vec<(&'static str, Value)>,
    pub rows: Vec<Vec<Value>>,
    pub jumps: Vec<Vec<(&'static str, Value)>>,
}

impl Block {
    pub fn new(labels: Vec<(&'static str, Value)>) -> Self {
        Block {
            labels,
            rows: Vec::new(),
            jumps: Vec::new(),
        }
    }
}

pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub columns: &'static [&'static str],
    pub blocks: Vec<Block>,
}

impl Report {
    fn meta(&self) -> Value {
        json!({
            "tool": "spinphase",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "convention": CONVENTION,
            "units": "angles in degrees unless a column name ends in _rad",
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# spinphase {} {}", env!("CARGO_PKG_VERSION"), self.command).unwrap();
        writeln!(out, "# config: {}", self.config).unwrap();
        writeln!(out, "# convention: {CONVENTION}").unwrap();
        writeln!(out, "# undefined phases: defined=0 with an empty field").unwrap();
        for block in &self.blocks {
            if !block.labels.is_empty() {
                let labels: Vec<String> = block
                    .labels
                    .iter()
                    .map(|(k, v)| format!("{k}={}", csv_cell(v)))
                    .collect();
                writeln!(out, "# {}", labels.join(" ")).unwrap();
            }
            for jump in &block.jumps {
                let fields: Vec<String> = jump.iter().map(|(k, v)| format!("{k}={}", csv_cell(v))).collect();
                writeln!(out, "# jump {}", fields.join(" ")).unwrap();
            }
            writeln!(out, "{}", self.columns.join(",")).unwrap();
            for row in &block.rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                writeln!(out, "{}", cells.join(",")).unwrap();
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut samples = Vec::new();
        let mut jumps = Vec::new();
        for block in &self.blocks {
            for row in &block.rows {
                let mut obj = Map::new();
                for (k, v) in &block.labels {
                    obj.insert((*k).into(), v.clone());
                }
                for (k, v) in self.columns.iter().zip(row) {
                    obj.insert((*k).into(), v.clone());
                }
                samples.push(Value::Object(obj));
            }
            for jump in &block.jumps {
                let mut obj = Map::new();
                for (k, v) in block.labels.iter().chain(jump) {
                    obj.insert((*k).into(), v.clone());
                }
                jumps.push(Value::Object(obj));
            }
        }
        let doc = json!({ "meta": self.meta(), "samples": samples, "jumps": jumps });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable report");
        s.push('\n');
        s
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => u8::from(*b).to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON number, or null when absent or not finite.
pub fn num(x: Option<f64>) -> Value {
    x.filter(|v| v.is_finite()).map(Value::from).unwrap_or(Value::Null)
}
