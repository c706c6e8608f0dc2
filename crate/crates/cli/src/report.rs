use std::collections::BTreeMap;
use std::fmt::Write as _;

use condsym_core::report::{Check, Verdict};
use condsym_core::Expr;
use serde::Serialize;
use serde_json::Value;

/// Everything one invocation produced. Maps are ordered so the JSON
/// rendering is byte-stable.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub residuals: Vec<Check>,
    pub artifacts: BTreeMap<String, Value>,
    pub errors: Vec<String>,
    pub exit: i32,
    /// Pretty forms of expression artifacts for the text rendering.
    #[serde(skip)]
    pretty: BTreeMap<String, String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            residuals: Vec::new(),
            artifacts: BTreeMap::new(),
            errors: Vec::new(),
            exit: 0,
            pretty: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, name: &str, value: impl Into<Value>) {
        self.inputs.insert(name.to_string(), value.into());
    }

    pub fn artifact(&mut self, name: &str, value: impl Into<Value>) {
        self.artifacts.insert(name.to_string(), value.into());
    }

    /// Canonical (fully parenthesized) in JSON, pretty in text.
    pub fn expr_artifact(&mut self, name: &str, e: &Expr) {
        self.artifact(name, e.canonical());
        self.pretty.insert(name.to_string(), e.to_string());
    }

    pub fn check(&mut self, c: Check) {
        self.residuals.push(c);
    }

    pub fn error(&mut self, e: impl ToString) {
        self.errors.push(e.to_string());
    }

    /// Sets `exit`: 0 when every residual passed and nothing went wrong.
    pub fn finish(mut self) -> Self {
        let ok = self.errors.is_empty() && self.residuals.iter().all(Check::passed);
        self.exit = if ok { 0 } else { 1 };
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for (k, v) in &self.inputs {
            let _ = writeln!(out, "input {k} = {}", plain(v));
        }
        for (k, v) in &self.artifacts {
            let shown = self.pretty.get(k).cloned().unwrap_or_else(|| plain(v));
            let _ = writeln!(out, "{k} = {shown}");
        }
        for c in &self.residuals {
            let _ = write!(out, "{} {}", c.verdict.label(), c.name);
            match c.max_abs {
                Some(m) => {
                    let _ = write!(out, " max_abs={m:e}");
                }
                None => out.push_str(" max_abs=none"),
            }
            let _ = write!(out, " tolerance={:e}", c.tolerance);
            if let Some(w) = &c.witness {
                let at: Vec<String> = w.iter().map(|(k, v)| format!("{k}={v:e}")).collect();
                let _ = write!(out, " witness[{}]", at.join(","));
            }
            out.push('\n');
        }
        for e in &self.errors {
            let _ = writeln!(out, "error: {e}");
        }
        let summary = if self.exit == 0 { Verdict::Pass } else { Verdict::Fail };
        let _ = writeln!(out, "result: {} (exit {})", summary.label(), self.exit);
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
