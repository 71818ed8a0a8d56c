//! Machine- and human-readable verdict documents. Reports are deterministic
//! for fixed inputs: all maps are ordered and no floats ever appear.

use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub command: String,
    pub status: Status,
    pub checks: Vec<CheckLine>,
    pub tables: BTreeMap<String, serde_json::Value>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            tool: "homalg",
            command: command.into(),
            status: Status::Pass,
            checks: Vec::new(),
            tables: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, status: Status, detail: impl Into<String>) {
        if status == Status::Error || (status == Status::Fail && self.status != Status::Error) {
            self.status = status;
        }
        self.checks.push(CheckLine {
            name: name.into(),
            status,
            detail: detail.into(),
        });
    }

    pub fn table(&mut self, name: impl Into<String>, value: serde_json::Value) {
        self.tables.insert(name.into(), value);
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "homalg {} : {}\n",
            self.command,
            status_word(self.status)
        ));
        for c in &self.checks {
            out.push_str(&format!("[{}] {}", status_word(c.status), c.name));
            if !c.detail.is_empty() {
                out.push_str(&format!(": {}", c.detail));
            }
            out.push('\n');
        }
        for (name, v) in &self.tables {
            out.push_str(&format!("{name}:\n"));
            out.push_str(&render_value(v, 2));
        }
        out
    }

    pub fn render_machine(&self) -> String {
        // serde_json keeps struct order and BTreeMap order: byte-stable
        serde_json::to_string_pretty(self).expect("report serialization") + "\n"
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "ok",
        Status::Fail => "FAIL",
        Status::Error => "error",
    }
}

fn render_value(v: &serde_json::Value, indent: usize) -> String {
    let pad = " ".repeat(indent);
    match v {
        serde_json::Value::Array(items) => items
            .iter()
            .map(|i| format!("{pad}- {}\n", inline(i)))
            .collect(),
        serde_json::Value::Object(map) => map
            .iter()
            .map(|(k, val)| format!("{pad}{k}: {}\n", inline(val)))
            .collect(),
        other => format!("{pad}{}\n", inline(other)),
    }
}

fn inline(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_escalates_and_exit_codes_map() {
        let mut r = Report::new("verify");
        r.push("a", Status::Pass, "");
        assert_eq!(r.exit_code(), 0);
        r.push("b", Status::Fail, "relation violated");
        assert_eq!(r.exit_code(), 1);
        r.push("c", Status::Error, "parse");
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn rendering_is_deterministic() {
        let mut r = Report::new("trees");
        r.push("count", Status::Pass, "3");
        r.table("by_codim", serde_json::json!({"0": 1, "1": 2}));
        assert_eq!(r.render_text(), r.render_text());
        assert_eq!(r.render_machine(), r.render_machine());
    }
}
