use cartier_core::ReductionStep;
use serde::Serialize;
use serde_json::{Map, Value};
use std::fmt::Write;

/// One applied reduction rule.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LogEntry {
    pub rule: String,
    pub layer: usize,
    pub removed: Option<String>,
    pub added: Option<String>,
}

impl From<&ReductionStep> for LogEntry {
    fn from(s: &ReductionStep) -> Self {
        LogEntry {
            rule: s.rule.name().to_string(),
            layer: s.level,
            removed: s.removed.as_ref().map(|x| x.to_string()),
            added: s.added.as_ref().map(|x| x.to_string()),
        }
    }
}

/// Result of one command. Field order is the json key order.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub decided: Option<u32>,
    pub representative: Option<String>,
    pub log: Option<Vec<LogEntry>>,
    pub precision: Option<i64>,
    pub values: Map<String, Value>,
    pub timing_us: u64,
    #[serde(skip)]
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            decided: None,
            representative: None,
            log: None,
            precision: None,
            values: Map::new(),
            timing_us: 0,
            exit_code: 0,
        }
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) {
        self.values.insert(key.to_string(), v.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.command);
        if let Some(d) = self.decided {
            let _ = writeln!(s, "decided: {d}");
        }
        if let Some(r) = &self.representative {
            let _ = writeln!(s, "representative: {r}");
        }
        if let Some(p) = self.precision {
            let _ = writeln!(s, "precision: {p}");
        }
        for (k, v) in &self.values {
            match v {
                Value::String(x) => {
                    let _ = writeln!(s, "{k}: {x}");
                }
                Value::Array(items) if items.iter().all(|i| i.is_object()) => {
                    let _ = writeln!(s, "{k}:");
                    for i in items {
                        let fields: Vec<String> = i
                            .as_object()
                            .into_iter()
                            .flatten()
                            .filter(|(_, v)| !v.is_null())
                            .map(|(k, v)| match v {
                                Value::String(x) => format!("{k}={x}"),
                                v => format!("{k}={v}"),
                            })
                            .collect();
                        let _ = writeln!(s, "  {}", fields.join(" "));
                    }
                }
                v => {
                    let _ = writeln!(s, "{k}: {v}");
                }
            }
        }
        if let Some(log) = &self.log {
            let _ = writeln!(s, "log:");
            for (i, e) in log.iter().enumerate() {
                let _ = write!(s, "  {}. {} [layer {}]", i + 1, e.rule, e.layer);
                match (&e.removed, &e.added) {
                    (Some(r), Some(a)) => {
                        let _ = write!(s, ": {r} -> {a}");
                    }
                    (Some(r), None) => {
                        let _ = write!(s, ": {r}");
                    }
                    (None, Some(a)) => {
                        let _ = write!(s, ": -> {a}");
                    }
                    (None, None) => {}
                }
                s.push('\n');
            }
        }
        let _ = writeln!(s, "time: {} us", self.timing_us);
        s
    }
}
