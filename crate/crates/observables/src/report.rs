use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::error::ObservablesError;

/// Ordered key-value report, written as JSON and as `key = value` text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: BTreeMap<String, Value>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.entries.insert(key.into(), value.into());
    }

    /// Non-finite floats become strings so the JSON stays valid.
    pub fn set_f64(&mut self, key: impl Into<String>, v: f64) {
        let value = if v.is_finite() { Value::from(v) } else { Value::from(v.to_string()) };
        self.entries.insert(key.into(), value);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.entries.get(key).and_then(|v| v.as_f64())
    }

    pub fn merge_prefixed(&mut self, prefix: &str, other: &Report) {
        for (k, v) in &other.entries {
            self.entries.insert(format!("{prefix}{k}"), v.clone());
        }
    }

    pub fn to_json(&self) -> String {
        let map: serde_json::Map<String, Value> = self.entries.clone().into_iter().collect();
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            match v {
                Value::String(t) => s.push_str(&format!("{k} = {t}\n")),
                other => s.push_str(&format!("{k} = {other}\n")),
            }
        }
        s
    }

    pub fn write(&self, json_path: &Path, text_path: &Path) -> Result<(), ObservablesError> {
        std::fs::File::create(json_path)?.write_all(self.to_json().as_bytes())?;
        std::fs::File::create(text_path)?.write_all(self.to_text().as_bytes())?;
        Ok(())
    }
}
