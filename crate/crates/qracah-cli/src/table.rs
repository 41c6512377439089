use serde_json::{json, Map, Value};

use crate::Format;

/// Rows under named columns plus `key=value` metadata.
pub struct Table {
    meta: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
    json: Option<Value>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { meta: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), json: None }
    }

    pub fn meta(&mut self, key: &str, value: &str) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, cells: Vec<Value>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn meta_json(&self) -> Value {
        Value::Object(self.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect())
    }

    /// Replaces the default JSON rendering.
    pub fn set_json(&mut self, v: Value) {
        self.json = Some(v);
    }

    pub fn to_json(&self) -> Value {
        if let Some(v) = &self.json {
            return v.clone();
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect::<Map<_, _>>()))
            .collect();
        json!({ "meta": self.meta_json(), "columns": self.columns, "rows": rows })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n",
            Format::Csv => {
                let mut out = String::new();
                for (k, v) in &self.meta {
                    out.push_str(&format!("# {k}={v}\n"));
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).expect("in-memory write");
                for r in &self.rows {
                    w.write_record(r.iter().map(cell)).expect("in-memory write");
                }
                out + &String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8")
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
