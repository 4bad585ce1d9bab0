//! Deterministic document rendering. Every run writes one document that
//! opens with the tool versions and the full resolved configuration, so
//! two runs with the same settings produce byte-identical output except
//! for the single wall-time field.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use serde_json::{Map, Value};

use crate::config::{Common, Format};
use crate::{CliError, CliResult};

/// Version of this binary.
pub const CLI_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One run's document: a config header plus either CSV rows with comment
/// trailers or a JSON object.
pub struct Document {
    command: &'static str,
    header: BTreeMap<String, String>,
    columns: Option<String>,
    rows: Vec<String>,
    trailers: Vec<(String, String)>,
    json: Map<String, Value>,
}

impl Document {
    pub fn new(command: &'static str, common: &Common) -> Document {
        let mut header = common.header();
        header.insert("command".to_string(), command.to_string());
        Document {
            command,
            header,
            columns: None,
            rows: Vec::new(),
            trailers: Vec::new(),
            json: Map::new(),
        }
    }

    /// Adds a resolved setting to the header.
    pub fn setting(&mut self, key: &str, value: impl Into<String>) {
        self.header.insert(key.to_string(), value.into());
    }

    /// Sets the CSV column header line.
    pub fn columns(&mut self, columns: &str) {
        self.columns = Some(columns.to_string());
    }

    /// Appends one CSV data row.
    pub fn row(&mut self, row: String) {
        self.rows.push(row);
    }

    /// Appends a `# key=value` comment after the CSV rows.
    pub fn trailer(&mut self, key: &str, value: impl Into<String>) {
        self.trailers.push((key.to_string(), value.into()));
    }

    /// Adds a field to the JSON payload.
    pub fn field(&mut self, key: &str, value: Value) {
        self.json.insert(key.to_string(), value);
    }

    /// Renders the document in the selected format.
    pub fn render(&self, format: Format, wall: Duration) -> String {
        match format {
            Format::Csv => self.render_csv(wall),
            Format::Json => self.render_json(wall),
        }
    }

    fn render_csv(&self, wall: Duration) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# hurwitz {CLI_VERSION} core {}\n",
            hurwitz_core::VERSION
        ));
        for (key, value) in &self.header {
            out.push_str(&format!("# {key}={value}\n"));
        }
        if let Some(columns) = &self.columns {
            out.push_str(columns);
            out.push('\n');
        }
        for row in &self.rows {
            out.push_str(row);
            out.push('\n');
        }
        for (key, value) in &self.trailers {
            out.push_str(&format!("# {key}={value}\n"));
        }
        out.push_str(&format!("# wall_ms={}\n", wall.as_millis()));
        out
    }

    fn render_json(&self, wall: Duration) -> String {
        let mut root = Map::new();
        root.insert("command".to_string(), Value::from(self.command));
        root.insert(
            "tool".to_string(),
            serde_json::json!({
                "cli": CLI_VERSION,
                "core": hurwitz_core::VERSION,
            }),
        );
        let config: Map<String, Value> = self
            .header
            .iter()
            .map(|(k, v)| (k.clone(), Value::from(v.as_str())))
            .collect();
        root.insert("config".to_string(), Value::Object(config));
        for (key, value) in &self.json {
            root.insert(key.clone(), value.clone());
        }
        root.insert("wall_ms".to_string(), Value::from(wall.as_millis() as u64));
        let mut text = serde_json::to_string_pretty(&Value::Object(root))
            .expect("document serializes");
        text.push('\n');
        text
    }
}

/// Writes the rendered text to the output path, or stdout when none.
pub fn write_out(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(CliError::Io),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes()).map_err(CliError::Io)?;
            lock.flush().map_err(CliError::Io)
        }
    }
}

/// Empty-cell helper for optional CSV values.
pub fn cell<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}
