//! Result files and the one-line run summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::args::{Common, Format};
use crate::{CliError, CliResult};

/// Version of the summary line layout.
pub const SCHEMA_VERSION: u32 = 1;

/// The JSON object printed on standard output after every run.
#[derive(Debug, Clone)]
pub struct Summary {
    fields: Map<String, Value>,
    exit_code: u8,
}

impl Summary {
    pub fn new(command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("schema_version".into(), json!(SCHEMA_VERSION));
        fields.insert("command".into(), json!(command));
        fields.insert("status".into(), json!("ok"));
        Summary { fields, exit_code: 0 }
    }

    pub fn failure(command: &str, err: &CliError) -> Self {
        let mut s = Summary::new(command);
        let status = match err {
            CliError::Usage(_) => "usage_error",
            CliError::Numerical(_) => "failed",
        };
        s.fields.insert("status".into(), json!(status));
        s.fields.insert("error".into(), json!(err.to_string()));
        s.exit_code = err.exit_code();
        s
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.into(), value.into());
        self
    }

    /// Marks the run as finished without reaching its tolerance; the result
    /// file is still written and the exit code becomes 1.
    pub fn not_converged(&mut self) -> &mut Self {
        self.fields.insert("status".into(), json!("not_converged"));
        self.exit_code = 1;
        self
    }

    pub fn finish(&mut self, seconds: f64) {
        self.fields.insert("runtime_seconds".into(), json!(seconds));
    }

    pub fn exit_code(&self) -> u8 {
        self.exit_code
    }

    pub fn line(&self) -> String {
        Value::Object(self.fields.clone()).to_string()
    }
}

/// Named columns over a time grid. The CSV form starts with `t` and can be
/// read back as a trajectory.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            columns,
            ..Table::default()
        }
    }

    pub fn push(&mut self, t: f64, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.times.push(t);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for c in &self.columns {
            s.push(',');
            s.push_str(c);
        }
        s.push('\n');
        for (t, row) in self.times.iter().zip(&self.rows) {
            let _ = write!(s, "{t:e}");
            for v in row {
                let _ = write!(s, ",{v:e}");
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({ "columns": self.columns, "times": self.times, "states": self.rows })
    }
}

/// Column names `prefix0, prefix1, ...`.
pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Where and how a command writes its result.
pub struct Sink {
    pub path: PathBuf,
    pub format: Format,
}

impl Sink {
    pub fn new(common: &Common, command: &str) -> Self {
        let path = common
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("geomkit-{command}.{}", common.format.extension())));
        Sink {
            path,
            format: common.format,
        }
    }

    /// Sink for commands whose result is always a JSON document.
    pub fn json(common: &Common, command: &str) -> Self {
        Sink {
            path: common
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("geomkit-{command}.json"))),
            format: Format::Json,
        }
    }

    pub fn write_table(&self, table: &Table, summary: &mut Summary) -> CliResult<()> {
        let text = match self.format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json().to_string(),
        };
        self.write_text(&self.path, &text, summary)?;
        summary.set("rows", table.rows.len());
        Ok(())
    }

    /// JSON documents are written as JSON whatever the requested format.
    pub fn write_json(&self, value: &Value, summary: &mut Summary) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
        self.write_text(&self.path, &text, summary)
    }

    pub fn write_text(&self, path: &Path, text: &str, summary: &mut Summary) -> CliResult<()> {
        std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        summary.set("output", path.display().to_string());
        Ok(())
    }
}
