use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Everything needed to rerun a command: the tool version, the command path
/// and every parameter that influenced the result.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub params: Map<String, Value>,
}

impl Provenance {
    pub fn new(command: &str) -> Self {
        Provenance {
            tool: env!("CARGO_BIN_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            params: Map::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), to_value(value));
        self
    }
}

pub fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report types serialize to JSON")
}

/// A finished command: the JSON result plus optional CSV and text renderings.
pub struct Report {
    pub provenance: Provenance,
    pub result: Value,
    pub csv: Option<String>,
    pub text: Option<String>,
    pub default_format: Format,
}

impl Report {
    pub fn new(provenance: Provenance, result: impl Serialize) -> Self {
        Report { provenance, result: to_value(result), csv: None, text: None, default_format: Format::Json }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }

    pub fn default_format(mut self, format: Format) -> Self {
        self.default_format = format;
        self
    }

    pub fn render(&self, format: Option<Format>) -> Result<String, CliError> {
        match format.unwrap_or(self.default_format) {
            Format::Json => {
                #[derive(Serialize)]
                struct Envelope<'a> {
                    provenance: &'a Provenance,
                    result: &'a Value,
                }
                let mut s =
                    serde_json::to_string_pretty(&Envelope { provenance: &self.provenance, result: &self.result })
                        .expect("report serializes");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let body = self
                    .csv
                    .as_ref()
                    .ok_or_else(|| CliError::input(format!("`{}` has no CSV output", self.provenance.command)))?;
                let mut s = String::new();
                for line in self.header_lines() {
                    s.push_str("# ");
                    s.push_str(&line);
                    s.push('\n');
                }
                s.push_str(body);
                Ok(s)
            }
            Format::Text => match &self.text {
                Some(t) => Ok(t.clone()),
                None => {
                    let mut s = serde_json::to_string_pretty(&self.result).expect("report serializes");
                    s.push('\n');
                    Ok(s)
                }
            },
        }
    }

    fn header_lines(&self) -> Vec<String> {
        let p = &self.provenance;
        let mut lines = vec![format!("{} {} {}", p.tool, p.version, p.command)];
        lines.extend(p.params.iter().map(|(k, v)| format!("{k} = {v}")));
        lines
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::input(format!("cannot write to stdout: {e}")))
        }
    }
}
