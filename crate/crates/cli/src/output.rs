use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use nbcrw_core::{Error, ErrorKind};

use crate::args::{Format, Global};

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { kind: e.kind(), message: e.to_string() }
    }
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::InvalidParams, message: message.into() }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": self.kind.as_str(),
            "exit_code": self.kind.exit_code(),
            "message": self.message,
        })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Reads a file (or stdin for `-`) and records its digest.
pub fn read_input(path: &Path) -> CliResult<(String, InputDigest)> {
    let mut raw = Vec::new();
    let res = if path.as_os_str() == "-" {
        io::stdin().read_to_end(&mut raw).map(|_| ())
    } else {
        fs::File::open(path).and_then(|mut f| f.read_to_end(&mut raw)).map(|_| ())
    };
    res.map_err(|e| CliError { kind: ErrorKind::ParseError, message: format!("{}: {e}", path.display()) })?;
    let digest = InputDigest {
        path: path.display().to_string(),
        sha256: hex(&Sha256::digest(&raw)),
        bytes: raw.len(),
    };
    let text = String::from_utf8(raw)
        .map_err(|e| CliError { kind: ErrorKind::ParseError, message: format!("{}: {e}", path.display()) })?;
    Ok((text, digest))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub params: Value,
    pub global: Global,
    pub inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl Manifest {
    pub fn new(command: &'static str, params: Value, global: &Global) -> Self {
        Manifest {
            tool: "nbcrw",
            version: env!("CARGO_PKG_VERSION"),
            command,
            params,
            global: global.clone(),
            inputs: Vec::new(),
            elapsed_ms: None,
        }
    }
}

/// Rows for CSV output. Comment lines go after the rows.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub trailer: Vec<String>,
}

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub enum Payload {
    Report { json: Value, table: Option<Table> },
    /// Already formatted (edge lists).
    Text(String),
}

pub fn emit(global: &Global, manifest: &Manifest, payload: Payload) -> CliResult<()> {
    let manifest_json = serde_json::to_value(manifest).expect("manifest serialises");
    let body = match payload {
        Payload::Text(t) => t,
        Payload::Report { json, table } => match global.format {
            Format::Json => {
                let mut out = Map::new();
                out.insert("manifest".into(), manifest_json);
                out.insert("result".into(), json);
                let mut s = serde_json::to_string_pretty(&Value::Object(out)).expect("report serialises");
                s.push('\n');
                s
            }
            Format::Csv => {
                let table = table.unwrap_or_else(|| flatten_table(&json));
                let mut s = format!("# manifest {}\n", serde_json::to_string(&manifest_json).expect("manifest serialises"));
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&table.header).map_err(csv_err)?;
                for r in &table.rows {
                    w.write_record(r).map_err(csv_err)?;
                }
                s.push_str(&String::from_utf8(w.into_inner().map_err(|e| csv_err(e.into_error()))?).expect("utf-8"));
                for t in &table.trailer {
                    s.push_str("# ");
                    s.push_str(t);
                    s.push('\n');
                }
                s
            }
        },
    };
    match &global.output {
        Some(path) => fs::write(path, body).map_err(|e| CliError::invalid(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .lock()
            .write_all(body.as_bytes())
            .map_err(|e| CliError::invalid(format!("stdout: {e}"))),
    }
}

fn csv_err(e: impl std::fmt::Display) -> CliError {
    CliError::invalid(format!("csv: {e}"))
}

/// `path,value` rows for reports without a natural table shape.
pub fn flatten_table(v: &Value) -> Table {
    let mut rows = Vec::new();
    flatten(v, String::new(), &mut rows);
    Table { header: vec!["path".into(), "value".into()], rows, trailer: Vec::new() }
}

fn flatten(v: &Value, path: String, rows: &mut Vec<Vec<String>>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(x, join(k), rows)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(x, join(&i.to_string()), rows)),
        Value::Number(n) => {
            let s = n.as_f64().filter(|_| n.is_f64()).map(num).unwrap_or_else(|| n.to_string());
            rows.push(vec![path, s]);
        }
        Value::String(s) => rows.push(vec![path, s.clone()]),
        Value::Bool(b) => rows.push(vec![path, b.to_string()]),
        Value::Null => rows.push(vec![path, String::new()]),
    }
}
