use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::commands::Command;
use crate::error::CliError;

/// Name of the generator every random draw comes from.
pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Per-run state shared by the commands: the seeded generator and the report header.
pub struct RunContext {
    pub command: Command,
    pub seed: u64,
    pub tol: f64,
    pub input_digest: Option<String>,
    pub rng: ChaCha8Rng,
}

impl RunContext {
    pub fn new(command: Command, seed: u64, tol: f64) -> Self {
        RunContext {
            command,
            seed,
            tol,
            input_digest: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn set_input(&mut self, bytes: &[u8]) {
        self.input_digest = Some(hex::encode(Sha256::digest(bytes)));
    }
}

/// Plot-ready rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// One row holding every scalar of `report`, keyed by dotted path.
    pub fn from_report(report: &Value) -> Self {
        let mut cells = Vec::new();
        flatten("", report, &mut cells);
        let (columns, row) = cells.into_iter().unzip();
        Table {
            columns,
            rows: vec![row],
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }
}

/// Objects become dotted keys; arrays of scalars are joined with `;`, other arrays are
/// kept as compact JSON.
pub fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, inner, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => {
            let joined: Vec<String> = items.iter().map(cell).collect();
            out.push((prefix.to_string(), Value::String(joined.join(";"))));
        }
        Value::Array(_) => out.push((prefix.to_string(), Value::String(v.to_string()))),
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

/// CSV text of a scalar: floats with 17 significant digits, integers verbatim.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// What a command hands back: the structured report and, optionally, its tabular view.
pub struct CommandOutput {
    pub report: Value,
    pub table: Option<Table>,
}

impl CommandOutput {
    pub fn new<T: Serialize>(report: &T) -> Result<Self, CliError> {
        Ok(CommandOutput {
            report: serde_json::to_value(report)?,
            table: None,
        })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

/// Header common to success and error reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub input_digest: Option<String>,
    pub seed: u64,
    pub rng: String,
    pub tol: f64,
}

impl Header {
    fn new(ctx: &RunContext) -> Self {
        Header {
            tool: "ingham".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: ctx.command.name().into(),
            input_digest: ctx.input_digest.clone(),
            seed: ctx.seed,
            rng: RNG_NAME.into(),
            tol: ctx.tol,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<T> {
    #[serde(flatten)]
    pub header: Header,
    pub report: T,
    #[serde(skip)]
    table: Option<Table>,
}

impl Envelope<Value> {
    pub fn new(ctx: &RunContext, out: CommandOutput) -> Self {
        Envelope {
            header: Header::new(ctx),
            report: out.report,
            table: out.table,
        }
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => Ok(to_json_bytes(self)?),
            Format::Csv => match &self.table {
                Some(t) => t.to_csv(),
                None => Table::from_report(&self.report).to_csv(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    /// `validation` (exit 2) or `structural` (exit 1).
    pub kind: String,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorEnvelope {
    #[serde(flatten)]
    pub header: Header,
    pub error: ErrorBody,
}

impl ErrorEnvelope {
    pub fn new(ctx: &RunContext, err: &CliError) -> Self {
        ErrorEnvelope {
            header: Header::new(ctx),
            error: ErrorBody {
                kind: if err.is_validation() { "validation" } else { "structural" }.into(),
                code: err.code(),
                message: err.to_string(),
                details: err.details(),
            },
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        to_json_bytes(self).unwrap_or_else(|_| b"{}\n".to_vec())
    }
}

fn to_json_bytes<T: Serialize>(v: &T) -> serde_json::Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    Ok(bytes)
}
