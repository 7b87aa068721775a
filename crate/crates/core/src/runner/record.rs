use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const RECORD_SCHEMA: &str = "sumavoid.record/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Result,
    Summary,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// No check attached.
    Ok,
    Pass,
    Fail,
    /// Stopped by a node budget; `data` holds the partial result.
    Budget,
    Error,
}

/// One line of run output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub schema: String,
    pub job: usize,
    pub op: String,
    pub kind: RecordKind,
    pub status: Status,
    pub data: Value,
    /// Run-dependent counters such as search nodes; excluded from payloads
    /// along with the timing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl Record {
    pub fn new(job: usize, op: &str, kind: RecordKind, status: Status, data: Value) -> Self {
        Record {
            schema: RECORD_SCHEMA.to_string(),
            job,
            op: op.to_string(),
            kind,
            status,
            data,
            metrics: None,
            elapsed_ms: None,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn with_metrics(mut self, metrics: Value) -> Self {
        self.metrics = Some(metrics);
        self
    }

    /// The record without its timing and metrics fields.
    pub fn payload(&self) -> Record {
        Record { metrics: None, elapsed_ms: None, ..self.clone() }
    }
}

/// Parses one NDJSON record line and checks its schema tag.
pub fn parse_record(line: &str) -> Result<Record> {
    let r: Record = serde_json::from_str(line).map_err(|e| Error::parse(e.to_string()))?;
    if r.schema != RECORD_SCHEMA {
        return Err(Error::parse(format!("unknown record schema {:?}", r.schema)));
    }
    Ok(r)
}

pub trait RecordSink {
    fn emit(&mut self, record: &Record) -> Result<()>;
}

impl RecordSink for Vec<Record> {
    fn emit(&mut self, record: &Record) -> Result<()> {
        self.push(record.clone());
        Ok(())
    }
}

/// Writes one JSON document per line.
pub struct NdjsonSink<W: Write>(pub W);

impl<W: Write> RecordSink for NdjsonSink<W> {
    fn emit(&mut self, record: &Record) -> Result<()> {
        writeln!(self.0, "{}", record.to_line())?;
        Ok(())
    }
}

/// Forwards to two sinks.
pub struct Tee<'a>(pub &'a mut dyn RecordSink, pub &'a mut dyn RecordSink);

impl RecordSink for Tee<'_> {
    fn emit(&mut self, record: &Record) -> Result<()> {
        self.0.emit(record)?;
        self.1.emit(record)
    }
}

/// Compact single-line text rendering: op, status, then the top-level
/// scalar fields of `data`.
pub fn render_text(r: &Record) -> String {
    let mut out = format!("[{}] {:?}", r.op, r.status).to_lowercase();
    if let Value::Object(map) = &r.data {
        for (k, v) in map {
            let shown = match v {
                Value::Array(items) if items.len() > 16 => format!("[{} items]", items.len()),
                Value::Object(o) => match o.get("elements") {
                    Some(Value::Array(items)) if items.len() > 16 => format!("[{} elements]", items.len()),
                    Some(e) => e.to_string(),
                    None => continue,
                },
                other => other.to_string(),
            };
            out.push_str(&format!(" {k}={shown}"));
        }
    } else {
        out.push_str(&format!(" {}", r.data));
    }
    out
}
