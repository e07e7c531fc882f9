//! Machine-readable output of classification records.

use serde::Serialize;

use crate::pipeline::{ClassificationRecord, RECORD_SCHEMA_VERSION};
use crate::CoreError;

pub trait Emitter: Sync {
    fn name(&self) -> &'static str;
    fn emit(&self, records: &[ClassificationRecord]) -> String;
}

pub fn format_names() -> Vec<&'static str> {
    EMITTERS.iter().map(|e| e.name()).collect()
}

pub fn emitter(name: &str) -> Result<&'static dyn Emitter, CoreError> {
    EMITTERS.iter().copied().find(|e| e.name() == name).ok_or_else(|| {
        CoreError::Unsupported(format!(
            "unknown format `{name}` (known: {})",
            format_names().join(", ")
        ))
    })
}

pub fn emit(records: &[ClassificationRecord], format: &str) -> Result<String, CoreError> {
    Ok(emitter(format)?.emit(records))
}

static EMITTERS: &[&dyn Emitter] = &[&Json, &Csv];

struct Json;

#[derive(Serialize)]
struct Document<'a> {
    schema_version: u32,
    records: &'a [ClassificationRecord],
}

impl Emitter for Json {
    fn name(&self) -> &'static str {
        "json"
    }

    fn emit(&self, records: &[ClassificationRecord]) -> String {
        let doc = Document {
            schema_version: RECORD_SCHEMA_VERSION,
            records,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("records serialize");
        s.push('\n');
        s
    }
}

struct Csv;

pub const CSV_HEADER: &[&str] = &[
    "K2",
    "Sing(X)",
    "Type",
    "G",
    "G0",
    "b2",
    "H1",
    "pi1",
    "basket_s",
    "basket_t",
    "G_order",
    "G0_index",
    "G0_order",
    "G0_invariants",
    "orbit_size",
    "representative",
    "catalog_hash",
    "schema_version",
    "diagnostics",
];

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

impl Emitter for Csv {
    fn name(&self) -> &'static str {
        "csv"
    }

    fn emit(&self, records: &[ClassificationRecord]) -> String {
        let mut out = CSV_HEADER.join(",");
        out.push('\n');
        for r in records {
            let row = [
                r.k2.to_string(),
                r.sing.clone(),
                r.sig_type.clone(),
                r.g_label.clone(),
                format!("{}", r.g0.order),
                r.b2.to_string(),
                r.h1_label.clone(),
                r.pi1.clone(),
                r.basket.s.to_string(),
                r.basket.t.to_string(),
                r.g_order.to_string(),
                r.g0.index.to_string(),
                r.g0.order.to_string(),
                join(&r.g0.abelian_invariants, " "),
                r.orbit_size.to_string(),
                r.representative.join(";"),
                r.catalog_hash.clone(),
                RECORD_SCHEMA_VERSION.to_string(),
                r.diagnostics.join("; "),
            ];
            let fields: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}
