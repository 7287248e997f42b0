//! Result files. Floats in values, analyst value and guarantee are written
//! with 17 significant digits so files compare exactly.

use std::io::Write;

use knnsv::ValuationResult;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// The JSON Schema result files follow.
pub const RESULT_SCHEMA: &str = include_str!("../schema/result.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Run settings echoed into the result file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub task: knnsv::Task,
    pub k: usize,
    pub weights: String,
    pub n_train: usize,
    pub n_test: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sellers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub fn sig17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".into()
    }
}

fn raw(v: f64) -> Box<RawValue> {
    RawValue::from_string(sig17(v)).expect("formatted float is valid JSON")
}

#[derive(Serialize)]
struct GuaranteeOut {
    epsilon: Box<RawValue>,
    delta: Box<RawValue>,
}

#[derive(Serialize)]
struct DiagnosticsOut<'a> {
    runtime_ms: Box<RawValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    permutations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tables: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidates_mean: Option<Box<RawValue>>,
    incomplete: bool,
    warnings: &'a [String],
}

#[derive(Serialize)]
struct Report<'a> {
    schema: u32,
    method: &'static str,
    config: &'a RunConfig,
    guarantee: Option<GuaranteeOut>,
    values: Vec<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analyst_value: Option<Box<RawValue>>,
    diagnostics: DiagnosticsOut<'a>,
}

pub fn to_json(res: &ValuationResult, config: &RunConfig, runtime_ms: f64) -> String {
    let d = &res.diagnostics;
    let report = Report {
        schema: SCHEMA_VERSION,
        method: res.method.as_str(),
        config,
        guarantee: res.guarantee.map(|g| GuaranteeOut { epsilon: raw(g.epsilon), delta: raw(g.delta) }),
        values: res.values.iter().map(|&v| raw(v)).collect(),
        analyst_value: res.analyst_value.map(raw),
        diagnostics: DiagnosticsOut {
            runtime_ms: RawValue::from_string(format!("{runtime_ms:.3}")).expect("valid number"),
            permutations: d.permutations,
            tables: d.tables,
            candidates_mean: d.candidates_mean.map(raw),
            incomplete: d.incomplete,
            warnings: &d.warnings,
        },
    };
    serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
}

/// `player,value` rows, with the analyst as a final `analyst` row.
pub fn to_csv(res: &ValuationResult) -> String {
    let mut s = String::from("player,value\n");
    for (i, v) in res.values.iter().enumerate() {
        s.push_str(&format!("{i},{}\n", sig17(*v)));
    }
    if let Some(a) = res.analyst_value {
        s.push_str(&format!("analyst,{}\n", sig17(a)));
    }
    s
}

pub fn write(text: &str, out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(format!("writing {}", p.display()), e)),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| CliError::io("writing stdout", e)),
    }
}
