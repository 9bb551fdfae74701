//! JSON shapes shared by the HTTP API, the REPL's `--json` mode and the
//! session export.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use watchat_core::lang::{JsValue, Outcome};

/// Every response body: either a payload or an error, never both.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(bound(deserialize = "T: Deserialize<'de>"))]
pub struct ApiEnvelope<T> {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
}

impl<T> ApiEnvelope<T> {
    pub fn success(payload: T) -> Self {
        ApiEnvelope { ok: true, payload: Some(payload), error: None }
    }

    pub fn failure(error: ErrorBody) -> Self {
        ApiEnvelope { ok: false, payload: None, error: Some(error) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Position>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct Position {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalRequest {
    pub source: String,
    #[serde(default)]
    pub session: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EvalReport {
    pub display: String,
    pub value: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<RuntimeError>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RuntimeError {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WatRequest {
    pub source: String,
    #[serde(default)]
    pub session: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WatReport {
    pub display: String,
    pub candidates: Vec<CandidateDto>,
    pub question: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CandidateDto {
    /// Accepted by `/explain` in place of `expected_display`.
    pub candidate_id: usize,
    pub expected_display: String,
    pub expected_value: Option<Value>,
    pub misconception_ids: Vec<u8>,
    pub prior_rank: usize,
    pub prior: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplainRequest {
    pub source: String,
    #[serde(default)]
    pub expected_display: Option<String>,
    #[serde(default)]
    pub candidate_id: Option<usize>,
    #[serde(default)]
    pub session: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExplainReport {
    pub expected_display: String,
    pub misconception_ids: Vec<u8>,
    pub messages: Vec<MessageDto>,
    pub steps: Vec<StepDto>,
    #[serde(rename = "final")]
    pub final_line: Option<String>,
    /// Messages and steps interleaved in reading order, then the final line.
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MessageDto {
    pub misconception_id: u8,
    pub text: String,
    pub companion: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StepDto {
    pub source: String,
    pub display: String,
    pub conversion: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MisconceptionDto {
    pub id: u8,
    pub name: String,
    pub message: String,
    pub behavior: String,
    pub prior: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnoseRequest {
    pub misconception_id: u8,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub kappa_v: Option<usize>,
    #[serde(default)]
    pub exclude: Vec<u8>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum DiagnoseStatus {
    Found,
    Failed,
    Cancelled,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DiagnoseReport {
    pub misconception: u8,
    pub status: DiagnoseStatus,
    pub program_source: Option<String>,
    pub true_output: Option<String>,
    pub distractors: Vec<DistractorDto>,
    pub verified_bound: usize,
    pub budget: usize,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DistractorDto {
    pub set: Vec<u8>,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FailureDto {
    /// `budget_exhausted`, `entangled` or `cancelled`.
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocking: Vec<u8>,
}

/// Returned with 202 when a diagnose request runs in the background.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JobTicket {
    pub job: String,
    pub status: String,
    pub poll: String,
}

/// Tagged JSON form of a runtime value. Numbers that JSON cannot carry
/// (NaN, infinities) are given as their JavaScript spelling.
pub fn value_json(v: &JsValue) -> Value {
    match v {
        JsValue::Undefined => json!({"type": "undefined"}),
        JsValue::Null => json!({"type": "null"}),
        JsValue::Boolean(b) => json!({"type": "boolean", "value": b}),
        JsValue::Number(x) if x.is_finite() => json!({"type": "number", "value": x}),
        JsValue::Number(x) => {
            let spelled = if x.is_nan() {
                "NaN"
            } else if *x > 0.0 {
                "Infinity"
            } else {
                "-Infinity"
            };
            json!({"type": "number", "value": spelled})
        }
        JsValue::String(s) => json!({"type": "string", "value": s}),
        JsValue::Array(a) => json!({"type": "array", "elements": a.elems.iter().map(value_json).collect::<Vec<_>>()}),
        JsValue::Object(o) => json!({
            "type": "object",
            "properties": o.props.iter().map(|(k, v)| json!({"key": k, "value": value_json(v)})).collect::<Vec<_>>(),
        }),
    }
}

pub fn outcome_json(o: &Outcome) -> Option<Value> {
    o.as_ref().ok().map(value_json)
}
