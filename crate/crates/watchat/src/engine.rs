//! The operations behind every front end. HTTP handlers and the REPL call
//! these and only serialize the results.

use std::time::Instant;

use watchat_core::diagnostics::{synthesize_until, InventoryEntry, SynthesisFailure, SynthesisOptions};
use watchat_core::explain::{explain, Explanation, Line};
use watchat_core::inference::{clarify, infer_all, Candidate};
use watchat_core::lang::{display_outcome, parse, ParseError, ParseErrorKind, Program};
use watchat_core::misconceptions::registry;
use watchat_core::semantics::evaluate;
use watchat_core::{MisconceptionId, MisconceptionSet, PriorModel};

use crate::config::{Config, ConfigError};
use crate::dto::*;

/// A request-level failure with its HTTP status.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct ApiError {
    pub status: u16,
    pub code: &'static str,
    pub message: String,
    pub position: Option<Position>,
}

impl ApiError {
    pub fn new(status: u16, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), position: None }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody { code: self.code.to_string(), message: self.message.clone(), position: self.position }
    }
}

impl From<ParseError> for ApiError {
    fn from(e: ParseError) -> Self {
        let (status, code) = match e.kind {
            ParseErrorKind::Empty => (422, "empty_source"),
            ParseErrorKind::Unsupported(_) => (400, "unsupported_construct"),
            _ => (400, "parse_error"),
        };
        ApiError {
            status,
            code,
            message: e.to_string(),
            position: Some(Position { offset: e.offset, line: e.line, column: e.column }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    pub kappa: usize,
    pub max_candidates: usize,
    pub prior: PriorModel,
    pub kappa_v: usize,
    pub diagnose_budget: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::from_config(&Config::default()).expect("default config is valid")
    }
}

/// Which candidate group an explanation request refers to.
#[derive(Debug, Clone)]
pub enum Expectation<'a> {
    Display(&'a str),
    CandidateId(usize),
}

impl Engine {
    pub fn from_config(c: &Config) -> Result<Engine, ConfigError> {
        c.validate()?;
        Ok(Engine {
            kappa: c.kappa,
            max_candidates: c.max_candidates,
            prior: c.prior()?,
            kappa_v: c.kappa_v,
            diagnose_budget: c.diagnose_budget,
        })
    }

    pub fn parse(&self, source: &str) -> Result<Program, ApiError> {
        Ok(parse(source)?)
    }

    pub fn eval(&self, source: &str) -> Result<EvalReport, ApiError> {
        let p = self.parse(source)?;
        let out = evaluate(&p, MisconceptionSet::EMPTY).result;
        Ok(EvalReport {
            display: display_outcome(&out),
            value: outcome_json(&out),
            error: out.as_ref().err().map(|e| RuntimeError { kind: e.kind.to_string(), message: e.message.clone() }),
        })
    }

    /// Clarification groups in prior order, numbered from 1.
    pub fn candidates(&self, p: &Program) -> (Vec<Candidate>, Option<String>) {
        let all = infer_all(p, &self.prior, self.kappa, self.max_candidates);
        match clarify(&all) {
            Some(c) => (c.choices, Some(c.question)),
            None => (Vec::new(), None),
        }
    }

    pub fn wat(&self, source: &str) -> Result<WatReport, ApiError> {
        let p = self.parse(source)?;
        let truth = evaluate(&p, MisconceptionSet::EMPTY).result;
        let (groups, question) = self.candidates(&p);
        let candidates = groups
            .iter()
            .enumerate()
            .map(|(i, c)| CandidateDto {
                candidate_id: i + 1,
                expected_display: c.expected_display(),
                expected_value: outcome_json(&c.expected),
                misconception_ids: c.set.indices(),
                prior_rank: i + 1,
                prior: c.prior(),
            })
            .collect();
        Ok(WatReport { display: display_outcome(&truth), candidates, question })
    }

    pub fn explain(&self, source: &str, which: Expectation<'_>) -> Result<ExplainReport, ApiError> {
        let p = self.parse(source)?;
        let (groups, _) = self.candidates(&p);
        let chosen = match which {
            Expectation::Display(d) => groups.iter().find(|c| c.expected_display() == d.trim()),
            Expectation::CandidateId(i) => i.checked_sub(1).and_then(|i| groups.get(i)),
        };
        let Some(chosen) = chosen else {
            let shown = match which {
                Expectation::Display(d) => d.to_string(),
                Expectation::CandidateId(i) => format!("candidate {i}"),
            };
            return Err(ApiError::new(404, "unknown_expectation", format!("unknown expectation: {shown}")));
        };
        let ex = explain(&p, chosen).map_err(|e| ApiError::new(500, "premise_mismatch", e.to_string()))?;
        Ok(explanation_report(&ex))
    }

    pub fn misconceptions(&self) -> Vec<MisconceptionDto> {
        registry()
            .iter()
            .map(|e| MisconceptionDto {
                id: e.id.index(),
                name: e.name.to_string(),
                message: e.message.to_string(),
                behavior: e.behavior.to_string(),
                prior: self.prior.q(e.id),
            })
            .collect()
    }

    pub fn synthesis_options(&self, req: &DiagnoseRequest) -> Result<(MisconceptionId, SynthesisOptions), ApiError> {
        let id = MisconceptionId::new(req.misconception_id).ok_or_else(|| {
            ApiError::new(400, "unknown_misconception", format!("no misconception #{}", req.misconception_id))
        })?;
        let mut exclude = MisconceptionSet::EMPTY;
        for &x in &req.exclude {
            let m = MisconceptionId::new(x)
                .ok_or_else(|| ApiError::new(400, "unknown_misconception", format!("no misconception #{x}")))?;
            exclude.insert(m);
        }
        let opts = SynthesisOptions {
            budget: req.budget.unwrap_or(self.diagnose_budget),
            kappa_v: req.kappa_v.unwrap_or(self.kappa_v).max(1),
            exclude,
        };
        Ok((id, opts))
    }

    /// Runs synthesis for one id; polls `cancelled` while searching.
    pub fn diagnose(&self, req: &DiagnoseRequest, cancelled: &dyn Fn() -> bool) -> Result<DiagnoseReport, ApiError> {
        let (id, opts) = self.synthesis_options(req)?;
        let start = Instant::now();
        let mut clock = || start.elapsed().as_millis() as u64;
        let entry = synthesize_until(&[id], &opts, &mut clock, cancelled).pop().expect("one entry per target");
        Ok(diagnose_report(&entry, &opts))
    }
}

pub fn explanation_report(ex: &Explanation) -> ExplainReport {
    let mut messages = Vec::new();
    let mut steps = Vec::new();
    let mut lines = Vec::new();
    for line in &ex.lines {
        match line {
            Line::Message { id, text, companion } => {
                messages.push(MessageDto { misconception_id: id.index(), text: text.to_string(), companion: *companion });
                lines.push(text.to_string());
            }
            Line::Step(s) => {
                steps.push(StepDto {
                    source: s.source.clone(),
                    display: display_outcome(&s.value),
                    conversion: s.conversion.map(|k| k.name().to_string()),
                    text: s.text.clone(),
                });
                lines.push(s.text.clone());
            }
        }
    }
    if let Some(f) = &ex.final_line {
        lines.push(f.text.clone());
    }
    ExplainReport {
        expected_display: display_outcome(&ex.expected),
        misconception_ids: ex.set.indices(),
        messages,
        steps,
        final_line: ex.final_line.as_ref().map(|f| f.text.clone()),
        lines,
    }
}

pub fn diagnose_report(entry: &InventoryEntry, opts: &SynthesisOptions) -> DiagnoseReport {
    let mut report = DiagnoseReport {
        misconception: entry.target.index(),
        status: DiagnoseStatus::Found,
        program_source: None,
        true_output: None,
        distractors: Vec::new(),
        verified_bound: opts.kappa_v,
        budget: opts.budget,
        elapsed_ms: entry.elapsed_ms,
        failure: None,
    };
    match &entry.result {
        Ok(q) => {
            report.program_source = Some(q.program.text.clone());
            report.true_output = Some(display_outcome(&q.truth));
            report.distractors = q
                .distractors()
                .iter()
                .map(|d| DistractorDto { set: d.set.indices(), value: display_outcome(&d.value) })
                .collect();
            report.verified_bound = q.verified_bound;
        }
        Err(f) => {
            let (status, kind, blocking) = match f {
                SynthesisFailure::BudgetExhausted { .. } => (DiagnoseStatus::Failed, "budget_exhausted", Vec::new()),
                SynthesisFailure::Entangled { blocking, .. } => (DiagnoseStatus::Failed, "entangled", blocking.indices()),
                SynthesisFailure::Cancelled => (DiagnoseStatus::Cancelled, "cancelled", Vec::new()),
            };
            report.status = status;
            report.failure = Some(FailureDto { kind: kind.to_string(), message: f.to_string(), blocking });
        }
    }
    report
}
