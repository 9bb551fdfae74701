//! Per-session interaction history, kept in memory and optionally appended
//! to a JSONL file, one envelope per interaction.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dto::{ApiEnvelope, CandidateDto, ExplainReport};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ClarificationState {
    /// Evaluated; no one has asked why yet.
    Idle,
    /// Nothing within the search bound would change the result.
    NothingToExplain,
    /// Expectations offered, none chosen yet.
    Clarifying,
    Explained,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HistoryEntry {
    pub source: String,
    pub display: Option<String>,
    pub candidates: Vec<CandidateDto>,
    pub question: Option<String>,
    pub state: ClarificationState,
    pub explanation: Option<ExplainReport>,
}

impl HistoryEntry {
    fn new(source: &str) -> Self {
        HistoryEntry {
            source: source.to_string(),
            display: None,
            candidates: Vec::new(),
            question: None,
            state: ClarificationState::Idle,
            explanation: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConfigSnapshot {
    pub kappa: usize,
    pub max_candidates: usize,
    pub prior_q: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Session {
    pub id: String,
    pub config: ConfigSnapshot,
    pub history: Vec<HistoryEntry>,
}

impl Session {
    /// The latest entry for `source`, created if there is none.
    fn entry_for(&mut self, source: &str) -> &mut HistoryEntry {
        match self.history.iter().rposition(|e| e.source == source) {
            Some(i) => &mut self.history[i],
            None => {
                self.history.push(HistoryEntry::new(source));
                self.history.last_mut().expect("just pushed")
            }
        }
    }
}

/// One interaction, as written to the export file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExportLine<T> {
    pub interaction: String,
    pub session: String,
    pub request: Value,
    #[serde(flatten)]
    pub envelope: ApiEnvelope<T>,
}

pub struct SessionStore {
    sessions: Mutex<HashMap<String, Session>>,
    export_dir: Option<PathBuf>,
    snapshot: ConfigSnapshot,
}

impl SessionStore {
    pub fn new(snapshot: ConfigSnapshot, export_dir: Option<PathBuf>) -> Self {
        SessionStore { sessions: Mutex::new(HashMap::new()), export_dir, snapshot }
    }

    pub fn get(&self, id: &str) -> Option<Session> {
        self.sessions.lock().expect("session lock").get(id).cloned()
    }

    fn with<R>(&self, id: &str, f: impl FnOnce(&mut Session) -> R) -> R {
        let mut map = self.sessions.lock().expect("session lock");
        let s = map.entry(id.to_string()).or_insert_with(|| Session {
            id: id.to_string(),
            config: self.snapshot.clone(),
            history: Vec::new(),
        });
        f(s)
    }

    /// Starts a new entry for an evaluated expression.
    pub fn record_eval(&self, id: &str, source: &str, display: &str) {
        self.with(id, |s| {
            let mut e = HistoryEntry::new(source);
            e.display = Some(display.to_string());
            s.history.push(e);
        });
    }

    pub fn record_wat(&self, id: &str, source: &str, display: &str, candidates: &[CandidateDto], question: Option<&str>) {
        self.with(id, |s| {
            let e = s.entry_for(source);
            e.display = Some(display.to_string());
            e.candidates = candidates.to_vec();
            e.question = question.map(str::to_string);
            e.explanation = None;
            e.state = if candidates.is_empty() { ClarificationState::NothingToExplain } else { ClarificationState::Clarifying };
        });
    }

    pub fn record_explain(&self, id: &str, source: &str, report: &ExplainReport) {
        self.with(id, |s| {
            let e = s.entry_for(source);
            e.explanation = Some(report.clone());
            e.state = ClarificationState::Explained;
        });
    }

    /// Appends one line to the session's export file, if exporting.
    pub fn export<T: Serialize>(&self, id: &str, line: &ExportLine<T>) -> std::io::Result<()> {
        let Some(dir) = &self.export_dir else { return Ok(()) };
        if !is_safe_id(id) {
            return Ok(());
        }
        std::fs::create_dir_all(dir)?;
        let mut f = OpenOptions::new().create(true).append(true).open(dir.join(format!("{id}.jsonl")))?;
        let mut text = serde_json::to_string(line).map_err(std::io::Error::other)?;
        text.push('\n');
        f.write_all(text.as_bytes())
    }
}

/// Session ids become file names, so only a conservative alphabet is exported.
pub fn is_safe_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}
