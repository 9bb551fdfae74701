//! Rendering of a diagnostic inventory as a quiz table or JSON.

use std::fmt::Write;

use serde::Serialize;
use watchat_core::MisconceptionId;

use crate::dto::{DiagnoseReport, DiagnoseStatus};

#[derive(Debug, Clone, Serialize)]
pub struct InventoryReport {
    pub budget: usize,
    pub kappa_v: usize,
    pub found: usize,
    pub total: usize,
    pub elapsed_ms: u64,
    pub entries: Vec<DiagnoseReport>,
}

impl InventoryReport {
    pub fn new(entries: Vec<DiagnoseReport>, budget: usize, kappa_v: usize, elapsed_ms: u64) -> Self {
        let found = entries.iter().filter(|e| e.status == DiagnoseStatus::Found).count();
        InventoryReport { budget, kappa_v, found, total: entries.len(), elapsed_ms, entries }
    }
}

fn cell(s: &str) -> String {
    format!("`{}`", s.replace('|', "\\|"))
}

/// One row per target: the program, the right answer, and the wrong
/// answers each misconception combination would give.
pub fn markdown(inv: &InventoryReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| # | Misconception | Program | Answer | Distractors |");
    let _ = writeln!(out, "|---|---|---|---|---|");
    for e in &inv.entries {
        let name = MisconceptionId::new(e.misconception).map_or("?", |m| m.name());
        match (&e.program_source, &e.true_output) {
            (Some(p), Some(t)) => {
                let ds: Vec<String> = e
                    .distractors
                    .iter()
                    .map(|d| {
                        let ids: Vec<String> = d.set.iter().map(u8::to_string).collect();
                        format!("{} ({})", cell(&d.value), ids.join("+"))
                    })
                    .collect();
                let _ = writeln!(out, "| {} | {} | {} | {} | {} |", e.misconception, name, cell(p), cell(t), ds.join(", "));
            }
            _ => {
                let why = e.failure.as_ref().map_or("not found", |f| f.kind.as_str());
                let _ = writeln!(out, "| {} | {} | _{}_ | | |", e.misconception, name, why);
            }
        }
    }
    let _ = writeln!(
        out,
        "\n{}/{} found at budget {} (verified to |M| <= {}) in {:.1} s.",
        inv.found,
        inv.total,
        inv.budget,
        inv.kappa_v,
        inv.elapsed_ms as f64 / 1000.0
    );
    out
}
