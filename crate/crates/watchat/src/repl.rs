//! Line-oriented front end. Expressions are evaluated as typed; `:wat`
//! asks about the last one and explains the chosen expectation.

use std::io::{self, BufRead, Write};

use serde::Serialize;

use crate::config::parse_misconception;
use crate::dto::{ApiEnvelope, CandidateDto, DiagnoseRequest, DiagnoseStatus, ExplainReport};
use crate::engine::{ApiError, Engine, Expectation};

const HELP: &str = "\
Type a JavaScript expression to evaluate it.
  :wat [expr]            ask why the last (or given) expression gave its result
  :diag <id|name> [n]    synthesize a diagnostic program, AST budget n
  :misconceptions        list the modeled misconceptions
  :help                  this text
  :quit                  leave";

pub struct Repl<'e, W: Write> {
    engine: &'e Engine,
    out: W,
    json: bool,
    last: Option<String>,
    /// Source and offered expectations while a `:wat` question is open.
    pending: Option<(String, Vec<CandidateDto>)>,
}

impl<'e, W: Write> Repl<'e, W> {
    pub fn new(engine: &'e Engine, out: W, json: bool) -> Self {
        Repl { engine, out, json, last: None, pending: None }
    }

    pub fn into_inner(self) -> W {
        self.out
    }

    pub fn run(&mut self, input: impl BufRead) -> io::Result<()> {
        self.prompt()?;
        for line in input.lines() {
            if !self.handle(&line?)? {
                break;
            }
            self.prompt()?;
        }
        Ok(())
    }

    fn prompt(&mut self) -> io::Result<()> {
        if !self.json {
            let p = if self.pending.is_some() { "? " } else { "> " };
            write!(self.out, "{p}")?;
            self.out.flush()?;
        }
        Ok(())
    }

    /// Handles one input line; `false` means quit.
    pub fn handle(&mut self, line: &str) -> io::Result<bool> {
        let line = line.trim();
        if line.is_empty() {
            return Ok(true);
        }
        if let Some((source, cands)) = self.pending.take() {
            if let Some(which) = choose(line, &cands) {
                self.explain(&source, which)?;
                return Ok(true);
            }
            if matches!(line, "n" | "no") {
                return Ok(true);
            }
            if !line.starts_with(':') && cands.len() > 1 && line.parse::<usize>().is_ok() {
                self.say(&format!("Choose 1 to {}, or type the value you expected.", cands.len()))?;
                self.pending = Some((source, cands));
                return Ok(true);
            }
        }
        let (cmd, rest) = match line.split_once(char::is_whitespace) {
            Some((c, r)) => (c, r.trim()),
            None => (line, ""),
        };
        match cmd {
            ":quit" | ":q" | ":exit" => return Ok(false),
            ":help" | ":h" => self.say(HELP)?,
            ":misconceptions" | ":m" => self.misconceptions()?,
            ":wat" => {
                let source = if rest.is_empty() { self.last.clone() } else { Some(rest.to_string()) };
                match source {
                    Some(s) => self.wat(&s)?,
                    None => self.say("Nothing to ask about yet. Evaluate an expression first, or use :wat <expr>.")?,
                }
            }
            ":diag" => self.diag(rest)?,
            c if c.starts_with(':') => self.say(&format!("unknown command {c}; try :help"))?,
            _ => self.eval(line)?,
        }
        Ok(true)
    }

    fn say(&mut self, text: &str) -> io::Result<()> {
        if self.json {
            let env: ApiEnvelope<String> = ApiEnvelope::success(text.to_string());
            return self.emit(&env);
        }
        writeln!(self.out, "{text}")
    }

    fn emit<T: Serialize>(&mut self, v: &T) -> io::Result<()> {
        let text = serde_json::to_string(v).map_err(io::Error::other)?;
        writeln!(self.out, "{text}")
    }

    fn error(&mut self, source: &str, e: &ApiError) -> io::Result<()> {
        if self.json {
            return self.emit(&ApiEnvelope::<()>::failure(e.body()));
        }
        if let Some(pos) = e.position.filter(|_| !source.contains('\n')) {
            writeln!(self.out, "  {source}")?;
            writeln!(self.out, "  {}^", " ".repeat(pos.column.saturating_sub(1)))?;
        }
        writeln!(self.out, "{}", e.message)
    }

    fn eval(&mut self, source: &str) -> io::Result<()> {
        match self.engine.eval(source) {
            Ok(r) => {
                self.last = Some(source.to_string());
                if self.json {
                    self.emit(&ApiEnvelope::success(r))
                } else {
                    match &r.error {
                        Some(err) => writeln!(self.out, "{}: {}", err.kind, err.message),
                        None => writeln!(self.out, "{}", r.display),
                    }
                }
            }
            Err(e) => self.error(source, &e),
        }
    }

    fn wat(&mut self, source: &str) -> io::Result<()> {
        let r = match self.engine.wat(source) {
            Ok(r) => r,
            Err(e) => return self.error(source, &e),
        };
        self.last = Some(source.to_string());
        if !r.candidates.is_empty() {
            self.pending = Some((source.to_string(), r.candidates.clone()));
        }
        if self.json {
            return self.emit(&ApiEnvelope::success(r));
        }
        let Some(question) = &r.question else {
            return writeln!(
                self.out,
                "{source} gives {}. No combination of up to {} misconceptions would give anything else.",
                r.display, self.engine.kappa
            );
        };
        writeln!(self.out, "{source} gives {}. {question}", r.display)?;
        if r.candidates.len() == 1 {
            return writeln!(self.out, "(y/n)");
        }
        for c in &r.candidates {
            let ids: Vec<String> = c.misconception_ids.iter().map(|i| format!("#{i}")).collect();
            writeln!(self.out, "  {}) {}   {}", c.candidate_id, c.expected_display, ids.join(" "))?;
        }
        Ok(())
    }

    fn explain(&mut self, source: &str, which: Expectation<'_>) -> io::Result<()> {
        match self.engine.explain(source, which) {
            Ok(r) if self.json => self.emit(&ApiEnvelope::success(r)),
            Ok(r) => self.print_explanation(&r),
            Err(e) => self.error(source, &e),
        }
    }

    fn print_explanation(&mut self, r: &ExplainReport) -> io::Result<()> {
        for l in &r.lines {
            writeln!(self.out, "{l}")?;
        }
        Ok(())
    }

    fn misconceptions(&mut self) -> io::Result<()> {
        let list = self.engine.misconceptions();
        if self.json {
            return self.emit(&ApiEnvelope::success(list));
        }
        for m in list {
            writeln!(self.out, "{:>2}  {:<34} {}", m.id, m.name, m.message)?;
        }
        Ok(())
    }

    fn diag(&mut self, args: &str) -> io::Result<()> {
        let mut parts = args.split_whitespace();
        let Some(id) = parts.next().and_then(parse_misconception) else {
            return self.say("usage: :diag <id|name> [budget]");
        };
        let budget = match parts.next().map(str::parse::<usize>) {
            None => None,
            Some(Ok(b)) => Some(b),
            Some(Err(_)) => return self.say("usage: :diag <id|name> [budget]"),
        };
        let req = DiagnoseRequest { misconception_id: id.index(), budget, kappa_v: None, exclude: Vec::new() };
        let r = match self.engine.diagnose(&req, &|| false) {
            Ok(r) => r,
            Err(e) => return self.error(args, &e),
        };
        if self.json {
            return self.emit(&ApiEnvelope::success(r));
        }
        match (r.status, &r.program_source, &r.true_output) {
            (DiagnoseStatus::Found, Some(p), Some(t)) => {
                writeln!(self.out, "What does {p} give?")?;
                writeln!(self.out, "  answer: {t}")?;
                for d in &r.distractors {
                    let ids: Vec<String> = d.set.iter().map(|i| format!("#{i}")).collect();
                    writeln!(self.out, "  {}: {}", ids.join(" "), d.value)?;
                }
                Ok(())
            }
            _ => {
                let msg = r.failure.as_ref().map_or("no program found", |f| f.message.as_str());
                writeln!(self.out, "#{}: {msg}", r.misconception)
            }
        }
    }
}

/// Interprets an answer to the open question: a number from the list, the
/// expected value itself, or `y` when only one expectation was offered.
fn choose<'a>(line: &'a str, cands: &[CandidateDto]) -> Option<Expectation<'a>> {
    if let Ok(n) = line.parse::<usize>() {
        if (1..=cands.len()).contains(&n) {
            return Some(Expectation::CandidateId(n));
        }
    }
    if cands.len() == 1 && matches!(line, "y" | "yes") {
        return Some(Expectation::CandidateId(1));
    }
    cands.iter().any(|c| c.expected_display == line).then_some(Expectation::Display(line))
}
