use std::io::{self, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use watchat::config::{parse_misconception, CliOverrides, Config};
use watchat::dto::DiagnoseRequest;
use watchat::engine::{diagnose_report, Engine};
use watchat::repl::Repl;
use watchat::report::{markdown, InventoryReport};
use watchat_core::diagnostics::synthesize_many;
use watchat_core::MisconceptionId;

#[derive(Parser)]
#[command(name = "watchat", version, about = "Explains surprising JavaScript results")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct Global {
    /// TOML or JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    kappa: Option<usize>,
    #[arg(long, global = true)]
    max_candidates: Option<usize>,
    /// Default prior probability of each misconception.
    #[arg(long, global = true)]
    q: Option<f64>,
    /// Print JSON envelopes instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive session (the default).
    Repl,
    /// Serve the JSON API.
    Serve {
        #[arg(long)]
        host: Option<String>,
        #[arg(long)]
        port: Option<u16>,
    },
    /// Evaluate one expression.
    Eval { source: String },
    /// Ask why an expression gives its result.
    Wat { source: String },
    /// Synthesize diagnostic programs.
    Diag {
        /// Misconception id or name.
        target: Option<String>,
        /// Every misconception.
        #[arg(long, conflicts_with = "target")]
        all: bool,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        kappa_v: Option<usize>,
        /// Misconceptions the program need not be robust to.
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<String>,
        /// Print the inventory as a markdown table.
        #[arg(long)]
        markdown: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("watchat: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut overrides = CliOverrides {
        kappa: cli.global.kappa,
        max_candidates: cli.global.max_candidates,
        prior_q: cli.global.q,
        ..Default::default()
    };
    if let Some(Command::Serve { host, port }) = &cli.command {
        overrides.host.clone_from(host);
        overrides.port = *port;
    }
    let config = Config::resolve(cli.global.config.as_deref(), |k| std::env::var(k).ok(), &overrides)?;
    let engine = Engine::from_config(&config)?;
    let json = cli.global.json;

    match cli.command.unwrap_or(Command::Repl) {
        Command::Repl => {
            let stdin = io::stdin();
            if stdin.is_terminal() && !json {
                println!("watchat {}. :help for commands.", env!("CARGO_PKG_VERSION"));
            }
            Repl::new(&engine, io::stdout().lock(), json).run(stdin.lock())?;
        }
        Command::Serve { .. } => {
            tokio::runtime::Runtime::new()?.block_on(watchat::http::serve(&config))?;
        }
        Command::Eval { source } => return one_shot(&engine, json, &source, false),
        Command::Wat { source } => return one_shot(&engine, json, &source, true),
        Command::Diag { target, all, budget, kappa_v, exclude, markdown: md } => {
            let mut ex = Vec::new();
            for e in &exclude {
                let id = parse_misconception(e).ok_or_else(|| anyhow::anyhow!("unknown misconception `{e}`"))?;
                ex.push(id.index());
            }
            let targets: Vec<MisconceptionId> = match (target, all) {
                (Some(t), _) => {
                    vec![parse_misconception(&t).ok_or_else(|| anyhow::anyhow!("unknown misconception `{t}`"))?]
                }
                (None, true) => MisconceptionId::all().collect(),
                (None, false) => anyhow::bail!("give a misconception id or --all"),
            };
            let req = DiagnoseRequest { misconception_id: targets[0].index(), budget, kappa_v, exclude: ex };
            let (_, opts) = engine.synthesis_options(&req)?;
            let start = Instant::now();
            let mut clock = || start.elapsed().as_millis() as u64;
            let mut stderr = io::stderr();
            let mut entries = Vec::new();
            for t in &targets {
                let e = synthesize_many(&[*t], &opts, &mut clock).pop().expect("one entry");
                if targets.len() > 1 {
                    let _ = writeln!(stderr, "#{:>2} {}", t.index(), if e.result.is_ok() { "found" } else { "failed" });
                }
                entries.push(diagnose_report(&e, &opts));
            }
            let inv = InventoryReport::new(entries, opts.budget, opts.kappa_v, clock());
            if md {
                print!("{}", markdown(&inv));
            } else if json || targets.len() > 1 {
                println!("{}", serde_json::to_string_pretty(&inv)?);
            } else {
                let mut repl = Repl::new(&engine, io::stdout().lock(), false);
                repl.handle(&format!(":diag {} {}", targets[0].index(), opts.budget))?;
            }
            return Ok(if inv.found == inv.total { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn one_shot(engine: &Engine, json: bool, source: &str, wat: bool) -> anyhow::Result<ExitCode> {
    let line = if wat { format!(":wat {source}") } else { source.to_string() };
    Repl::new(engine, io::stdout().lock(), json).handle(&line)?;
    Ok(if engine.parse(source).is_ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
