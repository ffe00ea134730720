use std::fs::OpenOptions;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pivotladder::adaptive::{
    apply_proposal, detect_patterns, equivalence_report, AdaptConfig, UsageLog,
};
use pivotladder::dsl::{format_script, parse, Executor, Output, Span};
use pivotladder::graph::{load_graph, write_graph, GraphFormat, PropertyGraph};
use pivotladder_service::{bind, run, ServeConfig, ServiceConfig};

#[derive(Parser)]
#[command(name = "pivotladder", version, about = "Pivot through typed property graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a pivot script.
    Run {
        script: PathBuf,
        /// Graph to start from; otherwise the script must `load` one.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        usage: UsageArgs,
        /// Print outputs as JSON lines.
        #[arg(long)]
        json: bool,
    },
    /// Read statements from stdin, one `;`-terminated statement at a time.
    Repl {
        graph: Option<PathBuf>,
        #[command(flatten)]
        usage: UsageArgs,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Seconds of inactivity before a session is dropped.
        #[arg(long, default_value_t = 1800)]
        idle_timeout: u64,
        #[command(flatten)]
        usage: UsageArgs,
    },
    /// Print a script in canonical form.
    Fmt {
        script: PathBuf,
        /// Exit with status 1 if the script is not already formatted.
        #[arg(long)]
        check: bool,
    },
    /// Inspect and apply schema adaptations mined from a usage log.
    #[command(subcommand)]
    Adapt(AdaptCommand),
}

#[derive(Subcommand)]
enum AdaptCommand {
    /// List proposals.
    Report {
        #[arg(long)]
        usage_log: PathBuf,
        #[arg(long, default_value_t = 3)]
        threshold: usize,
        #[arg(long)]
        json: bool,
    },
    /// Apply a proposal and write the rewritten graph.
    Apply {
        id: u32,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        usage_log: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        threshold: usize,
    },
}

#[derive(Args)]
struct UsageArgs {
    /// NDJSON usage log; read at start and appended to.
    #[arg(long)]
    usage_log: Option<PathBuf>,
    /// Occurrences before a pattern is proposed.
    #[arg(long, default_value_t = 3)]
    threshold: usize,
    /// Apply proposals as soon as they cross the threshold.
    #[arg(long)]
    auto_apply: bool,
}

impl UsageArgs {
    fn config(&self) -> AdaptConfig {
        AdaptConfig {
            threshold: self.threshold,
            auto_apply: self.auto_apply,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_graph(path: &Path) -> Result<PropertyGraph> {
    let text = read(path)?;
    load_graph(&text, GraphFormat::from_path(&path.display().to_string()))
        .with_context(|| format!("cannot load graph {}", path.display()))
}

fn read_usage_log(path: Option<&Path>) -> Result<UsageLog> {
    match path {
        Some(p) if p.exists() => UsageLog::from_ndjson(&read(p)?)
            .with_context(|| format!("cannot read usage log {}", p.display())),
        _ => Ok(UsageLog::new()),
    }
}

fn append_usage(path: Option<&Path>, before: usize, log: &UsageLog) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let fresh = &log.entries()[before..];
    if fresh.is_empty() {
        return Ok(());
    }
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("cannot open usage log {}", path.display()))?;
    file.write_all(UsageLog::lines(fresh).as_bytes())?;
    Ok(())
}

fn executor(graph: Option<&Path>, usage: &UsageArgs, base_dir: &Path) -> Result<(Executor, usize)> {
    let graph = graph.map(read_graph).transpose()?.map(Arc::new);
    let log = read_usage_log(usage.usage_log.as_deref())?;
    let before = log.len();
    let ex = Executor::new(graph)
        .with_usage_log(log)
        .with_config(usage.config())
        .with_base_dir(base_dir)
        .with_session_name("cli");
    Ok((ex, before))
}

fn located(path: &Path, span: Span, message: impl std::fmt::Display) -> String {
    format!("{}:{}:{}: {}", path.display(), span.line, span.column, message)
}

fn print_output(out: &Output, json: bool) {
    if json {
        println!("{}", serde_json::to_string(out).expect("outputs serialize"));
    } else {
        println!("{out}");
    }
}

fn run_script(script: &Path, graph: Option<&Path>, usage: &UsageArgs, json: bool) -> Result<ExitCode> {
    let src = read(script)?;
    let parsed = match parse(&src) {
        Ok(s) => s,
        Err(e) => {
            let mut msg = e.message.clone();
            if !e.expected.is_empty() {
                msg.push_str(&format!(" (expected {})", e.expected.join(", ")));
            }
            eprintln!("{}", located(script, e.span, msg));
            return Ok(ExitCode::FAILURE);
        }
    };
    let base = script.parent().unwrap_or(Path::new("."));
    let (mut ex, before) = executor(graph, usage, base)?;
    let mut status = ExitCode::SUCCESS;
    for st in &parsed.statements {
        match ex.statement(st) {
            Ok(Some(out)) => print_output(&out, json),
            Ok(None) => {}
            Err(e) => {
                eprintln!("{} [{}]", located(script, e.span, &e.kind), e.code());
                status = ExitCode::FAILURE;
                break;
            }
        }
    }
    append_usage(usage.usage_log.as_deref(), before, ex.usage_log())?;
    Ok(status)
}

fn repl(graph: Option<&Path>, usage: &UsageArgs) -> Result<ExitCode> {
    let (mut ex, before) = executor(graph, usage, Path::new("."))?;
    let stdin = std::io::stdin();
    let mut buffer = String::new();
    for line in stdin.lock().lines() {
        let line = line?;
        buffer.push_str(&line);
        buffer.push('\n');
        if !line.trim_end().ends_with(';') {
            continue;
        }
        let text = std::mem::take(&mut buffer);
        let script = match parse(&text) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                continue;
            }
        };
        for st in &script.statements {
            match ex.statement(st) {
                Ok(Some(out)) => print_output(&out, false),
                Ok(None) => {}
                Err(e) => {
                    eprintln!("error: {} [{}]", e.kind, e.code());
                    break;
                }
            }
        }
        std::io::stdout().flush()?;
    }
    if !buffer.trim().is_empty() {
        eprintln!("error: unterminated statement at end of input");
    }
    append_usage(usage.usage_log.as_deref(), before, ex.usage_log())?;
    Ok(ExitCode::SUCCESS)
}

fn fmt(script: &Path, check: bool) -> Result<ExitCode> {
    let src = read(script)?;
    let parsed = match parse(&src) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}", located(script, e.span, &e.message));
            return Ok(ExitCode::FAILURE);
        }
    };
    let formatted = format_script(&parsed);
    if check {
        if formatted != src {
            eprintln!("{} is not formatted", script.display());
            return Ok(ExitCode::FAILURE);
        }
    } else {
        print!("{formatted}");
    }
    Ok(ExitCode::SUCCESS)
}

fn adapt(cmd: AdaptCommand) -> Result<ExitCode> {
    match cmd {
        AdaptCommand::Report {
            usage_log,
            threshold,
            json,
        } => {
            let log = read_usage_log(Some(&usage_log))?;
            let config = AdaptConfig {
                threshold,
                auto_apply: false,
            };
            let proposals = detect_patterns(&log, &config)?;
            print_output(&Output::Proposals { proposals }, json);
        }
        AdaptCommand::Apply {
            id,
            graph,
            usage_log,
            out,
            threshold,
        } => {
            let g = read_graph(&graph)?;
            let log = read_usage_log(Some(&usage_log))?;
            let config = AdaptConfig {
                threshold,
                auto_apply: false,
            };
            let proposals = detect_patterns(&log, &config)?;
            let h = apply_proposal(&g, &proposals, id)?;
            let rewrite = &proposals.iter().find(|p| p.id == id).expect("applied").rewrite;
            let report = equivalence_report(&g, &h, rewrite)?;
            let format = GraphFormat::from_path(&out.display().to_string());
            std::fs::write(&out, write_graph(&h, format))
                .with_context(|| format!("cannot write {}", out.display()))?;
            print_output(
                &Output::Applied {
                    proposal: id,
                    graph_version: h.version(),
                    report,
                },
                false,
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

async fn serve(
    graph: PathBuf,
    host: String,
    port: u16,
    idle_timeout: u64,
    usage: UsageArgs,
) -> Result<ExitCode> {
    if usage.threshold == 0 {
        bail!("threshold must be at least 1");
    }
    let config = ServeConfig {
        host,
        port,
        graph_path: graph,
        service: ServiceConfig {
            adapt: usage.config(),
            idle_timeout: Duration::from_secs(idle_timeout),
            usage_log_path: usage.usage_log.clone(),
        },
    };
    let (listener, state) = bind(&config).await?;
    println!("listening on http://{}", listener.local_addr()?);
    run(listener, state).await?;
    Ok(ExitCode::SUCCESS)
}

#[tokio::main]
async fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run {
            script,
            graph,
            usage,
            json,
        } => run_script(&script, graph.as_deref(), &usage, json),
        Command::Repl { graph, usage } => repl(graph.as_deref(), &usage),
        Command::Serve {
            graph,
            host,
            port,
            idle_timeout,
            usage,
        } => serve(graph, host, port, idle_timeout, usage).await,
        Command::Fmt { script, check } => fmt(&script, check),
        Command::Adapt(cmd) => adapt(cmd),
    }
}
