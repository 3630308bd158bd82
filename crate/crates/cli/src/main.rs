use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scenario_cli::{cmd_extract, cmd_mine, cmd_query, cmd_run, parse_time, write_atomic, CliError, Config, QueryRequest};
use scenario_core::QueryScope;

#[derive(Parser)]
#[command(name = "scenario", version, about = "Extract events from text and mine scenarios, forks and triggers")]
struct Cli {
    /// JSON file with default settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract events from a JSON-lines corpus into a graph snapshot.
    Extract(Flags),
    /// Mine a snapshot, updating it and printing the report.
    Mine(Flags),
    /// Extract and mine in one step.
    Run(Flags),
    /// Evaluate a named query against a snapshot.
    Query(QueryArgs),
}

#[derive(Args, Default)]
struct Flags {
    #[arg(long)]
    definitions: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    min_support: Option<usize>,
    #[arg(long)]
    fork_epsilon: Option<f64>,
    #[arg(long)]
    trigger_min_shift: Option<f64>,
    /// Coincidence window in ticks.
    #[arg(long)]
    window: Option<i64>,
    #[arg(long)]
    max_gap: Option<i64>,
    /// Seconds per tick for timestamped documents.
    #[arg(long)]
    granularity: Option<u64>,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Query name, e.g. actors_of_role.
    function: String,
    /// Thing id or name.
    subject: Option<String>,
    #[arg(long)]
    role: Option<String>,
    /// T or START,END.
    #[arg(long, allow_hyphen_values = true)]
    time: Option<String>,
    /// Position in a sequence.
    #[arg(long)]
    order: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn merge(mut config: Config, flags: Flags) -> Config {
    config.definitions = flags.definitions.or(config.definitions);
    config.corpus = flags.corpus.or(config.corpus);
    config.snapshot = flags.snapshot.or(config.snapshot);
    config.out = flags.out.or(config.out);
    config.granularity = flags.granularity.or(config.granularity);
    let m = &mut config.mining;
    m.min_support = flags.min_support.unwrap_or(m.min_support);
    m.fork_epsilon = flags.fork_epsilon.unwrap_or(m.fork_epsilon);
    m.trigger_min_shift = flags.trigger_min_shift.unwrap_or(m.trigger_min_shift);
    m.coincidence_window = flags.window.unwrap_or(m.coincidence_window);
    m.chain_max_gap = flags.max_gap.unwrap_or(m.chain_max_gap);
    config
}

fn emit(out: Option<&PathBuf>, json: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, json),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Extract(flags) => {
            let config = merge(base, flags);
            emit(config.out.as_ref(), &cmd_extract(&config)?)
        }
        Command::Mine(flags) => {
            let config = merge(base, flags);
            emit(config.out.as_ref(), &cmd_mine(&config)?)
        }
        Command::Run(flags) => {
            let config = merge(base, flags);
            emit(config.out.as_ref(), &cmd_run(&config)?)
        }
        Command::Query(args) => {
            let snapshot = args
                .snapshot
                .or(base.snapshot)
                .ok_or_else(|| CliError::Domain("missing --snapshot".into()))?;
            let time = args.time.as_deref().map(parse_time).transpose()?;
            let request = QueryRequest {
                function: args.function,
                subject: args.subject,
                scope: QueryScope { role: args.role, time, order: args.order },
            };
            emit(args.out.as_ref().or(base.out.as_ref()), &cmd_query(&snapshot, &request)?)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
