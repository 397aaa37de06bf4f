//! `goal-arbiter`: detect resource conflicts among an agent's goals and pick
//! the goals it keeps pursuing.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid spec or usage, 3 resource
//! limit (enumeration cap) exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use goal_arbiter_core::argue::{ArgueError, DEFAULT_ENUMERATION_CAP};
use goal_arbiter_core::pipeline::{
    detect_document, export_af, feasibility_document, oracle_document, render_text, solve_document,
    OracleCommandError, OutputDocument, SolveOptions, Strategy,
};
use goal_arbiter_core::resolve::ResolveError;
use goal_arbiter_core::{parse_spec, AgentSpec, Semantics, SpecError, TieBreak};

#[derive(Parser)]
#[command(
    name = "goal-arbiter",
    version,
    about = "Resolve resource conflicts among an agent's goals"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the goals the agent can afford individually.
    Feasibility(Common),
    /// Report per-resource conflict sets and their classification.
    Detect(Common),
    /// Select the consistent goals.
    Solve(SolveArgs),
    /// Write the defeat graph in Graphviz DOT format.
    ExportAf {
        spec: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force cross-check of a small spec.
    #[command(hide = true)]
    Oracle { spec: PathBuf },
}

#[derive(Args)]
struct Common {
    spec: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "algorithmic", value_parser = parse_with::<Strategy>)]
    strategy: Strategy,
    #[arg(long, default_value = "auto", value_parser = parse_with::<Semantics>)]
    semantics: Semantics,
    /// `id` or `seed:N`.
    #[arg(long, default_value = "id", value_parser = parse_with::<TieBreak>)]
    tiebreak: TieBreak,
    /// Seed for tie-breaking; overrides `--tiebreak`.
    #[arg(long, env = "GOAL_ARBITER_SEED")]
    seed: Option<u64>,
    /// Largest framework the preferred-extension enumeration accepts.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn parse_with<T: std::str::FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

enum Failure {
    Io(String),
    Invalid(String),
    Limit(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Limit(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Invalid(m) | Failure::Limit(m) => m,
        }
    }
}

impl From<ArgueError> for Failure {
    fn from(e: ArgueError) -> Self {
        Failure::Limit(e.to_string())
    }
}

fn load(path: &Path) -> Result<AgentSpec, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| match e {
        SpecError::Parse(e) => Failure::Invalid(format!("{}: malformed spec: {e}", path.display())),
        SpecError::Invalid(errors) => Failure::Invalid(format!("{}: {errors}", path.display())),
    })
}

fn print(doc: &OutputDocument, format: Format) {
    match format {
        Format::Json => print!("{}", doc.to_json()),
        Format::Text => print!("{}", render_text(doc)),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Cmd::Feasibility(args) => print(&feasibility_document(&load(&args.spec)?), args.format),
        Cmd::Detect(args) => print(&detect_document(&load(&args.spec)?), args.format),
        Cmd::Solve(args) => {
            let spec = load(&args.common.spec)?;
            let options = SolveOptions {
                strategy: args.strategy,
                semantics: args.semantics,
                tiebreak: args.seed.map_or(args.tiebreak, TieBreak::Seeded),
                cap: args.cap,
            };
            let doc = solve_document(&spec, &options).map_err(|e| match e {
                ResolveError::Argue(e) => Failure::from(e),
                other => Failure::Invalid(other.to_string()),
            })?;
            print(&doc, args.common.format);
        }
        Cmd::ExportAf { spec, out } => {
            let dot = export_af(&load(&spec)?);
            match out {
                Some(path) => fs::write(&path, dot)
                    .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
                None => print!("{dot}"),
            }
        }
        Cmd::Oracle { spec } => {
            let doc = oracle_document(&load(&spec)?).map_err(|e| match e {
                OracleCommandError::Oracle(e) => Failure::Limit(e.to_string()),
                OracleCommandError::Argue(e) => Failure::from(e),
            })?;
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("oracle document serializes")
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
