mod commands;
mod corpus;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "jsnot",
    version,
    about = "JSON Schema algebra: translation, validation and negation elimination"
)]
struct Cli {
    /// Seed for generated instances; JSNOT_SEED takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Dialect {
    /// From `$schema`, Draft-06 otherwise.
    Auto,
    Draft06,
    Draft2019,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum TranslateMode {
    /// JSON Schema in, algebra text out.
    Algebra,
    /// Algebra text in, JSON Schema out.
    Back,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Target {
    Algebra,
    Extended,
    Draft2019,
    #[value(name = "draft06_with_not", alias = "draft06-with-not")]
    Draft06WithNot,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum OneOf {
    Naive,
    Linear,
}

#[derive(Subcommand)]
enum Command {
    /// Translate JSON Schema to algebra text, or back.
    Translate {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        dialect: Dialect,
        #[arg(long, value_enum, default_value = "algebra")]
        mode: TranslateMode,
        /// JSON Schema flavour written by `--mode back`.
        #[arg(long, value_enum, default_value = "extended")]
        target: Target,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite a schema without negation.
    Notelim {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "linear")]
        oneof: OneOf,
        #[arg(long, value_enum, default_value = "algebra")]
        target: Target,
        #[arg(long, value_enum, default_value = "auto")]
        dialect: Dialect,
        /// Wrap the root in a negation first.
        #[arg(long)]
        negate_root: bool,
        /// Print a TSV run record to stderr.
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate instances; each argument is JSON text, or @path for a file.
    Validate {
        schema: PathBuf,
        #[arg(required = true)]
        instances: Vec<String>,
        #[arg(long, value_enum, default_value = "auto")]
        dialect: Dialect,
    },
    /// Check guardedness and report which negations are expressible.
    Check {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        dialect: Dialect,
    },
    /// Compare two schemas on generated instances.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, value_enum, default_value = "auto")]
        dialect: Dialect,
    },
    /// Not-eliminate every schema under a directory with the root negated.
    Corpus {
        dir: PathBuf,
        /// Write the per-file TSV here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "naive")]
        oneof: OneOf,
        /// Also compare input and output on this many generated instances.
        #[arg(long, default_value_t = 0)]
        verify: usize,
        /// Leave timings out so the output is byte-for-byte reproducible.
        #[arg(long)]
        no_timings: bool,
    },
}

fn seed(flag: u64) -> anyhow::Result<u64> {
    match std::env::var("JSNOT_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("JSNOT_SEED must be an unsigned integer, got {v:?}")),
        Err(_) => Ok(flag),
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let seed = seed(cli.seed)?;
    match cli.command {
        Command::Translate {
            input,
            dialect,
            mode,
            target,
            out,
        } => commands::translate(&input, dialect, mode, target, out.as_deref()),
        Command::Notelim {
            input,
            oneof,
            target,
            dialect,
            negate_root,
            stats,
            out,
        } => commands::notelim(&input, oneof, target, dialect, negate_root, stats, out.as_deref()),
        Command::Validate {
            schema,
            instances,
            dialect,
        } => commands::validate(&schema, &instances, dialect),
        Command::Check { input, dialect } => commands::check(&input, dialect, seed),
        Command::Equiv { a, b, n, dialect } => commands::equiv(&a, &b, n, dialect, seed),
        Command::Corpus {
            dir,
            report,
            oneof,
            verify,
            no_timings,
        } => corpus::run(&dir, report.as_deref(), oneof, verify, no_timings, seed),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
