//! Command-line driver: argument parsing, config merging, logging and exit codes.

pub mod commands;
pub mod meta;
pub mod options;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, CommandFactory, FromArgMatches, Parser, Subcommand};
use log::error;
use serde::Serialize;
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use commands::{
    Context, EmbedArgs, FeaturesArgs, IngestArgs, LayoutArgs, PipelineArgs, RenderArgs, Status, StatsArgs,
    SynthArgs, ValidateArgs,
};
use diagscope::{Error, ErrorKind, Result};

pub const NO_COLOR_ENV: &str = "DIAGSCOPE_NO_COLOR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "diagscope", version, about = "Distant viewing of annotated diagram corpora")]
pub struct Cli {
    /// Worker threads (default: logical cores)
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// JSON file mirroring the long flags; flags win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// More log output (repeatable)
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
    /// Only errors on standard error
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convert a corpus to the canonical layout
    Ingest(IngestArgs),
    /// Check structural invariants and list violations
    Validate(ValidateArgs),
    /// Component, relation and category tables
    Stats(StatsArgs),
    /// Element centroids and density grids per category
    Layout(LayoutArgs),
    /// Brightness and texture features of every blob
    Features(FeaturesArgs),
    /// Two-dimensional projection of a feature table
    Embed(EmbedArgs),
    /// Scatter plots and hexbin panels of an embedding
    Render(RenderArgs),
    /// Generate a synthetic corpus with known structure
    Synth(SynthArgs),
    /// ingest, validate, stats, layout, features, embed and render in one run
    Pipeline(PipelineArgs),
}

fn no_color() -> bool {
    std::env::var_os(NO_COLOR_ENV).is_some_and(|v| !v.is_empty())
}

fn init_logging(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let mut builder = env_logger::Builder::new();
    builder.filter_level(level).parse_default_env().format_timestamp(None);
    if no_color() {
        builder.write_style(env_logger::WriteStyle::Never);
    }
    let _ = builder.try_init();
}

pub fn exit_code(err: &Error) -> i32 {
    match err.kind() {
        ErrorKind::Usage => EXIT_USAGE,
        ErrorKind::Data => EXIT_DATA,
        ErrorKind::Io => EXIT_IO,
    }
}

fn all_config_keys() -> std::collections::BTreeSet<String> {
    let mut keys = options::keys_of::<PipelineArgs>();
    keys.extend(options::keys_of::<SynthArgs>());
    keys.extend(options::keys_of::<EmbedArgs>());
    keys.extend(options::keys_of::<RenderArgs>());
    keys.extend(options::keys_of::<ValidateArgs>());
    keys.insert("jobs".into());
    keys
}

fn merged<T: Serialize + DeserializeOwned>(args: &T, config: &Map<String, Value>) -> Result<(T, Value)> {
    let m = options::merge(args, config)?;
    let value = serde_json::to_value(&m).expect("options serialize");
    Ok((m, value))
}

fn execute(cli: Cli, command_line: Vec<String>) -> Result<Status> {
    let config = match &cli.config {
        Some(p) => options::read_config(p)?,
        None => Map::new(),
    };
    let known = all_config_keys();
    if let Some(k) = config.keys().find(|k| !known.contains(*k)) {
        return Err(Error::usage(format!("unknown config key `{k}`")));
    }
    let jobs = match (cli.jobs, config.get("jobs")) {
        (Some(j), _) => Some(j),
        (None, Some(v)) => Some(
            v.as_u64()
                .ok_or_else(|| Error::usage("config key `jobs` must be a positive integer"))? as usize,
        ),
        (None, None) => None,
    };
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::usage("--jobs must be at least 1"));
        }
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::warn!("thread pool already initialised; --jobs ignored");
        }
    }

    macro_rules! dispatch {
        ($args:expr, $name:literal, $run:path) => {{
            let (args, value) = merged($args, &config)?;
            let ctx = Context {
                command: $name.to_string(),
                command_line,
                config: value,
            };
            $run(&args, &ctx)
        }};
    }
    match &cli.command {
        Command::Ingest(a) => dispatch!(a, "ingest", commands::ingest),
        Command::Validate(a) => dispatch!(a, "validate", commands::validate_cmd),
        Command::Stats(a) => dispatch!(a, "stats", commands::stats),
        Command::Layout(a) => dispatch!(a, "layout", commands::layout),
        Command::Features(a) => dispatch!(a, "features", commands::features),
        Command::Embed(a) => dispatch!(a, "embed", commands::embed_cmd),
        Command::Render(a) => dispatch!(a, "render", commands::render_cmd),
        Command::Synth(a) => dispatch!(a, "synth", commands::synth),
        Command::Pipeline(a) => dispatch!(a, "pipeline", commands::pipeline),
    }
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let command_line: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut cmd = Cli::command();
    if no_color() {
        cmd = cmd.color(clap::ColorChoice::Never);
    }
    let cli = match cmd.try_get_matches_from(args).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_logging(cli.verbose, cli.quiet);
    match execute(cli, command_line) {
        Ok(Status::Clean) => EXIT_OK,
        Ok(Status::Skipped) => EXIT_DATA,
        Err(e) => {
            error!("{e}");
            exit_code(&e)
        }
    }
}
