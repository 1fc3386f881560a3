use std::path::PathBuf;

use byrdscope::monitors::MONITOR_NAMES;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "byrdscope", version, about = "Run logic programs under Byrd-box trace monitors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a program with monitors folded over its live event stream.
    Run(RunArgs),
    /// Record the event stream of a run to a trace file.
    Trace(TraceArgs),
    /// Fold monitors over a recorded trace file.
    Replay(ReplayArgs),
    /// Check a trace file against the port discipline.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct ExecArgs {
    /// Program source file.
    pub program: PathBuf,

    /// Query to run, terminated by a full stop.
    #[arg(long, default_value = "main.")]
    pub query: String,

    /// Also emit disj/then/else events.
    #[arg(long)]
    pub internal_events: bool,

    /// Capture rendered call arguments and use them in node labels.
    #[arg(long)]
    pub args: bool,

    /// Backtrack through every solution instead of stopping at the first.
    #[arg(long)]
    pub all_solutions: bool,

    /// Stop the execution after this many events.
    #[arg(long, value_name = "N")]
    pub max_events: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// Monitor to run; repeat to run several over the same execution.
    #[arg(
        long = "monitor",
        short = 'm',
        value_name = "NAME",
        required = true,
        value_parser = parse_monitor,
    )]
    pub monitors: Vec<String>,

    /// Write JSON results here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Write DOT output of graph and tree monitors here. With several such
    /// monitors the monitor name is inserted before the extension.
    #[arg(long, value_name = "PATH")]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub exec: ExecArgs,

    #[command(flatten)]
    pub output: MonitorArgs,

    /// Print a snapshot of the results to stderr every N events.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub checkpoint_every: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub exec: ExecArgs,

    /// Trace file to write; stdout when absent.
    #[arg(short = 'o', long = "output", value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Trace file to read.
    pub trace: PathBuf,

    #[command(flatten)]
    pub output: MonitorArgs,

    /// Use recorded arguments in node labels.
    #[arg(long)]
    pub args: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Trace file to check.
    pub trace: PathBuf,

    /// The trace may end mid-execution; do not report calls left open.
    #[arg(long)]
    pub partial: bool,
}

fn parse_monitor(s: &str) -> Result<String, String> {
    if MONITOR_NAMES.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("unknown monitor: {s} (known: {})", MONITOR_NAMES.join(", ")))
    }
}
