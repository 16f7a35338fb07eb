mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "groupfair", version, about = "Fair division of indivisible goods among groups")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Worker threads for exhaustive search (default: all processors).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check an allocation against a fairness notion.
    Check(CheckArgs),
    /// Run a constructive algorithm on an instance.
    Solve(SolveArgs),
    /// Decide existence of a fair allocation by exhaustive search.
    Search(SearchArgs),
    /// List, run or export the built-in impossibility corpus.
    Corpus(CorpusArgs),
    /// Generalized Kneser graphs: chromatic number, DIMACS export, tightness instances.
    Kneser(KneserArgs),
    /// Turn a monotone 3-CNF formula (DIMACS) into an instance.
    Reduce(ReduceArgs),
    /// Run seeded property suites.
    Fuzz(FuzzArgs),
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub allocation: PathBuf,
    /// ef, ef<c>, efx, efx0 or prop<k>.
    #[arg(long, default_value = "ef1")]
    pub notion: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// EF1 for two groups with binary valuations.
    Binary,
    /// EF1 for a pair and a single agent.
    TwoOne,
    /// Balanced partition that is Exact1 for two agents.
    Exact1,
    /// EF1 with variable groups of the instance's two sizes.
    CutChoose,
    /// Balanced EF1 with two balanced variable groups.
    Knife,
    /// Relaxed proportionality with variable groups of the instance's sizes.
    Proportional,
    /// Round-robin among individual agents.
    RoundRobin,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Include the reduction trace (binary only).
    #[arg(long)]
    pub trace: bool,
    /// Line or circle order of the goods, comma separated (default 0..m).
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value = "ef1")]
    pub notion: String,
    /// Bundle sizes must differ by at most one.
    #[arg(long)]
    pub balanced_goods: bool,
    /// Variable groups: search all balanced agent partitions.
    #[arg(long)]
    pub balanced_agents: bool,
    /// Variable groups: search only this partition (group index per agent).
    #[arg(long, value_delimiter = ',', conflicts_with = "balanced_agents")]
    pub partition: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    /// Run every entry and report PASS/FAIL.
    #[arg(long)]
    pub run_all: bool,
    /// Restrict to one entry.
    #[arg(long)]
    pub name: Option<String>,
    /// Write each entry's instance document into this directory.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Chi {
    Exact,
    Bounds,
}

#[derive(Args, Debug)]
pub struct KneserArgs {
    #[arg(long)]
    pub b: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub s: usize,
    #[arg(long, value_enum, default_value_t = Chi::Bounds)]
    pub chi: Chi,
    /// Write the graph in DIMACS edge format.
    #[arg(long)]
    pub dimacs: Option<PathBuf>,
    /// Build the instance with no balanced EF1 allocation from the colouring.
    #[arg(long, requires = "split")]
    pub tightness: bool,
    /// Group sizes n1,n2 for the tightness instance.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub split: Option<Vec<usize>>,
    /// Where to write the tightness instance (default: embedded in the report).
    #[arg(long, requires = "tightness")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[arg(long)]
    pub formula: PathBuf,
    /// Write the instance here and print a summary instead of the instance.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FuzzArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cases per suite (default: the suite's standard count).
    #[arg(long)]
    pub cases: Option<u64>,
}

/// Non-error outcomes; they map to exit codes 0 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotFound,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors exit 1; clap's own code 2 is reserved for certified non-existence.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot configure {jobs} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok((status, report)) => {
            println!("{}", render::render(&report, cli.format));
            match status {
                Status::Ok => ExitCode::SUCCESS,
                Status::NotFound => ExitCode::from(2),
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
