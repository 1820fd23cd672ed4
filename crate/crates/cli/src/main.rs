//! `ccm`: build, inspect and reduce molecules from the command line.

mod builders;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ccm", version, about = "Port-graph molecules and enzyme reactions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named molecule, e.g. `build zipper beta 4 -o z.ccm`.
    Build {
        /// Builder name followed by its arguments.
        #[arg(required = true, num_args = 1..)]
        spec: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List the reaction sites of one enzyme.
    Sites {
        #[arg(short, long)]
        molecule: PathBuf,
        #[arg(long)]
        enzyme: String,
    },
    /// Run a soup of enzymes until stall or the step limit.
    Reduce {
        #[arg(short, long)]
        molecule: PathBuf,
        /// Comma-separated kinds, each optionally `KIND:count`.
        #[arg(long)]
        enzymes: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Priority)]
        strategy: StrategyArg,
        #[arg(long, env = "CCM_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = ccm_core::reactor::DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Write the trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the final molecule here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Choose reactions by hand, one per input line.
    Step {
        #[arg(short, long)]
        molecule: PathBuf,
        #[arg(long)]
        enzymes: String,
    },
    /// Search for a multiplier, co-multiplier or propagator certificate.
    Check {
        #[arg(value_enum)]
        what: CheckArg,
        #[arg(short, long)]
        molecule: PathBuf,
        /// Search depth.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Run one of the built-in scenarios.
    Demo {
        #[arg(value_enum)]
        which: DemoArg,
    },
    /// Graphviz rendering of a molecule.
    ExportDot {
        #[arg(short, long)]
        molecule: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Priority,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Multiplier,
    Comultiplier,
    Propagator,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoArg {
    Zipper,
    LockedZipper,
    Set,
    Pair,
    IfthenelseTrue,
    IfthenelseFalse,
}

/// A failed command and its exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
    Refuted(String),
    Stalled(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Refuted(_) => 3,
            Failure::Stalled(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Refuted(m) | Failure::Stalled(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Build { spec, output } => commands::build(&spec, output.as_deref()),
        Command::Sites { molecule, enzyme } => commands::sites(&molecule, &enzyme),
        Command::Reduce {
            molecule,
            enzymes,
            strategy,
            seed,
            max_steps,
            trace,
            output,
        } => commands::reduce(
            &molecule,
            &enzymes,
            matches!(strategy, StrategyArg::Random).then_some(seed),
            max_steps,
            trace.as_deref(),
            output.as_deref(),
        ),
        Command::Step { molecule, enzymes } => commands::step(&molecule, &enzymes),
        Command::Check { what, molecule, bound } => {
            let what = match what {
                CheckArg::Multiplier => commands::Check::Multiplier,
                CheckArg::Comultiplier => commands::Check::Comultiplier,
                CheckArg::Propagator => commands::Check::Propagator,
            };
            commands::check(what, &molecule, bound)
        }
        Command::Demo { which } => commands::demo(match which {
            DemoArg::Zipper => commands::Demo::Zipper,
            DemoArg::LockedZipper => commands::Demo::LockedZipper,
            DemoArg::Set => commands::Demo::Set,
            DemoArg::Pair => commands::Demo::Pair,
            DemoArg::IfthenelseTrue => commands::Demo::IfThenElse(true),
            DemoArg::IfthenelseFalse => commands::Demo::IfThenElse(false),
        }),
        Command::ExportDot { molecule } => commands::export_dot(&molecule),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ccm: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
