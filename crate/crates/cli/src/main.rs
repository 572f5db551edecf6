use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hsreach_cli::{compare, export_fixtures, run, summary_line, sweep, ClockSpec, Mode, RunConfig};
use hsreach_core::{Budget, IntermediateMode, Query};

#[derive(Parser)]
#[command(name = "hsreach", version, about = "Budgeted reachability for neural feedback loops")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute reachable sets for one configuration.
    Run(RunArgs),
    /// Refined runs over a list of budgets.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated budgets in seconds; `inf` for no limit.
        #[arg(long, value_delimiter = ',', required = true)]
        budgets: Vec<Budget>,
    },
    /// Error and time table for two run directories.
    Compare { a: PathBuf, b: PathBuf },
    /// Write the built-in systems and their controllers as JSON documents.
    ExportFixtures { dir: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Refined,
    Naive,
    Fixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntermediateArg {
    Concrete,
    Symbolic,
}

#[derive(Args)]
struct RunArgs {
    /// System document, or a built-in name (pendulum, tora, car100, car200).
    #[arg(long)]
    system: String,
    #[arg(long, value_enum, default_value = "refined")]
    mode: ModeArg,
    /// Seconds, or `inf`.
    #[arg(long)]
    budget: Option<Budget>,
    /// Depths for fixed mode, e.g. `4,4,2`; must sum to the horizon.
    #[arg(long, value_delimiter = ',')]
    schedule: Option<Vec<usize>>,
    /// Overrides the horizon stored in the system document.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, default_value_t = hsreach_core::oracle::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `wall`, `sim` or `sim:<cost-model.json>`.
    #[arg(long, default_value = "wall")]
    clock: ClockSpec,
    #[arg(long, default_value_t = Query::DEFAULT_REFINE_LEVELS)]
    refine_levels: usize,
    /// Linear pieces per nonlinearity at the finest pass.
    #[arg(long, default_value_t = Query::DEFAULT_PWL_SEGMENTS)]
    segments: usize,
    #[arg(long, value_enum, default_value = "concrete")]
    intermediate: IntermediateArg,
    #[arg(long)]
    out: PathBuf,
}

impl From<RunArgs> for RunConfig {
    fn from(a: RunArgs) -> Self {
        let mode = match a.mode {
            ModeArg::Refined => Mode::Refined,
            ModeArg::Naive => Mode::Naive,
            ModeArg::Fixed => Mode::Fixed,
        };
        let mut c = RunConfig::new(a.system, mode, a.out);
        c.budget = a.budget;
        c.schedule = a.schedule;
        c.horizon = a.horizon;
        c.samples = a.samples;
        c.seed = a.seed;
        c.clock = a.clock;
        c.refine_levels = a.refine_levels;
        c.segments = a.segments;
        c.intermediate = match a.intermediate {
            IntermediateArg::Concrete => IntermediateMode::Concrete,
            IntermediateArg::Symbolic => IntermediateMode::Symbolic,
        };
        c
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run(args) => run(&args.into()).map(|o| {
            println!("{}", summary_line(&o.row, &o.log));
        }),
        Cmd::Sweep { run, budgets } => sweep(&run.into(), &budgets).map(|rows| {
            for r in rows {
                println!(
                    "budget {:>8}  e_volume {:.4}  e_radius {:.4}  elapsed {:.3}s",
                    r.budget.to_string(),
                    r.e_volume,
                    r.e_radius,
                    r.elapsed_s
                );
            }
        }),
        Cmd::Compare { a, b } => compare(&a, &b).map(|c| print!("{}", c.table())),
        Cmd::ExportFixtures { dir } => export_fixtures(&dir).map(|paths| {
            for p in paths {
                println!("{}", p.display());
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
