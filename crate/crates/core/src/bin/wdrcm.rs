use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wdrcm::experiment::{
    run, ConfigError, ExperimentConfig, ExperimentKind, RunError, EXIT_VALIDATION,
};
use wdrcm::paths::trace_marks;

#[derive(Parser)]
#[command(name = "wdrcm", version, about = "Weight-dependent random connection model experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Reach frequencies over a (p, L) grid.
    Sweep(RunArgs),
    /// Reach frequency at one (p, L).
    Theta(RunArgs),
    /// Exhaustive checks of the path/skeleton/tree combinatorics.
    PathsSelftest(RunArgs),
    /// Numerical checks of the integral bounds.
    Verify(RunArgs),
    /// Greedy hierarchy success rates.
    Construct(RunArgs),
    /// Growing-graph giant component trajectories.
    Aba(RunArgs),
    /// Print the skeleton and tree construction for a mark sequence.
    Trace {
        /// Comma-separated marks in (0, 1].
        #[arg(long, value_delimiter = ',', required = true)]
        marks: Vec<f64>,
    },
}

fn run_kind(kind: ExperimentKind, args: RunArgs) -> Result<i32, RunError> {
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if cfg.kind != kind {
        return Err(ConfigError::new(
            "kind",
            format!("config is a `{}` experiment, not `{kind}`", cfg.kind),
        )
        .into());
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    let s = run(&cfg, args.out.as_deref())?;
    for o in &s.manifest.outputs {
        println!("{}\t{} rows\t{}", s.out_dir.join(&o.file).display(), o.rows, o.schema);
    }
    if s.verification_failures > 0 {
        eprintln!("{} verification check(s) failed", s.verification_failures);
    }
    Ok(s.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Trace { marks } => {
            return match trace_marks(&marks) {
                Ok(t) => {
                    print!("{t}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_VALIDATION as u8)
                }
            };
        }
        Command::Sweep(a) => (ExperimentKind::Sweep, a),
        Command::Theta(a) => (ExperimentKind::Theta, a),
        Command::PathsSelftest(a) => (ExperimentKind::PathsSelftest, a),
        Command::Verify(a) => (ExperimentKind::Verify, a),
        Command::Construct(a) => (ExperimentKind::Construct, a),
        Command::Aba(a) => (ExperimentKind::Aba, a),
    };
    let code = run_kind(kind, args).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
