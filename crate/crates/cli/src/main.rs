use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use unidecomp::{Profile, ToleranceConfig};
use unidecomp_cli::commands::{self, GenerateArgs, MatchMode, Outcome};
use unidecomp_cli::CliError;

#[derive(Parser)]
#[command(
    name = "unidecomp",
    version,
    about = "Unique sum-of-products decompositions: build, extract, match"
)]
struct Cli {
    /// Tolerance for collinearity, rank and equality tests.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Output file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    BothIndependent,
    AIndependentOnly,
    BIndependentOnly,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::BothIndependent => Profile::BothIndependent,
            ProfileArg::AIndependentOnly => Profile::AIndependentOnly,
            ProfileArg::BIndependentOnly => Profile::BIndependentOnly,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Bi,
    Tri,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random decomposition satisfying the uniqueness hypotheses.
    Generate {
        #[arg(long)]
        n: usize,
        /// Factor dimensions, two or three, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// Which ket sets are independent (bipartite only).
        #[arg(long, value_enum)]
        profile: Option<ProfileArg>,
        /// Slot (0, 1, 2) holding the dependent set (tripartite only).
        #[arg(long)]
        dependent_slot: Option<usize>,
        /// Also write a permuted, rephased twin of the instance here.
        #[arg(long)]
        twin_out: Option<PathBuf>,
    },
    /// Decomposition file to operator file (or vector file for three factors).
    Build { input: PathBuf },
    /// Recover the decomposition of an operator file.
    Extract { input: PathBuf },
    /// Certify that two decomposition files describe the same object.
    Match {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value = "bi")]
        mode: ModeArg,
    },
    /// Lift a bipartite decomposition to a tripartite one.
    Purify {
        input: PathBuf,
        #[arg(long)]
        dim3: Option<usize>,
    },
    /// Schmidt-rank-one test of a vector file.
    Factorable {
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        split: Option<Vec<usize>>,
    },
    /// Reproduce the degenerate-spectrum example.
    Demo,
    /// Load a file and audit its invariants.
    Check { input: PathBuf },
}

fn require_out(out: &Option<PathBuf>) -> Result<&PathBuf, CliError> {
    out.as_ref()
        .ok_or_else(|| CliError::Usage("--out is required".into()))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = ToleranceConfig::uniform(cli.tol)?;
    match &cli.command {
        Command::Generate {
            n,
            dims,
            profile,
            dependent_slot,
            twin_out,
        } => commands::cmd_generate(&GenerateArgs {
            n: *n,
            dims,
            seed: cli.seed,
            profile: profile.map(Profile::from),
            dependent_slot: *dependent_slot,
            out: require_out(&cli.out)?,
            twin_out: twin_out.as_deref(),
        }),
        Command::Build { input } => commands::cmd_build(input, require_out(&cli.out)?, &tol),
        Command::Extract { input } => {
            commands::cmd_extract(input, cli.out.as_deref(), &tol, cli.seed)
        }
        Command::Match {
            first,
            second,
            mode,
        } => {
            let mode = match mode {
                ModeArg::Bi => MatchMode::Bi,
                ModeArg::Tri => MatchMode::Tri,
            };
            commands::cmd_match(first, second, mode, &tol)
        }
        Command::Purify { input, dim3 } => {
            commands::cmd_purify(input, *dim3, require_out(&cli.out)?, &tol)
        }
        Command::Factorable { input, split } => {
            commands::cmd_factorable(input, split.as_deref(), &tol)
        }
        Command::Demo => Ok(commands::cmd_demo()),
        Command::Check { input } => commands::cmd_check(input, &tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.render(cli.json));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
