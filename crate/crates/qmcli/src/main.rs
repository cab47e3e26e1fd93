use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qmcli::sweep::{run_sweep, StrategyKind, SweepConfig};
use qmcli::{load_signal_set, optimize_report, povm_report, verify_checks, CliError};

#[derive(Parser)]
#[command(
    name = "qmcli",
    version,
    about = "Optimal measurements for non-orthogonal signal sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal von Neumann measurement for a signal set
    Optimize {
        #[arg(long)]
        input: String,
        /// Exit with status 3 when the singular values are degenerate
        #[arg(long)]
        strict: bool,
    },
    /// Sweep the two-signal family over theta and write CSV
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        theta_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta_max: f64,
        #[arg(long)]
        points: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "vn,usd")]
        strategies: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Optimal unambiguous-discrimination POVM for a signal set
    Povm {
        #[arg(long)]
        input: String,
    },
    /// Run the invariant checks
    Verify {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Optimize { input, strict } => {
            let s = load_signal_set(&input)?;
            let (text, degenerate) = optimize_report(&s)?;
            print!("{text}");
            if strict && degenerate {
                return Err(CliError::StrictDegenerate(text));
            }
        }
        Command::Sweep {
            theta_min,
            theta_max,
            points,
            k,
            strategies,
            out,
            seed,
        } => {
            let config = SweepConfig {
                theta_min,
                theta_max,
                points,
                k_values: k,
                strategies: strategies
                    .iter()
                    .map(|s| StrategyKind::parse(s))
                    .collect::<Result<_, _>>()?,
                output_path: out,
                seed,
            };
            for path in run_sweep(&config)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Povm { input } => {
            let s = load_signal_set(&input)?;
            print!("{}", povm_report(&s)?);
        }
        Command::Verify { seed } => {
            let checks = verify_checks(seed)?;
            for c in &checks {
                println!(
                    "[{}] {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            if checks.iter().any(|c| !c.passed) {
                return Err(CliError::VerificationFailed);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qmcli: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
