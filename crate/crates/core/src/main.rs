use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pw_amalgam::commands::{self, exit_code, Outcome, RunOptions};
use pw_amalgam::config::ExperimentConfig;
use pw_amalgam::{Error, Result};

/// Recovery experiments in the Paley-Wiener amalgam space.
#[derive(Parser)]
#[command(name = "pw-amalgam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the interpolator axioms and regular-family hypotheses over the α sweep.
    VerifyFamily(Common),
    /// Reconstruct the configured signal for every α and tabulate the errors.
    Sweep(Common),
    /// Evaluate f and its reconstruction at chosen points (single α).
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Comma-separated evaluation points; defaults to the nodes.
        #[arg(long, value_name = "x1,x2,...", allow_hyphen_values = true)]
        eval_points: Option<String>,
    },
    /// Print the builtin test signals.
    ListSignals {
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; overrides output.directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<(ExperimentConfig, RunOptions)> {
        let config = ExperimentConfig::load(&self.config)?;
        let opts = RunOptions {
            out: self.out.clone(),
            exec: None,
        };
        Ok((config, opts))
    }
}

fn parse_points(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad evaluation point '{s}'")))
        })
        .collect()
}

fn report(outcome: &Outcome) {
    for f in &outcome.files {
        eprintln!("wrote {}", f.display());
    }
    if !outcome.success {
        eprintln!("summary: {}", outcome.summary);
    }
}

fn run(cli: Cli) -> Result<i32> {
    let outcome = match cli.command {
        Command::VerifyFamily(common) => {
            let (config, opts) = common.load()?;
            commands::cmd_verify_family(&config, &opts)?
        }
        Command::Sweep(common) => {
            let (config, opts) = common.load()?;
            commands::cmd_sweep(&config, &opts)?
        }
        Command::Reconstruct {
            common,
            eval_points,
        } => {
            let (config, opts) = common.load()?;
            let points = eval_points.as_deref().map(parse_points).transpose()?;
            let (outcome, body) = commands::cmd_reconstruct(&config, points.as_deref(), &opts)?;
            print!("{body}");
            outcome
        }
        Command::ListSignals { config } => {
            if let Some(path) = config {
                ExperimentConfig::load(&path)?.resolve()?;
            }
            print!("{}", commands::list_signals());
            return Ok(0);
        }
    };
    report(&outcome);
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    let _ = std::io::stdout().flush();
    ExitCode::from(code as u8)
}
