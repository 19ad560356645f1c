use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fekete_cli::{run, CliError, Command, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "fekete",
    version,
    about = "Weighted Fekete points, equidistribution and transfinite diameters"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Search Fekete configurations for every degree.
    Fekete(Paths),
    /// Compare Fekete measures with the equilibrium measure.
    Equidistribution(Paths),
    /// Estimate transfinite diameters.
    Diameter(Paths),
    /// Check the derivative identity and the concave-limit lemma.
    Verify(Paths),
}

#[derive(Args)]
struct Paths {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `outputs` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, paths) = match cli.command {
        Sub::Fekete(p) => (Command::Fekete, p),
        Sub::Equidistribution(p) => (Command::Equidistribution, p),
        Sub::Diameter(p) => (Command::Diameter, p),
        Sub::Verify(p) => (Command::Verify, p),
    };
    let result = ExperimentConfig::load(&paths.config).and_then(|cfg| {
        let out = paths.out.or_else(|| cfg.outputs.clone()).ok_or_else(|| {
            CliError::Config("no output directory: pass --out or set outputs".into())
        })?;
        run(command, &cfg, &out)
    });
    match result {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
