use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gibbsgeo::config::RunConfig;
use gibbsgeo::pipeline::{self, Command};

#[derive(Parser)]
#[command(name = "gibbsgeo", version, about = "Coexistence, curvature and critical scaling on the reduced van der Waals surface")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Saturation curve and coexistence identities.
    Coexist(Common),
    /// Curvatures along coexistence and a surface mesh.
    Geometry(Common),
    /// Edge of regression of the two-phase surface.
    Edge(Common),
    /// Power-law exponents near the critical point.
    Exponents(Common),
    /// Every stage.
    All(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set grid.count=80`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = match cli.command {
        Sub::Coexist(c) => (Command::Coexist, c),
        Sub::Geometry(c) => (Command::Geometry, c),
        Sub::Edge(c) => (Command::Edge, c),
        Sub::Exponents(c) => (Command::Exponents, c),
        Sub::All(c) => (Command::All, c),
    };
    let cfg = match RunConfig::load(common.config.as_deref(), &common.set) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("gibbsgeo: {e}");
            return ExitCode::from(2);
        }
    };
    match pipeline::run(cmd, &cfg) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            let failed: Vec<_> = outcome.failures().collect();
            for r in failed.iter().take(20) {
                eprintln!(
                    "FAIL {} at {}: {:e} > {:e}",
                    r.check, r.location, r.value, r.tolerance
                );
            }
            if failed.len() > 20 {
                eprintln!("... {} more failures", failed.len() - 20);
            }
            println!(
                "{} checks, {} failed",
                outcome.reports.len(),
                failed.len()
            );
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("gibbsgeo: {e}");
            ExitCode::from(2)
        }
    }
}
