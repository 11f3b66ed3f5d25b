//! Runs one JSON-configured experiment.
//!
//! ```text
//! graphon-lab --config experiment.json [--seed 42] [--out results]
//! ```

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use graphon_laplacian::experiment::{error_json, exit_code, run, ExperimentConfig};

#[derive(Parser)]
#[command(version, about = "Graphon spectral experiments")]
struct Args {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output root; defaults to the config's `out`, then `./out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let doc = serde_json::json!({ "error": "usage", "message": e.to_string(), "exit_code": 2 });
            eprintln!("{doc}");
            return ExitCode::from(2);
        }
    };
    let result = ExperimentConfig::from_path(&args.config).and_then(|mut config| {
        if let Some(seed) = args.seed {
            config.seed = seed;
        }
        run(&config, args.out.as_deref())
    });
    match result {
        Ok(output) => {
            println!("{}", output.dir.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", error_json(&err));
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
