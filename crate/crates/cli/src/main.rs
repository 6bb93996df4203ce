use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::Parser;
use cpl_core::experiment::{init_threads_from_env, run_experiment, RunConfig, EXPERIMENTS};
use cpl_core::Error;

/// Run one experiment of the concave-phase laboratory and write its CSV and
/// JSON report to the output directory (`--out`, `CPL_OUT`, or `cpl-out`).
#[derive(Debug, Parser)]
#[command(name = "concave-phase-lab", version)]
struct Cli {
    #[arg(value_parser = PossibleValuesParser::new(EXPERIMENTS))]
    experiment: String,

    /// Flat `key = value` file applied before the command-line overrides.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Overrides as `--key value` or `--key=value`, e.g. `--m 0.5`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, Error> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let key = a
            .strip_prefix("--")
            .ok_or_else(|| Error::Config(format!("expected --key, found {a:?}")))?;
        if let Some((k, v)) = key.split_once('=') {
            out.push((k.to_string(), v.to_string()));
        } else {
            let v = it
                .next()
                .ok_or_else(|| Error::Config(format!("--{key} needs a value")))?;
            out.push((key.to_string(), v.clone()));
        }
    }
    Ok(out)
}

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut config = RunConfig::for_experiment(&cli.experiment);
    if let Some(path) = &cli.config {
        config.apply_file(path)?;
    }
    for (k, v) in parse_overrides(&cli.overrides)? {
        config.set(&k, &v)?;
    }
    config.experiment = cli.experiment.clone();
    Ok(config)
}

fn run(cli: &Cli) -> Result<bool, Error> {
    init_threads_from_env()?;
    let config = build_config(cli)?;
    let outcome = run_experiment(&config)?;
    let (csv, json) = outcome.write(&config.out)?;
    let report = &outcome.report;
    for c in &report.checks {
        println!(
            "[{}] {}: observed {:.6} vs {:.6} ({:?}, tol {})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.observed,
            c.predicted,
            c.comparison,
            c.tolerance
        );
    }
    for m in &report.measurements {
        println!("       {}: {:.6}", m.name, m.value);
    }
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let record = serde_json::json!({
                "experiment": cli.experiment,
                "error": e.kind(),
                "message": e.to_string(),
            });
            eprintln!("{record}");
            ExitCode::from(2)
        }
    }
}
