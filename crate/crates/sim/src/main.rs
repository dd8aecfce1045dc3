use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ris_csm_sim::config::{load_file, resolve, FileConfig, Overrides};
use ris_csm_sim::output::emit;
use ris_csm_sim::sweep::run_sweep;
use ris_csm_sim::SimError;

/// Link-level sweep harness for RIS channel-signature modulation.
#[derive(Debug, Parser)]
#[command(name = "ris-csm", version, disable_help_subcommand = true)]
struct Cli {
    /// Experiment configuration file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scheme: ris-csm | ris-mimo | ris-gsm | ris-cim.
    #[arg(long)]
    scheme: Option<String>,
    /// Metric: per-group-ser | supersymbol-ser | ber | capacity | mse |
    /// mindist-cdf | analytic-bound | asymptote.
    #[arg(long)]
    metric: Option<String>,
    /// Axis range in dB as START:STOP:STEP.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Axis meaning: snr | ebno.
    #[arg(long)]
    axis: Option<String>,
    /// Trial budget per point.
    #[arg(long)]
    trials: Option<u64>,
    /// Stop a rate point once this many metric errors are observed.
    #[arg(long)]
    min_errors: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 or omitted means available parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Output path; omitted means stdout.
    #[arg(long)]
    out: Option<String>,
    /// Output format: csv | json.
    #[arg(long)]
    format: Option<String>,
}

fn run(cli: Cli) -> Result<(), SimError> {
    let file = match &cli.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };
    let overrides = Overrides {
        scheme: cli.scheme,
        metric: cli.metric,
        snr: cli.snr,
        axis: cli.axis,
        trials: cli.trials,
        min_errors: cli.min_errors,
        seed: cli.seed,
        threads: cli.threads,
        out: cli.out,
        format: cli.format,
    };
    let (spec, output) = resolve(&file, &overrides)?;
    let records = run_sweep(&spec)?;
    emit(&records, output.format, output.path.as_deref().map(std::path::Path::new))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
