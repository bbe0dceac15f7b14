use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "qfest", version, about = "Quadratic density functionals from m-dependent samples")]
#[command(args_override_self = true)]
pub struct Cli {
    /// File of key=value lines supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a functional from CSV samples.
    #[command(allow_negative_numbers = true)]
    Estimate(EstimateArgs),
    /// Write a simulated path, one observation per line.
    #[command(allow_negative_numbers = true)]
    Generate(GenerateArgs),
    /// Print exact functionals of process marginals.
    #[command(allow_negative_numbers = true)]
    Truth(TruthArgs),
    /// Run a Monte Carlo experiment and write its CSV.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Fit log-log MSE slopes to a simulation CSV.
    #[command(allow_negative_numbers = true)]
    Rates(RatesArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Sample of X: one observation per line, comma-separated coordinates.
    #[arg(long, short = 'x')]
    pub input: PathBuf,
    /// Sample of Y, required for q11, q02 and divergence.
    #[arg(long, short = 'y')]
    pub input_y: Option<PathBuf>,
    /// q20, q11, q02, divergence or renyi2.
    #[arg(long, default_value = "q20")]
    pub functional: String,
    #[arg(long)]
    pub epsilon: f64,
    /// complete or incomplete.
    #[arg(long, default_value = "complete")]
    pub variant: String,
    /// Gap of the incomplete estimator: an integer, log or sqrt.
    #[arg(long, default_value = "log")]
    pub gap: String,
    /// Report max(0, D) for the divergence.
    #[arg(long)]
    pub clamp: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Process spec, e.g. example2 or gaussian-ma:taps=1/0.5:shift=1.
    #[arg(long)]
    pub process: String,
    #[arg(long, short = 'n')]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TruthArgs {
    #[arg(long)]
    pub process: String,
    /// Second process; defaults to the first.
    #[arg(long)]
    pub process_y: Option<String>,
    /// Also print the epsilon-smoothed target of q11 at this radius.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Also print the long-run variance of q20 from this many replications.
    #[arg(long)]
    pub sigma2_reps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// fig1, fig2-left, fig2-right or smoke; other plan flags are then ignored
    /// except reps, seed and c.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub process: Option<String>,
    #[arg(long)]
    pub process_y: Option<String>,
    /// q20, q11, q02, divergence or renyi2.
    #[arg(long, default_value = "q20")]
    pub statistic: String,
    #[arg(long, default_value = "complete")]
    pub variant: String,
    #[arg(long, default_value = "log")]
    pub gap: String,
    /// thm1ii, thm1iii, thm2ii or thm2iii.
    #[arg(long, default_value = "thm1iii")]
    pub schedule: String,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Comma-separated schedule constants.
    #[arg(long)]
    pub c: Option<String>,
    /// Comma-separated, strictly increasing sample sizes.
    #[arg(long, default_value = "100,200,400,700,1000")]
    pub n_grid: String,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
    /// Reference value replacing the oracle truth.
    #[arg(long)]
    pub truth: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    /// Directory for one plot-data file per estimator.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub expected_slope: Option<f64>,
    #[arg(long, default_value_t = qfest::montecarlo::DEFAULT_SLOPE_BAND)]
    pub band: f64,
}

/// Parses the command line, filling flags missing from it with values from
/// `--config`. Flags given on the command line win.
pub fn parse(argv: Vec<String>) -> Result<Cli, CliError> {
    let Some(path) = config_path(&argv) else {
        return Cli::try_parse_from(&argv).map_err(CliError::Usage);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Input(format!("cannot read config {path}: {e}")))?;
    let cmd = Cli::command();
    let Some(sub) = argv.iter().skip(1).position(|a| cmd.find_subcommand(a).is_some()).map(|i| i + 1) else {
        return Cli::try_parse_from(&argv).map_err(CliError::Usage);
    };
    let sub_cmd = cmd.find_subcommand(&argv[sub]).expect("position found it");
    let mut injected = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: String| CliError::Input(format!("config line {}: {what}", i + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value".into()))?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        let arg = sub_cmd
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config")
            .ok_or_else(|| bad(format!("unknown key '{key}'")))?;
        if arg.get_action().takes_values() {
            injected.push(format!("--{key}={value}"));
        } else {
            match value {
                "true" => injected.push(format!("--{key}")),
                "false" => {}
                _ => return Err(bad(format!("'{key}' takes true or false"))),
            }
        }
    }
    let mut merged: Vec<String> = argv[..=sub].to_vec();
    merged.extend(injected);
    merged.extend(argv[sub + 1..].iter().cloned());
    Cli::try_parse_from(merged).map_err(CliError::Usage)
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
        if a == "--config" {
            return it.next().cloned();
        }
    }
    None
}
