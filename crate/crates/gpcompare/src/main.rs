use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gpcompare::bench::{run_benchmark, settings, write_reports, write_simulated};
use gpcompare::compare::parse_bounds;
use gpcompare::{run_compare, CliError, CompareRequest, ComparisonConfig, Inputs, Result};
use gpcompare_core::simbench::Hypotheses;
use gpcompare_core::{BenchmarkConfig, BenchmarkFunction, FitConfig};

/// Test whether two noisy datasets come from the same smooth function, and
/// locate where they differ.
#[derive(Parser)]
#[command(name = "gpcompare", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two CSV datasets. Exit status 0 = same function, 1 = different.
    Compare(CompareArgs),
    /// Estimate type I / type II error rates on a simulated function.
    Benchmark(BenchmarkArgs),
    /// Write one simulated dataset pair as CSV files.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    /// α = 0.10, 1000 grid points over 5–15 m/s, one input column.
    Powercurve,
}

#[derive(Args)]
struct CompareArgs {
    /// First dataset.
    first: PathBuf,
    /// Second dataset; omit together with --split to compare halves of FIRST.
    second: Option<PathBuf>,
    /// Compare alternate rows of FIRST against each other.
    #[arg(long)]
    split: bool,
    /// Input column names (comma separated). Default: all but the response.
    #[arg(long, value_delimiter = ',')]
    input_cols: Option<Vec<String>>,
    /// Response column name. Default: the last column.
    #[arg(long)]
    response_col: Option<String>,
    #[arg(long)]
    preset: Option<PresetArg>,
    /// Significance level. Default: 0.05, or the preset's.
    #[arg(long)]
    alpha: Option<f64>,
    /// Test points in the comparison domain. Default: 500, or the preset's.
    #[arg(long)]
    grid_size: Option<usize>,
    /// Comparison domain as lo:hi per input, comma separated. Default: the
    /// overlap of both datasets' input ranges.
    #[arg(long, allow_hyphen_values = true)]
    bounds: Option<String>,
    #[arg(long, default_value_t = 1000)]
    band_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    threshold_ratio: f64,
    /// Force the number of KL terms instead of the threshold rule.
    #[arg(long)]
    truncation: Option<usize>,
    /// Simplex starts for the hyperparameter fit.
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    /// Output directory for report.json, band.csv and band.svg.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum HypothesesArg {
    Both,
    Null,
    Alternative,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// gp-sample, piston or borehole.
    function: String,
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    /// Points per dataset. Default: 500 for gp-sample, 1000 otherwise.
    #[arg(long)]
    n: Option<usize>,
    /// Grid sizes, comma separated (perfect squares for two inputs).
    #[arg(long, value_delimiter = ',')]
    grid_size: Option<Vec<usize>>,
    /// Truncations, comma separated; `rule` is the threshold rule.
    #[arg(long, value_delimiter = ',', default_value = "rule")]
    truncation: Vec<String>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 1000)]
    band_samples: usize,
    #[arg(long, default_value_t = 1e-6)]
    threshold_ratio: f64,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    /// Fit hyperparameters once and reuse them in every run (faster, but not
    /// the reference procedure).
    #[arg(long)]
    shared_fit: bool,
    #[arg(long, value_enum, default_value = "both")]
    hypotheses: HypothesesArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Results table (CSV).
    #[arg(long, default_value = "benchmark.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// gp-sample, piston or borehole
    function: String,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn function(name: &str) -> Result<BenchmarkFunction> {
    BenchmarkFunction::from_name(name).ok_or_else(|| {
        CliError::Usage(format!("unknown function `{name}` (expected gp-sample, piston or borehole)"))
    })
}

fn compare_cmd(a: CompareArgs) -> Result<u8> {
    let mut config = match a.preset {
        Some(PresetArg::Powercurve) => ComparisonConfig::powercurve(),
        None => ComparisonConfig::default(),
    };
    if let Some(alpha) = a.alpha {
        config.alpha = alpha;
    }
    if let Some(g) = a.grid_size {
        config.grid_size = g;
    }
    if let Some(b) = &a.bounds {
        config.bounds = Some(parse_bounds(b)?);
    }
    config.band_samples = a.band_samples;
    config.seed = a.seed;
    config.threshold_ratio = a.threshold_ratio;
    config.truncation = a.truncation;
    config.restarts = a.restarts;
    let inputs = match (a.second, a.split) {
        (Some(second), false) => Inputs::Files(a.first, second),
        (None, true) => Inputs::Split(a.first),
        (Some(_), true) => return Err(CliError::Usage("--split takes a single dataset".into())),
        (None, false) => return Err(CliError::Usage("give two datasets, or one with --split".into())),
    };
    let outcome = run_compare(&CompareRequest {
        inputs,
        input_columns: a.input_cols,
        response_column: a.response_col,
        config,
        out_dir: a.out,
    })?;
    let band = &outcome.band;
    eprintln!(
        "{}: {} of {} grid points outside the band ({:.2}%), m = {}",
        if band.decision.is_reject() { "different" } else { "no significant difference" },
        band.rejected_count(),
        band.diff.len(),
        band.rejected_percent(),
        band.basis.m()
    );
    for p in &outcome.written {
        eprintln!("wrote {}", p.display());
    }
    Ok(outcome.exit_code())
}

fn benchmark_cmd(a: BenchmarkArgs) -> Result<u8> {
    let f = function(&a.function)?;
    let mut cfg = BenchmarkConfig::new(f);
    cfg.runs = a.runs;
    if let Some(n) = a.n {
        cfg.n_per_dataset = n;
    }
    let grids = a.grid_size.unwrap_or_else(|| vec![cfg.grid_size]);
    cfg.grid_size = grids[0];
    let truncations = a
        .truncation
        .iter()
        .map(|t| match t.as_str() {
            "rule" => Ok(None),
            m => m
                .parse::<usize>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("--truncation entry `{m}` is neither `rule` nor a count"))),
        })
        .collect::<Result<Vec<_>>>()?;
    cfg.alpha = a.alpha;
    cfg.band_samples = a.band_samples;
    cfg.threshold_ratio = a.threshold_ratio;
    cfg.fit = FitConfig {
        restarts: a.restarts,
        seed: a.seed,
        ..Default::default()
    };
    cfg.shared_fit = a.shared_fit;
    cfg.hypotheses = match a.hypotheses {
        HypothesesArg::Both => Hypotheses::Both,
        HypothesesArg::Null => Hypotheses::Null,
        HypothesesArg::Alternative => Hypotheses::Alternative,
    };
    cfg.seed = a.seed;

    let start = Instant::now();
    let reports = run_benchmark(&cfg, &settings(&grids, &truncations))?;
    write_reports(&a.out, &cfg, &reports)?;
    for r in &reports {
        let rate = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |p| format!("{p:.3}"));
        let m = r.truncation_override.map_or_else(|| "rule".to_string(), |m| m.to_string());
        eprintln!(
            "grid {} m {m}: type I {} type II {} ({} failed)",
            r.grid_size,
            rate(r.type1_rate),
            rate(r.type2_rate),
            r.failures
        );
    }
    eprintln!(
        "{} runs of {} in {:.1}s; wrote {}",
        cfg.runs,
        f.name(),
        start.elapsed().as_secs_f64(),
        a.out.display()
    );
    Ok(0)
}

fn simulate_cmd(a: SimulateArgs) -> Result<u8> {
    for p in write_simulated(function(&a.function)?, a.n, a.seed, &a.out)? {
        eprintln!("wrote {}", p.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compare(a) => compare_cmd(a),
        Command::Benchmark(a) => benchmark_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
