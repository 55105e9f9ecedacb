//! The `benchmark` and `simulate` workflows.

use std::path::{Path, PathBuf};

use gpcompare_core::simbench::{self, shared_hyperparameters, simulate_pair_seeded, simulate_run, summarize, Setting};
use gpcompare_core::{BenchmarkConfig, BenchmarkReport, TestGrid};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::ingest::dataset_to_csv;
use crate::output::write_atomic;

/// Every combination of `grid_sizes` and `truncations` (`None` = threshold
/// rule), all evaluated on the same simulated runs.
pub fn settings(grid_sizes: &[usize], truncations: &[Option<usize>]) -> Vec<Setting> {
    grid_sizes
        .iter()
        .flat_map(|&g| {
            truncations.iter().map(move |&t| Setting {
                grid_size: g,
                truncation_override: t,
            })
        })
        .collect()
}

/// Monte Carlo error rates, runs spread over the rayon pool. Results do not
/// depend on the number of threads.
pub fn run_benchmark(cfg: &BenchmarkConfig, settings: &[Setting]) -> Result<Vec<BenchmarkReport>> {
    cfg.validate()?;
    if settings.is_empty() {
        return Err(CliError::Usage("no benchmark settings".into()));
    }
    for s in settings {
        TestGrid::lattice(cfg.function.domain_box(), s.grid_size)?;
        if s.truncation_override == Some(0) {
            return Err(CliError::Usage("a forced truncation needs m ≥ 1".into()));
        }
    }
    let shared = if cfg.shared_fit { Some(shared_hyperparameters(cfg)?) } else { None };
    let outcomes = (0..cfg.runs)
        .into_par_iter()
        .map(|run| simulate_run(cfg, settings, run, shared.as_ref()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(summarize(cfg, settings, &outcomes)?)
}

const COLUMNS: [&str; 18] = [
    "function",
    "runs",
    "n_per_dataset",
    "grid_size",
    "truncation",
    "alpha",
    "type1_rate",
    "type1_stderr",
    "type2_rate",
    "type2_stderr",
    "null_completed",
    "alt_completed",
    "failures",
    "l2_dist_percent",
    "l2_resolution",
    "restarts",
    "shared_fit",
    "seed",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Results table, one row per report.
pub fn reports_csv(cfg: &BenchmarkConfig, reports: &[BenchmarkReport]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Usage(e.to_string());
    w.write_record(COLUMNS).map_err(err)?;
    for r in reports {
        w.write_record([
            r.function_name.to_string(),
            r.runs.to_string(),
            r.sample_size_per_dataset.to_string(),
            r.grid_size.to_string(),
            r.truncation_override.map(|m| m.to_string()).unwrap_or_else(|| "rule".into()),
            r.alpha.to_string(),
            opt(r.type1_rate),
            opt(r.type1_stderr()),
            opt(r.type2_rate),
            opt(r.type2_stderr()),
            r.null_completed.to_string(),
            r.alt_completed.to_string(),
            r.failures.to_string(),
            r.l2_dist_percent.to_string(),
            r.l2_resolution.to_string(),
            cfg.fit.restarts.to_string(),
            r.shared_fit.to_string(),
            r.seed.to_string(),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

pub fn write_reports(path: &Path, cfg: &BenchmarkConfig, reports: &[BenchmarkReport]) -> Result<()> {
    write_atomic(path, &reports_csv(cfg, reports)?)
}

/// Writes `first.csv`, `second.csv` (base function) and
/// `second_perturbed.csv` for one simulated run.
pub fn write_simulated(function: simbench::BenchmarkFunction, n: usize, seed: u64, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let pair = simulate_pair_seeded(function, n, seed)?;
    let names: Vec<String> = (1..=function.dim()).map(|k| format!("x{k}")).collect();
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut written = Vec::new();
    for (file, data) in [
        ("first.csv", &pair.first),
        ("second.csv", &pair.second_base),
        ("second_perturbed.csv", &pair.second_perturbed),
    ] {
        let path = out_dir.join(file);
        write_atomic(&path, &dataset_to_csv(data, &names, "y")?)?;
        written.push(path);
    }
    Ok(written)
}
