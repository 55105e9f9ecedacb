//! The `compare` workflow: ingest two datasets, fit shared hyperparameters,
//! run the band test and write the report files.

use std::path::{Path, PathBuf};

use gpcompare_core::{
    compare, fit_hyperparameters, CompareOptions, Dataset, Decision, DifferenceBand, FitConfig, Hyperparameters,
    TestGrid, Truncation,
};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::ingest::{ingest_csv, split_alternating, Ingested};
use crate::output::{band_csv, band_svg, write_atomic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Wind power curves: α = 0.10, 1000 grid points over 5–15 m/s.
    Powercurve,
}

pub const POWERCURVE_BOUNDS: (f64, f64) = (5.0, 15.0);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonConfig {
    pub alpha: f64,
    pub grid_size: usize,
    /// `None` means the intersection of the two datasets' input ranges.
    pub bounds: Option<Vec<(f64, f64)>>,
    pub band_samples: usize,
    pub seed: u64,
    pub threshold_ratio: f64,
    pub truncation: Option<usize>,
    pub restarts: usize,
    pub preset: Option<Preset>,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        ComparisonConfig {
            alpha: 0.05,
            grid_size: 500,
            bounds: None,
            band_samples: 1000,
            seed: 0,
            threshold_ratio: 1e-6,
            truncation: None,
            restarts: 5,
            preset: None,
        }
    }
}

impl ComparisonConfig {
    pub fn powercurve() -> Self {
        ComparisonConfig {
            alpha: 0.10,
            grid_size: 1000,
            bounds: Some(vec![POWERCURVE_BOUNDS]),
            preset: Some(Preset::Powercurve),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.grid_size < 2 {
            return Err(CliError::Usage("--grid-size must be at least 2".into()));
        }
        if let Some(bounds) = &self.bounds {
            if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo < hi)) {
                return Err(CliError::Usage(format!("bounds need lo < hi, got {lo}:{hi}")));
            }
        }
        self.compare_options().validate()?;
        Ok(())
    }

    fn compare_options(&self) -> CompareOptions {
        CompareOptions {
            alpha: self.alpha,
            band_samples: self.band_samples,
            seed: self.seed,
            truncation: match self.truncation {
                Some(m) => Truncation::Fixed(m),
                None => Truncation::Threshold(self.threshold_ratio),
            },
            fit: self.fit_config(),
        }
    }

    fn fit_config(&self) -> FitConfig {
        FitConfig {
            restarts: self.restarts,
            seed: self.seed,
            ..Default::default()
        }
    }
}

/// Parses `lo:hi[,lo:hi...]`.
pub fn parse_bounds(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("bounds entry `{part}` is not lo:hi")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CliError::Usage(format!("`{s}` in bounds is not a finite number")))
            };
            Ok((parse(lo)?, parse(hi)?))
        })
        .collect()
}

/// Per-dimension overlap of the two datasets' observed input ranges.
pub fn intersect_ranges(d1: &Dataset, d2: &Dataset) -> Result<Vec<(f64, f64)>> {
    d1.input_ranges()
        .into_iter()
        .zip(d2.input_ranges())
        .enumerate()
        .map(|(k, ((a0, a1), (b0, b1)))| {
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if lo < hi {
                Ok((lo, hi))
            } else {
                Err(CliError::Usage(format!(
                    "input ranges of dimension {k} do not overlap ([{a0}, {a1}] vs [{b0}, {b1}]); pass --bounds"
                )))
            }
        })
        .collect()
}

/// Evenly spaced lattice over `bounds`; see [`TestGrid::lattice`].
pub fn make_grid(bounds: &[(f64, f64)], grid_size: usize) -> Result<TestGrid> {
    Ok(TestGrid::lattice(bounds, grid_size)?)
}

/// Where the two datasets come from.
#[derive(Clone, Debug)]
pub enum Inputs {
    Files(PathBuf, PathBuf),
    /// Alternate rows of one file.
    Split(PathBuf),
}

#[derive(Clone, Debug)]
pub struct CompareRequest {
    pub inputs: Inputs,
    pub input_columns: Option<Vec<String>>,
    pub response_column: Option<String>,
    pub config: ComparisonConfig,
    pub out_dir: PathBuf,
}

#[derive(Clone, Debug)]
pub struct CompareOutcome {
    pub band: DifferenceBand,
    pub written: Vec<PathBuf>,
}

impl CompareOutcome {
    pub fn exit_code(&self) -> u8 {
        match self.band.decision {
            Decision::Accept => 0,
            Decision::Reject => 1,
        }
    }
}

#[derive(Serialize)]
struct Source<'a> {
    first: &'a Path,
    second: Option<&'a Path>,
    split: bool,
    input_columns: &'a [String],
    response_column: &'a str,
    rows: [usize; 2],
}

#[derive(Serialize)]
struct Fit<'a> {
    hyperparameters: &'a Hyperparameters,
    neg_log_likelihood: f64,
    on_bound: &'a [bool],
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a ComparisonConfig,
    bounds: &'a [(f64, f64)],
    source: Source<'a>,
    fit: Fit<'a>,
    truncation_number: usize,
    eigenvalues: &'a [f64],
    radius: f64,
    acceptance_rate: f64,
    grid: Vec<&'a [f64]>,
    diff: &'a [f64],
    upper: &'a [f64],
    lower: &'a [f64],
    delta: &'a [f64],
    decision: Decision,
    rejected_count: usize,
    rejected_percent: f64,
}

fn load(req: &CompareRequest) -> Result<(Ingested, Option<Ingested>, Dataset, Dataset)> {
    let cols = req.input_columns.as_deref();
    let resp = req.response_column.as_deref();
    match &req.inputs {
        Inputs::Files(a, b) => {
            let first = ingest_csv(a, cols, resp)?;
            let second = ingest_csv(b, cols, resp)?;
            if first.input_columns != second.input_columns {
                return Err(CliError::Usage(format!(
                    "input columns differ: {:?} vs {:?}",
                    first.input_columns, second.input_columns
                )));
            }
            let (d1, d2) = (first.dataset.clone(), second.dataset.clone());
            Ok((first, Some(second), d1, d2))
        }
        Inputs::Split(a) => {
            let first = ingest_csv(a, cols, resp)?;
            let (d1, d2) = split_alternating(&first.dataset)?;
            Ok((first, None, d1, d2))
        }
    }
}

/// Runs the comparison and writes `report.json`, `band.csv` and, for one
/// input dimension, `band.svg` into `req.out_dir`.
pub fn run_compare(req: &CompareRequest) -> Result<CompareOutcome> {
    let cfg = &req.config;
    cfg.validate()?;
    let (first, _second, d1, d2) = load(req)?;
    if cfg.preset == Some(Preset::Powercurve) && d1.dim() != 1 {
        return Err(CliError::Usage(format!(
            "the powercurve preset takes a single input column (wind speed), got {}",
            d1.dim()
        )));
    }
    let bounds = match &cfg.bounds {
        Some(b) if b.len() != d1.dim() => {
            return Err(CliError::Usage(format!("{} bounds given for {} input columns", b.len(), d1.dim())))
        }
        Some(b) => b.clone(),
        None => intersect_ranges(&d1, &d2)?,
    };
    let grid = make_grid(&bounds, cfg.grid_size)?;
    let fit = fit_hyperparameters(&d1, &d2, &cfg.fit_config())?;
    let band = compare(&d1, &d2, &grid, &cfg.compare_options(), Some(&fit.params))?;

    let (second_path, split) = match &req.inputs {
        Inputs::Files(_, b) => (Some(b.as_path()), false),
        Inputs::Split(_) => (None, true),
    };
    let first_path = match &req.inputs {
        Inputs::Files(a, _) | Inputs::Split(a) => a.as_path(),
    };
    let report = Report {
        config: cfg,
        bounds: &bounds,
        source: Source {
            first: first_path,
            second: second_path,
            split,
            input_columns: &first.input_columns,
            response_column: &first.response_column,
            rows: [d1.len(), d2.len()],
        },
        fit: Fit {
            hyperparameters: &fit.params,
            neg_log_likelihood: fit.neg_log_likelihood,
            on_bound: &fit.on_bound,
        },
        truncation_number: band.basis.m(),
        eigenvalues: &band.basis.eigenvalues,
        radius: band.radius,
        acceptance_rate: band.acceptance_rate,
        grid: band.grid.points().row_iter().collect(),
        diff: &band.diff,
        upper: &band.upper,
        lower: &band.lower,
        delta: &band.delta,
        decision: band.decision,
        rejected_count: band.rejected_count(),
        rejected_percent: band.rejected_percent(),
    };

    std::fs::create_dir_all(&req.out_dir).map_err(|e| CliError::io(&req.out_dir, e))?;
    let mut written = Vec::new();
    let mut json = serde_json::to_vec_pretty(&report)?;
    json.push(b'\n');
    let path = req.out_dir.join("report.json");
    write_atomic(&path, &json)?;
    written.push(path);
    let path = req.out_dir.join("band.csv");
    write_atomic(&path, &band_csv(&band, &first.input_columns)?)?;
    written.push(path);
    if let Some(svg) = band_svg(&band, &first.input_columns[0]) {
        let path = req.out_dir.join("band.svg");
        write_atomic(&path, svg.as_bytes())?;
        written.push(path);
    }
    Ok(CompareOutcome { band, written })
}
