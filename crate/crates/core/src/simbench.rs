//! Simulated benchmark functions and Monte Carlo estimates of the test's
//! type I and type II error rates.
//!
//! Each run draws fresh inputs uniformly over the domain box, evaluates the
//! base function at both input sets and the perturbed function at the second,
//! adds independent noise, and runs the comparison twice: base against base
//! (null true) and base against perturbed (null false). The second dataset of
//! both pairs shares its inputs and noise, so the two hypotheses differ only
//! by the perturbation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::diffband::{
    band_from_spectrum, mean_difference, diff_covariance_matrix, CompareOptions, Spectrum, TestGrid, Truncation,
};
use crate::error::{Error, Result};
use crate::gp::{build_cov_matrix, Dataset, Hyperparameters, PosteriorModel};
use crate::hyperfit::{fit_hyperparameters, FitConfig};
use crate::linalg::{Cholesky, Matrix};

const GP_SIGNAL_STD: f64 = 5.0;
const GP_LENGTHSCALE: f64 = 0.2;
const GP_NOISE_STD: f64 = 0.5;

const PISTON_M: f64 = 45.0;
const PISTON_S: f64 = 0.01;
const PISTON_P0: f64 = 100_000.0;
const PISTON_TA: f64 = 292.0;
const PISTON_K_BASE: f64 = 2000.0;
const PISTON_K_PERTURBED: f64 = 2500.0;

const BOREHOLE_TU: f64 = 78_000.0;
const BOREHOLE_HU: f64 = 1050.0;
const BOREHOLE_TL: f64 = 84.0;
const BOREHOLE_HL: f64 = 760.0;
const BOREHOLE_KW: f64 = 11_000.0;
const BOREHOLE_L_BASE: f64 = 1400.0;
const BOREHOLE_L_PERTURBED: f64 = 1450.0;

/// Points per axis of the lattice used for the L² distance of the
/// parametric functions (100 × 100 = 10⁴ points).
const L2_LATTICE_PER_AXIS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Variant {
    Base,
    Perturbed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum BenchmarkFunction {
    /// One-dimensional draws from a known squared-exponential GP.
    GpSample,
    /// Piston cycle time in (V₀, T₀).
    Piston,
    /// Borehole flow rate in (r_w, r).
    Borehole,
}

impl BenchmarkFunction {
    pub const ALL: [BenchmarkFunction; 3] =
        [BenchmarkFunction::GpSample, BenchmarkFunction::Piston, BenchmarkFunction::Borehole];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkFunction::GpSample => "gp-sample",
            BenchmarkFunction::Piston => "piston",
            BenchmarkFunction::Borehole => "borehole",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn dim(self) -> usize {
        self.domain_box().len()
    }

    pub fn domain_box(self) -> &'static [(f64, f64)] {
        match self {
            BenchmarkFunction::GpSample => &[(0.0, 1.0)],
            BenchmarkFunction::Piston => &[(0.002, 0.010), (340.0, 360.0)],
            BenchmarkFunction::Borehole => &[(0.05, 0.15), (100.0, 50_000.0)],
        }
    }

    pub fn noise_std(self) -> f64 {
        match self {
            BenchmarkFunction::GpSample => GP_NOISE_STD,
            BenchmarkFunction::Piston => 0.05,
            BenchmarkFunction::Borehole => 10.0,
        }
    }

    /// Evaluates a parametric function. The GP sample has no closed form and
    /// is rejected.
    pub fn eval(self, x: &[f64], variant: Variant) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!("{} takes {} inputs, got {}", self.name(), self.dim(), x.len())));
        }
        match self {
            BenchmarkFunction::GpSample => Err(Error::invalid("the GP sample has no closed-form evaluator")),
            BenchmarkFunction::Piston => piston_eval(x[0], x[1], variant),
            BenchmarkFunction::Borehole => borehole_eval(x[0], x[1], variant),
        }
    }
}

/// The GP-sample perturbation: adds `⅓ sin(π (x − 0.2) / 0.6)` on `[0.2, 0.8]`.
pub fn perturb_gp(f_value: f64, x: f64) -> f64 {
    if (0.2..=0.8).contains(&x) {
        f_value + (core::f64::consts::PI * (x - 0.2) / 0.6).sin() / 3.0
    } else {
        f_value
    }
}

/// Piston cycle time in seconds. The perturbed variant stiffens the spring
/// from 2000 to 2500.
pub fn piston_eval(v0: f64, t0: f64, variant: Variant) -> Result<f64> {
    let k = match variant {
        Variant::Base => PISTON_K_BASE,
        Variant::Perturbed => PISTON_K_PERTURBED,
    };
    if !(v0 > 0.0 && t0 > 0.0) {
        return Err(Error::Domain(format!("piston needs V0 > 0 and T0 > 0, got ({v0}, {t0})")));
    }
    let (m, s, p0, ta) = (PISTON_M, PISTON_S, PISTON_P0, PISTON_TA);
    let a = p0 * s + 19.62 * m - k * v0 / s;
    let gas = p0 * v0 / t0;
    let disc = a * a + 4.0 * k * gas * ta;
    if !(disc > 0.0) {
        return Err(Error::Domain(format!("piston discriminant {disc} is not positive")));
    }
    let v = s / (2.0 * k) * (disc.sqrt() - a);
    if !(v > 0.0) {
        return Err(Error::Domain(format!("piston volume {v} is not positive")));
    }
    Ok(2.0 * core::f64::consts::PI * (m / (k + s * s * gas * ta / (v * v))).sqrt())
}

/// Borehole flow rate in m³/year. The perturbed variant lengthens the
/// borehole from 1400 m to 1450 m.
pub fn borehole_eval(rw: f64, r: f64, variant: Variant) -> Result<f64> {
    let l = match variant {
        Variant::Base => BOREHOLE_L_BASE,
        Variant::Perturbed => BOREHOLE_L_PERTURBED,
    };
    if !(rw > 0.0 && r > rw) {
        return Err(Error::Domain(format!("borehole needs r > r_w > 0, got r_w = {rw}, r = {r}")));
    }
    let log_ratio = (r / rw).ln();
    let denom = log_ratio * (1.0 + 2.0 * l * BOREHOLE_TU / (log_ratio * rw * rw * BOREHOLE_KW) + BOREHOLE_TU / BOREHOLE_TL);
    Ok(2.0 * core::f64::consts::PI * BOREHOLE_TU * (BOREHOLE_HU - BOREHOLE_HL) / denom)
}

/// `100 · ‖f − g‖ / ‖f‖` over matching discretizations.
pub fn l2_dist_percent(f_vals: &[f64], g_vals: &[f64]) -> Result<f64> {
    if f_vals.len() != g_vals.len() || f_vals.len() < 2 {
        return Err(Error::invalid("L² distance needs two equally long vectors of length ≥ 2"));
    }
    let diff: f64 = f_vals.iter().zip(g_vals).map(|(f, g)| (f - g) * (f - g)).sum();
    let norm: f64 = f_vals.iter().map(|f| f * f).sum();
    if norm == 0.0 {
        return Err(Error::invalid("reference function is identically zero"));
    }
    Ok(100.0 * diff.sqrt() / norm.sqrt())
}

/// L² distance between base and perturbed parametric function on a 100 × 100
/// lattice of the domain box.
pub fn parametric_l2_percent(function: BenchmarkFunction) -> Result<f64> {
    let grid = TestGrid::lattice(function.domain_box(), L2_LATTICE_PER_AXIS.pow(function.dim() as u32))?;
    let mut f = Vec::with_capacity(grid.len());
    let mut g = Vec::with_capacity(grid.len());
    for x in grid.points().row_iter() {
        f.push(function.eval(x, Variant::Base)?);
        g.push(function.eval(x, Variant::Perturbed)?);
    }
    l2_dist_percent(&f, &g)
}

/// One run's simulated data under both hypotheses.
#[derive(Clone, Debug)]
pub struct SimulatedPair {
    /// Base function plus noise at the first input set.
    pub first: Dataset,
    /// Base function plus noise at the second input set.
    pub second_base: Dataset,
    /// Perturbed function at the second input set, same noise as `second_base`.
    pub second_perturbed: Dataset,
    /// `100 · ‖f − g‖ / ‖f‖` over this run's latent values (GP sample only).
    pub l2_percent: Option<f64>,
}

fn uniform_inputs(rng: &mut ChaCha8Rng, n: usize, domain: &[(f64, f64)]) -> Matrix {
    let d = domain.len();
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        for &(lo, hi) in domain {
            data.push(lo + (hi - lo) * rng.random::<f64>());
        }
    }
    Matrix::from_vec(n, d, data).expect("shape matches by construction")
}

fn noise(rng: &mut ChaCha8Rng, n: usize, std: f64) -> Vec<f64> {
    (0..n).map(|_| std * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// The GP-sample truth: `σ_f = 5`, `θ = 0.2`.
pub fn gp_sample_truth() -> Hyperparameters {
    Hyperparameters::isotropic(GP_SIGNAL_STD, GP_LENGTHSCALE, GP_NOISE_STD, 1).expect("constants are valid")
}

/// Latent GP values at the rows of `x`, drawn jointly.
pub fn draw_gp_latent(x: &Matrix, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let truth = gp_sample_truth();
    let k = build_cov_matrix(&truth, x, x)?;
    let chol = Cholesky::with_jitter(&k, truth.signal_variance())?;
    let xi = noise(rng, x.rows(), 1.0);
    let l = chol.factor();
    Ok((0..x.rows()).map(|i| crate::linalg::dot(&l.row(i)[..=i], &xi[..=i])).collect())
}

/// Draws one run's datasets for `function` with `n` points per dataset.
pub fn simulate_pair(function: BenchmarkFunction, n: usize, rng: &mut ChaCha8Rng) -> Result<SimulatedPair> {
    if n < 2 {
        return Err(Error::invalid("each simulated dataset needs at least 2 points"));
    }
    let domain = function.domain_box();
    let x1 = uniform_inputs(rng, n, domain);
    let x2 = uniform_inputs(rng, n, domain);
    let (f1, f2, g2, l2_percent) = match function {
        BenchmarkFunction::GpSample => {
            let mut both = x1.as_slice().to_vec();
            both.extend_from_slice(x2.as_slice());
            let union = Matrix::from_vec(2 * n, 1, both)?;
            let latent = draw_gp_latent(&union, rng)?;
            let perturbed: Vec<f64> = latent.iter().zip(union.as_slice()).map(|(f, x)| perturb_gp(*f, *x)).collect();
            let l2 = l2_dist_percent(&latent, &perturbed).ok();
            (latent[..n].to_vec(), latent[n..].to_vec(), perturbed[n..].to_vec(), l2)
        }
        _ => {
            let eval = |x: &Matrix, v| x.row_iter().map(|r| function.eval(r, v)).collect::<Result<Vec<f64>>>();
            (eval(&x1, Variant::Base)?, eval(&x2, Variant::Base)?, eval(&x2, Variant::Perturbed)?, None)
        }
    };
    let e1 = noise(rng, n, function.noise_std());
    let e2 = noise(rng, n, function.noise_std());
    let add = |f: &[f64], e: &[f64]| f.iter().zip(e).map(|(a, b)| a + b).collect::<Vec<f64>>();
    Ok(SimulatedPair {
        first: Dataset::new(x1, add(&f1, &e1))?,
        second_base: Dataset::new(x2.clone(), add(&f2, &e2))?,
        second_perturbed: Dataset::new(x2, add(&g2, &e2))?,
        l2_percent,
    })
}

/// Noisy GP-sample datasets for `f` and its perturbation `g`, on two
/// independent uniform input sets of `n` points each.
pub fn gp_sample_draw(n: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    let pair = simulate_pair_seeded(BenchmarkFunction::GpSample, n, seed)?;
    Ok((pair.first, pair.second_perturbed))
}

/// [`simulate_pair`] on a fresh stream seeded by `seed`.
pub fn simulate_pair_seeded(function: BenchmarkFunction, n: usize, seed: u64) -> Result<SimulatedPair> {
    simulate_pair(function, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Hypotheses {
    Both,
    /// Type I only.
    Null,
    /// Type II only.
    Alternative,
}

impl Hypotheses {
    fn null(self) -> bool {
        matches!(self, Hypotheses::Both | Hypotheses::Null)
    }

    fn alternative(self) -> bool {
        matches!(self, Hypotheses::Both | Hypotheses::Alternative)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BenchmarkConfig {
    pub function: BenchmarkFunction,
    pub runs: usize,
    pub n_per_dataset: usize,
    /// Total grid points; a perfect square for the two-input functions.
    pub grid_size: usize,
    /// Forces the number of KL terms instead of the threshold rule.
    pub truncation_override: Option<usize>,
    pub alpha: f64,
    pub band_samples: usize,
    pub threshold_ratio: f64,
    pub fit: FitConfig,
    /// Fit hyperparameters once (on the first run's null pair) and reuse them
    /// for every run. A runtime shortcut, not the reference procedure.
    pub shared_fit: bool,
    pub hypotheses: Hypotheses,
    pub seed: u64,
}

impl BenchmarkConfig {
    pub fn new(function: BenchmarkFunction) -> Self {
        BenchmarkConfig {
            function,
            runs: 1000,
            n_per_dataset: if function.dim() == 1 { 500 } else { 1000 },
            grid_size: if function.dim() == 1 { 500 } else { 2500 },
            truncation_override: None,
            alpha: 0.05,
            band_samples: 1000,
            threshold_ratio: 1e-6,
            fit: FitConfig::default(),
            shared_fit: false,
            hypotheses: Hypotheses::Both,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::invalid("runs must be at least 1"));
        }
        if self.n_per_dataset < 2 {
            return Err(Error::invalid("n_per_dataset must be at least 2"));
        }
        self.fit.validate()?;
        self.compare_options(self.setting(), 0).validate()?;
        TestGrid::lattice(self.function.domain_box(), self.grid_size).map(|_| ())
    }

    /// The (grid, truncation) setting described by this config alone.
    pub fn setting(&self) -> Setting {
        Setting {
            grid_size: self.grid_size,
            truncation_override: self.truncation_override,
        }
    }

    fn compare_options(&self, setting: Setting, band_seed: u64) -> CompareOptions {
        CompareOptions {
            alpha: self.alpha,
            band_samples: self.band_samples,
            seed: band_seed,
            truncation: match setting.truncation_override {
                Some(m) => Truncation::Fixed(m),
                None => Truncation::Threshold(self.threshold_ratio),
            },
            fit: self.fit.clone(),
        }
    }
}

/// A grid size and truncation evaluated on the same simulated data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Setting {
    pub grid_size: usize,
    pub truncation_override: Option<usize>,
}

/// Rejection decisions of one run, one entry per setting; `None` marks a
/// numerical failure or a hypothesis that was not evaluated.
#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub null_rejected: Vec<Option<bool>>,
    pub alt_rejected: Vec<Option<bool>>,
    /// Pair-level failures (simulation or hyperparameter fit).
    pub failures: usize,
    pub l2_percent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BenchmarkReport {
    pub function_name: &'static str,
    pub runs: usize,
    pub sample_size_per_dataset: usize,
    pub grid_size: usize,
    pub truncation_override: Option<usize>,
    pub alpha: f64,
    /// Rejections over completed null runs.
    pub type1_rate: Option<f64>,
    /// Acceptances over completed alternative runs.
    pub type2_rate: Option<f64>,
    pub null_completed: usize,
    pub alt_completed: usize,
    /// Attempted (run, hypothesis) evaluations that produced no decision.
    pub failures: usize,
    pub l2_dist_percent: f64,
    /// Number of points behind `l2_dist_percent`.
    pub l2_resolution: usize,
    pub shared_fit: bool,
    pub seed: u64,
}

fn binomial_stderr(rate: f64, count: usize) -> f64 {
    (rate * (1.0 - rate) / count as f64).sqrt()
}

impl BenchmarkReport {
    pub fn type1_stderr(&self) -> Option<f64> {
        self.type1_rate.map(|p| binomial_stderr(p, self.null_completed))
    }

    pub fn type2_stderr(&self) -> Option<f64> {
        self.type2_rate.map(|p| binomial_stderr(p, self.alt_completed))
    }
}

/// Hyperparameters fitted on the first run's null pair, for `shared_fit`.
pub fn shared_hyperparameters(cfg: &BenchmarkConfig) -> Result<Hyperparameters> {
    let mut rng = run_rng(cfg.seed, 0);
    let pair = simulate_pair(cfg.function, cfg.n_per_dataset, &mut rng)?;
    Ok(fit_hyperparameters(&pair.first, &pair.second_base, &cfg.fit)?.params)
}

fn run_rng(seed: u64, run: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run as u64);
    rng
}

/// Decisions for every setting on one pair, sharing the fit and posteriors.
fn decide_pair(
    cfg: &BenchmarkConfig,
    settings: &[Setting],
    grids: &[TestGrid],
    d1: &Dataset,
    d2: &Dataset,
    shared: Option<&Hyperparameters>,
    band_seed: u64,
) -> Result<Vec<Option<bool>>> {
    let params = match shared {
        Some(p) => p.clone(),
        None => fit_hyperparameters(d1, d2, &cfg.fit)?.params,
    };
    let m1 = PosteriorModel::fit(d1, &params)?;
    let m2 = PosteriorModel::fit(d2, &params)?;
    let mut out = vec![None; settings.len()];
    let mut cache: Option<(usize, Vec<f64>, Spectrum)> = None;
    for (k, s) in settings.iter().enumerate() {
        let gi = grids.iter().position(|g| g.len() == s.grid_size).expect("grid built per setting");
        if cache.as_ref().is_none_or(|(g, _, _)| *g != gi) {
            let grid = &grids[gi];
            let diff = mean_difference(&m1, &m2, grid)?;
            let spectrum = Spectrum::of(&diff_covariance_matrix(&m1, &m2, grid)?)?;
            cache = Some((gi, diff, spectrum));
        }
        let (gi, diff, spectrum) = cache.as_ref().expect("filled above");
        // A forced truncation beyond the numerical rank fails only its own setting.
        out[k] = band_from_spectrum(&grids[*gi], diff.clone(), spectrum, &params, &cfg.compare_options(*s, band_seed))
            .ok()
            .map(|band| band.decision.is_reject());
    }
    Ok(out)
}

fn build_grids(cfg: &BenchmarkConfig, settings: &[Setting]) -> Result<Vec<TestGrid>> {
    let mut sizes: Vec<usize> = settings.iter().map(|s| s.grid_size).collect();
    sizes.dedup();
    let mut grids: Vec<TestGrid> = Vec::new();
    for size in sizes {
        if !grids.iter().any(|g| g.len() == size) {
            grids.push(TestGrid::lattice(cfg.function.domain_box(), size)?);
        }
    }
    Ok(grids)
}

/// Simulates run number `run`. Its random stream depends only on
/// `cfg.seed` and `run`, so runs can execute in any order.
pub fn simulate_run(
    cfg: &BenchmarkConfig,
    settings: &[Setting],
    run: usize,
    shared: Option<&Hyperparameters>,
) -> Result<RunOutcome> {
    let grids = build_grids(cfg, settings)?;
    let mut rng = run_rng(cfg.seed, run);
    let mut outcome = RunOutcome {
        null_rejected: vec![None; settings.len()],
        alt_rejected: vec![None; settings.len()],
        ..Default::default()
    };
    let pair = match simulate_pair(cfg.function, cfg.n_per_dataset, &mut rng) {
        Ok(p) => p,
        Err(_) => {
            outcome.failures = 1;
            return Ok(outcome);
        }
    };
    outcome.l2_percent = pair.l2_percent;
    let band_seed = rng.next_u64();
    if cfg.hypotheses.null() {
        match decide_pair(cfg, settings, &grids, &pair.first, &pair.second_base, shared, band_seed) {
            Ok(r) => outcome.null_rejected = r,
            Err(_) => outcome.failures += 1,
        }
    }
    if cfg.hypotheses.alternative() {
        match decide_pair(cfg, settings, &grids, &pair.first, &pair.second_perturbed, shared, band_seed) {
            Ok(r) => outcome.alt_rejected = r,
            Err(_) => outcome.failures += 1,
        }
    }
    Ok(outcome)
}

/// Reduces per-run outcomes into one report per setting.
pub fn summarize(cfg: &BenchmarkConfig, settings: &[Setting], outcomes: &[RunOutcome]) -> Result<Vec<BenchmarkReport>> {
    let (l2, resolution) = match cfg.function {
        BenchmarkFunction::GpSample => {
            let vals: Vec<f64> = outcomes.iter().filter_map(|o| o.l2_percent).collect();
            let mean = if vals.is_empty() { f64::NAN } else { vals.iter().sum::<f64>() / vals.len() as f64 };
            (mean, 2 * cfg.n_per_dataset)
        }
        f => (parametric_l2_percent(f)?, L2_LATTICE_PER_AXIS.pow(f.dim() as u32)),
    };
    let attempted = outcomes.len() * (usize::from(cfg.hypotheses.null()) + usize::from(cfg.hypotheses.alternative()));
    Ok(settings
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let tally = |pick: fn(&RunOutcome) -> &Vec<Option<bool>>, want: bool| {
                let done: Vec<bool> = outcomes.iter().filter_map(|o| pick(o).get(k).copied().flatten()).collect();
                let hits = done.iter().filter(|r| **r == want).count();
                let rate = if done.is_empty() { None } else { Some(hits as f64 / done.len() as f64) };
                (rate, done.len())
            };
            let (type1_rate, null_completed) = tally(|o| &o.null_rejected, true);
            let (type2_rate, alt_completed) = tally(|o| &o.alt_rejected, false);
            let failures = attempted - null_completed - alt_completed;
            BenchmarkReport {
                function_name: cfg.function.name(),
                runs: outcomes.len(),
                sample_size_per_dataset: cfg.n_per_dataset,
                grid_size: s.grid_size,
                truncation_override: s.truncation_override,
                alpha: cfg.alpha,
                type1_rate,
                type2_rate,
                null_completed,
                alt_completed,
                failures,
                l2_dist_percent: l2,
                l2_resolution: resolution,
                shared_fit: cfg.shared_fit,
                seed: cfg.seed,
            }
        })
        .collect())
}

/// Runs every setting on the same simulated data, sequentially.
pub fn estimate_error_rates_paired(cfg: &BenchmarkConfig, settings: &[Setting]) -> Result<Vec<BenchmarkReport>> {
    cfg.validate()?;
    if settings.is_empty() {
        return Err(Error::invalid("at least one setting is required"));
    }
    for s in settings {
        cfg.compare_options(*s, 0).validate()?;
        TestGrid::lattice(cfg.function.domain_box(), s.grid_size)?;
    }
    let shared = if cfg.shared_fit { Some(shared_hyperparameters(cfg)?) } else { None };
    let outcomes = (0..cfg.runs)
        .map(|run| simulate_run(cfg, settings, run, shared.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    summarize(cfg, settings, &outcomes)
}

/// Type I and type II error rates for the configuration.
pub fn estimate_error_rates(cfg: &BenchmarkConfig) -> Result<BenchmarkReport> {
    let mut reports = estimate_error_rates_paired(cfg, &[cfg.setting()])?;
    Ok(reports.remove(0))
}
