//! Joint maximum-likelihood estimation of the kernel hyperparameters and the
//! nugget on the merged datasets.
//!
//! The search runs in log-parameter space over a box scaled to the data
//! (response spread for the signal and nugget, input range for each
//! lengthscale), using a multi-start Nelder–Mead simplex. The constant mean is
//! fixed at the pooled response mean and is not optimized.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gp::{regularized_cov, Dataset, Hyperparameters};
use crate::linalg::{dot, Cholesky};
use crate::simplex::{minimize, NelderMeadOptions};

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FitConfig {
    /// Number of simplex starts; the first always uses the default
    /// initialization.
    pub restarts: usize,
    /// Simplex iterations per start.
    pub max_iters: usize,
    /// Lengthscale box, as multiples of each input column's range.
    pub lengthscale_bounds: (f64, f64),
    /// Signal-std box, as multiples of the response standard deviation.
    pub signal_bounds: (f64, f64),
    /// Nugget-std box, as multiples of the response standard deviation.
    pub nugget_bounds: (f64, f64),
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            restarts: 5,
            max_iters: 200,
            lengthscale_bounds: (1e-3, 1e3),
            signal_bounds: (1e-3, 1e3),
            nugget_bounds: (1e-6, 1.0),
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        for (name, (lo, hi)) in [
            ("lengthscale", self.lengthscale_bounds),
            ("signal", self.signal_bounds),
            ("nugget", self.nugget_bounds),
        ] {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return Err(Error::invalid(alloc::format!(
                    "{name} bounds must satisfy 0 < lower < upper, got ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }
}

/// Per-start bookkeeping, in log-parameter space
/// `[ln σ_f, ln θ_1 .. ln θ_d, ln σ_ε]`.
#[derive(Clone, Debug)]
pub struct StartRecord {
    pub start: Vec<f64>,
    pub start_nll: f64,
    pub final_nll: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub params: Hyperparameters,
    pub neg_log_likelihood: f64,
    /// One flag per parameter (signal, lengthscales…, nugget): whether the
    /// estimate sits exactly on a bound of the search box.
    pub on_bound: Vec<bool>,
    pub starts: Vec<StartRecord>,
    /// Best objective per simplex iteration of the winning start.
    pub trace: Vec<f64>,
}

impl FitOutcome {
    pub fn any_on_bound(&self) -> bool {
        self.on_bound.iter().any(|b| *b)
    }
}

/// `-ln` of the Gaussian marginal likelihood of `merged` under `params`:
/// `½ yᵀA⁻¹y + ½ ln|A| + (n/2) ln 2π` with `A = K + σ_ε² I` and `y` centered
/// by `params.mean_offset`.
pub fn neg_log_likelihood(params: &Hyperparameters, merged: &Dataset) -> Result<f64> {
    let a = regularized_cov(params, merged.inputs())?;
    let chol = Cholesky::with_jitter(&a, params.signal_variance())?;
    let mut z: Vec<f64> = merged.responses().iter().map(|y| y - params.mean_offset()).collect();
    chol.solve_lower_in_place(&mut z);
    let n = merged.len() as f64;
    Ok(0.5 * dot(&z, &z) + 0.5 * chol.log_det() + 0.5 * n * (2.0 * core::f64::consts::PI).ln())
}

struct SearchBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
    default_start: Vec<f64>,
}

fn search_box(merged: &Dataset, config: &FitConfig) -> SearchBox {
    let std = merged.response_std();
    let y_scale = if std > 0.0 { std } else { 1.0 };
    let mut lower = vec![(config.signal_bounds.0 * y_scale).ln()];
    let mut upper = vec![(config.signal_bounds.1 * y_scale).ln()];
    let mut start = vec![y_scale.ln()];
    for (lo, hi) in merged.input_ranges() {
        let range = if hi > lo { hi - lo } else { 1.0 };
        lower.push((config.lengthscale_bounds.0 * range).ln());
        upper.push((config.lengthscale_bounds.1 * range).ln());
        start.push((range / 10.0).ln());
    }
    lower.push((config.nugget_bounds.0 * y_scale).ln());
    upper.push((config.nugget_bounds.1 * y_scale).ln());
    start.push((y_scale / 10.0).ln());
    for ((s, lo), hi) in start.iter_mut().zip(&lower).zip(&upper) {
        *s = s.max(*lo).min(*hi);
    }
    SearchBox {
        lower,
        upper,
        default_start: start,
    }
}

fn unpack(logp: &[f64], mean: f64) -> Result<Hyperparameters> {
    let d = logp.len() - 2;
    Hyperparameters::new(
        logp[0].exp(),
        logp[1..=d].iter().map(|v| v.exp()).collect(),
        logp[d + 1].exp(),
        mean,
    )
}

/// The starting point of restart 0: signal = response std, lengthscales =
/// input range / 10, nugget = response std / 10, mean = pooled mean.
pub fn default_initialization(merged: &Dataset, config: &FitConfig) -> Result<Hyperparameters> {
    unpack(&search_box(merged, config).default_start, merged.response_mean())
}

/// Fits shared hyperparameters on `d1` followed by `d2`.
pub fn fit_hyperparameters(d1: &Dataset, d2: &Dataset, config: &FitConfig) -> Result<FitOutcome> {
    fit_merged(&d1.concat(d2)?, config)
}

pub fn fit_merged(merged: &Dataset, config: &FitConfig) -> Result<FitOutcome> {
    config.validate()?;
    let mean = merged.response_mean();
    let bx = search_box(merged, config);
    let objective = |x: &[f64]| match unpack(x, mean) {
        Ok(p) => neg_log_likelihood(&p, merged).unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    };

    let mut best: Option<(usize, crate::simplex::Minimum)> = None;
    let mut starts = Vec::with_capacity(config.restarts);
    for r in 0..config.restarts {
        let start = if r == 0 {
            bx.default_start.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(r as u64);
            let spread = 10f64.ln();
            bx.default_start
                .iter()
                .zip(bx.lower.iter().zip(&bx.upper))
                .map(|(s, (lo, hi))| (s + rng.random_range(-spread..spread)).max(*lo).min(*hi))
                .collect()
        };
        let start_nll = objective(&start);
        let fatol = 1e-7 * (1.0 + if start_nll.is_finite() { start_nll.abs() } else { 0.0 });
        let opts = NelderMeadOptions {
            max_iters: config.max_iters,
            xatol: 1e-3,
            fatol,
            initial_step: 0.5,
        };
        let m = minimize(objective, &start, &bx.lower, &bx.upper, &opts);
        starts.push(StartRecord {
            start,
            start_nll,
            final_nll: m.value,
            evaluations: m.evaluations,
            converged: m.converged,
        });
        if m.value.is_finite() && best.as_ref().is_none_or(|(_, b)| m.value < b.value) {
            best = Some((r, m));
        }
    }

    let Some((_, m)) = best else {
        return Err(Error::FitFailure {
            attempted: config.restarts,
        });
    };
    let on_bound = m
        .x
        .iter()
        .zip(bx.lower.iter().zip(&bx.upper))
        .map(|(v, (lo, hi))| v <= lo || v >= hi)
        .collect();
    Ok(FitOutcome {
        params: unpack(&m.x, mean)?,
        neg_log_likelihood: m.value,
        on_bound,
        starts,
        trace: m.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::PosteriorModel;
    use crate::linalg::Matrix;
    use approx::assert_relative_eq;

    #[test]
    fn single_point_likelihoods() {
        // k(x,x) + σ² = 1 with y = 0 → standard normal at zero.
        let p = Hyperparameters::isotropic(0.5f64.sqrt(), 1.0, 0.5f64.sqrt(), 1).unwrap();
        let d = Dataset::new(Matrix::column(&[0.0]), vec![0.0]).unwrap();
        assert_relative_eq!(neg_log_likelihood(&p, &d).unwrap(), 0.918_938_533_204_672_7, max_relative = 1e-14);
        // total variance 2, y = 1
        let p = Hyperparameters::isotropic(1.0, 1.0, 1.0, 1).unwrap();
        let d = Dataset::new(Matrix::column(&[0.0]), vec![1.0]).unwrap();
        assert_relative_eq!(neg_log_likelihood(&p, &d).unwrap(), 1.515_512_123_484_645, max_relative = 1e-14);
    }

    #[test]
    fn config_validation() {
        assert!(FitConfig::default().validate().is_ok());
        let bad = FitConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = FitConfig {
            nugget_bounds: (1.0, 0.5),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn constant_responses_push_nugget_down() {
        let xs: Vec<f64> = (0..12).map(|i| i as f64 / 11.0).collect();
        let d = Dataset::new(Matrix::column(&xs), vec![4.2; 12]).unwrap();
        let cfg = FitConfig {
            restarts: 2,
            ..Default::default()
        };
        let fit = fit_merged(&d, &cfg).unwrap();
        assert_relative_eq!(fit.params.mean_offset(), 4.2, max_relative = 1e-14);
        // Nugget box is [1e-6, 1] × 1 for zero-spread responses.
        assert!(fit.params.nugget_std() < 1e-3, "{:?}", fit.params);
        let m = PosteriorModel::fit(&d, &fit.params).unwrap();
        assert!((m.predict_mean(&[0.37]).unwrap() - 4.2).abs() < 1e-9);
    }

    #[test]
    fn deterministic_given_seed() {
        let xs: Vec<f64> = (0..30).map(|i| (i as f64 * 0.618).fract()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (7.0 * x).sin() + 0.1 * (31.0 * x).cos()).collect();
        let d = Dataset::new(Matrix::column(&xs), ys).unwrap();
        let cfg = FitConfig {
            restarts: 3,
            seed: 42,
            ..Default::default()
        };
        let a = fit_merged(&d, &cfg).unwrap();
        let b = fit_merged(&d, &cfg).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.neg_log_likelihood.to_bits(), b.neg_log_likelihood.to_bits());
        assert!(a.trace.windows(2).all(|w| w[1] <= w[0]));
        for s in &a.starts {
            assert!(a.neg_log_likelihood <= s.start_nll);
        }
    }
}
