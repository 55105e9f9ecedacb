//! Compare two noisy scattered datasets for equality of their underlying
//! smooth functions, and locate the regions where they differ.
//!
//! Both datasets are smoothed with Gaussian process posterior means that share
//! one set of hyperparameters (fitted by maximum likelihood on the merged
//! data). Under the null hypothesis that one GP draw generated both datasets,
//! the difference of the two posterior means is itself a centered GP with a
//! known covariance. A simultaneous `1 - alpha` band for that process is built
//! from a truncated Karhunen-Loève expansion and Monte Carlo draws inside the
//! chi-square confidence ball; the observed difference is then checked against
//! the band on an evenly spaced test grid.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and parallel benchmark drivers live in the `gpcompare` crate.
//!
//! ```
//! use gpcompare_core::{compare, CompareOptions, Dataset, Hyperparameters, Matrix, TestGrid};
//!
//! let xs: Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
//! let ys: Vec<f64> = xs.iter().map(|x| (6.0 * x).sin()).collect();
//! let d = Dataset::new(Matrix::column(&xs), ys).unwrap();
//! let grid = TestGrid::lattice(&[(0.0, 1.0)], 50).unwrap();
//! let params = Hyperparameters::isotropic(1.0, 0.3, 0.1, 1).unwrap();
//!
//! let band = compare(&d, &d, &grid, &CompareOptions::default(), Some(&params)).unwrap();
//! assert!(band.decision.is_accept());
//! ```

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod chisq;
pub mod diffband;
mod error;
pub mod gp;
pub mod hyperfit;
pub mod linalg;
pub mod simbench;
pub mod simplex;

pub use diffband::{
    build_band, chi_square_radius, compare, compare_models, diff_covariance_matrix, kl_decompose,
    sample_confidence_set, CompareOptions, ConfidenceSet, Decision, DifferenceBand, KLBasis,
    Spectrum, TestGrid, Truncation,
};
pub use error::{Error, Result};
pub use gp::{build_cov_matrix, kernel_eval, Dataset, Hyperparameters, PosteriorModel};
pub use hyperfit::{fit_hyperparameters, neg_log_likelihood, FitConfig, FitOutcome};
pub use linalg::Matrix;
pub use simbench::{
    estimate_error_rates, estimate_error_rates_paired, BenchmarkConfig, BenchmarkFunction,
    BenchmarkReport, Hypotheses, Setting, Variant,
};
