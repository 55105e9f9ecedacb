//! Squared-exponential Gaussian process regression: kernel evaluation,
//! covariance assembly and the posterior mean.
//!
//! The kernel is the anisotropic squared exponential
//! `k(x, x') = σ_f² exp(-Σ_l ((x_l - x'_l) / θ_l)²)`. Responses are centered
//! by a constant `mean_offset` before any GP algebra and the offset is added
//! back on prediction, so all derivations work with a zero-mean prior.

use alloc::format;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::linalg::{dot, Cholesky, Matrix};

/// One sample: an `n × d` input matrix and its `n` responses.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    inputs: Matrix,
    responses: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Matrix, responses: Vec<f64>) -> Result<Self> {
        if inputs.rows() != responses.len() {
            return Err(Error::invalid(format!(
                "{} input rows but {} responses",
                inputs.rows(),
                responses.len()
            )));
        }
        if inputs.cols() == 0 {
            return Err(Error::invalid("inputs need at least one column"));
        }
        if responses.is_empty() {
            return Err(Error::invalid("dataset is empty"));
        }
        if let Some(i) = inputs.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite input in row {}",
                i / inputs.cols()
            )));
        }
        if let Some(i) = responses.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite response in row {i}")));
        }
        Ok(Dataset { inputs, responses })
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.cols()
    }

    pub fn inputs(&self) -> &Matrix {
        &self.inputs
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.dim() != other.dim() {
            return Err(Error::invalid(format!(
                "cannot merge datasets of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        let mut data = self.inputs.as_slice().to_vec();
        data.extend_from_slice(other.inputs.as_slice());
        let mut responses = self.responses.clone();
        responses.extend_from_slice(&other.responses);
        Ok(Dataset {
            inputs: Matrix::from_vec(responses.len(), self.dim(), data)?,
            responses,
        })
    }

    pub fn response_mean(&self) -> f64 {
        self.responses.iter().sum::<f64>() / self.len() as f64
    }

    /// Sample standard deviation of the responses (zero for a single row).
    pub fn response_std(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.response_mean();
        let ss: f64 = self.responses.iter().map(|y| (y - mean) * (y - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    /// Per-column `(min, max)` of the inputs.
    pub fn input_ranges(&self) -> Vec<(f64, f64)> {
        (0..self.dim())
            .map(|j| {
                self.inputs.row_iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r[j]), hi.max(r[j]))
                })
            })
            .collect()
    }
}

/// Kernel and noise hyperparameters shared by both posterior models.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Hyperparameters {
    signal_std: f64,
    lengthscales: Vec<f64>,
    nugget_std: f64,
    mean_offset: f64,
}

impl Hyperparameters {
    pub fn new(
        signal_std: f64,
        lengthscales: Vec<f64>,
        nugget_std: f64,
        mean_offset: f64,
    ) -> Result<Self> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(signal_std) {
            return Err(Error::invalid(format!("signal_std must be positive, got {signal_std}")));
        }
        if lengthscales.is_empty() {
            return Err(Error::invalid("need at least one lengthscale"));
        }
        if let Some(l) = lengthscales.iter().find(|l| !positive(**l)) {
            return Err(Error::invalid(format!("lengthscales must be positive, got {l}")));
        }
        if !positive(nugget_std) {
            return Err(Error::invalid(format!("nugget_std must be positive, got {nugget_std}")));
        }
        if !mean_offset.is_finite() {
            return Err(Error::invalid("mean_offset must be finite"));
        }
        Ok(Hyperparameters {
            signal_std,
            lengthscales,
            nugget_std,
            mean_offset,
        })
    }

    /// Same lengthscale in every dimension, zero mean offset.
    pub fn isotropic(signal_std: f64, lengthscale: f64, nugget_std: f64, dim: usize) -> Result<Self> {
        Self::new(signal_std, alloc::vec![lengthscale; dim], nugget_std, 0.0)
    }

    pub fn with_mean_offset(mut self, mean_offset: f64) -> Self {
        self.mean_offset = mean_offset;
        self
    }

    pub fn signal_std(&self) -> f64 {
        self.signal_std
    }

    pub fn signal_variance(&self) -> f64 {
        self.signal_std * self.signal_std
    }

    pub fn lengthscales(&self) -> &[f64] {
        &self.lengthscales
    }

    pub fn nugget_std(&self) -> f64 {
        self.nugget_std
    }

    pub fn nugget_variance(&self) -> f64 {
        self.nugget_std * self.nugget_std
    }

    pub fn mean_offset(&self) -> f64 {
        self.mean_offset
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }
}

/// Precomputed form of the kernel for tight loops.
struct SqExp {
    variance: f64,
    inv_ls: Vec<f64>,
}

impl SqExp {
    fn new(params: &Hyperparameters) -> Self {
        SqExp {
            variance: params.signal_variance(),
            inv_ls: params.lengthscales.iter().map(|l| 1.0 / l).collect(),
        }
    }

    #[inline]
    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for ((a, b), w) in x.iter().zip(y).zip(&self.inv_ls) {
            let t = (a - b) * w;
            s += t * t;
        }
        self.variance * (-s).exp()
    }
}

fn check_dim(params: &Hyperparameters, got: usize, what: &str) -> Result<()> {
    if got != params.dim() {
        return Err(Error::invalid(format!(
            "{what} has dimension {got}, hyperparameters expect {}",
            params.dim()
        )));
    }
    Ok(())
}

pub fn kernel_eval(params: &Hyperparameters, x: &[f64], x_prime: &[f64]) -> Result<f64> {
    check_dim(params, x.len(), "first point")?;
    check_dim(params, x_prime.len(), "second point")?;
    Ok(SqExp::new(params).eval(x, x_prime))
}

/// Cross-covariance `K[i, j] = k(a_i, b_j)` between the rows of `a` and `b`.
pub fn build_cov_matrix(params: &Hyperparameters, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    check_dim(params, a.cols(), "left inputs")?;
    check_dim(params, b.cols(), "right inputs")?;
    let kern = SqExp::new(params);
    let mut out = Matrix::zeros(a.rows(), b.rows());
    for i in 0..a.rows() {
        let xi = a.row(i);
        for (o, xj) in out.row_mut(i).iter_mut().zip(b.row_iter()) {
            *o = kern.eval(xi, xj);
        }
    }
    Ok(out)
}

/// `K_{X,X} + σ_ε² I`, evaluating each kernel entry once.
pub(crate) fn regularized_cov(params: &Hyperparameters, x: &Matrix) -> Result<Matrix> {
    check_dim(params, x.cols(), "inputs")?;
    let kern = SqExp::new(params);
    let n = x.rows();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = kern.eval(x.row(i), x.row(j));
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
        out[(i, i)] = kern.variance + params.nugget_variance();
    }
    Ok(out)
}

/// A fitted posterior-mean surrogate. Immutable once built.
#[derive(Clone, Debug)]
pub struct PosteriorModel {
    training: Dataset,
    params: Hyperparameters,
    factor: Cholesky,
    alpha: Vec<f64>,
}

impl PosteriorModel {
    /// Factors `K + σ_ε² I` once and precomputes
    /// `alpha = (K + σ_ε² I)⁻¹ (y - mean_offset)`, with one step of iterative
    /// refinement.
    pub fn fit(data: &Dataset, params: &Hyperparameters) -> Result<Self> {
        check_dim(params, data.dim(), "dataset")?;
        let a = regularized_cov(params, data.inputs())?;
        let factor = Cholesky::with_jitter(&a, params.signal_variance())?;
        let centered: Vec<f64> = data.responses().iter().map(|y| y - params.mean_offset).collect();
        let mut alpha = factor.solve(&centered);

        let residual = residual(&a, factor.jitter(), &alpha, &centered);
        let correction = factor.solve(&residual);
        alpha.iter_mut().zip(&correction).for_each(|(a, c)| *a += c);

        Ok(PosteriorModel {
            training: data.clone(),
            params: params.clone(),
            factor,
            alpha,
        })
    }

    pub fn training(&self) -> &Dataset {
        &self.training
    }

    pub fn params(&self) -> &Hyperparameters {
        &self.params
    }

    pub fn alpha_weights(&self) -> &[f64] {
        &self.alpha
    }

    /// Cholesky factor of the (possibly jittered) regularized kernel matrix.
    pub fn factor(&self) -> &Cholesky {
        &self.factor
    }

    pub fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        check_dim(&self.params, x.len(), "query point")?;
        let kern = SqExp::new(&self.params);
        let r: Vec<f64> = self.training.inputs().row_iter().map(|xi| kern.eval(xi, x)).collect();
        Ok(self.params.mean_offset + dot(&r, &self.alpha))
    }

    pub fn predict_means(&self, points: &Matrix) -> Result<Vec<f64>> {
        check_dim(&self.params, points.cols(), "query points")?;
        let kern = SqExp::new(&self.params);
        let mut r = alloc::vec![0.0; self.training.len()];
        Ok(points
            .row_iter()
            .map(|x| {
                for (ri, xi) in r.iter_mut().zip(self.training.inputs().row_iter()) {
                    *ri = kern.eval(xi, x);
                }
                self.params.mean_offset + dot(&r, &self.alpha)
            })
            .collect())
    }

    /// `‖(K + σ_ε² I + jitter·I) alpha − (y − mean)‖ / ‖y − mean‖`, or the
    /// absolute residual norm when the centered responses vanish.
    pub fn relative_residual(&self) -> f64 {
        let a = match regularized_cov(&self.params, self.training.inputs()) {
            Ok(a) => a,
            Err(_) => return f64::NAN,
        };
        let centered: Vec<f64> =
            self.training.responses().iter().map(|y| y - self.params.mean_offset).collect();
        let r = residual(&a, self.factor.jitter(), &self.alpha, &centered);
        let rn = dot(&r, &r).sqrt();
        let bn = dot(&centered, &centered).sqrt();
        if bn > 0.0 {
            rn / bn
        } else {
            rn
        }
    }
}

fn residual(a: &Matrix, jitter: f64, x: &[f64], b: &[f64]) -> Vec<f64> {
    a.row_iter()
        .zip(b)
        .zip(x)
        .map(|((row, bi), xi)| bi - dot(row, x) - jitter * xi)
        .collect()
}
