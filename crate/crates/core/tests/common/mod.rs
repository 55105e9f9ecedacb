#![allow(dead_code)]

use gpcompare_core::{Dataset, Hyperparameters, Matrix};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Dataset with `n` uniform inputs in `[0, 1]^d` and smooth-ish responses.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Dataset {
    let x: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>()).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let s: f64 = x[i * d..(i + 1) * d].iter().sum();
            (3.0 * s).sin() + 0.3 * rng.random::<f64>()
        })
        .collect();
    Dataset::new(Matrix::from_vec(n, d, x).unwrap(), y).unwrap()
}

pub fn random_params(rng: &mut ChaCha8Rng, d: usize) -> Hyperparameters {
    let ls = (0..d).map(|_| rng.random_range(0.15..1.5)).collect();
    Hyperparameters::new(rng.random_range(0.5..3.0), ls, rng.random_range(0.05..0.8), rng.random_range(-1.0..1.0))
        .unwrap()
}

/// Squared-exponential kernel written out independently of the crate:
/// `σ² exp(-Σ ((x-y)/θ)²)`.
pub fn se(p: &Hyperparameters, x: &[f64], y: &[f64]) -> f64 {
    let s: f64 = x.iter().zip(y).zip(p.lengthscales()).map(|((a, b), l)| ((a - b) / l).powi(2)).sum();
    p.signal_std().powi(2) * (-s).exp()
}

pub fn kernel_na(p: &Hyperparameters, a: &Matrix, b: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.rows(), b.rows(), |i, j| se(p, a.row(i), b.row(j)))
}

/// `(K + σ_ε² I)⁻¹` by explicit dense inversion. Goes through LU because
/// `try_inverse` switches to cofactor formulas up to 4×4, which are only good
/// to about 1e-8 at condition numbers in the thousands.
pub fn dense_inverse(p: &Hyperparameters, x: &Matrix) -> DMatrix<f64> {
    let n = x.rows();
    let a = kernel_na(p, x, x) + DMatrix::identity(n, n) * p.nugget_std().powi(2);
    a.lu().try_inverse().expect("regularized kernel matrix is invertible")
}

pub fn centered(p: &Hyperparameters, d: &Dataset) -> DVector<f64> {
    DVector::from_iterator(d.len(), d.responses().iter().map(|y| y - p.mean_offset()))
}

/// Dense covariance of `f̂₂ − f̂₁` on `grid` under the shared-GP null, by the
/// expanded formula with explicit inverses.
pub fn dense_diff_cov(p: &Hyperparameters, d1: &Dataset, d2: &Dataset, grid: &Matrix) -> DMatrix<f64> {
    let (x1, x2) = (d1.inputs(), d2.inputs());
    let b1 = kernel_na(p, grid, x1) * dense_inverse(p, x1);
    let b2 = kernel_na(p, grid, x2) * dense_inverse(p, x2);
    let a1 = kernel_na(p, x1, x1) + DMatrix::identity(x1.rows(), x1.rows()) * p.nugget_std().powi(2);
    let a2 = kernel_na(p, x2, x2) + DMatrix::identity(x2.rows(), x2.rows()) * p.nugget_std().powi(2);
    let k12 = kernel_na(p, x1, x2);
    let cross = &b2 * k12.transpose() * b1.transpose();
    &b1 * a1 * b1.transpose() + &b2 * a2 * b2.transpose() - &cross - cross.transpose()
}

/// Random symmetric PSD matrix `B Bᵀ` with a decaying spectrum.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> Matrix {
    let mut b = Matrix::zeros(n, rank);
    for i in 0..n {
        for j in 0..rank {
            b[(i, j)] = (rng.random::<f64>() - 0.5) * 0.7f64.powi(j as i32);
        }
    }
    b.matmul(&b.transpose()).unwrap()
}
