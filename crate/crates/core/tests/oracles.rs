//! Checks against independent dense-linear-algebra and distribution oracles.

mod common;

use approx::assert_relative_eq;
use common::*;
use gpcompare_core::diffband::Spectrum;
use gpcompare_core::{
    build_cov_matrix, chi_square_radius, diff_covariance_matrix, kernel_eval, kl_decompose, neg_log_likelihood,
    Dataset, Hyperparameters, Matrix, PosteriorModel, TestGrid, Truncation,
};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn kernel_matches_written_out_formula() {
    let mut r = rng(1);
    for d in 1..=3 {
        let p = random_params(&mut r, d);
        let a = random_dataset(&mut r, 3, d);
        let b = random_dataset(&mut r, 2, d);
        let k = build_cov_matrix(&p, a.inputs(), b.inputs()).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                let expected = se(&p, a.inputs().row(i), b.inputs().row(j));
                assert_relative_eq!(k[(i, j)], expected, max_relative = 1e-12);
                assert_relative_eq!(kernel_eval(&p, a.inputs().row(i), b.inputs().row(j)).unwrap(), expected, max_relative = 1e-12);
            }
        }
    }
}

#[test]
fn alpha_weights_match_dense_inverse() {
    let mut r = rng(2);
    for _ in 0..20 {
        let d = r.random_range(1..=3);
        let data = random_dataset(&mut r, 5, d);
        let p = random_params(&mut r, d);
        let model = PosteriorModel::fit(&data, &p).unwrap();
        let expected = dense_inverse(&p, data.inputs()) * centered(&p, &data);
        for (a, e) in model.alpha_weights().iter().zip(expected.iter()) {
            assert!((a - e).abs() <= 1e-8 * e.abs().max(1.0), "{a} vs {e}");
        }
    }
}

#[test]
fn predictions_match_dense_solve() {
    let mut r = rng(3);
    for _ in 0..20 {
        let d = r.random_range(1..=2);
        let data = random_dataset(&mut r, 5, d);
        let p = random_params(&mut r, d);
        let model = PosteriorModel::fit(&data, &p).unwrap();
        let queries = random_dataset(&mut r, 3, d);
        let weights = dense_inverse(&p, data.inputs()) * centered(&p, &data);
        let cross = kernel_na(&p, queries.inputs(), data.inputs());
        let expected = cross * weights;
        let got = model.predict_means(queries.inputs()).unwrap();
        for (g, e) in got.iter().zip(expected.iter()) {
            assert!((g - (e + p.mean_offset())).abs() <= 1e-8 * g.abs().max(1.0));
        }
    }
}

#[test]
fn likelihood_matches_dense_determinant() {
    let mut r = rng(4);
    for _ in 0..10 {
        let data = random_dataset(&mut r, 6, 2);
        let p = random_params(&mut r, 2);
        let a = kernel_na(&p, data.inputs(), data.inputs()) + DMatrix::identity(6, 6) * p.nugget_std().powi(2);
        let y = centered(&p, &data);
        let quad = (y.transpose() * a.clone().try_inverse().unwrap() * &y)[(0, 0)];
        let expected = 0.5 * quad + 0.5 * a.determinant().ln() + 3.0 * (2.0 * std::f64::consts::PI).ln();
        assert_relative_eq!(neg_log_likelihood(&p, &data).unwrap(), expected, max_relative = 1e-8);
    }
}

#[test]
fn difference_covariance_matches_expanded_formula() {
    let mut r = rng(5);
    for _ in 0..10 {
        let d = r.random_range(1..=2);
        let (n1, n2) = (r.random_range(1..7), r.random_range(1..7));
        let d1 = random_dataset(&mut r, n1, d);
        let d2 = random_dataset(&mut r, n2, d);
        let p = random_params(&mut r, d);
        let grid = TestGrid::lattice(&vec![(0.0, 1.0); d], if d == 1 { 7 } else { 9 }).unwrap();
        let m1 = PosteriorModel::fit(&d1, &p).unwrap();
        let m2 = PosteriorModel::fit(&d2, &p).unwrap();
        let c = diff_covariance_matrix(&m1, &m2, &grid).unwrap();
        let oracle = dense_diff_cov(&p, &d1, &d2, grid.points());
        let scale = oracle.amax();
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                assert!((c[(i, j)] - oracle[(i, j)]).abs() <= 1e-9 * scale.max(1e-300));
                assert_eq!(c[(i, j)], c[(j, i)]);
            }
        }
    }
}

#[test]
fn identical_single_points_give_one_half() {
    let p = Hyperparameters::isotropic(1.0, 1.0, 1.0, 1).unwrap();
    let d = Dataset::new(Matrix::column(&[0.0]), vec![0.3]).unwrap();
    let oracle = dense_diff_cov(&p, &d, &d, &Matrix::column(&[0.0]));
    assert_relative_eq!(oracle[(0, 0)], 0.5, max_relative = 1e-14);
}

#[test]
fn spectrum_matches_symmetric_eigen() {
    let mut r = rng(6);
    for n in [5, 20, 40] {
        let c = random_psd(&mut r, n, n.min(12));
        let reference = SymmetricEigen::new(to_na(&c));
        let mut expected: Vec<f64> = reference.eigenvalues.iter().copied().collect();
        expected.sort_by(|a, b| b.total_cmp(a));
        let spectrum = Spectrum::of(&c).unwrap();
        let scale = expected[0];
        for (k, v) in spectrum.values().iter().enumerate() {
            assert!((v - expected[k]).abs() <= 1e-10 * scale, "n={n} k={k}: {v} vs {}", expected[k]);
        }
        // Everything missing from the spectrum is numerically zero.
        for e in &expected[spectrum.values().len()..] {
            assert!(e.abs() <= 1e-10 * scale);
        }
    }
}

#[test]
fn truncated_reconstruction_error_is_bounded_by_first_discarded_value() {
    let mut r = rng(7);
    for ratio in [1e-2, 1e-4, 1e-6] {
        let c = random_psd(&mut r, 20, 20);
        let basis = kl_decompose(&c, ratio).unwrap();
        let u = to_na(&basis.eigenvectors);
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(basis.eigenvalues.clone()));
        let residual = to_na(&c) - &u * lambda * u.transpose();
        let mut all: Vec<f64> = SymmetricEigen::new(to_na(&c)).eigenvalues.iter().copied().collect();
        all.sort_by(|a, b| b.total_cmp(a));
        let next = all.get(basis.m()).copied().unwrap_or(0.0).max(0.0);
        let spectral = residual.symmetric_eigenvalues().amax();
        assert!(spectral <= next + 1e-10, "ratio {ratio}: {spectral} > {next}");
        // Orthonormal columns.
        let gram = u.transpose() * &u;
        assert!((gram - DMatrix::identity(basis.m(), basis.m())).amax() < 1e-10);
    }
}

#[test]
fn fixed_truncation_keeps_leading_terms() {
    let mut r = rng(8);
    let c = random_psd(&mut r, 15, 10);
    let s = Spectrum::of(&c).unwrap();
    let b = s.truncate(Truncation::Fixed(4)).unwrap();
    assert_eq!(b.m(), 4);
    assert_eq!(&b.eigenvalues[..], &s.values()[..4]);
    assert!(s.truncate(Truncation::Fixed(11)).is_err());
}

#[test]
fn radius_matches_statrs_quantile() {
    for m in [1usize, 2, 5, 10, 50, 100] {
        let dist = ChiSquared::new(m as f64).unwrap();
        for alpha in [0.01, 0.05, 0.10] {
            let expected = dist.inverse_cdf(1.0 - alpha).sqrt();
            let got = chi_square_radius(m, alpha).unwrap();
            assert!((got - expected).abs() <= 1e-6 * expected, "m={m} α={alpha}: {got} vs {expected}");
        }
    }
    assert_relative_eq!(chi_square_radius(1, 0.05).unwrap(), 1.959_963_984_540_054, max_relative = 1e-9);
}
