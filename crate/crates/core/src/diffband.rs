//! The comparison test itself: covariance of the difference of the two
//! posterior means, its truncated Karhunen-Loève basis, the chi-square
//! confidence ball, the Monte Carlo band and the accept/reject decision.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::chisq::chi_square_upper_quantile;
use crate::error::{Error, Result};
use crate::gp::{build_cov_matrix, Dataset, Hyperparameters, PosteriorModel};
use crate::hyperfit::{fit_hyperparameters, FitConfig};
use crate::linalg::{lanczos_eigen, Matrix};

/// Lanczos stopping level relative to `‖C‖_F`; far below any sensible
/// truncation ratio.
const EIGEN_REL_TOL: f64 = 1e-12;
const EIGEN_SEED: u64 = 0x6b6c;

/// Evenly spaced evaluation locations for the band.
#[derive(Clone, Debug, PartialEq)]
pub struct TestGrid {
    points: Matrix,
    bounds: Vec<(f64, f64)>,
}

impl TestGrid {
    /// Wraps explicit points. Rejects grids with fewer than two points,
    /// duplicate rows, or points outside `bounds`.
    pub fn new(points: Matrix, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if points.cols() == 0 || bounds.len() != points.cols() {
            return Err(Error::invalid(format!(
                "grid has {} columns but {} bounds",
                points.cols(),
                bounds.len()
            )));
        }
        if points.rows() < 2 {
            return Err(Error::invalid("a test grid needs at least two points"));
        }
        check_bounds(&bounds)?;
        for (i, row) in points.row_iter().enumerate() {
            for (v, (lo, hi)) in row.iter().zip(&bounds) {
                if !(v.is_finite() && *v >= *lo && *v <= *hi) {
                    return Err(Error::invalid(format!(
                        "grid point {i} has coordinate {v} outside [{lo}, {hi}]"
                    )));
                }
            }
        }
        let mut order: Vec<usize> = (0..points.rows()).collect();
        order.sort_by(|&a, &b| {
            points
                .row(a)
                .iter()
                .zip(points.row(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        if let Some(w) = order.windows(2).find(|w| points.row(w[0]) == points.row(w[1])) {
            return Err(Error::invalid(format!(
                "grid rows {} and {} coincide",
                w[0].min(w[1]),
                w[0].max(w[1])
            )));
        }
        Ok(TestGrid { points, bounds })
    }

    /// Cartesian lattice with both endpoints on every axis. For `d ≥ 2`,
    /// `size` must be a perfect `d`-th power; the first axis varies slowest.
    pub fn lattice(bounds: &[(f64, f64)], size: usize) -> Result<Self> {
        let d = bounds.len();
        if d == 0 {
            return Err(Error::invalid("grid needs at least one dimension"));
        }
        check_bounds(bounds)?;
        if size < 2 {
            return Err(Error::invalid("grid size must be at least 2"));
        }
        let per_axis = integer_root(size, d);
        if per_axis < 2 || per_axis.pow(d as u32) != size {
            let above = (per_axis + 1).max(2).pow(d as u32);
            let hint = if per_axis >= 2 {
                format!("{} or {above}", per_axis.pow(d as u32))
            } else {
                format!("{above}")
            };
            return Err(Error::invalid(format!(
                "grid size {size} is not a perfect power for {d} dimensions; nearest valid sizes: {hint}"
            )));
        }
        let axes: Vec<Vec<f64>> = bounds
            .iter()
            .map(|&(lo, hi)| {
                let step = (hi - lo) / (per_axis - 1) as f64;
                (0..per_axis)
                    .map(|i| if i + 1 == per_axis { hi } else { lo + step * i as f64 })
                    .collect()
            })
            .collect();
        let mut data = Vec::with_capacity(size * d);
        let mut idx = vec![0usize; d];
        for _ in 0..size {
            data.extend(idx.iter().zip(&axes).map(|(&i, axis)| axis[i]));
            for k in (0..d).rev() {
                idx[k] += 1;
                if idx[k] < per_axis {
                    break;
                }
                idx[k] = 0;
            }
        }
        TestGrid::new(Matrix::from_vec(size, d, data)?, bounds.to_vec())
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }
}

fn check_bounds(bounds: &[(f64, f64)]) -> Result<()> {
    for (k, (lo, hi)) in bounds.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(format!("bounds of dimension {k} must satisfy lo < hi, got [{lo}, {hi}]")));
        }
    }
    Ok(())
}

/// Largest `k` with `k^d ≤ n`.
fn integer_root(n: usize, d: usize) -> usize {
    let mut k = (n as f64).powf(1.0 / d as f64).round() as usize;
    while k > 0 && k.checked_pow(d as u32).is_none_or(|p| p > n) {
        k -= 1;
    }
    while (k + 1).checked_pow(d as u32).is_some_and(|p| p <= n) {
        k += 1;
    }
    k
}

/// Covariance of `f̂₂ − f̂₁` on the grid under the shared-GP null:
/// `C = S₁ + S₂ − Q − Qᵀ` with `Sᵢ = RᵢᵀAᵢ⁻¹Rᵢ` and `Q = W₂ᵀK₂₁W₁`,
/// `Wᵢ = Aᵢ⁻¹Rᵢ`, `Rᵢ` the training-to-grid kernel block.
pub fn diff_covariance_matrix(m1: &PosteriorModel, m2: &PosteriorModel, grid: &TestGrid) -> Result<Matrix> {
    let params = m1.params();
    if params != m2.params() {
        return Err(Error::invalid("both posterior models must share one set of hyperparameters"));
    }
    if grid.dim() != params.dim() {
        return Err(Error::invalid(format!(
            "grid has dimension {} but the models have {}",
            grid.dim(),
            params.dim()
        )));
    }
    let x1 = m1.training().inputs();
    let x2 = m2.training().inputs();

    // Vᵢ = Lᵢ⁻¹Rᵢ gives Sᵢ = VᵢᵀVᵢ, then Wᵢ = Lᵢ⁻ᵀVᵢ.
    let mut w1 = build_cov_matrix(params, x1, grid.points())?;
    m1.factor().solve_lower_matrix(&mut w1);
    let s1 = w1.gram();
    m1.factor().solve_upper_matrix(&mut w1);

    let mut w2 = build_cov_matrix(params, x2, grid.points())?;
    m2.factor().solve_lower_matrix(&mut w2);
    let s2 = w2.gram();
    m2.factor().solve_upper_matrix(&mut w2);

    let k21 = build_cov_matrix(params, x2, x1)?;
    let q = w2.tr_matmul(&k21.matmul(&w1)?)?;

    let n = grid.len();
    let mut c = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = s1[(i, j)] + s2[(i, j)] - (q[(i, j)] + q[(j, i)]);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    Ok(c)
}

/// How many KL terms to keep.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Truncation {
    /// Keep every eigenvalue `λ ≥ ratio·λ_max`.
    Threshold(f64),
    /// Keep exactly the leading `m` positive eigenvalues.
    Fixed(usize),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Threshold(1e-6)
    }
}

/// All numerically resolvable eigenpairs of a difference covariance.
#[derive(Clone, Debug)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: Matrix,
    trace: f64,
}

impl Spectrum {
    /// Symmetrizes `c` and resolves every eigenpair above `1e-12·‖C‖_F`.
    pub fn of(c: &Matrix) -> Result<Self> {
        if c.rows() != c.cols() {
            return Err(Error::invalid("covariance must be square"));
        }
        let mut sym = c.clone();
        sym.symmetrize();
        let trace = sym.trace();
        let mut eig = lanczos_eigen(&sym, EIGEN_REL_TOL, EIGEN_SEED)?;
        canonicalize_signs(&mut eig.vectors);
        Ok(Spectrum {
            values: eig.values,
            vectors: eig.vectors,
            trace,
        })
    }

    /// Largest eigenvalue, or 0 for a zero matrix.
    pub fn lambda_max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn truncate(&self, rule: Truncation) -> Result<KLBasis> {
        let lambda_max = self.lambda_max();
        if !(lambda_max > 0.0) {
            return Err(Error::DegenerateCovariance { lambda_max });
        }
        let positive = self.values.iter().take_while(|v| **v > 0.0).count();
        let m = match rule {
            Truncation::Threshold(ratio) => {
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(Error::invalid(format!("threshold ratio must lie in (0, 1), got {ratio}")));
                }
                let cut = ratio * lambda_max;
                self.values[..positive].iter().take_while(|v| **v >= cut).count()
            }
            Truncation::Fixed(m) => {
                if m == 0 || m > positive {
                    return Err(Error::invalid(format!(
                        "cannot keep {m} KL terms; {positive} positive eigenvalues are available"
                    )));
                }
                m
            }
        };
        let n = self.vectors.rows();
        let k = self.vectors.cols();
        let mut u = Matrix::zeros(n, m);
        for i in 0..n {
            u.row_mut(i).copy_from_slice(&self.vectors.row(i)[..m.min(k)]);
        }
        Ok(KLBasis {
            eigenvalues: self.values[..m].to_vec(),
            eigenvectors: u,
            trace: self.trace,
        })
    }
}

/// Flips each column so its largest-magnitude entry (the first one, within a
/// relative 1e-6) is positive, which makes the basis reproducible.
fn canonicalize_signs(u: &mut Matrix) {
    let (n, k) = (u.rows(), u.cols());
    for j in 0..k {
        let max = (0..n).map(|i| u[(i, j)].abs()).fold(0.0, f64::max);
        let pivot = (0..n).find(|&i| u[(i, j)].abs() >= (1.0 - 1e-6) * max);
        if let Some(p) = pivot {
            if u[(p, j)] < 0.0 {
                for i in 0..n {
                    u[(i, j)] = -u[(i, j)];
                }
            }
        }
    }
}

/// A truncated Karhunen-Loève basis: `G ≈ U Λ^{1/2} z`.
#[derive(Clone, Debug)]
pub struct KLBasis {
    /// Retained eigenvalues, descending and positive.
    pub eigenvalues: Vec<f64>,
    /// `n_test × m`, orthonormal columns.
    pub eigenvectors: Matrix,
    /// Trace of the full covariance.
    pub trace: f64,
}

impl KLBasis {
    pub fn m(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest retained eigenvalue, or 0 for the empty basis of identical
    /// posteriors.
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Covariance mass not represented by the retained terms.
    pub fn discarded_mass(&self) -> f64 {
        (self.trace - self.eigenvalues.iter().sum::<f64>()).max(0.0)
    }
}

/// Eigen-decomposition of a difference covariance, keeping eigenvalues at or
/// above `threshold_ratio·λ_max`.
pub fn kl_decompose(c: &Matrix, threshold_ratio: f64) -> Result<KLBasis> {
    Spectrum::of(c)?.truncate(Truncation::Threshold(threshold_ratio))
}

/// `r` with `P(χ²_m ≤ r²) = 1 − alpha`.
pub fn chi_square_radius(m: usize, alpha: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("chi-square radius needs m ≥ 1"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(chi_square_upper_quantile(m as f64, alpha).sqrt())
}

/// Standard-normal vectors conditioned on `‖z‖ ≤ radius`, one per row.
#[derive(Clone, Debug)]
pub struct ConfidenceSet {
    pub samples: Matrix,
    /// Candidates drawn to obtain the accepted rows.
    pub drawn: usize,
}

impl ConfidenceSet {
    pub fn acceptance_rate(&self) -> f64 {
        self.samples.rows() as f64 / self.drawn as f64
    }
}

/// Rejection sampling: draws `z ~ N(0, I_m)` and keeps it iff `Σ zᵢ² ≤ r²`,
/// until `count` vectors are accepted.
pub fn sample_confidence_set(m: usize, radius: f64, count: usize, seed: u64) -> Result<ConfidenceSet> {
    if m == 0 || count == 0 {
        return Err(Error::invalid("confidence set needs m ≥ 1 and count ≥ 1"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    let r2 = radius * radius;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(count * m);
    let mut z = vec![0.0; m];
    let mut drawn = 0usize;
    let mut accepted = 0usize;
    while accepted < count {
        drawn += 1;
        z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        if z.iter().map(|v| v * v).sum::<f64>() <= r2 {
            data.extend_from_slice(&z);
            accepted += 1;
        }
    }
    Ok(ConfidenceSet {
        samples: Matrix::from_vec(count, m, data)?,
        drawn,
    })
}

/// `upper_j = max_s |(U Λ^{1/2} z_s)_j|` over the sample rows, `lower = −upper`.
pub fn build_band(basis: &KLBasis, samples: &Matrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = basis.m();
    if samples.rows() == 0 {
        return Err(Error::invalid("band needs at least one sample"));
    }
    if samples.cols() != m {
        return Err(Error::invalid(format!(
            "samples have {} components but the basis has {m} terms",
            samples.cols()
        )));
    }
    let roots: Vec<f64> = basis.eigenvalues.iter().map(|l| l.sqrt()).collect();
    let mut scaled = basis.eigenvectors.clone();
    for i in 0..scaled.rows() {
        scaled.row_mut(i).iter_mut().zip(&roots).for_each(|(u, s)| *u *= s);
    }
    // Paths as rows: samples · (UΛ^{1/2})ᵀ.
    let paths = samples.matmul(&scaled.transpose())?;
    let mut upper = vec![0.0f64; scaled.rows()];
    for path in paths.row_iter() {
        for (u, p) in upper.iter_mut().zip(path) {
            *u = u.max(p.abs());
        }
    }
    let lower = upper.iter().map(|u| -u).collect();
    Ok((upper, lower))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Decision {
    Accept,
    Reject,
}

impl Decision {
    pub fn is_accept(self) -> bool {
        self == Decision::Accept
    }

    pub fn is_reject(self) -> bool {
        self == Decision::Reject
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CompareOptions {
    pub alpha: f64,
    pub band_samples: usize,
    pub seed: u64,
    pub truncation: Truncation,
    /// Used only when no hyperparameters are supplied.
    pub fit: FitConfig,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            alpha: 0.05,
            band_samples: 1000,
            seed: 0,
            truncation: Truncation::default(),
            fit: FitConfig::default(),
        }
    }
}

impl CompareOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.band_samples == 0 {
            return Err(Error::invalid("band_samples must be at least 1"));
        }
        match self.truncation {
            Truncation::Threshold(r) if !(r > 0.0 && r < 1.0) => {
                Err(Error::invalid(format!("threshold ratio must lie in (0, 1), got {r}")))
            }
            Truncation::Fixed(0) => Err(Error::invalid("a fixed truncation needs m ≥ 1")),
            _ => Ok(()),
        }
    }
}

/// Outcome of one comparison on a test grid.
#[derive(Clone, Debug)]
pub struct DifferenceBand {
    pub grid: TestGrid,
    /// `g = f̂₂ − f̂₁` on the grid.
    pub diff: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub alpha: f64,
    pub radius: f64,
    pub band_samples: usize,
    pub acceptance_rate: f64,
    pub basis: KLBasis,
    pub decision: Decision,
    /// `max(0, |g_j| − upper_j)`.
    pub delta: Vec<f64>,
    pub params: Hyperparameters,
}

impl DifferenceBand {
    pub fn rejected_count(&self) -> usize {
        self.delta.iter().filter(|d| **d > 0.0).count()
    }

    /// Percentage of grid points where the difference leaves the band.
    pub fn rejected_percent(&self) -> f64 {
        100.0 * self.rejected_count() as f64 / self.delta.len() as f64
    }
}

/// Runs the full test. When `params` is `None` the hyperparameters are first
/// fitted on the merged data with `opts.fit`.
pub fn compare(
    d1: &Dataset,
    d2: &Dataset,
    grid: &TestGrid,
    opts: &CompareOptions,
    params: Option<&Hyperparameters>,
) -> Result<DifferenceBand> {
    opts.validate()?;
    if d1.dim() != d2.dim() || d1.dim() != grid.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: datasets {} and {}, grid {}",
            d1.dim(),
            d2.dim(),
            grid.dim()
        )));
    }
    let params = match params {
        Some(p) => p.clone(),
        None => fit_hyperparameters(d1, d2, &opts.fit)?.params,
    };
    let m1 = PosteriorModel::fit(d1, &params)?;
    let m2 = PosteriorModel::fit(d2, &params)?;
    compare_models(&m1, &m2, grid, opts)
}

/// The test on already-fitted posteriors sharing one set of hyperparameters.
pub fn compare_models(
    m1: &PosteriorModel,
    m2: &PosteriorModel,
    grid: &TestGrid,
    opts: &CompareOptions,
) -> Result<DifferenceBand> {
    opts.validate()?;
    let diff = mean_difference(m1, m2, grid)?;
    let spectrum = Spectrum::of(&diff_covariance_matrix(m1, m2, grid)?)?;
    band_from_spectrum(grid, diff, &spectrum, m1.params(), opts)
}

/// `f̂₂ − f̂₁` on the grid.
pub fn mean_difference(m1: &PosteriorModel, m2: &PosteriorModel, grid: &TestGrid) -> Result<Vec<f64>> {
    let f1 = m1.predict_means(grid.points())?;
    let f2 = m2.predict_means(grid.points())?;
    Ok(f2.iter().zip(&f1).map(|(b, a)| b - a).collect())
}

/// Steps after the eigen-decomposition: truncation, radius, sampling, band
/// and decision. Lets callers reuse one spectrum across truncation rules.
pub fn band_from_spectrum(
    grid: &TestGrid,
    diff: Vec<f64>,
    spectrum: &Spectrum,
    params: &Hyperparameters,
    opts: &CompareOptions,
) -> Result<DifferenceBand> {
    opts.validate()?;
    if diff.len() != grid.len() {
        return Err(Error::invalid("difference vector does not match the grid"));
    }
    if !(spectrum.lambda_max() > 0.0) && diff.iter().all(|g| *g == 0.0) {
        // Identical posteriors: the difference is exactly zero with no
        // spread, which is consistent with one function.
        return Ok(zero_band(grid, diff, spectrum.trace, params, opts));
    }
    let basis = spectrum.truncate(opts.truncation)?;
    let radius = chi_square_radius(basis.m(), opts.alpha)?;
    let set = sample_confidence_set(basis.m(), radius, opts.band_samples, opts.seed)?;
    let (upper, lower) = build_band(&basis, &set.samples)?;
    let delta: Vec<f64> = diff.iter().zip(&upper).map(|(g, u)| (g.abs() - u).max(0.0)).collect();
    let decision = if delta.iter().any(|d| *d > 0.0) {
        Decision::Reject
    } else {
        Decision::Accept
    };
    Ok(DifferenceBand {
        grid: grid.clone(),
        diff,
        upper,
        lower,
        alpha: opts.alpha,
        radius,
        band_samples: opts.band_samples,
        acceptance_rate: set.acceptance_rate(),
        basis,
        decision,
        delta,
        params: params.clone(),
    })
}

fn zero_band(
    grid: &TestGrid,
    diff: Vec<f64>,
    trace: f64,
    params: &Hyperparameters,
    opts: &CompareOptions,
) -> DifferenceBand {
    let n = grid.len();
    DifferenceBand {
        grid: grid.clone(),
        diff,
        upper: vec![0.0; n],
        lower: vec![0.0; n],
        alpha: opts.alpha,
        radius: 0.0,
        band_samples: opts.band_samples,
        acceptance_rate: 1.0,
        basis: KLBasis {
            eigenvalues: Vec::new(),
            eigenvectors: Matrix::zeros(n, 0),
            trace,
        },
        decision: Decision::Accept,
        delta: vec![0.0; n],
        params: params.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lattice_examples() {
        let g = TestGrid::lattice(&[(0.0, 1.0)], 3).unwrap();
        assert_eq!(g.points().as_slice(), &[0.0, 0.5, 1.0]);
        let g = TestGrid::lattice(&[(0.0, 1.0), (0.0, 1.0)], 4).unwrap();
        assert_eq!(g.points().as_slice(), &[0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
        let g = TestGrid::lattice(&[(5.0, 15.0)], 1000).unwrap();
        assert_eq!(g.points()[(0, 0)], 5.0);
        assert_eq!(g.points()[(999, 0)], 15.0);
        assert_relative_eq!(g.points()[(1, 0)] - 5.0, 10.0 / 999.0, max_relative = 1e-12);
    }

    #[test]
    fn lattice_rejects_non_powers() {
        let err = TestGrid::lattice(&[(0.0, 1.0), (0.0, 1.0)], 10).unwrap_err();
        let msg = alloc::string::ToString::to_string(&err);
        assert!(msg.contains("9") && msg.contains("16"), "{msg}");
        assert!(TestGrid::lattice(&[(0.0, 1.0)], 1).is_err());
        assert!(TestGrid::lattice(&[(1.0, 1.0)], 5).is_err());
    }

    #[test]
    fn grid_rejects_duplicates_and_outside_points() {
        let p = Matrix::column(&[0.1, 0.5, 0.1]);
        assert!(TestGrid::new(p, vec![(0.0, 1.0)]).is_err());
        let p = Matrix::column(&[0.1, 1.5]);
        assert!(TestGrid::new(p, vec![(0.0, 1.0)]).is_err());
    }

    #[test]
    fn scalar_covariance_is_one_half() {
        let p = Hyperparameters::isotropic(1.0, 1.0, 1.0, 1).unwrap();
        let d = Dataset::new(Matrix::column(&[0.0]), vec![0.3]).unwrap();
        let m1 = PosteriorModel::fit(&d, &p).unwrap();
        let m2 = PosteriorModel::fit(&d, &p).unwrap();
        let grid = TestGrid::new(Matrix::column(&[0.0, 0.5]), vec![(0.0, 1.0)]).unwrap();
        let c = diff_covariance_matrix(&m1, &m2, &grid).unwrap();
        assert_relative_eq!(c[(0, 0)], 0.5, max_relative = 1e-14);
    }

    #[test]
    fn threshold_rule() {
        let mut c = Matrix::identity(2);
        let basis = kl_decompose(&c, 1e-6).unwrap();
        assert_eq!(basis.m(), 2);
        assert_relative_eq!(basis.eigenvalues[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(basis.eigenvalues[1], 1.0, max_relative = 1e-12);
        c[(1, 1)] = 1e-7;
        let basis = kl_decompose(&c, 1e-6).unwrap();
        assert_eq!(basis.m(), 1);
        assert_relative_eq!(basis.eigenvalues[0], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_covariance_is_degenerate() {
        let c = Matrix::zeros(3, 3);
        assert!(matches!(kl_decompose(&c, 1e-6), Err(Error::DegenerateCovariance { .. })));
    }

    #[test]
    fn zero_covariance_with_zero_difference_accepts() {
        let grid = TestGrid::lattice(&[(0.0, 1.0)], 4).unwrap();
        let spectrum = Spectrum::of(&Matrix::zeros(4, 4)).unwrap();
        let p = Hyperparameters::isotropic(1.0, 0.3, 0.1, 1).unwrap();
        let opts = CompareOptions::default();
        let band = band_from_spectrum(&grid, vec![0.0; 4], &spectrum, &p, &opts).unwrap();
        assert!(band.decision.is_accept());
        assert_eq!(band.basis.m(), 0);
        assert_eq!(band.upper, [0.0; 4]);
        let err = band_from_spectrum(&grid, vec![0.0, 1e-3, 0.0, 0.0], &spectrum, &p, &opts).unwrap_err();
        assert!(matches!(err, Error::DegenerateCovariance { .. }));
    }

    #[test]
    fn radius_examples() {
        assert_relative_eq!(chi_square_radius(1, 0.05).unwrap(), 1.959_963_984_540_054, max_relative = 1e-10);
        assert_relative_eq!(chi_square_radius(2, 0.05).unwrap(), 5.991_464_547_107_979f64.sqrt(), max_relative = 1e-10);
        assert!(chi_square_radius(3, 0.9999).unwrap() < 0.1);
        assert!(chi_square_radius(3, 0.0).is_err());
        assert!(chi_square_radius(3, 1.0).is_err());
        assert!(chi_square_radius(0, 0.5).is_err());
    }

    #[test]
    fn hand_band() {
        let basis = KLBasis {
            eigenvalues: vec![4.0],
            eigenvectors: Matrix::column(&[1.0]),
            trace: 4.0,
        };
        let (u, l) = build_band(&basis, &Matrix::column(&[1.0, -2.0])).unwrap();
        assert_eq!(u, vec![4.0]);
        assert_eq!(l, vec![-4.0]);
        let (u, _) = build_band(&basis, &Matrix::column(&[0.0])).unwrap();
        assert_eq!(u, vec![0.0]);
        assert!(build_band(&basis, &Matrix::zeros(0, 1)).is_err());
    }

    #[test]
    fn confidence_samples_inside_ball() {
        let r = chi_square_radius(4, 0.05).unwrap();
        let set = sample_confidence_set(4, r, 500, 9).unwrap();
        for z in set.samples.row_iter() {
            assert!(z.iter().map(|v| v * v).sum::<f64>() <= r * r);
        }
        let again = sample_confidence_set(4, r, 500, 9).unwrap();
        assert_eq!(set.samples, again.samples);
        assert!(set.drawn >= 500);
    }
}
