//! Dense row-major matrices and the factorizations the comparison needs:
//! a jittered Cholesky for the regularized kernel systems, and a Lanczos
//! eigensolver (with full reorthogonalization) for the leading spectrum of
//! the difference covariance.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(alloc::format!(
                "buffer of length {} cannot form a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::invalid(alloc::format!(
                    "row {i} has {} columns, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// A single-column matrix, the common shape for one-dimensional inputs.
    pub fn column(values: &[f64]) -> Self {
        Matrix {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        // chunks_exact(0) panics, and a zero-column matrix still has rows.
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn column_vec(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::invalid(alloc::format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (p, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(p), out_row);
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ * other` without materializing the transpose.
    pub fn tr_matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::invalid(alloc::format!(
                "cannot multiply ({}x{})ᵀ by {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            )));
        }
        let at = self.transpose();
        let bt = other.transpose();
        let mut out = Matrix::zeros(self.cols, other.cols);
        for i in 0..self.cols {
            let a = at.row(i);
            for (o, b) in out.row_mut(i).iter_mut().zip(bt.row_iter()) {
                *o = dot(a, b);
            }
        }
        Ok(out)
    }

    /// `selfᵀ * self`, exactly symmetric.
    pub fn gram(&self) -> Matrix {
        let at = self.transpose();
        let k = self.cols;
        let mut out = Matrix::zeros(k, k);
        for i in 0..k {
            for j in 0..=i {
                let v = dot(at.row(i), at.row(j));
                out.data[i * k + j] = v;
                out.data[j * k + i] = v;
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        self.row_iter().map(|r| dot(r, v)).collect()
    }

    /// Largest absolute difference between `self` and its transpose.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Replaces `self` by `(self + selfᵀ) / 2`.
    pub fn symmetrize(&mut self) {
        assert_eq!(self.rows, self.cols, "symmetrize needs a square matrix");
        let n = self.rows;
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Dot product with independent accumulators so the loop vectorizes.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 8];
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Four dot products sharing the right-hand operand.
#[inline]
fn dot4(r: [&[f64]; 4], b: &[f64]) -> [f64; 4] {
    let n = b.len();
    let (r0, r1, r2, r3) = (&r[0][..n], &r[1][..n], &r[2][..n], &r[3][..n]);
    let mut acc = [[0.0f64; 4]; 4];
    let mut k = 0;
    while k + 4 <= n {
        for l in 0..4 {
            let bv = b[k + l];
            acc[0][l] += r0[k + l] * bv;
            acc[1][l] += r1[k + l] * bv;
            acc[2][l] += r2[k + l] * bv;
            acc[3][l] += r3[k + l] * bv;
        }
        k += 4;
    }
    let mut out = [0.0; 4];
    for (o, a) in out.iter_mut().zip(&acc) {
        *o = (a[0] + a[2]) + (a[1] + a[3]);
    }
    while k < n {
        out[0] += r0[k] * b[k];
        out[1] += r1[k] * b[k];
        out[2] += r2[k] * b[k];
        out[3] += r3[k] * b[k];
        k += 1;
    }
    out
}

/// `y += a * x`
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Lower-triangular Cholesky factor `L` with `A + jitter·I = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    factor: Matrix,
    jitter: f64,
}

/// Relative jitter levels tried in order after a plain factorization fails.
const JITTER_LADDER: [f64; 5] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

impl Cholesky {
    /// Factors `a` exactly; fails on the first non-positive pivot.
    pub fn new(a: &Matrix) -> Result<Self> {
        Self::factor_with(a.clone(), 0.0)
    }

    /// Factors `a`, retrying with diagonal jitter `1e-10·scale`, escalating by
    /// ×10 up to `1e-6·scale` when a pivot breaks down.
    pub fn with_jitter(a: &Matrix, scale: f64) -> Result<Self> {
        match Self::new(a) {
            Ok(c) => return Ok(c),
            Err(e) if scale <= 0.0 => return Err(e),
            Err(_) => {}
        }
        let mut last = None;
        for rel in JITTER_LADDER {
            match Self::factor_with(a.clone(), rel * scale) {
                Ok(c) => return Ok(c),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("jitter ladder is non-empty"))
    }

    fn factor_with(mut a: Matrix, jitter: f64) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::invalid("Cholesky needs a square matrix"));
        }
        let n = a.rows;
        if jitter != 0.0 {
            for i in 0..n {
                a.data[i * n + i] += jitter;
            }
        }
        factor_in_place(&mut a.data, n)
            .map_err(|(row, pivot)| Error::NotPositiveDefinite { pivot, row })?;
        Ok(Cholesky { factor: a, jitter })
    }

    pub fn dim(&self) -> usize {
        self.factor.rows
    }

    pub fn factor(&self) -> &Matrix {
        &self.factor
    }

    /// Diagonal jitter that was needed for the factorization to succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn log_det(&self) -> f64 {
        let n = self.dim();
        2.0 * (0..n).map(|i| self.factor.data[i * n + i].ln()).sum::<f64>()
    }

    /// Solves `L x = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        let l = &self.factor.data;
        for i in 0..n {
            let row = &l[i * n..i * n + i];
            b[i] = (b[i] - dot(row, &b[..i])) / l[i * n + i];
        }
    }

    /// Solves `Lᵀ x = b` in place.
    pub fn solve_upper_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        let l = &self.factor.data;
        for i in (0..n).rev() {
            b[i] /= l[i * n + i];
            let xi = b[i];
            // Column i of Lᵀ above the diagonal is row i of L.
            axpy(-xi, &l[i * n..i * n + i], &mut b[..i]);
        }
    }

    /// Solves `(L Lᵀ) x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_lower_in_place(&mut x);
        self.solve_upper_in_place(&mut x);
        x
    }

    /// Solves `L X = B` for every column of `B` in place.
    pub fn solve_lower_matrix(&self, b: &mut Matrix) {
        let n = self.dim();
        assert_eq!(b.rows, n);
        let r = b.cols;
        let l = &self.factor.data;
        for i in 0..n {
            let (done, rest) = b.data.split_at_mut(i * r);
            let row = &mut rest[..r];
            for k in 0..i {
                let lik = l[i * n + k];
                if lik != 0.0 {
                    axpy(-lik, &done[k * r..(k + 1) * r], row);
                }
            }
            let inv = 1.0 / l[i * n + i];
            row.iter_mut().for_each(|v| *v *= inv);
        }
    }

    /// Solves `Lᵀ X = B` for every column of `B` in place.
    pub fn solve_upper_matrix(&self, b: &mut Matrix) {
        let n = self.dim();
        assert_eq!(b.rows, n);
        let r = b.cols;
        let l = &self.factor.data;
        for i in (0..n).rev() {
            let (above, tail) = b.data.split_at_mut(i * r);
            let row_i = &mut tail[..r];
            let inv = 1.0 / l[i * n + i];
            row_i.iter_mut().for_each(|v| *v *= inv);
            // Row i of the solution is final; eliminate it from rows above.
            let row_i = &*row_i;
            for k in 0..i {
                let lik = l[i * n + k];
                if lik != 0.0 {
                    axpy(-lik, row_i, &mut above[k * r..(k + 1) * r]);
                }
            }
        }
    }
}

/// Row-oriented (Cholesky–Banachiewicz) factorization, four rows at a time so
/// that every finished row is streamed once per block instead of once per row.
fn factor_in_place(a: &mut [f64], n: usize) -> core::result::Result<(), (usize, f64)> {
    let mut i0 = 0;
    while i0 < n {
        let width = (n - i0).min(4);
        let (done, rest) = a.split_at_mut(i0 * n);
        let block = &mut rest[..width * n];
        if width == 4 {
            for j in 0..i0 {
                let lj = &done[j * n..j * n + j + 1];
                let sums = {
                    let (b0, t) = block.split_at(n);
                    let (b1, t) = t.split_at(n);
                    let (b2, b3) = t.split_at(n);
                    dot4([&b0[..j], &b1[..j], &b2[..j], &b3[..j]], &lj[..j])
                };
                let inv = 1.0 / lj[j];
                for (r, s) in sums.iter().enumerate() {
                    let v = &mut block[r * n + j];
                    *v = (*v - s) * inv;
                }
            }
        } else {
            for j in 0..i0 {
                let lj = &done[j * n..j * n + j + 1];
                let inv = 1.0 / lj[j];
                for r in 0..width {
                    let row = &mut block[r * n..(r + 1) * n];
                    row[j] = (row[j] - dot(&row[..j], &lj[..j])) * inv;
                }
            }
        }
        // Triangle inside the block.
        for r in 0..width {
            let i = i0 + r;
            let (prev, cur) = block.split_at_mut(r * n);
            let row = &mut cur[..n];
            for q in 0..r {
                let j = i0 + q;
                let lj = &prev[q * n..q * n + j + 1];
                row[j] = (row[j] - dot(&row[..j], &lj[..j])) / lj[j];
            }
            let d = row[i] - dot(&row[..i], &row[..i]);
            if !(d > 0.0 && d.is_finite()) {
                return Err((i, d));
            }
            row[i] = d.sqrt();
            row[i + 1..].iter_mut().for_each(|v| *v = 0.0);
        }
        i0 += width;
    }
    Ok(())
}

/// Eigenvalues (descending) and matching orthonormal eigenvectors, stored as
/// the columns of an `n × k` matrix.
#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Eigen-decomposition of a symmetric tridiagonal matrix by the implicit QL
/// method. `diag` has length `k`, `offdiag[i]` couples entries `i` and `i+1`.
///
/// Returns eigenvalues in descending order with eigenvectors in the rows of a
/// `k × k` matrix (row `i` belongs to value `i`).
pub fn tridiagonal_eigen(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Matrix)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Matrix::zeros(0, 0)));
    }
    if offdiag.len() + 1 != n {
        return Err(Error::invalid("off-diagonal must have one entry fewer than the diagonal"));
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(offdiag);
    let mut vt = Matrix::identity(n);

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Numeric(alloc::format!(
                        "tridiagonal QL did not converge for eigenvalue {l}"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    // Rotate eigenvector rows i and i+1.
                    let (lo, hi) = vt.data.split_at_mut((i + 1) * n);
                    let vi = &mut lo[i * n..];
                    let vi1 = &mut hi[..n];
                    for (a, b) in vi.iter_mut().zip(vi1.iter_mut()) {
                        let hb = *b;
                        *b = s * *a + c * hb;
                        *a = c * *a - s * hb;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut sorted = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sorted.row_mut(dst).copy_from_slice(vt.row(src));
    }
    Ok((values, sorted))
}

/// Leading eigenpairs of a symmetric matrix by Lanczos iteration with full
/// reorthogonalization.
///
/// Iteration stops once the Krylov space is numerically invariant
/// (`β ≤ rel_tol·‖A‖_F`) and two random probes of the orthogonal complement
/// are also annihilated to that level; a probe that is not annihilated seeds a
/// new Lanczos block, which recovers repeated eigenvalues. Every returned Ritz
/// pair therefore has residual at most `rel_tol·‖A‖_F`; eigenvalues smaller
/// than that may be missing. Values are sorted descending.
pub fn lanczos_eigen(a: &Matrix, rel_tol: f64, seed: u64) -> Result<Eigenpairs> {
    let n = a.rows;
    if a.cols != n {
        return Err(Error::invalid("eigen-decomposition needs a square matrix"));
    }
    let norm = a.frobenius_norm();
    if n == 0 || norm == 0.0 || !norm.is_finite() {
        return Ok(Eigenpairs {
            values: Vec::new(),
            vectors: Matrix::zeros(n, 0),
        });
    }
    let tol = rel_tol * norm;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Basis vectors stored contiguously, one per row.
    let mut basis: Vec<f64> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut k = 0usize;

    let mut q = random_complement_vector(&mut rng, &basis, n, 0)
        .expect("an empty basis always has a complement");
    let mut q_prev: Option<Vec<f64>> = None;
    let mut beta_prev = 0.0;
    let mut quiet_probes = 0;

    while k < n {
        let mut w = a.matvec(&q);
        let alpha = dot(&q, &w);
        axpy(-alpha, &q, &mut w);
        if let Some(qp) = &q_prev {
            axpy(-beta_prev, qp, &mut w);
        }
        basis.extend_from_slice(&q);
        alphas.push(alpha);
        k += 1;
        reorthogonalize(&mut w, &basis, n, k);
        let beta = dot(&w, &w).sqrt();
        if k == n {
            break;
        }
        if beta > tol {
            betas.push(beta);
            w.iter_mut().for_each(|v| *v /= beta);
            q_prev = Some(core::mem::replace(&mut q, w));
            beta_prev = beta;
            continue;
        }
        // The current block is invariant; probe what is left.
        let mut restarted = false;
        while quiet_probes < 2 {
            let Some(r) = random_complement_vector(&mut rng, &basis, n, k) else {
                break;
            };
            let ar = a.matvec(&r);
            if dot(&ar, &ar).sqrt() > tol {
                betas.push(0.0);
                q = r;
                q_prev = None;
                beta_prev = 0.0;
                restarted = true;
                break;
            }
            quiet_probes += 1;
        }
        if !restarted {
            break;
        }
    }

    let (values, vecs) = tridiagonal_eigen(&alphas, &betas)?;
    let mut vectors = Matrix::zeros(n, k);
    // U = Qᵀ S where basis rows are Q's rows and vecs rows are Ritz vectors.
    for (col, s) in vecs.row_iter().enumerate() {
        for (j, &sj) in s.iter().enumerate() {
            if sj == 0.0 {
                continue;
            }
            let qj = &basis[j * n..(j + 1) * n];
            for (i, &v) in qj.iter().enumerate() {
                vectors.data[i * k + col] += sj * v;
            }
        }
    }
    Ok(Eigenpairs { values, vectors })
}

/// Two passes of classical Gram-Schmidt against the first `k` basis rows.
fn reorthogonalize(w: &mut [f64], basis: &[f64], n: usize, k: usize) {
    for _ in 0..2 {
        for j in 0..k {
            let qj = &basis[j * n..(j + 1) * n];
            let c = dot(qj, w);
            axpy(-c, qj, w);
        }
    }
}

fn random_complement_vector(
    rng: &mut ChaCha8Rng,
    basis: &[f64],
    n: usize,
    k: usize,
) -> Option<Vec<f64>> {
    if k >= n {
        return None;
    }
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let before = dot(&v, &v).sqrt();
        reorthogonalize(&mut v, basis, n, k);
        let after = dot(&v, &v).sqrt();
        if after > 1e-8 * before {
            v.iter_mut().for_each(|x| *x /= after);
            return Some(v);
        }
    }
    None
}
