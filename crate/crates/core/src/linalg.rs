//! Dense numerical kernels: LU solve/inverse, Moore-Penrose pseudo-inverse,
//! and Schur-complement submatrix inversion.
//!
//! Everything here operates on row-major `f64` matrices at desk scale
//! (n up to a few thousand). Tolerances follow a fixed ladder:
//! construction checks at 1e-12, algebraic identities at 1e-8, and rank
//! cutoffs at 1e-13 times the matrix scale.

use thiserror::Error;

/// Relative pivot threshold for LU factorization.
pub const PIVOT_RTOL: f64 = 1e-13;
/// Relative singular-value cutoff for the pseudo-inverse (scaled by n).
pub const SV_RTOL: f64 = 1e-13;
/// Absolute threshold below which a rank-one correction is degenerate.
pub const RANK1_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is singular to working precision at pivot {pivot}")]
    Singular { pivot: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("rank-one correction is degenerate (|x|^2 or |y|^2 below {RANK1_TOL})")]
    DegenerateRank,
}

/// Row-major dense matrix of `f64` entries.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl std::fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(8)])?;
        }
        if self.rows > 8 || self.cols > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    /// Builds a matrix from row-major data, rejecting NaN/Inf entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        assert_eq!(
            data.len(),
            rows * cols,
            "data length {} does not match {}x{}",
            data.len(),
            rows,
            cols
        );
        for (k, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(LinalgError::NonFinite {
                    row: if cols == 0 { 0 } else { k / cols },
                    col: if cols == 0 { 0 } else { k % cols },
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a_row = self.row(i);
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a_ik) in a_row.iter().enumerate() {
                if a_ik == 0.0 {
                    continue;
                }
                let b_row = other.row(k);
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a_ik * b;
                }
            }
        }
        out
    }

    /// `self * other^T`, computed as row-by-row dot products.
    pub fn matmul_transpose(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "matmul_transpose dimension mismatch");
        let mut out = Self::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a_row = self.row(i);
            for j in 0..other.rows {
                out.data[i * other.rows + j] = dot(a_row, other.row(j));
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `v^T * self` for a column vector `v`, returned as a vector.
    pub fn vecmat(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len(), "vecmat dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += vi * a;
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Extracts the submatrix with the given row and column indices.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Self {
        let mut out = Self::zeros(row_idx.len(), col_idx.len());
        for (i, &r) in row_idx.iter().enumerate() {
            let src = self.row(r);
            let dst = out.row_mut(i);
            for (j, &c) in col_idx.iter().enumerate() {
                dst[j] = src[c];
            }
        }
        out
    }
}

/// Dot product with four independent accumulators; the reassociation keeps
/// the reduction out of a serial dependency chain.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    let a4 = a.chunks_exact(4);
    let b4 = b.chunks_exact(4);
    let tail: f64 = a4
        .remainder()
        .iter()
        .zip(b4.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in a4.zip(b4) {
        s0 += x[0] * y[0];
        s1 += x[1] * y[1];
        s2 += x[2] * y[2];
        s3 += x[3] * y[3];
    }
    (s0 + s1) + (s2 + s3) + tail
}

/// LU factorization with partial pivoting (`P A = L U`).
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

/// Factors a square matrix, failing when a pivot falls below
/// `PIVOT_RTOL * max|A|`.
pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::DimensionMismatch(format!(
            "LU requires a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let threshold = PIVOT_RTOL * a.max_abs();

    for k in 0..n {
        // Pick the largest pivot in column k.
        let mut best = k;
        let mut best_abs = lu.get(k, k).abs();
        for i in k + 1..n {
            let v = lu.get(i, k).abs();
            if v > best_abs {
                best = i;
                best_abs = v;
            }
        }
        if best_abs <= threshold {
            return Err(LinalgError::Singular { pivot: k });
        }
        if best != k {
            perm.swap(k, best);
            let (lo, hi) = (k.min(best), k.max(best));
            let (top, bottom) = lu.data.split_at_mut(hi * n);
            top[lo * n..lo * n + n].swap_with_slice(&mut bottom[..n]);
        }
        let pivot = lu.get(k, k);
        for i in k + 1..n {
            let factor = lu.get(i, k) / pivot;
            lu.set(i, k, factor);
            if factor == 0.0 {
                continue;
            }
            let (top, bottom) = lu.data.split_at_mut(i * n);
            let row_k = &top[k * n + k + 1..k * n + n];
            let row_i = &mut bottom[k + 1..n];
            for (ri, &rk) in row_i.iter_mut().zip(row_k) {
                *ri -= factor * rk;
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    pub fn n(&self) -> usize {
        self.lu.rows
    }

    /// Solves `A X = B` for a matrix right-hand side.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> DenseMatrix {
        assert_eq!(b.rows, self.n(), "rhs row count mismatch");
        let n = self.n();
        let m = b.cols;
        // Apply the row permutation.
        let mut x = DenseMatrix::zeros(n, m);
        for i in 0..n {
            x.row_mut(i).copy_from_slice(b.row(self.perm[i]));
        }
        // Forward substitution with the unit lower triangle.
        for i in 1..n {
            let (done, rest) = x.data.split_at_mut(i * m);
            let xi = &mut rest[..m];
            for k in 0..i {
                let l_ik = self.lu.get(i, k);
                if l_ik == 0.0 {
                    continue;
                }
                let xk = &done[k * m..k * m + m];
                for (a, &b) in xi.iter_mut().zip(xk) {
                    *a -= l_ik * b;
                }
            }
        }
        // Back substitution with the upper triangle.
        for i in (0..n).rev() {
            let (head, tail) = x.data.split_at_mut((i + 1) * m);
            let xi = &mut head[i * m..];
            for k in i + 1..n {
                let u_ik = self.lu.get(i, k);
                if u_ik == 0.0 {
                    continue;
                }
                let xk = &tail[(k - i - 1) * m..(k - i - 1) * m + m];
                for (a, &b) in xi.iter_mut().zip(xk) {
                    *a -= u_ik * b;
                }
            }
            let d = self.lu.get(i, i);
            for a in xi.iter_mut() {
                *a /= d;
            }
        }
        x
    }

    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let bm = DenseMatrix {
            rows: b.len(),
            cols: 1,
            data: b.to_vec(),
        };
        self.solve_matrix(&bm).data
    }

    pub fn inverse(&self) -> DenseMatrix {
        self.solve_matrix(&DenseMatrix::identity(self.n()))
    }
}

/// Solves `A X = B` by partial-pivot LU.
pub fn solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    Ok(lu_factor(a)?.solve_matrix(b))
}

/// Inverts a square nonsingular matrix.
pub fn inverse(a: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    Ok(lu_factor(a)?.inverse())
}

/// Thin SVD `A = U diag(sigma) V^T` with singular values in descending order.
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

/// One-sided Jacobi SVD. Robust at desk scale; cost is a handful of
/// O(n^3) sweeps.
pub fn svd(a: &DenseMatrix) -> Svd {
    if a.rows < a.cols {
        let t = svd(&a.transpose());
        return Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        };
    }
    let m = a.rows;
    let n = a.cols;
    // Column-major working copy of A; rotations act on contiguous columns.
    let mut w = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            w[j * m + i] = a.get(i, j);
        }
    }
    // V accumulated column-major as well.
    let mut v = vec![0.0; n * n];
    for j in 0..n {
        v[j * n + j] = 1.0;
    }

    let mut norms: Vec<f64> = (0..n).map(|j| dot(&w[j * m..j * m + m], &w[j * m..j * m + m])).collect();
    let tol = 1e-14;
    let max_sweeps = 32;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            // de Rijk pivoting: bring the largest remaining column forward.
            if let Some(q_max) = (p + 1..n)
                .filter(|&j| norms[j] > norms[p])
                .max_by(|&a, &b| norms[a].total_cmp(&norms[b]))
            {
                swap_cols(&mut w, m, p, q_max);
                swap_cols(&mut v, n, p, q_max);
                norms.swap(p, q_max);
            }
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = {
                    let (head, tail) = w.split_at(q * m);
                    dot(&head[p * m..p * m + m], &tail[..m])
                };
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Jacobi rotation that orthogonalizes columns p and q.
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_cols(&mut w, m, p, q, c, s);
                rotate_cols(&mut v, n, p, q, c, s);
                norms[p] = alpha - gamma * t;
                norms[q] = beta + gamma * t;
            }
        }
        if !rotated {
            break;
        }
        // Refresh cached norms to stop incremental drift.
        for j in 0..n {
            norms[j] = dot(&w[j * m..j * m + m], &w[j * m..j * m + m]);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let sig: Vec<f64> = norms.iter().map(|x| x.max(0.0).sqrt()).collect();
    order.sort_by(|&i, &j| sig[j].total_cmp(&sig[i]));

    let mut u = DenseMatrix::zeros(m, n);
    let mut vm = DenseMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = sig[src];
        sigma.push(s);
        if s > 0.0 {
            let col = &w[src * m..src * m + m];
            for i in 0..m {
                u.set(i, dst, col[i] / s);
            }
        }
        let vcol = &v[src * n..src * n + n];
        for i in 0..n {
            vm.set(i, dst, vcol[i]);
        }
    }
    Svd {
        u,
        sigma,
        v: vm,
    }
}

#[inline]
fn swap_cols(data: &mut [f64], len: usize, p: usize, q: usize) {
    let (lo, hi) = (p.min(q), p.max(q));
    let (head, tail) = data.split_at_mut(hi * len);
    head[lo * len..lo * len + len].swap_with_slice(&mut tail[..len]);
}

#[inline]
fn rotate_cols(data: &mut [f64], len: usize, p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = (p.min(q), p.max(q));
    let (head, tail) = data.split_at_mut(hi * len);
    let col_lo = &mut head[lo * len..lo * len + len];
    let col_hi = &mut tail[..len];
    // Columns were split so (lo, hi) = (p, q) in index order.
    if p < q {
        for (a, b) in col_lo.iter_mut().zip(col_hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = c * x - s * y;
            *b = s * x + c * y;
        }
    } else {
        for (b, a) in col_lo.iter_mut().zip(col_hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = c * x - s * y;
            *b = s * x + c * y;
        }
    }
}

/// Moore-Penrose pseudo-inverse via SVD, with singular values below
/// `sigma_max * n * SV_RTOL` treated as zero.
pub fn pinv(a: &DenseMatrix) -> DenseMatrix {
    let decomp = svd(a);
    let cutoff = decomp.sigma.first().copied().unwrap_or(0.0)
        * a.rows.max(a.cols) as f64
        * SV_RTOL;
    // A+ = V diag(1/sigma) U^T over singular values above the cutoff.
    let n = a.cols;
    let m = a.rows;
    let mut scaled_v = DenseMatrix::zeros(n, decomp.sigma.len());
    for (j, &s) in decomp.sigma.iter().enumerate() {
        if s > cutoff {
            let inv = 1.0 / s;
            for i in 0..n {
                scaled_v.set(i, j, decomp.v.get(i, j) * inv);
            }
        }
    }
    let mut out = DenseMatrix::zeros(n, m);
    for i in 0..n {
        let vrow = scaled_v.row(i);
        for k in 0..m {
            let mut acc = 0.0;
            for (j, &vv) in vrow.iter().enumerate() {
                acc += vv * decomp.u.get(k, j);
            }
            out.set(i, k, acc);
        }
    }
    out
}

/// Pseudo-inverse of the singular matrix `A = C - u v^T` from the regular
/// inverse of `C`:
///
/// ```text
/// A+ = (I - x x^T / x^T x) C^{-1} (I - y y^T / y^T y),
/// x = C^{-1} u,  y^T = v^T C^{-1}
/// ```
///
/// Only rank-one corrections of `c_inv` are materialized, so the cost is
/// O(n^2) given `C^{-1}`.
pub fn pinv_from_regular_inverse(
    c_inv: &DenseMatrix,
    u: &[f64],
    v: &[f64],
) -> Result<DenseMatrix, LinalgError> {
    if !c_inv.is_square() || c_inv.rows != u.len() || c_inv.rows != v.len() {
        return Err(LinalgError::DimensionMismatch(
            "pinv_from_regular_inverse requires square C^{-1} and matching vectors".into(),
        ));
    }
    let n = c_inv.rows;
    let x = c_inv.matvec(u);
    let y = c_inv.vecmat(v);
    let xx = dot(&x, &x);
    let yy = dot(&y, &y);
    if xx < RANK1_TOL || yy < RANK1_TOL {
        return Err(LinalgError::DegenerateRank);
    }
    // B = (I - xx^T/x^Tx) C^{-1} = C^{-1} - x (x^T C^{-1}) / x^T x
    let xt_cinv = c_inv.vecmat(&x);
    let mut b = c_inv.clone();
    for i in 0..n {
        let coeff = x[i] / xx;
        if coeff == 0.0 {
            continue;
        }
        for (bv, &t) in b.row_mut(i).iter_mut().zip(&xt_cinv) {
            *bv -= coeff * t;
        }
    }
    // A+ = B - (B y) y^T / y^T y
    let by = b.matvec(&y);
    for i in 0..n {
        let coeff = by[i] / yy;
        if coeff == 0.0 {
            continue;
        }
        for (bv, &t) in b.row_mut(i).iter_mut().zip(&y) {
            *bv -= coeff * t;
        }
    }
    Ok(b)
}

/// Given `m_inv = M^{-1}`, returns the inverse of M with the `drop` rows and
/// columns removed, using the Schur-complement identity `A^{-1} = X - Y W^{-1} Z`
/// on the blocks of `m_inv`.
pub fn submatrix_inverse(
    m_inv: &DenseMatrix,
    drop: &[usize],
) -> Result<DenseMatrix, LinalgError> {
    if !m_inv.is_square() {
        return Err(LinalgError::DimensionMismatch(
            "submatrix_inverse requires a square matrix".into(),
        ));
    }
    let n = m_inv.rows;
    let mut drop_sorted = drop.to_vec();
    drop_sorted.sort_unstable();
    drop_sorted.dedup();
    if drop_sorted.iter().any(|&i| i >= n) {
        return Err(LinalgError::DimensionMismatch(format!(
            "drop index out of range for {n}x{n} matrix"
        )));
    }
    if drop_sorted.is_empty() {
        return Ok(m_inv.clone());
    }
    let keep: Vec<usize> = (0..n).filter(|i| !drop_sorted.contains(i)).collect();
    let x = m_inv.submatrix(&keep, &keep);
    let y = m_inv.submatrix(&keep, &drop_sorted);
    let w = m_inv.submatrix(&drop_sorted, &drop_sorted);
    let z = m_inv.submatrix(&drop_sorted, &keep);
    let w_lu = lu_factor(&w)?;
    let w_inv_z = w_lu.solve_matrix(&z);
    let correction = y.matmul(&w_inv_z);
    Ok(x.sub(&correction))
}
