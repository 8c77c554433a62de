//! Fundamental matrices for arbitrary target sets, the full fundamental
//! tensor, its normalized form, absorption probabilities, and incremental
//! updates.
//!
//! The tensor entry `F[s][m][t]` is the expected number of visits to the
//! medial node `m` by a random walk started at `s` before it first hits the
//! target `t`; entries with `s = t` or `m = t` are zero. The whole tensor is
//! assembled from a single pseudo-inverse of the random-walk Laplacian
//! `Lp = I - P` (one O(n^3) factorization plus O(n^3) assembly) instead of
//! one matrix inversion per target.

use thiserror::Error;

use crate::graph::TransitionMatrix;
use crate::linalg::{
    inverse, pinv, pinv_from_regular_inverse, submatrix_inverse, DenseMatrix, LinalgError,
};

/// Normalized-tensor entries within this distance of 1 are snapped to
/// exactly 1. Theory puts every entry in [0, 1]; only round-off can push a
/// true articulation value off 1, and the articulation test re-verifies
/// candidates against an exact graph search anyway.
pub const ONE_SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FundamentalError {
    #[error("target set must not be empty")]
    EmptyTargets,
    #[error("target index {0} out of range")]
    TargetOutOfRange(usize),
    #[error(
        "target set misses recurrent class {class:?}; the fundamental matrix does not exist \
         unless every recurrent class contains a target"
    )]
    UncoveredRecurrentClass { class: Vec<usize> },
    #[error("chain is not strongly connected; compute per-target-set fundamental matrices instead")]
    NotStronglyConnected,
    #[error("added target set overlaps the existing targets or leaves the transient set")]
    InvalidIncrement,
    #[error("numerical failure: {0}")]
    Numerical(#[from] LinalgError),
}

/// Fundamental matrix `F^A = (I - P_TT)^{-1}` for a target set `A`.
#[derive(Clone, Debug)]
pub struct FundamentalMatrix {
    targets: Vec<usize>,
    transient: Vec<usize>,
    /// Position of each global node inside `transient`, if transient.
    position: Vec<Option<usize>>,
    f: DenseMatrix,
}

impl FundamentalMatrix {
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn transient(&self) -> &[usize] {
        &self.transient
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.f
    }

    /// Expected visits to `m` from `s` (global indices); `None` when either
    /// node is a target.
    pub fn expected_visits(&self, s: usize, m: usize) -> Option<f64> {
        let si = self.position.get(s).copied().flatten()?;
        let mi = self.position.get(m).copied().flatten()?;
        Some(self.f.get(si, mi))
    }
}

/// Builds `F^A` for a nonempty target set that touches every recurrent
/// class of the chain.
pub fn fundamental_matrix(
    p: &TransitionMatrix,
    targets: &[usize],
) -> Result<FundamentalMatrix, FundamentalError> {
    let n = p.n();
    if targets.is_empty() {
        return Err(FundamentalError::EmptyTargets);
    }
    let mut targets = targets.to_vec();
    targets.sort_unstable();
    targets.dedup();
    if let Some(&bad) = targets.iter().find(|&&t| t >= n) {
        return Err(FundamentalError::TargetOutOfRange(bad));
    }
    for class in p.recurrent_classes() {
        if !class.iter().any(|m| targets.binary_search(m).is_ok()) {
            return Err(FundamentalError::UncoveredRecurrentClass { class });
        }
    }
    let transient: Vec<usize> = (0..n).filter(|i| targets.binary_search(i).is_err()).collect();
    let mut position = vec![None; n];
    for (local, &global) in transient.iter().enumerate() {
        position[global] = Some(local);
    }
    let k = transient.len();
    let mut m = DenseMatrix::zeros(k, k);
    for (i, &gi) in transient.iter().enumerate() {
        let src = p.matrix().row(gi);
        let dst = m.row_mut(i);
        for (j, &gj) in transient.iter().enumerate() {
            dst[j] = if gi == gj { 1.0 } else { 0.0 } - src[gj];
        }
    }
    let f = if k == 0 {
        DenseMatrix::zeros(0, 0)
    } else {
        inverse(&m)?
    };
    Ok(FundamentalMatrix {
        targets,
        transient,
        position,
        f,
    })
}

/// Random-walk Laplacian `Lp = I - P`.
pub fn random_walk_laplacian(p: &TransitionMatrix) -> DenseMatrix {
    let n = p.n();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let src = p.matrix().row(i);
        let dst = l.row_mut(i);
        for j in 0..n {
            dst[j] = if i == j { 1.0 } else { 0.0 } - src[j];
        }
    }
    l
}

/// Digraph Laplacian `L = Pi (I - P)` with `Pi = diag(pi)`.
pub fn digraph_laplacian(p: &TransitionMatrix, pi: &[f64]) -> DenseMatrix {
    let mut l = random_walk_laplacian(p);
    for i in 0..p.n() {
        let w = pi[i];
        for v in l.row_mut(i) {
            *v *= w;
        }
    }
    l
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Route {
    /// `Lp+` of the random-walk Laplacian `I - P`.
    RandomWalk,
    /// `L+` of the digraph Laplacian `Pi (I - P)`.
    Digraph,
}

/// Shared factorization from which tensor slices are assembled in O(n^2)
/// each. Callers that need only a few targets use `slice`; `materialize`
/// fills the full n^3 tensor.
pub struct TensorEngine {
    lplus: DenseMatrix,
    pi: Vec<f64>,
    route: Route,
}

impl TensorEngine {
    /// Default route: SVD pseudo-inverse of the random-walk Laplacian.
    pub fn new(p: &TransitionMatrix, pi: &[f64]) -> Result<Self, FundamentalError> {
        Self::check(p, pi)?;
        Ok(Self {
            lplus: pinv(&random_walk_laplacian(p)),
            pi: pi.to_vec(),
            route: Route::RandomWalk,
        })
    }

    /// Cross-check route through the digraph Laplacian `Pi (I - P)`.
    pub fn via_digraph_laplacian(
        p: &TransitionMatrix,
        pi: &[f64],
    ) -> Result<Self, FundamentalError> {
        Self::check(p, pi)?;
        Ok(Self {
            lplus: pinv(&digraph_laplacian(p, pi)),
            pi: pi.to_vec(),
            route: Route::Digraph,
        })
    }

    /// Optimization route: one regular inversion of the ergodic fundamental
    /// matrix `Z = (I - P + 1 pi')^{-1}`, then the rank-one pseudo-inverse
    /// identity to recover `Lp+`.
    pub fn via_z(p: &TransitionMatrix, pi: &[f64]) -> Result<Self, FundamentalError> {
        Self::check(p, pi)?;
        let z = ergodic_fundamental_matrix(p, pi)?;
        let ones = vec![1.0; p.n()];
        let lplus = pinv_from_regular_inverse(&z, &ones, pi)?;
        Ok(Self {
            lplus,
            pi: pi.to_vec(),
            route: Route::RandomWalk,
        })
    }

    fn check(p: &TransitionMatrix, pi: &[f64]) -> Result<(), FundamentalError> {
        assert_eq!(p.n(), pi.len(), "stationary vector length mismatch");
        if !p.is_strongly_connected() {
            return Err(FundamentalError::NotStronglyConnected);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    /// Pseudo-inverse backing this engine (of `I - P` or of `Pi (I - P)`
    /// depending on the construction route).
    pub fn lplus(&self) -> &DenseMatrix {
        &self.lplus
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    /// Tensor entry `F[s][m][t]`. Visit counts are nonnegative; round-off
    /// below zero is clamped.
    pub fn entry(&self, s: usize, m: usize, t: usize) -> f64 {
        if s == t || m == t {
            return 0.0;
        }
        let l = &self.lplus;
        let v = match self.route {
            Route::RandomWalk => {
                l.get(s, m) - l.get(t, m) + self.pi[m] / self.pi[t] * (l.get(t, t) - l.get(s, t))
            }
            Route::Digraph => {
                (l.get(s, m) - l.get(t, m) + l.get(t, t) - l.get(s, t)) * self.pi[m]
            }
        };
        v.max(0.0)
    }

    /// Full n x n slice for target `t` (row/column `t` zero).
    pub fn slice(&self, t: usize) -> DenseMatrix {
        let n = self.n();
        let mut out = DenseMatrix::zeros(n, n);
        for s in 0..n {
            if s == t {
                continue;
            }
            let row = self.slice_row(s, t);
            out.row_mut(s).copy_from_slice(&row);
        }
        out
    }

    fn slice_row(&self, s: usize, t: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.n()];
        self.fill_slice_row(s, t, &mut row);
        row
    }

    #[inline]
    fn fill_slice_row(&self, s: usize, t: usize, row: &mut [f64]) {
        let ls = self.lplus.row(s);
        let lt = self.lplus.row(t);
        match self.route {
            Route::RandomWalk => {
                let c = (lt[t] - ls[t]) / self.pi[t];
                for (m, v) in row.iter_mut().enumerate() {
                    *v = (ls[m] - lt[m] + self.pi[m] * c).max(0.0);
                }
            }
            Route::Digraph => {
                let c = lt[t] - ls[t];
                for (m, v) in row.iter_mut().enumerate() {
                    *v = ((ls[m] - lt[m] + c) * self.pi[m]).max(0.0);
                }
            }
        }
        row[t] = 0.0;
    }

    /// Materializes all n^3 entries. Layout: target-major, then source,
    /// then medial node. Slices are independent and built in parallel.
    pub fn materialize(&self) -> FundamentalTensor {
        use rayon::prelude::*;
        let n = self.n();
        let mut entries = vec![0.0; n * n * n];
        entries
            .par_chunks_mut(n * n)
            .enumerate()
            .for_each(|(t, slice)| {
                for s in 0..n {
                    if s == t {
                        continue;
                    }
                    self.fill_slice_row(s, t, &mut slice[s * n..s * n + n]);
                }
            });
        FundamentalTensor {
            n,
            entries,
            stationary: self.pi.clone(),
        }
    }
}

/// Ergodic fundamental matrix `Z = (I - P + 1 pi')^{-1}`.
pub fn ergodic_fundamental_matrix(
    p: &TransitionMatrix,
    pi: &[f64],
) -> Result<DenseMatrix, FundamentalError> {
    let n = p.n();
    let mut c = random_walk_laplacian(p);
    for i in 0..n {
        let row = c.row_mut(i);
        for (v, &pj) in row.iter_mut().zip(pi) {
            *v += pj;
        }
    }
    Ok(inverse(&c)?)
}

/// Dense fundamental tensor `F[s][m][t]` for every single-node target.
#[derive(Clone)]
pub struct FundamentalTensor {
    n: usize,
    entries: Vec<f64>,
    stationary: Vec<f64>,
}

impl FundamentalTensor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    #[inline]
    pub fn get(&self, s: usize, m: usize, t: usize) -> f64 {
        self.entries[t * self.n * self.n + s * self.n + m]
    }

    /// Row `(s, :, t)` of the tensor.
    #[inline]
    pub fn row(&self, s: usize, t: usize) -> &[f64] {
        let base = t * self.n * self.n + s * self.n;
        &self.entries[base..base + self.n]
    }

    /// Slice for target `t` as a full n x n matrix (row/column `t` zero).
    pub fn slice(&self, t: usize) -> DenseMatrix {
        let n = self.n;
        let mut out = DenseMatrix::zeros(n, n);
        for s in 0..n {
            out.row_mut(s)
                .copy_from_slice(self.row(s, t));
        }
        out
    }

    /// Slice for target `t` compressed to transient nodes only, in
    /// ascending node order; comparable with `fundamental_matrix({t})`.
    pub fn slice_compact(&self, t: usize) -> DenseMatrix {
        let n = self.n;
        let mut out = DenseMatrix::zeros(n - 1, n - 1);
        let mut si = 0;
        for s in 0..n {
            if s == t {
                continue;
            }
            let row = self.row(s, t);
            let dst = out.row_mut(si);
            let mut mi = 0;
            for (m, &v) in row.iter().enumerate() {
                if m == t {
                    continue;
                }
                dst[mi] = v;
                mi += 1;
            }
            si += 1;
        }
        out
    }

    /// Sum of all entries.
    pub fn total(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// `sum_{s,t} F[s][m][t]` for every medial node m.
    pub fn sum_over_sources_targets(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for t in 0..n {
            for s in 0..n {
                let row = self.row(s, t);
                for (o, &v) in out.iter_mut().zip(row) {
                    *o += v;
                }
            }
        }
        out
    }

    /// `sum_{s,m} F[s][m][t]` for every target t.
    pub fn sum_over_sources_medials(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|t| {
                let base = t * n * n;
                self.entries[base..base + n * n].iter().sum()
            })
            .collect()
    }

    /// Pairwise hitting times `H[s][t] = sum_m F[s][m][t]`.
    pub fn hitting_matrix(&self) -> DenseMatrix {
        let n = self.n;
        let mut h = DenseMatrix::zeros(n, n);
        for t in 0..n {
            for s in 0..n {
                h.set(s, t, self.row(s, t).iter().sum());
            }
        }
        h
    }

    /// Weighted hitting sums `sum_m F[s][m][t] r[m]` (hitting costs when
    /// `r` is the expected-outgoing-cost vector).
    pub fn weighted_hitting_matrix(&self, r: &[f64]) -> DenseMatrix {
        assert_eq!(r.len(), self.n, "weight vector length mismatch");
        let n = self.n;
        let mut h = DenseMatrix::zeros(n, n);
        for t in 0..n {
            for s in 0..n {
                let row = self.row(s, t);
                h.set(s, t, row.iter().zip(r).map(|(f, w)| f * w).sum());
            }
        }
        h
    }
}

/// Builds the fundamental tensor through the default pseudo-inverse route.
pub fn fundamental_tensor(
    p: &TransitionMatrix,
    pi: &[f64],
) -> Result<FundamentalTensor, FundamentalError> {
    Ok(TensorEngine::new(p, pi)?.materialize())
}

/// Builds the fundamental tensor through one regular inversion of
/// `Z = (I - P + 1 pi')^{-1}` instead of an SVD.
pub fn tensor_via_z(
    p: &TransitionMatrix,
    pi: &[f64],
) -> Result<FundamentalTensor, FundamentalError> {
    Ok(TensorEngine::via_z(p, pi)?.materialize())
}

/// Normalized fundamental tensor; entry `(s, m, t)` is the probability that
/// a walk from `s` hits `m` before `t`.
#[derive(Clone)]
pub struct NormalizedTensor {
    n: usize,
    entries: Vec<f64>,
}

impl NormalizedTensor {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, s: usize, m: usize, t: usize) -> f64 {
        self.entries[t * self.n * self.n + s * self.n + m]
    }

    #[inline]
    pub fn row(&self, s: usize, t: usize) -> &[f64] {
        let base = t * self.n * self.n + s * self.n;
        &self.entries[base..base + self.n]
    }

    /// `sum_{s,t} Fhat[s][m][t]` for every medial node m.
    pub fn sum_over_sources_targets(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for t in 0..n {
            for s in 0..n {
                let row = self.row(s, t);
                for (o, &v) in out.iter_mut().zip(row) {
                    *o += v;
                }
            }
        }
        out
    }
}

/// `Fhat[s][m][t] = F[s][m][t] / F[m][m][t]`, clamped into [0, 1] and with
/// near-1 values snapped to exactly 1 (`ONE_SNAP_TOL`).
pub fn normalize_tensor(f: &FundamentalTensor) -> NormalizedTensor {
    let n = f.n;
    let mut entries = vec![0.0; n * n * n];
    for t in 0..n {
        // Diagonal F[m][m][t] of the slice; every entry is >= 1 for m != t.
        let diag: Vec<f64> = (0..n).map(|m| f.get(m, m, t)).collect();
        let base = t * n * n;
        for s in 0..n {
            if s == t {
                continue;
            }
            let src = f.row(s, t);
            let dst = &mut entries[base + s * n..base + s * n + n];
            for m in 0..n {
                if m == t {
                    continue;
                }
                let v = src[m] / diag[m];
                dst[m] = if v >= 1.0 - ONE_SNAP_TOL {
                    1.0
                } else if v < 0.0 {
                    0.0
                } else {
                    v
                };
            }
        }
    }
    NormalizedTensor { n, entries }
}

/// Absorption probabilities `Q^A = F^A P_TA`: row `s`, column `j` is the
/// probability that a walk from transient node `s` is absorbed by target
/// `j` before any other target in `A`.
#[derive(Clone, Debug)]
pub struct AbsorptionMatrix {
    targets: Vec<usize>,
    transient: Vec<usize>,
    position: Vec<Option<usize>>,
    target_position: Vec<Option<usize>>,
    q: DenseMatrix,
}

impl AbsorptionMatrix {
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn transient(&self) -> &[usize] {
        &self.transient
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.q
    }

    /// Absorption probability for global indices; start nodes inside the
    /// target set get the boundary convention (1 on themselves, 0 others).
    pub fn prob(&self, s: usize, target: usize) -> Option<f64> {
        let tj = self.target_position.get(target).copied().flatten()?;
        match self.position.get(s).copied().flatten() {
            Some(si) => Some(self.q.get(si, tj)),
            None => {
                if self.targets.binary_search(&s).is_ok() {
                    Some(if s == target { 1.0 } else { 0.0 })
                } else {
                    None
                }
            }
        }
    }
}

pub fn absorption_probabilities(
    p: &TransitionMatrix,
    targets: &[usize],
) -> Result<AbsorptionMatrix, FundamentalError> {
    let f = fundamental_matrix(p, targets)?;
    Ok(absorption_from_fundamental(p, &f))
}

/// Builds `Q = F^A P_TA` from an already-computed fundamental matrix.
pub fn absorption_from_fundamental(
    p: &TransitionMatrix,
    f: &FundamentalMatrix,
) -> AbsorptionMatrix {
    let p_ta = p.matrix().submatrix(f.transient(), f.targets());
    let q = f.matrix().matmul(&p_ta);
    let mut target_position = vec![None; p.n()];
    for (local, &global) in f.targets().iter().enumerate() {
        target_position[global] = Some(local);
    }
    AbsorptionMatrix {
        targets: f.targets.clone(),
        transient: f.transient.clone(),
        position: f.position.clone(),
        target_position,
        q,
    }
}

/// Incremental fundamental matrix (Schur update): extends the absorbing
/// set of `f` by `add`, at O(|add|^3 + n |add|^2) cost instead of a fresh
/// O(n^3) inversion.
pub fn incremental_fundamental(
    f: &FundamentalMatrix,
    add: &[usize],
) -> Result<FundamentalMatrix, FundamentalError> {
    let mut add = add.to_vec();
    add.sort_unstable();
    add.dedup();
    if add.is_empty() {
        return Ok(f.clone());
    }
    // Every added target must currently be transient.
    let mut drop_local = Vec::with_capacity(add.len());
    for &g in &add {
        match f.position.get(g).copied().flatten() {
            Some(local) => drop_local.push(local),
            None => return Err(FundamentalError::InvalidIncrement),
        }
    }
    let reduced = submatrix_inverse(&f.f, &drop_local)?;
    let mut targets = f.targets.clone();
    targets.extend_from_slice(&add);
    targets.sort_unstable();
    let transient: Vec<usize> = f
        .transient
        .iter()
        .copied()
        .filter(|g| add.binary_search(g).is_err())
        .collect();
    let mut position = vec![None; f.position.len()];
    for (local, &global) in transient.iter().enumerate() {
        position[global] = Some(local);
    }
    Ok(FundamentalMatrix {
        targets,
        transient,
        position,
        f: reduced,
    })
}

/// Fundamental matrix of the extended graph with target `{o}`; the
/// reachability oracle and the influence objective both start from this.
pub fn extended_fundamental(
    ext: &crate::graph::ExtendedGraph,
) -> Result<FundamentalMatrix, FundamentalError> {
    fundamental_matrix(ext.transition(), &[ext.o_index()])
}
