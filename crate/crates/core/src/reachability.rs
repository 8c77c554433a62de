//! Precomputed reachability oracle over the extended graph, answering
//! static and failure-conditioned queries.
//!
//! The oracle is the fundamental matrix of the extended graph with target
//! `{o}`: entry `(s, t)` is nonzero exactly when `t` is reachable from `s`
//! in the base graph, because a walk visits everything reachable with
//! positive probability before being absorbed. A failure set folds in via
//! the Schur-complement identity
//! `F_stS = F_st - F_sF (F_FF)^{-1} F_Ft`, so a query after node failures
//! costs O(|F|^2) once the small `F_FF` inverse is cached.

use std::collections::HashMap;
use std::sync::Mutex;

use thiserror::Error;

use crate::fundamental::{extended_fundamental, FundamentalError};
use crate::graph::ExtendedGraph;
use crate::linalg::{inverse, DenseMatrix, LinalgError};

/// Relative zero threshold: entries above `REACH_RTOL * max(F)` count as
/// reachable. Structural zeros are exact zeros of the geometric series;
/// only Schur-update round-off needs absorbing.
pub const REACH_RTOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ReachError {
    #[error("node index {0} out of range")]
    InvalidNode(usize),
    #[error("query endpoint {0} is in the failure set")]
    FailedEndpoint(usize),
    #[error(transparent)]
    Fundamental(#[from] FundamentalError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] LinalgError),
}

/// Running record of the numerical gap between accepted and rejected
/// query scalars.
#[derive(Clone, Copy, Debug)]
pub struct GapStats {
    /// Smallest scalar that was classified reachable.
    pub min_reachable: f64,
    /// Largest scalar that was classified unreachable.
    pub max_unreachable: f64,
    pub queries: u64,
}

impl GapStats {
    fn new() -> Self {
        Self {
            min_reachable: f64::INFINITY,
            max_unreachable: f64::NEG_INFINITY,
            queries: 0,
        }
    }
}

/// Precomputed oracle: one O(n^3) inversion, O(n^2) storage, O(1) static
/// queries, and O(|F|^2) failure queries after a cached O(|F|^3) setup per
/// distinct failure set.
pub struct ReachabilityOracle {
    f_o: DenseMatrix,
    threshold: f64,
    cache: Mutex<HashMap<Vec<usize>, std::sync::Arc<DenseMatrix>>>,
    gap: Mutex<GapStats>,
}

pub fn build_oracle(ext: &ExtendedGraph) -> Result<ReachabilityOracle, ReachError> {
    let f = extended_fundamental(ext)?;
    let mut f_o = f.matrix().clone();
    // Visit counts are nonnegative; inversion round-off below zero is noise.
    for i in 0..f_o.rows() {
        for v in f_o.row_mut(i) {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }
    let threshold = REACH_RTOL * f_o.max_abs();
    Ok(ReachabilityOracle {
        f_o,
        threshold,
        cache: Mutex::new(HashMap::new()),
        gap: Mutex::new(GapStats::new()),
    })
}

impl ReachabilityOracle {
    pub fn n(&self) -> usize {
        self.f_o.rows()
    }

    /// The precomputed `F^o` table over the original nodes.
    pub fn matrix(&self) -> &DenseMatrix {
        &self.f_o
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn gap_stats(&self) -> GapStats {
        *self.gap.lock().unwrap()
    }

    fn record(&self, scalar: f64, reachable: bool) {
        let mut gap = self.gap.lock().unwrap();
        gap.queries += 1;
        if reachable {
            gap.min_reachable = gap.min_reachable.min(scalar);
        } else {
            gap.max_unreachable = gap.max_unreachable.max(scalar);
        }
    }

    fn check_node(&self, v: usize) -> Result<(), ReachError> {
        if v >= self.n() {
            return Err(ReachError::InvalidNode(v));
        }
        Ok(())
    }

    /// Static reachability `R(s, t)`; `s == t` is reachable by convention.
    pub fn query(&self, s: usize, t: usize) -> Result<bool, ReachError> {
        self.check_node(s)?;
        self.check_node(t)?;
        if s == t {
            return Ok(true);
        }
        let scalar = self.f_o.get(s, t);
        let reachable = scalar > self.threshold;
        self.record(scalar, reachable);
        Ok(reachable)
    }

    /// Reachability after the nodes in `failed` are removed. Endpoints must
    /// be alive. The `|F| x |F|` block inverse is cached per failure set,
    /// so repeated queries with the same set run in O(|F|^2).
    pub fn query_with_failures(
        &self,
        s: usize,
        t: usize,
        failed: &[usize],
    ) -> Result<bool, ReachError> {
        self.check_node(s)?;
        self.check_node(t)?;
        let mut key: Vec<usize> = failed.to_vec();
        key.sort_unstable();
        key.dedup();
        if let Some(&bad) = key.iter().find(|&&v| v >= self.n()) {
            return Err(ReachError::InvalidNode(bad));
        }
        if key.binary_search(&s).is_ok() {
            return Err(ReachError::FailedEndpoint(s));
        }
        if key.binary_search(&t).is_ok() {
            return Err(ReachError::FailedEndpoint(t));
        }
        if key.is_empty() {
            return self.query(s, t);
        }
        if s == t {
            return Ok(true);
        }
        let w_inv = self.failure_block_inverse(&key)?;
        let k = key.len();
        let mut scalar = self.f_o.get(s, t);
        // F_st - F_sF W^{-1} F_Ft with W = F_FF.
        for a in 0..k {
            let f_sa = self.f_o.get(s, key[a]);
            if f_sa == 0.0 {
                continue;
            }
            let wrow = w_inv.row(a);
            for (b, &fb) in key.iter().enumerate() {
                scalar -= f_sa * wrow[b] * self.f_o.get(fb, t);
            }
        }
        let reachable = scalar > self.threshold;
        self.record(scalar, reachable);
        Ok(reachable)
    }

    fn failure_block_inverse(
        &self,
        key: &[usize],
    ) -> Result<std::sync::Arc<DenseMatrix>, ReachError> {
        let mut cache = self.cache.lock().unwrap();
        if let Some(hit) = cache.get(key) {
            return Ok(hit.clone());
        }
        let w = self.f_o.submatrix(key, key);
        let w_inv = std::sync::Arc::new(inverse(&w)?);
        cache.insert(key.to_vec(), w_inv.clone());
        Ok(w_inv)
    }
}
