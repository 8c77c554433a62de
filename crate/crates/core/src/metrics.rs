//! Hitting time, hitting cost, commute time/cost, Kirchhoff index,
//! Laplacian-form shortcuts, and the relation suite that cross-checks the
//! whole metric catalog on one chain.
//!
//! Edge-count convention: `|E|` counts directed edge slots (nonzero
//! adjacency entries), so an undirected edge counts twice. All three
//! Kirchhoff-index routes agree under this convention and
//! `kirchhoff_index` enforces that agreement at runtime.

use thiserror::Error;

use crate::fundamental::{
    absorption_from_fundamental, digraph_laplacian, fundamental_matrix, fundamental_tensor,
    FundamentalError, FundamentalMatrix, FundamentalTensor,
};
use crate::graph::{stationary_distribution, Graph, TransitionMatrix};
use crate::linalg::{pinv, DenseMatrix, LinalgError};

/// Relative agreement required between Kirchhoff-index routes.
pub const KIRCHHOFF_ROUTE_RTOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(
        "Kirchhoff routes disagree beyond {KIRCHHOFF_ROUTE_RTOL:e} relative \
         (commute {commute}, laplacian {laplacian}, tensor {tensor}); \
         this signals an edge-count convention bug"
    )]
    RouteDisagreement {
        commute: f64,
        laplacian: f64,
        tensor: f64,
    },
    #[error("relation suite capped at n <= {cap}, got n = {n}")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Fundamental(#[from] FundamentalError),
    #[error("graph error: {0}")]
    Graph(#[from] crate::graph::GraphError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] LinalgError),
}

/// Hitting times `h = F 1` towards a target set.
#[derive(Clone, Debug)]
pub struct HittingTimes {
    pub targets: Vec<usize>,
    pub transient: Vec<usize>,
    pub h: Vec<f64>,
}

pub fn hitting_times(f: &FundamentalMatrix) -> HittingTimes {
    let h = (0..f.transient().len())
        .map(|i| f.matrix().row(i).iter().sum())
        .collect();
    HittingTimes {
        targets: f.targets().to_vec(),
        transient: f.transient().to_vec(),
        h,
    }
}

/// Hitting costs `lh = F r` with `r_s` the expected outgoing cost of `s`.
#[derive(Clone, Debug)]
pub struct HittingCosts {
    pub targets: Vec<usize>,
    pub transient: Vec<usize>,
    pub lh: Vec<f64>,
    /// Expected outgoing costs for every node of the graph.
    pub r: Vec<f64>,
}

/// Expected outgoing cost `r_s = sum_m p_sm w_sm`, computed as
/// `(sum_m a_sm w_sm) / d_s` so that unit costs give exactly `r = 1`.
pub fn expected_outgoing_costs(g: &Graph, w: &DenseMatrix) -> Vec<f64> {
    assert_eq!(w.rows(), g.n(), "cost matrix size mismatch");
    assert_eq!(w.cols(), g.n(), "cost matrix size mismatch");
    (0..g.n())
        .map(|s| {
            let row = g.adjacency().row(s);
            let degree: f64 = row.iter().sum();
            let weighted: f64 = row
                .iter()
                .zip(w.row(s))
                .map(|(&a, &c)| a * c)
                .sum();
            if degree > 0.0 {
                weighted / degree
            } else {
                0.0
            }
        })
        .collect()
}

pub fn hitting_costs(f: &FundamentalMatrix, g: &Graph, w: &DenseMatrix) -> HittingCosts {
    let r = expected_outgoing_costs(g, w);
    let r_transient: Vec<f64> = f.transient().iter().map(|&i| r[i]).collect();
    let lh = f.matrix().matvec(&r_transient);
    HittingCosts {
        targets: f.targets().to_vec(),
        transient: f.transient().to_vec(),
        lh,
        r,
    }
}

/// Symmetric commute matrix with optional commute costs.
#[derive(Clone, Debug)]
pub struct CommuteMatrix {
    pub c: DenseMatrix,
    pub cc: Option<DenseMatrix>,
}

/// `C = H + H'` from a pairwise hitting matrix.
pub fn commute_times(h: &DenseMatrix) -> DenseMatrix {
    let n = h.rows();
    let mut c = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            c.set(i, j, h.get(i, j) + h.get(j, i));
        }
    }
    c
}

/// Commute matrix (and costs, when a cost matrix is available) from the
/// tensor's row sums.
pub fn commute_matrix(t: &FundamentalTensor, g: Option<&Graph>) -> CommuteMatrix {
    let h = t.hitting_matrix();
    let c = commute_times(&h);
    let cc = g.and_then(|g| {
        g.cost().map(|w| {
            let r = expected_outgoing_costs(g, w);
            let u = t.weighted_hitting_matrix(&r);
            commute_times(&u)
        })
    });
    CommuteMatrix { c, cc }
}

/// Kirchhoff index with its three computation routes.
#[derive(Clone, Copy, Debug)]
pub struct KirchhoffIndex {
    /// Canonical value (tensor route).
    pub value: f64,
    pub route_commute: f64,
    pub route_laplacian: f64,
    pub route_tensor: f64,
}

/// Computes the Kirchhoff index and verifies that the commute-sum,
/// Laplacian-trace, and tensor-sum routes agree.
pub fn kirchhoff_index(
    t: &FundamentalTensor,
    p: &TransitionMatrix,
    edge_count: usize,
) -> Result<KirchhoffIndex, MetricsError> {
    let e = edge_count as f64;
    let n = t.n() as f64;
    let h = t.hitting_matrix();
    let mut commute_sum = 0.0;
    for i in 0..t.n() {
        for j in 0..t.n() {
            commute_sum += h.get(i, j) + h.get(j, i);
        }
    }
    let route_commute = commute_sum / (2.0 * e);
    let lplus = pinv(&digraph_laplacian(p, t.stationary()));
    let trace: f64 = (0..t.n()).map(|i| lplus.get(i, i)).sum();
    let route_laplacian = n / e * trace;
    let route_tensor = t.total() / e;

    let scale = route_tensor.abs().max(1e-300);
    let spread = (route_commute - route_tensor)
        .abs()
        .max((route_laplacian - route_tensor).abs())
        .max((route_commute - route_laplacian).abs());
    if spread > KIRCHHOFF_ROUTE_RTOL * scale {
        return Err(MetricsError::RouteDisagreement {
            commute: route_commute,
            laplacian: route_laplacian,
            tensor: route_tensor,
        });
    }
    Ok(KirchhoffIndex {
        value: route_tensor,
        route_commute,
        route_laplacian,
        route_tensor,
    })
}

/// Pairwise hitting times straight from the pseudo-inverse of the digraph
/// Laplacian `L = Pi (I - P)`:
/// `H_i^j = sum_m (L+_im - L+_jm) pi_m + L+_jj - L+_ij`.
pub fn laplacian_hitting(lplus: &DenseMatrix, pi: &[f64]) -> DenseMatrix {
    let n = pi.len();
    let mut h = DenseMatrix::zeros(n, n);
    // sum_m L+_im pi_m for every i.
    let weighted_row_sums: Vec<f64> = (0..n)
        .map(|i| lplus.row(i).iter().zip(pi).map(|(l, p)| l * p).sum())
        .collect();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            h.set(
                i,
                j,
                weighted_row_sums[i] - weighted_row_sums[j] + lplus.get(j, j) - lplus.get(i, j),
            );
        }
    }
    h
}

/// `C_ij = L+_ii + L+_jj - L+_ij - L+_ji`.
pub fn laplacian_commute(lplus: &DenseMatrix) -> DenseMatrix {
    let n = lplus.rows();
    let mut c = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                c.set(
                    i,
                    j,
                    lplus.get(i, i) + lplus.get(j, j) - lplus.get(i, j) - lplus.get(j, i),
                );
            }
        }
    }
    c
}

/// Pairwise hitting costs from `L+` with `g_m = r_m pi_m`.
pub fn laplacian_hitting_cost(lplus: &DenseMatrix, pi: &[f64], r: &[f64]) -> DenseMatrix {
    let n = pi.len();
    let g: Vec<f64> = r.iter().zip(pi).map(|(r, p)| r * p).collect();
    let g_total: f64 = g.iter().sum();
    let weighted_row_sums: Vec<f64> = (0..n)
        .map(|i| lplus.row(i).iter().zip(&g).map(|(l, w)| l * w).sum())
        .collect();
    let mut u = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            u.set(
                i,
                j,
                weighted_row_sums[i] - weighted_row_sums[j]
                    + (lplus.get(j, j) - lplus.get(i, j)) * g_total,
            );
        }
    }
    u
}

/// Commute cost is commute time scaled by `sum_m g_m`.
pub fn laplacian_commute_cost(lplus: &DenseMatrix, pi: &[f64], r: &[f64]) -> DenseMatrix {
    let g_total: f64 = r.iter().zip(pi).map(|(r, p)| r * p).sum();
    let mut c = laplacian_commute(lplus);
    for i in 0..c.rows() {
        for v in c.row_mut(i) {
            *v *= g_total;
        }
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Equality,
    Inequality,
}

/// One relation evaluated over all applicable index tuples.
#[derive(Clone, Debug)]
pub struct RelationCheck {
    pub name: &'static str,
    pub kind: CheckKind,
    /// Equalities: max |lhs - rhs|. Inequalities: max (violating side
    /// minus bound); negative values mean the inequality held with margin.
    pub max_violation: f64,
    pub tuples: usize,
}

#[derive(Clone, Debug)]
pub struct RelationReport {
    pub n: usize,
    pub undirected: bool,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn passes(&self, eq_tol: f64, ineq_slack: f64) -> bool {
        self.checks.iter().all(|c| match c.kind {
            CheckKind::Equality => c.max_violation <= eq_tol,
            CheckKind::Inequality => c.max_violation <= ineq_slack,
        })
    }

    pub fn worst(&self) -> Option<&RelationCheck> {
        self.checks
            .iter()
            .max_by(|a, b| a.max_violation.total_cmp(&b.max_violation))
    }
}

struct CheckAccumulator {
    name: &'static str,
    kind: CheckKind,
    max_violation: f64,
    tuples: usize,
}

impl CheckAccumulator {
    fn new(name: &'static str, kind: CheckKind) -> Self {
        Self {
            name,
            kind,
            max_violation: f64::NEG_INFINITY,
            tuples: 0,
        }
    }

    fn equality(&mut self, lhs: f64, rhs: f64) {
        self.max_violation = self.max_violation.max((lhs - rhs).abs());
        self.tuples += 1;
    }

    /// Records `lhs >= rhs`; violation is `rhs - lhs`.
    fn at_least(&mut self, lhs: f64, rhs: f64) {
        self.max_violation = self.max_violation.max(rhs - lhs);
        self.tuples += 1;
    }

    fn finish(self) -> RelationCheck {
        RelationCheck {
            name: self.name,
            kind: self.kind,
            max_violation: if self.tuples == 0 {
                0.0
            } else {
                self.max_violation
            },
            tuples: self.tuples,
        }
    }
}

/// Evaluates the full relation catalog on every applicable index tuple and
/// reports the maximum violation per relation. O(n^4); capped at `max_n`.
pub fn relation_suite(p: &TransitionMatrix, max_n: usize) -> Result<RelationReport, MetricsError> {
    let n = p.n();
    let undirected = p.undirected();
    if n > max_n {
        return Err(MetricsError::TooLarge { n, cap: max_n });
    }
    let pi = stationary_distribution(p)?;
    let tensor = fundamental_tensor(p, &pi)?;
    let h = tensor.hitting_matrix();
    let c = commute_times(&h);
    let lplus = pinv(&digraph_laplacian(p, &pi));

    // Two-target machinery: q2[j][k][i] = P(hit j before k | start i) with
    // the boundary convention, h2[j][k][i] = H_i^{j,k}, f2[j][k] = F^{j,k}.
    let idx = |j: usize, k: usize, i: usize| (j * n + k) * n + i;
    let mut q2 = vec![f64::NAN; n * n * n];
    let mut h2 = vec![f64::NAN; n * n * n];
    let mut f2: Vec<Option<FundamentalMatrix>> = vec![None; n * n];
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            if j < k {
                let f = fundamental_matrix(p, &[j, k])?;
                let ht = hitting_times(&f);
                for (local, &global) in ht.transient.iter().enumerate() {
                    h2[idx(j, k, global)] = ht.h[local];
                    h2[idx(k, j, global)] = ht.h[local];
                }
                h2[idx(j, k, j)] = 0.0;
                h2[idx(j, k, k)] = 0.0;
                h2[idx(k, j, j)] = 0.0;
                h2[idx(k, j, k)] = 0.0;
                let q = absorption_from_fundamental(p, &f);
                for i in 0..n {
                    q2[idx(j, k, i)] = q.prob(i, j).unwrap();
                    q2[idx(k, j, i)] = q.prob(i, k).unwrap();
                }
                f2[j * n + k] = Some(f);
            }
        }
    }
    let f2_of = |j: usize, k: usize| f2[(j.min(k)) * n + j.max(k)].as_ref().unwrap();

    let mut r1 = CheckAccumulator::new("R1 absorption complement", CheckKind::Equality);
    let mut r2_1 = CheckAccumulator::new("R2.1 F_ii = pi_i C_ij", CheckKind::Equality);
    let mut r2_2 = CheckAccumulator::new("R2.2 commute expansion", CheckKind::Equality);
    let mut r2_3 = CheckAccumulator::new("R2.3 cross-target sum", CheckKind::Equality);
    let mut r2_4 = CheckAccumulator::new("R2.4 swapped-slice sum", CheckKind::Equality);
    let mut r3_1 = CheckAccumulator::new("R3.1 detour overhead (tensor)", CheckKind::Equality);
    let mut r3_2 = CheckAccumulator::new("R3.2 detour overhead (absorption)", CheckKind::Equality);
    let mut r4 = CheckAccumulator::new("R4 two-target hitting decomposition", CheckKind::Equality);
    let mut r5_1 = CheckAccumulator::new("R5.1 triangle inequality", CheckKind::Inequality);
    let mut r5_2 = CheckAccumulator::new("R5.2 target-set dominance", CheckKind::Inequality);
    let mut r5_3 = CheckAccumulator::new("R5.3 generalized triangle", CheckKind::Inequality);
    let mut r6_1 = CheckAccumulator::new("R6.1 fundamental product bound", CheckKind::Inequality);
    let mut r6_2 = CheckAccumulator::new("R6.2 diagonal dominance", CheckKind::Inequality);
    let mut r7 = CheckAccumulator::new("R7 absorption chaining", CheckKind::Inequality);
    let mut r8 = CheckAccumulator::new("R8 Laplacian inequality", CheckKind::Inequality);
    let mut r9_1 = CheckAccumulator::new("R9.1 reversibility of F", CheckKind::Equality);
    let mut r9_2 = CheckAccumulator::new("R9.2 reversed absorption", CheckKind::Equality);
    let mut r9_3 = CheckAccumulator::new("R9.3 cyclic hitting sum", CheckKind::Equality);

    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            for i in 0..n {
                if i == j || i == k {
                    continue;
                }
                r1.equality(q2[idx(j, k, i)] + q2[idx(k, j, i)], 1.0);
            }
        }
    }

    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            r2_1.equality(tensor.get(i, i, j), pi[i] * c.get(i, j));
            for m in 0..n {
                if m != j {
                    r2_2.equality(
                        tensor.get(i, m, j) / pi[m] + tensor.get(m, i, j) / pi[i],
                        c.get(i, j) + c.get(j, m) - c.get(i, m),
                    );
                }
                r2_4.equality(
                    tensor.get(i, m, j) + tensor.get(j, m, i),
                    pi[m] * c.get(i, j),
                );
            }
        }
    }
    for j in 0..n {
        for m in 0..n {
            if j == m {
                continue;
            }
            for i in 0..n {
                r2_3.equality(
                    tensor.get(i, m, j) / pi[m] + tensor.get(i, j, m) / pi[j],
                    c.get(j, m),
                );
            }
        }
    }

    for i in 0..n {
        for j in 0..n {
            for m in 0..n {
                r3_1.equality(
                    h.get(i, j) + h.get(j, m) - h.get(i, m),
                    tensor.get(i, m, j) / pi[m],
                );
                r5_1.at_least(h.get(i, m) + h.get(m, j), h.get(i, j));
                r8.at_least(
                    lplus.get(i, m) + lplus.get(j, j),
                    lplus.get(i, j) + lplus.get(j, m),
                );
            }
        }
    }

    for m in 0..n {
        for j in 0..n {
            if m == j {
                continue;
            }
            for i in 0..n {
                if i == m || i == j {
                    continue;
                }
                r3_2.equality(
                    h.get(i, j) + h.get(j, m) - h.get(i, m),
                    q2[idx(m, j, i)] * c.get(m, j),
                );
            }
        }
    }

    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            for i in 0..n {
                if i == j || i == k {
                    continue;
                }
                let two_target = h2[idx(j, k, i)];
                r4.equality(two_target, h.get(i, k) - q2[idx(j, k, i)] * h.get(j, k));
                r4.equality(two_target, h.get(i, j) - q2[idx(k, j, i)] * h.get(k, j));
                r5_2.at_least(h.get(i, j), two_target);
                r5_2.at_least(h.get(i, k), two_target);
                for m in 0..n {
                    if m == j || m == k {
                        continue;
                    }
                    r5_3.at_least(h.get(i, m) + h2[idx(j, k, m)], two_target);
                }
            }
        }
    }

    for t in 0..n {
        for i in 0..n {
            if i == t {
                continue;
            }
            for kk in 0..n {
                if kk == t {
                    continue;
                }
                r6_2.at_least(tensor.get(kk, kk, t), tensor.get(i, kk, t));
                for m in 0..n {
                    if m == t {
                        continue;
                    }
                    r6_1.at_least(
                        tensor.get(i, m, t) * tensor.get(kk, kk, t),
                        tensor.get(i, kk, t) * tensor.get(kk, m, t),
                    );
                }
            }
        }
    }

    for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                if k == j {
                    continue;
                }
                for m in 0..n {
                    if m == j {
                        continue;
                    }
                    r7.at_least(
                        q2[idx(m, j, i)],
                        q2[idx(k, j, i)] * q2[idx(m, j, k)],
                    );
                }
            }
        }
    }

    if undirected {
        for j in 0..n {
            for i in 0..n {
                if i == j {
                    continue;
                }
                for m in 0..n {
                    if m == j {
                        continue;
                    }
                    r9_1.equality(
                        tensor.get(i, m, j) / pi[m],
                        tensor.get(m, i, j) / pi[i],
                    );
                }
            }
        }
        // Two-target sets exercise the general form of R9.1.
        for j in 0..n {
            for k in j + 1..n {
                let f = f2_of(j, k);
                for (a, &ga) in f.transient().iter().enumerate() {
                    for (b, &gb) in f.transient().iter().enumerate() {
                        r9_1.equality(
                            f.matrix().get(a, b) / pi[gb],
                            f.matrix().get(b, a) / pi[ga],
                        );
                    }
                }
            }
        }
        for j in 0..n {
            for i in 0..n {
                if i == j {
                    continue;
                }
                for m in 0..n {
                    if m == j || m == i {
                        continue;
                    }
                    r9_2.equality(
                        q2[idx(m, j, i)] * c.get(m, j),
                        q2[idx(i, j, m)] * c.get(i, j),
                    );
                    r9_3.equality(
                        h.get(i, m) + h.get(m, j) + h.get(j, i),
                        h.get(m, i) + h.get(j, m) + h.get(i, j),
                    );
                }
            }
        }
    }

    let mut checks = vec![
        r1.finish(),
        r2_1.finish(),
        r2_2.finish(),
        r2_3.finish(),
        r2_4.finish(),
        r3_1.finish(),
        r3_2.finish(),
        r4.finish(),
        r5_1.finish(),
        r5_2.finish(),
        r5_3.finish(),
        r6_1.finish(),
        r6_2.finish(),
        r7.finish(),
        r8.finish(),
    ];
    if undirected {
        checks.push(r9_1.finish());
        checks.push(r9_2.finish());
        checks.push(r9_3.finish());
    }
    Ok(RelationReport {
        n,
        undirected,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn path3() -> (Graph, TransitionMatrix, Vec<f64>) {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)], false).unwrap();
        let t = TransitionMatrix::from_graph(&g).unwrap();
        let pi = stationary_distribution(&t).unwrap();
        (g, t, pi)
    }

    fn cycle3() -> (Graph, TransitionMatrix, Vec<f64>) {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)], true).unwrap();
        let t = TransitionMatrix::from_graph(&g).unwrap();
        let pi = stationary_distribution(&t).unwrap();
        (g, t, pi)
    }

    #[test]
    fn hitting_times_path() {
        let (_, p, _) = path3();
        let f = fundamental_matrix(&p, &[2]).unwrap();
        let ht = hitting_times(&f);
        assert!((ht.h[0] - 4.0).abs() < 1e-12);
        assert!((ht.h[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hitting_times_cycle() {
        let (_, p, _) = cycle3();
        let f = fundamental_matrix(&p, &[2]).unwrap();
        let ht = hitting_times(&f);
        assert!((ht.h[0] - 2.0).abs() < 1e-12);
        assert!((ht.h[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hitting_times_at_least_one() {
        let (_, p, _) = path3();
        for t in 0..3 {
            let ht = hitting_times(&fundamental_matrix(&p, &[t]).unwrap());
            assert!(ht.h.iter().all(|&v| v >= 1.0));
        }
    }

    #[test]
    fn hitting_costs_deterministic_chain() {
        // 0 -> 1 -> 2 closed by 2 -> 0; costs 5 and 7 on the forward edges.
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)], true).unwrap();
        let mut w = DenseMatrix::zeros(3, 3);
        w.set(0, 1, 5.0);
        w.set(1, 2, 7.0);
        w.set(2, 0, 1.0);
        let g = g.with_costs(w).unwrap();
        let p = TransitionMatrix::from_graph(&g).unwrap();
        let f = fundamental_matrix(&p, &[2]).unwrap();
        let hc = hitting_costs(&f, &g, g.cost().unwrap());
        assert!((hc.lh[0] - 12.0).abs() < 1e-12);
        assert!((hc.lh[1] - 7.0).abs() < 1e-12);
    }

    #[test]
    fn unit_costs_reduce_to_hitting_times_exactly() {
        let (g, p, _) = path3();
        let mut w = DenseMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                if g.adjacency().get(i, j) > 0.0 {
                    w.set(i, j, 1.0);
                }
            }
        }
        let f = fundamental_matrix(&p, &[2]).unwrap();
        let ht = hitting_times(&f);
        let hc = hitting_costs(&f, &g, &w);
        assert_eq!(ht.h, hc.lh);
    }

    #[test]
    fn commute_path_endpoints() {
        let (_, p, pi) = path3();
        let t = fundamental_tensor(&p, &pi).unwrap();
        let cm = commute_matrix(&t, None);
        assert!((cm.c.get(0, 2) - 8.0).abs() < 1e-10);
        assert_eq!(cm.c.get(1, 1), 0.0);
        assert!(cm.c.max_abs_diff(&cm.c.transpose()) < 1e-12);
    }

    #[test]
    fn commute_directed_cycle() {
        let (_, p, pi) = cycle3();
        let t = fundamental_tensor(&p, &pi).unwrap();
        let cm = commute_matrix(&t, None);
        // H_0^1 = 1, H_1^0 = 2.
        assert!((cm.c.get(0, 1) - 3.0).abs() < 1e-10);
    }

    #[test]
    fn kirchhoff_path_is_four() {
        let (g, p, pi) = path3();
        let t = fundamental_tensor(&p, &pi).unwrap();
        let k = kirchhoff_index(&t, &p, g.edge_count()).unwrap();
        assert!((k.value - 4.0).abs() < 1e-10, "K = {}", k.value);
    }

    #[test]
    fn kirchhoff_routes_agree_on_cycle() {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)], false).unwrap();
        let p = TransitionMatrix::from_graph(&g).unwrap();
        let pi = stationary_distribution(&p).unwrap();
        let t = fundamental_tensor(&p, &pi).unwrap();
        let k = kirchhoff_index(&t, &p, g.edge_count()).unwrap();
        assert!(k.value > 0.0);
        let scale = k.value;
        assert!((k.route_commute - k.route_tensor).abs() <= 1e-9 * scale);
        assert!((k.route_laplacian - k.route_tensor).abs() <= 1e-9 * scale);
    }

    #[test]
    fn laplacian_hitting_matches_tensor_route() {
        let (_, p, pi) = path3();
        let t = fundamental_tensor(&p, &pi).unwrap();
        let h_tensor = t.hitting_matrix();
        let lplus = pinv(&digraph_laplacian(&p, &pi));
        let h_lap = laplacian_hitting(&lplus, &pi);
        assert!(h_lap.max_abs_diff(&h_tensor) < 1e-8);
        assert!((h_lap.get(0, 2) - 4.0).abs() < 1e-8);
        for i in 0..3 {
            assert_eq!(h_lap.get(i, i), 0.0);
        }
    }

    #[test]
    fn commute_cost_is_scalar_multiple_of_commute_time() {
        let (g, p, pi) = path3();
        let mut w = DenseMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                if g.adjacency().get(i, j) > 0.0 {
                    w.set(i, j, 1.0 + (i + j) as f64);
                }
            }
        }
        let r = expected_outgoing_costs(&g, &w);
        let lplus = pinv(&digraph_laplacian(&p, &pi));
        let c = laplacian_commute(&lplus);
        let cc = laplacian_commute_cost(&lplus, &pi, &r);
        let g_total: f64 = r.iter().zip(&pi).map(|(r, p)| r * p).sum();
        for i in 0..3 {
            for j in 0..3 {
                assert!((cc.get(i, j) - c.get(i, j) * g_total).abs() < 1e-10);
            }
        }
        // Cross-check against the tensor route for hitting costs.
        let t = fundamental_tensor(&p, &pi).unwrap();
        let u_tensor = t.weighted_hitting_matrix(&r);
        let u_lap = laplacian_hitting_cost(&lplus, &pi, &r);
        assert!(u_lap.max_abs_diff(&u_tensor) < 1e-8);
    }

    #[test]
    fn relation_suite_on_path() {
        let (_, p, _) = path3();
        let report = relation_suite(&p, 12).unwrap();
        assert!(report.passes(1e-8, 1e-10), "{:#?}", report.worst());
        assert!(report.checks.iter().any(|c| c.name.starts_with("R9")));
    }

    #[test]
    fn relation_suite_on_directed_cycle() {
        let (_, p, _) = cycle3();
        let report = relation_suite(&p, 12).unwrap();
        assert!(report.passes(1e-8, 1e-10), "{:#?}", report.worst());
        assert!(!report.checks.iter().any(|c| c.name.starts_with("R9")));
    }

    #[test]
    fn relation_suite_rejects_large_n() {
        let (_, p, _) = path3();
        assert!(matches!(
            relation_suite(&p, 2),
            Err(MetricsError::TooLarge { n: 3, cap: 2 })
        ));
    }
}
