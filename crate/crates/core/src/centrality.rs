//! Random-walk closeness, betweenness (aggregate and net-flow variants),
//! load distribution, and articulation-point detection from the normalized
//! tensor.

use crate::fundamental::{FundamentalTensor, NormalizedTensor};
use crate::graph::{Graph, TransitionMatrix};

/// Default tolerance for the `Fhat = 1` articulation test. Flagged triples
/// are re-verified by an exact graph search, so this only affects candidate
/// generation.
pub const ARTICULATION_EPS: f64 = 1e-9;

/// Closeness scores: the raw total hitting time into each target and the
/// reciprocal form `|V| / total` (larger = more central).
#[derive(Clone, Debug)]
pub struct ClosenessScores {
    pub total_hitting: Vec<f64>,
    pub reciprocal: Vec<f64>,
}

/// `Closeness(t) = sum_{s,m} F[s][m][t]`, i.e. the total hitting time of
/// `t` from everywhere.
pub fn closeness(t: &FundamentalTensor) -> ClosenessScores {
    let total_hitting = t.sum_over_sources_medials();
    let n = t.n() as f64;
    let reciprocal = total_hitting.iter().map(|&s| n / s).collect();
    ClosenessScores {
        total_hitting,
        reciprocal,
    }
}

/// `Betweenness(m) = sum_{s,t} F[s][m][t]`; proportional to the stationary
/// probability of `m` with constant `|E| K`.
pub fn betweenness_rw(t: &FundamentalTensor) -> Vec<f64> {
    t.sum_over_sources_targets()
}

/// Net-flow betweenness. Graphs with reciprocal edges (undirected or
/// mixed) use `sum_{s,t} sum_k |F[s][m][t] p_mk - F[s][k][t] p_km| / 2`;
/// strictly unidirectional graphs (`e_ij in E` implies `e_ji not in E`)
/// reduce to the outflow sum `sum_{s,t} sum_k |F[s][m][t] p_mk|`, which
/// coincides with `betweenness_rw`.
pub fn betweenness_newman(t: &FundamentalTensor, p: &TransitionMatrix) -> Vec<f64> {
    let n = t.n();
    let unidirectional = (0..n).all(|i| {
        (i..n).all(|j| !(p.prob(i, j) > 0.0 && p.prob(j, i) > 0.0))
    });
    let mut out = vec![0.0; n];
    for tt in 0..n {
        for s in 0..n {
            if s == tt {
                continue;
            }
            let row = t.row(s, tt);
            for m in 0..n {
                if m == tt {
                    continue;
                }
                let f_sm = row[m];
                let p_row = p.matrix().row(m);
                let mut acc = 0.0;
                if unidirectional {
                    for &pk in p_row {
                        acc += (f_sm * pk).abs();
                    }
                } else {
                    for k in 0..n {
                        let outflow = f_sm * p_row[k];
                        let inflow = row[k] * p.prob(k, m);
                        if outflow != 0.0 || inflow != 0.0 {
                            acc += 0.5 * (outflow - inflow).abs();
                        }
                    }
                }
                out[m] += acc;
            }
        }
    }
    out
}

/// `Load(m) = sum_{s,t} Fhat[s][m][t] / (n-1)^2`, always in [0, 1].
pub fn load(nt: &NormalizedTensor) -> Vec<f64> {
    let n = nt.n();
    let denom = ((n - 1) * (n - 1)) as f64;
    nt.sum_over_sources_targets()
        .into_iter()
        .map(|s| s / denom)
        .collect()
}

/// Combined per-node centrality report with rankings (indices sorted by
/// descending score, ties toward the lower index).
#[derive(Clone, Debug)]
pub struct CentralityReport {
    pub closeness_total: Vec<f64>,
    pub closeness_reciprocal: Vec<f64>,
    pub betweenness_rw: Vec<f64>,
    pub betweenness_newman: Vec<f64>,
    pub load: Vec<f64>,
    pub ranking_closeness: Vec<usize>,
    pub ranking_betweenness: Vec<usize>,
    pub ranking_load: Vec<usize>,
}

pub fn centrality_report(
    t: &FundamentalTensor,
    nt: &NormalizedTensor,
    p: &TransitionMatrix,
) -> CentralityReport {
    let cl = closeness(t);
    let b_rw = betweenness_rw(t);
    let b_newman = betweenness_newman(t, p);
    let loads = load(nt);
    CentralityReport {
        ranking_closeness: ranking(&cl.reciprocal),
        ranking_betweenness: ranking(&b_rw),
        ranking_load: ranking(&loads),
        closeness_total: cl.total_hitting,
        closeness_reciprocal: cl.reciprocal,
        betweenness_rw: b_rw,
        betweenness_newman: b_newman,
        load: loads,
    }
}

fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

/// A source/target pair for which a node is an articulation point.
/// `trivial` marks the source-node convention (`m = s`), which is reported
/// but carries no structural information.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArticulationPair {
    pub source: usize,
    pub target: usize,
    pub trivial: bool,
}

#[derive(Clone, Debug)]
pub struct ArticulationRecord {
    pub node: usize,
    pub pairs: Vec<ArticulationPair>,
}

impl ArticulationRecord {
    /// Number of non-trivial pairs broken by removing this node.
    pub fn count(&self) -> usize {
        self.pairs.iter().filter(|p| !p.trivial).count()
    }
}

/// Finds every `(s, m, t)` with `Fhat[s][m][t] >= 1 - eps`, verifies each
/// non-trivial candidate with an exact reachability search on the graph
/// with `m` removed, and groups the verified pairs by `m`.
pub fn articulation_points(
    nt: &NormalizedTensor,
    g: &Graph,
    eps: f64,
) -> Vec<ArticulationRecord> {
    let n = nt.n();
    assert_eq!(g.n(), n, "graph and tensor size mismatch");
    let mut records: Vec<ArticulationRecord> = Vec::new();
    for m in 0..n {
        let mut pairs = Vec::new();
        for s in 0..n {
            for t in 0..n {
                if s == t || m == t {
                    continue;
                }
                if nt.get(s, m, t) < 1.0 - eps {
                    continue;
                }
                if m == s {
                    pairs.push(ArticulationPair {
                        source: s,
                        target: t,
                        trivial: true,
                    });
                } else if !reachable_avoiding(g, s, t, m) {
                    pairs.push(ArticulationPair {
                        source: s,
                        target: t,
                        trivial: false,
                    });
                }
            }
        }
        if !pairs.is_empty() {
            records.push(ArticulationRecord { node: m, pairs });
        }
    }
    records
}

/// Breadth-first reachability of `t` from `s` with `removed` deleted.
fn reachable_avoiding(g: &Graph, s: usize, t: usize, removed: usize) -> bool {
    if s == removed || t == removed {
        return false;
    }
    let n = g.n();
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen[s] = true;
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        if v == t {
            return true;
        }
        for w in g.out_neighbors(v) {
            if w != removed && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}
