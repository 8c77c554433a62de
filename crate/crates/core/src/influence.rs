//! Influence spread under the exogenous-node absorption model and greedy
//! seed selection.
//!
//! The diffusion objective: seeds become absorbing targets alongside the
//! exogenous node `o`, and the spread of a seed set `S` is
//! `|S| + sum_{s not in S} P(walk from s absorbed by S before o)`. Greedy
//! selection "removes" each pick by moving it into the absorbing set, which
//! keeps every walk that matters identical to physical deletion and lets the
//! Schur-complement incremental update carry the per-candidate cost at
//! O(n^2) after the single initial factorization.

use rayon::prelude::*;
use thiserror::Error;

use crate::centrality;
use crate::fundamental::{
    absorption_from_fundamental, extended_fundamental, fundamental_tensor, incremental_fundamental,
    FundamentalError, FundamentalMatrix,
};
use crate::graph::{stationary_distribution, ExtendedGraph, Graph, GraphError, TransitionMatrix};
use crate::rng::SplitMix64;

/// Scores closer than this are treated as ties and broken toward the
/// lowest node index, so symmetric graphs rank deterministically.
pub const TIE_EPS: f64 = 1e-9;

/// PageRank damping factor for the baseline ranker.
pub const PAGERANK_DAMPING: f64 = 0.85;
/// PageRank convergence tolerance (L1 change per iteration).
pub const PAGERANK_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum InfluenceError {
    #[error("seed set must not be empty")]
    EmptySeeds,
    #[error("seed index {0} out of range (the exogenous node cannot be seeded)")]
    InvalidSeed(usize),
    #[error("k = {k} out of range 1..={n}")]
    InvalidK { k: usize, n: usize },
    #[error("unknown ranking method {0:?}")]
    UnknownMethod(String),
    #[error(transparent)]
    Fundamental(#[from] FundamentalError),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
}

/// Greedy selection trace: seeds in pick order, the marginal spread gain of
/// each pick, and the final total spread.
#[derive(Clone, Debug)]
pub struct SeedSelection {
    pub seeds: Vec<usize>,
    pub marginal_gains: Vec<f64>,
    pub spread: f64,
}

/// Expected number of adopters when `seeds` start the cascade:
/// the seeds themselves plus the total absorption probability mass they
/// capture before the exogenous node does.
pub fn spread(ext: &ExtendedGraph, seeds: &[usize]) -> Result<f64, InfluenceError> {
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    validate_seeds(ext, &seeds)?;
    let mut targets = seeds.clone();
    targets.push(ext.o_index());
    let f = crate::fundamental::fundamental_matrix(ext.transition(), &targets)?;
    Ok(spread_from_fundamental(ext, &f))
}

fn validate_seeds(ext: &ExtendedGraph, seeds: &[usize]) -> Result<(), InfluenceError> {
    if seeds.is_empty() {
        return Err(InfluenceError::EmptySeeds);
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s >= ext.o_index()) {
        return Err(InfluenceError::InvalidSeed(bad));
    }
    Ok(())
}

/// Spread evaluated from an already-built fundamental matrix whose target
/// set is `seeds + {o}`.
fn spread_from_fundamental(ext: &ExtendedGraph, f: &FundamentalMatrix) -> f64 {
    let o = ext.o_index();
    let q = absorption_from_fundamental(ext.transition(), f);
    let seed_count = f.targets().len() - 1;
    let mut total = seed_count as f64;
    for (local, &target) in f.targets().iter().enumerate() {
        if target == o {
            continue;
        }
        for row in 0..q.matrix().rows() {
            total += q.matrix().get(row, local);
        }
    }
    total
}

/// Most influential single node: the argmax over `t` of the normalized
/// fundamental column sums of the extended graph, with ties broken toward
/// the lowest index. Equals the argmax of `spread({t})`.
pub fn most_influential(ext: &ExtendedGraph) -> Result<usize, InfluenceError> {
    let f_o = extended_fundamental(ext)?;
    let n = ext.o_index();
    let scores: Vec<f64> = (0..n)
        .map(|t| {
            let f_tt = f_o.expected_visits(t, t).unwrap();
            let mut acc = 0.0;
            for s in 0..n {
                if s == t {
                    acc += 1.0;
                } else {
                    acc += f_o.expected_visits(s, t).unwrap() / f_tt;
                }
            }
            acc
        })
        .collect();
    Ok(argmax_with_ties(&scores))
}

fn argmax_with_ties(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] + TIE_EPS {
            best = i;
        }
    }
    best
}

/// Greedy seed selection: each round evaluates the marginal spread of every
/// remaining candidate through an incremental fundamental-matrix update and
/// picks the best (ties toward the lowest index).
pub fn c2greedy(ext: &ExtendedGraph, k: usize) -> Result<SeedSelection, InfluenceError> {
    let n = ext.o_index();
    if k == 0 || k > n {
        return Err(InfluenceError::InvalidK { k, n });
    }
    let mut current = extended_fundamental(ext)?;
    let mut seeds: Vec<usize> = Vec::with_capacity(k);
    let mut gains: Vec<f64> = Vec::with_capacity(k);
    let mut current_spread = 0.0;
    for _ in 0..k {
        let candidates: Vec<usize> = (0..n).filter(|c| !seeds.contains(c)).collect();
        let scores: Vec<f64> = candidates
            .par_iter()
            .map(|&c| {
                let f_new = incremental_fundamental(&current, &[c])
                    .expect("candidate is transient by construction");
                spread_from_fundamental(ext, &f_new)
            })
            .collect();
        let best = argmax_with_ties(&scores);
        let pick = candidates[best];
        let new_spread = scores[best];
        gains.push(new_spread - current_spread);
        current_spread = new_spread;
        seeds.push(pick);
        current = incremental_fundamental(&current, &[pick])?;
    }
    Ok(SeedSelection {
        seeds,
        marginal_gains: gains,
        spread: current_spread,
    })
}

/// Baseline seed-ranking methods used for comparison experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineMethod {
    /// Highest (in-)degree.
    Degree,
    /// Highest random-walk closeness (reciprocal form).
    Closeness,
    /// Highest PageRank score.
    Pagerank,
    /// Uniformly random distinct nodes (seeded).
    Random,
}

impl std::str::FromStr for BaselineMethod {
    type Err = InfluenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "degree" => Ok(Self::Degree),
            "closeness" => Ok(Self::Closeness),
            "pagerank" => Ok(Self::Pagerank),
            "random" => Ok(Self::Random),
            other => Err(InfluenceError::UnknownMethod(other.to_string())),
        }
    }
}

/// Top-k nodes under a baseline score. Ties break toward the lowest index;
/// the random method draws distinct nodes from the seeded generator.
pub fn baseline_rankers(
    g: &Graph,
    k: usize,
    method: BaselineMethod,
    rng_seed: u64,
) -> Result<Vec<usize>, InfluenceError> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(InfluenceError::InvalidK { k, n });
    }
    let scores: Vec<f64> = match method {
        BaselineMethod::Degree => (0..n)
            .map(|j| (0..n).map(|i| g.adjacency().get(i, j)).sum())
            .collect(),
        BaselineMethod::Closeness => {
            let p = TransitionMatrix::from_graph(g)?;
            let pi = stationary_distribution(&p)?;
            let t = fundamental_tensor(&p, &pi)?;
            centrality::closeness(&t).reciprocal
        }
        BaselineMethod::Pagerank => pagerank(g, PAGERANK_DAMPING, PAGERANK_TOL),
        BaselineMethod::Random => {
            let mut rng = SplitMix64::stream(rng_seed, 0);
            let mut order: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut order);
            order.truncate(k);
            return Ok(order);
        }
    };
    Ok(top_k_with_ties(&scores, k))
}

fn top_k_with_ties(scores: &[f64], k: usize) -> Vec<usize> {
    let mut picked = vec![false; scores.len()];
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<usize> = None;
        for (i, &s) in scores.iter().enumerate() {
            if picked[i] {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(b) if s > scores[b] + TIE_EPS => best = Some(i),
                _ => {}
            }
        }
        let b = best.expect("k <= n");
        picked[b] = true;
        out.push(b);
    }
    out
}

/// Standard PageRank with uniform teleport and uniform dangling-mass
/// redistribution.
pub fn pagerank(g: &Graph, damping: f64, tol: f64) -> Vec<f64> {
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    let degrees: Vec<f64> = (0..n).map(|i| g.out_degree(i)).collect();
    let uniform = 1.0 / n as f64;
    let mut pr = vec![uniform; n];
    let mut next = vec![0.0; n];
    for _ in 0..10_000 {
        let mut dangling = 0.0;
        next.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            if degrees[i] <= 0.0 {
                dangling += pr[i];
                continue;
            }
            let scale = pr[i] / degrees[i];
            if scale == 0.0 {
                continue;
            }
            for (v, &a) in next.iter_mut().zip(g.adjacency().row(i)) {
                *v += scale * a;
            }
        }
        let base = (1.0 - damping) * uniform + damping * dangling * uniform;
        let mut delta = 0.0;
        for (v, old) in next.iter_mut().zip(&pr) {
            *v = damping * *v + base;
            delta += (*v - old).abs();
        }
        std::mem::swap(&mut pr, &mut next);
        if delta <= tol {
            break;
        }
    }
    pr
}

/// Column sums of the normalized extended fundamental matrix; the score
/// whose argmax `most_influential` returns. Exposed for experiment output.
pub fn influence_scores(ext: &ExtendedGraph) -> Result<Vec<f64>, InfluenceError> {
    let f_o = extended_fundamental(ext)?;
    let n = ext.o_index();
    Ok((0..n)
        .map(|t| {
            let f_tt = f_o.expected_visits(t, t).unwrap();
            (0..n)
                .map(|s| {
                    if s == t {
                        1.0
                    } else {
                        f_o.expected_visits(s, t).unwrap() / f_tt
                    }
                })
                .sum()
        })
        .collect())
}

/// Per-node adoption probabilities for a fixed seed set: the chance a walk
/// from each node is absorbed by the seeds before the exogenous node.
pub fn adoption_probabilities(
    ext: &ExtendedGraph,
    seeds: &[usize],
) -> Result<Vec<f64>, InfluenceError> {
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    validate_seeds(ext, &seeds)?;
    let mut targets = seeds.clone();
    targets.push(ext.o_index());
    let q = crate::fundamental::absorption_probabilities(ext.transition(), &targets)?;
    let n = ext.o_index();
    Ok((0..n)
        .map(|s| {
            if seeds.binary_search(&s).is_ok() {
                1.0
            } else {
                seeds.iter().map(|&j| q.prob(s, j).unwrap()).sum()
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(n: usize) -> Graph {
        let edges: Vec<(usize, usize, f64)> = (1..n).map(|i| (0, i, 1.0)).collect();
        Graph::from_edges(n, &edges, false).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Graph::from_edges(n, &edges, true).unwrap()
    }

    fn extended(g: Graph) -> ExtendedGraph {
        ExtendedGraph::new(g, 1.0).unwrap()
    }

    #[test]
    fn spread_of_everything_is_n() {
        let ext = extended(star(5));
        let s = spread(&ext, &[0, 1, 2, 3, 4]).unwrap();
        assert!((s - 5.0).abs() < 1e-12);
    }

    #[test]
    fn star_center_spreads_more_than_leaf() {
        let ext = extended(star(5));
        let center = spread(&ext, &[0]).unwrap();
        let leaf = spread(&ext, &[1]).unwrap();
        assert!(center > leaf + 0.1, "center {center} vs leaf {leaf}");
    }

    #[test]
    fn disconnected_cliques_spread_adds_up() {
        // Two disjoint triangles.
        let g = Graph::from_edges(
            6,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
            ],
            false,
        )
        .unwrap();
        let ext = extended(g);
        let both = spread(&ext, &[0, 3]).unwrap();
        let first = spread(&ext, &[0]).unwrap();
        let second = spread(&ext, &[3]).unwrap();
        assert!((both - first - second).abs() < 1e-9);
    }

    #[test]
    fn spread_rejects_exogenous_seed() {
        let ext = extended(star(4));
        assert!(matches!(
            spread(&ext, &[ext.o_index()]),
            Err(InfluenceError::InvalidSeed(_))
        ));
    }

    #[test]
    fn most_influential_star_is_center() {
        let ext = extended(star(5));
        assert_eq!(most_influential(&ext).unwrap(), 0);
    }

    #[test]
    fn most_influential_cycle_tie_breaks_to_zero() {
        let ext = extended(cycle(5));
        assert_eq!(most_influential(&ext).unwrap(), 0);
    }

    #[test]
    fn most_influential_matches_spread_argmax() {
        // Barbell: two triangles joined through a bridge node.
        let g = Graph::from_edges(
            7,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (2, 3, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (5, 6, 1.0),
                (4, 6, 1.0),
            ],
            false,
        )
        .unwrap();
        let ext = extended(g);
        let via_scores = most_influential(&ext).unwrap();
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for t in 0..ext.o_index() {
            let s = spread(&ext, &[t]).unwrap();
            if s > best_val + TIE_EPS {
                best = t;
                best_val = s;
            }
        }
        assert_eq!(via_scores, best);
        // The score route and the absorption route agree in value too.
        let scores = influence_scores(&ext).unwrap();
        for t in 0..ext.o_index() {
            let s = spread(&ext, &[t]).unwrap();
            assert!((scores[t] - s).abs() < 1e-9, "node {t}: {} vs {}", scores[t], s);
        }
    }

    #[test]
    fn greedy_k1_equals_most_influential() {
        let ext = extended(star(6));
        let sel = c2greedy(&ext, 1).unwrap();
        assert_eq!(sel.seeds, vec![most_influential(&ext).unwrap()]);
        assert_eq!(sel.marginal_gains.len(), 1);
        assert!((sel.marginal_gains[0] - sel.spread).abs() < 1e-12);
    }

    #[test]
    fn greedy_k_equals_n_takes_everyone() {
        let ext = extended(cycle(4));
        let sel = c2greedy(&ext, 4).unwrap();
        assert_eq!(sel.seeds.len(), 4);
        assert!((sel.spread - 4.0).abs() < 1e-9);
    }

    #[test]
    fn greedy_twin_stars_picks_both_centers() {
        // Two stars weakly joined leaf-to-leaf.
        let g = Graph::from_edges(
            8,
            &[
                (0, 1, 1.0),
                (0, 2, 1.0),
                (0, 3, 1.0),
                (4, 5, 1.0),
                (4, 6, 1.0),
                (4, 7, 1.0),
                (3, 7, 0.1),
            ],
            false,
        )
        .unwrap();
        let ext = extended(g);
        let sel = c2greedy(&ext, 2).unwrap();
        let mut picks = sel.seeds.clone();
        picks.sort_unstable();
        assert_eq!(picks, vec![0, 4]);
    }

    #[test]
    fn greedy_gains_diminish_and_spread_is_monotone() {
        let g = Graph::from_edges(
            6,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 3, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (5, 0, 1.0),
                (0, 3, 1.0),
            ],
            false,
        )
        .unwrap();
        let ext = extended(g);
        let sel = c2greedy(&ext, 4).unwrap();
        for w in sel.marginal_gains.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "gains increased: {:?}", sel.marginal_gains);
        }
        assert!(sel.marginal_gains.iter().all(|&g| g >= -1e-9));
    }

    #[test]
    fn spread_is_monotone_in_the_seed_set() {
        let g = Graph::from_edges(
            5,
            &[
                (0, 1, 1.0),
                (1, 2, 2.0),
                (2, 3, 1.0),
                (3, 4, 1.0),
                (4, 0, 2.0),
                (1, 3, 1.0),
            ],
            true,
        )
        .unwrap();
        let ext = extended(g);
        for base in [vec![0], vec![1, 3]] {
            let s0 = spread(&ext, &base).unwrap();
            for t in 0..5 {
                if base.contains(&t) {
                    continue;
                }
                let mut bigger = base.clone();
                bigger.push(t);
                let s1 = spread(&ext, &bigger).unwrap();
                assert!(s1 + 1e-12 >= s0, "adding {t} to {base:?} shrank spread");
            }
        }
    }

    #[test]
    fn baseline_degree_star_picks_center() {
        let g = star(5);
        assert_eq!(
            baseline_rankers(&g, 1, BaselineMethod::Degree, 0).unwrap(),
            vec![0]
        );
    }

    #[test]
    fn baseline_cycle_ties_break_to_zero() {
        let g = Graph::from_edges(
            5,
            &(0..5).map(|i| (i, (i + 1) % 5, 1.0)).collect::<Vec<_>>(),
            false,
        )
        .unwrap();
        for method in [
            BaselineMethod::Degree,
            BaselineMethod::Closeness,
            BaselineMethod::Pagerank,
        ] {
            assert_eq!(
                baseline_rankers(&g, 1, method, 0).unwrap(),
                vec![0],
                "method {method:?}"
            );
        }
    }

    #[test]
    fn baseline_random_is_reproducible() {
        let g = star(8);
        let a = baseline_rankers(&g, 3, BaselineMethod::Random, 1234).unwrap();
        let b = baseline_rankers(&g, 3, BaselineMethod::Random, 1234).unwrap();
        assert_eq!(a, b);
        let c = baseline_rankers(&g, 3, BaselineMethod::Random, 99).unwrap();
        assert_eq!(c.len(), 3);
        let mut dedup = c.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), 3);
    }

    #[test]
    fn pagerank_sums_to_one_and_favors_hubs() {
        let g = star(6);
        let pr = pagerank(&g, PAGERANK_DAMPING, PAGERANK_TOL);
        assert!((pr.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for leaf in 1..6 {
            assert!(pr[0] > pr[leaf]);
        }
    }

    #[test]
    fn adoption_probabilities_bounded_and_seeded_at_one() {
        let ext = extended(star(5));
        let probs = adoption_probabilities(&ext, &[0]).unwrap();
        assert_eq!(probs[0], 1.0);
        for &p in &probs[1..] {
            assert!((0.0..=1.0).contains(&p));
            assert!(p > 0.0);
        }
    }
}
