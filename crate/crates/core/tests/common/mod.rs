//! Shared test support: deterministic graph generators and brute-force
//! reference oracles.
//!
//! The oracles deliberately avoid every library code path they certify:
//! reachability is plain breadth-first search, fundamental matrices come
//! from a local Gauss-Jordan elimination, and influence spread is solved
//! from the absorption linear system directly.

#![allow(dead_code)]

use mtensor::graph::{ExtendedGraph, Graph, TransitionMatrix};

// ---------------------------------------------------------------------------
// Deterministic RNG (kept local so oracles share nothing with the library).

pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_add(0x1234_5678_9abc_def0))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_f64() * bound as f64) as usize % bound
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }
}

// ---------------------------------------------------------------------------
// Graph generators.

/// Random strongly connected digraph: a random permutation cycle plus
/// `extra` random edges. Weighted variants draw weights from [0.5, 2].
pub fn random_strongly_connected(
    n: usize,
    extra: usize,
    weighted: bool,
    rng: &mut TestRng,
) -> Graph {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i + 1);
        perm.swap(i, j);
    }
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut present = std::collections::HashSet::new();
    let w = |rng: &mut TestRng| if weighted { rng.range(0.5, 2.0) } else { 1.0 };
    for i in 0..n {
        let (a, b) = (perm[i], perm[(i + 1) % n]);
        present.insert((a, b));
        edges.push((a, b, w(rng)));
    }
    let mut attempts = 0;
    let mut added = 0;
    while added < extra && attempts < extra * 20 {
        attempts += 1;
        let a = rng.below(n);
        let b = rng.below(n);
        if a == b || present.contains(&(a, b)) {
            continue;
        }
        present.insert((a, b));
        edges.push((a, b, w(rng)));
        added += 1;
    }
    Graph::from_edges(n, &edges, true).unwrap()
}

/// Random connected undirected graph: a random spanning tree plus `extra`
/// random edges.
pub fn random_undirected_connected(
    n: usize,
    extra: usize,
    weighted: bool,
    rng: &mut TestRng,
) -> Graph {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut present = std::collections::HashSet::new();
    let w = |rng: &mut TestRng| if weighted { rng.range(0.5, 2.0) } else { 1.0 };
    for v in 1..n {
        let parent = rng.below(v);
        present.insert((parent.min(v), parent.max(v)));
        edges.push((parent, v, w(rng)));
    }
    let mut attempts = 0;
    let mut added = 0;
    while added < extra && attempts < extra * 20 {
        attempts += 1;
        let a = rng.below(n);
        let b = rng.below(n);
        if a == b || present.contains(&(a.min(b), a.max(b))) {
            continue;
        }
        present.insert((a.min(b), a.max(b)));
        edges.push((a, b, w(rng)));
        added += 1;
    }
    Graph::from_edges(n, &edges, false).unwrap()
}

/// Strongly connected preferential-attachment digraph: each new node sends
/// `m` edges to existing nodes drawn proportionally to degree (plus one),
/// and receives one edge back. Degree distributions come out skewed, like
/// the social networks the influence experiments model.
pub fn preferential_attachment_sc(n: usize, m: usize, weighted: bool, rng: &mut TestRng) -> Graph {
    assert!(n >= 3);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut present = std::collections::HashSet::new();
    let mut degree = vec![0usize; n];
    let mut push = |a: usize, b: usize, w: f64| -> bool {
        if a != b && present.insert((a, b)) {
            edges.push((a, b, w));
            return true;
        }
        false
    };
    let draw = |rng: &mut TestRng, weighted: bool| {
        if weighted {
            rng.range(0.5, 2.0)
        } else {
            1.0
        }
    };
    for i in 0..3 {
        let w = draw(rng, weighted);
        if push(i, (i + 1) % 3, w) {
            degree[i] += 1;
            degree[(i + 1) % 3] += 1;
        }
    }
    for v in 3..n {
        let mut picked = 0;
        let mut guard = 0;
        while picked < m && guard < 50 * m {
            guard += 1;
            // Degree-proportional sampling over existing nodes.
            let total: usize = degree[..v].iter().map(|d| d + 1).sum();
            let mut ticket = rng.below(total);
            let mut chosen = v - 1;
            for (u, d) in degree[..v].iter().enumerate() {
                let share = d + 1;
                if ticket < share {
                    chosen = u;
                    break;
                }
                ticket -= share;
            }
            let w = draw(rng, weighted);
            if push(v, chosen, w) {
                degree[v] += 1;
                degree[chosen] += 1;
                picked += 1;
            }
        }
        // One edge back keeps the graph strongly connected.
        let back = rng.below(v);
        let w = draw(rng, weighted);
        if push(back, v, w) {
            degree[back] += 1;
            degree[v] += 1;
        }
    }
    Graph::from_edges(n, &edges, true).unwrap()
}

/// Random digraph with i.i.d. edges; not necessarily connected.
pub fn random_digraph(n: usize, edge_prob: f64, rng: &mut TestRng) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.next_f64() < edge_prob {
                edges.push((i, j, 1.0));
            }
        }
    }
    Graph::from_edges(n, &edges, true).unwrap()
}

/// Random nonnegative cost matrix over the existing edges.
pub fn random_costs(g: &Graph, rng: &mut TestRng) -> mtensor::DenseMatrix {
    let n = g.n();
    let mut w = mtensor::DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if g.adjacency().get(i, j) > 0.0 {
                let c = rng.range(0.1, 5.0);
                w.set(i, j, c);
            }
        }
    }
    if !g.directed() {
        // Symmetrize for undirected graphs.
        for i in 0..n {
            for j in i + 1..n {
                let c = w.get(i, j);
                if c > 0.0 {
                    w.set(j, i, c);
                }
            }
        }
    }
    w
}

pub fn star(n: usize) -> Graph {
    let edges: Vec<(usize, usize, f64)> = (1..n).map(|i| (0, i, 1.0)).collect();
    Graph::from_edges(n, &edges, false).unwrap()
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    Graph::from_edges(n, &edges, false).unwrap()
}

pub fn cycle(n: usize, directed: bool) -> Graph {
    let edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
    Graph::from_edges(n, &edges, directed).unwrap()
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j, 1.0));
        }
    }
    Graph::from_edges(n, &edges, false).unwrap()
}

pub fn grid(rows: usize, cols: usize) -> Graph {
    let at = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((at(r, c), at(r, c + 1), 1.0));
            }
            if r + 1 < rows {
                edges.push((at(r, c), at(r + 1, c), 1.0));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges, false).unwrap()
}

/// Binary tree on nodes 0..n with node i parented at (i-1)/2.
pub fn binary_tree(n: usize) -> Graph {
    let edges: Vec<(usize, usize, f64)> = (1..n).map(|i| ((i - 1) / 2, i, 1.0)).collect();
    Graph::from_edges(n, &edges, false).unwrap()
}

// ---------------------------------------------------------------------------
// Brute-force oracles.

/// Breadth-first reachability of `t` from `s` after deleting `removed`.
pub fn bfs_reachable(g: &Graph, s: usize, t: usize, removed: &[usize]) -> bool {
    if removed.contains(&s) || removed.contains(&t) {
        return false;
    }
    let n = g.n();
    let mut blocked = vec![false; n];
    for &r in removed {
        blocked[r] = true;
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen[s] = true;
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        if v == t {
            return true;
        }
        for (w, &a) in g.adjacency().row(v).iter().enumerate() {
            if a > 0.0 && !blocked[w] && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

/// Gauss-Jordan inversion with partial pivoting; the oracle's own dense
/// kernel, sharing nothing with the library's LU path.
fn gauss_jordan_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut work: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| work[i][col].abs().total_cmp(&work[j][col].abs()))
            .unwrap();
        assert!(
            work[pivot_row][col].abs() > 1e-12,
            "oracle: singular system"
        );
        work.swap(col, pivot_row);
        let pivot = work[col][col];
        for v in work[col].iter_mut() {
            *v /= pivot;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = work[row][col];
            if factor == 0.0 {
                continue;
            }
            let (piv, cur) = if row < col {
                let (head, tail) = work.split_at_mut(col);
                (&tail[0], &mut head[row])
            } else {
                let (head, tail) = work.split_at_mut(row);
                (&head[col], &mut tail[0])
            };
            for (c, p) in cur.iter_mut().zip(piv.iter()) {
                *c -= factor * p;
            }
        }
    }
    work.into_iter().map(|row| row[n..].to_vec()).collect()
}

/// Direct per-target fundamental matrix `(I - P_TT)^{-1}` over transient
/// nodes in ascending order.
pub fn per_target_fundamental(p: &TransitionMatrix, target: usize) -> Vec<Vec<f64>> {
    let n = p.n();
    let transient: Vec<usize> = (0..n).filter(|&i| i != target).collect();
    let m: Vec<Vec<f64>> = transient
        .iter()
        .map(|&gi| {
            transient
                .iter()
                .map(|&gj| if gi == gj { 1.0 } else { 0.0 } - p.prob(gi, gj))
                .collect()
        })
        .collect();
    gauss_jordan_inverse(&m)
}

/// Influence spread solved from the absorption system directly:
/// `(I - P_TT) q = P_TS 1`, spread = |S| + sum q.
pub fn oracle_spread(ext: &ExtendedGraph, seeds: &[usize]) -> f64 {
    let p = ext.transition();
    let n_ext = p.n();
    let mut absorbing = vec![false; n_ext];
    for &s in seeds {
        absorbing[s] = true;
    }
    absorbing[ext.o_index()] = true;
    let transient: Vec<usize> = (0..n_ext).filter(|&i| !absorbing[i]).collect();
    if transient.is_empty() {
        return seeds.len() as f64;
    }
    let k = transient.len();
    let m: Vec<Vec<f64>> = transient
        .iter()
        .map(|&gi| {
            transient
                .iter()
                .map(|&gj| if gi == gj { 1.0 } else { 0.0 } - p.prob(gi, gj))
                .collect()
        })
        .collect();
    let rhs: Vec<f64> = transient
        .iter()
        .map(|&gi| seeds.iter().map(|&s| p.prob(gi, s)).sum())
        .collect();
    let inv = gauss_jordan_inverse(&m);
    let mut total = seeds.len() as f64;
    for i in 0..k {
        let q: f64 = (0..k).map(|j| inv[i][j] * rhs[j]).sum();
        total += q;
    }
    total
}

/// Exhaustive search for the best k-subset by spread. Sizes are guarded so
/// the enumeration stays at toy scale.
pub fn best_subset_spread(ext: &ExtendedGraph, k: usize) -> (Vec<usize>, f64) {
    let n = ext.o_index();
    let mut count = 0usize;
    let mut best: (Vec<usize>, f64) = (Vec::new(), f64::NEG_INFINITY);
    let mut subset = Vec::with_capacity(k);
    fn recurse(
        ext: &ExtendedGraph,
        n: usize,
        k: usize,
        start: usize,
        subset: &mut Vec<usize>,
        best: &mut (Vec<usize>, f64),
        count: &mut usize,
    ) {
        if subset.len() == k {
            *count += 1;
            assert!(*count <= 10_000, "subset enumeration guard tripped");
            let s = oracle_spread(ext, subset);
            if s > best.1 + 1e-12 {
                *best = (subset.clone(), s);
            }
            return;
        }
        for v in start..n {
            subset.push(v);
            recurse(ext, n, k, v + 1, subset, best, count);
            subset.pop();
        }
    }
    recurse(ext, n, k, 0, &mut subset, &mut best, &mut count);
    best
}

/// All articulation triples `(s, m, t)` with `m` not in `{s, t}`: removing
/// `m` destroys an existing `s -> t` reachability.
pub fn articulation_triples(g: &Graph) -> std::collections::BTreeSet<(usize, usize, usize)> {
    let n = g.n();
    let mut out = std::collections::BTreeSet::new();
    for m in 0..n {
        for s in 0..n {
            if s == m {
                continue;
            }
            for t in 0..n {
                if t == m || t == s {
                    continue;
                }
                if bfs_reachable(g, s, t, &[]) && !bfs_reachable(g, s, t, &[m]) {
                    out.insert((s, m, t));
                }
            }
        }
    }
    out
}
