//! Graph ingestion, validation, transition-matrix construction, stationary
//! distribution, connectivity classification, and extended-graph
//! construction.
//!
//! Conventions used throughout the crate:
//!
//! * Node order is first-seen order in the input, which makes every output
//!   deterministic across runs.
//! * The edge count `|E|` is the number of *directed edge slots*, i.e. the
//!   count of nonzero adjacency entries. An undirected edge occupies two
//!   slots. This is the convention that makes the effective-resistance
//!   identity `Omega_st = C_st / |E|` and all Kirchhoff-index routes agree.
//! * Duplicate edges in an edge list merge by weight summation and are
//!   reported as warnings rather than rejected; real edge lists contain
//!   duplicates.

use std::collections::HashMap;

use thiserror::Error;

use crate::linalg::DenseMatrix;

/// Row sums of a transition matrix must stay within this distance of 1.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Residual tolerance for the stationary distribution: `||pi' P - pi'||_inf`.
pub const STATIONARY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: weight must be positive, got {value}")]
    NonPositiveWeight { line: usize, value: f64 },
    #[error("line {line}: cost must be nonnegative, got {value}")]
    NegativeCost { line: usize, value: f64 },
    #[error("node {id:?} has zero out-degree; extend the graph with an exogenous node or fix the input")]
    ZeroOutDegree { id: String },
    #[error("graph is not strongly connected; use target-set metrics (fundamental matrices for explicit target sets) instead")]
    NotStronglyConnected,
    #[error("exogenous weight beta must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("adjacency of an undirected graph must be symmetric (entry ({0}, {1}))")]
    AsymmetricUndirected(usize, usize),
    #[error("negative adjacency entry at ({0}, {1})")]
    NegativeWeight(usize, usize),
    #[error("unknown node id {0:?}")]
    UnknownNode(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] crate::linalg::LinalgError),
}

/// Node-indexed weighted digraph with a string-id to dense-index bijection.
#[derive(Clone, Debug)]
pub struct Graph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: DenseMatrix,
    cost: Option<DenseMatrix>,
    directed: bool,
}

/// A parsed graph together with the non-fatal warnings collected while
/// reading it (duplicate edges, ignored weight columns, ...).
#[derive(Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub warnings: Vec<String>,
}

impl Graph {
    /// Parses whitespace-separated edge-list text. Each non-comment line is
    /// `src dst [weight [cost]]`; `#` starts a comment. With
    /// `weighted = false` any weight/cost columns are ignored and every edge
    /// has weight 1.
    pub fn parse_edge_list(
        text: &str,
        directed: bool,
        weighted: bool,
    ) -> Result<LoadedGraph, GraphError> {
        struct Slot {
            weight: f64,
            cost: Option<f64>,
        }
        let mut ids: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut slots: HashMap<(usize, usize), Slot> = HashMap::new();
        let mut order: Vec<(usize, usize)> = Vec::new();
        let mut warnings = Vec::new();
        let mut warned_unweighted = false;

        let intern = |name: &str, ids: &mut Vec<String>, index: &mut HashMap<String, usize>| {
            *index.entry(name.to_string()).or_insert_with(|| {
                ids.push(name.to_string());
                ids.len() - 1
            })
        };

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("");
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if fields.len() < 2 || fields.len() > 4 {
                return Err(GraphError::Parse {
                    line,
                    message: format!(
                        "expected `src dst [weight [cost]]`, found {} fields",
                        fields.len()
                    ),
                });
            }
            let src = intern(fields[0], &mut ids, &mut index);
            let dst = intern(fields[1], &mut ids, &mut index);
            let mut weight = 1.0;
            let mut cost = None;
            if fields.len() >= 3 {
                if weighted {
                    weight = fields[2].parse::<f64>().map_err(|_| GraphError::Parse {
                        line,
                        message: format!("invalid weight {:?}", fields[2]),
                    })?;
                    if !weight.is_finite() || weight <= 0.0 {
                        return Err(GraphError::NonPositiveWeight {
                            line,
                            value: weight,
                        });
                    }
                } else if !warned_unweighted {
                    warnings.push(format!(
                        "line {line}: weight column ignored (input loaded as unweighted)"
                    ));
                    warned_unweighted = true;
                }
            }
            if fields.len() == 4 && weighted {
                let c = fields[3].parse::<f64>().map_err(|_| GraphError::Parse {
                    line,
                    message: format!("invalid cost {:?}", fields[3]),
                })?;
                if !c.is_finite() || c < 0.0 {
                    return Err(GraphError::NegativeCost { line, value: c });
                }
                cost = Some(c);
            }

            let mut insert = |s: usize, d: usize| {
                match slots.get_mut(&(s, d)) {
                    Some(slot) => {
                        slot.weight += weight;
                        if cost.is_some() {
                            slot.cost = cost;
                        }
                        true
                    }
                    None => {
                        slots.insert((s, d), Slot { weight, cost });
                        order.push((s, d));
                        false
                    }
                }
            };
            let dup = insert(src, dst);
            if dup {
                warnings.push(format!(
                    "line {line}: duplicate edge {} -> {}; weights summed",
                    fields[0], fields[1]
                ));
            }
            if !directed && src != dst {
                insert(dst, src);
            }
        }

        let n = ids.len();
        let mut adjacency = DenseMatrix::zeros(n, n);
        let mut cost_matrix = DenseMatrix::zeros(n, n);
        let mut any_cost = false;
        for &(s, d) in &order {
            let slot = &slots[&(s, d)];
            adjacency.set(s, d, slot.weight);
            if let Some(c) = slot.cost {
                cost_matrix.set(s, d, c);
                any_cost = true;
            }
        }
        let graph = Graph {
            ids,
            index,
            adjacency,
            cost: if any_cost { Some(cost_matrix) } else { None },
            directed,
        };
        Ok(LoadedGraph { graph, warnings })
    }

    /// Builds a graph from an explicit adjacency matrix.
    pub fn from_adjacency(
        ids: Vec<String>,
        adjacency: DenseMatrix,
        directed: bool,
    ) -> Result<Self, GraphError> {
        let n = ids.len();
        assert_eq!(adjacency.rows(), n, "adjacency size mismatch");
        assert_eq!(adjacency.cols(), n, "adjacency size mismatch");
        for i in 0..n {
            for j in 0..n {
                let a = adjacency.get(i, j);
                if a < 0.0 {
                    return Err(GraphError::NegativeWeight(i, j));
                }
                if !directed && a != adjacency.get(j, i) {
                    return Err(GraphError::AsymmetricUndirected(i, j));
                }
            }
        }
        let index = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        Ok(Self {
            ids,
            index,
            adjacency,
            cost: None,
            directed,
        })
    }

    /// Convenience constructor over integer node ids `0..n`.
    /// Undirected graphs mirror each listed edge.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize, f64)],
        directed: bool,
    ) -> Result<Self, GraphError> {
        let ids = (0..n).map(|i| i.to_string()).collect();
        let mut adjacency = DenseMatrix::zeros(n, n);
        for &(s, d, w) in edges {
            adjacency.set(s, d, adjacency.get(s, d) + w);
            if !directed && s != d {
                adjacency.set(d, s, adjacency.get(d, s) + w);
            }
        }
        Self::from_adjacency(ids, adjacency, directed)
    }

    /// Attaches a cost matrix; costs must be nonnegative and, for undirected
    /// graphs, symmetric.
    pub fn with_costs(mut self, cost: DenseMatrix) -> Result<Self, GraphError> {
        assert_eq!(cost.rows(), self.n(), "cost matrix size mismatch");
        assert_eq!(cost.cols(), self.n(), "cost matrix size mismatch");
        for i in 0..self.n() {
            for j in 0..self.n() {
                if cost.get(i, j) < 0.0 {
                    return Err(GraphError::NegativeCost {
                        line: 0,
                        value: cost.get(i, j),
                    });
                }
                if !self.directed && cost.get(i, j) != cost.get(j, i) {
                    return Err(GraphError::AsymmetricUndirected(i, j));
                }
            }
        }
        self.cost = Some(cost);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require_index(&self, id: &str) -> Result<usize, GraphError> {
        self.index_of(id)
            .ok_or_else(|| GraphError::UnknownNode(id.to_string()))
    }

    pub fn adjacency(&self) -> &DenseMatrix {
        &self.adjacency
    }

    pub fn cost(&self) -> Option<&DenseMatrix> {
        self.cost.as_ref()
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn out_degree(&self, i: usize) -> f64 {
        self.adjacency.row(i).iter().sum()
    }

    pub fn out_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency
            .row(i)
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(j, _)| j)
    }

    /// Number of directed edge slots (nonzero adjacency entries). An
    /// undirected edge counts twice.
    pub fn edge_count(&self) -> usize {
        self.adjacency.data().iter().filter(|&&w| w > 0.0).count()
    }

    /// Serializes back to edge-list text. Undirected graphs emit each edge
    /// once (lower index first). Edges are ordered so that reparsing
    /// reproduces the node order (for graphs that came from an edge list,
    /// every node is first mentioned together with its predecessor or
    /// successor in first-seen order), hence reloading yields an identical
    /// adjacency matrix.
    pub fn to_edge_list(&self) -> String {
        let mut slots: Vec<(usize, usize)> = Vec::new();
        for i in 0..self.n() {
            for j in 0..self.n() {
                if self.adjacency.get(i, j) == 0.0 {
                    continue;
                }
                if !self.directed && j < i {
                    continue;
                }
                slots.push((i, j));
            }
        }
        // Emit greedily so the first mention of each node happens in index
        // order: flush edges inside the introduced prefix, then introduce
        // the next node through a slot that mentions it correctly.
        let mut used = vec![false; slots.len()];
        let mut ordered: Vec<(usize, usize)> = Vec::with_capacity(slots.len());
        let mut seen = 0usize;
        let find = |used: &[bool], pred: &dyn Fn(usize, usize) -> bool| {
            (0..slots.len()).find(|&k| !used[k] && pred(slots[k].0, slots[k].1))
        };
        while ordered.len() < slots.len() {
            let mut flushed = true;
            while flushed {
                flushed = false;
                if let Some(k) = find(&used, &|i, j| i < seen && j < seen) {
                    used[k] = true;
                    ordered.push(slots[k]);
                    flushed = true;
                }
            }
            if ordered.len() == slots.len() {
                break;
            }
            let s = seen;
            let k = find(&used, &|i, j| (i == s && j < s) || (j == s && i < s))
                .or_else(|| find(&used, &|i, j| i == s && j == s))
                .or_else(|| find(&used, &|i, j| i == s && j == s + 1))
                .or_else(|| find(&used, &|_, _| true))
                .expect("slot available");
            used[k] = true;
            let (i, j) = slots[k];
            ordered.push((i, j));
            seen = seen.max(i.max(j) + 1);
        }
        let mut out = String::new();
        for (i, j) in ordered {
            let w = self.adjacency.get(i, j);
            out.push_str(self.id(i));
            out.push(' ');
            out.push_str(self.id(j));
            match self.cost.as_ref().map(|c| c.get(i, j)) {
                Some(c) if c > 0.0 => {
                    out.push_str(&format!(" {} {}", w, c));
                }
                _ => out.push_str(&format!(" {}", w)),
            }
            out.push('\n');
        }
        out
    }

    /// Strongly connected components in first-seen order (iterative Tarjan).
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        tarjan_scc(self.n(), |i| self.out_neighbors(i))
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.n() > 0 && self.strongly_connected_components().len() == 1
    }

    /// Recurrent equivalence classes: SCCs with no outgoing edge to another
    /// component.
    pub fn recurrent_classes(&self) -> Vec<Vec<usize>> {
        recurrent_classes_of(self.n(), self.adjacency())
    }
}

/// Recurrent classes derived from an arbitrary nonnegative weight pattern.
pub(crate) fn recurrent_classes_of(n: usize, pattern: &DenseMatrix) -> Vec<Vec<usize>> {
    let sccs = tarjan_scc(n, |i| {
        pattern
            .row(i)
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(j, _)| j)
    });
    let mut comp_of = vec![0usize; n];
    for (c, members) in sccs.iter().enumerate() {
        for &m in members {
            comp_of[m] = c;
        }
    }
    sccs.iter()
        .enumerate()
        .filter(|(c, members)| {
            members.iter().all(|&m| {
                pattern
                    .row(m)
                    .iter()
                    .enumerate()
                    .all(|(j, &w)| w == 0.0 || comp_of[j] == *c)
            })
        })
        .map(|(_, members)| {
            let mut sorted = members.clone();
            sorted.sort_unstable();
            sorted
        })
        .collect()
}

fn tarjan_scc<I, F>(n: usize, neighbors: F) -> Vec<Vec<usize>>
where
    I: Iterator<Item = usize>,
    F: Fn(usize) -> I,
{
    #[derive(Clone)]
    struct NodeState {
        index: usize,
        lowlink: usize,
        on_stack: bool,
        visited: bool,
    }
    let mut state = vec![
        NodeState {
            index: 0,
            lowlink: 0,
            on_stack: false,
            visited: false
        };
        n
    ];
    let mut next_index = 0usize;
    let mut stack: Vec<usize> = Vec::new();
    let mut components: Vec<Vec<usize>> = Vec::new();

    for root in 0..n {
        if state[root].visited {
            continue;
        }
        // Explicit DFS stack of (node, saved neighbor iterator position).
        let mut call_stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        let ns: Vec<usize> = neighbors(root).collect();
        state[root].visited = true;
        state[root].index = next_index;
        state[root].lowlink = next_index;
        next_index += 1;
        stack.push(root);
        state[root].on_stack = true;
        call_stack.push((root, ns, 0));

        while let Some((v, ns, mut i)) = call_stack.pop() {
            let mut descended = false;
            while i < ns.len() {
                let w = ns[i];
                i += 1;
                if !state[w].visited {
                    call_stack.push((v, ns, i));
                    state[w].visited = true;
                    state[w].index = next_index;
                    state[w].lowlink = next_index;
                    next_index += 1;
                    stack.push(w);
                    state[w].on_stack = true;
                    let wns: Vec<usize> = neighbors(w).collect();
                    call_stack.push((w, wns, 0));
                    descended = true;
                    break;
                } else if state[w].on_stack {
                    state[v].lowlink = state[v].lowlink.min(state[w].index);
                }
            }
            if descended {
                continue;
            }
            if state[v].lowlink == state[v].index {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    state[w].on_stack = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                components.push(component);
            }
            if let Some((parent, _, _)) = call_stack.last() {
                let p = *parent;
                state[p].lowlink = state[p].lowlink.min(state[v].lowlink);
            }
        }
    }
    components
}

/// Row-stochastic transition matrix `P = D^{-1} A` with degree and optional
/// stationary metadata. Immutable after construction.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    p: DenseMatrix,
    degrees: Vec<f64>,
    stationary: Option<Vec<f64>>,
    undirected: bool,
}

impl TransitionMatrix {
    pub fn from_graph(g: &Graph) -> Result<Self, GraphError> {
        let n = g.n();
        let mut degrees = vec![0.0; n];
        let mut p = DenseMatrix::zeros(n, n);
        for i in 0..n {
            let d: f64 = g.adjacency.row(i).iter().sum();
            if d <= 0.0 {
                return Err(GraphError::ZeroOutDegree {
                    id: g.id(i).to_string(),
                });
            }
            degrees[i] = d;
            let dst = p.row_mut(i);
            for (pj, &a) in dst.iter_mut().zip(g.adjacency.row(i)) {
                *pj = a / d;
            }
        }
        Ok(Self {
            p,
            degrees,
            stationary: None,
            undirected: !g.directed,
        })
    }

    /// Internal constructor for matrices built directly (extended graphs).
    pub(crate) fn from_parts(p: DenseMatrix, degrees: Vec<f64>, undirected: bool) -> Self {
        Self {
            p,
            degrees,
            stationary: None,
            undirected,
        }
    }

    pub fn n(&self) -> usize {
        self.p.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.p
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.p.get(i, j)
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn stationary(&self) -> Option<&[f64]> {
        self.stationary.as_deref()
    }

    /// True when this matrix came from an undirected graph (the chain is
    /// reversible and the stationary distribution is degree/volume).
    pub fn undirected(&self) -> bool {
        self.undirected
    }

    /// Computes and caches the stationary distribution.
    pub fn with_stationary(mut self) -> Result<Self, GraphError> {
        let pi = stationary_distribution(&self)?;
        self.stationary = Some(pi);
        Ok(self)
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.n() > 0
            && tarjan_scc(self.n(), |i| {
                self.p
                    .row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w > 0.0)
                    .map(|(j, _)| j)
            })
            .len()
                == 1
    }

    pub fn recurrent_classes(&self) -> Vec<Vec<usize>> {
        recurrent_classes_of(self.n(), &self.p)
    }

    /// Maximum deviation of any row sum from 1.
    pub fn max_row_sum_deviation(&self) -> f64 {
        (0..self.n())
            .map(|i| (self.p.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Stationary distribution of an irreducible chain.
///
/// Undirected connected graphs use the exact closed form
/// `pi_i = d_i / sum_j d_j`; directed graphs solve the singular system
/// `(I - P') pi = 0` with the normalization constraint replacing one row.
pub fn stationary_distribution(t: &TransitionMatrix) -> Result<Vec<f64>, GraphError> {
    let n = t.n();
    if n == 0 || !t.is_strongly_connected() {
        return Err(GraphError::NotStronglyConnected);
    }
    if t.undirected {
        let vol: f64 = t.degrees.iter().sum();
        return Ok(t.degrees.iter().map(|d| d / vol).collect());
    }
    // Build (I - P') with the last row replaced by the normalization 1' pi = 1.
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = if i == j { 1.0 } else { 0.0 } - t.p.get(j, i);
            m.set(i, j, v);
        }
    }
    for j in 0..n {
        m.set(n - 1, j, 1.0);
    }
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = 1.0;
    let pi = crate::linalg::lu_factor(&m)?.solve_vec(&rhs);
    // Validate the residual before handing the vector out.
    let residual = (0..n)
        .map(|j| {
            let col: f64 = (0..n).map(|i| pi[i] * t.p.get(i, j)).sum();
            (col - pi[j]).abs()
        })
        .fold(0.0, f64::max);
    debug_assert!(residual <= STATIONARY_TOL, "stationary residual {residual}");
    Ok(pi)
}

/// Base graph plus an absorbing exogenous node `o` that every node links to
/// with weight `beta` (applied before row normalization).
///
/// Node `o` takes index `n`. Its transition row is the absorbing-state
/// convention (a unit self-loop), which keeps the matrix row-stochastic; at
/// the graph level `o` has no outgoing edges.
#[derive(Clone, Debug)]
pub struct ExtendedGraph {
    base: Graph,
    beta: f64,
    trans: TransitionMatrix,
}

impl ExtendedGraph {
    pub fn new(base: Graph, beta: f64) -> Result<Self, GraphError> {
        if beta.is_nan() || beta <= 0.0 {
            return Err(GraphError::NonPositiveBeta(beta));
        }
        let n = base.n();
        let mut p = DenseMatrix::zeros(n + 1, n + 1);
        let mut degrees = vec![0.0; n + 1];
        for i in 0..n {
            let d: f64 = base.adjacency.row(i).iter().sum();
            let total = d + beta;
            degrees[i] = total;
            let row = p.row_mut(i);
            for (pj, &a) in row.iter_mut().zip(base.adjacency.row(i)) {
                *pj = a / total;
            }
            row[n] = beta / total;
        }
        p.set(n, n, 1.0);
        Ok(Self {
            base,
            beta,
            trans: TransitionMatrix::from_parts(p, degrees, false),
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Index of the exogenous node.
    pub fn o_index(&self) -> usize {
        self.base.n()
    }

    pub fn transition(&self) -> &TransitionMatrix {
        &self.trans
    }
}
