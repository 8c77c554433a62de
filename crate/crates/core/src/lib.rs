//! # mtensor
//!
//! Random-walk network analysis built on the Markov fundamental tensor.
//!
//! The fundamental tensor `F[s][m][t]` of a weighted digraph is the expected
//! number of visits a random walk starting at `s` pays to the medial node
//! `m` before first hitting the target `t`. One pseudo-inverse of the
//! random-walk Laplacian `I - P` yields the whole tensor in O(n^3), and the
//! classic random-walk metrics fall out of it by summing over dimensions:
//!
//! | Aggregation          | Quantity                            |
//! |----------------------|-------------------------------------|
//! | `sum_m`              | hitting time / hitting cost         |
//! | `sum_{s,m}`          | random-walk closeness               |
//! | `sum_{s,t}`          | random-walk betweenness             |
//! | `sum_{s,m,t} / |E|`  | Kirchhoff index                     |
//!
//! On top of the tensor the crate provides:
//!
//! * absorption probabilities and fundamental matrices for arbitrary
//!   target sets, with Schur-complement incremental updates;
//! * the normalized tensor, articulation-point detection, and a per-node
//!   load (reachability balance) measure;
//! * influence-spread maximization over an extended graph with an
//!   exogenous absorbing node, including a greedy seed selector and
//!   degree / closeness / PageRank / random baselines;
//! * a precomputed reachability oracle answering queries in O(1) and
//!   node-failure queries in O(|F|^2) after a cached O(|F|^3) setup;
//! * a Monte-Carlo walker that validates every matrix-form metric against
//!   its stochastic definition.
//!
//! Conventions: dense storage throughout (intended scale n up to a few
//! thousand); node order is first-seen input order; `|E|` counts directed
//! edge slots, so an undirected edge contributes two.
//!
//! ```
//! use mtensor::graph::{Graph, TransitionMatrix, stationary_distribution};
//! use mtensor::fundamental::fundamental_tensor;
//! use mtensor::metrics::kirchhoff_index;
//!
//! let g = Graph::parse_edge_list("a b\nb c", false, false).unwrap().graph;
//! let p = TransitionMatrix::from_graph(&g).unwrap();
//! let pi = stationary_distribution(&p).unwrap();
//! let tensor = fundamental_tensor(&p, &pi).unwrap();
//! let k = kirchhoff_index(&tensor, &p, g.edge_count()).unwrap();
//! assert!((k.value - 4.0).abs() < 1e-10);
//! ```

pub mod centrality;
pub mod fundamental;
pub mod graph;
pub mod influence;
pub mod linalg;
pub mod metrics;
pub mod reachability;
pub mod rng;
pub mod simulate;

pub use fundamental::{FundamentalMatrix, FundamentalTensor, NormalizedTensor};
pub use graph::{ExtendedGraph, Graph, TransitionMatrix};
pub use linalg::DenseMatrix;

#[cfg(test)]
mod thread_contracts {
    //! The analysis types are immutable after construction and shared
    //! across threads; keep that statically checked.

    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_send_and_sync() {
        assert_send_sync::<crate::Graph>();
        assert_send_sync::<crate::TransitionMatrix>();
        assert_send_sync::<crate::ExtendedGraph>();
        assert_send_sync::<crate::DenseMatrix>();
        assert_send_sync::<crate::FundamentalMatrix>();
        assert_send_sync::<crate::FundamentalTensor>();
        assert_send_sync::<crate::NormalizedTensor>();
        assert_send_sync::<crate::reachability::ReachabilityOracle>();
    }
}
