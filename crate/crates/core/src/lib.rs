//! Parallel cluster-BFS (bit-parallel multi-source BFS from a cluster of
//! nearby vertices) and two distance oracles built on top of it: an
//! approximate landmark-labeling oracle and an exact 2-hop pruned
//! landmark-labeling oracle.

pub mod bitset;
pub mod error;
pub mod frontier;
pub mod graph;
pub mod kernel;
pub mod ll;
pub mod oracle;
pub mod pll;
pub mod select;

pub use bitset::BitSubset;
pub use error::{Error, Result};
pub use graph::{Graph, VertexId};
pub use kernel::{cluster_bfs, plain_bfs, Cluster, ClusterDistanceVector, ClusterDistances};
