//! Community detection by KNN-based revised medoid shift.
//!
//! The pipeline turns a [`Graph`](graph::Graph) into a node-similarity
//! matrix (common-neighbor counts for unweighted graphs, edge weights
//! otherwise), ranks each node's `k` most similar nodes, and lets every node
//! shift toward the candidate with the largest similarity sum until the set
//! of medoids is stable. The original radius-based medoid shift is provided
//! as a baseline, together with NMI and modularity for evaluation and a
//! sweep/reproduction harness.
//!
//! ```
//! use rmsnet::graph::{parse_edge_list, EdgeListOptions};
//! use rmsnet::rms::{run_rms, RmsConfig};
//!
//! let g = parse_edge_list("a b\nb c\na c\nd e\ne f\nd f", EdgeListOptions::default())?.graph;
//! let c = run_rms(&g, &RmsConfig::new(2))?;
//! assert_eq!(c.num_clusters(), 2);
//! # Ok::<(), rmsnet::Error>(())
//! ```

pub mod baseline;
pub mod clustering;
pub mod error;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod output;
pub mod rms;
pub mod similarity;

pub use error::{Error, ErrorKind, Result};
