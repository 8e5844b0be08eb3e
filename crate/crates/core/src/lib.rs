//! Density-based clustering by layered nearest neighbor descent.
//!
//! Every point links to a nearby point of lower potential, layer after layer,
//! until a single in-tree spans the data. Cutting its longest edges yields
//! the clusters.
//!
//! ```
//! use dnnd_core::{run, CutSpec, Dataset, PipelineConfig, PotentialConfig};
//!
//! let rows = [0.0, 1.0, 2.0, 10.0, 11.0, 12.0].iter().map(|&x| vec![x]).collect();
//! let data = Dataset::from_rows(rows, None).unwrap();
//! let config = PipelineConfig {
//!     k: 2,
//!     potential: PotentialConfig::sum_distance(),
//!     cut: Some(CutSpec::TopK(1)),
//!     ..Default::default()
//! };
//! let out = run(&data, &config).unwrap();
//! assert_eq!(out.clustering.labels, vec![0, 0, 0, 1, 1, 1]);
//! ```

pub mod cuts;
pub mod dataset;
pub mod descent;
pub mod error;
pub mod eval;
pub mod intree;
pub mod neighborhood;
pub mod pipeline;
pub mod potential;

pub use cuts::{apply_cut, auto_gap_k, e_cut_rank, Clustering, CutSpec, DecisionGraph};
pub use dataset::{Dataset, DistanceMatrix, Dissimilarity, Metric, PairwiseDistances};
pub use descent::{dnnd, graph_ga, hnnd, nd, nnd_layer, rl_delta, Descent, DescentTrace};
pub use error::{Error, Result};
pub use eval::{error_rate, run_sweep, SweepConfig, SweepRow};
pub use intree::{resolve_roots, root_of, validate_intree, Forest, InTree, ParentLinks};
pub use neighborhood::{build_knn, Neighbor, NeighborGraph};
pub use pipeline::{bottom_up, run, Method, PipelineConfig};
pub use potential::{accumulate_potential, kernel_density, PotentialConfig, PotentialMode, PotentialVector};
