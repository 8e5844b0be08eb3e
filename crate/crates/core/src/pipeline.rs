//! End-to-end runs: distances, bottom-up structure, then a cut.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cuts::{apply_cut, cut_edges, Clustering, CutSpec, DecisionGraph};
use crate::dataset::{Dataset, Dissimilarity, Metric, PairwiseDistances};
use crate::descent::{dnnd, graph_ga, hnnd, nd};
use crate::error::{Error, Result};
use crate::intree::{Forest, InTree, ParentLinks};
use crate::neighborhood::build_knn;
use crate::potential::{kernel_density, PotentialConfig, PotentialMode, PotentialVector};

/// Which structure-building algorithm to run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Layered nearest neighbor descent until one root remains.
    #[default]
    Dnnd,
    /// Nearest descent over all nodes.
    Nd,
    /// Neighbor descent, then nearest descent among its roots.
    Hnnd,
    /// Graph-based gradient ascent; yields a forest.
    GraphGa,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dnnd => "dnnd",
            Method::Nd => "nd",
            Method::Hnnd => "hnnd",
            Method::GraphGa => "graphga",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "dnnd" => Ok(Method::Dnnd),
            "nd" => Ok(Method::Nd),
            "hnnd" => Ok(Method::Hnnd),
            "graphga" => Ok(Method::GraphGa),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

/// Everything a clustering run needs besides the data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub metric: Metric,
    pub normalize: bool,
    pub k: usize,
    pub potential: PotentialConfig,
    pub method: Method,
    /// `None` means the automatic gap cut for tree methods. Graph-GA takes no
    /// cut: its clusters are the forest's trees.
    pub cut: Option<CutSpec>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            metric: Metric::Euclidean,
            normalize: false,
            k: 10,
            potential: PotentialConfig::default(),
            method: Method::Dnnd,
            cut: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        self.potential.validate()?;
        if self.method == Method::GraphGa && self.cut.is_some() {
            return Err(Error::InvalidConfig(
                "graphga produces a forest whose trees are the clusters; it takes no cut".into(),
            ));
        }
        Ok(())
    }
}

/// Output of the bottom-up stage.
#[derive(Clone, Debug, PartialEq)]
pub enum Structure {
    Tree(InTree),
    Forest(Forest),
}

impl Structure {
    pub fn links(&self) -> &dyn ParentLinks {
        match self {
            Structure::Tree(t) => t,
            Structure::Forest(f) => f,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BottomUp {
    pub method: Method,
    pub structure: Structure,
    /// Potentials used for descent; for Graph-GA the negated density.
    pub potential: PotentialVector,
    /// Root count after each layer.
    pub trace: Vec<usize>,
}

impl BottomUp {
    /// Applies `spec` to a tree, or returns the forest's own clusters.
    pub fn cut(&self, spec: Option<&CutSpec>) -> Result<Clustering> {
        match (&self.structure, spec) {
            (Structure::Tree(t), spec) => {
                apply_cut(t, &self.potential, spec.unwrap_or(&CutSpec::default()))
            }
            (Structure::Forest(f), None) => cut_edges(f, &[]),
            (Structure::Forest(_), Some(_)) => Err(Error::InvalidConfig(
                "graphga output takes no cut".into(),
            )),
        }
    }

    pub fn decision_graph(&self, points2d: Option<Vec<[f64; 2]>>) -> Result<DecisionGraph> {
        DecisionGraph::export(self.structure.links(), &self.potential, points2d, self.trace.clone())
    }
}

/// Fixed potential shared by the single-pass baselines: the negated global
/// kernel density in kernel mode, one neighbor-sum pass in distance mode.
pub fn baseline_potential<D: Dissimilarity + ?Sized>(
    dist: &D,
    k: usize,
    config: &PotentialConfig,
) -> Result<PotentialVector> {
    config.validate()?;
    match config.mode {
        PotentialMode::ExpKernel => PotentialVector::from_density(&kernel_density(dist, config.sigma)?),
        PotentialMode::SumDistance => {
            let all: Vec<usize> = (0..dist.len()).collect();
            let mut p = PotentialVector::zeros(dist.len());
            p.accumulate(&build_knn(&all, dist, k), config);
            Ok(p)
        }
    }
}

/// Runs the bottom-up stage of `method`.
pub fn bottom_up<D: Dissimilarity + ?Sized>(
    dist: &D,
    method: Method,
    k: usize,
    config: &PotentialConfig,
) -> Result<BottomUp> {
    if dist.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    match method {
        Method::Dnnd => {
            let out = dnnd(dist, k, config)?;
            Ok(BottomUp {
                method,
                structure: Structure::Tree(out.tree),
                potential: out.potential,
                trace: out.trace.root_counts(),
            })
        }
        Method::Nd => {
            let potential = baseline_potential(dist, k, config)?;
            let tree = nd(dist, &potential)?;
            Ok(BottomUp {
                method,
                structure: Structure::Tree(tree),
                potential,
                trace: vec![1],
            })
        }
        Method::Hnnd => {
            let potential = baseline_potential(dist, k, config)?;
            let tree = hnnd(dist, k, &potential)?;
            let first_stage_roots = (0..tree.len())
                .filter(|&i| tree.layer_built()[i] == 2 || tree.is_root(i))
                .count();
            let trace = if first_stage_roots > 1 {
                vec![first_stage_roots, 1]
            } else {
                vec![1]
            };
            Ok(BottomUp {
                method,
                structure: Structure::Tree(tree),
                potential,
                trace,
            })
        }
        Method::GraphGa => {
            let potential = baseline_potential(dist, k, config)?;
            let density: Vec<f64> = potential.as_slice().iter().map(|p| -p).collect();
            let all: Vec<usize> = (0..dist.len()).collect();
            let forest = graph_ga(&build_knn(&all, dist, k), &density)?;
            let trace = vec![forest.roots().len()];
            Ok(BottomUp {
                method,
                structure: Structure::Forest(forest),
                potential,
                trace,
            })
        }
    }
}

/// Coordinates for plotting when the data is two-dimensional.
pub fn points2d(data: &Dataset) -> Option<Vec<[f64; 2]>> {
    (data.dim() == 2).then(|| data.points().map(|p| [p[0], p[1]]).collect())
}

/// A complete clustering run.
#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub bottom_up: BottomUp,
    pub clustering: Clustering,
    pub decision_graph: DecisionGraph,
}

pub fn run(data: &Dataset, config: &PipelineConfig) -> Result<Run> {
    config.validate()?;
    let normalized;
    let data = if config.normalize {
        normalized = data.normalize_minmax();
        &normalized
    } else {
        data
    };
    let dist = PairwiseDistances::new(data, config.metric);
    let bottom_up = bottom_up(&dist, config.method, config.k, &config.potential)?;
    let clustering = bottom_up.cut(config.cut.as_ref())?;
    let decision_graph = bottom_up.decision_graph(points2d(data))?;
    Ok(Run {
        bottom_up,
        clustering,
        decision_graph,
    })
}
