//! Descent along decreasing potential.
//!
//! All comparisons between nodes use the total order `(potential, id)`, so two
//! nodes with equal potential are ordered by id and every layer makes
//! progress.

mod baselines;

pub use self::baselines::{graph_ga, hnnd, nd, rl_delta};

use serde::{Deserialize, Serialize};

use crate::dataset::Dissimilarity;
use crate::error::{Error, Result};
use crate::intree::InTree;
use crate::neighborhood::{build_knn, NeighborGraph};
use crate::potential::{PotentialConfig, PotentialVector};

/// A directed edge from `node` to `parent` of length `weight`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Link {
    pub node: usize,
    pub parent: usize,
    pub weight: f64,
}

/// Outcome of one nearest-neighbor-descent layer.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerState {
    /// Nodes the layer ran on, ascending.
    pub active: Vec<usize>,
    /// Active nodes with no lower neighbor, ascending.
    pub roots: Vec<usize>,
    /// One link per non-root active node, ascending by node.
    pub links: Vec<Link>,
}

/// One layer of the bottom-up stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub layer: usize,
    pub active: usize,
    pub roots: usize,
    /// FNV-1a hash of the `(id, potential bits)` pairs of the active nodes.
    pub potential_digest: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DescentTrace(pub Vec<LayerRecord>);

impl DescentTrace {
    /// Root count after each layer.
    pub fn root_counts(&self) -> Vec<usize> {
        self.0.iter().map(|r| r.roots).collect()
    }

    pub fn layers(&self) -> &[LayerRecord] {
        &self.0
    }

    /// Root counts strictly decrease and end at one.
    pub fn is_monotone_to_one(&self) -> bool {
        let counts = self.root_counts();
        counts.windows(2).all(|w| w[1] < w[0]) && counts.last() == Some(&1)
    }
}

fn digest(active: &[usize], potential: &PotentialVector) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for &i in active {
        for byte in (i as u64)
            .to_le_bytes()
            .into_iter()
            .chain(potential[i].to_bits().to_le_bytes())
        {
            h ^= u64::from(byte);
            h = h.wrapping_mul(PRIME);
        }
    }
    h
}

/// Nearest neighbor descent over one neighbor graph: every node links to its
/// nearest neighbor that precedes it in `(potential, id)` order; nodes without
/// such a neighbor are roots.
pub fn nnd_layer(graph: &NeighborGraph, potential: &PotentialVector) -> LayerState {
    let mut roots = Vec::new();
    let mut links = Vec::with_capacity(graph.active().len());
    for (i, list) in graph.iter() {
        // Lists are sorted by (distance, id): the first lower neighbor is the argmin.
        match list.iter().find(|nb| potential.precedes(nb.id, i)) {
            Some(nb) => links.push(Link {
                node: i,
                parent: nb.id,
                weight: nb.distance,
            }),
            None => roots.push(i),
        }
    }
    LayerState {
        active: graph.active().to_vec(),
        roots,
        links,
    }
}

/// Result of the bottom-up stage.
#[derive(Clone, Debug, PartialEq)]
pub struct Descent {
    pub tree: InTree,
    pub potential: PotentialVector,
    pub trace: DescentTrace,
}

/// Deep nearest neighbor descent: repeat kNN construction, potential
/// accumulation and one descent layer on the surviving roots until a single
/// root remains.
pub fn dnnd<D: Dissimilarity + ?Sized>(dist: &D, k: usize, config: &PotentialConfig) -> Result<Descent> {
    let n = dist.len();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    config.validate()?;

    let mut potential = PotentialVector::zeros(n);
    let mut parent: Vec<usize> = (0..n).collect();
    let mut weight = vec![f64::NEG_INFINITY; n];
    let mut layer_built = vec![0; n];
    let mut trace = Vec::new();

    let mut active: Vec<usize> = (0..n).collect();
    if n == 1 {
        trace.push(LayerRecord {
            layer: 0,
            active: 1,
            roots: 1,
            potential_digest: digest(&active, &potential),
        });
    }
    let mut layer = 0;
    while active.len() > 1 {
        layer += 1;
        let graph = build_knn(&active, dist, k);
        potential.accumulate(&graph, config);
        let state = nnd_layer(&graph, &potential);
        debug_assert!(state.roots.len() < active.len());
        for link in &state.links {
            parent[link.node] = link.parent;
            weight[link.node] = link.weight;
            layer_built[link.node] = layer;
        }
        trace.push(LayerRecord {
            layer,
            active: active.len(),
            roots: state.roots.len(),
            potential_digest: digest(&active, &potential),
        });
        if state.roots.len() == 1 {
            layer_built[state.roots[0]] = layer;
        }
        active = state.roots;
    }

    Ok(Descent {
        tree: InTree::new(parent, weight, layer_built)?,
        potential,
        trace: DescentTrace(trace),
    })
}
