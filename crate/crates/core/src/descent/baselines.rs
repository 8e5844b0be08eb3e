//! Single-potential baselines: nearest descent over all nodes, its two-stage
//! hierarchical variant, graph-based gradient ascent, and the
//! distance-to-denser-point statistic.

use super::{nnd_layer, Link};
use crate::dataset::Dissimilarity;
use crate::error::{Error, Result};
use crate::intree::{Forest, InTree};
use crate::neighborhood::{build_knn, NeighborGraph};
use crate::potential::{numeric_then_id, PotentialVector};

fn check_len<D: Dissimilarity + ?Sized>(dist: &D, len: usize, what: &str) -> Result<()> {
    if dist.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if dist.len() != len {
        return Err(Error::InvalidConfig(format!(
            "{len} {what} values for {} nodes",
            dist.len()
        )));
    }
    Ok(())
}

/// Links every node of `nodes` except the lowest to its nearest node that
/// precedes it in `(potential, id)` order. Returns the lowest node and the links.
fn nearest_descent_links<D: Dissimilarity + ?Sized>(
    nodes: &[usize],
    potential: &PotentialVector,
    dist: &D,
) -> (usize, Vec<Link>) {
    let mut order = nodes.to_vec();
    order.sort_unstable_by(|&a, &b| potential.order(a, b));
    let mut links = Vec::with_capacity(order.len().saturating_sub(1));
    for (pos, &i) in order.iter().enumerate().skip(1) {
        let (parent, weight) = order[..pos]
            .iter()
            .map(|&j| (j, dist.distance(i, j)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
            .expect("earlier nodes exist");
        links.push(Link { node: i, parent, weight });
    }
    (order[0], links)
}

fn assemble(n: usize, stages: &[(&[Link], usize)], root: usize, root_layer: usize) -> Result<InTree> {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut weight = vec![f64::NEG_INFINITY; n];
    let mut layer = vec![0; n];
    for &(links, stage) in stages {
        for l in links {
            parent[l.node] = l.parent;
            weight[l.node] = l.weight;
            layer[l.node] = stage;
        }
    }
    layer[root] = root_layer;
    InTree::new(parent, weight, layer)
}

/// Nearest descent: each node links to the nearest node of lower
/// `(potential, id)`; the lowest node is the root.
pub fn nd<D: Dissimilarity + ?Sized>(dist: &D, potential: &PotentialVector) -> Result<InTree> {
    check_len(dist, potential.len(), "potential")?;
    let all: Vec<usize> = (0..dist.len()).collect();
    let (root, links) = nearest_descent_links(&all, potential, dist);
    assemble(dist.len(), &[(&links, 1)], root, 1)
}

/// Hierarchical nearest neighbor descent: one neighbor-constrained descent
/// layer over all nodes, then nearest descent among that layer's roots.
pub fn hnnd<D: Dissimilarity + ?Sized>(dist: &D, k: usize, potential: &PotentialVector) -> Result<InTree> {
    check_len(dist, potential.len(), "potential")?;
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let all: Vec<usize> = (0..dist.len()).collect();
    let graph = build_knn(&all, dist, k);
    let first = nnd_layer(&graph, potential);
    let (root, second) = nearest_descent_links(&first.roots, potential, dist);
    let root_layer = if first.roots.len() > 1 { 2 } else { 1 };
    assemble(dist.len(), &[(&first.links, 1), (&second, 2)], root, root_layer)
}

/// Graph-based gradient ascent. Each node links to the neighbor maximizing
/// `(rho_j - rho_i) / d_ij` (smaller id on ties) when that maximum is
/// positive; otherwise it is a root. A zero distance to a denser neighbor
/// counts as an infinite gradient.
pub fn graph_ga(graph: &NeighborGraph, density: &[f64]) -> Result<Forest> {
    let n = density.len();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if density.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidConfig("density must be finite".into()));
    }
    if graph.active().len() != n || graph.active().iter().enumerate().any(|(pos, &i)| pos != i) {
        return Err(Error::InvalidConfig(
            "graph-based ascent needs a neighbor graph over every node".into(),
        ));
    }
    let mut parent: Vec<usize> = (0..n).collect();
    let mut weight = vec![f64::NEG_INFINITY; n];
    for (i, list) in graph.iter() {
        let mut best: Option<(f64, usize, f64)> = None;
        for nb in list {
            let rise = density[nb.id] - density[i];
            if rise <= 0.0 {
                continue;
            }
            let gradient = if nb.distance > 0.0 {
                rise / nb.distance
            } else {
                f64::INFINITY
            };
            let better = match best {
                None => true,
                Some((g, id, _)) => gradient > g || (gradient == g && nb.id < id),
            };
            if better {
                best = Some((gradient, nb.id, nb.distance));
            }
        }
        if let Some((_, p, d)) = best {
            parent[i] = p;
            weight[i] = d;
        }
    }
    Forest::new(parent, weight)
}

/// Distance from each node to the nearest node of higher `(density, id)`.
/// The global peak receives its largest distance to any node.
pub fn rl_delta<D: Dissimilarity + ?Sized>(density: &[f64], dist: &D) -> Result<Vec<f64>> {
    check_len(dist, density.len(), "density")?;
    let n = density.len();
    if n < 2 {
        return Err(Error::UndefinedInput(
            "distance to a denser point needs at least two points".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| numeric_then_id(density, b, a));

    let mut delta = vec![0.0; n];
    let peak = order[0];
    delta[peak] = (0..n)
        .map(|j| dist.distance(peak, j))
        .fold(0.0, f64::max);
    for (pos, &i) in order.iter().enumerate().skip(1) {
        delta[i] = order[..pos]
            .iter()
            .map(|&j| dist.distance(i, j))
            .fold(f64::INFINITY, f64::min);
    }
    Ok(delta)
}
