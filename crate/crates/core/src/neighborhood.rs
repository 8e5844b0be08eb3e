//! Exact k-nearest-neighbor graphs over a subset of nodes.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::dataset::Dissimilarity;

/// One outgoing neighbor entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub id: usize,
    pub distance: f64,
}

/// Directed kNN graph over an active node set.
///
/// Each list has exactly `k_eff = min(k_requested, |active| - 1)` entries,
/// sorted by `(distance, id)` ascending, and never contains its own node.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborGraph {
    k_requested: usize,
    k_eff: usize,
    active: Vec<usize>,
    lists: Vec<Vec<Neighbor>>,
}

impl NeighborGraph {
    pub fn k_requested(&self) -> usize {
        self.k_requested
    }

    pub fn k_eff(&self) -> usize {
        self.k_eff
    }

    /// Active node ids, ascending.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Neighbor list of `node`, or `None` if it is not active.
    pub fn neighbors(&self, node: usize) -> Option<&[Neighbor]> {
        self.active
            .binary_search(&node)
            .ok()
            .map(|pos| self.lists[pos].as_slice())
    }

    /// `(node, neighbors)` pairs in ascending node order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (usize, &[Neighbor])> + '_ {
        self.active
            .iter()
            .copied()
            .zip(self.lists.iter().map(Vec::as_slice))
    }
}

/// Total order used for neighbor selection: distance first, then id.
pub(crate) fn by_distance_then_id(a: &Neighbor, b: &Neighbor) -> Ordering {
    a.distance
        .total_cmp(&b.distance)
        .then_with(|| a.id.cmp(&b.id))
}

/// Builds the kNN graph of `active` by exhaustive scan.
///
/// `active` may be in any order and is deduplicated. `k` is clamped to
/// `|active| - 1`; a single active node gets an empty list.
pub fn build_knn<D: Dissimilarity + ?Sized>(active: &[usize], dist: &D, k: usize) -> NeighborGraph {
    let mut active = active.to_vec();
    active.sort_unstable();
    active.dedup();
    let k_eff = k.min(active.len().saturating_sub(1));

    let lists = active
        .par_iter()
        .map(|&i| {
            let mut candidates: Vec<Neighbor> = active
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| Neighbor {
                    id: j,
                    distance: dist.distance(i, j),
                })
                .collect();
            if k_eff < candidates.len() && k_eff > 0 {
                candidates.select_nth_unstable_by(k_eff - 1, by_distance_then_id);
            }
            candidates.truncate(k_eff);
            candidates.sort_unstable_by(by_distance_then_id);
            candidates
        })
        .collect();

    NeighborGraph {
        k_requested: k,
        k_eff,
        active,
        lists,
    }
}
