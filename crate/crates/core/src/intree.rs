//! In-tree and forest structures: one outgoing edge per non-root node,
//! pointing at its parent, with the edge length stored on the start node.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parent-pointer view shared by [`InTree`] and [`Forest`].
///
/// A root is its own parent and carries weight `-inf`.
pub trait ParentLinks {
    fn parents(&self) -> &[usize];

    fn edge_weights(&self) -> &[f64];

    fn len(&self) -> usize {
        self.parents().len()
    }

    fn is_empty(&self) -> bool {
        self.parents().is_empty()
    }

    fn is_root(&self, node: usize) -> bool {
        self.parents()[node] == node
    }

    /// Roots in ascending id order.
    fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_root(i)).collect()
    }
}

/// Which structural properties a parent array satisfies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    /// Exactly one node is its own parent.
    pub single_root: bool,
    /// Every parent id is a valid node, so each non-root has one outgoing edge.
    pub outdegree_one: bool,
    /// No parent chain revisits a node before reaching a root.
    pub acyclic: bool,
    /// Every node reaches the same root.
    pub connected: bool,
    /// Self-parented nodes, ascending.
    pub roots: Vec<usize>,
}

impl ValidationReport {
    /// All four in-tree properties hold.
    pub fn is_intree(&self) -> bool {
        self.single_root && self.outdegree_one && self.acyclic && self.connected
    }

    /// Acyclic with every node reaching some root.
    pub fn is_forest(&self) -> bool {
        self.outdegree_one && self.acyclic && !self.roots.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Walk {
    Unseen,
    OnPath,
    Root(usize),
    Dangling,
}

/// Follows every chain once, labelling nodes with their terminal root.
/// Returns the per-node outcome and whether a cycle was met.
fn walk_all(n: usize, next: impl Fn(usize) -> Option<usize>) -> (Vec<Walk>, bool) {
    let mut state = vec![Walk::Unseen; n];
    let mut cycle = false;
    let mut path = Vec::new();
    for start in 0..n {
        if state[start] != Walk::Unseen {
            continue;
        }
        let mut cur = start;
        let outcome = loop {
            match state[cur] {
                Walk::Root(r) => break Walk::Root(r),
                Walk::Dangling => break Walk::Dangling,
                Walk::OnPath => {
                    cycle = true;
                    break Walk::Dangling;
                }
                Walk::Unseen => {}
            }
            match next(cur) {
                None => break Walk::Dangling,
                Some(p) if p == cur => {
                    state[cur] = Walk::Root(cur);
                    break Walk::Root(cur);
                }
                Some(p) => {
                    state[cur] = Walk::OnPath;
                    path.push(cur);
                    cur = p;
                }
            }
        };
        for node in path.drain(..) {
            state[node] = outcome;
        }
    }
    (state, cycle)
}

/// Checks the four in-tree properties of a parent array.
pub fn validate_parents(parent: &[usize]) -> ValidationReport {
    let n = parent.len();
    let outdegree_one = parent.iter().all(|&p| p < n);
    let roots: Vec<usize> = (0..n).filter(|&i| parent[i] == i).collect();
    let (state, cycle) = walk_all(n, |i| (parent[i] < n).then_some(parent[i]));
    let connected = match state.first() {
        Some(Walk::Root(r)) => state.iter().all(|s| *s == Walk::Root(*r)),
        _ => false,
    };
    ValidationReport {
        single_root: roots.len() == 1,
        outdegree_one,
        acyclic: !cycle,
        connected,
        roots,
    }
}

pub fn validate_intree<T: ParentLinks + ?Sized>(tree: &T) -> ValidationReport {
    validate_parents(tree.parents())
}

fn removal_mask(n: usize, removed: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &i in removed {
        if i >= n {
            return Err(Error::InvalidCut(format!("edge start {i} is not a node")));
        }
        mask[i] = true;
    }
    Ok(mask)
}

/// Root reached from `node` when the edges starting at `removed` are cut;
/// a node whose edge is cut is a root.
pub fn root_of<T: ParentLinks + ?Sized>(tree: &T, node: usize, removed: &[usize]) -> Result<usize> {
    let parent = tree.parents();
    let mask = removal_mask(parent.len(), removed)?;
    let mut cur = node;
    for _ in 0..=parent.len() {
        let next = if mask[cur] { cur } else { parent[cur] };
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
    Err(Error::Structure(format!("cycle on the parent chain of node {node}")))
}

/// [`root_of`] for every node in one linear pass.
pub fn resolve_roots<T: ParentLinks + ?Sized>(tree: &T, removed: &[usize]) -> Result<Vec<usize>> {
    let parent = tree.parents();
    let n = parent.len();
    let mask = removal_mask(n, removed)?;
    let (state, cycle) = walk_all(n, |i| {
        let p = if mask[i] { i } else { parent[i] };
        (p < n).then_some(p)
    });
    if cycle {
        return Err(Error::Structure("parent pointers contain a cycle".into()));
    }
    state
        .into_iter()
        .enumerate()
        .map(|(i, s)| match s {
            Walk::Root(r) => Ok(r),
            _ => Err(Error::Structure(format!("node {i} does not reach a root"))),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct TreeRecord {
    parent: Vec<usize>,
    edge_weight: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layer_built: Option<Vec<usize>>,
}

fn weights_from_record(parent: &[usize], weights: Vec<Option<f64>>) -> Result<Vec<f64>> {
    if weights.len() != parent.len() {
        return Err(Error::Structure(format!(
            "{} edge weights for {} nodes",
            weights.len(),
            parent.len()
        )));
    }
    weights
        .into_iter()
        .enumerate()
        .map(|(i, w)| match (parent[i] == i, w) {
            (true, None) => Ok(f64::NEG_INFINITY),
            (false, Some(w)) if w.is_finite() && w >= 0.0 => Ok(w),
            _ => Err(Error::Structure(format!("bad edge weight for node {i}"))),
        })
        .collect()
}

fn check_weights(parent: &[usize], weights: &[f64]) -> Result<()> {
    if weights.len() != parent.len() {
        return Err(Error::Structure("edge weights and parents differ in length".into()));
    }
    for (i, (&p, &w)) in parent.iter().zip(weights).enumerate() {
        let ok = if p == i {
            w == f64::NEG_INFINITY
        } else {
            w.is_finite() && w >= 0.0
        };
        if !ok {
            return Err(Error::Structure(format!("bad edge weight {w} for node {i}")));
        }
    }
    Ok(())
}

/// A single-rooted, acyclic, connected parent structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "TreeRecord", try_from = "TreeRecord")]
pub struct InTree {
    parent: Vec<usize>,
    edge_weight: Vec<f64>,
    layer_built: Vec<usize>,
}

impl InTree {
    /// Validates all four in-tree properties and the weight convention
    /// (nonnegative finite on edges, `-inf` on the root).
    pub fn new(parent: Vec<usize>, edge_weight: Vec<f64>, layer_built: Vec<usize>) -> Result<Self> {
        let report = validate_parents(&parent);
        if !report.is_intree() {
            return Err(Error::Structure(format!("not an in-tree: {report:?}")));
        }
        check_weights(&parent, &edge_weight)?;
        if layer_built.len() != parent.len() {
            return Err(Error::Structure("layer record length mismatch".into()));
        }
        Ok(Self {
            parent,
            edge_weight,
            layer_built,
        })
    }

    pub fn root(&self) -> usize {
        self.parent
            .iter()
            .enumerate()
            .find(|&(i, &p)| i == p)
            .map(|(i, _)| i)
            .expect("validated in-tree has a root")
    }

    pub fn parent(&self, node: usize) -> usize {
        self.parent[node]
    }

    /// Edge length of `node`'s outgoing edge, `-inf` for the root.
    pub fn edge_weight(&self, node: usize) -> f64 {
        self.edge_weight[node]
    }

    /// Layer in which each node's edge was created.
    pub fn layer_built(&self) -> &[usize] {
        &self.layer_built
    }
}

impl ParentLinks for InTree {
    fn parents(&self) -> &[usize] {
        &self.parent
    }

    fn edge_weights(&self) -> &[f64] {
        &self.edge_weight
    }
}

impl From<InTree> for TreeRecord {
    fn from(t: InTree) -> Self {
        TreeRecord {
            edge_weight: t.edge_weight.iter().map(|w| w.is_finite().then_some(*w)).collect(),
            parent: t.parent,
            layer_built: Some(t.layer_built),
        }
    }
}

impl TryFrom<TreeRecord> for InTree {
    type Error = Error;

    fn try_from(r: TreeRecord) -> Result<Self> {
        let weights = weights_from_record(&r.parent, r.edge_weight)?;
        let layers = r.layer_built.unwrap_or_else(|| vec![0; r.parent.len()]);
        InTree::new(r.parent, weights, layers)
    }
}

/// Acyclic parent structure with one or more roots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "TreeRecord", try_from = "TreeRecord")]
pub struct Forest {
    parent: Vec<usize>,
    edge_weight: Vec<f64>,
}

impl Forest {
    pub fn new(parent: Vec<usize>, edge_weight: Vec<f64>) -> Result<Self> {
        let report = validate_parents(&parent);
        if !report.is_forest() {
            return Err(Error::Structure(format!("not a forest: {report:?}")));
        }
        check_weights(&parent, &edge_weight)?;
        Ok(Self {
            parent,
            edge_weight,
        })
    }
}

impl ParentLinks for Forest {
    fn parents(&self) -> &[usize] {
        &self.parent
    }

    fn edge_weights(&self) -> &[f64] {
        &self.edge_weight
    }
}

impl From<InTree> for Forest {
    fn from(t: InTree) -> Self {
        Forest {
            parent: t.parent,
            edge_weight: t.edge_weight,
        }
    }
}

impl From<Forest> for TreeRecord {
    fn from(f: Forest) -> Self {
        TreeRecord {
            edge_weight: f.edge_weight.iter().map(|w| w.is_finite().then_some(*w)).collect(),
            parent: f.parent,
            layer_built: None,
        }
    }
}

impl TryFrom<TreeRecord> for Forest {
    type Error = Error;

    fn try_from(r: TreeRecord) -> Result<Self> {
        let weights = weights_from_record(&r.parent, r.edge_weight)?;
        Forest::new(r.parent, weights)
    }
}
