//! Top-down stage: choose redundant edges of an in-tree, remove them and
//! label the resulting pieces.
//!
//! Each non-root node owns exactly one outgoing edge, so an edge is named by
//! its start node throughout.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intree::{resolve_roots, validate_parents, Forest, InTree, ParentLinks};
use crate::potential::PotentialVector;

/// Default number of leading ranked edges searched for a gap.
pub const DEFAULT_GAP_WINDOW: usize = 50;

const GAP_EPSILON: f64 = 1e-12;

/// One edge seen in the (potential, edge length) plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionPoint {
    /// Start node of the edge.
    pub node: usize,
    pub edge_len: f64,
    /// Potential of the start node.
    pub potential: f64,
}

/// One point per non-root node, ascending by node.
pub fn decision_points<T: ParentLinks + ?Sized>(tree: &T, potential: &PotentialVector) -> Vec<DecisionPoint> {
    (0..tree.len())
        .filter(|&i| !tree.is_root(i))
        .map(|i| DecisionPoint {
            node: i,
            edge_len: tree.edge_weights()[i],
            potential: potential[i],
        })
        .collect()
}

/// Non-root edges as `(start node, length)`, longest first, smaller id first
/// among equal lengths.
pub fn e_cut_rank<T: ParentLinks + ?Sized>(tree: &T) -> Vec<(usize, f64)> {
    let weights = tree.edge_weights();
    let mut ranked: Vec<(usize, f64)> = (0..tree.len())
        .filter(|&i| !tree.is_root(i))
        .map(|i| (i, weights[i]))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

/// Number of leading edges to cut, placed at the largest ratio between
/// consecutive ranked lengths among the first `window` entries. Position `p`
/// scores `len[p-1] / max(len[p], 1e-12)`; the earliest maximum wins.
pub fn auto_gap_k(lengths: &[f64], window: usize) -> usize {
    let end = window.min(lengths.len());
    let mut best = (0, f64::NEG_INFINITY);
    for pos in 1..end {
        let ratio = lengths[pos - 1] / lengths[pos].max(GAP_EPSILON);
        if ratio > best.1 {
            best = (pos, ratio);
        }
    }
    best.0
}

/// Which edges to remove.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutSpec {
    /// The `K` longest edges.
    TopK(usize),
    /// The leading edges before the largest length gap.
    AutoGap {
        #[serde(default = "default_window")]
        window: usize,
    },
    /// Edges with length `>= min_edge_len` whose start node has potential
    /// `<= max_potential`.
    Box { min_edge_len: f64, max_potential: f64 },
    /// Explicit edge start nodes.
    Nodes(Vec<usize>),
}

fn default_window() -> usize {
    DEFAULT_GAP_WINDOW
}

impl Default for CutSpec {
    fn default() -> Self {
        CutSpec::AutoGap {
            window: DEFAULT_GAP_WINDOW,
        }
    }
}

impl fmt::Display for CutSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutSpec::TopK(k) => write!(f, "topk:{k}"),
            CutSpec::AutoGap { window } => write!(f, "autogap:{window}"),
            CutSpec::Box {
                min_edge_len,
                max_potential,
            } => write!(f, "box:{min_edge_len},{max_potential}"),
            CutSpec::Nodes(ids) => {
                let ids: Vec<String> = ids.iter().map(ToString::to_string).collect();
                write!(f, "nodes:{}", ids.join(","))
            }
        }
    }
}

impl FromStr for CutSpec {
    type Err = Error;

    /// Parses `topk:K`, `autogap`, `autogap:M`, `box:W,P` or `nodes:I,J,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidCut(format!("cannot parse cut {s:?}"));
        let (kind, arg) = match s.split_once(':') {
            Some((kind, arg)) => (kind.trim(), Some(arg.trim())),
            None => (s.trim(), None),
        };
        match (kind.to_ascii_lowercase().as_str(), arg) {
            ("topk", Some(k)) => k.parse().map(CutSpec::TopK).map_err(|_| bad()),
            ("autogap", None) => Ok(CutSpec::default()),
            ("autogap", Some(m)) => m
                .parse()
                .map(|window| CutSpec::AutoGap { window })
                .map_err(|_| bad()),
            ("box", Some(bounds)) => {
                let (w, p) = bounds.split_once(',').ok_or_else(bad)?;
                Ok(CutSpec::Box {
                    min_edge_len: w.trim().parse().map_err(|_| bad())?,
                    max_potential: p.trim().parse().map_err(|_| bad())?,
                })
            }
            ("nodes", Some(ids)) => ids
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()
                .map(CutSpec::Nodes),
            _ => Err(bad()),
        }
    }
}

/// Start nodes of the edges `spec` selects, ascending.
pub fn select_edges<T: ParentLinks + ?Sized>(
    tree: &T,
    potential: &PotentialVector,
    spec: &CutSpec,
) -> Result<Vec<usize>> {
    if potential.len() != tree.len() {
        return Err(Error::InvalidCut(format!(
            "{} potentials for {} nodes",
            potential.len(),
            tree.len()
        )));
    }
    let mut selected = match spec {
        CutSpec::TopK(k) => {
            let ranked = e_cut_rank(tree);
            if *k > ranked.len() {
                return Err(Error::InvalidCut(format!(
                    "cannot remove {k} of {} edges",
                    ranked.len()
                )));
            }
            ranked[..*k].iter().map(|e| e.0).collect()
        }
        CutSpec::AutoGap { window } => {
            if *window < 2 {
                return Err(Error::InvalidCut("gap window must be at least 2".into()));
            }
            let ranked = e_cut_rank(tree);
            let lengths: Vec<f64> = ranked.iter().map(|e| e.1).collect();
            let k = auto_gap_k(&lengths, *window);
            ranked[..k].iter().map(|e| e.0).collect()
        }
        CutSpec::Box {
            min_edge_len,
            max_potential,
        } => {
            if !(min_edge_len.is_finite() && max_potential.is_finite()) {
                return Err(Error::InvalidCut("box bounds must be finite".into()));
            }
            decision_points(tree, potential)
                .into_iter()
                .filter(|p| p.edge_len >= *min_edge_len && p.potential <= *max_potential)
                .map(|p| p.node)
                .collect()
        }
        CutSpec::Nodes(ids) => {
            for &i in ids {
                if i >= tree.len() {
                    return Err(Error::InvalidCut(format!("unknown node {i}")));
                }
                if tree.is_root(i) {
                    return Err(Error::InvalidCut(format!("node {i} is a root and has no edge")));
                }
            }
            ids.clone()
        }
    };
    selected.sort_unstable();
    selected.dedup();
    Ok(selected)
}

/// A flat clustering; cluster ids follow the ascending order of root ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    pub labels: Vec<usize>,
    pub clusters: usize,
}

/// Numbers clusters by ascending root id.
pub fn labels_from_roots(roots: &[usize]) -> Clustering {
    let mut distinct = roots.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let labels = roots
        .iter()
        .map(|r| distinct.binary_search(r).expect("root is listed"))
        .collect();
    Clustering {
        labels,
        clusters: distinct.len(),
    }
}

/// Labels of the pieces left after removing `removed`.
pub fn cut_edges<T: ParentLinks + ?Sized>(tree: &T, removed: &[usize]) -> Result<Clustering> {
    Ok(labels_from_roots(&resolve_roots(tree, removed)?))
}

/// Removes the edges `spec` selects and labels the pieces. On an in-tree,
/// removing `K` edges yields `K + 1` clusters.
pub fn apply_cut<T: ParentLinks + ?Sized>(
    tree: &T,
    potential: &PotentialVector,
    spec: &CutSpec,
) -> Result<Clustering> {
    let removed = select_edges(tree, potential, spec)?;
    cut_edges(tree, &removed)
}

/// Serialized in-tree plus the values the decision graph is drawn from.
/// Root entries of `edge_len` are `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionGraph {
    pub n: usize,
    pub parent: Vec<usize>,
    pub edge_len: Vec<Option<f64>>,
    pub potential: Vec<f64>,
    pub points2d: Option<Vec<[f64; 2]>>,
    /// Root count after each bottom-up layer.
    pub trace: Vec<usize>,
}

impl DecisionGraph {
    pub fn export<T: ParentLinks + ?Sized>(
        tree: &T,
        potential: &PotentialVector,
        points2d: Option<Vec<[f64; 2]>>,
        trace: Vec<usize>,
    ) -> Result<Self> {
        let doc = DecisionGraph {
            n: tree.len(),
            parent: tree.parents().to_vec(),
            edge_len: tree
                .edge_weights()
                .iter()
                .enumerate()
                .map(|(i, &w)| (!tree.is_root(i)).then_some(w))
                .collect(),
            potential: potential.as_slice().to_vec(),
            points2d,
            trace,
        };
        doc.validate()?;
        Ok(doc)
    }

    /// Checks array lengths, parent structure (acyclic, every node reaching a
    /// root) and that `edge_len` is null exactly on roots.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.parent.len() != n || self.edge_len.len() != n || self.potential.len() != n {
            return Err(Error::Structure(format!("arrays do not all have length n = {n}")));
        }
        if let Some(points) = &self.points2d {
            if points.len() != n {
                return Err(Error::Structure("points2d length differs from n".into()));
            }
        }
        if !validate_parents(&self.parent).is_forest() {
            return Err(Error::Structure("parent array is not a forest".into()));
        }
        self.to_forest()?;
        PotentialVector::from_vec(self.potential.clone())?;
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.edge_len
            .iter()
            .map(|w| w.unwrap_or(f64::NEG_INFINITY))
            .collect()
    }

    pub fn to_forest(&self) -> Result<Forest> {
        Forest::new(self.parent.clone(), self.weights())
    }

    pub fn to_intree(&self) -> Result<InTree> {
        InTree::new(self.parent.clone(), self.weights(), vec![0; self.n])
    }

    pub fn potential_vector(&self) -> Result<PotentialVector> {
        PotentialVector::from_vec(self.potential.clone())
    }

    pub fn points(&self) -> Vec<DecisionPoint> {
        (0..self.n)
            .filter_map(|i| {
                self.edge_len[i].map(|edge_len| DecisionPoint {
                    node: i,
                    edge_len,
                    potential: self.potential[i],
                })
            })
            .collect()
    }

    pub fn cut(&self, spec: &CutSpec) -> Result<Clustering> {
        apply_cut(&self.to_forest()?, &self.potential_vector()?, spec)
    }
}
