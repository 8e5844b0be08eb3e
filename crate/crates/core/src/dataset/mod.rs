//! Point sets, CSV ingestion, synthetic mixtures and pairwise distances.

mod csv;
mod distance;
mod synthetic;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use self::csv::{load_csv, parse_csv, write_csv, Delimiter, LoadOptions};
pub use self::distance::{
    DistanceMatrix, Dissimilarity, PairwiseDistances, Storage, MATRIX_LIMIT,
};
pub use self::synthetic::{generate_gaussian_mixture, GaussianMixtureConfig};

use crate::error::{Error, Result};

/// `N` points of dimension `d`, stored row-major, with optional class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n: usize,
    dim: usize,
    labels: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset from rows. All rows must share one nonzero length and
    /// hold finite values; labels, when given, must match the row count.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let dim = rows[0].len();
        let mut values = Vec::with_capacity(n * dim);
        for (row, point) in rows.into_iter().enumerate() {
            if point.len() != dim {
                return Err(Error::RaggedRow {
                    row: row + 1,
                    expected: dim,
                    found: point.len(),
                });
            }
            values.extend(point);
        }
        Self::from_flat(values, n, dim, labels)
    }

    /// Builds a dataset from a row-major buffer of `n * dim` values.
    pub fn from_flat(
        values: Vec<f64>,
        n: usize,
        dim: usize,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if dim == 0 {
            return Err(Error::InvalidDataset("points have no coordinates".into()));
        }
        if values.len() != n * dim {
            return Err(Error::InvalidDataset(format!(
                "buffer holds {} values, expected {n} x {dim}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite coordinate at point {}, dimension {}",
                pos / dim,
                pos % dim
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::InvalidDataset(format!(
                    "{} labels for {n} points",
                    labels.len()
                )));
            }
        }
        Ok(Self {
            values,
            n,
            dim,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false; a dataset holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Labels mapped to dense ids in order of first appearance.
    pub fn label_ids(&self) -> Option<Vec<usize>> {
        let labels = self.labels.as_ref()?;
        let mut seen: Vec<&str> = Vec::new();
        let ids = labels
            .iter()
            .map(|label| match seen.iter().position(|s| *s == label) {
                Some(id) => id,
                None => {
                    seen.push(label);
                    seen.len() - 1
                }
            })
            .collect();
        Some(ids)
    }

    /// Maps every dimension affinely onto `[0, 1]`. A constant dimension
    /// becomes all zeros.
    pub fn normalize_minmax(&self) -> Dataset {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for (c, &v) in p.iter().enumerate() {
                lo[c] = lo[c].min(v);
                hi[c] = hi[c].max(v);
            }
        }
        let mut values = self.values.clone();
        for p in values.chunks_exact_mut(self.dim) {
            for (c, v) in p.iter_mut().enumerate() {
                let span = hi[c] - lo[c];
                *v = if span > 0.0 { (*v - lo[c]) / span } else { 0.0 };
            }
        }
        Dataset {
            values,
            n: self.n,
            dim: self.dim,
            labels: self.labels.clone(),
        }
    }

    /// Distance between points `i` and `j` under `metric`.
    pub fn distance(&self, metric: Metric, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match metric {
            Metric::Euclidean => distance::euclidean(self.point(i), self.point(j)),
            Metric::Cosine => {
                let (a, b) = (self.point(i), self.point(j));
                distance::cosine_from_parts(
                    distance::dot(a, b),
                    distance::norm(a),
                    distance::norm(b),
                )
            }
        }
    }

    /// Reorders the points so that new point `r` is old point `order[r]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Dataset> {
        let mut check = vec![false; self.n];
        if order.len() != self.n || order.iter().any(|&i| i >= self.n || std::mem::replace(&mut check[i], true)) {
            return Err(Error::InvalidConfig("order is not a permutation".into()));
        }
        let values = order
            .iter()
            .flat_map(|&i| self.point(i).iter().copied())
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| order.iter().map(|&i| l[i].clone()).collect());
        Dataset::from_flat(values, self.n, self.dim, labels)
    }
}

/// Pairwise dissimilarity between points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    /// `1 - cos(angle)`; a zero vector is at distance 1 from everything else.
    Cosine,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::InvalidConfig(format!("unknown metric {other:?}"))),
        }
    }
}
