use rayon::prelude::*;

use super::{Dataset, Metric};
use crate::error::{Error, Result};

/// Above this many points the pairwise matrix is not materialized.
pub const MATRIX_LIMIT: usize = 20_000;

/// Read access to a symmetric, nonnegative dissimilarity with zero diagonal.
///
/// Every algorithm in this crate reaches distances only through this trait.
pub trait Dissimilarity: Sync {
    fn len(&self) -> usize;

    fn distance(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Where [`PairwiseDistances`] keeps its values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Storage {
    /// Materialize the upper triangle once.
    Matrix,
    /// Recompute each distance on request.
    OnDemand,
    /// `Matrix` up to [`MATRIX_LIMIT`] points, `OnDemand` beyond.
    Auto,
}

/// Distances between the points of a [`Dataset`] under a [`Metric`].
#[derive(Debug)]
pub struct PairwiseDistances<'a> {
    data: &'a Dataset,
    metric: Metric,
    norms: Vec<f64>,
    condensed: Option<Vec<f64>>,
}

impl<'a> PairwiseDistances<'a> {
    pub fn new(data: &'a Dataset, metric: Metric) -> Self {
        Self::with_storage(data, metric, Storage::Auto)
    }

    pub fn with_storage(data: &'a Dataset, metric: Metric, storage: Storage) -> Self {
        let norms = match metric {
            Metric::Cosine => data.points().map(norm).collect(),
            Metric::Euclidean => Vec::new(),
        };
        let mut out = Self {
            data,
            metric,
            norms,
            condensed: None,
        };
        let materialize = match storage {
            Storage::Matrix => true,
            Storage::OnDemand => false,
            Storage::Auto => data.len() <= MATRIX_LIMIT,
        };
        if materialize {
            out.condensed = Some(out.condensed_matrix());
        }
        out
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn is_materialized(&self) -> bool {
        self.condensed.is_some()
    }

    fn compute(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.data.point(i), self.data.point(j));
        match self.metric {
            Metric::Euclidean => euclidean(a, b),
            Metric::Cosine => cosine_from_parts(dot(a, b), self.norms[i], self.norms[j]),
        }
    }

    fn condensed_matrix(&self) -> Vec<f64> {
        let n = self.data.len();
        let mut buf = vec![0.0; n * n.saturating_sub(1) / 2];
        let mut rows = Vec::with_capacity(n);
        let mut rest = buf.as_mut_slice();
        for i in 0..n {
            let (row, tail) = rest.split_at_mut(n - i - 1);
            rows.push((i, row));
            rest = tail;
        }
        rows.into_par_iter().for_each(|(i, row)| {
            for (slot, j) in row.iter_mut().zip(i + 1..n) {
                *slot = self.compute(i, j);
            }
        });
        buf
    }
}

impl Dissimilarity for PairwiseDistances<'_> {
    fn len(&self) -> usize {
        self.data.len()
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match &self.condensed {
            Some(buf) => buf[condensed_index(self.data.len(), i.min(j), i.max(j))],
            None => self.compute(i, j),
        }
    }
}

/// An explicit square dissimilarity matrix, for inputs that are not vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Accepts a square, symmetric, finite, nonnegative matrix with zero diagonal.
    pub fn from_square(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: n,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidDataset(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !v.is_finite() || v < 0.0 || v != values[j * n + i] {
                    return Err(Error::InvalidDataset(format!(
                        "entry ({i}, {j}) breaks symmetry, finiteness or sign"
                    )));
                }
            }
        }
        Ok(Self { n, values })
    }

    /// Materializes any dissimilarity as a full matrix.
    pub fn from_dissimilarity<D: Dissimilarity + ?Sized>(dist: &D) -> Self {
        let n = dist.len();
        let values = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| dist.distance(i, j))
            .collect();
        Self { n, values }
    }
}

impl Dissimilarity for DistanceMatrix {
    fn len(&self) -> usize {
        self.n
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            t * t
        })
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn cosine_from_parts(dot: f64, norm_a: f64, norm_b: f64) -> f64 {
    if norm_a == 0.0 || norm_b == 0.0 {
        return 1.0;
    }
    (1.0 - dot / (norm_a * norm_b)).max(0.0)
}
