//! Node potentials: per-layer accumulation over a neighbor graph and the
//! global exponential-kernel density. Lower potential means denser.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dissimilarity;
use crate::error::{Error, Result};
use crate::neighborhood::NeighborGraph;

/// How one neighbor's distance contributes to a node's potential.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialMode {
    /// `D(x) = x`
    #[serde(rename = "sumdist")]
    SumDistance,
    /// `D(x) = -exp(-x / sigma)`
    #[default]
    #[serde(rename = "expkernel")]
    ExpKernel,
}

impl fmt::Display for PotentialMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PotentialMode::SumDistance => "sumdist",
            PotentialMode::ExpKernel => "expkernel",
        })
    }
}

impl FromStr for PotentialMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sumdist" | "sumdistance" | "sum" => Ok(PotentialMode::SumDistance),
            "expkernel" | "exp" => Ok(PotentialMode::ExpKernel),
            other => Err(Error::InvalidConfig(format!("unknown potential mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialConfig {
    pub mode: PotentialMode,
    /// Kernel bandwidth; only read in [`PotentialMode::ExpKernel`].
    pub sigma: f64,
}

impl PotentialConfig {
    pub fn sum_distance() -> Self {
        Self {
            mode: PotentialMode::SumDistance,
            sigma: 1.0,
        }
    }

    pub fn exp_kernel(sigma: f64) -> Result<Self> {
        let config = Self {
            mode: PotentialMode::ExpKernel,
            sigma,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == PotentialMode::ExpKernel && !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Contribution `D(x)` of one neighbor at distance `x`.
    #[inline]
    pub fn term(&self, x: f64) -> f64 {
        match self.mode {
            PotentialMode::SumDistance => x,
            PotentialMode::ExpKernel => -(-x / self.sigma).exp(),
        }
    }
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            mode: PotentialMode::ExpKernel,
            sigma: 1.0,
        }
    }
}

/// Accumulated potential of every node, indexed by node id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PotentialVector(Vec<f64>);

impl PotentialVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("potentials must be finite".into()));
        }
        Ok(Self(values))
    }

    /// Potential as negated density.
    pub fn from_density(density: &[f64]) -> Result<Self> {
        Self::from_vec(density.iter().map(|r| -r).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Adds `sum_{j in neighbors(i)} D(d_ij)` to every node of `graph`.
    /// Nodes outside the graph are untouched.
    pub fn accumulate(&mut self, graph: &NeighborGraph, config: &PotentialConfig) {
        let increments: Vec<(usize, f64)> = graph
            .iter()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(i, list)| (i, list.iter().map(|nb| config.term(nb.distance)).sum()))
            .collect();
        for (i, inc) in increments {
            self.0[i] += inc;
        }
    }

    /// `true` if node `a` precedes node `b` in the `(potential, id)` order.
    #[inline]
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.order(a, b) == Ordering::Less
    }

    /// Compares nodes by `(potential, id)`. Potentials compare numerically,
    /// so `-0.0` and `0.0` tie.
    #[inline]
    pub fn order(&self, a: usize, b: usize) -> Ordering {
        numeric_then_id(&self.0, a, b)
    }
}

impl Index<usize> for PotentialVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Orders `a` and `b` by `values` numerically, then by id.
#[inline]
pub(crate) fn numeric_then_id(values: &[f64], a: usize, b: usize) -> Ordering {
    let (va, vb) = (values[a], values[b]);
    if va < vb {
        Ordering::Less
    } else if va > vb {
        Ordering::Greater
    } else {
        a.cmp(&b)
    }
}

/// Functional form of [`PotentialVector::accumulate`].
pub fn accumulate_potential(
    prev: &PotentialVector,
    graph: &NeighborGraph,
    config: &PotentialConfig,
) -> PotentialVector {
    let mut next = prev.clone();
    next.accumulate(graph, config);
    next
}

/// Exponential-kernel density `rho_i = sum_{j != i} exp(-d_ij / sigma)`.
pub fn kernel_density<D: Dissimilarity + ?Sized>(dist: &D, sigma: f64) -> Result<Vec<f64>> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    let n = dist.len();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (-dist.distance(i, j) / sigma).exp())
                .sum()
        })
        .collect())
}
