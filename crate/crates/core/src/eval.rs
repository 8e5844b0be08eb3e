//! Clustering error against reference labels and parameter sweeps.

use std::collections::HashMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cuts::CutSpec;
use crate::dataset::{Dataset, Metric, PairwiseDistances};
use crate::error::{Error, Result};
use crate::pipeline::{bottom_up, Method};
use crate::potential::{PotentialConfig, PotentialMode};

/// Fraction of points outside their cluster's majority reference label.
/// Majority ties go to the smaller label.
pub fn error_rate<T: Ord + std::hash::Hash>(predicted: &[usize], truth: &[T]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::LabelLengthMismatch {
            predicted: predicted.len(),
            truth: truth.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut counts: HashMap<usize, HashMap<&T, usize>> = HashMap::new();
    for (&c, t) in predicted.iter().zip(truth) {
        *counts.entry(c).or_default().entry(t).or_default() += 1;
    }
    let correct: usize = counts
        .values()
        .map(|by_label| {
            by_label
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
                .map_or(0, |(_, &n)| n)
        })
        .sum();
    Ok((predicted.len() - correct) as f64 / predicted.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub clusters: usize,
    /// Clusters with more than one member.
    pub clusters_nonsingleton: usize,
    /// `None` without reference labels.
    pub error: Option<f64>,
}

pub fn cluster_stats<T: Ord + std::hash::Hash>(labels: &[usize], truth: Option<&[T]>) -> Result<ClusterStats> {
    let mut sizes: HashMap<usize, usize> = HashMap::new();
    for &l in labels {
        *sizes.entry(l).or_default() += 1;
    }
    Ok(ClusterStats {
        clusters: sizes.len(),
        clusters_nonsingleton: sizes.values().filter(|&&s| s > 1).count(),
        error: truth.map(|t| error_rate(labels, t)).transpose()?,
    })
}

fn default_cut() -> CutSpec {
    CutSpec::default()
}

/// A grid of D-NND runs over the same data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub ks: Vec<usize>,
    pub sigmas: Vec<f64>,
    pub modes: Vec<PotentialMode>,
    #[serde(default = "default_cut")]
    pub cut: CutSpec,
    /// Each seed reruns the grid on a shuffled point order. Empty means one
    /// run in file order.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub normalize: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ks.is_empty() || self.sigmas.is_empty() || self.modes.is_empty() {
            return Err(Error::InvalidConfig("ks, sigmas and modes must be non-empty".into()));
        }
        if self.ks.contains(&0) {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        for &sigma in &self.sigmas {
            PotentialConfig {
                mode: PotentialMode::ExpKernel,
                sigma,
            }
            .validate()?;
        }
        Ok(())
    }

    /// The `(k, sigma, mode)` cells in declaration order.
    pub fn cells(&self) -> Vec<(usize, f64, PotentialMode)> {
        let mut cells = Vec::new();
        for &k in &self.ks {
            for &sigma in &self.sigmas {
                for &mode in &self.modes {
                    cells.push((k, sigma, mode));
                }
            }
        }
        cells
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub sigma: f64,
    pub mode: PotentialMode,
    /// Shuffle seed, or `None` for file order.
    pub seed: Option<u64>,
    pub stats: ClusterStats,
}

/// Runs every cell of `config` once per repetition. Rows come out cell-major,
/// repetitions in seed order.
pub fn run_sweep(data: &Dataset, config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let prepared;
    let data = if config.normalize {
        prepared = data.normalize_minmax();
        &prepared
    } else {
        data
    };
    let reps: Vec<Option<u64>> = if config.seeds.is_empty() {
        vec![None]
    } else {
        config.seeds.iter().copied().map(Some).collect()
    };
    let cells = config.cells();
    let mut by_rep: Vec<Vec<SweepRow>> = Vec::with_capacity(reps.len());
    for &seed in &reps {
        let shuffled;
        let view = match seed {
            None => data,
            Some(s) => {
                let mut order: Vec<usize> = (0..data.len()).collect();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
                shuffled = data.permuted(&order)?;
                &shuffled
            }
        };
        let truth = view.labels();
        let dist = PairwiseDistances::new(view, config.metric);
        let rows = cells
            .par_iter()
            .map(|&(k, sigma, mode)| {
                let potential = PotentialConfig { mode, sigma };
                let built = bottom_up(&dist, Method::Dnnd, k, &potential)?;
                let clustering = built.cut(Some(&config.cut))?;
                Ok(SweepRow {
                    k,
                    sigma,
                    mode,
                    seed,
                    stats: cluster_stats(&clustering.labels, truth)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        by_rep.push(rows);
    }
    let mut out = Vec::with_capacity(cells.len() * reps.len());
    for cell in 0..cells.len() {
        for rows in &by_rep {
            out.push(rows[cell].clone());
        }
    }
    Ok(out)
}

/// Writes `k,sigma,mode,clusters,clusters_nonsingleton,error`. The error
/// cell is empty when no reference labels were available.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "k,sigma,mode,clusters,clusters_nonsingleton,error")?;
    for r in rows {
        let error = r.stats.error.map(|e| e.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.k, r.sigma, r.mode, r.stats.clusters, r.stats.clusters_nonsingleton, error
        )?;
    }
    Ok(())
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, var.sqrt()))
}

/// Error rate summary over all rows that carry one.
pub fn summarize(rows: &[SweepRow]) -> Option<(f64, f64)> {
    let errors: Vec<f64> = rows.iter().filter_map(|r| r.stats.error).collect();
    mean_std(&errors)
}
