use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

const MEAN_ATTEMPTS: usize = 10_000;

/// A mixture of spherical unit-variance Gaussians with well-separated means.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixtureConfig {
    /// Number of components.
    pub components: usize,
    /// Total number of points.
    pub points: usize,
    pub dim: usize,
    /// Minimum distance between any two means, in component standard deviations.
    pub separation: f64,
    pub seed: u64,
}

impl GaussianMixtureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.components == 0 {
            return bad("at least one component is required");
        }
        if self.points < self.components {
            return bad("fewer points than components");
        }
        if self.dim == 0 {
            return bad("dimension must be at least 1");
        }
        if !(self.separation.is_finite() && self.separation > 0.0) {
            return bad("separation must be a positive finite number");
        }
        Ok(())
    }

    /// Side of the cube the means are drawn from; grows with the number of
    /// components a low-dimensional cube has to hold.
    fn cube_side(&self) -> f64 {
        2.0 * self.separation * (self.components as f64).powf(1.0 / self.dim as f64)
    }
}

/// Samples the mixture. Points are emitted grouped by component, component `c`
/// receiving `points / components` points plus one if `c < points % components`;
/// labels are the component index.
pub fn generate_gaussian_mixture(config: &GaussianMixtureConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let means = sample_means(
        &mut rng,
        config.components,
        config.dim,
        config.separation,
        config.cube_side(),
        MEAN_ATTEMPTS,
    )?;

    let base = config.points / config.components;
    let extra = config.points % config.components;
    let mut values = Vec::with_capacity(config.points * config.dim);
    let mut labels = Vec::with_capacity(config.points);
    for (c, mean) in means.iter().enumerate() {
        let count = base + usize::from(c < extra);
        for _ in 0..count {
            values.extend(mean.iter().map(|m| m + rng.sample::<f64, _>(StandardNormal)));
            labels.push(c.to_string());
        }
    }
    Dataset::from_flat(values, config.points, config.dim, Some(labels))
}

/// Draws means uniformly from `[0, side]^dim`, rejecting any candidate closer
/// than `separation` to an accepted one.
fn sample_means(
    rng: &mut ChaCha8Rng,
    count: usize,
    dim: usize,
    separation: f64,
    side: f64,
    attempts: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut means: Vec<Vec<f64>> = Vec::with_capacity(count);
    while means.len() < count {
        let mut placed = false;
        for _ in 0..attempts {
            let candidate: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..=side)).collect();
            let clear = means
                .iter()
                .all(|m| super::distance::euclidean(m, &candidate) >= separation);
            if clear {
                means.push(candidate);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Generation(format!(
                "could not place mean {} of {count} at separation {separation} after {attempts} attempts",
                means.len() + 1
            )));
        }
    }
    Ok(means)
}
