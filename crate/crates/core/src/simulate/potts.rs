use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::sim_rng;
use crate::error::{Error, Result};
use crate::spatial::{Location, SpatialDataset};

/// `ln(1 + √G)`.
pub fn critical_beta(labels: usize) -> f64 {
    (1.0 + (labels as f64).sqrt()).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PottsConfig {
    pub labels: usize,
    pub beta: f64,
    pub sweeps: usize,
}

impl Default for PottsConfig {
    fn default() -> Self {
        PottsConfig {
            labels: 8,
            beta: critical_beta(8),
            sweeps: 500,
        }
    }
}

/// Simulated responses with the latent labels (`1..=G`), site-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct PottsSample {
    pub dataset: SpatialDataset,
    pub labels: Vec<usize>,
}

/// Conditional label probabilities given `counts[k]` neighbors carrying
/// label `k + 1`.
pub fn potts_conditional(counts: &[usize], beta: f64) -> Vec<f64> {
    let top = counts.iter().copied().max().unwrap_or(0) as f64;
    let mut w: Vec<f64> = counts.iter().map(|&c| (beta * (c as f64 - top)).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Gibbs-sampled Potts labels on a square lattice covering the unit square,
/// truncated to the first `n` sites in row-major order, with responses
/// `N(g² + 5g, √g)` (variance `√g`).
pub fn sim_potts(n: usize, config: PottsConfig, seed: u64) -> Result<PottsSample> {
    let g = config.labels;
    if g < 2 || !config.beta.is_finite() || config.beta < 0.0 {
        return Err(Error::InvalidParameter(format!("invalid Potts settings: {config:?}")));
    }
    let side = (n as f64).sqrt().ceil() as usize;
    let mut rng = sim_rng(seed);
    let mut grid: Vec<usize> = (0..side * side).map(|_| rng.random_range(0..g)).collect();
    let mut counts = vec![0usize; g];
    let mut probs = vec![0.0; g];
    for _ in 0..config.sweeps {
        for r in 0..side {
            for c in 0..side {
                counts.iter_mut().for_each(|v| *v = 0);
                if r > 0 {
                    counts[grid[(r - 1) * side + c]] += 1;
                }
                if r + 1 < side {
                    counts[grid[(r + 1) * side + c]] += 1;
                }
                if c > 0 {
                    counts[grid[r * side + c - 1]] += 1;
                }
                if c + 1 < side {
                    counts[grid[r * side + c + 1]] += 1;
                }
                let top = counts.iter().copied().max().unwrap_or(0) as f64;
                let mut total = 0.0;
                for (p, &k) in probs.iter_mut().zip(&counts) {
                    *p = (config.beta * (k as f64 - top)).exp();
                    total += *p;
                }
                let mut u = rng.random::<f64>() * total;
                let mut pick = g - 1;
                for (k, &p) in probs.iter().enumerate() {
                    if u < p {
                        pick = k;
                        break;
                    }
                    u -= p;
                }
                grid[r * side + c] = pick;
            }
        }
    }
    let coord = |i: usize| if side == 1 { 0.5 } else { i as f64 / (side - 1) as f64 };
    let mut locs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for (idx, &lab) in grid.iter().take(n).enumerate() {
        let (r, c) = (idx / side, idx % side);
        locs.push(Location { x: coord(c), y: coord(r) });
        let gv = (lab + 1) as f64;
        let z: f64 = rng.sample(StandardNormal);
        ys.push(gv * gv + 5.0 * gv + gv.powf(0.25) * z);
        labels.push(lab + 1);
    }
    Ok(PottsSample {
        dataset: SpatialDataset::new(locs, ys)?,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conditional_ratio_all_neighbors_agree() {
        let mut counts = [0usize; 8];
        counts[2] = 4;
        let p = potts_conditional(&counts, critical_beta(8));
        let expect = (1.0 + 8f64.sqrt()).powi(4);
        assert!((p[2] / p[0] - expect).abs() < 1e-9 * expect);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn labels_and_layout() {
        let s = sim_potts(10, PottsConfig { sweeps: 5, ..Default::default() }, 1).unwrap();
        assert_eq!(s.dataset.len(), 10);
        assert!(s.labels.iter().all(|&l| (1..=8).contains(&l)));
        let l = s.dataset.locations();
        assert_eq!(l[0], Location { x: 0.0, y: 0.0 });
        assert_eq!(l[3], Location { x: 1.0, y: 0.0 });
        assert_eq!(l[4], Location { x: 0.0, y: 1.0 / 3.0 });
        let one = sim_potts(1, PottsConfig::default(), 1).unwrap();
        assert_eq!(one.dataset.locations()[0], Location { x: 0.5, y: 0.5 });
    }
}
