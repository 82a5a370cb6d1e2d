#![allow(dead_code)]

use fourn_core::{CovParams, Location, SpatialDataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_locations(n: usize, rng: &mut ChaCha8Rng) -> Vec<Location> {
    (0..n).map(|_| Location::new(rng.random(), rng.random())).collect()
}

pub fn random_dataset(n: usize, rng: &mut ChaCha8Rng) -> SpatialDataset {
    let locs = random_locations(n, rng);
    let ys = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    SpatialDataset::new(locs, ys).unwrap()
}

pub fn random_params(rng: &mut ChaCha8Rng) -> CovParams {
    CovParams {
        mu: rng.random_range(-1.0..1.0),
        sigma2: rng.random_range(0.5..5.0),
        tau2: rng.random_range(0.1..1.0),
        rho: rng.random_range(0.05..0.5),
    }
}

/// Dense covariance of `Y`, built entry by entry.
pub fn dense_cov(locs: &[Location], p: &CovParams) -> Vec<Vec<f64>> {
    locs.iter()
        .map(|a| {
            locs.iter()
                .map(|b| {
                    let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
                    p.sigma2 * (-d / p.rho).exp() + if d == 0.0 { p.tau2 } else { 0.0 }
                })
                .collect()
        })
        .collect()
}

/// Gaussian elimination with partial pivoting: `(x, ln|det A|)` for `A x = b`.
pub fn lu_solve(a: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, f64) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    let mut logdet = 0.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        let d = m[col][col];
        logdet += d.abs().ln();
        for r in col + 1..n {
            let f = m[r][col] / d;
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    (x, logdet)
}

/// Exact joint Gaussian log-density of `y` under `N(μ1, C)`.
pub fn joint_logdensity(locs: &[Location], y: &[f64], p: &CovParams) -> f64 {
    let c = dense_cov(locs, p);
    let r: Vec<f64> = y.iter().map(|v| v - p.mu).collect();
    let (x, logdet) = lu_solve(&c, &r);
    let quad: f64 = r.iter().zip(&x).map(|(a, b)| a * b).sum();
    -0.5 * (y.len() as f64 * (2.0 * std::f64::consts::PI).ln() + logdet + quad)
}

/// `k` nearest of `candidates` to `q` by full sort on (squared distance, index).
pub fn linear_scan(locs: &[Location], q: Location, candidates: std::ops::Range<usize>, k: usize) -> Vec<(usize, f64)> {
    let mut all: Vec<(usize, f64)> = candidates
        .map(|j| (j, (locs[j].x - q.x).powi(2) + (locs[j].y - q.y).powi(2)))
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}
