use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{sim_rng, uniform_locations};
use crate::covariance::{cov_matrix_unchecked, CovParams};
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::spatial::{build_neighbor_table_training, Location, SpatialDataset};
use crate::vecchia::conditional_moments;

/// Largest site count sampled through a dense Cholesky factor.
pub const DENSE_CAP: usize = 20_000;

fn check_sim_params(params: &CovParams) -> Result<()> {
    let ok = params.mu.is_finite()
        && params.sigma2.is_finite()
        && params.tau2.is_finite()
        && params.rho.is_finite()
        && params.sigma2 >= 0.0
        && params.tau2 >= 0.0
        && params.rho > 0.0;
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "simulation needs finite mu, sigma2 >= 0, tau2 >= 0, rho > 0: {params:?}"
        )))
    }
}

/// Exact Gaussian sampler at fixed locations.
#[derive(Debug, Clone)]
pub struct GpSampler {
    params: CovParams,
    n: usize,
    chol: Option<Cholesky>,
}

impl GpSampler {
    /// Factor the nugget-free kernel matrix at `locs`. A tiny diagonal
    /// jitter is added only if the plain factorization fails.
    pub fn new(locs: &[Location], params: CovParams) -> Result<Self> {
        check_sim_params(&params)?;
        let n = locs.len();
        if n > DENSE_CAP {
            return Err(Error::DenseCapExceeded { n, cap: DENSE_CAP });
        }
        let chol = if params.sigma2 == 0.0 {
            None
        } else {
            let mut last = Error::SingularCovariance;
            let mut found = None;
            for jitter in [0.0, 1e-12, 1e-10, 1e-8] {
                match Cholesky::from_vec(cov_matrix_unchecked(locs, &params, jitter * params.sigma2), n) {
                    Ok(c) => {
                        found = Some(c);
                        break;
                    }
                    Err(e) => last = e,
                }
            }
            Some(found.ok_or(last)?)
        };
        Ok(GpSampler { params, n, chol })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// One draw of `Y = μ + L z + τ ε`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.n;
        let latent = match &self.chol {
            Some(c) => {
                let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                c.lower_mul(&z)
            }
            None => alloc::vec![0.0; n],
        };
        let tau = self.params.tau2.sqrt();
        latent
            .into_iter()
            .map(|w| {
                let e: f64 = rng.sample(StandardNormal);
                self.params.mu + w + tau * e
            })
            .collect()
    }
}

/// Gaussian process with exponential covariance at `n` uniform locations,
/// sampled exactly through a dense Cholesky factor.
pub fn sim_gp(n: usize, params: CovParams, seed: u64) -> Result<SpatialDataset> {
    if n > DENSE_CAP {
        return Err(Error::DenseCapExceeded { n, cap: DENSE_CAP });
    }
    let mut rng = sim_rng(seed);
    let locs = uniform_locations(n, &mut rng);
    let y = GpSampler::new(&locs, params)?.sample(&mut rng);
    SpatialDataset::new(locs, y)
}

/// Draw at fixed locations from the nearest-neighbor approximation: site `i`
/// is sampled from its Gaussian conditional given its `m` nearest
/// predecessors in the given order. `m = 0` gives independent draws.
pub fn sample_gp_sequential_at<R: Rng + ?Sized>(
    locs: &[Location],
    params: &CovParams,
    m: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_sim_params(params)?;
    let n = locs.len();
    if m == 0 || params.sigma2 == 0.0 || n == 0 {
        let sd = params.sill().sqrt();
        return Ok((0..n)
            .map(|_| params.mu + sd * rng.sample::<f64, _>(StandardNormal))
            .collect());
    }
    let table = build_neighbor_table_training(locs, m)?;
    let mut y = Vec::with_capacity(n);
    let mut pairs = Vec::new();
    let mut resid = Vec::new();
    for (i, list) in table.iter().enumerate() {
        let k = list.len();
        pairs.clear();
        pairs.resize(k * k, 0.0);
        for a in 0..k {
            for b in 0..a {
                let d = locs[list.indices[a]].dist(locs[list.indices[b]]);
                pairs[a * k + b] = d;
                pairs[b * k + a] = d;
            }
        }
        resid.clear();
        resid.extend(list.indices.iter().map(|&j| y[j] - params.mu));
        let (mean, var) = conditional_moments(params, &list.distances, &pairs, &resid).map_err(|e| match e {
            Error::NotPositiveDefinite { pivot, .. } => Error::NotPositiveDefinite { row: i, pivot },
            other => other,
        })?;
        let z: f64 = rng.sample(StandardNormal);
        y.push(mean + var.sqrt() * z);
    }
    Ok(y)
}

/// Sequential nearest-neighbor generation at `n` uniform locations, in
/// generation order. Scales to sizes beyond [`DENSE_CAP`].
pub fn sim_gp_sequential(n: usize, params: CovParams, m: usize, seed: u64) -> Result<SpatialDataset> {
    let mut rng = sim_rng(seed);
    let locs = uniform_locations(n, &mut rng);
    let y = sample_gp_sequential_at(&locs, &params, m, &mut rng)?;
    SpatialDataset::new(locs, y)
}

/// `y³/100 + exp(y/5)/10`, strictly increasing.
pub fn transform_gp(y: f64) -> f64 {
    y * y * y / 100.0 + (y / 5.0).exp() / 10.0
}
