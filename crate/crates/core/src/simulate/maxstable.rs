use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::{sim_rng, uniform_locations, GpSampler};
use crate::covariance::CovParams;
use crate::error::{Error, Result};
use crate::spatial::{Location, SpatialDataset};

/// Largest site count accepted by [`sim_maxstable`].
pub const MAXSTABLE_CAP: usize = 10_000;
/// Spectral functions drawn before giving up.
pub const MAX_SPECTRAL_FUNCTIONS: usize = 1_000_000;
/// Bound assumed for `max(0, W)` in the stopping rule.
pub const TRUNCATION_BOUND: f64 = 4.0;

/// GEV location, scale and shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevMargins {
    pub loc: f64,
    pub scale: f64,
    pub shape: f64,
}

impl Default for GevMargins {
    fn default() -> Self {
        GevMargins {
            loc: 1.0,
            scale: 2.0,
            shape: 0.3,
        }
    }
}

/// Map a unit-Fréchet value to GEV margins.
pub fn frechet_to_gev(z: f64, margins: &GevMargins) -> f64 {
    if margins.shape == 0.0 {
        margins.loc + margins.scale * z.ln()
    } else {
        margins.loc + margins.scale * (z.powf(margins.shape) - 1.0) / margins.shape
    }
}

/// Schlather process with unit-Fréchet margins at fixed locations.
#[derive(Debug, Clone)]
pub struct MaxStableSampler {
    field: GpSampler,
}

impl MaxStableSampler {
    /// Standard Gaussian spectral fields with exponential correlation of
    /// range `rho`.
    pub fn new(locs: &[Location], rho: f64) -> Result<Self> {
        let params = CovParams {
            mu: 0.0,
            sigma2: 1.0,
            tau2: 0.0,
            rho,
        };
        Ok(MaxStableSampler {
            field: GpSampler::new(locs, params)?,
        })
    }

    /// One draw, strictly positive at every site.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let n = self.field.len();
        let scale = (2.0 * PI).sqrt();
        let mut z = vec![0.0; n];
        if n == 0 {
            return Ok(z);
        }
        let mut gamma = 0.0;
        for _ in 0..MAX_SPECTRAL_FUNCTIONS {
            gamma += rng.sample::<f64, _>(Exp1);
            let zeta = 1.0 / gamma;
            let floor = z.iter().copied().fold(f64::INFINITY, f64::min);
            if scale * zeta * TRUNCATION_BOUND < floor {
                return Ok(z);
            }
            let w = self.field.sample(rng);
            for (zs, ws) in z.iter_mut().zip(w) {
                let v = scale * zeta * ws.max(0.0);
                if v > *zs {
                    *zs = v;
                }
            }
        }
        Err(Error::MaxStableTruncation(MAX_SPECTRAL_FUNCTIONS))
    }
}

/// Max-stable draw with unit-Fréchet margins at `n` uniform locations.
pub fn sim_maxstable_unit(n: usize, rho: f64, seed: u64) -> Result<SpatialDataset> {
    if n > MAXSTABLE_CAP {
        return Err(Error::InvalidParameter(format!(
            "max-stable simulation supports at most {MAXSTABLE_CAP} sites, got {n}"
        )));
    }
    let mut rng = sim_rng(seed);
    let locs = uniform_locations(n, &mut rng);
    let z = MaxStableSampler::new(&locs, rho)?.sample(&mut rng)?;
    SpatialDataset::new(locs, z)
}

/// Max-stable draw at `n` uniform locations with GEV margins.
pub fn sim_maxstable(n: usize, rho: f64, margins: GevMargins, seed: u64) -> Result<SpatialDataset> {
    if !(margins.loc.is_finite() && margins.scale > 0.0 && margins.shape.is_finite()) {
        return Err(Error::InvalidParameter(format!("invalid GEV margins: {margins:?}")));
    }
    sim_maxstable_unit(n, rho, seed)?.map_responses(|z| frechet_to_gev(z, &margins))
}
