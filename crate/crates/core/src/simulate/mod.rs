//! Simulators for the benchmark processes on the unit square.
//!
//! Every generator is a pure function of its seed. Locations are drawn
//! first from the same stream as the responses, so a seed fixes both.

mod gp;
mod maxstable;
mod potts;

pub use gp::{sample_gp_sequential_at, sim_gp, sim_gp_sequential, transform_gp, GpSampler, DENSE_CAP};
pub use maxstable::{
    frechet_to_gev, sim_maxstable, sim_maxstable_unit, GevMargins, MaxStableSampler, MAXSTABLE_CAP,
    MAX_SPECTRAL_FUNCTIONS, TRUNCATION_BOUND,
};
pub use potts::{critical_beta, potts_conditional, sim_potts, PottsConfig, PottsSample};

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::seed;
use crate::spatial::Location;

/// Generator used by every simulator for a given seed.
pub fn sim_rng(seed_value: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed::stream(seed_value, "simulate"))
}

/// `n` independent uniform locations on `[0, 1)²`.
pub fn uniform_locations<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Location> {
    (0..n)
        .map(|_| Location {
            x: rng.random::<f64>(),
            y: rng.random::<f64>(),
        })
        .collect()
}
