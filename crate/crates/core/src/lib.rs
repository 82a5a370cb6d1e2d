//! Nearest-neighbor neural network (4N) spatial prediction.
//!
//! The crate is `no_std` (with `alloc`) and contains the numerical core:
//!
//! * [`spatial`]: locations, datasets, reference orderings and exact
//!   k-nearest-neighbor search backed by a kd-tree.
//! * [`covariance`] and [`linalg`]: the exponential covariance model and the
//!   small dense Cholesky routines everything else leans on.
//! * [`vecchia`]: the nearest-neighbor (Vecchia) Gaussian log-likelihood and
//!   a Nelder–Mead maximum-likelihood fit of the covariance parameters.
//! * [`kriging`]: local simple kriging from `m` neighbors.
//! * [`features`]: the three 4N input designs and their standardization.
//! * [`neural`]: a multilayer perceptron with backpropagation, dropout,
//!   ADAM and early stopping, trained under squared or check loss.
//! * [`importance`]: Garson connection-weight importance.
//! * [`simulate`]: Gaussian, transformed Gaussian, Schlather max-stable and
//!   Potts benchmark processes.
//! * [`metrics`]: prediction metrics used by the benchmark harness.
//!
//! File formats, the command line and the experiment runner live in the
//! companion `fourn` crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod covariance;
pub mod error;
pub mod features;
pub mod importance;
pub mod kriging;
pub mod linalg;
pub mod metrics;
pub mod neural;
pub mod seed;
pub mod simulate;
pub mod spatial;
pub mod vecchia;

pub use covariance::CovParams;
pub use error::{Error, Result};
pub use features::{FeatureKind, FeatureMatrix, FeatureSpec, Standardization};
pub use neural::{LossSpec, MlpModel, TrainConfig};
pub use spatial::{Location, NeighborMode, NeighborTable, OrderingScheme, SpatialDataset};
