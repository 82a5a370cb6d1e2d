//! File formats, experiment harness and command-line support for
//! [`fourn_core`].
//!
//! * [`io`]: CSV datasets, predictions and importance tables.
//! * [`model`]: fitting a 4N model end to end and its JSON blob.
//! * [`config`] and [`experiment`]: replicated benchmarks over simulated or
//!   loaded data, summarized in a [`report::MetricsReport`].
//! * [`stats`]: the paired sign test used to compare methods.

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod model;
pub mod report;
pub mod stats;

pub use config::{ExperimentConfig, Generator};
pub use error::{FournError, Result};
pub use experiment::run_experiment;
pub use model::{prepare, FittedModel, ModelSettings};
pub use report::MetricsReport;
