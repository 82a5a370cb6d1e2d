//! Replicated benchmark runs.
//!
//! Replication `r` of an experiment with seed `s` draws everything from
//! `seed::derive(s, r)`: the data, the train/test split and the network
//! seed use separate named streams of it. Replications are independent and
//! run in parallel; the report is assembled in replication order, so it does
//! not depend on scheduling.

use fourn_core::metrics::{empirical_quantile, interval_coverage, mean_check_loss, mse};
use fourn_core::seed;
use fourn_core::simulate::{
    sim_gp, sim_gp_sequential, sim_maxstable, sim_potts, transform_gp, DENSE_CAP,
};
use fourn_core::{FeatureKind, LossSpec, SpatialDataset};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Generator};
use crate::error::Result;
use crate::io::load_csv;
use crate::model::prepare;
use crate::report::{MetricsReport, ReplicationOutcome};

pub const KRIGING_BASELINE: &str = "kriging-baseline";
pub const CONSTANT_QUANTILE: &str = "constant-quantile";
pub const COVERAGE: &str = "coverage95";

pub fn method_label(kind: FeatureKind) -> String {
    format!("4n-{}", kind.as_str())
}

pub fn metric_label(loss: &LossSpec) -> String {
    match loss {
        LossSpec::Squared => "mse".into(),
        LossSpec::Check { gamma } => format!("check:{gamma}"),
    }
}

/// Data for one replication.
pub fn generate(config: &ExperimentConfig, data_seed: u64) -> Result<SpatialDataset> {
    let gp = |seed| match config.sim_neighbors {
        Some(m) => sim_gp_sequential(config.n, config.gp_params, m, seed),
        None if config.n > DENSE_CAP => sim_gp_sequential(config.n, config.gp_params, config.m, seed),
        None => sim_gp(config.n, config.gp_params, seed),
    };
    Ok(match &config.generator {
        Generator::Gp => gp(data_seed)?,
        Generator::TransformedGp => gp(data_seed)?.map_responses(transform_gp)?,
        Generator::MaxStable => sim_maxstable(config.n, config.maxstable_range, config.gev, data_seed)?,
        Generator::Potts => sim_potts(config.n, config.potts, data_seed)?.dataset,
        Generator::File(path) => load_csv(path)?,
    })
}

/// Uniform random split; returns sorted `(train, test)` index sets with
/// `round(fraction · n)` test sites (at least one of each).
pub fn split_indices(n: usize, test_fraction: f64, split_seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(split_seed));
    let n_test = ((test_fraction * n as f64).round() as usize).clamp(1, n.saturating_sub(1).max(1));
    let mut test = idx.split_off(n - n_test);
    idx.sort_unstable();
    test.sort_unstable();
    (idx, test)
}

pub fn run_replication(config: &ExperimentConfig, replication: usize) -> Result<ReplicationOutcome> {
    let rep_seed = seed::derive(config.seed, replication as u64);
    let data = generate(config, seed::stream(rep_seed, "data"))?;
    let (train_idx, test_idx) = split_indices(data.len(), config.test_fraction, seed::stream(rep_seed, "split"));
    let training = data.subset(&train_idx);
    let test = data.subset(&test_idx);
    let truth = test.responses();

    let mut settings = config.model_settings();
    settings.train.seed = seed::stream(rep_seed, "network");
    let prep = prepare(&training, &settings)?;
    let ctx = prep.query(test.locations())?;

    let mut out = ReplicationOutcome::default();
    let mut record = |method: &str, metric: String, v: f64| out.metrics.push((method.to_owned(), metric, v));
    let mut importance = Vec::new();
    for (li, loss) in config.losses.iter().enumerate() {
        let metric = metric_label(loss);
        let score = |pred: &[f64]| match *loss {
            LossSpec::Squared => mse(truth, pred),
            LossSpec::Check { gamma } => mean_check_loss(truth, pred, gamma),
        };
        match *loss {
            LossSpec::Squared => record(KRIGING_BASELINE, metric.clone(), score(&ctx.kriging)?),
            LossSpec::Check { gamma } => {
                let q = empirical_quantile(training.responses(), gamma)?;
                record(CONSTANT_QUANTILE, metric.clone(), score(&vec![q; truth.len()])?);
            }
        }
        for &kind in &config.features {
            let model = prep.train(kind, *loss, &settings.architecture, &settings.train)?;
            let pred = model.predict_in(&ctx)?;
            record(&method_label(kind), metric.clone(), score(&pred)?);
            if config.importance && li == 0 {
                for (group, v) in model.grouped_importance()? {
                    importance.push((method_label(kind), group.label(), v));
                }
            }
        }
    }
    if config.intervals {
        for &kind in &config.features {
            let lo = prep.train(kind, LossSpec::Check { gamma: 0.025 }, &settings.architecture, &settings.train)?;
            let hi = prep.train(kind, LossSpec::Check { gamma: 0.975 }, &settings.architecture, &settings.train)?;
            let (a, b) = (lo.predict_in(&ctx)?, hi.predict_in(&ctx)?);
            // Quantile curves from separate fits may cross; use the ordered pair.
            let lower: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect();
            let upper: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect();
            record(&method_label(kind), COVERAGE.into(), interval_coverage(truth, &lower, &upper)?);
        }
    }
    out.importance = importance;
    Ok(out)
}

fn error_chain(e: &dyn std::error::Error) -> String {
    let mut msg = e.to_string();
    let mut cur = e.source();
    while let Some(s) = cur {
        msg.push_str(": ");
        msg.push_str(&s.to_string());
        cur = s.source();
    }
    msg
}

/// Run every replication (in parallel) and assemble the report. Failed
/// replications are logged and listed in the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<MetricsReport> {
    config.validate()?;
    let outcomes: Vec<std::result::Result<ReplicationOutcome, String>> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let res = run_replication(config, r).map_err(|e| error_chain(&e));
            match &res {
                Ok(_) => log::info!("replication {r} finished"),
                Err(e) => log::warn!("replication {r} failed: {e}"),
            }
            res
        })
        .collect();
    let report = MetricsReport::assemble(&outcomes);
    if !report.valid {
        log::error!(
            "{} of {} replications failed; report marked invalid",
            report.failures.len(),
            report.replications
        );
    }
    Ok(report)
}
