//! Fitting and applying a 4N model, and its JSON blob.
//!
//! A fit proceeds in two stages. [`prepare`] orders the reference set,
//! estimates the covariance parameters and computes kriging predictions on
//! the predecessor neighbor table; [`Prepared::train`] then builds one
//! feature design and trains a network on it. Several networks can share a
//! single preparation.

use std::fs;
use std::path::Path;

use fourn_core::features::{apply_standardization, build_features, standardize, ColumnTag};
use fourn_core::importance::{aggregate_importance, garson_importance, ImportanceGroup};
use fourn_core::kriging::krige_all;
use fourn_core::neural::train;
use fourn_core::spatial::{
    build_neighbor_table_prediction, build_neighbor_table_training, order_reference, NeighborTable,
};
use fourn_core::vecchia::{default_init, fit_params, FitOptions};
use fourn_core::{
    CovParams, FeatureKind, FeatureSpec, Location, LossSpec, MlpModel, OrderingScheme, SpatialDataset,
    Standardization, TrainConfig,
};
use serde::{Deserialize, Serialize};

use crate::error::{FournError, Result};

/// Everything needed to go from a training set to a trained network, apart
/// from the feature design and the loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSettings {
    pub m: usize,
    pub ordering: OrderingScheme,
    pub fit_budget: usize,
    pub architecture: Vec<usize>,
    pub train: TrainConfig,
}

impl Default for ModelSettings {
    fn default() -> Self {
        ModelSettings {
            m: 10,
            ordering: OrderingScheme::Coordinate,
            fit_budget: FitOptions::default().budget,
            architecture: vec![200, 100],
            train: TrainConfig::default(),
        }
    }
}

/// Outcome of the covariance fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub loglik: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// An ordered reference set with fitted covariance parameters and the
/// kriging predictions on its predecessor table.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub reference: SpatialDataset,
    pub params: CovParams,
    pub fit: FitSummary,
    pub m: usize,
    table: NeighborTable,
    kriging: Vec<f64>,
}

pub fn prepare(training: &SpatialDataset, settings: &ModelSettings) -> Result<Prepared> {
    let perm = order_reference(training, settings.ordering)?;
    let reference = training.permuted(&perm);
    let options = FitOptions {
        m: settings.m,
        budget: settings.fit_budget,
        ..FitOptions::default()
    };
    let fit = fit_params(&reference, default_init(&reference), options)?;
    let table = build_neighbor_table_training(reference.locations(), settings.m)?;
    let kriging = krige_all(&reference, reference.locations(), &table, &fit.params)?;
    Ok(Prepared {
        params: fit.params,
        fit: FitSummary {
            loglik: fit.loglik,
            converged: fit.converged,
            evaluations: fit.evaluations,
        },
        m: settings.m,
        reference,
        table,
        kriging,
    })
}

/// Neighbor table and kriging predictions at a set of query locations.
#[derive(Debug, Clone)]
pub struct QueryContext {
    pub sites: Vec<Location>,
    table: NeighborTable,
    /// Kriging prediction at every site.
    pub kriging: Vec<f64>,
}

fn query_context(reference: &SpatialDataset, params: &CovParams, m: usize, sites: &[Location]) -> Result<QueryContext> {
    let table = build_neighbor_table_prediction(reference.locations(), sites, m)?;
    let kriging = krige_all(reference, sites, &table, params)?;
    Ok(QueryContext {
        sites: sites.to_vec(),
        table,
        kriging,
    })
}

impl Prepared {
    pub fn query(&self, sites: &[Location]) -> Result<QueryContext> {
        query_context(&self.reference, &self.params, self.m, sites)
    }

    /// Train a network on one feature design under one loss.
    pub fn train(
        &self,
        kind: FeatureKind,
        loss: LossSpec,
        architecture: &[usize],
        config: &TrainConfig,
    ) -> Result<FittedModel> {
        let spec = FeatureSpec::new(kind, self.m);
        let raw = build_features(
            &self.reference,
            self.reference.locations(),
            &self.table,
            spec,
            Some(&self.kriging),
        )?;
        let fm = standardize(&raw)?;
        let ys: Vec<f64> = fm.sites().iter().map(|&i| self.reference.responses()[i]).collect();
        let outcome = train(fm.rows(), fm.width(), &ys, architecture, config, &loss)?;
        for e in &outcome.history {
            log::debug!("{kind} {loss} epoch {}: train {:.6} validation {:.6}", e.epoch, e.train_loss, e.val_loss);
        }
        let standardization = fm
            .standardization()
            .cloned()
            .expect("standardize always records its statistics");
        Ok(FittedModel {
            format: FORMAT.into(),
            version: VERSION,
            params: self.params,
            fit: self.fit,
            feature: spec,
            layout: spec.layout(),
            standardization,
            loss,
            network: outcome.model,
            best_epoch: outcome.best_epoch,
            reference: self.reference.clone(),
        })
    }
}

const FORMAT: &str = "fourn-model";
const VERSION: u32 = 1;

/// A trained model with everything needed to predict at new locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    format: String,
    version: u32,
    pub params: CovParams,
    pub fit: FitSummary,
    pub feature: FeatureSpec,
    pub layout: Vec<ColumnTag>,
    pub standardization: Standardization,
    pub loss: LossSpec,
    pub network: MlpModel,
    pub best_epoch: usize,
    /// The training data in reference order.
    pub reference: SpatialDataset,
}

impl FittedModel {
    pub fn query(&self, sites: &[Location]) -> Result<QueryContext> {
        query_context(&self.reference, &self.params, self.feature.m, sites)
    }

    pub fn predict(&self, sites: &[Location]) -> Result<Vec<f64>> {
        self.predict_in(&self.query(sites)?)
    }

    /// Predict reusing a context built from the same reference set and
    /// parameters.
    pub fn predict_in(&self, ctx: &QueryContext) -> Result<Vec<f64>> {
        let raw = build_features(
            &self.reference,
            &ctx.sites,
            &ctx.table,
            self.feature,
            Some(&ctx.kriging),
        )?;
        let fm = apply_standardization(&raw, &self.standardization);
        Ok(self.network.forward(fm.rows())?)
    }

    pub fn importance(&self) -> Result<Vec<f64>> {
        Ok(garson_importance(&self.network)?)
    }

    pub fn grouped_importance(&self) -> Result<Vec<(ImportanceGroup, f64)>> {
        Ok(aggregate_importance(&self.importance()?, &self.layout)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string(self).map_err(|e| FournError::Json {
            path: path.to_path_buf(),
            source: e,
        })?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| FournError::io(dir, e))?;
        }
        fs::write(path, text).map_err(|e| FournError::io(path, e))
    }

    /// Load and re-validate a saved model.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| FournError::io(path, e))?;
        let blob: FittedModel = serde_json::from_str(&text).map_err(|e| FournError::Json {
            path: path.to_path_buf(),
            source: e,
        })?;
        let bad = |message: String| FournError::Model {
            path: path.to_path_buf(),
            message,
        };
        if blob.format != FORMAT || blob.version != VERSION {
            return Err(bad(format!("unsupported format {} v{}", blob.format, blob.version)));
        }
        let network = MlpModel::from_layers(blob.network.layers().to_vec()).map_err(|e| bad(e.to_string()))?;
        let reference = SpatialDataset::new(blob.reference.locations().to_vec(), blob.reference.responses().to_vec())
            .map_err(|e| bad(e.to_string()))?;
        blob.params.validate().map_err(|e| bad(e.to_string()))?;
        let width = blob.feature.width();
        if blob.layout != blob.feature.layout()
            || network.n_inputs() != width
            || blob.standardization.means.len() != width
            || blob.standardization.scales.len() != width
        {
            return Err(bad("feature layout, standardization and network disagree".into()));
        }
        if reference.len() < blob.feature.m {
            return Err(bad("reference set smaller than the neighbor count".into()));
        }
        Ok(FittedModel {
            network,
            reference,
            ..blob
        })
    }
}
