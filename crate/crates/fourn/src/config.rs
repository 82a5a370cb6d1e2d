use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fourn_core::neural::validate_architecture;
use fourn_core::simulate::{GevMargins, PottsConfig};
use fourn_core::{CovParams, FeatureKind, LossSpec, OrderingScheme, TrainConfig};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{FournError, Result};
use crate::model::ModelSettings;

/// Source of the data for each replication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    Gp,
    TransformedGp,
    MaxStable,
    Potts,
    /// A fixed dataset; only the train/test split varies by replication.
    File(PathBuf),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Gp => f.write_str("gp"),
            Generator::TransformedGp => f.write_str("transformed-gp"),
            Generator::MaxStable => f.write_str("maxstable"),
            Generator::Potts => f.write_str("potts"),
            Generator::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for Generator {
    type Err = FournError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gp" => Ok(Generator::Gp),
            "transformed-gp" => Ok(Generator::TransformedGp),
            "maxstable" => Ok(Generator::MaxStable),
            "potts" => Ok(Generator::Potts),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(Generator::File(PathBuf::from(p))),
                _ => Err(FournError::Config(format!(
                    "unknown generator `{s}` (expected gp, transformed-gp, maxstable, potts or file:<path>)"
                ))),
            },
        }
    }
}

impl Serialize for Generator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Generator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Loss specifications written as `mse` or `quantile:<γ>`.
mod loss_list {
    use super::*;

    pub fn serialize<S: Serializer>(losses: &[LossSpec], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(losses.iter().map(|l| l.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<LossSpec>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse::<LossSpec>().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// A replicated benchmark: data source, model settings and what to report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub generator: Generator,
    /// Sites per simulated dataset (ignored for `file:` sources).
    pub n: usize,
    pub replications: usize,
    pub m: usize,
    pub features: Vec<FeatureKind>,
    #[serde(with = "loss_list")]
    pub losses: Vec<LossSpec>,
    pub architecture: Vec<usize>,
    pub train: TrainConfig,
    pub test_fraction: f64,
    pub seed: u64,
    pub ordering: OrderingScheme,
    pub fit_budget: usize,
    /// Also train 2.5% and 97.5% quantile models and report 95% interval
    /// coverage.
    pub intervals: bool,
    /// Report Garson importance for the networks trained on the first loss.
    pub importance: bool,
    pub gp_params: CovParams,
    /// Generate Gaussian data sequentially from this many nearest
    /// predecessors instead of exactly.
    pub sim_neighbors: Option<usize>,
    pub potts: PottsConfig,
    pub maxstable_range: f64,
    pub gev: GevMargins,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let model = ModelSettings::default();
        ExperimentConfig {
            generator: Generator::Gp,
            n: 1000,
            replications: 20,
            m: model.m,
            features: vec![FeatureKind::KrigingOnly, FeatureKind::Nonparametric, FeatureKind::KrigingPlusNp],
            losses: vec![LossSpec::Squared],
            architecture: model.architecture,
            train: model.train,
            test_fraction: 0.2,
            seed: 0,
            ordering: model.ordering,
            fit_budget: model.fit_budget,
            intervals: false,
            importance: false,
            gp_params: CovParams::benchmark(),
            sim_neighbors: None,
            potts: PottsConfig::default(),
            maxstable_range: 0.5,
            gev: GevMargins::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| FournError::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| FournError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| FournError::Json {
            path: path.to_path_buf(),
            source: e,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn model_settings(&self) -> ModelSettings {
        ModelSettings {
            m: self.m,
            ordering: self.ordering,
            fit_budget: self.fit_budget,
            architecture: self.architecture.clone(),
            train: self.train,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FournError::Config(msg));
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return bad(format!("test_fraction must lie in (0, 1), got {}", self.test_fraction));
        }
        if self.features.is_empty() || self.losses.is_empty() {
            return bad("at least one feature design and one loss are required".into());
        }
        if self.fit_budget == 0 {
            return bad("fit_budget must be positive".into());
        }
        for loss in &self.losses {
            loss.validate()?;
        }
        self.train.validate()?;
        validate_architecture(&self.architecture)?;
        match &self.generator {
            Generator::File(p) if !p.is_file() => return bad(format!("data file {} does not exist", p.display())),
            Generator::File(_) => {}
            _ if self.n < 2 => return bad(format!("n must be at least 2, got {}", self.n)),
            _ => {}
        }
        let g = &self.gp_params;
        if !(g.mu.is_finite() && g.sigma2 >= 0.0 && g.tau2 >= 0.0 && g.rho > 0.0 && (g.sigma2 + g.tau2 + g.rho).is_finite()) {
            return bad(format!("invalid gp_params {g:?}"));
        }
        if self.sim_neighbors == Some(0) {
            return bad("sim_neighbors must be at least 1".into());
        }
        if !(self.maxstable_range > 0.0 && self.maxstable_range.is_finite()) {
            return bad("maxstable_range must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_strings() {
        for s in ["gp", "transformed-gp", "maxstable", "potts", "file:data/a.csv"] {
            assert_eq!(s.parse::<Generator>().unwrap().to_string(), s);
        }
        assert!("file:".parse::<Generator>().is_err());
        assert!("brown-resnick".parse::<Generator>().is_err());
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let cfg = ExperimentConfig {
            losses: vec![LossSpec::Squared, LossSpec::Check { gamma: 0.25 }],
            ..Default::default()
        };
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        let small = ExperimentConfig::from_json(r#"{"generator": "potts", "n": 500, "losses": ["quantile:0.25"]}"#).unwrap();
        assert_eq!(small.generator, Generator::Potts);
        assert_eq!(small.m, 10);
        assert_eq!(small.architecture, vec![200, 100]);
        assert_eq!(small.losses, vec![LossSpec::Check { gamma: 0.25 }]);
        assert!(ExperimentConfig::from_json(r#"{"neighbours": 5}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        for bad in [
            ExperimentConfig { m: 0, ..Default::default() },
            ExperimentConfig { replications: 0, ..Default::default() },
            ExperimentConfig { test_fraction: 1.0, ..Default::default() },
            ExperimentConfig { architecture: vec![50], ..Default::default() },
            ExperimentConfig { generator: Generator::File("/nonexistent/x.csv".into()), ..Default::default() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }
}
