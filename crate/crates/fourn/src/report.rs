use std::path::Path;

use fourn_core::metrics::mean_stderr;
use serde::Serialize;

use crate::error::Result;
use crate::io::write_rows;

/// One metric of one method across replications; `None` marks a failed
/// replication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub method: String,
    pub metric: String,
    pub values: Vec<Option<f64>>,
}

impl MetricRow {
    pub fn successes(&self) -> Vec<f64> {
        self.values.iter().flatten().copied().collect()
    }

    pub fn mean(&self) -> f64 {
        mean_stderr(&self.successes()).0
    }

    /// Sample standard deviation over `√replications`.
    pub fn stderr(&self) -> f64 {
        mean_stderr(&self.successes()).1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationFailure {
    pub replication: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub replications: usize,
    pub rows: Vec<MetricRow>,
    /// Garson importance by group, one row per (method, group).
    pub importance: Vec<MetricRow>,
    pub failures: Vec<ReplicationFailure>,
    /// False when more than 10% of replications failed.
    pub valid: bool,
}

/// What one successful replication produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplicationOutcome {
    /// `(method, metric, value)`.
    pub metrics: Vec<(String, String, f64)>,
    /// `(method, group, importance)`.
    pub importance: Vec<(String, String, f64)>,
}

fn collect<'a>(
    outcomes: &'a [std::result::Result<ReplicationOutcome, String>],
    pick: impl Fn(&'a ReplicationOutcome) -> &'a [(String, String, f64)],
) -> Vec<MetricRow> {
    let r = outcomes.len();
    let mut rows: Vec<MetricRow> = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        let Ok(o) = o else { continue };
        for (method, metric, v) in pick(o) {
            let pos = match rows.iter().position(|row| &row.method == method && &row.metric == metric) {
                Some(p) => p,
                None => {
                    rows.push(MetricRow {
                        method: method.clone(),
                        metric: metric.clone(),
                        values: vec![None; r],
                    });
                    rows.len() - 1
                }
            };
            rows[pos].values[i] = Some(*v);
        }
    }
    rows
}

impl MetricsReport {
    pub fn assemble(outcomes: &[std::result::Result<ReplicationOutcome, String>]) -> Self {
        let failures: Vec<ReplicationFailure> = outcomes
            .iter()
            .enumerate()
            .filter_map(|(i, o)| {
                o.as_ref().err().map(|m| ReplicationFailure {
                    replication: i,
                    message: m.clone(),
                })
            })
            .collect();
        MetricsReport {
            replications: outcomes.len(),
            rows: collect(outcomes, |o| &o.metrics),
            importance: collect(outcomes, |o| &o.importance),
            valid: failures.len() * 10 <= outcomes.len(),
            failures,
        }
    }

    pub fn get(&self, method: &str, metric: &str) -> Option<&MetricRow> {
        self.rows.iter().find(|r| r.method == method && r.metric == metric)
    }

    pub fn importance_of(&self, method: &str) -> Vec<&MetricRow> {
        self.importance.iter().filter(|r| r.method == method).collect()
    }

    /// `method,metric,mean,stderr,rep1,…`; failed replications are empty.
    pub fn write_metrics_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut header = String::from("method,metric,mean,stderr");
        for i in 1..=self.replications {
            header.push_str(&format!(",rep{i}"));
        }
        let rows = self.rows.iter().map(|row| {
            let mut f = vec![row.method.clone(), row.metric.clone(), row.mean().to_string(), row.stderr().to_string()];
            f.extend(row.values.iter().map(|v| v.map_or(String::new(), |v| v.to_string())));
            f
        });
        write_rows(path.as_ref(), &header, rows)
    }

    /// One `importance_<method>.csv` (`group,importance`, averaged over
    /// replications) per method with importance rows.
    pub fn write_importance_csvs(&self, dir: impl AsRef<Path>) -> Result<()> {
        let mut methods: Vec<&str> = self.importance.iter().map(|r| r.method.as_str()).collect();
        methods.dedup();
        for method in methods {
            let rows = self
                .importance_of(method)
                .into_iter()
                .map(|r| vec![r.metric.clone(), r.mean().to_string()]);
            write_rows(&dir.as_ref().join(format!("importance_{method}.csv")), "group,importance", rows)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(v: f64) -> std::result::Result<ReplicationOutcome, String> {
        Ok(ReplicationOutcome {
            metrics: vec![("a".into(), "mse".into(), v), ("b".into(), "mse".into(), 2.0 * v)],
            importance: vec![],
        })
    }

    #[test]
    fn aggregates_match_recomputation() {
        let outs = vec![outcome(1.0), Err("boom".into()), outcome(3.0), outcome(2.0)];
        let rep = MetricsReport::assemble(&outs);
        assert_eq!(rep.failures.len(), 1);
        assert!(!rep.valid);
        let a = rep.get("a", "mse").unwrap();
        assert_eq!(a.values, vec![Some(1.0), None, Some(3.0), Some(2.0)]);
        assert_eq!(a.mean(), 2.0);
        assert_eq!(a.stderr(), (1.0f64 / 3.0).sqrt());
        assert_eq!(rep.get("b", "mse").unwrap().mean(), 4.0);
    }
}
