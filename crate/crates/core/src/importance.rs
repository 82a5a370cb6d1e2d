//! Garson connection-weight importance.
//!
//! For one hidden layer, input `i` receives through hidden unit `j` the share
//! `|W¹ⱼᵢ| / Σₖ |W¹ⱼₖ|` of that unit's input weight, and unit `j` receives the
//! share `|W²ⱼ| / Σₖ |W²ₖ|` of the output weight. Deeper networks chain the
//! row-normalized `|W|` matrices from the output back to the inputs. Biases
//! carry no input attribution and are left out.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::ColumnTag;
use crate::neural::MlpModel;

/// Nonnegative per-input importances summing to one.
pub fn garson_importance(model: &MlpModel) -> Result<Vec<f64>> {
    // Start from the output unit and push its unit mass back layer by layer.
    let mut mass = vec![1.0];
    for (l, layer) in model.layers().iter().enumerate().rev() {
        if layer.weights.iter().all(|&w| w == 0.0) {
            return Err(Error::DegenerateNetwork(format!("layer {} has all-zero weights", l + 1)));
        }
        let mut next = vec![0.0; layer.inputs];
        for (j, &mj) in mass.iter().enumerate() {
            if mj == 0.0 {
                continue;
            }
            let row = layer.weight_row(j);
            let total: f64 = row.iter().map(|w| w.abs()).sum();
            if total == 0.0 {
                continue;
            }
            for (nk, w) in next.iter_mut().zip(row) {
                *nk += mj * w.abs() / total;
            }
        }
        mass = next;
    }
    let total: f64 = mass.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DegenerateNetwork(
            "no path from any input carries weight to the output".into(),
        ));
    }
    mass.iter_mut().for_each(|v| *v /= total);
    Ok(mass)
}

/// Named group of feature columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ImportanceGroup {
    Kriging,
    /// Prediction-site coordinates.
    Site,
    /// Offsets and response of the `l`-th nearest neighbor (1-based).
    Neighbor(usize),
}

impl ImportanceGroup {
    pub fn label(&self) -> String {
        match self {
            ImportanceGroup::Kriging => "kriging".into(),
            ImportanceGroup::Site => "site".into(),
            ImportanceGroup::Neighbor(l) => format!("neighbor_{l}"),
        }
    }

    fn of(tag: ColumnTag) -> Self {
        match tag {
            ColumnTag::Kriging => ImportanceGroup::Kriging,
            ColumnTag::SiteX | ColumnTag::SiteY => ImportanceGroup::Site,
            ColumnTag::Dx(l) | ColumnTag::Dy(l) | ColumnTag::Yn(l) => ImportanceGroup::Neighbor(l),
        }
    }
}

/// Group totals in the order kriging, site, neighbor 1..m (groups absent
/// from the layout are omitted).
pub fn aggregate_importance(imp: &[f64], layout: &[ColumnTag]) -> Result<Vec<(ImportanceGroup, f64)>> {
    if imp.len() != layout.len() {
        return Err(Error::LengthMismatch {
            what: "importances and layout",
            left: imp.len(),
            right: layout.len(),
        });
    }
    let mut groups: Vec<(ImportanceGroup, f64)> = Vec::new();
    for (&tag, &v) in layout.iter().zip(imp) {
        let g = ImportanceGroup::of(tag);
        match groups.iter_mut().find(|(k, _)| *k == g) {
            Some(entry) => entry.1 += v,
            None => groups.push((g, v)),
        }
    }
    groups.sort_by_key(|(g, _)| *g);
    Ok(groups)
}

/// Aggregate with layout tags given as strings, e.g. a CSV header.
pub fn aggregate_importance_tags(imp: &[f64], tags: &[&str]) -> Result<Vec<(ImportanceGroup, f64)>> {
    let layout = tags
        .iter()
        .map(|t| t.parse::<ColumnTag>())
        .collect::<Result<Vec<_>>>()?;
    aggregate_importance(imp, &layout)
}
