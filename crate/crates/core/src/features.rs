//! The three 4N input designs.
//!
//! * Kriging only: `[Ŷ_i]`.
//! * Nonparametric: `[x_i, y_i, (x_l − x_i, y_l − y_i, Y_l) for l = 1..m]`,
//!   neighbors nearest first.
//! * Kriging + nonparametric: `Ŷ_i` followed by the nonparametric row.
//!
//! Each matrix carries a layout of column tags so importance can later be
//! summed per neighbor.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial::{Location, NeighborTable, SpatialDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    #[serde(rename = "kriging")]
    KrigingOnly,
    #[serde(rename = "np")]
    Nonparametric,
    #[serde(rename = "kriging-np")]
    KrigingPlusNp,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 3] = [
        FeatureKind::KrigingOnly,
        FeatureKind::Nonparametric,
        FeatureKind::KrigingPlusNp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::KrigingOnly => "kriging",
            FeatureKind::Nonparametric => "np",
            FeatureKind::KrigingPlusNp => "kriging-np",
        }
    }

    pub fn has_kriging(self) -> bool {
        self != FeatureKind::Nonparametric
    }

    pub fn has_neighbors(self) -> bool {
        self != FeatureKind::KrigingOnly
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kriging" => Ok(FeatureKind::KrigingOnly),
            "np" => Ok(FeatureKind::Nonparametric),
            "kriging-np" => Ok(FeatureKind::KrigingPlusNp),
            other => Err(Error::InvalidParameter(format!(
                "unknown feature set `{other}` (expected kriging, np or kriging-np)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub kind: FeatureKind,
    pub m: usize,
}

impl FeatureSpec {
    pub fn new(kind: FeatureKind, m: usize) -> Self {
        FeatureSpec { kind, m }
    }

    /// Column count: 1, 3m + 2 or 3m + 3.
    pub fn width(&self) -> usize {
        match self.kind {
            FeatureKind::KrigingOnly => 1,
            FeatureKind::Nonparametric => 3 * self.m + 2,
            FeatureKind::KrigingPlusNp => 3 * self.m + 3,
        }
    }

    pub fn layout(&self) -> Vec<ColumnTag> {
        let mut tags = Vec::with_capacity(self.width());
        if self.kind.has_kriging() {
            tags.push(ColumnTag::Kriging);
        }
        if self.kind.has_neighbors() {
            tags.push(ColumnTag::SiteX);
            tags.push(ColumnTag::SiteY);
            for l in 1..=self.m {
                tags.extend([ColumnTag::Dx(l), ColumnTag::Dy(l), ColumnTag::Yn(l)]);
            }
        }
        tags
    }
}

/// Semantic tag of one feature column. Neighbor ranks are 1-based, 1 being
/// the nearest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ColumnTag {
    Kriging,
    SiteX,
    SiteY,
    Dx(usize),
    Dy(usize),
    Yn(usize),
}

impl fmt::Display for ColumnTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnTag::Kriging => f.write_str("krig"),
            ColumnTag::SiteX => f.write_str("sx"),
            ColumnTag::SiteY => f.write_str("sy"),
            ColumnTag::Dx(l) => write!(f, "dx{l}"),
            ColumnTag::Dy(l) => write!(f, "dy{l}"),
            ColumnTag::Yn(l) => write!(f, "yn{l}"),
        }
    }
}

impl FromStr for ColumnTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rank = |rest: &str| -> Result<usize> {
            match rest.parse::<usize>() {
                Ok(l) if l >= 1 && !rest.starts_with('0') => Ok(l),
                _ => Err(Error::UnknownTag(s.to_string())),
            }
        };
        match s {
            "krig" => Ok(ColumnTag::Kriging),
            "sx" => Ok(ColumnTag::SiteX),
            "sy" => Ok(ColumnTag::SiteY),
            _ => {
                if let Some(rest) = s.strip_prefix("dx") {
                    Ok(ColumnTag::Dx(rank(rest)?))
                } else if let Some(rest) = s.strip_prefix("dy") {
                    Ok(ColumnTag::Dy(rank(rest)?))
                } else if let Some(rest) = s.strip_prefix("yn") {
                    Ok(ColumnTag::Yn(rank(rest)?))
                } else {
                    Err(Error::UnknownTag(s.to_string()))
                }
            }
        }
    }
}

impl From<ColumnTag> for String {
    fn from(t: ColumnTag) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for ColumnTag {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Per-column affine transform fitted on training rows. Columns with zero
/// variance keep scale 1 (centered only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl Standardization {
    /// Population (divide by `n`) mean and standard deviation per column.
    pub fn fit(rows: &[f64], p: usize) -> Result<Self> {
        let n = rows.len().checked_div(p).unwrap_or(0);
        if n < 2 {
            return Err(Error::InvalidParameter(
                "standardization needs at least two rows".into(),
            ));
        }
        let mut means = alloc::vec![0.0; p];
        for row in rows.chunks_exact(p) {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n as f64);
        let mut var = alloc::vec![0.0; p];
        for row in rows.chunks_exact(p) {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        let scales = var
            .into_iter()
            .map(|s| {
                let sd = (s / n as f64).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardization { means, scales })
    }

    pub fn apply_row(&self, row: &mut [f64]) {
        for ((v, m), s) in row.iter_mut().zip(&self.means).zip(&self.scales) {
            *v = (*v - m) / s;
        }
    }

    pub fn invert_row(&self, row: &mut [f64]) {
        for ((v, m), s) in row.iter_mut().zip(&self.means).zip(&self.scales) {
            *v = *v * s + m;
        }
    }
}

/// Engineered 4N inputs, row-major, with their layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    spec: FeatureSpec,
    layout: Vec<ColumnTag>,
    rows: Vec<f64>,
    /// Site (neighbor-table row) each feature row was built for.
    sites: Vec<usize>,
    /// Sites skipped for having fewer than `m` neighbors.
    excluded: Vec<usize>,
    standardization: Option<Standardization>,
}

impl FeatureMatrix {
    pub fn spec(&self) -> FeatureSpec {
        self.spec
    }

    pub fn width(&self) -> usize {
        self.layout.len()
    }

    pub fn n_rows(&self) -> usize {
        self.sites.len()
    }

    pub fn layout(&self) -> &[ColumnTag] {
        &self.layout
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let p = self.width();
        &self.rows[r * p..(r + 1) * p]
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn excluded(&self) -> &[usize] {
        &self.excluded
    }

    pub fn standardization(&self) -> Option<&Standardization> {
        self.standardization.as_ref()
    }

    /// Drop the leading kriging column of a kriging + nonparametric matrix.
    pub fn without_kriging(&self) -> Result<FeatureMatrix> {
        if self.spec.kind != FeatureKind::KrigingPlusNp {
            return Err(Error::InvalidParameter(
                "only kriging + nonparametric matrices have a kriging column to drop".into(),
            ));
        }
        let p = self.width();
        let rows = self.rows.chunks_exact(p).flat_map(|r| r[1..].iter().copied()).collect();
        let standardization = self.standardization.as_ref().map(|s| Standardization {
            means: s.means[1..].to_vec(),
            scales: s.scales[1..].to_vec(),
        });
        Ok(FeatureMatrix {
            spec: FeatureSpec::new(FeatureKind::Nonparametric, self.spec.m),
            layout: self.layout[1..].to_vec(),
            rows,
            sites: self.sites.clone(),
            excluded: self.excluded.clone(),
            standardization,
        })
    }
}

/// Build the feature rows for every site of `table`.
///
/// `reference` supplies neighbor locations and responses; `sites[i]` is the
/// location of table row `i` (the reference locations themselves for a
/// training table). `kriging_preds[i]` is the kriging prediction for table
/// row `i` and is required exactly when the design includes it. Rows with
/// fewer than `m` neighbors are skipped and reported in
/// [`FeatureMatrix::excluded`].
pub fn build_features(
    reference: &SpatialDataset,
    sites: &[Location],
    table: &NeighborTable,
    spec: FeatureSpec,
    kriging_preds: Option<&[f64]>,
) -> Result<FeatureMatrix> {
    if sites.len() != table.len() {
        return Err(Error::LengthMismatch {
            what: "sites and neighbor table",
            left: sites.len(),
            right: table.len(),
        });
    }
    if spec.m == 0 {
        return Err(Error::InvalidParameter("feature neighbor count m must be at least 1".into()));
    }
    let krig = match (spec.kind.has_kriging(), kriging_preds) {
        (true, None) => return Err(Error::MissingKrigingPredictions(spec.kind)),
        (true, Some(k)) if k.len() != table.len() => {
            return Err(Error::LengthMismatch {
                what: "kriging predictions and neighbor table",
                left: k.len(),
                right: table.len(),
            })
        }
        (true, Some(k)) => Some(k),
        (false, _) => None,
    };

    let p = spec.width();
    let locs = reference.locations();
    let vals = reference.responses();
    let mut rows = Vec::with_capacity(table.len() * p);
    let mut kept = Vec::with_capacity(table.len());
    let mut excluded = Vec::new();
    for (i, (list, &s)) in table.iter().zip(sites).enumerate() {
        if list.len() < spec.m {
            excluded.push(i);
            continue;
        }
        kept.push(i);
        if let Some(k) = krig {
            rows.push(k[i]);
        }
        if spec.kind.has_neighbors() {
            rows.push(s.x);
            rows.push(s.y);
            for &j in &list.indices[..spec.m] {
                rows.push(locs[j].x - s.x);
                rows.push(locs[j].y - s.y);
                rows.push(vals[j]);
            }
        }
    }
    Ok(FeatureMatrix {
        spec,
        layout: spec.layout(),
        rows,
        sites: kept,
        excluded,
        standardization: None,
    })
}

/// Standardize columns with statistics computed from `fm` itself.
pub fn standardize(fm: &FeatureMatrix) -> Result<FeatureMatrix> {
    let raw = unstandardize(fm);
    let stats = Standardization::fit(&raw.rows, raw.width())?;
    Ok(apply_standardization(&raw, &stats))
}

/// Transform raw rows with previously fitted statistics.
pub fn apply_standardization(fm: &FeatureMatrix, stats: &Standardization) -> FeatureMatrix {
    let mut out = unstandardize(fm);
    let p = out.width();
    if p > 0 {
        for row in out.rows.chunks_exact_mut(p) {
            stats.apply_row(row);
        }
    }
    out.standardization = Some(stats.clone());
    out
}

/// Raw feature values; a no-op for matrices that were never standardized.
pub fn unstandardize(fm: &FeatureMatrix) -> FeatureMatrix {
    let mut out = fm.clone();
    if let Some(stats) = out.standardization.take() {
        let p = out.width();
        for row in out.rows.chunks_exact_mut(p) {
            stats.invert_row(row);
        }
    }
    out
}

/// Header line of the CSV form: the layout tags joined by commas.
pub fn layout_header(layout: &[ColumnTag]) -> String {
    let mut s = String::new();
    for (k, t) in layout.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        s.push_str(&t.to_string());
    }
    s
}

pub fn parse_layout_header(line: &str) -> Result<Vec<ColumnTag>> {
    line.trim().split(',').map(|t| t.trim().parse()).collect()
}
