//! Local simple kriging from a handful of neighbors.
//!
//! `Ŷ = μ̂ + c_sᵀ C_N⁻¹ (Y_N − μ̂)` where `c_s` is the latent-field
//! cross-covariance (no nugget) and `C_N` the covariance of the neighbor
//! responses (nugget on the diagonal).

use alloc::vec::Vec;

use crate::covariance::{cov_matrix_unchecked, cross_cov, CovParams};
use crate::error::{Error, Result};
use crate::linalg::{dot, Cholesky};
use crate::spatial::{Location, NeighborMode, NeighborTable, SpatialDataset};

/// Kriging weights `C_N⁻¹ c_s` for one query.
pub fn kriging_weights(query: Location, neighbor_locs: &[Location], params: &CovParams) -> Result<Vec<f64>> {
    params.validate()?;
    if neighbor_locs.is_empty() {
        return Err(Error::InvalidParameter("kriging needs at least one neighbor".into()));
    }
    let k = neighbor_locs.len();
    let c = cov_matrix_unchecked(neighbor_locs, params, params.tau2);
    let chol = Cholesky::from_vec(c, k).map_err(|_| Error::SingularNeighborCovariance)?;
    Ok(chol.solve(&cross_cov(query, neighbor_locs, params)))
}

/// Conditional-mean prediction at `query` from its neighbors.
pub fn krige_one(
    query: Location,
    neighbor_locs: &[Location],
    neighbor_vals: &[f64],
    params: &CovParams,
) -> Result<f64> {
    if neighbor_locs.len() != neighbor_vals.len() {
        return Err(Error::LengthMismatch {
            what: "neighbor locations and values",
            left: neighbor_locs.len(),
            right: neighbor_vals.len(),
        });
    }
    let w = kriging_weights(query, neighbor_locs, params)?;
    let resid: Vec<f64> = neighbor_vals.iter().map(|v| v - params.mu).collect();
    Ok(params.mu + dot(&w, &resid))
}

/// Kriging prediction for every row of `table`.
///
/// `sites[i]` is the location the `i`-th neighbor list belongs to: the
/// reference locations themselves for a training-mode table, the query
/// locations for a prediction-mode one. Sites with no neighbors (the first
/// site of a training table) get `μ̂`.
pub fn krige_all(
    reference: &SpatialDataset,
    sites: &[Location],
    table: &NeighborTable,
    params: &CovParams,
) -> Result<Vec<f64>> {
    if sites.len() != table.len() {
        return Err(Error::LengthMismatch {
            what: "sites and neighbor table",
            left: sites.len(),
            right: table.len(),
        });
    }
    if table.mode() == NeighborMode::Training && table.len() != reference.len() {
        return Err(Error::LengthMismatch {
            what: "reference set and training table",
            left: reference.len(),
            right: table.len(),
        });
    }
    params.validate()?;
    let locs = reference.locations();
    let vals = reference.responses();
    let mut nl = Vec::new();
    let mut nv = Vec::new();
    table
        .iter()
        .zip(sites)
        .map(|(list, &site)| {
            if list.is_empty() {
                return Ok(params.mu);
            }
            nl.clear();
            nv.clear();
            nl.extend(list.indices.iter().map(|&j| locs[j]));
            nv.extend(list.indices.iter().map(|&j| vals[j]));
            krige_one(site, &nl, &nv, params)
        })
        .collect()
}
