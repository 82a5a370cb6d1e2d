//! Locations, datasets, reference orderings and neighbor sets.

mod kdtree;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use kdtree::KdTree;

use crate::error::{Error, Result};

/// Two locations closer than this are treated as the same site.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub x: f64,
    pub y: f64,
}

impl Location {
    pub const fn new(x: f64, y: f64) -> Self {
        Location { x, y }
    }

    pub fn dist2(self, other: Location) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Location) -> f64 {
        self.dist2(other).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Point-referenced observations: one response per location.
///
/// Construction rejects non-finite values and duplicate sites, so every
/// dataset handed to the rest of the crate has pairwise-distinct locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialDataset {
    locations: Vec<Location>,
    responses: Vec<f64>,
}

impl SpatialDataset {
    pub fn new(locations: Vec<Location>, responses: Vec<f64>) -> Result<Self> {
        if locations.len() != responses.len() {
            return Err(Error::LengthMismatch {
                what: "locations and responses",
                left: locations.len(),
                right: responses.len(),
            });
        }
        if let Some(index) = locations.iter().position(|l| !l.is_finite()) {
            return Err(Error::NonFiniteLocation { index });
        }
        if let Some(index) = responses.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteResponse { index });
        }
        if let Some((first, second)) = find_duplicate(&locations) {
            return Err(Error::DuplicateLocation { first, second });
        }
        Ok(SpatialDataset {
            locations,
            responses,
        })
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    /// Dataset whose `k`-th site is `self[perm[k]]`.
    pub fn permuted(&self, perm: &[usize]) -> SpatialDataset {
        self.subset(perm)
    }

    /// Sites at `indices`, in that order. Indices must be distinct.
    pub fn subset(&self, indices: &[usize]) -> SpatialDataset {
        SpatialDataset {
            locations: indices.iter().map(|&i| self.locations[i]).collect(),
            responses: indices.iter().map(|&i| self.responses[i]).collect(),
        }
    }

    /// Same sites with new responses.
    pub fn with_responses(&self, responses: Vec<f64>) -> Result<SpatialDataset> {
        if responses.len() != self.len() {
            return Err(Error::LengthMismatch {
                what: "locations and responses",
                left: self.len(),
                right: responses.len(),
            });
        }
        if let Some(index) = responses.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteResponse { index });
        }
        Ok(SpatialDataset {
            locations: self.locations.clone(),
            responses,
        })
    }

    pub fn map_responses(&self, f: impl Fn(f64) -> f64) -> Result<SpatialDataset> {
        self.with_responses(self.responses.iter().map(|&v| f(v)).collect())
    }
}

/// First pair of sites (lower index first) within [`DUPLICATE_TOLERANCE`].
pub fn find_duplicate(locations: &[Location]) -> Option<(usize, usize)> {
    let mut idx: Vec<usize> = (0..locations.len()).collect();
    idx.sort_by(|&a, &b| locations[a].x.total_cmp(&locations[b].x).then(a.cmp(&b)));
    let mut found: Option<(usize, usize)> = None;
    for (k, &i) in idx.iter().enumerate() {
        let li = locations[i];
        for &j in &idx[k + 1..] {
            let lj = locations[j];
            if lj.x - li.x > DUPLICATE_TOLERANCE {
                break;
            }
            if li.dist(lj) <= DUPLICATE_TOLERANCE {
                let pair = (i.min(j), i.max(j));
                if found.is_none_or(|f| pair < f) {
                    found = Some(pair);
                }
            }
        }
    }
    found
}

/// How the reference set is ordered before predecessor-constrained
/// conditioning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "scheme")]
pub enum OrderingScheme {
    /// Sort by x, ties by y, remaining ties by original index.
    #[default]
    Coordinate,
    /// Uniform random permutation from a seed.
    Random { seed: u64 },
    Identity,
}

/// A permutation of `0..n`; position `k` holds the original index of the
/// `k`-th site in the new order.
pub fn order_reference(dataset: &SpatialDataset, scheme: OrderingScheme) -> Result<Vec<usize>> {
    if dataset.is_empty() {
        return Err(Error::EmptyReferenceSet);
    }
    let mut perm: Vec<usize> = (0..dataset.len()).collect();
    match scheme {
        OrderingScheme::Identity => {}
        OrderingScheme::Coordinate => {
            let locs = dataset.locations();
            perm.sort_by(|&a, &b| {
                locs[a]
                    .x
                    .total_cmp(&locs[b].x)
                    .then(locs[a].y.total_cmp(&locs[b].y))
                    .then(a.cmp(&b))
            });
        }
        OrderingScheme::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            perm.shuffle(&mut rng);
        }
    }
    Ok(perm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeighborMode {
    /// Neighbors of reference site `i` are drawn from sites `0..i`.
    Training,
    /// Neighbors of a query site are drawn from the whole reference set.
    Prediction,
}

/// Neighbor indices of one site with their Euclidean distances, nearest first.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NeighborList {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Per-site ordered neighbor sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborTable {
    mode: NeighborMode,
    m: usize,
    lists: Vec<NeighborList>,
}

impl NeighborTable {
    pub fn mode(&self) -> NeighborMode {
        self.mode
    }

    /// Neighbor-count cap.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn get(&self, site: usize) -> &NeighborList {
        &self.lists[site]
    }

    pub fn iter(&self) -> core::slice::Iter<'_, NeighborList> {
        self.lists.iter()
    }
}

/// Exact nearest-neighbor search over a fixed reference set.
///
/// Wraps a [`KdTree`]; immutable once built and safe to query from several
/// threads.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    tree: KdTree,
}

impl NeighborIndex {
    pub fn new(reference: &[Location]) -> Self {
        NeighborIndex {
            tree: KdTree::new(reference),
        }
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    /// The `m` nearest reference sites to `query`, ties by lower index.
    pub fn nearest(&self, query: Location, m: usize) -> Result<NeighborList> {
        if self.tree.len() < m {
            return Err(Error::InsufficientReferencePoints {
                needed: m,
                available: self.tree.len(),
            });
        }
        Ok(to_list(self.tree.nearest(query, m)))
    }

    /// The `min(m, site)` nearest sites among the predecessors `0..site` of
    /// reference site `site`.
    pub fn nearest_predecessors(&self, site: usize, m: usize) -> NeighborList {
        let q = self.tree.points()[site];
        to_list(self.tree.nearest_below(q, m, site))
    }
}

fn to_list(found: Vec<(usize, f64)>) -> NeighborList {
    let (indices, distances) = found.into_iter().map(|(i, d2)| (i, d2.sqrt())).unzip();
    NeighborList { indices, distances }
}

/// Predecessor-constrained neighbor sets for an already ordered reference
/// set: site `i` gets its `min(m, i)` nearest sites among `0..i`.
pub fn build_neighbor_table_training(locations: &[Location], m: usize) -> Result<NeighborTable> {
    if m == 0 {
        return Err(Error::InvalidParameter("neighbor count m must be at least 1".into()));
    }
    let index = NeighborIndex::new(locations);
    let lists = (0..locations.len())
        .map(|i| index.nearest_predecessors(i, m))
        .collect();
    Ok(NeighborTable {
        mode: NeighborMode::Training,
        m,
        lists,
    })
}

/// Unconstrained `m`-nearest reference sites for every query location.
pub fn build_neighbor_table_prediction(
    reference: &[Location],
    queries: &[Location],
    m: usize,
) -> Result<NeighborTable> {
    if m == 0 {
        return Err(Error::InvalidParameter("neighbor count m must be at least 1".into()));
    }
    let index = NeighborIndex::new(reference);
    let lists = queries
        .iter()
        .map(|&q| index.nearest(q, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(NeighborTable {
        mode: NeighborMode::Prediction,
        m,
        lists,
    })
}

/// The `m` nearest reference sites to a single query.
pub fn find_neighbors_prediction(
    reference: &SpatialDataset,
    query: Location,
    m: usize,
) -> Result<Vec<usize>> {
    Ok(NeighborIndex::new(reference.locations()).nearest(query, m)?.indices)
}
