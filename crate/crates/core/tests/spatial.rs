mod common;

use common::{linear_scan, random_locations, rng};
use fourn_core::spatial::{
    build_neighbor_table_prediction, build_neighbor_table_training, order_reference, NeighborIndex,
};
use fourn_core::{Location, OrderingScheme, SpatialDataset};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn kdtree_matches_linear_scan_on_10k_points() {
    let mut r = rng(11);
    let locs = random_locations(10_000, &mut r);
    let index = NeighborIndex::new(&locs);
    for _ in 0..300 {
        let q = Location::new(r.random_range(-0.1..1.1), r.random_range(-0.1..1.1));
        let got = index.nearest(q, 10).unwrap();
        let want = linear_scan(&locs, q, 0..locs.len(), 10);
        assert_eq!(got.indices, want.iter().map(|w| w.0).collect::<Vec<_>>());
        for (d, w) in got.distances.iter().zip(&want) {
            assert_eq!(*d, w.1.sqrt());
        }
    }
}

#[test]
fn kdtree_matches_linear_scan_on_lattice_ties() {
    let locs: Vec<Location> = (0..900)
        .map(|i| Location::new((i % 30) as f64 / 29.0, (i / 30) as f64 / 29.0))
        .collect();
    let index = NeighborIndex::new(&locs);
    let table = build_neighbor_table_prediction(&locs, &locs[..200], 12).unwrap();
    for (i, list) in table.iter().enumerate() {
        let want: Vec<usize> = linear_scan(&locs, locs[i], 0..900, 12).iter().map(|w| w.0).collect();
        assert_eq!(list.indices, want);
    }
    for site in [1, 17, 450, 899] {
        let got = index.nearest_predecessors(site, 7);
        let want: Vec<usize> = linear_scan(&locs, locs[site], 0..site, 7).iter().map(|w| w.0).collect();
        assert_eq!(got.indices, want);
    }
}

#[test]
fn training_table_excludes_no_closer_predecessor() {
    let mut r = rng(5);
    let locs = random_locations(2000, &mut r);
    let table = build_neighbor_table_training(&locs, 10).unwrap();
    for (i, list) in table.iter().enumerate() {
        assert_eq!(list.len(), i.min(10));
        assert!(list.indices.iter().all(|&j| j < i));
        if let Some(&last) = list.distances.last() {
            for j in 0..i {
                if !list.indices.contains(&j) {
                    assert!(locs[i].dist(locs[j]) >= last);
                }
            }
        }
    }
}

#[test]
fn coordinate_ordering_sorts_by_x() {
    let mut r = rng(2);
    let locs = random_locations(50, &mut r);
    let ds = SpatialDataset::new(locs, vec![0.0; 50]).unwrap();
    let perm = order_reference(&ds, OrderingScheme::Coordinate).unwrap();
    let ordered = ds.permuted(&perm);
    assert!(ordered.locations().windows(2).all(|w| w[0].x <= w[1].x));
    let mut sorted = perm.clone();
    sorted.sort();
    assert_eq!(sorted, (0..50).collect::<Vec<_>>());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distances_are_permutation_covariant(seed in any::<u64>(), n in 12usize..80, m in 1usize..8) {
        let mut r = rng(seed);
        let locs = random_locations(n, &mut r);
        let queries = random_locations(5, &mut r);
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut r);
        let relabeled: Vec<Location> = perm.iter().map(|&i| locs[i]).collect();
        let a = build_neighbor_table_prediction(&locs, &queries, m).unwrap();
        let b = build_neighbor_table_prediction(&relabeled, &queries, m).unwrap();
        for (la, lb) in a.iter().zip(b.iter()) {
            prop_assert_eq!(&la.distances, &lb.distances);
            let mut ia: Vec<usize> = la.indices.clone();
            let mut ib: Vec<usize> = lb.indices.iter().map(|&j| perm[j]).collect();
            // Indices agree up to reordering among equal distances.
            ia.sort();
            ib.sort();
            if la.distances.windows(2).all(|w| w[0] < w[1]) {
                prop_assert_eq!(ia, ib);
            }
        }
    }

    #[test]
    fn prediction_search_matches_oracle(seed in any::<u64>(), n in 1usize..300, m in 1usize..12) {
        let mut r = rng(seed);
        let locs = random_locations(n, &mut r);
        let q = Location::new(r.random(), r.random());
        let index = NeighborIndex::new(&locs);
        if m > n {
            prop_assert!(index.nearest(q, m).is_err());
        } else {
            let got = index.nearest(q, m).unwrap();
            let want: Vec<usize> = linear_scan(&locs, q, 0..n, m).iter().map(|w| w.0).collect();
            prop_assert_eq!(got.indices, want);
        }
    }
}
