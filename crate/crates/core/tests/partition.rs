mod common;

use common::{check_units, device_from_edges, edges_of, min_fragments, random_connected_edges, rng};
use mpqc_core::device::DeviceGraph;
use mpqc_core::harness::{device_27, device_65};
use mpqc_core::partition::{count_connected_subsets, enumerate_regions, generate_compute_units, units_needed};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn fragment_count_matches_exhaustive_optimum_on_small_graphs() {
    let mut r = rng(11);
    let mut worse = Vec::new();
    for case in 0..300 {
        let n = r.random_range(4..=11);
        let extra = r.random_range(0..=n);
        let edges = random_connected_edges(&mut r, n, extra);
        let g = device_from_edges(&mut r, n, &edges);
        let m = r.random_range(2..=4.min(n));
        let ug = generate_compute_units(&g, m).unwrap();
        let ours = check_units(&g, &ug, m).unwrap();
        let best = min_fragments(n, &edges, m);
        assert!(ours >= best, "case {case}: below the exhaustive optimum");
        if ours != best {
            worse.push((case, n, m, ours, best));
        }
    }
    assert!(worse.is_empty(), "suboptimal groupings: {worse:?}");
}

#[test]
fn stars_cannot_avoid_fragments() {
    // K1,3 at m = 2: two leaves are always left alone
    let g = DeviceGraph::uniform(4, &[(0, 1), (0, 2), (0, 3)], 0.01, 1e-3, 0.02).unwrap();
    let ug = generate_compute_units(&g, 2).unwrap();
    assert_eq!(check_units(&g, &ug, 2).unwrap(), 2);
    assert_eq!(min_fragments(4, &[(0, 1), (0, 2), (0, 3)], 2), 2);
}

fn matching_lower_bound(g: &DeviceGraph) -> usize {
    let pg = petgraph::graph::UnGraph::<(), ()>::from_edges(edges_of(g).iter().map(|&(a, b)| (a as u32, b as u32)));
    g.num_qubits() - 2 * petgraph::algo::maximum_matching(&pg).len()
}

#[test]
fn bundled_devices_reach_the_fewest_residuals() {
    let small = device_27();
    for m in 1..=12 {
        let ug = generate_compute_units(&small, m).unwrap();
        let residuals = check_units(&small, &ug, m).unwrap();
        assert_eq!(residuals, min_fragments(27, &edges_of(&small), m), "m={m}");
    }
    let large = device_65();
    for m in 1..=12 {
        let ug = generate_compute_units(&large, m).unwrap();
        let residuals = check_units(&large, &ug, m).unwrap();
        if m == 2 {
            assert_eq!(residuals, matching_lower_bound(&large));
        } else {
            assert_eq!(residuals, usize::from(65 % m != 0), "m={m}");
        }
    }
}

#[test]
fn heavy_hex_pairs_leave_unmatched_qubits() {
    // no perfect matching exists, so m = 2 cannot keep to one residual
    assert_eq!(matching_lower_bound(&device_27()), 7);
    assert_eq!(matching_lower_bound(&device_65()), 9);
}

#[test]
fn default_unit_size_keeps_one_residual() {
    for g in [device_27(), device_65()] {
        let ug = generate_compute_units(&g, 4).unwrap();
        assert!(check_units(&g, &ug, 4).unwrap() <= 1);
    }
}

#[test]
fn regions_are_disjoint_and_bounded() {
    let g = device_65();
    let ug = generate_compute_units(&g, 4).unwrap();
    let full = ug.full_units().count();
    for k in 1..=12 {
        let r = units_needed(k, 4);
        let regions = enumerate_regions(&ug, r).unwrap();
        assert!(regions.len() <= full / r);
        let mut used = std::collections::BTreeSet::new();
        for reg in &regions {
            assert_eq!(reg.unit_ids.len(), r);
            assert!(reg.qubit_count() >= k.min(4 * r - 3));
            assert!(g.is_connected_subset(&reg.qubits));
            for &u in &reg.unit_ids {
                assert!(used.insert(u), "unit {u} reused");
            }
        }
    }
}

#[test]
fn connected_subset_count_on_a_path() {
    // a path of n nodes has n - k + 1 connected k-subsets
    let edges: Vec<_> = (0..9).map(|i| (i, i + 1)).collect();
    let g = DeviceGraph::uniform(10, &edges, 0.01, 1e-3, 0.02).unwrap();
    for k in 1..=10 {
        assert_eq!(count_connected_subsets(&g, k, usize::MAX), 11 - k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn units_cover_and_stay_connected(seed in any::<u64>(), n in 2usize..40, extra_frac in 0.0f64..1.5, m in 1usize..8) {
        let mut r = rng(seed);
        let edges = random_connected_edges(&mut r, n, (extra_frac * n as f64) as usize);
        let g = device_from_edges(&mut r, n, &edges);
        let m = m.min(n);
        let ug = generate_compute_units(&g, m).unwrap();
        prop_assert!(check_units(&g, &ug, m).is_ok());
    }

    #[test]
    fn partition_is_deterministic(seed in any::<u64>(), n in 2usize..30, m in 1usize..6) {
        let mut r = rng(seed);
        let edges = random_connected_edges(&mut r, n, n / 2);
        let g = device_from_edges(&mut r, n, &edges);
        let m = m.min(n);
        prop_assert_eq!(generate_compute_units(&g, m).unwrap(), generate_compute_units(&g, m).unwrap());
    }
}
