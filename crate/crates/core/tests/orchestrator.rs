use mpqc_core::orchestrator::{
    audit_selection, select_brute_force, select_heuristic, traversal_order, BruteForceOptions, CrosstalkMap,
    OrchestrationError, PlacementList, Strategy as Order,
};
use proptest::prelude::*;

const GREEDY: [Order; 4] = [Order::Random, Order::SmallFirst, Order::LargeFirst, Order::Vanilla];

/// Units laid out on a line, four qubits each; unit u holds 4u..4u+4.
fn instance() -> impl Strategy<Value = (usize, Vec<PlacementList>)> {
    (3usize..9).prop_flat_map(|units| {
        let version = move |width: usize| {
            proptest::sample::subsequence((0..units).collect::<Vec<_>>(), width).prop_map(|us| {
                let qs = us.iter().flat_map(|&u| 4 * u..4 * u + 4).collect();
                (us, qs)
            })
        };
        let process = (1usize..=2).prop_flat_map(move |width| {
            proptest::collection::vec(version(width), 1..=5).prop_map(move |versions| PlacementList {
                program_name: format!("w{width}"),
                num_qubits: 4 * width,
                versions,
            })
        });
        (Just(units), proptest::collection::vec(process, 1..=4))
    })
}

/// Flags the link between the last qubit of unit u and the first of u + 1.
fn line_crosstalk(units: usize, every: usize) -> CrosstalkMap {
    CrosstalkMap::new((0..units.saturating_sub(1)).step_by(every.max(1)).map(|u| (4 * u + 3, 4 * u + 4, 3.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn heuristics_respect_their_contracts((units, procs) in instance(), seed in any::<u64>(), every in 1usize..3) {
        let exact = select_brute_force(&procs, &BruteForceOptions::default());
        let bound: u64 = procs.iter().map(|p| p.versions.len() as u64).sum();
        let map = line_crosstalk(units, every);
        for s in GREEDY {
            for crosstalk in [None, Some(&map)] {
                let Ok(sel) = select_heuristic(&procs, s, seed, crosstalk) else { continue };
                prop_assert!(audit_selection(&procs, &sel, crosstalk));
                prop_assert!(sel.evaluations <= bound);
                // greedy success implies exhaustive success, never with a smaller sum
                let best = exact.as_ref().expect("exhaustive search finds a combination");
                if crosstalk.is_none() {
                    prop_assert!(sel.index_sum >= best.index_sum);
                }
                if s != Order::Vanilla && crosstalk.is_none() {
                    prop_assert_eq!(sel.chosen[sel.traversal[0]].version, 1);
                }
                prop_assert_eq!(&select_heuristic(&procs, s, seed, crosstalk).unwrap().chosen, &sel.chosen);
            }
        }
    }

    #[test]
    fn exhaustive_modes_agree((_units, procs) in instance()) {
        let pure = select_brute_force(&procs, &BruteForceOptions { pruning: false, ..BruteForceOptions::default() });
        let pruned = select_brute_force(&procs, &BruteForceOptions::default());
        match (pure, pruned) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(&a.chosen, &b.chosen);
                prop_assert!(audit_selection(&procs, &b, None));
            }
            (Err(a), Err(b)) => {
                prop_assert_eq!(a, OrchestrationError::Infeasible);
                prop_assert_eq!(b, OrchestrationError::Infeasible);
            }
            (a, b) => prop_assert!(false, "pure {:?} vs pruned {:?}", a, b),
        }
    }

    #[test]
    fn size_ordered_traversals_ignore_the_seed((_units, procs) in instance(), a in any::<u64>(), b in any::<u64>()) {
        for s in [Order::SmallFirst, Order::LargeFirst] {
            prop_assert_eq!(traversal_order(&procs, s, a), traversal_order(&procs, s, b));
        }
        prop_assert_eq!(traversal_order(&procs, Order::Random, a), traversal_order(&procs, Order::Random, a));
    }
}
