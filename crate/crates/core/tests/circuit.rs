use mpqc_core::circuit::{circuit_depth, parse_qasm, Circuit, Gate, SingleQubitOp};
use mpqc_core::harness::{benchmark, benchmark_suite};
use mpqc_core::sim::{simulate_ideal, tvd};
use proptest::prelude::*;

const ADDER_N4: &str = include_str!("../data/benchmarks/adder_n4.qasm");

/// Statement counts by a plain text scan: (cx, single-qubit, measure).
fn scan_counts(src: &str) -> (usize, usize, usize) {
    let mut counts = (0, 0, 0);
    for stmt in src.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let head = stmt.split(|c: char| c.is_whitespace() || c == '(').next().unwrap();
        match head {
            "OPENQASM" | "include" | "qreg" | "creg" | "barrier" => {}
            "cx" => counts.0 += 1,
            "measure" => counts.2 += 1,
            _ => counts.1 += 1,
        }
    }
    counts
}

#[test]
fn adder_statement_count() {
    assert_eq!(scan_counts(ADDER_N4), (10, 13, 4));
    let c = benchmark("adder_n4").unwrap();
    assert_eq!(c.num_qubits(), 4);
    let cx = c.gates().iter().filter(|g| matches!(g, Gate::Cx { .. })).count();
    let single = c.gates().iter().filter(|g| matches!(g, Gate::Single { .. })).count();
    let measure = c.gates().iter().filter(|g| matches!(g, Gate::Measure { .. })).count();
    assert_eq!((cx, single, measure), (10, 13, 4));
}

#[test]
fn every_benchmark_round_trips() {
    for c in benchmark_suite() {
        let again = parse_qasm(&c.to_qasm()).unwrap();
        assert_eq!(again.gates(), c.gates(), "{}", c.name());
        assert_eq!(again.num_qubits(), c.num_qubits());
        assert_eq!(again.num_clbits(), c.num_clbits());
    }
}

#[test]
fn swap_lowering_keeps_semantics() {
    let c = Circuit::new(
        "swapper",
        3,
        0,
        vec![Gate::single(SingleQubitOp::H, 0), Gate::single(SingleQubitOp::T, 0), Gate::swap(0, 2), Gate::cx(2, 1)],
    )
    .unwrap();
    let lowered = c.decompose_swaps();
    assert_eq!(lowered.count_two_qubit(), 4);
    assert!(tvd(&simulate_ideal(&c).unwrap(), &simulate_ideal(&lowered).unwrap()).unwrap() < 1e-12);
}

fn single_op() -> impl Strategy<Value = SingleQubitOp> {
    let angle = -6.3f64..6.3;
    prop_oneof![
        Just(SingleQubitOp::H),
        Just(SingleQubitOp::X),
        Just(SingleQubitOp::Y),
        Just(SingleQubitOp::Z),
        Just(SingleQubitOp::S),
        Just(SingleQubitOp::Sdg),
        Just(SingleQubitOp::T),
        Just(SingleQubitOp::Tdg),
        angle.clone().prop_map(SingleQubitOp::Rx),
        angle.clone().prop_map(SingleQubitOp::Rz),
        angle.clone().prop_map(SingleQubitOp::U1),
        (angle.clone(), angle.clone()).prop_map(|(a, b)| SingleQubitOp::U2(a, b)),
        (angle.clone(), angle.clone(), angle).prop_map(|(a, b, c)| SingleQubitOp::U3(a, b, c)),
    ]
}

fn gate(n: usize) -> impl Strategy<Value = Gate> {
    let pair = (0..n, 0..n).prop_filter("distinct", |(a, b)| a != b);
    prop_oneof![
        4 => (single_op(), 0..n).prop_map(|(op, q)| Gate::single(op, q)),
        3 => pair.clone().prop_map(|(a, b)| Gate::cx(a, b)),
        1 => pair.prop_map(|(a, b)| Gate::swap(a, b)),
        1 => proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n).prop_map(|qubits| Gate::Barrier { qubits }),
    ]
}

fn circuit() -> impl Strategy<Value = Circuit> {
    (2usize..7).prop_flat_map(|n| {
        (proptest::collection::vec(gate(n), 0..40), any::<bool>()).prop_map(move |(mut gates, measure)| {
            if measure {
                gates.extend((0..n).map(|q| Gate::measure(q, q)));
            }
            Circuit::new("random", n, if measure { n } else { 0 }, gates).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(c in circuit()) {
        let again = parse_qasm(&c.to_qasm()).unwrap();
        prop_assert_eq!(again.num_qubits(), c.num_qubits());
        prop_assert_eq!(again.gates(), c.gates());
    }

    #[test]
    fn depth_is_bounded_by_gate_count(c in circuit()) {
        let d = c.depth();
        if c.gates().is_empty() {
            prop_assert_eq!(d, 0);
        } else {
            prop_assert!(1 <= d && d <= c.gates().len());
        }
        prop_assert_eq!(d, circuit_depth(c.gates()));
    }

    #[test]
    fn appending_never_lowers_depth(c in circuit(), g in gate(2)) {
        // measurements are terminal, so append to the unmeasured prefix
        let body: Vec<Gate> = c.gates().iter().filter(|g| !matches!(g, Gate::Measure { .. })).cloned().collect();
        let base = Circuit::new("base", c.num_qubits(), 0, body).unwrap();
        let extended = base.with_gate(g).unwrap();
        prop_assert!(extended.depth() >= base.depth());
    }
}
