//! Shared fixtures for the criterion benches.

use mpqc_core::circuit::Circuit;
use mpqc_core::compiler::{compile_multi_version, Process};
use mpqc_core::device::DeviceGraph;
use mpqc_core::harness::benchmark_suite;
use mpqc_core::partition::generate_compute_units;

/// Benchmarks of at most `max_qubits` qubits, in suite order.
pub fn programs(max_qubits: usize, count: usize) -> Vec<&'static Circuit> {
    benchmark_suite().iter().filter(|c| c.num_qubits() <= max_qubits).take(count).collect()
}

/// Multi-version processes for `circuits` on `g` partitioned into `m`-qubit units.
pub fn processes(g: &DeviceGraph, m: usize, circuits: &[&Circuit]) -> Vec<Process> {
    let ug = generate_compute_units(g, m).expect("valid unit size");
    circuits.iter().map(|c| compile_multi_version(c, &ug, g).expect("program fits the device")).collect()
}
