//! Benchmark programs and device calibrations bundled with the crate.

use std::sync::OnceLock;

use crate::circuit::{parse_qasm_named, Circuit};
use crate::device::DeviceGraph;

/// `(name, OpenQASM source)` for every bundled benchmark.
pub const BENCHMARK_SOURCES: [(&str, &str); 30] = [
    ("adder_n10", include_str!("../../data/benchmarks/adder_n10.qasm")),
    ("adder_n4", include_str!("../../data/benchmarks/adder_n4.qasm")),
    ("basis_change_n3", include_str!("../../data/benchmarks/basis_change_n3.qasm")),
    ("basis_trotter_n4", include_str!("../../data/benchmarks/basis_trotter_n4.qasm")),
    ("cat_state_n4", include_str!("../../data/benchmarks/cat_state_n4.qasm")),
    ("deutsch_n2", include_str!("../../data/benchmarks/deutsch_n2.qasm")),
    ("dnn_n2", include_str!("../../data/benchmarks/dnn_n2.qasm")),
    ("dnn_n8", include_str!("../../data/benchmarks/dnn_n8.qasm")),
    ("error_correctiond3_n5", include_str!("../../data/benchmarks/error_correctiond3_n5.qasm")),
    ("fredkin_n3", include_str!("../../data/benchmarks/fredkin_n3.qasm")),
    ("grover_n2", include_str!("../../data/benchmarks/grover_n2.qasm")),
    ("hhl_n7", include_str!("../../data/benchmarks/hhl_n7.qasm")),
    ("hs4_n4", include_str!("../../data/benchmarks/hs4_n4.qasm")),
    ("ising_n10", include_str!("../../data/benchmarks/ising_n10.qasm")),
    ("iswap_n2", include_str!("../../data/benchmarks/iswap_n2.qasm")),
    ("linearsolver_n3", include_str!("../../data/benchmarks/linearsolver_n3.qasm")),
    ("lpn_n5", include_str!("../../data/benchmarks/lpn_n5.qasm")),
    ("pea_n5", include_str!("../../data/benchmarks/pea_n5.qasm")),
    ("qaoa_n6", include_str!("../../data/benchmarks/qaoa_n6.qasm")),
    ("qec_en_n5", include_str!("../../data/benchmarks/qec_en_n5.qasm")),
    ("qft_n4", include_str!("../../data/benchmarks/qft_n4.qasm")),
    ("qpe_n9", include_str!("../../data/benchmarks/qpe_n9.qasm")),
    ("qrng_n4", include_str!("../../data/benchmarks/qrng_n4.qasm")),
    ("quantumwalks_n2", include_str!("../../data/benchmarks/quantumwalks_n2.qasm")),
    ("shor_n5", include_str!("../../data/benchmarks/shor_n5.qasm")),
    ("simon_n6", include_str!("../../data/benchmarks/simon_n6.qasm")),
    ("teleportation_n3", include_str!("../../data/benchmarks/teleportation_n3.qasm")),
    ("toffoli_n3", include_str!("../../data/benchmarks/toffoli_n3.qasm")),
    ("variational_n4", include_str!("../../data/benchmarks/variational_n4.qasm")),
    ("wstate_n3", include_str!("../../data/benchmarks/wstate_n3.qasm")),
];

pub const HEAVY_HEX_27: &str = include_str!("../../data/devices/heavy_hex_27.json");
pub const HEAVY_HEX_65: &str = include_str!("../../data/devices/heavy_hex_65.json");

/// Names of the bundled devices, as accepted by [`bundled_device`].
pub const BUNDLED_DEVICES: [&str; 2] = ["heavy_hex_27", "heavy_hex_65"];

/// Parsed benchmark suite, in name order.
pub fn benchmark_suite() -> &'static [Circuit] {
    static SUITE: OnceLock<Vec<Circuit>> = OnceLock::new();
    SUITE.get_or_init(|| {
        BENCHMARK_SOURCES
            .iter()
            .map(|(name, src)| parse_qasm_named(name, src).unwrap_or_else(|e| panic!("bundled benchmark {name}: {e}")))
            .collect()
    })
}

pub fn benchmark(name: &str) -> Option<&'static Circuit> {
    benchmark_suite().iter().find(|c| c.name() == name)
}

pub fn benchmark_names() -> Vec<String> {
    benchmark_suite().iter().map(|c| c.name().to_string()).collect()
}

pub fn bundled_device(name: &str) -> Option<DeviceGraph> {
    let text = match name {
        "heavy_hex_27" => HEAVY_HEX_27,
        "heavy_hex_65" => HEAVY_HEX_65,
        _ => return None,
    };
    Some(DeviceGraph::from_json(text).expect("bundled calibration is valid"))
}

pub fn device_27() -> DeviceGraph {
    bundled_device("heavy_hex_27").expect("bundled")
}

pub fn device_65() -> DeviceGraph {
    bundled_device("heavy_hex_65").expect("bundled")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_loads() {
        let suite = benchmark_suite();
        assert_eq!(suite.len(), 30);
        assert!(suite.iter().all(|c| (2..=10).contains(&c.num_qubits())));
        assert_eq!(benchmark("qft_n4").unwrap().num_qubits(), 4);
    }

    #[test]
    fn devices_load() {
        assert_eq!(device_27().num_qubits(), 27);
        assert_eq!(device_65().num_qubits(), 65);
        assert_eq!(device_27().links().len(), 28);
        assert_eq!(device_65().links().len(), 72);
    }
}
