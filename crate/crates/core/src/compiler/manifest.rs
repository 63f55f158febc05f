//! On-disk handoff between offline compilation and online orchestration.
//!
//! A manifest lists the ranked versions of one program together with the
//! placement the orchestrator needs; the routed executables themselves live
//! in separate artifact files named by [`artifact_file_name`].

use serde::{Deserialize, Serialize};

use super::{Cost, Process};
use crate::orchestrator::VersionedProgram;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// 1-based rank, best first.
    pub rank: usize,
    /// Artifact path relative to the manifest.
    pub artifact: String,
    pub unit_ids: Vec<usize>,
    pub qubits: Vec<usize>,
    pub cost: Cost,
    pub swaps_inserted: usize,
    pub d_in: usize,
    pub d_out: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessManifest {
    pub program_name: String,
    pub num_qubits: usize,
    pub unit_size: usize,
    pub versions: Vec<ManifestEntry>,
}

pub fn artifact_file_name(program: &str, rank: usize) -> String {
    format!("{program}.v{rank}.json")
}

pub fn manifest_file_name(program: &str) -> String {
    format!("{program}.process.json")
}

impl ProcessManifest {
    pub fn from_process(p: &Process, unit_size: usize) -> Self {
        let versions = p
            .executables
            .iter()
            .enumerate()
            .map(|(i, e)| ManifestEntry {
                rank: i + 1,
                artifact: artifact_file_name(&p.program_name, i + 1),
                unit_ids: e.region.unit_ids.clone(),
                qubits: e.region.qubits.clone(),
                cost: e.cost,
                swaps_inserted: e.swaps_inserted,
                d_in: e.d_in,
                d_out: e.d_out,
            })
            .collect();
        ProcessManifest { program_name: p.program_name.clone(), num_qubits: p.num_qubits, unit_size, versions }
    }
}

impl VersionedProgram for ProcessManifest {
    fn program_name(&self) -> &str {
        &self.program_name
    }
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }
    fn num_versions(&self) -> usize {
        self.versions.len()
    }
    fn units(&self, v: usize) -> &[usize] {
        &self.versions[v].unit_ids
    }
    fn qubits(&self, v: usize) -> &[usize] {
        &self.versions[v].qubits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{benchmark, device_27};
    use crate::partition::generate_compute_units;

    #[test]
    fn manifest_mirrors_process_placements() {
        let g = device_27();
        let ug = generate_compute_units(&g, 4).unwrap();
        let p = crate::compiler::compile_multi_version(benchmark("qft_n4").unwrap(), &ug, &g).unwrap();
        let m = ProcessManifest::from_process(&p, 4);
        assert_eq!(m.num_versions(), p.num_versions());
        for v in 0..p.len() {
            assert_eq!(m.units(v), p.units(v));
            assert_eq!(m.qubits(v), p.qubits(v));
        }
        assert_eq!(m.versions[0].artifact, "qft_n4.v1.json");
        let back: ProcessManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
