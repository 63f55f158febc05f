//! Region-bound compilation and multi-version process assembly.
//!
//! Each program is routed onto every candidate region of the unit graph.
//! The resulting executables are scored by `(d_out / d_in, region utility)`
//! and sorted into a [`Process`], best first.

mod manifest;
mod sabre;

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{circuit_depth, Circuit, Gate};
use crate::device::DeviceGraph;
use crate::partition::{enumerate_regions, units_needed, PartitionError, Region, UnitGraph};

pub use manifest::{artifact_file_name, manifest_file_name, ManifestEntry, ProcessManifest};
pub use sabre::RouterConfig;
use sabre::{choose_layout, route_pass, RegionTopology};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompileError {
    #[error("region has {available} qubits, program needs {needed}")]
    RegionTooSmall { needed: usize, available: usize },
    #[error("region is not connected on the device")]
    DisconnectedRegion,
    #[error("no feasible region for `{program}` ({qubits} qubits)")]
    NoFeasibleRegion { program: String, qubits: usize },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Logical → physical qubit assignment.
pub type Layout = Vec<usize>;

/// Predicted-quality score of an executable. Lower depth ratio is better;
/// among equal ratios, higher region utility is better.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cost {
    pub depth_ratio: f64,
    pub region_utility: f64,
}

impl Cost {
    /// `Less` means `self` ranks ahead of `other`.
    pub fn rank_cmp(&self, other: &Cost) -> Ordering {
        self.depth_ratio
            .total_cmp(&other.depth_ratio)
            .then_with(|| other.region_utility.total_cmp(&self.region_utility))
    }
}

/// A program compiled onto one region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Executable {
    pub program_name: String,
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub region: Region,
    /// Logical qubit → physical qubit before the first gate.
    pub initial_layout: Layout,
    /// Logical qubit → physical qubit after the last gate.
    pub final_layout: Layout,
    /// Physical-operand gates; inserted SWAPs appear as three `cx`.
    pub routed_gates: Vec<Gate>,
    /// `(physical qubit, clbit)` pairs read out at the end.
    pub measurements: Vec<(usize, usize)>,
    pub swaps_inserted: usize,
    pub d_in: usize,
    pub d_out: usize,
    pub cost: Cost,
}

impl Executable {
    pub fn units(&self) -> &[usize] {
        &self.region.unit_ids
    }

    /// Physical qubits touched by a routed gate or a readout.
    pub fn active_qubits(&self) -> Vec<usize> {
        let mut qs: Vec<usize> = self
            .routed_gates
            .iter()
            .flat_map(|g| g.operands())
            .chain(self.measurements.iter().map(|&(q, _)| q))
            .collect();
        qs.sort_unstable();
        qs.dedup();
        qs
    }
}

/// A program's executables, best first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Process {
    pub program_name: String,
    pub num_qubits: usize,
    pub executables: Vec<Executable>,
}

impl Process {
    /// Sorts `executables` by cost. Stable, so equal costs keep region order.
    pub fn new(program_name: impl Into<String>, num_qubits: usize, mut executables: Vec<Executable>) -> Self {
        executables.sort_by(|a, b| a.cost.rank_cmp(&b.cost));
        Process { program_name: program_name.into(), num_qubits, executables }
    }

    pub fn len(&self) -> usize {
        self.executables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.executables.is_empty()
    }
}

fn check_region(c: &Circuit, rg: &Region, g: &DeviceGraph) -> Result<(), CompileError> {
    if c.num_qubits() > rg.qubit_count() {
        return Err(CompileError::RegionTooSmall { needed: c.num_qubits(), available: rg.qubit_count() });
    }
    if !g.is_connected_subset(&rg.qubits) {
        return Err(CompileError::DisconnectedRegion);
    }
    Ok(())
}

/// Initial logical → physical layout of `c` on `rg`.
pub fn initial_layout(c: &Circuit, rg: &Region, g: &DeviceGraph) -> Result<Layout, CompileError> {
    initial_layout_with(c, rg, g, &RouterConfig::default())
}

pub fn initial_layout_with(
    c: &Circuit,
    rg: &Region,
    g: &DeviceGraph,
    cfg: &RouterConfig,
) -> Result<Layout, CompileError> {
    check_region(c, rg, g)?;
    let topo = RegionTopology::new(rg, g);
    let lowered = c.decompose_swaps();
    let v2p = choose_layout(lowered.gates(), &topo, g, cfg);
    Ok(v2p[..c.num_qubits()].iter().map(|&l| topo.physical[l]).collect())
}

/// Result of routing one circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Routed {
    pub gates: Vec<Gate>,
    pub final_layout: Layout,
    pub swaps: usize,
}

/// Routes `c` from `layout`, inserting SWAPs (as three `cx`) inside `rg`
/// until every `cx` acts on a coupled pair. Source SWAPs are expanded too.
pub fn route(c: &Circuit, rg: &Region, g: &DeviceGraph, layout: &[usize]) -> Result<Routed, CompileError> {
    route_with(c, rg, g, layout, &RouterConfig::default())
}

pub fn route_with(
    c: &Circuit,
    rg: &Region,
    g: &DeviceGraph,
    layout: &[usize],
    cfg: &RouterConfig,
) -> Result<Routed, CompileError> {
    check_region(c, rg, g)?;
    let topo = RegionTopology::new(rg, g);
    let r = topo.len();
    // full virtual → local map: program qubits first, idle qubits fill the rest
    let mut v2p: Vec<usize> =
        layout.iter().map(|p| rg.qubits.binary_search(p).expect("layout inside region")).collect();
    let mut used = vec![false; r];
    for &l in &v2p {
        used[l] = true;
    }
    v2p.extend((0..r).filter(|&l| !used[l]));
    let lowered = c.decompose_swaps();
    // measurements are terminal, so read out after the last swap
    let (measures, body): (Vec<Gate>, Vec<Gate>) =
        lowered.gates().iter().cloned().partition(|g| matches!(g, Gate::Measure { .. }));
    let pass = route_pass(&body, &topo, &v2p, cfg);
    let final_layout: Layout = pass.final_v2p[..c.num_qubits()].iter().map(|&l| topo.physical[l]).collect();
    let mut gates: Vec<Gate> = pass.gates.iter().map(|gate| gate.remap(|l| topo.physical[l])).collect();
    gates.extend(measures.iter().map(|m| m.remap(|v| final_layout[v])));
    Ok(Routed { gates, final_layout, swaps: pass.swaps })
}

/// Compiles `c` onto `rg` and scores the result.
pub fn compile_on_region(c: &Circuit, rg: &Region, g: &DeviceGraph) -> Result<Executable, CompileError> {
    compile_on_region_with(c, rg, g, &RouterConfig::default())
}

pub fn compile_on_region_with(
    c: &Circuit,
    rg: &Region,
    g: &DeviceGraph,
    cfg: &RouterConfig,
) -> Result<Executable, CompileError> {
    let layout = initial_layout_with(c, rg, g, cfg)?;
    let routed = route_with(c, rg, g, &layout, cfg)?;
    let d_in = c.decompose_swaps().depth();
    let d_out = circuit_depth(&routed.gates);
    let (measurements, num_clbits) = if c.has_measurements() {
        let m = routed
            .gates
            .iter()
            .filter_map(|g| match *g {
                Gate::Measure { qubit, clbit } => Some((qubit, clbit)),
                _ => None,
            })
            .collect();
        (m, c.num_clbits())
    } else {
        (routed.final_layout.iter().enumerate().map(|(i, &p)| (p, i)).collect(), c.num_qubits())
    };
    let depth_ratio = if d_in == 0 { 1.0 } else { d_out as f64 / d_in as f64 };
    let region_utility = rg.qubits.iter().map(|&q| g.qubit_utility(q)).sum();
    Ok(Executable {
        program_name: c.name().to_string(),
        num_qubits: c.num_qubits(),
        num_clbits,
        region: rg.clone(),
        initial_layout: layout,
        final_layout: routed.final_layout,
        routed_gates: routed.gates,
        measurements,
        swaps_inserted: routed.swaps,
        d_in,
        d_out,
        cost: Cost { depth_ratio, region_utility },
    })
}

/// Regions of the right unit count that can hold a `k`-qubit program.
pub fn candidate_regions(k: usize, ug: &UnitGraph) -> Result<Vec<Region>, PartitionError> {
    let r = units_needed(k, ug.unit_size);
    Ok(enumerate_regions(ug, r)?.into_iter().filter(|rg| rg.qubit_count() >= k).collect())
}

/// Compiles `c` on every candidate region (in parallel) and ranks the
/// executables by cost.
pub fn compile_multi_version(c: &Circuit, ug: &UnitGraph, g: &DeviceGraph) -> Result<Process, CompileError> {
    compile_multi_version_with(c, ug, g, &RouterConfig::default())
}

pub fn compile_multi_version_with(
    c: &Circuit,
    ug: &UnitGraph,
    g: &DeviceGraph,
    cfg: &RouterConfig,
) -> Result<Process, CompileError> {
    let infeasible = || CompileError::NoFeasibleRegion { program: c.name().to_string(), qubits: c.num_qubits() };
    let regions = match candidate_regions(c.num_qubits(), ug) {
        Ok(r) => r,
        Err(PartitionError::InvalidRegionSize { .. }) => return Err(infeasible()),
        Err(e) => return Err(e.into()),
    };
    if regions.is_empty() {
        return Err(infeasible());
    }
    let executables =
        regions.par_iter().map(|rg| compile_on_region_with(c, rg, g, cfg)).collect::<Result<Vec<_>, _>>()?;
    Ok(Process::new(c.name(), c.num_qubits(), executables))
}
