//! Desk-scale experiment harness: benchmark groups, fidelity comparisons
//! between execution modes, and parameter sweeps.

mod report;
pub mod stats;
mod suite;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::compiler::{compile_multi_version, CompileError, Executable, Process};
use crate::device::{DeviceError, DeviceGraph, VariationModel};
use crate::orchestrator::{
    audit_selection, orchestrate, select_heuristic, BruteForceOptions, CrosstalkMap, Selection, Strategy,
};
use crate::partition::{generate_compute_units, PartitionError, UnitGraph};
use crate::sim::{fidelity, simulate_ideal, simulate_noisy, Distribution, NoiseSpec, SimError, DEFAULT_TRAJECTORIES};

pub use report::{write_csv, SweepPoint, SweepSummary, CSV_COLUMNS};
pub use suite::{
    benchmark, benchmark_names, benchmark_suite, bundled_device, device_27, device_65, BENCHMARK_SOURCES,
    BUNDLED_DEVICES, HEAVY_HEX_27, HEAVY_HEX_65,
};

/// Environment variable read by [`worker_count_from_env`].
pub const WORKERS_ENV: &str = "MPQC_WORKERS";
pub const DEFAULT_SHOTS: u64 = 1 << 14;
pub const DEFAULT_GROUPS: usize = 10;
/// Amplification factors of generated crosstalk maps are drawn from this range.
pub const CROSSTALK_FACTOR_RANGE: (f64, f64) = (2.0, 5.0);

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
    #[error("group size {size} outside 2..={suite}")]
    GroupSize { size: usize, suite: usize },
    #[error("requested {requested} distinct groups but only {possible} exist")]
    TooManyGroups { requested: usize, possible: u128 },
    #[error("group count must be at least 1")]
    NoGroups,
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Worker count requested through [`WORKERS_ENV`], if set to a positive integer.
pub fn worker_count_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Mixes a base seed with coordinates into an independent stream seed.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkGroup {
    pub id: usize,
    /// Benchmark names in suite order.
    pub members: Vec<String>,
}

impl BenchmarkGroup {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Members joined with `+`, as written to reports.
    pub fn label(&self) -> String {
        self.members.join("+")
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// `count` distinct random `size`-subsets of `suite`, reproducible per seed.
pub fn generate_groups(
    suite: &[String],
    size: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<BenchmarkGroup>, HarnessError> {
    if size < 2 || size > suite.len() {
        return Err(HarnessError::GroupSize { size, suite: suite.len() });
    }
    if count == 0 {
        return Err(HarnessError::NoGroups);
    }
    let possible = binomial(suite.len(), size);
    if count as u128 > possible {
        return Err(HarnessError::TooManyGroups { requested: count, possible });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut groups = Vec::with_capacity(count);
    while groups.len() < count {
        let mut idx = sample(&mut rng, suite.len(), size).into_vec();
        idx.sort_unstable();
        if seen.insert(idx.clone()) {
            groups.push(BenchmarkGroup { id: groups.len(), members: idx.iter().map(|&i| suite[i].clone()).collect() });
        }
    }
    Ok(groups)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Ranked multi-version processes, orchestrated by the configured strategy.
    FidelityAware,
    /// Random conflict-free executables, ignoring the ranking.
    Vanilla,
    /// Every program alone on its best region.
    Oracle,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::FidelityAware, Mode::Vanilla, Mode::Oracle];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::FidelityAware => "fidelity_aware",
            Mode::Vanilla => "vanilla",
            Mode::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Mode::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub strategy: Strategy,
    pub mode: Mode,
    pub shots: u64,
    pub seed: u64,
    pub trajectories: usize,
    /// When false only orchestration runs; fidelities stay empty.
    pub simulate: bool,
    /// Amplifies link errors next to co-running programs during simulation.
    pub crosstalk: Option<CrosstalkMap>,
    /// Lets the orchestrator skip executables joined to claimed qubits by a
    /// flagged link.
    pub crosstalk_aware: bool,
    /// Calibration seen at run time; compilation always uses the workbench
    /// device.
    pub runtime_device: Option<DeviceGraph>,
    pub brute_force: BruteForceOptions,
}

impl ExperimentConfig {
    pub fn new(strategy: Strategy, mode: Mode, shots: u64, seed: u64) -> Self {
        ExperimentConfig {
            strategy,
            mode,
            shots,
            seed,
            trajectories: DEFAULT_TRAJECTORIES,
            simulate: true,
            crosstalk: None,
            crosstalk_aware: false,
            runtime_device: None,
            brute_force: BruteForceOptions::default(),
        }
    }
}

/// Outcome of one benchmark group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub group_id: usize,
    pub members: Vec<String>,
    pub success: bool,
    pub failure: Option<String>,
    /// 1-based executable rank chosen per member.
    pub versions: Vec<usize>,
    /// Fidelity against the ideal distribution, per member.
    pub fidelities: Vec<f64>,
    pub evaluations: u64,
    pub selection_ns: u64,
    /// Pairs of chosen executables joined by a flagged crosstalk link.
    pub flagged_pairs: usize,
}

impl GroupRecord {
    pub fn mean_fidelity(&self) -> Option<f64> {
        stats::mean(&self.fidelities)
    }

    fn failed(group: &BenchmarkGroup, reason: String) -> Self {
        GroupRecord {
            group_id: group.id,
            members: group.members.clone(),
            success: false,
            failure: Some(reason),
            versions: Vec::new(),
            fidelities: Vec::new(),
            evaluations: 0,
            selection_ns: 0,
            flagged_pairs: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub device_id: String,
    pub unit_size: usize,
    pub strategy: Strategy,
    pub mode: Mode,
    pub seed: u64,
    pub shots: u64,
    /// One record per group, in group-id order.
    pub records: Vec<GroupRecord>,
}

impl ExperimentReport {
    pub fn successes(&self) -> usize {
        self.records.iter().filter(|r| r.success).count()
    }

    /// Mean over successful groups of their mean fidelity.
    pub fn mean_fidelity(&self) -> Option<f64> {
        stats::mean(&self.group_fidelities())
    }

    pub fn group_fidelities(&self) -> Vec<f64> {
        self.records.iter().filter(|r| r.success).filter_map(|r| r.mean_fidelity()).collect()
    }

    pub fn flagged_pairs(&self) -> usize {
        self.records.iter().map(|r| r.flagged_pairs).sum()
    }
}

/// Successful groups over evaluated groups; `None` for an empty report.
pub fn success_ratio(report: &ExperimentReport) -> Option<f64> {
    if report.records.is_empty() {
        None
    } else {
        Some(report.successes() as f64 / report.records.len() as f64)
    }
}

/// Programs compiled offline against one device and unit size.
pub struct Workbench {
    device_id: String,
    device: DeviceGraph,
    units: UnitGraph,
    circuits: BTreeMap<String, Circuit>,
    processes: BTreeMap<String, Result<Process, CompileError>>,
    ideals: BTreeMap<String, Distribution>,
    compile_times: BTreeMap<String, Duration>,
}

impl Workbench {
    /// Partitions `device` into `unit_size`-qubit units and compiles every
    /// circuit onto all of its candidate regions.
    pub fn new(
        device_id: impl Into<String>,
        device: DeviceGraph,
        unit_size: usize,
        circuits: &[Circuit],
    ) -> Result<Self, HarnessError> {
        let units = generate_compute_units(&device, unit_size)?;
        let compiled: Vec<_> = circuits
            .par_iter()
            .map(|c| {
                let start = Instant::now();
                let p = compile_multi_version(c, &units, &device);
                let t = start.elapsed();
                simulate_ideal(c).map(|ideal| (c.name().to_string(), p, ideal, t))
            })
            .collect::<Result<_, _>>()?;
        let mut wb = Workbench {
            device_id: device_id.into(),
            device,
            units,
            circuits: circuits.iter().map(|c| (c.name().to_string(), c.clone())).collect(),
            processes: BTreeMap::new(),
            ideals: BTreeMap::new(),
            compile_times: BTreeMap::new(),
        };
        for (name, p, ideal, t) in compiled {
            wb.processes.insert(name.clone(), p);
            wb.ideals.insert(name.clone(), ideal);
            wb.compile_times.insert(name, t);
        }
        Ok(wb)
    }

    pub fn device_id(&self) -> &str {
        &self.device_id
    }

    pub fn device(&self) -> &DeviceGraph {
        &self.device
    }

    pub fn unit_graph(&self) -> &UnitGraph {
        &self.units
    }

    pub fn circuit(&self, name: &str) -> Option<&Circuit> {
        self.circuits.get(name)
    }

    pub fn process(&self, name: &str) -> Option<&Result<Process, CompileError>> {
        self.processes.get(name)
    }

    pub fn ideal(&self, name: &str) -> Option<&Distribution> {
        self.ideals.get(name)
    }

    /// Wall time spent compiling all versions of `name`.
    pub fn compile_time(&self, name: &str) -> Option<Duration> {
        self.compile_times.get(name).copied()
    }

    /// Runs every group under `cfg`. Groups run in parallel; records come
    /// back in input order.
    pub fn run(&self, groups: &[BenchmarkGroup], cfg: &ExperimentConfig) -> ExperimentReport {
        let records = groups.par_iter().map(|g| self.run_group(g, cfg)).collect();
        ExperimentReport {
            device_id: self.device_id.clone(),
            unit_size: self.units.unit_size,
            strategy: cfg.strategy,
            mode: cfg.mode,
            seed: cfg.seed,
            shots: cfg.shots,
            records,
        }
    }

    fn processes_for(&self, group: &BenchmarkGroup) -> Result<Vec<&Process>, String> {
        group
            .members
            .iter()
            .map(|name| match self.processes.get(name) {
                None => Err(format!("unknown benchmark `{name}`")),
                Some(Err(e)) => Err(format!("compile {name}: {e}")),
                Some(Ok(p)) => Ok(p),
            })
            .collect()
    }

    fn select(&self, procs: &[&Process], group: &BenchmarkGroup, cfg: &ExperimentConfig) -> Result<Selection, String> {
        let seed = derive_seed(cfg.seed, group.id as u64, 0);
        let aware = if cfg.crosstalk_aware { cfg.crosstalk.as_ref() } else { None };
        let result = match cfg.mode {
            Mode::FidelityAware => orchestrate(procs, cfg.strategy, seed, aware, &cfg.brute_force),
            Mode::Vanilla => select_heuristic(procs, Strategy::Vanilla, seed, aware),
            Mode::Oracle => unreachable!("oracle runs without orchestration"),
        };
        result.map_err(|e| e.to_string())
    }

    fn run_group(&self, group: &BenchmarkGroup, cfg: &ExperimentConfig) -> GroupRecord {
        let procs = match self.processes_for(group) {
            Ok(p) => p,
            Err(e) => return GroupRecord::failed(group, e),
        };
        let (versions, evaluations, selection_ns, flagged_pairs) = if cfg.mode == Mode::Oracle {
            (vec![0; procs.len()], 0, 0, 0)
        } else {
            let sel = match self.select(&procs, group, cfg) {
                Ok(s) => s,
                Err(e) => return GroupRecord::failed(group, e),
            };
            let flagged = match &cfg.crosstalk {
                Some(map) => count_flagged_pairs(&procs, &sel, map),
                None => 0,
            };
            let versions = (0..procs.len()).map(|p| sel.version_of(p)).collect();
            (versions, sel.evaluations, sel.elapsed.as_nanos() as u64, flagged)
        };
        let mut record = GroupRecord {
            group_id: group.id,
            members: group.members.clone(),
            success: true,
            failure: None,
            versions: versions.iter().map(|v| v + 1).collect(),
            fidelities: Vec::new(),
            evaluations,
            selection_ns,
            flagged_pairs,
        };
        if !cfg.simulate {
            return record;
        }
        let chosen: Vec<&Executable> = procs.iter().zip(&versions).map(|(p, &v)| &p.executables[v]).collect();
        let active: Vec<Vec<usize>> = chosen.iter().map(|e| e.active_qubits()).collect();
        let device = cfg.runtime_device.as_ref().unwrap_or(&self.device);
        for (i, exe) in chosen.iter().enumerate() {
            let co_running: Vec<usize> = if cfg.mode == Mode::Oracle {
                Vec::new()
            } else {
                active.iter().enumerate().filter(|&(j, _)| j != i).flat_map(|(_, q)| q.iter().copied()).collect()
            };
            let spec = NoiseSpec {
                shots: cfg.shots,
                seed: derive_seed(cfg.seed, group.id as u64, i as u64 + 1),
                trajectories: cfg.trajectories,
                crosstalk: cfg.crosstalk.clone(),
                co_running,
                error_scale: 1.0,
            };
            let outcome =
                simulate_noisy(exe, &spec, device).and_then(|d| fidelity(&d, &self.ideals[&group.members[i]]));
            match outcome {
                Ok(f) => record.fidelities.push(f),
                Err(e) => return GroupRecord::failed(group, format!("simulate {}: {e}", group.members[i])),
            }
        }
        record
    }

    /// Per-benchmark Spearman correlation between predicted rank and
    /// simulated fidelity over all executables of its process. Positive
    /// means better-ranked executables tend to score higher.
    pub fn rank_correlations(&self, shots: u64, seed: u64, trajectories: usize) -> Vec<RankCorrelation> {
        let entries: Vec<_> = self.processes.iter().collect();
        entries
            .into_par_iter()
            .enumerate()
            .filter_map(|(bi, (name, p))| {
                let p = p.as_ref().ok()?;
                let ideal = &self.ideals[name];
                let fids: Vec<f64> = p
                    .executables
                    .iter()
                    .map(|e| {
                        // same seed for every version of a program
                        let spec =
                            NoiseSpec::new(shots, derive_seed(seed, bi as u64, 0)).with_trajectories(trajectories);
                        simulate_noisy(e, &spec, &self.device).and_then(|d| fidelity(&d, ideal)).unwrap_or(f64::NAN)
                    })
                    .collect();
                if fids.iter().any(|f| f.is_nan()) {
                    return None;
                }
                let quality: Vec<f64> = (0..fids.len()).map(|r| -(r as f64)).collect();
                Some(RankCorrelation {
                    benchmark: name.clone(),
                    versions: fids.len(),
                    rho: stats::spearman(&quality, &fids),
                    fidelities: fids,
                })
            })
            .collect()
    }
}

/// Rank-validation result for one benchmark.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankCorrelation {
    pub benchmark: String,
    pub versions: usize,
    /// `None` when there is a single version or all fidelities tie.
    pub rho: Option<f64>,
    /// Simulated fidelity per executable, best-ranked first.
    pub fidelities: Vec<f64>,
}

/// Mean of the defined correlations.
pub fn mean_rank_correlation(rows: &[RankCorrelation]) -> Option<f64> {
    stats::mean(&rows.iter().filter_map(|r| r.rho).collect::<Vec<_>>())
}

fn count_flagged_pairs(procs: &[&Process], sel: &Selection, map: &CrosstalkMap) -> usize {
    let regions: Vec<&[usize]> = procs
        .iter()
        .enumerate()
        .map(|(p, proc)| proc.executables[sel.version_of(p)].region.qubits.as_slice())
        .collect();
    let mut n = 0;
    for i in 0..regions.len() {
        for j in i + 1..regions.len() {
            n += usize::from(map.joins(regions[i], regions[j]));
        }
    }
    debug_assert!(n > 0 || audit_selection(procs, sel, Some(map)));
    n
}

/// Flags `fraction` of the device links with amplification factors drawn
/// uniformly from [`CROSSTALK_FACTOR_RANGE`].
pub fn random_crosstalk_map(g: &DeviceGraph, fraction: f64, seed: u64) -> CrosstalkMap {
    assert!((0.0..=1.0).contains(&fraction), "fraction must lie in [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let links = g.links();
    let count = (fraction * links.len() as f64).round() as usize;
    let (lo, hi) = CROSSTALK_FACTOR_RANGE;
    let picked = sample(&mut rng, links.len(), count).into_vec();
    CrosstalkMap::new(
        picked.into_iter().map(|i| (links[i].a, links[i].b, rng.random_range(lo..=hi))).collect::<Vec<_>>(),
    )
}

/// Convenience wrapper that builds a [`Workbench`] for the groups' members.
pub fn run_fidelity_experiment(
    groups: &[BenchmarkGroup],
    device_id: &str,
    device: &DeviceGraph,
    unit_size: usize,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport, HarnessError> {
    let circuits = group_circuits(groups)?;
    let wb = Workbench::new(device_id, device.clone(), unit_size, &circuits)?;
    Ok(wb.run(groups, cfg))
}

fn group_circuits(groups: &[BenchmarkGroup]) -> Result<Vec<Circuit>, HarnessError> {
    let names: BTreeSet<&String> = groups.iter().flat_map(|g| &g.members).collect();
    names.into_iter().map(|n| benchmark(n).cloned().ok_or_else(|| HarnessError::UnknownBenchmark(n.clone()))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Compute-unit size m.
    UnitSize,
    /// Group size M.
    Concurrency,
    /// Log-normal sigma of the run-time calibration drift.
    Variation,
    /// 0 = crosstalk-unaware selection, 1 = crosstalk-aware selection.
    Crosstalk,
}

impl SweepKind {
    pub const ALL: [SweepKind; 4] =
        [SweepKind::UnitSize, SweepKind::Concurrency, SweepKind::Variation, SweepKind::Crosstalk];

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepKind::UnitSize => "unit_size",
            SweepKind::Concurrency => "concurrency",
            SweepKind::Variation => "variation",
            SweepKind::Crosstalk => "crosstalk",
        }
    }

    pub fn default_values(&self) -> Vec<f64> {
        match self {
            SweepKind::UnitSize => (2..=12).map(f64::from).collect(),
            SweepKind::Concurrency => (2..=10).map(f64::from).collect(),
            SweepKind::Variation => vec![0.0, 0.05, 0.1, 0.2],
            SweepKind::Crosstalk => vec![0.0, 1.0],
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        SweepKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| format!("unknown sweep `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub device_id: String,
    pub device: DeviceGraph,
    pub unit_size: usize,
    pub group_size: usize,
    pub groups: usize,
    pub strategy: Strategy,
    pub mode: Mode,
    pub shots: u64,
    pub seed: u64,
    pub trajectories: usize,
    pub simulate: bool,
    /// Swept parameter values; empty means [`SweepKind::default_values`].
    pub values: Vec<f64>,
    /// Share of links flagged by the generated crosstalk map.
    pub crosstalk_fraction: f64,
}

impl SweepConfig {
    pub fn new(kind: SweepKind, device_id: impl Into<String>, device: DeviceGraph) -> Self {
        SweepConfig {
            kind,
            device_id: device_id.into(),
            device,
            unit_size: 4,
            group_size: 2,
            groups: DEFAULT_GROUPS,
            strategy: Strategy::LargeFirst,
            mode: Mode::FidelityAware,
            shots: DEFAULT_SHOTS,
            seed: 0,
            trajectories: DEFAULT_TRAJECTORIES,
            simulate: true,
            values: Vec::new(),
            crosstalk_fraction: 0.3,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.values.is_empty() {
            self.kind.default_values()
        } else {
            self.values.clone()
        }
    }

    fn experiment(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(self.strategy, self.mode, self.shots, self.seed);
        cfg.trajectories = self.trajectories;
        cfg.simulate = self.simulate;
        cfg
    }
}

/// Sweep results, one [`ExperimentReport`] per parameter value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub report: ExperimentReport,
}

fn as_count(v: f64, what: &str) -> Result<usize, HarnessError> {
    if v >= 1.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(HarnessError::InvalidSweep(format!("{what} must be a positive integer, got {v}")))
    }
}

/// Runs the fidelity experiment across the swept parameter over `suite`.
pub fn run_sweep(cfg: &SweepConfig, suite: &[Circuit]) -> Result<SweepReport, HarnessError> {
    let names: Vec<String> = suite.iter().map(|c| c.name().to_string()).collect();
    let mut rows = Vec::new();
    let bench = |m: usize| Workbench::new(cfg.device_id.clone(), cfg.device.clone(), m, suite);
    match cfg.kind {
        SweepKind::UnitSize => {
            let groups = generate_groups(&names, cfg.group_size, cfg.groups, cfg.seed)?;
            for v in cfg.values() {
                let wb = bench(as_count(v, "unit size")?)?;
                rows.push(SweepRow { param: v, report: wb.run(&groups, &cfg.experiment()) });
            }
        }
        SweepKind::Concurrency => {
            let wb = bench(cfg.unit_size)?;
            for v in cfg.values() {
                let size = as_count(v, "group size")?;
                let groups = generate_groups(&names, size, cfg.groups, derive_seed(cfg.seed, size as u64, 0))?;
                rows.push(SweepRow { param: v, report: wb.run(&groups, &cfg.experiment()) });
            }
        }
        SweepKind::Variation => {
            let wb = bench(cfg.unit_size)?;
            let groups = generate_groups(&names, cfg.group_size, cfg.groups, cfg.seed)?;
            for v in cfg.values() {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(HarnessError::InvalidSweep(format!("sigma must be non-negative, got {v}")));
                }
                let mut exp = cfg.experiment();
                if v > 0.0 {
                    let model = VariationModel::new(0.0, v, derive_seed(cfg.seed, 0x7a, 0));
                    exp.runtime_device = Some(cfg.device.apply_variation(&model));
                }
                rows.push(SweepRow { param: v, report: wb.run(&groups, &exp) });
            }
        }
        SweepKind::Crosstalk => {
            let wb = bench(cfg.unit_size)?;
            let groups = generate_groups(&names, cfg.group_size, cfg.groups, cfg.seed)?;
            let map = random_crosstalk_map(&cfg.device, cfg.crosstalk_fraction, derive_seed(cfg.seed, 0x7c, 0));
            for v in cfg.values() {
                let mut exp = cfg.experiment();
                exp.crosstalk = Some(map.clone());
                exp.crosstalk_aware = v != 0.0;
                rows.push(SweepRow { param: v, report: wb.run(&groups, &exp) });
            }
        }
    }
    Ok(SweepReport { kind: cfg.kind, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("b{i}")).collect()
    }

    #[test]
    fn full_suite_has_one_group() {
        let g = generate_groups(&names(5), 5, 1, 0).unwrap();
        assert_eq!(g.len(), 1);
        assert!(matches!(generate_groups(&names(5), 5, 2, 0), Err(HarnessError::TooManyGroups { possible: 1, .. })));
    }

    #[test]
    fn thirty_distinct_pairs() {
        let g = generate_groups(&names(30), 2, 30, 4).unwrap();
        let set: BTreeSet<_> = g.iter().map(|g| g.members.clone()).collect();
        assert_eq!(set.len(), 30);
        assert_eq!(g, generate_groups(&names(30), 2, 30, 4).unwrap());
        assert_ne!(g, generate_groups(&names(30), 2, 30, 5).unwrap());
    }

    #[test]
    fn group_size_bounds() {
        assert!(generate_groups(&names(3), 1, 1, 0).is_err());
        assert!(generate_groups(&names(3), 4, 1, 0).is_err());
        assert!(generate_groups(&names(3), 2, 0, 0).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(30, 2), 435);
        assert_eq!(binomial(30, 10), 30_045_015);
        assert_eq!(binomial(7, 7), 1);
    }

    fn report(flags: &[bool]) -> ExperimentReport {
        ExperimentReport {
            device_id: "d".into(),
            unit_size: 4,
            strategy: Strategy::LargeFirst,
            mode: Mode::FidelityAware,
            seed: 0,
            shots: 1,
            records: flags
                .iter()
                .enumerate()
                .map(|(i, &ok)| {
                    let g = BenchmarkGroup { id: i, members: vec!["a".into(), "b".into()] };
                    let mut r = GroupRecord::failed(&g, "x".into());
                    r.success = ok;
                    r
                })
                .collect(),
        }
    }

    #[test]
    fn success_ratio_arithmetic() {
        assert_eq!(success_ratio(&report(&[true; 5])), Some(1.0));
        let eight: Vec<bool> = (0..30).map(|i| i < 8).collect();
        assert!((success_ratio(&report(&eight)).unwrap() - 0.2667).abs() < 5e-5);
        let four_failures: Vec<bool> = (0..30).map(|i| i >= 4).collect();
        assert_eq!(success_ratio(&report(&four_failures)), Some(26.0 / 30.0));
        assert_eq!(success_ratio(&report(&[])), None);
    }

    #[test]
    fn infeasible_group_is_recorded() {
        // three 10-qubit programs cannot share a 27-qubit device cut into 4-qubit units
        let suite: Vec<Circuit> = ["adder_n10", "ising_n10"].iter().map(|n| benchmark(n).unwrap().clone()).collect();
        let wb = Workbench::new("heavy_hex_27", device_27(), 4, &suite).unwrap();
        let g = BenchmarkGroup { id: 0, members: vec!["adder_n10".into(), "ising_n10".into(), "adder_n10".into()] };
        let mut cfg = ExperimentConfig::new(Strategy::LargeFirst, Mode::FidelityAware, 256, 1);
        cfg.simulate = false;
        let rep = wb.run(&[g], &cfg);
        assert_eq!(rep.records.len(), 1);
        assert!(!rep.records[0].success);
        assert!(rep.records[0].failure.is_some());
        assert_eq!(success_ratio(&rep), Some(0.0));
    }

    #[test]
    fn crosstalk_maps_are_seeded() {
        let g = device_27();
        let a = random_crosstalk_map(&g, 0.3, 9);
        assert_eq!(a.len(), 8);
        assert_eq!(a, random_crosstalk_map(&g, 0.3, 9));
        assert!(a.flagged_links().all(|(x, y, f)| g.are_linked(x, y) && (2.0..=5.0).contains(&f)));
    }

    #[test]
    fn seeds_mix() {
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
        assert_ne!(derive_seed(1, 0, 1), derive_seed(1, 1, 0));
        assert_eq!(derive_seed(3, 4, 5), derive_seed(3, 4, 5));
    }
}
