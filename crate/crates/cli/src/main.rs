use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::{Deserialize, Serialize};

use mpqc_core::circuit::parse_qasm_named;
use mpqc_core::compiler::{compile_multi_version, manifest_file_name, Executable, ProcessManifest};
use mpqc_core::device::{load_calibration, DeviceGraph};
use mpqc_core::harness::{
    benchmark_suite, bundled_device, derive_seed, mean_rank_correlation, run_sweep, worker_count_from_env, Mode,
    SweepConfig, SweepKind, Workbench, DEFAULT_SHOTS, WORKERS_ENV,
};
use mpqc_core::orchestrator::{
    orchestrate, BruteForceOptions, CrosstalkMap, Objective, Strategy, VersionedProgram, DEFAULT_BRUTE_FORCE_TIMEOUT,
};
use mpqc_core::partition::{generate_compute_units, UnitGraph};
use mpqc_core::sim::{
    fidelity, simulate_executable_ideal, simulate_noisy, Distribution, NoiseSpec, DEFAULT_TRAJECTORIES,
};

#[derive(Parser)]
#[command(name = "mpqc", version, about = "Compile, place and run concurrent quantum programs")]
struct Cli {
    /// Worker threads for parallel compilation and simulation
    /// (defaults to MPQC_WORKERS, then the number of cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition a device into compute units.
    Partition(PartitionArgs),
    /// Compile a program onto every candidate region of a device.
    Compile(CompileArgs),
    /// Choose one version per process so that no two share a unit.
    Orchestrate(OrchestrateArgs),
    /// Simulate executables co-running on a noisy device.
    Run(RunArgs),
    /// Run a parameter sweep over the bundled benchmark suite.
    Bench(BenchArgs),
}

#[derive(Args)]
struct DeviceArg {
    /// Calibration JSON file, or `heavy_hex_27` / `heavy_hex_65`.
    #[arg(long, short)]
    device: String,
}

impl DeviceArg {
    fn load(&self) -> Result<(String, DeviceGraph)> {
        if let Some(g) = bundled_device(&self.device) {
            return Ok((self.device.clone(), g));
        }
        let path = Path::new(&self.device);
        let g = load_calibration(path).with_context(|| format!("loading device {}", path.display()))?;
        let id = path.file_stem().map_or_else(|| self.device.clone(), |s| s.to_string_lossy().into_owned());
        Ok((id, g))
    }
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    device: DeviceArg,
    #[arg(long, short = 'm', default_value_t = 4)]
    unit_size: usize,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    /// OpenQASM 2.0 source.
    program: PathBuf,
    #[command(flatten)]
    device: DeviceArg,
    #[arg(long, short = 'm', default_value_t = 4)]
    unit_size: usize,
    /// Directory for the manifest and the per-region artifacts.
    #[arg(long, short)]
    out_dir: PathBuf,
    /// Program name (defaults to the file stem).
    #[arg(long)]
    name: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    IndexSum,
    RelativePosition,
}

#[derive(Args)]
struct OrchestrateArgs {
    /// Process manifests written by `compile`.
    #[arg(required = true)]
    manifests: Vec<PathBuf>,
    #[arg(long, short, default_value = "large_first")]
    strategy: Strategy,
    /// JSON map of flagged links: {"links": [[a, b, factor], ...]}.
    #[arg(long)]
    crosstalk: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exhaustive search budget in milliseconds.
    #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_TIMEOUT.as_millis() as u64)]
    timeout_ms: u64,
    #[arg(long, value_enum, default_value = "index-sum")]
    objective: ObjectiveArg,
    /// Enumerate every combination without branch-and-bound.
    #[arg(long)]
    no_pruning: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    /// Executable artifacts to co-run.
    artifacts: Vec<PathBuf>,
    /// Run the executables picked in an `orchestrate` report.
    #[arg(long, conflicts_with = "artifacts")]
    selection: Option<PathBuf>,
    #[command(flatten)]
    device: DeviceArg,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRAJECTORIES)]
    trajectories: usize,
    #[arg(long)]
    crosstalk: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "concurrency")]
    sweep: SweepKind,
    #[command(flatten)]
    device: DeviceArg,
    #[arg(long, short = 'm', default_value_t = 4)]
    unit_size: usize,
    #[arg(long, short, default_value = "large_first")]
    strategy: Strategy,
    #[arg(long, default_value = "fidelity_aware")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    #[arg(long, default_value_t = DEFAULT_TRAJECTORIES)]
    trajectories: usize,
    #[arg(long, default_value_t = 10)]
    groups: usize,
    /// Programs per group, for sweeps that do not vary it.
    #[arg(long, default_value_t = 2)]
    group_size: usize,
    /// Comma-separated sweep values (defaults depend on the sweep).
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    /// Fraction of links flagged in the crosstalk sweep.
    #[arg(long, default_value_t = 0.3)]
    crosstalk_fraction: f64,
    /// Orchestrate only; report success ratios without simulating.
    #[arg(long)]
    no_simulate: bool,
    /// Also compute the rank-vs-fidelity correlation at the base unit size.
    #[arg(long)]
    rank_correlation: bool,
    /// CSV report path.
    #[arg(long, short)]
    out: PathBuf,
    /// JSON summary path (defaults to the CSV path with a .json extension).
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.workers.or_else(worker_count_from_env) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker pool")?;
        info!("using {n} workers");
    } else if std::env::var_os(WORKERS_ENV).is_some() {
        warn!("ignoring {WORKERS_ENV}: expected a positive integer");
    }
    match cli.command {
        Command::Partition(a) => partition(a),
        Command::Compile(a) => compile(a),
        Command::Orchestrate(a) => orchestrate_cmd(a),
        Command::Run(a) => run(a),
        Command::Bench(a) => bench(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.write_all(b"\n")) {
                // reader went away, e.g. piped into `head`
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_crosstalk(path: Option<&Path>) -> Result<Option<CrosstalkMap>> {
    path.map(|p| {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        CrosstalkMap::from_json(&text).with_context(|| format!("parsing crosstalk map {}", p.display()))
    })
    .transpose()
}

#[derive(Serialize)]
struct PartitionReport<'a> {
    device: &'a str,
    num_qubits: usize,
    residual_count: usize,
    #[serde(flatten)]
    units: &'a UnitGraph,
}

fn partition(a: PartitionArgs) -> Result<()> {
    let (id, g) = a.device.load()?;
    let ug = generate_compute_units(&g, a.unit_size)?;
    let report =
        PartitionReport { device: &id, num_qubits: g.num_qubits(), residual_count: ug.residual_count(), units: &ug };
    emit(a.out.as_deref(), &serde_json::to_string_pretty(&report)?)
}

fn compile(a: CompileArgs) -> Result<()> {
    let (_, g) = a.device.load()?;
    let name = match a.name {
        Some(n) => n,
        None => a.program.file_stem().context("program path has no file name")?.to_string_lossy().into_owned(),
    };
    let text = fs::read_to_string(&a.program).with_context(|| format!("reading {}", a.program.display()))?;
    let circuit = parse_qasm_named(&name, &text)?;
    let ug = generate_compute_units(&g, a.unit_size)?;
    let process = compile_multi_version(&circuit, &ug, &g)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let manifest = ProcessManifest::from_process(&process, a.unit_size);
    for (e, entry) in process.executables.iter().zip(&manifest.versions) {
        fs::write(a.out_dir.join(&entry.artifact), serde_json::to_string(e)?)?;
    }
    let path = a.out_dir.join(manifest_file_name(&name));
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    info!("{name}: {} versions", manifest.versions.len());
    emit(None, &path.display().to_string())
}

#[derive(Serialize, Deserialize)]
struct Placement {
    program: String,
    manifest: PathBuf,
    version: usize,
    artifact: PathBuf,
    unit_ids: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SelectionReport {
    strategy: Strategy,
    seed: u64,
    placements: Vec<Placement>,
    traversal: Vec<usize>,
    index_sum: usize,
    elapsed_ns: u64,
    evaluations: u64,
}

fn orchestrate_cmd(a: OrchestrateArgs) -> Result<()> {
    let manifests: Vec<ProcessManifest> = a.manifests.iter().map(|p| read_json(p)).collect::<Result<_>>()?;
    let crosstalk = load_crosstalk(a.crosstalk.as_deref())?;
    let options = BruteForceOptions {
        timeout: Duration::from_millis(a.timeout_ms),
        pruning: !a.no_pruning,
        objective: match a.objective {
            ObjectiveArg::IndexSum => Objective::IndexSum,
            ObjectiveArg::RelativePosition => Objective::RelativePosition,
        },
    };
    if crosstalk.is_some() && a.strategy == Strategy::BruteForce {
        warn!("the exhaustive selector ignores the crosstalk map");
    }
    let sel = orchestrate(&manifests, a.strategy, a.seed, crosstalk.as_ref(), &options)?;
    let placements = manifests
        .iter()
        .zip(&a.manifests)
        .enumerate()
        .map(|(i, (m, path))| {
            let v = sel.version_of(i);
            let dir = path.parent().unwrap_or(Path::new(""));
            Placement {
                program: m.program_name().to_string(),
                manifest: path.clone(),
                version: v + 1,
                artifact: dir.join(&m.versions[v].artifact),
                unit_ids: m.units(v).to_vec(),
            }
        })
        .collect();
    let report = SelectionReport {
        strategy: sel.strategy,
        seed: a.seed,
        placements,
        traversal: sel.traversal,
        index_sum: sel.index_sum,
        elapsed_ns: sel.elapsed.as_nanos() as u64,
        evaluations: sel.evaluations,
    };
    emit(a.out.as_deref(), &serde_json::to_string_pretty(&report)?)
}

#[derive(Serialize)]
struct RunRecord {
    program: String,
    artifact: PathBuf,
    unit_ids: Vec<usize>,
    fidelity: f64,
    distribution: Distribution,
    ideal: Distribution,
}

#[derive(Serialize)]
struct RunReport {
    device: String,
    shots: u64,
    seed: u64,
    runs: Vec<RunRecord>,
}

fn run(a: RunArgs) -> Result<()> {
    let paths = match &a.selection {
        Some(p) => read_json::<SelectionReport>(p)?.placements.into_iter().map(|pl| pl.artifact).collect(),
        None => a.artifacts.clone(),
    };
    if paths.is_empty() {
        bail!("nothing to run: pass executable artifacts or --selection");
    }
    let (id, g) = a.device.load()?;
    let crosstalk = load_crosstalk(a.crosstalk.as_deref())?;
    let executables: Vec<Executable> = paths.iter().map(|p| read_json(p)).collect::<Result<_>>()?;
    for (i, x) in executables.iter().enumerate() {
        for (p, y) in paths.iter().zip(&executables).skip(i + 1) {
            if x.units().iter().any(|u| y.units().contains(u)) {
                bail!("{} shares a compute unit with {}", x.program_name, p.display());
            }
        }
    }
    let mut runs = Vec::with_capacity(executables.len());
    for (i, e) in executables.iter().enumerate() {
        let mut spec = NoiseSpec::new(a.shots, derive_seed(a.seed, i as u64, 0)).with_trajectories(a.trajectories);
        if let Some(map) = &crosstalk {
            let others = executables.iter().enumerate().filter(|&(j, _)| j != i).flat_map(|(_, o)| o.active_qubits());
            spec = spec.with_crosstalk(map.clone(), others.collect());
        }
        let distribution = simulate_noisy(e, &spec, &g)?;
        let ideal = simulate_executable_ideal(e)?;
        runs.push(RunRecord {
            program: e.program_name.clone(),
            artifact: paths[i].clone(),
            unit_ids: e.units().to_vec(),
            fidelity: fidelity(&distribution, &ideal)?,
            distribution,
            ideal,
        });
    }
    let report = RunReport { device: id, shots: a.shots, seed: a.seed, runs };
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["program", "artifact", "units", "shots", "fidelity"])?;
            for r in &report.runs {
                let units = r.unit_ids.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(";");
                w.write_record([
                    r.program.clone(),
                    r.artifact.display().to_string(),
                    units,
                    report.shots.to_string(),
                    r.fidelity.to_string(),
                ])?;
            }
            String::from_utf8(w.into_inner()?)?.trim_end().to_string()
        }
    };
    emit(a.out.as_deref(), &text)
}

fn bench(a: BenchArgs) -> Result<()> {
    let (id, g) = a.device.load()?;
    let mut cfg = SweepConfig::new(a.sweep, id.clone(), g.clone());
    cfg.unit_size = a.unit_size;
    cfg.strategy = a.strategy;
    cfg.mode = a.mode;
    cfg.seed = a.seed;
    cfg.shots = a.shots;
    cfg.trajectories = a.trajectories;
    cfg.groups = a.groups;
    cfg.group_size = a.group_size;
    cfg.values = a.values;
    cfg.crosstalk_fraction = a.crosstalk_fraction;
    cfg.simulate = !a.no_simulate;
    let report = run_sweep(&cfg, benchmark_suite())?;
    let mut summary = report.summary();
    if a.rank_correlation {
        let wb = Workbench::new(id, g, a.unit_size, benchmark_suite())?;
        summary.rank_correlation = mean_rank_correlation(&wb.rank_correlations(a.shots, a.seed, a.trajectories));
    }
    fs::write(&a.out, report.to_csv_string()?).with_context(|| format!("writing {}", a.out.display()))?;
    let summary_path = a.summary.unwrap_or_else(|| a.out.with_extension("json"));
    fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)
        .with_context(|| format!("writing {}", summary_path.display()))?;
    emit(None, &serde_json::to_string_pretty(&summary)?)
}
