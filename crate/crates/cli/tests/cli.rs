use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mpqc_core::compiler::{compile_multi_version, Executable, ProcessManifest};
use mpqc_core::harness::{benchmark, device_27, CSV_COLUMNS};
use mpqc_core::partition::generate_compute_units;
use serde_json::Value;

const BENCHMARKS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/benchmarks");
const DEVICE_27: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/devices/heavy_hex_27.json");

fn mpqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpqc")).args(args).env_remove("MPQC_WORKERS").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = mpqc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn program(name: &str) -> String {
    format!("{BENCHMARKS}/{name}.qasm")
}

fn compile(dir: &Path, name: &str) -> PathBuf {
    let out = ok(&["compile", &program(name), "-d", DEVICE_27, "-m", "4", "--out-dir", dir.to_str().unwrap()]);
    PathBuf::from(out.trim())
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn partition_report_matches_the_library() {
    let report: Value = serde_json::from_str(&ok(&["partition", "-d", DEVICE_27, "-m", "4"])).unwrap();
    let ug = generate_compute_units(&device_27(), 4).unwrap();
    assert_eq!(report["device"], "heavy_hex_27");
    assert_eq!(report["num_qubits"], 27);
    assert_eq!(report["residual_count"], ug.residual_count());
    let units = report["units"].as_array().unwrap();
    assert_eq!(units.len(), ug.units.len());
    for (u, v) in ug.units.iter().zip(units) {
        assert_eq!(serde_json::to_value(&u.qubits).unwrap(), v["qubits"]);
        assert_eq!(v["utility"].as_f64().unwrap(), u.utility);
    }
    assert_eq!(report["edges"].as_array().unwrap().len(), ug.edges.len());
}

#[test]
fn compile_writes_ranked_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let manifest_path = compile(dir.path(), "qft_n4");
    let manifest: ProcessManifest = serde_json::from_value(json(&manifest_path)).unwrap();
    let ug = generate_compute_units(&device_27(), 4).unwrap();
    let expected = compile_multi_version(benchmark("qft_n4").unwrap(), &ug, &device_27()).unwrap();
    assert_eq!(manifest, ProcessManifest::from_process(&expected, 4));
    for (entry, e) in manifest.versions.iter().zip(&expected.executables) {
        let written: Executable = serde_json::from_value(json(&dir.path().join(&entry.artifact))).unwrap();
        assert_eq!(&written, e);
    }
}

#[test]
fn compile_orchestrate_run_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let manifests: Vec<PathBuf> =
        ["adder_n4", "qaoa_n6", "deutsch_n2"].iter().map(|n| compile(dir.path(), n)).collect();
    let sel_path = dir.path().join("selection.json");
    let mut args = vec!["orchestrate", "-s", "large_first", "-o", sel_path.to_str().unwrap()];
    args.extend(manifests.iter().map(|p| p.to_str().unwrap()));
    ok(&args);
    let sel = json(&sel_path);
    let placements = sel["placements"].as_array().unwrap();
    assert_eq!(placements.len(), 3);
    let mut used: Vec<u64> =
        placements.iter().flat_map(|p| p["unit_ids"].as_array().unwrap().iter().map(|u| u.as_u64().unwrap())).collect();
    let total = used.len();
    used.sort_unstable();
    used.dedup();
    assert_eq!(used.len(), total, "placements share a unit");
    let index_sum: u64 = placements.iter().map(|p| p["version"].as_u64().unwrap()).sum();
    assert_eq!(sel["index_sum"].as_u64().unwrap(), index_sum);

    let report: Value = serde_json::from_str(&ok(&[
        "run",
        "--selection",
        sel_path.to_str().unwrap(),
        "-d",
        "heavy_hex_27",
        "--shots",
        "1024",
        "--trajectories",
        "64",
    ]))
    .unwrap();
    let runs = report["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    for (r, p) in runs.iter().zip(placements) {
        assert_eq!(r["program"], p["program"]);
        let f = r["fidelity"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&f) && f > 0.3, "{}: {f}", r["program"]);
        let total: f64 = r["distribution"]["outcomes"].as_object().unwrap().values().map(|v| v.as_f64().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn run_is_reproducible_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    compile(dir.path(), "cat_state_n4");
    let artifact = dir.path().join("cat_state_n4.v1.json");
    let args = ["run", artifact.to_str().unwrap(), "-d", DEVICE_27, "--shots", "512", "--seed", "7", "--format", "csv"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let mut reader = csv::Reader::from_reader(a.as_bytes());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["program", "artifact", "units", "shots", "fidelity"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "cat_state_n4");
}

#[test]
fn overlapping_executables_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    compile(dir.path(), "deutsch_n2");
    let v1 = dir.path().join("deutsch_n2.v1.json");
    let out = mpqc(&["run", v1.to_str().unwrap(), v1.to_str().unwrap(), "-d", DEVICE_27]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("shares a compute unit"));
}

#[test]
fn bad_arguments_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = compile(dir.path(), "deutsch_n2");
    assert!(!mpqc(&["orchestrate", "-s", "fastest", manifest.to_str().unwrap()]).status.success());
    assert!(!mpqc(&["partition", "-d", "no_such_device.json"]).status.success());
    assert!(!mpqc(&["partition", "-d", DEVICE_27, "-m", "0"]).status.success());
}

#[test]
fn bench_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_mpqc"))
        .args([
            "bench",
            "--sweep",
            "concurrency",
            "-d",
            "heavy_hex_27",
            "--groups",
            "3",
            "--values",
            "2,3",
            "--no-simulate",
        ])
        .args(["-o", csv_path.to_str().unwrap()])
        .env("MPQC_WORKERS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_COLUMNS.to_vec());
    assert_eq!(reader.records().count(), 6);
    let summary = json(&csv_path.with_extension("json"));
    let points = summary["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    assert_eq!(points[0]["param"], 2.0);
    assert!(points.iter().all(|p| p["groups"] == 3));
}
