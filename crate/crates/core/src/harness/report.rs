//! CSV rows and JSON summaries for sweeps.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::stats::{mean, spearman, std_dev};
use super::{success_ratio, HarnessError, SweepKind, SweepReport};

/// Column order of [`write_csv`]. List-valued cells are `;`-separated.
pub const CSV_COLUMNS: [&str; 14] = [
    "sweep",
    "param",
    "group_id",
    "members",
    "device",
    "unit_size",
    "strategy",
    "mode",
    "success",
    "mean_fidelity",
    "fidelities",
    "versions",
    "evaluations",
    "selection_ns",
];

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

/// One row per (parameter value, group).
pub fn write_csv<W: Write>(report: &SweepReport, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in &report.rows {
        let r = &row.report;
        for g in &r.records {
            w.write_record([
                report.kind.as_str().to_string(),
                row.param.to_string(),
                g.group_id.to_string(),
                g.members.join("+"),
                r.device_id.clone(),
                r.unit_size.to_string(),
                r.strategy.to_string(),
                r.mode.to_string(),
                g.success.to_string(),
                g.mean_fidelity().map(|f| format!("{f:.6}")).unwrap_or_default(),
                join(&g.fidelities.iter().map(|f| format!("{f:.6}")).collect::<Vec<_>>()),
                join(&g.versions),
                g.evaluations.to_string(),
                g.selection_ns.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: f64,
    pub groups: usize,
    pub successes: usize,
    pub success_ratio: f64,
    pub mean_fidelity: Option<f64>,
    pub std_fidelity: Option<f64>,
    pub mean_evaluations: Option<f64>,
    pub flagged_pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub kind: SweepKind,
    pub points: Vec<SweepPoint>,
    /// Spearman correlation between the parameter and group mean fidelity.
    pub param_fidelity_spearman: Option<f64>,
    /// Mean per-benchmark rank-vs-fidelity correlation, when computed.
    pub rank_correlation: Option<f64>,
}

impl SweepReport {
    pub fn summary(&self) -> SweepSummary {
        let points = self
            .rows
            .iter()
            .map(|row| {
                let r = &row.report;
                let fids = r.group_fidelities();
                let evals: Vec<f64> = r.records.iter().filter(|g| g.success).map(|g| g.evaluations as f64).collect();
                SweepPoint {
                    param: row.param,
                    groups: r.records.len(),
                    successes: r.successes(),
                    success_ratio: success_ratio(r).unwrap_or(0.0),
                    mean_fidelity: mean(&fids),
                    std_fidelity: std_dev(&fids),
                    mean_evaluations: mean(&evals),
                    flagged_pairs: r.flagged_pairs(),
                }
            })
            .collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .rows
            .iter()
            .flat_map(|row| row.report.group_fidelities().into_iter().map(move |f| (row.param, f)))
            .unzip();
        SweepSummary { kind: self.kind, points, param_fidelity_spearman: spearman(&xs, &ys), rank_correlation: None }
    }

    pub fn to_csv_string(&self) -> Result<String, HarnessError> {
        let mut buf = Vec::new();
        write_csv(self, &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}
