//! Run metrics files and the cross-run comparison table.

use crate::simulator::Metrics;
use serde::{Deserialize, Serialize};
use std::fmt::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const PLAN_METRICS_FILE: &str = "metrics.json";
pub const SIM_METRICS_FILE: &str = "sim_metrics.json";

/// Where a metrics record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricsSource {
    /// Sampled from the planned trajectory.
    Plan,
    /// Measured on the forward simulation.
    Simulation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub source: MetricsSource,
    pub objective: String,
    pub lambda: f64,
    pub seed: u64,
    pub nodes_per_segment: usize,
    pub segments: usize,
    pub segment_durations: Vec<f64>,
    #[serde(flatten)]
    pub metrics: Metrics,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{}: no {PLAN_METRICS_FILE} or {SIM_METRICS_FILE} found", .0.display())]
    MissingMetrics(PathBuf),
    #[error("{}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
}

pub fn write_metrics(path: &Path, m: &RunMetrics) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(m).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

pub fn read_metrics(path: &Path) -> Result<RunMetrics, ReportError> {
    let text = std::fs::read_to_string(path).map_err(|source| ReportError::Read {
        path: path.into(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| ReportError::Parse {
        path: path.into(),
        source,
    })
}

/// Loads a run directory's metrics, preferring the simulated ones.
pub fn load_run(dir: &Path) -> Result<RunMetrics, ReportError> {
    for name in [SIM_METRICS_FILE, PLAN_METRICS_FILE] {
        let path = dir.join(name);
        if path.is_file() {
            return read_metrics(&path);
        }
    }
    Err(ReportError::MissingMetrics(dir.into()))
}

pub fn format_table(runs: &[(String, RunMetrics)]) -> String {
    let name_w = runs.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(3);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_w$}  {:<9}  {:<10}  {:>14}  {:>21}  {:>22}  {:>14}",
        "run",
        "objective",
        "source",
        "avg_speed(m/s)",
        "min_obstacle_dist(m)",
        "avg_ctrl_input(N/s)",
        "total_time(s)"
    );
    for (name, r) in runs {
        let source = match r.source {
            MetricsSource::Plan => "plan",
            MetricsSource::Simulation => "simulation",
        };
        let _ = writeln!(
            out,
            "{:<name_w$}  {:<9}  {:<10}  {:>14.4}  {:>21.3}  {:>22.3}  {:>14.2}",
            name,
            r.objective,
            source,
            r.metrics.avg_speed,
            r.metrics.min_obstacle_distance,
            r.metrics.avg_control_input,
            r.metrics.total_time
        );
    }
    out
}
