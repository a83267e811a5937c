//! File formats: scenarios, CSV series, metrics and plots.

pub mod plot;
pub mod report;
pub mod scenario;
pub mod trajectory;

pub use plot::{render_svg, PlotData};
pub use report::{load_run, read_metrics, write_metrics, MetricsSource, RunMetrics};
pub use scenario::{load_scenario, parse_scenario, save_scenario, scenario_to_toml, ScenarioError};
pub use trajectory::{
    planned_rows, read_corridors, read_trajectory, read_waypoints, write_corridors,
    write_trajectory, write_waypoints, CsvError, SampledTrajectory, TrajectoryRow,
};
