//! Command-line entry points: `plan`, `simulate` and `report`.
//!
//! Exit codes: 0 success, 1 input errors, 2 front-end or corridor failure, 3 segment
//! optimization failure.

use crate::io::report::{format_table, PLAN_METRICS_FILE, SIM_METRICS_FILE};
use crate::io::{
    load_run, load_scenario, planned_rows, read_metrics, read_trajectory, render_svg,
    write_corridors, write_metrics, write_trajectory, write_waypoints, MetricsSource, PlotData,
    RunMetrics, SampledTrajectory, TrajectoryRow,
};
use crate::pipeline::{plan_trajectory, ObjectiveName, PipelineError, Scenario};
use crate::simulator::{compute_metrics, simulate, SimConfig, SimSample};
use crate::world::Point2;
use clap::{Parser, Subcommand};
use log::info;
use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const WAYPOINTS_FILE: &str = "waypoints.csv";
pub const CORRIDORS_FILE: &str = "corridors.csv";
pub const PLOT_FILE: &str = "plot.svg";
pub const SIM_TRAJECTORY_FILE: &str = "sim_trajectory.csv";
pub const SIM_PLOT_FILE: &str = "sim_plot.svg";

#[derive(Debug, Parser)]
#[command(
    name = "asvplan",
    version,
    about = "Corridor-constrained trajectory planning for a twin-thruster surface vessel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan a trajectory for a scenario and write it with waypoints, corridors, metrics and a plot.
    Plan {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// `min-input` or `min-accel`; overrides the scenario's objective kind.
        #[arg(long, value_parser = parse_objective)]
        objective: Option<ObjectiveName>,
        /// Overrides the front-end seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the number of collocation nodes per segment.
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Integrate the vessel model under a planned trajectory's controls.
    Simulate {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Integration step [s].
        #[arg(long, default_value_t = SimConfig::default().dt)]
        dt: f64,
    },
    /// Print a comparison table over run directories.
    Report {
        #[arg(long, num_args = 1.., required = true)]
        runs: Vec<PathBuf>,
    },
}

fn parse_objective(s: &str) -> Result<ObjectiveName, String> {
    ObjectiveName::parse(s)
        .ok_or_else(|| format!("unknown objective `{s}` (expected min-input or min-accel)"))
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let code = match e {
            PipelineError::InvalidScenario(_) | PipelineError::Transcription { .. } => 1,
            PipelineError::FrontEndFailed(_) | PipelineError::CorridorFailed { .. } => 2,
            PipelineError::SegmentInfeasible { .. } | PipelineError::Solver { .. } => 3,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::input(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("ASVPLAN_LOG", "warn");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Plan {
            scenario,
            out,
            objective,
            seed,
            nodes,
        } => cmd_plan(&scenario, &out, objective, seed, nodes),
        Command::Simulate {
            trajectory,
            scenario,
            out,
            dt,
        } => cmd_simulate(&trajectory, &scenario, &out, dt),
        Command::Report { runs } => cmd_report(&runs),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    load_scenario(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn rows_to_samples(rows: &[TrajectoryRow]) -> Vec<SimSample> {
    rows.iter().map(SimSample::from).collect()
}

fn cmd_plan(
    scenario_path: &Path,
    out: &Path,
    objective: Option<ObjectiveName>,
    seed: Option<u64>,
    nodes: Option<usize>,
) -> Result<(), Failure> {
    let mut scenario = load(scenario_path)?;
    if let Some(kind) = objective {
        scenario = scenario.with_objective(kind);
    }
    if let Some(seed) = seed {
        scenario.planner.rng_seed = seed;
    }
    if let Some(k) = nodes {
        scenario.nodes = k;
    }
    let traj = plan_trajectory(&scenario)?;
    std::fs::create_dir_all(out).map_err(io_err(out))?;

    let rows = planned_rows(&traj, &scenario.params);
    let path = out.join(TRAJECTORY_FILE);
    write_trajectory(create(&path)?, &rows)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let path = out.join(WAYPOINTS_FILE);
    write_waypoints(create(&path)?, &traj.waypoints)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let path = out.join(CORRIDORS_FILE);
    write_corridors(create(&path)?, &traj.corridors)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;

    let metrics = RunMetrics {
        source: MetricsSource::Plan,
        objective: ObjectiveName::of(&scenario.objective).as_str().into(),
        lambda: scenario.objective.lambda(),
        seed: scenario.planner.rng_seed,
        nodes_per_segment: scenario.nodes,
        segments: traj.segments.len(),
        segment_durations: traj.segments.iter().map(|s| s.duration).collect(),
        metrics: compute_metrics(&rows_to_samples(&rows), &scenario.map),
    };
    let path = out.join(PLAN_METRICS_FILE);
    write_metrics(&path, &metrics).map_err(io_err(&path))?;

    let svg = render_svg(&PlotData {
        map: Some(&scenario.map),
        inflate: scenario.corridor_inflate(),
        corridors: &traj.corridors,
        path: &traj.path.vertices,
        waypoints: &traj.waypoints,
        trajectory: &rows,
        start: Some(Point2::new(scenario.start.x, scenario.start.y)),
        goal: Some(Point2::new(scenario.goal.x, scenario.goal.y)),
    });
    let path = out.join(PLOT_FILE);
    std::fs::write(&path, svg).map_err(io_err(&path))?;

    info!("wrote {}", out.display());
    println!(
        "planned {} segments ({}), total {:.2} s, segment durations [{}]",
        traj.segments.len(),
        metrics.objective,
        traj.total_duration,
        metrics
            .segment_durations
            .iter()
            .map(|d| format!("{d:.2}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(())
}

fn cmd_simulate(
    trajectory: &Path,
    scenario_path: &Path,
    out: &Path,
    dt: f64,
) -> Result<(), Failure> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Failure::input(format!("--dt must be positive, got {dt}")));
    }
    let scenario = load(scenario_path)?;
    let file = File::open(trajectory).map_err(io_err(trajectory))?;
    let rows = read_trajectory(std::io::BufReader::new(file))
        .map_err(|e| Failure::input(format!("{}: {e}", trajectory.display())))?;
    let reference = SampledTrajectory::new(rows)
        .map_err(|e| Failure::input(format!("{}: {e}", trajectory.display())))?;

    let result = simulate(
        &reference,
        &scenario.params,
        &scenario.map,
        &SimConfig { dt },
    );
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let sim_rows: Vec<TrajectoryRow> = result.samples.iter().map(TrajectoryRow::from).collect();
    let path = out.join(SIM_TRAJECTORY_FILE);
    write_trajectory(create(&path)?, &sim_rows)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;

    let planned = trajectory
        .parent()
        .map(|d| d.join(PLAN_METRICS_FILE))
        .and_then(|p| read_metrics(&p).ok());
    let segments = reference.rows.last().map_or(0, |r| r.segment + 1);
    let metrics = RunMetrics {
        source: MetricsSource::Simulation,
        objective: planned.as_ref().map_or_else(
            || ObjectiveName::of(&scenario.objective).as_str().into(),
            |p| p.objective.clone(),
        ),
        lambda: planned
            .as_ref()
            .map_or(scenario.objective.lambda(), |p| p.lambda),
        seed: planned
            .as_ref()
            .map_or(scenario.planner.rng_seed, |p| p.seed),
        nodes_per_segment: planned
            .as_ref()
            .map_or(scenario.nodes, |p| p.nodes_per_segment),
        segments,
        segment_durations: planned.map_or_else(Vec::new, |p| p.segment_durations),
        metrics: result.metrics,
    };
    let path = out.join(SIM_METRICS_FILE);
    write_metrics(&path, &metrics).map_err(io_err(&path))?;

    let planned_path = reference.positions();
    let svg = render_svg(&PlotData {
        map: Some(&scenario.map),
        inflate: scenario.corridor_inflate(),
        path: &planned_path,
        trajectory: &sim_rows,
        start: Some(Point2::new(scenario.start.x, scenario.start.y)),
        goal: Some(Point2::new(scenario.goal.x, scenario.goal.y)),
        ..PlotData::default()
    });
    let path = out.join(SIM_PLOT_FILE);
    std::fs::write(&path, svg).map_err(io_err(&path))?;

    let m = &result.metrics;
    println!(
        "simulated {:.2} s: avg speed {:.4} m/s, min obstacle distance {:.3} m, avg control input {:.3} N/s, tracking rmse {:.4} m, terminal error {:.4} m",
        m.total_time, m.avg_speed, m.min_obstacle_distance, m.avg_control_input, m.tracking_rmse, m.terminal_error
    );
    Ok(())
}

fn cmd_report(dirs: &[PathBuf]) -> Result<(), Failure> {
    let mut runs = Vec::with_capacity(dirs.len());
    for dir in dirs {
        if !dir.is_dir() {
            return Err(Failure::input(format!(
                "{}: not a directory",
                dir.display()
            )));
        }
        let m = load_run(dir).map_err(|e| Failure::input(e.to_string()))?;
        let name = dir.file_name().map_or_else(
            || dir.display().to_string(),
            |n| n.to_string_lossy().into_owned(),
        );
        runs.push((name, m));
    }
    print!("{}", format_table(&runs));
    Ok(())
}
