//! Front-end search, waypoint extraction, corridor construction and sequential
//! segment optimization.

use crate::dynamics::{unpack_state, wrap_angle, BodyVelocity, ControlInput, Pose, VesselParams};
use crate::nlp_solver::{minimize, SolveStatus, SolverConfig, SolverError};
use crate::rrt_star::{densify, fewest_hop_vertices, plan, PlanError, PlannedPath, PlannerConfig};
use crate::transcription::{
    build_nlp, decode, BoundSet, BoundaryState, EndCondition, Layout, ObjectiveKind,
    SegmentProblem, SegmentTrajectory, TranscriptionError,
};
use crate::world::{
    compute_corridor, is_free, seed_box_free, segment_free, Corridor, Point2, WorldError, WorldMap,
};
use log::{debug, info, warn};
use thiserror::Error;

/// Spacing used to resample the front-end path before shortcutting [m].
const DENSIFY_SPACING: f64 = 0.1;

/// Time-term weights of the two objective kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveWeights {
    pub min_input: f64,
    pub min_accel: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self {
            min_input: 1.0,
            min_accel: 2e-4,
        }
    }
}

impl ObjectiveWeights {
    pub fn objective(&self, kind: ObjectiveName) -> ObjectiveKind {
        match kind {
            ObjectiveName::MinInput => ObjectiveKind::MinControlInput {
                lambda: self.min_input,
            },
            ObjectiveName::MinAccel => ObjectiveKind::MinAcceleration {
                lambda: self.min_accel,
            },
        }
    }
}

/// Objective selector as used on the command line and in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveName {
    MinInput,
    MinAccel,
}

impl ObjectiveName {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "min-input" => Some(Self::MinInput),
            "min-accel" => Some(Self::MinAccel),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::MinInput => "min-input",
            Self::MinAccel => "min-accel",
        }
    }

    pub fn of(kind: &ObjectiveKind) -> Self {
        match kind {
            ObjectiveKind::MinControlInput { .. } => Self::MinInput,
            ObjectiveKind::MinAcceleration { .. } => Self::MinAccel,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub map: WorldMap,
    pub params: VesselParams,
    /// Start pose; the vessel starts at rest.
    pub start: Pose,
    /// Goal pose; the vessel must arrive at rest.
    pub goal: Pose,
    pub objective: ObjectiveKind,
    /// Weights used when switching objective kind.
    pub weights: ObjectiveWeights,
    pub bounds: BoundSet,
    /// Front-end settings. `inflate` is the extra clearance the search keeps on top of
    /// the corridor inflation.
    pub planner: PlannerConfig,
    pub solver: SolverConfig,
    pub nodes: usize,
}

impl Scenario {
    /// The 20 × 20 m arena with two rectangles and one circle, start (2, 15) and goal
    /// (18, 1), both heading east.
    pub fn reference(kind: ObjectiveName) -> Self {
        let weights = ObjectiveWeights::default();
        Self {
            map: WorldMap::reference(),
            params: VesselParams::kingfisher(),
            start: Pose::new(2.0, 15.0, 0.0),
            goal: Pose::new(18.0, 1.0, 0.0),
            objective: weights.objective(kind),
            weights,
            bounds: BoundSet::reference(),
            planner: PlannerConfig {
                inflate: 0.15,
                ..PlannerConfig::default()
            },
            solver: SolverConfig::default(),
            nodes: 21,
        }
    }

    /// Switches the objective kind, taking its weight from [`Scenario::weights`].
    pub fn with_objective(mut self, kind: ObjectiveName) -> Self {
        self.objective = self.weights.objective(kind);
        self
    }

    /// Clearance used for corridors: hull radius plus the map's safety margin.
    pub fn corridor_inflate(&self) -> f64 {
        self.params.hull_radius + self.map.margin
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::InvalidScenario(m));
        self.map
            .validate()
            .map_err(|e| PipelineError::InvalidScenario(e.to_string()))?;
        if let Err(m) = self.params.validate() {
            return bad(m);
        }
        if let Err(m) = self.bounds.validate() {
            return bad(m);
        }
        self.planner
            .validate()
            .map_err(|e| PipelineError::InvalidScenario(e.to_string()))?;
        self.solver
            .validate()
            .map_err(|e| PipelineError::InvalidScenario(e.to_string()))?;
        if self.nodes < 3 {
            return bad(format!(
                "nodes_per_segment must be >= 3, got {}",
                self.nodes
            ));
        }
        let hull = self.params.hull_radius;
        for (name, pose) in [("start", self.start), ("goal", self.goal)] {
            if ![pose.x, pose.y, pose.psi].iter().all(|v| v.is_finite()) {
                return bad(format!("{name} pose must be finite"));
            }
            if !is_free(Point2::new(pose.x, pose.y), &self.map, hull) {
                return bad(format!(
                    "{name} ({}, {}) is not free at hull clearance {hull} m",
                    pose.x, pose.y
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("front-end search failed: {0}")]
    FrontEndFailed(#[from] PlanError),
    #[error("corridor construction failed for segment {index}: {source}")]
    CorridorFailed { index: usize, source: WorldError },
    #[error("segment {index} did not converge (status {status:?}, violation {violation:.3e})")]
    SegmentInfeasible {
        index: usize,
        status: SolveStatus,
        violation: f64,
    },
    #[error("segment {index}: {source}")]
    Transcription {
        index: usize,
        source: TranscriptionError,
    },
    #[error("solver rejected segment {index}: {source}")]
    Solver { index: usize, source: SolverError },
}

#[derive(Debug, Clone)]
pub struct FullTrajectory {
    pub segments: Vec<SegmentTrajectory>,
    /// Intermediate waypoints (start and goal excluded).
    pub waypoints: Vec<Point2>,
    pub corridors: Vec<Corridor>,
    /// Raw front-end path.
    pub path: PlannedPath,
    pub total_duration: f64,
}

impl FullTrajectory {
    pub fn from_segments(segments: Vec<SegmentTrajectory>) -> Self {
        let total_duration = segments.iter().map(|s| s.duration).sum();
        Self {
            segments,
            waypoints: Vec::new(),
            corridors: Vec::new(),
            path: PlannedPath {
                vertices: Vec::new(),
                cost: 0.0,
            },
            total_duration,
        }
    }

    /// Global start time of every segment.
    pub fn segment_offsets(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let t0 = acc;
                acc += s.duration;
                t0
            })
            .collect()
    }

    /// Segment index and local time for a global time `t`.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let mut start = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            if t <= start + seg.duration || i + 1 == self.segments.len() {
                return (i, (t - start).clamp(0.0, seg.duration));
            }
            start += seg.duration;
        }
        (0, 0.0)
    }

    pub fn state_at(&self, t: f64) -> (Pose, BodyVelocity) {
        let (i, s) = self.locate(t);
        unpack_state(&self.segments[i].state_at(s))
    }

    pub fn control_at(&self, t: f64) -> ControlInput {
        let (i, s) = self.locate(t);
        self.segments[i].control_at(s)
    }

    pub fn position_at(&self, t: f64) -> Point2 {
        let (pose, _) = self.state_at(t);
        Point2::new(pose.x, pose.y)
    }

    /// `per_segment` evenly spaced positions on each segment, endpoints included.
    pub fn sample_positions(&self, per_segment: usize) -> Vec<Point2> {
        let n = per_segment.max(2);
        self.segments
            .iter()
            .flat_map(|seg| {
                (0..n).map(move |j| {
                    let x = seg.state_at(seg.duration * j as f64 / (n - 1) as f64);
                    Point2::new(x[0], x[1])
                })
            })
            .collect()
    }

    /// Largest absolute difference in state or control across segment junctions.
    pub fn junction_mismatch(&self) -> f64 {
        self.segments
            .windows(2)
            .map(|w| {
                let a = w[0].states.last().expect("nodes");
                let b = &w[1].states[0];
                let ca = w[0].controls.last().expect("nodes");
                let cb = &w[1].controls[0];
                let ds = a
                    .iter()
                    .zip(b)
                    .map(|(p, q)| (p - q).abs())
                    .fold(0.0, f64::max);
                let dc = ca
                    .iter()
                    .zip(cb)
                    .map(|(p, q)| (p - q).abs())
                    .fold(0.0, f64::max);
                ds.max(dc)
            })
            .fold(0.0, f64::max)
    }
}

/// Straight-line guess clipped into the problem's box (which also enforces the pins).
pub fn initial_guess(segment: &SegmentProblem) -> Vec<f64> {
    let lay = Layout {
        nodes: segment.nodes,
    };
    let k_nodes = segment.nodes;
    let a = Point2::new(segment.start.pose.x, segment.start.pose.y);
    let b = segment.end.position();
    let distance = a.distance(b);
    let b_set = &segment.bounds;
    let u_max = b_set.vel_hi.u;
    let cruise = 0.5 * u_max;
    let t_guess = if cruise > 0.0 {
        distance / cruise
    } else {
        b_set.t_max
    }
    .clamp(1.0, b_set.t_max);
    let u = cruise.min(distance / t_guess);
    let bearing = if distance > 1e-9 {
        (b.y - a.y).atan2(b.x - a.x)
    } else {
        segment.start.pose.psi
    };
    let tau_u = segment.params.surge_damping * u;

    let mut z = vec![0.0; lay.len()];
    z[lay.time()] = t_guess;
    for k in 0..k_nodes {
        let p = a.lerp(b, k as f64 / (k_nodes - 1) as f64);
        let x = [p.x, p.y, wrap_angle(bearing), u, 0.0, 0.0];
        for (i, v) in x.into_iter().enumerate() {
            z[lay.state(k, i)] = v;
        }
        z[lay.control(k, 0)] = tau_u;
        z[lay.control(k, 1)] = 0.0;
    }
    if let Ok(nlp) = build_nlp(segment) {
        use crate::nlp_solver::NlpProblem;
        for ((v, lo), hi) in z.iter_mut().zip(nlp.lower_bounds()).zip(nlp.upper_bounds()) {
            *v = v.clamp(*lo, *hi);
        }
    }
    z
}

/// Waypoints closer than this are merged when possible [m].
const MIN_WAYPOINT_SPACING: f64 = 1.0;

/// Waypoints whose consecutive pairs are joined by a collision-free segment on the
/// front-end map and admit a corridor on the original map.
pub fn corridor_waypoints(path: &PlannedPath, scenario: &Scenario) -> Vec<Point2> {
    let inflate = scenario.corridor_inflate();
    let front = scenario.map.grown(inflate);
    let connect = |a: Point2, b: Point2| {
        segment_free(a, b, &front, scenario.planner.inflate)
            && seed_box_free(a, b, &scenario.map, inflate)
    };
    let dense = densify(&path.vertices, DENSIFY_SPACING);
    let mut waypoints = fewest_hop_vertices(&dense, connect);

    // Replace a close pair by a single point that keeps both neighbouring hops valid.
    let (Some(&start), Some(&goal)) = (path.vertices.first(), path.vertices.last()) else {
        return waypoints;
    };
    let mut i = 0;
    while i + 1 < waypoints.len() {
        let (a, b) = (waypoints[i], waypoints[i + 1]);
        if a.distance(b) < MIN_WAYPOINT_SPACING {
            let before = if i == 0 { start } else { waypoints[i - 1] };
            let after = if i + 2 < waypoints.len() {
                waypoints[i + 2]
            } else {
                goal
            };
            let candidates = [
                Point2::new(a.x, b.y),
                Point2::new(b.x, a.y),
                a.lerp(b, 0.5),
                a,
                b,
            ];
            if let Some(&m) = candidates
                .iter()
                .find(|&&m| connect(before, m) && connect(m, after))
            {
                waypoints[i] = m;
                waypoints.remove(i + 1);
                continue;
            }
        }
        i += 1;
    }
    waypoints
}

fn solve_segment(
    index: usize,
    problem: &SegmentProblem,
    solver: &SolverConfig,
) -> Result<SegmentTrajectory, PipelineError> {
    let nlp =
        build_nlp(problem).map_err(|source| PipelineError::Transcription { index, source })?;
    let z0 = initial_guess(problem);
    let sol =
        minimize(&nlp, &z0, solver).map_err(|source| PipelineError::Solver { index, source })?;
    debug!(
        "segment {index}: K = {}, status {:?}, t = {:.3} s, violation {:.2e}, {} outer iterations",
        problem.nodes,
        sol.status,
        sol.z[0],
        sol.max_constraint_violation,
        sol.history.len()
    );
    if sol.status != SolveStatus::Converged {
        return Err(PipelineError::SegmentInfeasible {
            index,
            status: sol.status,
            violation: sol.max_constraint_violation,
        });
    }
    Ok(decode(problem, &sol.z))
}

/// Plans a full trajectory: search, waypoints, then one collocation problem per segment,
/// each starting from the previous segment's terminal state and control.
pub fn plan_trajectory(scenario: &Scenario) -> Result<FullTrajectory, PipelineError> {
    scenario.validate()?;
    let inflate = scenario.corridor_inflate();
    let front = scenario.map.grown(inflate);
    let start = Point2::new(scenario.start.x, scenario.start.y);
    let goal = Point2::new(scenario.goal.x, scenario.goal.y);

    let path = plan(start, goal, &front, &scenario.planner)?;
    info!(
        "front-end path: {} vertices, length {:.3} m",
        path.vertices.len(),
        path.cost
    );
    let waypoints = corridor_waypoints(&path, scenario);
    info!(
        "{} waypoints -> {} segments",
        waypoints.len(),
        waypoints.len() + 1
    );

    let mut targets: Vec<EndCondition> = waypoints
        .iter()
        .map(|&w| EndCondition::Waypoint(w))
        .collect();
    targets.push(EndCondition::FullState(scenario.goal.normalized()));

    let mut boundary = BoundaryState {
        pose: scenario.start.normalized(),
        vel: BodyVelocity::default(),
        tau: ControlInput::default(),
    };
    let mut segments = Vec::with_capacity(targets.len());
    let mut corridors = Vec::with_capacity(targets.len());
    for (index, end) in targets.into_iter().enumerate() {
        let from = Point2::new(boundary.pose.x, boundary.pose.y);
        let corridor = compute_corridor(from, end.position(), &scenario.map, inflate)
            .map_err(|source| PipelineError::CorridorFailed { index, source })?;
        let mut problem = SegmentProblem {
            start: boundary,
            end,
            corridor,
            bounds: scenario.bounds,
            objective: scenario.objective,
            nodes: scenario.nodes,
            params: scenario.params,
        };
        let seg = match solve_segment(index, &problem, &scenario.solver) {
            Err(PipelineError::SegmentInfeasible { .. }) => {
                problem.nodes = 2 * scenario.nodes;
                warn!(
                    "segment {index} failed to converge, retrying with K = {}",
                    problem.nodes
                );
                solve_segment(index, &problem, &scenario.solver)?
            }
            other => other?,
        };
        info!("segment {index}: duration {:.3} s", seg.duration);
        boundary = seg.terminal();
        corridors.push(corridor);
        segments.push(seg);
    }
    let total_duration = segments.iter().map(|s| s.duration).sum();
    Ok(FullTrajectory {
        segments,
        waypoints,
        corridors,
        path,
        total_duration,
    })
}
