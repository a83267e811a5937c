//! TOML scenario files.
//!
//! Every section except `map`, `start` and `goal` is optional and falls back to the
//! reference values. Errors carry the 1-based line of the offending key when it can be
//! located in the source.

use crate::dynamics::{BodyVelocity, ControlInput, Pose, VesselParams};
use crate::nlp_solver::SolverConfig;
use crate::pipeline::{ObjectiveName, ObjectiveWeights, Scenario};
use crate::transcription::BoundSet;
use crate::world::{is_free, Obstacle, Point2, WorldMap};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub struct ScenarioError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nodes_per_segment: Option<usize>,
    map: MapSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vessel: Option<VesselSection>,
    start: Pose,
    goal: Pose,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bounds: Option<BoundsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objective: Option<ObjectiveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    planner: Option<PlannerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    solver: Option<SolverSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapSection {
    x_bounds: [f64; 2],
    y_bounds: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    margin: Option<f64>,
    #[serde(default)]
    obstacles: Vec<Obstacle>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct VesselSection {
    m: Option<f64>,
    Iz: Option<f64>,
    Xu: Option<f64>,
    Yv: Option<f64>,
    Nr: Option<f64>,
    b: Option<f64>,
    hull_radius: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsSection {
    t_max: Option<f64>,
    u: Option<[f64; 2]>,
    v: Option<[f64; 2]>,
    r: Option<[f64; 2]>,
    psi: Option<[f64; 2]>,
    acc: Option<AccSection>,
    tau: Option<TauSection>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AccSection {
    du: Option<[f64; 2]>,
    dv: Option<[f64; 2]>,
    dr: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TauSection {
    tau_u: Option<[f64; 2]>,
    tau_r: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectiveSection {
    kind: Option<String>,
    /// Weight of the selected kind.
    lambda: Option<f64>,
    lambda_min_input: Option<f64>,
    lambda_min_accel: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlannerSection {
    seed: Option<u64>,
    max_iterations: Option<usize>,
    step_size: Option<f64>,
    goal_bias: Option<f64>,
    gamma: Option<f64>,
    goal_tolerance: Option<f64>,
    /// Extra clearance kept by the search beyond hull radius plus map margin.
    inflate: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    constraint_tolerance: Option<f64>,
    optimality_tolerance: Option<f64>,
    max_outer_iterations: Option<usize>,
    max_inner_iterations: Option<usize>,
    initial_penalty: Option<f64>,
    penalty_growth: Option<f64>,
    max_penalty: Option<f64>,
    memory: Option<usize>,
}

/// 1-based line of `key` inside `[section]` (or `[[section]]` number `index`); an
/// empty section means the top level.
fn key_line(text: &str, section: &str, index: usize, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut seen = 0usize;
    let mut header_line = None;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            let name = line
                .trim_matches(|c| c == '[' || c == ']')
                .trim()
                .to_string();
            let is_array = line.starts_with("[[");
            if name == section {
                if is_array {
                    if seen == index {
                        header_line = Some(n + 1);
                    }
                    seen += 1;
                } else {
                    header_line = Some(n + 1);
                }
            }
            current = if is_array {
                format!("{name}#{}", seen.saturating_sub(1))
            } else {
                name
            };
            continue;
        }
        let in_section = if section.is_empty() {
            current.is_empty()
        } else {
            current == section || current == format!("{section}#{index}")
        };
        if in_section && !key.is_empty() {
            if let Some(rest) = line.strip_prefix(key) {
                let rest = rest.trim_start();
                if rest.starts_with('=') || rest.starts_with('.') {
                    return Some(n + 1);
                }
            }
        }
    }
    header_line
}

struct Ctx<'t> {
    text: &'t str,
}

impl Ctx<'_> {
    fn err(&self, section: &str, key: &str, message: impl Into<String>) -> ScenarioError {
        self.err_at(section, 0, key, message)
    }

    fn err_at(
        &self,
        section: &str,
        index: usize,
        key: &str,
        message: impl Into<String>,
    ) -> ScenarioError {
        ScenarioError {
            line: key_line(self.text, section, index, key),
            message: message.into(),
        }
    }
}

fn pair_bounds(
    ctx: &Ctx,
    section: &str,
    key: &str,
    v: [f64; 2],
) -> Result<(f64, f64), ScenarioError> {
    if !(v[0].is_finite() && v[1].is_finite()) {
        return Err(ctx.err(section, key, format!("{section}.{key} must be finite")));
    }
    if v[0] > v[1] {
        return Err(ctx.err(
            section,
            key,
            format!(
                "{section}.{key}: lower bound {} exceeds upper bound {}",
                v[0], v[1]
            ),
        ));
    }
    Ok((v[0], v[1]))
}

fn positive(ctx: &Ctx, section: &str, key: &str, v: f64) -> Result<f64, ScenarioError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(ctx.err(
            section,
            key,
            format!("{section}.{key} must be a positive number, got {v}"),
        ));
    }
    Ok(v)
}

fn non_negative(ctx: &Ctx, section: &str, key: &str, v: f64) -> Result<f64, ScenarioError> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(ctx.err(
            section,
            key,
            format!("{section}.{key} must be >= 0, got {v}"),
        ));
    }
    Ok(v)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError {
        line: e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1),
        message: e.message().trim().to_string(),
    })?;
    let ctx = Ctx { text };
    let reference = Scenario::reference(ObjectiveName::MinInput);

    let m = &file.map;
    let x_bounds = pair_bounds(&ctx, "map", "x_bounds", m.x_bounds)?;
    let y_bounds = pair_bounds(&ctx, "map", "y_bounds", m.y_bounds)?;
    if x_bounds.0 == x_bounds.1 || y_bounds.0 == y_bounds.1 {
        return Err(ctx.err("map", "x_bounds", "map must have a positive area"));
    }
    for (i, o) in m.obstacles.iter().enumerate() {
        o.validate()
            .map_err(|e| ctx.err_at("map.obstacles", i, "", format!("obstacle {i}: {e}")))?;
    }
    let margin = non_negative(
        &ctx,
        "map",
        "margin",
        m.margin.unwrap_or(reference.map.margin),
    )?;
    let map = WorldMap {
        x_bounds,
        y_bounds,
        obstacles: m.obstacles.clone(),
        margin,
    };

    let vs = file.vessel.clone().unwrap_or_default();
    let k = reference.params;
    let params = VesselParams {
        mass: positive(&ctx, "vessel", "m", vs.m.unwrap_or(k.mass))?,
        yaw_inertia: positive(&ctx, "vessel", "Iz", vs.Iz.unwrap_or(k.yaw_inertia))?,
        surge_damping: positive(&ctx, "vessel", "Xu", vs.Xu.unwrap_or(k.surge_damping))?,
        sway_damping: positive(&ctx, "vessel", "Yv", vs.Yv.unwrap_or(k.sway_damping))?,
        yaw_damping: positive(&ctx, "vessel", "Nr", vs.Nr.unwrap_or(k.yaw_damping))?,
        half_width: positive(&ctx, "vessel", "b", vs.b.unwrap_or(k.half_width))?,
        hull_radius: non_negative(
            &ctx,
            "vessel",
            "hull_radius",
            vs.hull_radius.unwrap_or(k.hull_radius),
        )?,
    };

    for (name, pose) in [("start", file.start), ("goal", file.goal)] {
        for (key, v) in [("x", pose.x), ("y", pose.y), ("psi", pose.psi)] {
            if !v.is_finite() {
                return Err(ctx.err(name, key, format!("{name}.{key} must be finite")));
            }
        }
        if !is_free(Point2::new(pose.x, pose.y), &map, params.hull_radius) {
            return Err(ctx.err(
                name,
                "x",
                format!(
                    "{name} ({}, {}) must be free at hull clearance {} m (inside an obstacle or too close to the map edge)",
                    pose.x, pose.y, params.hull_radius
                ),
            ));
        }
    }

    let bs = file.bounds.clone().unwrap_or_default();
    let rb = reference.bounds;
    let acc = bs.acc.clone().unwrap_or_default();
    let tau = bs.tau.clone().unwrap_or_default();
    let u = pair_bounds(
        &ctx,
        "bounds",
        "u",
        bs.u.unwrap_or([rb.vel_lo.u, rb.vel_hi.u]),
    )?;
    let v = pair_bounds(
        &ctx,
        "bounds",
        "v",
        bs.v.unwrap_or([rb.vel_lo.v, rb.vel_hi.v]),
    )?;
    let r = pair_bounds(
        &ctx,
        "bounds",
        "r",
        bs.r.unwrap_or([rb.vel_lo.r, rb.vel_hi.r]),
    )?;
    let psi = pair_bounds(
        &ctx,
        "bounds",
        "psi",
        bs.psi.unwrap_or([rb.psi_lo, rb.psi_hi]),
    )?;
    let du = pair_bounds(
        &ctx,
        "bounds",
        "acc",
        acc.du.unwrap_or([rb.acc_lo.du, rb.acc_hi.du]),
    )?;
    let dv = pair_bounds(
        &ctx,
        "bounds",
        "acc",
        acc.dv.unwrap_or([rb.acc_lo.dv, rb.acc_hi.dv]),
    )?;
    let dr = pair_bounds(
        &ctx,
        "bounds",
        "acc",
        acc.dr.unwrap_or([rb.acc_lo.dr, rb.acc_hi.dr]),
    )?;
    let tu = pair_bounds(
        &ctx,
        "bounds",
        "tau",
        tau.tau_u.unwrap_or([rb.tau_lo.tau_u, rb.tau_hi.tau_u]),
    )?;
    let tr = pair_bounds(
        &ctx,
        "bounds",
        "tau",
        tau.tau_r.unwrap_or([rb.tau_lo.tau_r, rb.tau_hi.tau_r]),
    )?;
    let bounds = BoundSet {
        t_max: positive(&ctx, "bounds", "t_max", bs.t_max.unwrap_or(rb.t_max))?,
        vel_lo: BodyVelocity::new(u.0, v.0, r.0),
        vel_hi: BodyVelocity::new(u.1, v.1, r.1),
        acc_lo: crate::dynamics::BodyAcceleration {
            du: du.0,
            dv: dv.0,
            dr: dr.0,
        },
        acc_hi: crate::dynamics::BodyAcceleration {
            du: du.1,
            dv: dv.1,
            dr: dr.1,
        },
        tau_lo: ControlInput::new(tu.0, tr.0),
        tau_hi: ControlInput::new(tu.1, tr.1),
        psi_lo: psi.0,
        psi_hi: psi.1,
    };
    bounds
        .validate()
        .map_err(|e| ctx.err("bounds", "t_max", e))?;

    let os = file.objective.clone().unwrap_or_default();
    let kind = match os.kind.as_deref() {
        None => ObjectiveName::MinInput,
        Some(s) => ObjectiveName::parse(s).ok_or_else(|| {
            ctx.err(
                "objective",
                "kind",
                format!("objective.kind must be \"min-input\" or \"min-accel\", got \"{s}\""),
            )
        })?,
    };
    let defaults = ObjectiveWeights::default();
    let mut weights = ObjectiveWeights {
        min_input: os.lambda_min_input.unwrap_or(defaults.min_input),
        min_accel: os.lambda_min_accel.unwrap_or(defaults.min_accel),
    };
    if let Some(l) = os.lambda {
        match kind {
            ObjectiveName::MinInput => weights.min_input = l,
            ObjectiveName::MinAccel => weights.min_accel = l,
        }
    }
    non_negative(&ctx, "objective", "lambda", weights.min_input)?;
    non_negative(&ctx, "objective", "lambda", weights.min_accel)?;

    let ps = file.planner.clone().unwrap_or_default();
    let rp = &reference.planner;
    let planner = crate::rrt_star::PlannerConfig {
        max_iterations: ps.max_iterations.unwrap_or(rp.max_iterations),
        step_size: ps.step_size.unwrap_or(rp.step_size),
        goal_bias: ps.goal_bias.unwrap_or(rp.goal_bias),
        gamma: ps.gamma.unwrap_or(rp.gamma),
        goal_tolerance: ps.goal_tolerance.unwrap_or(rp.goal_tolerance),
        rng_seed: ps.seed.unwrap_or(rp.rng_seed),
        inflate: ps.inflate.unwrap_or(rp.inflate),
    };
    if planner.max_iterations < 1 {
        return Err(ctx.err(
            "planner",
            "max_iterations",
            "planner.max_iterations must be >= 1",
        ));
    }
    positive(&ctx, "planner", "step_size", planner.step_size)?;
    if !(0.0..=1.0).contains(&planner.goal_bias) {
        return Err(ctx.err(
            "planner",
            "goal_bias",
            "planner.goal_bias must lie in [0, 1]",
        ));
    }
    non_negative(&ctx, "planner", "gamma", planner.gamma)?;
    positive(&ctx, "planner", "goal_tolerance", planner.goal_tolerance)?;
    non_negative(&ctx, "planner", "inflate", planner.inflate)?;

    let ss = file.solver.clone().unwrap_or_default();
    let rs = SolverConfig::default();
    let solver = SolverConfig {
        constraint_tolerance: ss.constraint_tolerance.unwrap_or(rs.constraint_tolerance),
        optimality_tolerance: ss.optimality_tolerance.unwrap_or(rs.optimality_tolerance),
        max_outer_iterations: ss.max_outer_iterations.unwrap_or(rs.max_outer_iterations),
        max_inner_iterations: ss.max_inner_iterations.unwrap_or(rs.max_inner_iterations),
        initial_penalty: ss.initial_penalty.unwrap_or(rs.initial_penalty),
        penalty_growth: ss.penalty_growth.unwrap_or(rs.penalty_growth),
        max_penalty: ss.max_penalty.unwrap_or(rs.max_penalty),
        memory: ss.memory.unwrap_or(rs.memory),
        scale_variables: rs.scale_variables,
    };
    solver
        .validate()
        .map_err(|e| ctx.err("solver", "", e.to_string()))?;

    let nodes = file.nodes_per_segment.unwrap_or(reference.nodes);
    if nodes < 3 {
        return Err(ctx.err(
            "",
            "nodes_per_segment",
            format!("nodes_per_segment must be >= 3, got {nodes}"),
        ));
    }

    Ok(Scenario {
        map,
        params,
        start: file.start,
        goal: file.goal,
        objective: weights.objective(kind),
        weights,
        bounds,
        planner,
        solver,
        nodes,
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError {
        line: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_scenario(&text)
}

/// Serializes every field explicitly, so re-parsing yields the same scenario.
pub fn scenario_to_toml(s: &Scenario) -> String {
    let b = &s.bounds;
    let p = &s.params;
    let file = ScenarioFile {
        nodes_per_segment: Some(s.nodes),
        map: MapSection {
            x_bounds: [s.map.x_bounds.0, s.map.x_bounds.1],
            y_bounds: [s.map.y_bounds.0, s.map.y_bounds.1],
            margin: Some(s.map.margin),
            obstacles: s.map.obstacles.clone(),
        },
        vessel: Some(VesselSection {
            m: Some(p.mass),
            Iz: Some(p.yaw_inertia),
            Xu: Some(p.surge_damping),
            Yv: Some(p.sway_damping),
            Nr: Some(p.yaw_damping),
            b: Some(p.half_width),
            hull_radius: Some(p.hull_radius),
        }),
        start: s.start,
        goal: s.goal,
        bounds: Some(BoundsSection {
            t_max: Some(b.t_max),
            u: Some([b.vel_lo.u, b.vel_hi.u]),
            v: Some([b.vel_lo.v, b.vel_hi.v]),
            r: Some([b.vel_lo.r, b.vel_hi.r]),
            psi: Some([b.psi_lo, b.psi_hi]),
            acc: Some(AccSection {
                du: Some([b.acc_lo.du, b.acc_hi.du]),
                dv: Some([b.acc_lo.dv, b.acc_hi.dv]),
                dr: Some([b.acc_lo.dr, b.acc_hi.dr]),
            }),
            tau: Some(TauSection {
                tau_u: Some([b.tau_lo.tau_u, b.tau_hi.tau_u]),
                tau_r: Some([b.tau_lo.tau_r, b.tau_hi.tau_r]),
            }),
        }),
        objective: Some(ObjectiveSection {
            kind: Some(ObjectiveName::of(&s.objective).as_str().to_string()),
            lambda: Some(s.objective.lambda()),
            lambda_min_input: Some(s.weights.min_input),
            lambda_min_accel: Some(s.weights.min_accel),
        }),
        planner: Some(PlannerSection {
            seed: Some(s.planner.rng_seed),
            max_iterations: Some(s.planner.max_iterations),
            step_size: Some(s.planner.step_size),
            goal_bias: Some(s.planner.goal_bias),
            gamma: Some(s.planner.gamma),
            goal_tolerance: Some(s.planner.goal_tolerance),
            inflate: Some(s.planner.inflate),
        }),
        solver: Some(SolverSection {
            constraint_tolerance: Some(s.solver.constraint_tolerance),
            optimality_tolerance: Some(s.solver.optimality_tolerance),
            max_outer_iterations: Some(s.solver.max_outer_iterations),
            max_inner_iterations: Some(s.solver.max_inner_iterations),
            initial_penalty: Some(s.solver.initial_penalty),
            penalty_growth: Some(s.solver.penalty_growth),
            max_penalty: Some(s.solver.max_penalty),
            memory: Some(s.solver.memory),
        }),
    };
    toml::to_string(&file).expect("scenario serializes to TOML")
}

pub fn save_scenario(s: &Scenario, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, scenario_to_toml(s))
}
