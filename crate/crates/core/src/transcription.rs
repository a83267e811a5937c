//! Trapezoidal direct collocation of one sub-trajectory.
//!
//! The decision vector is `[t] ++ [x_k; k = 0..K] ++ [τ_k; k = 0..K]` with
//! `x_k = (x, y, ψ, u, v, r)`. Consecutive nodes are tied by the trapezoid defect
//!
//! ```text
//! x_{k+1} − x_k − (h/2)(f_k + f_{k+1}) = 0,    h = t / (K − 1)
//! ```
//!
//! Accelerations are not decision variables; they follow from `(ν_k, τ_k)` and are
//! bounded through one-sided inequality rows. Boundary pins are expressed as fixed
//! variables (equal lower and upper bounds).

use crate::dynamics::{
    acceleration, flat_derivative, flat_derivative_jacobian, pack_state, unpack_state,
    BodyAcceleration, BodyVelocity, ControlInput, Pose, VesselParams, CONTROL_DIM, STATE_DIM,
};
use crate::nlp_solver::{EvalError, Jacobian, NlpProblem};
use crate::world::{Corridor, Point2};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Shortest admissible segment duration [s].
pub const MIN_DURATION: f64 = 0.05;
/// Slack accepted when checking pinned boundary values against the box.
const PIN_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ObjectiveKind {
    /// `∫ |τ|² + λ s² ds`
    MinControlInput { lambda: f64 },
    /// `∫ |ν̇|² + λ s² ds`
    MinAcceleration { lambda: f64 },
}

impl ObjectiveKind {
    pub fn lambda(&self) -> f64 {
        match *self {
            ObjectiveKind::MinControlInput { lambda }
            | ObjectiveKind::MinAcceleration { lambda } => lambda,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveKind::MinControlInput { .. } => "min-input",
            ObjectiveKind::MinAcceleration { .. } => "min-accel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    /// Longest allowed sub-trajectory [s].
    pub t_max: f64,
    pub vel_lo: BodyVelocity,
    pub vel_hi: BodyVelocity,
    pub acc_lo: BodyAcceleration,
    pub acc_hi: BodyAcceleration,
    pub tau_lo: ControlInput,
    pub tau_hi: ControlInput,
    pub psi_lo: f64,
    pub psi_hi: f64,
}

impl BoundSet {
    /// Kingfisher limits: surge in [−0.1, 1.7] m/s, sway in [−1, 1] m/s, yaw rate
    /// within ±π/6 rad/s, heading in [−π, π] and 35 s per sub-trajectory.
    pub fn reference() -> Self {
        Self {
            t_max: 35.0,
            vel_lo: BodyVelocity::new(-0.1, -1.0, -PI / 6.0),
            vel_hi: BodyVelocity::new(1.7, 1.0, PI / 6.0),
            acc_lo: BodyAcceleration {
                du: -1.0,
                dv: -1.0,
                dr: -0.5,
            },
            acc_hi: BodyAcceleration {
                du: 1.0,
                dv: 1.0,
                dr: 0.5,
            },
            tau_lo: ControlInput::new(-20.0, -10.0),
            tau_hi: ControlInput::new(40.0, 10.0),
            psi_lo: -PI,
            psi_hi: PI,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.t_max > MIN_DURATION) {
            return Err(format!("t_max must be > {MIN_DURATION}"));
        }
        let pairs = [
            ("u", self.vel_lo.u, self.vel_hi.u),
            ("v", self.vel_lo.v, self.vel_hi.v),
            ("r", self.vel_lo.r, self.vel_hi.r),
            ("acc.du", self.acc_lo.du, self.acc_hi.du),
            ("acc.dv", self.acc_lo.dv, self.acc_hi.dv),
            ("acc.dr", self.acc_lo.dr, self.acc_hi.dr),
            ("tau_u", self.tau_lo.tau_u, self.tau_hi.tau_u),
            ("tau_r", self.tau_lo.tau_r, self.tau_hi.tau_r),
            ("psi", self.psi_lo, self.psi_hi),
        ];
        for (name, lo, hi) in pairs {
            if !(lo <= hi) || lo.is_nan() || hi.is_nan() {
                return Err(format!("bound {name}: lower {lo} exceeds upper {hi}"));
            }
        }
        Ok(())
    }
}

/// Pose, velocity and control pinned at the start of a segment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundaryState {
    pub pose: Pose,
    pub vel: BodyVelocity,
    pub tau: ControlInput,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndCondition {
    /// Only the terminal position is pinned.
    Waypoint(Point2),
    /// Terminal pose pinned, vessel at rest (zero velocity, acceleration and thrust).
    FullState(Pose),
}

impl EndCondition {
    pub fn position(&self) -> Point2 {
        match *self {
            EndCondition::Waypoint(p) => p,
            EndCondition::FullState(pose) => Point2::new(pose.x, pose.y),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentProblem {
    pub start: BoundaryState,
    pub end: EndCondition,
    pub corridor: Corridor,
    pub bounds: BoundSet,
    pub objective: ObjectiveKind,
    /// Number of collocation nodes `K ≥ 3`.
    pub nodes: usize,
    pub params: VesselParams,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranscriptionError {
    #[error("pinned value {name} = {value} lies outside its bounds [{lo}, {hi}]")]
    InfeasibleBox {
        name: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("invalid segment problem: {0}")]
    InvalidProblem(String),
}

/// Index map of the flat decision vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub nodes: usize,
}

impl Layout {
    pub fn len(&self) -> usize {
        1 + (STATE_DIM + CONTROL_DIM) * self.nodes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub const fn time(&self) -> usize {
        0
    }

    pub fn state(&self, k: usize, i: usize) -> usize {
        1 + STATE_DIM * k + i
    }

    pub fn control(&self, k: usize, j: usize) -> usize {
        1 + STATE_DIM * self.nodes + CONTROL_DIM * k + j
    }

    pub fn state_slice<'z>(&self, z: &'z [f64], k: usize) -> &'z [f64] {
        &z[self.state(k, 0)..self.state(k, 0) + STATE_DIM]
    }

    pub fn control_slice<'z>(&self, z: &'z [f64], k: usize) -> &'z [f64] {
        &z[self.control(k, 0)..self.control(k, 0) + CONTROL_DIM]
    }
}

/// The collocation NLP of one segment.
#[derive(Debug, Clone)]
pub struct SegmentNlp {
    pub problem: SegmentProblem,
    pub layout: Layout,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Nodes whose acceleration is bounded by inequality rows.
    ineq_nodes: Vec<usize>,
}

impl SegmentNlp {
    pub fn num_defects(&self) -> usize {
        STATE_DIM * (self.layout.nodes - 1)
    }

    fn trapezoid_weight(&self, k: usize) -> f64 {
        if k == 0 || k == self.layout.nodes - 1 {
            0.5
        } else {
            1.0
        }
    }
}

fn full_turn(b: &BoundSet) -> bool {
    b.psi_hi - b.psi_lo >= 2.0 * PI - 1e-9
}

/// Heading bounds for one segment. A box spanning a full turn only fixes the angle
/// representation, so it is re-centred on the incoming heading; a narrower box is
/// applied as given.
fn heading_window(b: &BoundSet, start_psi: f64) -> (f64, f64) {
    if full_turn(b) {
        (start_psi - PI, start_psi + PI)
    } else {
        (b.psi_lo, b.psi_hi)
    }
}

pub fn build_nlp(problem: &SegmentProblem) -> Result<SegmentNlp, TranscriptionError> {
    let k_nodes = problem.nodes;
    if k_nodes < 3 {
        return Err(TranscriptionError::InvalidProblem(format!(
            "need at least 3 nodes, got {k_nodes}"
        )));
    }
    problem
        .bounds
        .validate()
        .map_err(TranscriptionError::InvalidProblem)?;
    problem
        .params
        .validate()
        .map_err(TranscriptionError::InvalidProblem)?;
    if problem.objective.lambda() < 0.0 || !problem.objective.lambda().is_finite() {
        return Err(TranscriptionError::InvalidProblem(
            "objective weight must be >= 0".into(),
        ));
    }
    let c = &problem.corridor;
    if !(c.x_min <= c.x_max && c.y_min <= c.y_max) {
        return Err(TranscriptionError::InvalidProblem(
            "degenerate corridor".into(),
        ));
    }
    let layout = Layout { nodes: k_nodes };
    let b = &problem.bounds;
    let n = layout.len();
    let mut lo = vec![0.0; n];
    let mut hi = vec![0.0; n];
    lo[layout.time()] = MIN_DURATION;
    hi[layout.time()] = b.t_max;
    let (psi_lo, psi_hi) = heading_window(b, problem.start.pose.psi);
    let state_lo = [c.x_min, c.y_min, psi_lo, b.vel_lo.u, b.vel_lo.v, b.vel_lo.r];
    let state_hi = [c.x_max, c.y_max, psi_hi, b.vel_hi.u, b.vel_hi.v, b.vel_hi.r];
    let tau_lo = [b.tau_lo.tau_u, b.tau_lo.tau_r];
    let tau_hi = [b.tau_hi.tau_u, b.tau_hi.tau_r];
    for k in 0..k_nodes {
        for i in 0..STATE_DIM {
            lo[layout.state(k, i)] = state_lo[i];
            hi[layout.state(k, i)] = state_hi[i];
        }
        for j in 0..CONTROL_DIM {
            lo[layout.control(k, j)] = tau_lo[j];
            hi[layout.control(k, j)] = tau_hi[j];
        }
    }

    const STATE_NAMES: [&str; STATE_DIM] = ["x", "y", "psi", "u", "v", "r"];
    const CONTROL_NAMES: [&str; CONTROL_DIM] = ["tau_u", "tau_r"];
    let mut pin = |idx: usize, value: f64, name: String| -> Result<(), TranscriptionError> {
        if value < lo[idx] - PIN_TOLERANCE || value > hi[idx] + PIN_TOLERANCE || !value.is_finite()
        {
            return Err(TranscriptionError::InfeasibleBox {
                name,
                value,
                lo: lo[idx],
                hi: hi[idx],
            });
        }
        let v = value.clamp(lo[idx], hi[idx]);
        lo[idx] = v;
        hi[idx] = v;
        Ok(())
    };

    let start = pack_state(problem.start.pose, problem.start.vel);
    for (i, &v) in start.iter().enumerate() {
        pin(layout.state(0, i), v, format!("start.{}", STATE_NAMES[i]))?;
    }
    let start_tau = [problem.start.tau.tau_u, problem.start.tau.tau_r];
    for (j, &v) in start_tau.iter().enumerate() {
        pin(
            layout.control(0, j),
            v,
            format!("start.{}", CONTROL_NAMES[j]),
        )?;
    }
    let last = k_nodes - 1;
    match problem.end {
        EndCondition::Waypoint(p) => {
            pin(layout.state(last, 0), p.x, "end.x".into())?;
            pin(layout.state(last, 1), p.y, "end.y".into())?;
        }
        EndCondition::FullState(mut pose) => {
            if full_turn(b) {
                let turns = ((problem.start.pose.psi - pose.psi) / (2.0 * PI)).round();
                pose.psi += 2.0 * PI * turns;
            }
            let end = pack_state(pose, BodyVelocity::default());
            for (i, &v) in end.iter().enumerate() {
                pin(layout.state(last, i), v, format!("end.{}", STATE_NAMES[i]))?;
            }
            for j in 0..CONTROL_DIM {
                pin(
                    layout.control(last, j),
                    0.0,
                    format!("end.{}", CONTROL_NAMES[j]),
                )?;
            }
        }
    }

    let fully_pinned_end = matches!(problem.end, EndCondition::FullState(_));
    let ineq_nodes = (1..k_nodes)
        .filter(|&k| !(k == last && fully_pinned_end))
        .collect();
    Ok(SegmentNlp {
        problem: problem.clone(),
        layout,
        lo,
        hi,
        ineq_nodes,
    })
}

fn check_finite(values: &[f64], what: &'static str) -> Result<(), EvalError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(EvalError::NonFiniteEvaluation(what))
    }
}

impl NlpProblem for SegmentNlp {
    fn num_vars(&self) -> usize {
        self.layout.len()
    }

    fn num_eq(&self) -> usize {
        self.num_defects()
    }

    fn num_ineq(&self) -> usize {
        6 * self.ineq_nodes.len()
    }

    fn lower_bounds(&self) -> &[f64] {
        &self.lo
    }

    fn upper_bounds(&self) -> &[f64] {
        &self.hi
    }

    fn objective(&self, z: &[f64], grad: &mut [f64]) -> Result<f64, EvalError> {
        check_finite(z, "decision vector")?;
        let lay = self.layout;
        let k_nodes = lay.nodes;
        let segments = (k_nodes - 1) as f64;
        let t = z[lay.time()];
        let h = t / segments;
        let lambda = self.problem.objective.lambda();
        let p = &self.problem.params;
        grad.iter_mut().for_each(|g| *g = 0.0);

        let mut weighted_q = 0.0;
        let mut weighted_k2 = 0.0;
        for k in 0..k_nodes {
            let w = self.trapezoid_weight(k);
            let x = lay.state_slice(z, k);
            let tau = lay.control_slice(z, k);
            let q = match self.problem.objective {
                ObjectiveKind::MinControlInput { .. } => {
                    for j in 0..CONTROL_DIM {
                        grad[lay.control(k, j)] = h * w * 2.0 * tau[j];
                    }
                    tau[0] * tau[0] + tau[1] * tau[1]
                }
                ObjectiveKind::MinAcceleration { .. } => {
                    let f = flat_derivative(x, tau, p);
                    let (a, b) = flat_derivative_jacobian(x, p);
                    let acc = &f[3..6];
                    for i in 0..STATE_DIM {
                        let d: f64 = (0..3).map(|m| acc[m] * a[3 + m][i]).sum();
                        grad[lay.state(k, i)] = h * w * 2.0 * d;
                    }
                    for j in 0..CONTROL_DIM {
                        let d: f64 = (0..3).map(|m| acc[m] * b[3 + m][j]).sum();
                        grad[lay.control(k, j)] = h * w * 2.0 * d;
                    }
                    acc.iter().map(|v| v * v).sum()
                }
            };
            weighted_q += w * q;
            weighted_k2 += w * (k * k) as f64;
        }
        let value = h * weighted_q + lambda * h.powi(3) * weighted_k2;
        grad[lay.time()] = (weighted_q + 3.0 * lambda * h * h * weighted_k2) / segments;
        if !value.is_finite() {
            return Err(EvalError::NonFiniteEvaluation("objective"));
        }
        check_finite(grad, "objective gradient")?;
        Ok(value)
    }

    fn constraints(
        &self,
        z: &[f64],
        values: &mut [f64],
        jac: &mut Jacobian,
    ) -> Result<(), EvalError> {
        check_finite(z, "decision vector")?;
        let lay = self.layout;
        let k_nodes = lay.nodes;
        let segments = (k_nodes - 1) as f64;
        let h = z[lay.time()] / segments;
        let p = &self.problem.params;
        let derivs: Vec<[f64; STATE_DIM]> = (0..k_nodes)
            .map(|k| flat_derivative(lay.state_slice(z, k), lay.control_slice(z, k), p))
            .collect();
        let jacs: Vec<_> = (0..k_nodes)
            .map(|k| flat_derivative_jacobian(lay.state_slice(z, k), p))
            .collect();

        for k in 0..k_nodes - 1 {
            let xk = lay.state_slice(z, k);
            let xk1 = lay.state_slice(z, k + 1);
            let (fk, fk1) = (&derivs[k], &derivs[k + 1]);
            for i in 0..STATE_DIM {
                let row = STATE_DIM * k + i;
                values[row] = xk1[i] - xk[i] - 0.5 * h * (fk[i] + fk1[i]);
                jac.push(row, lay.time(), -(fk[i] + fk1[i]) / (2.0 * segments));
                for (node, sign) in [(k, -1.0), (k + 1, 1.0)] {
                    let (a, b) = &jacs[node];
                    for m in 0..STATE_DIM {
                        let identity = if m == i { sign } else { 0.0 };
                        let v = identity - 0.5 * h * a[i][m];
                        if v != 0.0 || m == i || a[i][m] != 0.0 {
                            jac.push(row, lay.state(node, m), v);
                        }
                    }
                    for j in 0..CONTROL_DIM {
                        if b[i][j] != 0.0 {
                            jac.push(row, lay.control(node, j), -0.5 * h * b[i][j]);
                        }
                    }
                }
            }
        }

        let b = &self.problem.bounds;
        let acc_hi = [b.acc_hi.du, b.acc_hi.dv, b.acc_hi.dr];
        let acc_lo = [b.acc_lo.du, b.acc_lo.dv, b.acc_lo.dr];
        let base = self.num_defects();
        for (n, &k) in self.ineq_nodes.iter().enumerate() {
            let (a, bm) = &jacs[k];
            for m in 0..3 {
                let acc = derivs[k][3 + m];
                let upper_row = base + 6 * n + 2 * m;
                let lower_row = upper_row + 1;
                values[upper_row] = acc - acc_hi[m];
                values[lower_row] = acc_lo[m] - acc;
                for i in 0..STATE_DIM {
                    let d = a[3 + m][i];
                    if d != 0.0 || i == 3 + m {
                        jac.push(upper_row, lay.state(k, i), d);
                        jac.push(lower_row, lay.state(k, i), -d);
                    }
                }
                for j in 0..CONTROL_DIM {
                    let d = bm[3 + m][j];
                    if d != 0.0 {
                        jac.push(upper_row, lay.control(k, j), d);
                        jac.push(lower_row, lay.control(k, j), -d);
                    }
                }
            }
        }
        check_finite(values, "constraints")
    }
}

pub fn eval_objective_and_gradient(
    nlp: &SegmentNlp,
    z: &[f64],
) -> Result<(f64, Vec<f64>), EvalError> {
    let mut grad = vec![0.0; nlp.num_vars()];
    let value = nlp.objective(z, &mut grad)?;
    Ok((value, grad))
}

pub fn eval_constraints_and_jacobian(
    nlp: &SegmentNlp,
    z: &[f64],
) -> Result<(Vec<f64>, Jacobian), EvalError> {
    let rows = nlp.num_eq() + nlp.num_ineq();
    let mut values = vec![0.0; rows];
    let mut jac = Jacobian::new(rows, nlp.num_vars());
    nlp.constraints(z, &mut values, &mut jac)?;
    Ok((values, jac))
}

/// Solved sub-trajectory with continuous state and control evaluators.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentTrajectory {
    pub duration: f64,
    pub states: Vec<[f64; STATE_DIM]>,
    pub controls: Vec<[f64; CONTROL_DIM]>,
    derivatives: Vec<[f64; STATE_DIM]>,
    params: VesselParams,
}

impl SegmentTrajectory {
    pub fn nodes(&self) -> usize {
        self.states.len()
    }

    pub fn step(&self) -> f64 {
        self.duration / (self.nodes() - 1) as f64
    }

    pub fn node_time(&self, k: usize) -> f64 {
        k as f64 * self.step()
    }

    /// Interval index and offset into it; `None` when `s` hits a node exactly.
    fn locate(&self, s: f64) -> Result<(usize, f64), usize> {
        let h = self.step();
        let last = self.nodes() - 1;
        let s = s.clamp(0.0, self.duration);
        let pos = s / h;
        let nearest = pos.round();
        if (pos - nearest).abs() < 1e-12 * (last as f64).max(1.0) {
            return Err((nearest as usize).min(last));
        }
        let k = (pos.floor() as usize).min(last - 1);
        Ok((k, s - k as f64 * h))
    }

    /// Quadratic state spline `x_k + s̃ f_k + s̃²/(2h) (f_{k+1} − f_k)`.
    pub fn state_at(&self, s: f64) -> [f64; STATE_DIM] {
        match self.locate(s) {
            Err(k) => self.states[k],
            Ok((k, ds)) => {
                let h = self.step();
                let (f0, f1) = (&self.derivatives[k], &self.derivatives[k + 1]);
                let mut x = self.states[k];
                for i in 0..STATE_DIM {
                    x[i] += ds * f0[i] + ds * ds / (2.0 * h) * (f1[i] - f0[i]);
                }
                x
            }
        }
    }

    /// Piecewise-linear control.
    pub fn control_at(&self, s: f64) -> ControlInput {
        let c = match self.locate(s) {
            Err(k) => self.controls[k],
            Ok((k, ds)) => {
                let w = ds / self.step();
                let (c0, c1) = (&self.controls[k], &self.controls[k + 1]);
                [c0[0] + w * (c1[0] - c0[0]), c0[1] + w * (c1[1] - c0[1])]
            }
        };
        ControlInput::new(c[0], c[1])
    }

    pub fn pose_at(&self, s: f64) -> (Pose, BodyVelocity) {
        unpack_state(&self.state_at(s))
    }

    pub fn acceleration_at(&self, s: f64) -> BodyAcceleration {
        let (_, vel) = self.pose_at(s);
        acceleration(vel, self.control_at(s), &self.params)
    }

    pub fn start_position(&self) -> Point2 {
        Point2::new(self.states[0][0], self.states[0][1])
    }

    pub fn end_position(&self) -> Point2 {
        let x = self.states.last().expect("segment has nodes");
        Point2::new(x[0], x[1])
    }

    /// Largest trapezoid defect `|x_{k+1} − x_k − h/2 (f_k + f_{k+1})|` over all nodes
    /// and state components.
    pub fn max_defect(&self) -> f64 {
        let h = self.step();
        let mut worst: f64 = 0.0;
        for k in 0..self.nodes() - 1 {
            for i in 0..STATE_DIM {
                let d = self.states[k + 1][i]
                    - self.states[k][i]
                    - 0.5 * h * (self.derivatives[k][i] + self.derivatives[k + 1][i]);
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    /// Terminal pose, velocity and control, used as the next segment's start.
    pub fn terminal(&self) -> BoundaryState {
        let (pose, vel) = unpack_state(self.states.last().expect("segment has nodes"));
        let tau = self.controls.last().expect("segment has nodes");
        BoundaryState {
            pose,
            vel,
            tau: ControlInput::new(tau[0], tau[1]),
        }
    }
}

/// Unpacks a decision vector into a [`SegmentTrajectory`].
pub fn decode(problem: &SegmentProblem, z: &[f64]) -> SegmentTrajectory {
    let lay = Layout {
        nodes: problem.nodes,
    };
    let states: Vec<[f64; STATE_DIM]> = (0..lay.nodes)
        .map(|k| lay.state_slice(z, k).try_into().expect("state width"))
        .collect();
    let controls: Vec<[f64; CONTROL_DIM]> = (0..lay.nodes)
        .map(|k| lay.control_slice(z, k).try_into().expect("control width"))
        .collect();
    let derivatives = states
        .iter()
        .zip(&controls)
        .map(|(x, c)| flat_derivative(x, c, &problem.params))
        .collect();
    SegmentTrajectory {
        duration: z[lay.time()],
        states,
        controls,
        derivatives,
        params: problem.params,
    }
}
