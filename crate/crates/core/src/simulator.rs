//! Open-loop RK4 integration of the vessel model under a planned control schedule,
//! and the trajectory quality metrics.

use crate::dynamics::{
    acceleration, allocate_thrusters, flat_derivative, pack_state, unpack_state, wrap_angle,
    BodyAcceleration, BodyVelocity, ControlInput, Pose, ThrusterForces, VesselParams, STATE_DIM,
};
use crate::pipeline::FullTrajectory;
use crate::world::{min_trajectory_clearance, Point2, WorldMap};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Integration step [s].
    pub dt: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { dt: 0.01 }
    }
}

/// A planned motion the simulator can follow open loop.
pub trait Reference {
    fn duration(&self) -> f64;
    fn initial_state(&self) -> (Pose, BodyVelocity);
    /// Commanded control at time `t` (first-order hold between nodes).
    fn control_at(&self, t: f64) -> ControlInput;
    fn position_at(&self, t: f64) -> Point2;
    fn segment_at(&self, t: f64) -> usize;
}

impl Reference for FullTrajectory {
    fn duration(&self) -> f64 {
        self.total_duration
    }

    fn initial_state(&self) -> (Pose, BodyVelocity) {
        self.state_at(0.0)
    }

    fn control_at(&self, t: f64) -> ControlInput {
        FullTrajectory::control_at(self, t)
    }

    fn position_at(&self, t: f64) -> Point2 {
        FullTrajectory::position_at(self, t)
    }

    fn segment_at(&self, t: f64) -> usize {
        self.locate(t).0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSample {
    pub t: f64,
    pub pose: Pose,
    pub vel: BodyVelocity,
    pub acc: BodyAcceleration,
    pub tau: ControlInput,
    pub forces: ThrusterForces,
    pub segment: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Mean planar speed [m/s].
    pub avg_speed: f64,
    /// Smallest distance from the vessel centre to any obstacle [m].
    pub min_obstacle_distance: f64,
    /// Mean magnitude of the control rate `|dτ/dt|` [N/s].
    pub avg_control_input: f64,
    pub total_time: f64,
    /// Root-mean-square position error against the planned motion [m].
    pub tracking_rmse: f64,
    /// Distance between the final simulated and planned positions [m].
    pub terminal_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub samples: Vec<SimSample>,
    pub metrics: Metrics,
}

/// One classical RK4 step of the body/earth-frame model with control `tau(t)`.
pub fn rk4_step(
    x: &[f64; STATE_DIM],
    t: f64,
    dt: f64,
    tau: impl Fn(f64) -> ControlInput,
    params: &VesselParams,
) -> [f64; STATE_DIM] {
    let f = |x: &[f64; STATE_DIM], t: f64| {
        let c = tau(t);
        flat_derivative(x, &[c.tau_u, c.tau_r], params)
    };
    let axpy = |x: &[f64; STATE_DIM], k: &[f64; STATE_DIM], a: f64| -> [f64; STATE_DIM] {
        std::array::from_fn(|i| x[i] + a * k[i])
    };
    let k1 = f(x, t);
    let k2 = f(&axpy(x, &k1, 0.5 * dt), t + 0.5 * dt);
    let k3 = f(&axpy(x, &k2, 0.5 * dt), t + 0.5 * dt);
    let k4 = f(&axpy(x, &k3, dt), t + dt);
    std::array::from_fn(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Integrates from `x0` over `[0, duration]` with step `dt` (the last step is shortened
/// to land on `duration`). Returns `(t, x)` pairs including both endpoints; the heading
/// is wrapped after every step.
pub fn integrate(
    x0: [f64; STATE_DIM],
    duration: f64,
    dt: f64,
    tau: impl Fn(f64) -> ControlInput,
    params: &VesselParams,
) -> Vec<(f64, [f64; STATE_DIM])> {
    let steps = (duration / dt - 1e-9).ceil().max(0.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = x0;
    x[2] = wrap_angle(x[2]);
    out.push((0.0, x));
    for i in 0..steps {
        let t = i as f64 * dt;
        let h = dt.min(duration - t);
        x = rk4_step(&x, t, h, &tau, params);
        x[2] = wrap_angle(x[2]);
        out.push((if i + 1 == steps { duration } else { t + h }, x));
    }
    out
}

/// Integrates the vessel under the reference's control and scores the result.
pub fn simulate(
    reference: &impl Reference,
    params: &VesselParams,
    map: &WorldMap,
    config: &SimConfig,
) -> SimResult {
    let (pose, vel) = reference.initial_state();
    let duration = reference.duration();
    let states = integrate(
        pack_state(pose, vel),
        duration,
        config.dt,
        |t| reference.control_at(t),
        params,
    );
    let samples: Vec<SimSample> = states
        .iter()
        .map(|&(t, x)| {
            let (pose, vel) = unpack_state(&x);
            let tau = reference.control_at(t);
            SimSample {
                t,
                pose,
                vel,
                acc: acceleration(vel, tau, params),
                tau,
                forces: allocate_thrusters(tau, params),
                segment: reference.segment_at(t),
            }
        })
        .collect();

    let mut metrics = compute_metrics(&samples, map);
    let errors: Vec<f64> = samples
        .iter()
        .map(|s| Point2::new(s.pose.x, s.pose.y).distance(reference.position_at(s.t)))
        .collect();
    metrics.tracking_rmse =
        (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt();
    metrics.terminal_error = errors.last().copied().unwrap_or(0.0);
    SimResult { samples, metrics }
}

/// Speed, clearance, control-rate and duration metrics of a sampled trajectory. The
/// tracking fields are left at zero.
pub fn compute_metrics(samples: &[SimSample], map: &WorldMap) -> Metrics {
    if samples.is_empty() {
        return Metrics::default();
    }
    let n = samples.len() as f64;
    let avg_speed = samples.iter().map(|s| s.vel.u.hypot(s.vel.v)).sum::<f64>() / n;
    let positions: Vec<Point2> = samples
        .iter()
        .map(|s| Point2::new(s.pose.x, s.pose.y))
        .collect();
    let rates: Vec<f64> = samples
        .windows(2)
        .filter(|w| w[1].t > w[0].t)
        .map(|w| {
            let d_u = w[1].tau.tau_u - w[0].tau.tau_u;
            let d_r = w[1].tau.tau_r - w[0].tau.tau_r;
            d_u.hypot(d_r) / (w[1].t - w[0].t)
        })
        .collect();
    let avg_control_input = if rates.is_empty() {
        0.0
    } else {
        rates.iter().sum::<f64>() / rates.len() as f64
    };
    Metrics {
        avg_speed,
        min_obstacle_distance: min_trajectory_clearance(&positions, map),
        avg_control_input,
        total_time: samples.last().map_or(0.0, |s| s.t) - samples[0].t,
        tracking_rmse: 0.0,
        terminal_error: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surge_closed_form(tau_u: f64, t: f64, p: &VesselParams) -> f64 {
        tau_u / p.surge_damping * (1.0 - (-p.surge_damping * t / p.mass).exp())
    }

    #[test]
    fn constant_surge_matches_closed_form() {
        let p = VesselParams::kingfisher();
        let traj = integrate([0.0; 6], 5.0, 0.01, |_| ControlInput::new(20.0, 0.0), &p);
        let (t, x) = traj.last().unwrap();
        assert_eq!(*t, 5.0);
        assert!((x[3] - surge_closed_form(20.0, 5.0, &p)).abs() <= 1e-6);
        assert_eq!(x[4], 0.0);
        assert_eq!(x[5], 0.0);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let p = VesselParams::kingfisher();
        let exact = surge_closed_form(20.0, 5.0, &p);
        let err = |dt: f64| {
            let x = integrate([0.0; 6], 5.0, dt, |_| ControlInput::new(20.0, 0.0), &p)
                .last()
                .unwrap()
                .1;
            (x[3] - exact).abs()
        };
        let ratio = err(0.4) / err(0.2);
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rest_stays_at_rest() {
        let p = VesselParams::kingfisher();
        let x0 = [3.0, -2.0, 0.4, 0.0, 0.0, 0.0];
        let traj = integrate(x0, 10.0, 0.01, |_| ControlInput::default(), &p);
        assert!(traj.iter().all(|(_, x)| *x == x0));
    }

    #[test]
    fn metrics_of_uniform_motion() {
        let map = WorldMap::new((-100.0, 100.0), (-100.0, 100.0), Vec::new());
        let samples: Vec<SimSample> = (0..=100)
            .map(|i| {
                let t = i as f64 * 0.1;
                SimSample {
                    t,
                    pose: Pose::new(t, 0.0, 0.0),
                    vel: BodyVelocity::new(1.0, 0.0, 0.0),
                    acc: BodyAcceleration::default(),
                    tau: ControlInput::new(20.0, 0.0),
                    forces: ThrusterForces::default(),
                    segment: 0,
                }
            })
            .collect();
        let m = compute_metrics(&samples, &map);
        assert!((m.avg_speed - 1.0).abs() < 1e-12);
        assert!((m.total_time - 10.0).abs() < 1e-12);
        assert_eq!(m.avg_control_input, 0.0);
        let still: Vec<SimSample> = samples
            .iter()
            .map(|s| SimSample {
                vel: BodyVelocity::default(),
                ..*s
            })
            .collect();
        assert_eq!(compute_metrics(&still, &map).avg_speed, 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn unforced_energy_is_non_increasing(
            u in -2.0f64..2.0, v in -1.0f64..1.0, r in -1.0f64..1.0, psi in -3.0f64..3.0,
        ) {
            let p = VesselParams::kingfisher();
            let energy = |x: &[f64; 6]| 0.5 * (p.mass * x[3] * x[3] + p.mass * x[4] * x[4] + p.yaw_inertia * x[5] * x[5]);
            let traj = integrate([0.0, 0.0, psi, u, v, r], 3.0, 0.01, |_| ControlInput::default(), &p);
            for w in traj.windows(2) {
                prop_assert!(energy(&w[1].1) <= energy(&w[0].1) + 1e-12);
            }
        }
    }
}
