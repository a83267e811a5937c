//! Three degree-of-freedom model of a two-thruster, under-actuated surface vessel.
//!
//! The body frame follows the hull centroid; the earth frame is a fixed east/north
//! plane. The model is
//!
//! ```text
//! η̇ = R(ψ) ν
//! M ν̇ = τ − C(ν) ν − D ν
//! ```
//!
//! with `M = diag(m, m, Iz)`, linear damping `D = diag(Xu, Yv, Nr)` and the
//! Coriolis/centripetal matrix
//!
//! ```text
//!        ⎡ 0     0    m v ⎤
//! C(ν) = ⎢ 0     0   −m u ⎥
//!        ⎣ m v  −m u   0  ⎦
//! ```
//!
//! Note the sign of the `v·r` coupling in the surge row: `u̇ = τu/m − v r − (Xu/m) u`.
//! It is the opposite of the usual marine convention and is kept as-is together with
//! the matching jerk expressions.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Number of entries in the collocation state `(x, y, ψ, u, v, r)`.
pub const STATE_DIM: usize = 6;
/// Number of independent controls `(τu, τr)`.
pub const CONTROL_DIM: usize = 2;

/// Physical constants of the vessel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VesselParams {
    /// Mass [kg].
    #[serde(rename = "m")]
    pub mass: f64,
    /// Yaw moment of inertia [kg·m²].
    #[serde(rename = "Iz")]
    pub yaw_inertia: f64,
    /// Linear surge damping [kg/s].
    #[serde(rename = "Xu")]
    pub surge_damping: f64,
    /// Linear sway damping [kg/s].
    #[serde(rename = "Yv")]
    pub sway_damping: f64,
    /// Linear yaw damping [kg·m²/s].
    #[serde(rename = "Nr")]
    pub yaw_damping: f64,
    /// Half the distance between the two thrusters [m].
    #[serde(rename = "b")]
    pub half_width: f64,
    /// Radius of the circle bounding the hull, used for clearance [m].
    pub hull_radius: f64,
}

impl VesselParams {
    /// Kingfisher-class boat: `M = diag(29, 29, 2.8)`, `D = diag(20, 20, 20)`.
    pub fn kingfisher() -> Self {
        Self {
            mass: 29.0,
            yaw_inertia: 2.8,
            surge_damping: 20.0,
            sway_damping: 20.0,
            yaw_damping: 20.0,
            half_width: 0.5,
            hull_radius: 0.7,
        }
    }

    /// Checks the physical invariants, naming the first violated field.
    pub fn validate(&self) -> Result<(), String> {
        let checks = [
            ("m", self.mass > 0.0, "must be > 0"),
            ("Iz", self.yaw_inertia > 0.0, "must be > 0"),
            ("Xu", self.surge_damping >= 0.0, "must be >= 0"),
            ("Yv", self.sway_damping >= 0.0, "must be >= 0"),
            ("Nr", self.yaw_damping >= 0.0, "must be >= 0"),
            ("b", self.half_width > 0.0, "must be > 0"),
            ("hull_radius", self.hull_radius > 0.0, "must be > 0"),
        ];
        for (name, ok, msg) in checks {
            if !ok {
                return Err(format!("{name} {msg}"));
            }
        }
        let all = [
            self.mass,
            self.yaw_inertia,
            self.surge_damping,
            self.sway_damping,
            self.yaw_damping,
            self.half_width,
            self.hull_radius,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err("vessel parameters must be finite".into());
        }
        Ok(())
    }
}

impl Default for VesselParams {
    fn default() -> Self {
        Self::kingfisher()
    }
}

/// Earth-frame pose.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Heading, anticlockwise from the earth x axis [rad].
    pub psi: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, psi: f64) -> Self {
        Self { x, y, psi }
    }

    /// Same pose with the heading wrapped into `(−π, π]`.
    pub fn normalized(self) -> Self {
        Self {
            psi: wrap_angle(self.psi),
            ..self
        }
    }
}

/// Body-frame velocity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BodyVelocity {
    /// Surge [m/s].
    pub u: f64,
    /// Sway [m/s].
    pub v: f64,
    /// Yaw rate [rad/s].
    pub r: f64,
}

impl BodyVelocity {
    pub fn new(u: f64, v: f64, r: f64) -> Self {
        Self { u, v, r }
    }
}

/// Body-frame acceleration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BodyAcceleration {
    pub du: f64,
    pub dv: f64,
    pub dr: f64,
}

/// Time derivative of [`BodyAcceleration`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BodyJerk {
    pub ddu: f64,
    pub ddv: f64,
    pub ddr: f64,
}

/// Earth-frame pose rate `(ẋ, ẏ, ψ̇)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PoseRate {
    pub dx: f64,
    pub dy: f64,
    pub dpsi: f64,
}

/// Generalized thrust: surge force and yaw moment. Sway force is identically zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ControlInput {
    /// Surge force [N].
    pub tau_u: f64,
    /// Yaw moment [N·m].
    pub tau_r: f64,
}

impl ControlInput {
    pub fn new(tau_u: f64, tau_r: f64) -> Self {
        Self { tau_u, tau_r }
    }

    pub fn norm_squared(&self) -> f64 {
        self.tau_u * self.tau_u + self.tau_r * self.tau_r
    }
}

/// Rate of change of the control `(τ̇u, τ̇r)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ControlRate {
    pub dtau_u: f64,
    pub dtau_r: f64,
}

/// Individual thruster forces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ThrusterForces {
    /// Port thruster `F1` [N].
    pub port: f64,
    /// Starboard thruster `F2` [N].
    pub starboard: f64,
}

/// Full vessel state: pose, velocity and the acceleration induced by the control
/// acting at the same instant.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VesselState {
    pub pose: Pose,
    pub vel: BodyVelocity,
    pub acc: BodyAcceleration,
}

impl VesselState {
    pub fn new(pose: Pose, vel: BodyVelocity, tau: ControlInput, params: &VesselParams) -> Self {
        Self {
            pose,
            vel,
            acc: acceleration(vel, tau, params),
        }
    }

    /// Vessel at rest with zero thrust.
    pub fn at_rest(pose: Pose) -> Self {
        Self {
            pose,
            ..Default::default()
        }
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let two_pi = 2.0 * PI;
    let mut a = angle.rem_euclid(two_pi);
    if a > PI {
        a -= two_pi;
    }
    a
}

/// Rotates the body velocity into the earth frame.
pub fn rotation_apply(psi: f64, vel: BodyVelocity) -> PoseRate {
    let (s, c) = psi.sin_cos();
    PoseRate {
        dx: vel.u * c - vel.v * s,
        dy: vel.u * s + vel.v * c,
        dpsi: vel.r,
    }
}

pub fn acceleration(vel: BodyVelocity, tau: ControlInput, p: &VesselParams) -> BodyAcceleration {
    let BodyVelocity { u, v, r } = vel;
    BodyAcceleration {
        du: tau.tau_u / p.mass - v * r - p.surge_damping / p.mass * u,
        dv: u * r - p.sway_damping / p.mass * v,
        dr: tau.tau_r / p.yaw_inertia - p.yaw_damping / p.yaw_inertia * r,
    }
}

/// Time derivative of [`acceleration`] along a trajectory.
pub fn jerk(
    vel: BodyVelocity,
    acc: BodyAcceleration,
    tau_rate: ControlRate,
    p: &VesselParams,
) -> BodyJerk {
    let BodyVelocity { u, v, r } = vel;
    let BodyAcceleration { du, dv, dr } = acc;
    BodyJerk {
        ddu: tau_rate.dtau_u / p.mass - v * dr - dv * r - p.surge_damping / p.mass * du,
        ddv: du * r + u * dr - p.sway_damping / p.mass * dv,
        ddr: tau_rate.dtau_r / p.yaw_inertia - p.yaw_damping / p.yaw_inertia * dr,
    }
}

/// Splits a generalized thrust into the two thruster forces.
pub fn allocate_thrusters(tau: ControlInput, p: &VesselParams) -> ThrusterForces {
    let diff = tau.tau_r / p.half_width;
    ThrusterForces {
        port: 0.5 * (tau.tau_u + diff),
        starboard: 0.5 * (tau.tau_u - diff),
    }
}

pub fn thrust_to_tau(forces: ThrusterForces, p: &VesselParams) -> ControlInput {
    ControlInput {
        tau_u: forces.port + forces.starboard,
        tau_r: p.half_width * (forces.port - forces.starboard),
    }
}

/// Right-hand side of the 6-dimensional vessel ODE.
pub fn state_derivative(
    pose: Pose,
    vel: BodyVelocity,
    tau: ControlInput,
    p: &VesselParams,
) -> (PoseRate, BodyAcceleration) {
    (rotation_apply(pose.psi, vel), acceleration(vel, tau, p))
}

/// Packs pose and velocity into the flat collocation state.
pub fn pack_state(pose: Pose, vel: BodyVelocity) -> [f64; STATE_DIM] {
    [pose.x, pose.y, pose.psi, vel.u, vel.v, vel.r]
}

pub fn unpack_state(x: &[f64]) -> (Pose, BodyVelocity) {
    (
        Pose::new(x[0], x[1], x[2]),
        BodyVelocity::new(x[3], x[4], x[5]),
    )
}

/// [`state_derivative`] on flat arrays.
pub fn flat_derivative(x: &[f64], tau: &[f64], p: &VesselParams) -> [f64; STATE_DIM] {
    let (pose, vel) = unpack_state(x);
    let (rate, acc) = state_derivative(pose, vel, ControlInput::new(tau[0], tau[1]), p);
    [rate.dx, rate.dy, rate.dpsi, acc.du, acc.dv, acc.dr]
}

/// Jacobians of [`flat_derivative`] with respect to the state (`6×6`) and control (`6×2`).
pub fn flat_derivative_jacobian(
    x: &[f64],
    p: &VesselParams,
) -> (
    [[f64; STATE_DIM]; STATE_DIM],
    [[f64; CONTROL_DIM]; STATE_DIM],
) {
    let (psi, u, v, r) = (x[2], x[3], x[4], x[5]);
    let (s, c) = psi.sin_cos();
    let xu = p.surge_damping / p.mass;
    let yv = p.sway_damping / p.mass;
    let nr = p.yaw_damping / p.yaw_inertia;
    let a = [
        [0.0, 0.0, -u * s - v * c, c, -s, 0.0],
        [0.0, 0.0, u * c - v * s, s, c, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0, -xu, -r, -v],
        [0.0, 0.0, 0.0, r, -yv, u],
        [0.0, 0.0, 0.0, 0.0, 0.0, -nr],
    ];
    let b = [
        [0.0, 0.0],
        [0.0, 0.0],
        [0.0, 0.0],
        [1.0 / p.mass, 0.0],
        [0.0, 0.0],
        [0.0, 1.0 / p.yaw_inertia],
    ];
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params() -> VesselParams {
        VesselParams::kingfisher()
    }

    #[test]
    fn rotation_examples() {
        let r = rotation_apply(0.0, BodyVelocity::new(1.0, 0.0, 0.0));
        assert_eq!((r.dx, r.dy, r.dpsi), (1.0, 0.0, 0.0));

        let r = rotation_apply(PI / 2.0, BodyVelocity::new(1.0, 0.0, 0.0));
        assert_abs_diff_eq!(r.dx, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.dy, 1.0, epsilon = 1e-15);

        let r = rotation_apply(PI / 4.0, BodyVelocity::new(1.0, 1.0, 0.5));
        assert_abs_diff_eq!(r.dx, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.dy, 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(r.dpsi, 0.5);
    }

    #[test]
    fn acceleration_examples() {
        let p = params();
        let a = acceleration(BodyVelocity::default(), ControlInput::default(), &p);
        assert_eq!(a, BodyAcceleration::default());

        // steady surge: τu = Xu·u
        let a = acceleration(
            BodyVelocity::new(1.0, 0.0, 0.0),
            ControlInput::new(20.0, 0.0),
            &p,
        );
        assert_abs_diff_eq!(a.du, 0.0, epsilon = 1e-15);

        // direct substitution
        let a = acceleration(
            BodyVelocity::new(0.5, 0.2, 0.1),
            ControlInput::new(10.0, 1.0),
            &p,
        );
        assert_abs_diff_eq!(
            a.du,
            10.0 / 29.0 - 0.2 * 0.1 - 20.0 / 29.0 * 0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(a.dv, 0.5 * 0.1 - 20.0 / 29.0 * 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(a.dr, 1.0 / 2.8 - 20.0 / 2.8 * 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(a.du, -0.02, epsilon = 1e-12);
    }

    #[test]
    fn jerk_examples() {
        let p = params();
        let j = jerk(
            BodyVelocity::default(),
            BodyAcceleration::default(),
            ControlRate::default(),
            &p,
        );
        assert_eq!(j, BodyJerk::default());

        let j = jerk(
            BodyVelocity::new(1.0, 0.0, 0.0),
            BodyAcceleration::default(),
            ControlRate {
                dtau_u: 29.0,
                dtau_r: 0.0,
            },
            &p,
        );
        assert_abs_diff_eq!(j.ddu, 1.0, epsilon = 1e-15);
        assert_eq!(j.ddv, 0.0);
        assert_eq!(j.ddr, 0.0);
    }

    #[test]
    fn jerk_matches_forward_difference() {
        let p = params();
        let vel = BodyVelocity::new(0.8, -0.3, 0.2);
        let tau = ControlInput::new(12.0, -1.5);
        let rate = ControlRate {
            dtau_u: 3.0,
            dtau_r: 0.7,
        };
        let acc = acceleration(vel, tau, &p);
        let eps = 1e-6;
        let vel2 = BodyVelocity::new(
            vel.u + eps * acc.du,
            vel.v + eps * acc.dv,
            vel.r + eps * acc.dr,
        );
        let tau2 = ControlInput::new(tau.tau_u + eps * rate.dtau_u, tau.tau_r + eps * rate.dtau_r);
        let acc2 = acceleration(vel2, tau2, &p);
        let j = jerk(vel, acc, rate, &p);
        assert_abs_diff_eq!(j.ddu, (acc2.du - acc.du) / eps, epsilon = 1e-5);
        assert_abs_diff_eq!(j.ddv, (acc2.dv - acc.dv) / eps, epsilon = 1e-5);
        assert_abs_diff_eq!(j.ddr, (acc2.dr - acc.dr) / eps, epsilon = 1e-5);
    }

    #[test]
    fn thruster_examples() {
        let p = VesselParams {
            half_width: 0.5,
            ..params()
        };
        assert_eq!(
            allocate_thrusters(ControlInput::new(0.0, 0.0), &p),
            ThrusterForces::default()
        );
        let f = allocate_thrusters(ControlInput::new(10.0, 0.0), &p);
        assert_eq!((f.port, f.starboard), (5.0, 5.0));
        let f = allocate_thrusters(ControlInput::new(10.0, 2.0), &p);
        assert_eq!((f.port, f.starboard), (7.0, 3.0));

        let t = thrust_to_tau(
            ThrusterForces {
                port: 5.0,
                starboard: 5.0,
            },
            &p,
        );
        assert_eq!((t.tau_u, t.tau_r), (10.0, 0.0));
        let t = thrust_to_tau(
            ThrusterForces {
                port: 7.0,
                starboard: 3.0,
            },
            &p,
        );
        assert_eq!((t.tau_u, t.tau_r), (10.0, 2.0));
        let t = thrust_to_tau(
            ThrusterForces {
                port: 0.0,
                starboard: 1.0,
            },
            &p,
        );
        assert_eq!((t.tau_u, t.tau_r), (1.0, -0.5));
    }

    #[test]
    fn state_derivative_steady_surge() {
        let p = params();
        let (rate, acc) = state_derivative(
            Pose::default(),
            BodyVelocity::new(1.0, 0.0, 0.0),
            ControlInput::new(20.0, 0.0),
            &p,
        );
        assert_eq!((rate.dx, rate.dy, rate.dpsi), (1.0, 0.0, 0.0));
        assert_abs_diff_eq!(acc.du, 0.0, epsilon = 1e-15);
        assert_eq!((acc.dv, acc.dr), (0.0, 0.0));

        let (rate, acc) = state_derivative(
            Pose::new(3.0, -2.0, 1.0),
            BodyVelocity::default(),
            ControlInput::default(),
            &p,
        );
        assert_eq!(rate, PoseRate::default());
        assert_eq!(acc, BodyAcceleration::default());
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_abs_diff_eq!(wrap_angle(-PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(-7.0), -7.0 + 2.0 * PI, epsilon = 1e-12);
        assert_eq!(wrap_angle(0.3), 0.3);
    }

    #[test]
    fn validate_names_field() {
        let p = VesselParams {
            yaw_inertia: 0.0,
            ..params()
        };
        assert!(p.validate().unwrap_err().contains("Iz"));
        assert!(params().validate().is_ok());
    }

    #[test]
    fn flat_jacobian_matches_finite_differences() {
        let p = params();
        let x = [1.0, 2.0, 0.7, 0.9, -0.2, 0.3];
        let tau = [15.0, 2.0];
        let (a, b) = flat_derivative_jacobian(&x, &p);
        let eps = 1e-6;
        for j in 0..STATE_DIM {
            let mut xp = x;
            let mut xm = x;
            xp[j] += eps;
            xm[j] -= eps;
            let fp = flat_derivative(&xp, &tau, &p);
            let fm = flat_derivative(&xm, &tau, &p);
            for i in 0..STATE_DIM {
                assert_abs_diff_eq!(a[i][j], (fp[i] - fm[i]) / (2.0 * eps), epsilon = 1e-8);
            }
        }
        for j in 0..CONTROL_DIM {
            let mut tp = tau;
            let mut tm = tau;
            tp[j] += eps;
            tm[j] -= eps;
            let fp = flat_derivative(&x, &tp, &p);
            let fm = flat_derivative(&x, &tm, &p);
            for i in 0..STATE_DIM {
                assert_abs_diff_eq!(b[i][j], (fp[i] - fm[i]) / (2.0 * eps), epsilon = 1e-8);
            }
        }
    }

    proptest! {
        #[test]
        fn wrapped_heading_stays_in_range(a in -100.0f64..100.0) {
            let w = wrap_angle(a);
            prop_assert!(w > -PI && w <= PI);
            let turns = (a - w) / (2.0 * PI);
            prop_assert!((turns - turns.round()).abs() < 1e-9);
        }
    }
}
