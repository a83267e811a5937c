//! Steps the vessel model under a few constant thrust settings and prints the
//! body-frame response next to the thruster allocation.

use asvplan::dynamics::{acceleration, allocate_thrusters, ControlInput, VesselParams};
use asvplan::simulator::integrate;

fn main() {
    let p = VesselParams::kingfisher();
    println!(
        "steady surge for tau_u: tau_u / Xu; yaw time constant Iz / Nr = {:.2} s",
        p.yaw_inertia / p.yaw_damping
    );
    for tau in [
        ControlInput::new(20.0, 0.0),
        ControlInput::new(20.0, 2.0),
        ControlInput::new(0.0, -3.0),
    ] {
        let f = allocate_thrusters(tau, &p);
        let states = integrate([0.0; 6], 10.0, 0.01, |_| tau, &p);
        let (_, x) = states.last().unwrap();
        let (_, v) = asvplan::dynamics::unpack_state(x);
        let a = acceleration(v, tau, &p);
        println!(
            "tau = ({:5.1}, {:4.1}) -> F = ({:5.2}, {:5.2}) N; after 10 s: pos ({:6.2}, {:6.2}) psi {:6.3}, u {:.3} v {:6.3} r {:6.3}, |acc| {:.1e}",
            tau.tau_u,
            tau.tau_r,
            f.port,
            f.starboard,
            x[0],
            x[1],
            x[2],
            v.u,
            v.v,
            v.r,
            a.du.abs().max(a.dv.abs()).max(a.dr.abs())
        );
    }
}
