//! Solves one collocation segment from rest to rest inside an open corridor and
//! prints the node states alongside the trapezoidal defect.

use asvplan::dynamics::{Pose, VesselParams};
use asvplan::nlp_solver::{minimize, SolverConfig};
use asvplan::pipeline::initial_guess;
use asvplan::transcription::{
    build_nlp, decode, BoundSet, BoundaryState, EndCondition, ObjectiveKind, SegmentProblem,
};
use asvplan::world::Corridor;

fn main() {
    let problem = SegmentProblem {
        start: BoundaryState {
            pose: Pose::new(1.0, 1.0, 0.0),
            ..Default::default()
        },
        end: EndCondition::FullState(Pose::new(8.0, 5.0, std::f64::consts::FRAC_PI_2)),
        corridor: Corridor {
            x_min: 0.0,
            x_max: 10.0,
            y_min: 0.0,
            y_max: 6.0,
        },
        bounds: BoundSet::reference(),
        objective: ObjectiveKind::MinControlInput { lambda: 1.0 },
        nodes: 21,
        params: VesselParams::kingfisher(),
    };
    let nlp = build_nlp(&problem).expect("consistent problem");
    let sol =
        minimize(&nlp, &initial_guess(&problem), &SolverConfig::default()).expect("valid problem");
    let seg = decode(&problem, &sol.z);
    println!(
        "status {:?}: duration {:.3} s, objective {:.3}, violation {:.1e}, max defect {:.1e}",
        sol.status,
        seg.duration,
        sol.objective,
        sol.max_constraint_violation,
        seg.max_defect()
    );
    println!(
        "{:>7} {:>7} {:>7} {:>7} {:>6} {:>6} {:>6} {:>7} {:>7}",
        "t", "x", "y", "psi", "u", "v", "r", "tau_u", "tau_r"
    );
    for (k, (x, c)) in seg.states.iter().zip(&seg.controls).enumerate() {
        println!(
            "{:7.3} {:7.3} {:7.3} {:7.3} {:6.3} {:6.3} {:6.3} {:7.3} {:7.3}",
            seg.node_time(k),
            x[0],
            x[1],
            x[2],
            x[3],
            x[4],
            x[5],
            c[0],
            c[1]
        );
    }
}
