//! Plans the reference scenario with both objectives over several seeds and
//! compares simulated metrics.

use asvplan::pipeline::{plan_trajectory, ObjectiveName, Scenario};
use asvplan::simulator::{simulate, SimConfig};

fn main() {
    println!(
        "{:>4} {:>10} {:>8} {:>9} {:>9} {:>9}",
        "seed", "objective", "total", "speed", "min dist", "ctrl"
    );
    for seed in 1..=5 {
        for kind in [ObjectiveName::MinInput, ObjectiveName::MinAccel] {
            let mut scenario = Scenario::reference(kind);
            scenario.planner.rng_seed = seed;
            match plan_trajectory(&scenario) {
                Ok(traj) => {
                    let m = simulate(
                        &traj,
                        &scenario.params,
                        &scenario.map,
                        &SimConfig::default(),
                    )
                    .metrics;
                    println!(
                        "{seed:>4} {:>10} {:8.2} {:9.4} {:9.3} {:9.3}",
                        kind.as_str(),
                        traj.total_duration,
                        m.avg_speed,
                        m.min_obstacle_distance,
                        m.avg_control_input
                    );
                }
                Err(e) => println!("{seed:>4} {:>10} failed: {e}", kind.as_str()),
            }
        }
    }
}
