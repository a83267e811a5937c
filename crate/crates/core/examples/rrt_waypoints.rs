//! Runs RRT* on the reference map for a few seeds and reduces each path to waypoints.

use asvplan::pipeline::{corridor_waypoints, ObjectiveName, Scenario};
use asvplan::rrt_star::RrtStar;
use asvplan::world::Point2;

fn main() {
    let mut scenario = Scenario::reference(ObjectiveName::MinInput);
    let front = scenario.map.grown(scenario.corridor_inflate());
    let (start, goal) = (Point2::new(2.0, 15.0), Point2::new(18.0, 1.0));
    for seed in 1..=5 {
        scenario.planner.rng_seed = seed;
        let mut rrt = RrtStar::new(start, goal, &front, scenario.planner.clone())
            .expect("valid configuration");
        let path = rrt.run().expect("path found");
        let history = rrt.cost_history();
        let wps = corridor_waypoints(&path, &scenario);
        let shown: Vec<String> = wps
            .iter()
            .map(|w| format!("({:.2}, {:.2})", w.x, w.y))
            .collect();
        println!(
            "seed {seed}: {} tree nodes, cost {:.2} m (first recorded {:.2} m), waypoints {}",
            rrt.nodes().len(),
            path.cost,
            history
                .iter()
                .copied()
                .find(|c| c.is_finite())
                .unwrap_or(f64::NAN),
            shown.join(" ")
        );
    }
}
