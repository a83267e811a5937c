//! Plans the reference scenario end to end, replays the controls through the
//! simulator and writes the plot to `reference.svg` in the working directory.

use asvplan::io::{planned_rows, render_svg, PlotData};
use asvplan::pipeline::{plan_trajectory, ObjectiveName, Scenario};
use asvplan::simulator::{simulate, SimConfig};
use asvplan::world::Point2;

fn main() {
    let scenario = Scenario::reference(ObjectiveName::MinInput);
    let traj = plan_trajectory(&scenario).unwrap_or_else(|e| panic!("planning failed: {e}"));
    println!(
        "front-end path: {} vertices, {:.2} m",
        traj.path.vertices.len(),
        traj.path.cost
    );
    for (i, (seg, c)) in traj.segments.iter().zip(&traj.corridors).enumerate() {
        let end = seg.end_position();
        println!(
            "segment {i}: {:6.2} s, ends at ({:5.2}, {:5.2}), corridor x [{:5.2}, {:5.2}] y [{:5.2}, {:5.2}]",
            seg.duration, end.x, end.y, c.x_min, c.x_max, c.y_min, c.y_max
        );
    }
    println!("total {:.2} s", traj.total_duration);

    let sim = simulate(
        &traj,
        &scenario.params,
        &scenario.map,
        &SimConfig::default(),
    );
    let m = &sim.metrics;
    println!(
        "replay: avg speed {:.3} m/s, min obstacle distance {:.3} m, avg control input {:.3}, terminal error {:.4} m",
        m.avg_speed, m.min_obstacle_distance, m.avg_control_input, m.terminal_error
    );

    let rows = planned_rows(&traj, &scenario.params);
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
    std::fs::write("reference.svg", svg).expect("writable working directory");
    println!("wrote reference.svg");
}
