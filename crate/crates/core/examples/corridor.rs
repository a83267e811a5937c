//! Grows sailing corridors between pairs of points on the reference map.

use asvplan::world::{compute_corridor, corridor_is_clear, Point2, WorldMap};

fn main() {
    let map = WorldMap::reference();
    let inflate = 0.8;
    let pairs = [
        (Point2::new(2.0, 15.0), Point2::new(8.27, 10.82)),
        (Point2::new(8.27, 10.82), Point2::new(11.54, 3.09)),
        (Point2::new(11.54, 3.09), Point2::new(18.0, 1.0)),
        (Point2::new(2.0, 15.0), Point2::new(18.0, 1.0)),
    ];
    for (a, b) in pairs {
        match compute_corridor(a, b, &map, inflate) {
            Ok(c) => println!(
                "({:4.1}, {:4.1}) -> ({:4.1}, {:4.1}): x [{:5.2}, {:5.2}] y [{:5.2}, {:5.2}], clear: {}",
                a.x,
                a.y,
                b.x,
                b.y,
                c.x_min,
                c.x_max,
                c.y_min,
                c.y_max,
                corridor_is_clear(&c, &map, inflate)
            ),
            Err(e) => println!("({:4.1}, {:4.1}) -> ({:4.1}, {:4.1}): {e}", a.x, a.y, b.x, b.y),
        }
    }
}
