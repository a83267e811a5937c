//! Overhead SVG rendering of a planned or simulated run.

use crate::io::trajectory::TrajectoryRow;
use crate::world::{Corridor, Obstacle, Point2, WorldMap};
use std::fmt::Write;

const PX_PER_M: f64 = 30.0;
const PAD: f64 = 20.0;
/// Heading arrows are drawn every this many seconds.
const ARROW_PERIOD: f64 = 2.0;

#[derive(Debug, Clone, Default)]
pub struct PlotData<'a> {
    pub map: Option<&'a WorldMap>,
    /// Hull plus margin clearance drawn as a dashed outline around obstacles.
    pub inflate: f64,
    pub corridors: &'a [Corridor],
    pub path: &'a [Point2],
    pub waypoints: &'a [Point2],
    pub trajectory: &'a [TrajectoryRow],
    pub start: Option<Point2>,
    pub goal: Option<Point2>,
}

struct Frame {
    x0: f64,
    y1: f64,
}

impl Frame {
    fn x(&self, x: f64) -> f64 {
        PAD + (x - self.x0) * PX_PER_M
    }

    fn y(&self, y: f64) -> f64 {
        PAD + (self.y1 - y) * PX_PER_M
    }
}

fn polyline(svg: &mut String, f: &Frame, pts: impl Iterator<Item = Point2>, style: &str) {
    let coords: Vec<String> = pts
        .map(|p| format!("{:.2},{:.2}", f.x(p.x), f.y(p.y)))
        .collect();
    if coords.len() > 1 {
        let _ = writeln!(svg, r#"<polyline points="{}" {style}/>"#, coords.join(" "));
    }
}

fn obstacle(svg: &mut String, f: &Frame, o: &Obstacle, grow: f64, style: &str) {
    match *o {
        Obstacle::Rect {
            cx,
            cy,
            length,
            width,
        } => {
            let (hl, hw) = (length / 2.0 + grow, width / 2.0 + grow);
            let _ = writeln!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" rx="{:.2}" {style}/>"#,
                f.x(cx - hl),
                f.y(cy + hw),
                2.0 * hl * PX_PER_M,
                2.0 * hw * PX_PER_M,
                grow * PX_PER_M
            );
        }
        Obstacle::Circle { cx, cy, radius } => {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" {style}/>"#,
                f.x(cx),
                f.y(cy),
                (radius + grow) * PX_PER_M
            );
        }
    }
}

/// Renders the plot. The output depends only on the inputs.
pub fn render_svg(data: &PlotData) -> String {
    let pts = data
        .trajectory
        .iter()
        .map(|r| Point2::new(r.pose.x, r.pose.y))
        .chain(data.path.iter().copied())
        .chain(data.waypoints.iter().copied())
        .chain(data.start)
        .chain(data.goal);
    let (mut x0, mut x1, mut y0, mut y1) = match data.map {
        Some(m) => (m.x_bounds.0, m.x_bounds.1, m.y_bounds.0, m.y_bounds.1),
        None => (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ),
    };
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let f = Frame { x0, y1 };
    let width = 2.0 * PAD + (x1 - x0) * PX_PER_M;
    let height = 2.0 * PAD + (y1 - y0) * PX_PER_M;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="5" refY="5" markerWidth="5" markerHeight="5" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#c0392b"/></marker></defs>"##
    );

    if let Some(map) = data.map {
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            f.x(map.x_bounds.0),
            f.y(map.y_bounds.1),
            (map.x_bounds.1 - map.x_bounds.0) * PX_PER_M,
            (map.y_bounds.1 - map.y_bounds.0) * PX_PER_M
        );
    }
    for c in data.corridors {
        let _ = writeln!(
            svg,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#3498db" fill-opacity="0.12" stroke="#2980b9" stroke-width="1"/>"##,
            f.x(c.x_min),
            f.y(c.y_max),
            (c.x_max - c.x_min) * PX_PER_M,
            (c.y_max - c.y_min) * PX_PER_M
        );
    }
    if let Some(map) = data.map {
        for o in &map.obstacles {
            obstacle(&mut svg, &f, o, 0.0, r##"fill="#7f8c8d" stroke="#2c3e50""##);
            if data.inflate > 0.0 {
                obstacle(
                    &mut svg,
                    &f,
                    o,
                    data.inflate,
                    r##"fill="none" stroke="#7f8c8d" stroke-dasharray="4 3""##,
                );
            }
        }
    }
    polyline(
        &mut svg,
        &f,
        data.path.iter().copied(),
        r##"fill="none" stroke="#95a5a6" stroke-width="1.5" stroke-dasharray="6 4""##,
    );
    polyline(
        &mut svg,
        &f,
        data.trajectory
            .iter()
            .map(|r| Point2::new(r.pose.x, r.pose.y)),
        r##"fill="none" stroke="#c0392b" stroke-width="2""##,
    );

    let mut next_arrow = 0.0;
    for r in data.trajectory {
        if r.t + 1e-9 < next_arrow {
            continue;
        }
        next_arrow = r.t + ARROW_PERIOD;
        let (x, y) = (f.x(r.pose.x), f.y(r.pose.y));
        let len = 0.6 * PX_PER_M;
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="1.5" marker-end="url(#arrow)"/>"##,
            x + len * r.pose.psi.cos(),
            y - len * r.pose.psi.sin()
        );
    }
    for (i, w) in data.waypoints.iter().enumerate() {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="5" fill="#f39c12" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">w{}</text>"##,
            f.x(w.x),
            f.y(w.y),
            f.x(w.x) + 7.0,
            f.y(w.y) - 7.0,
            i + 1
        );
    }
    for (label, p, color) in [
        ("start", data.start, "#27ae60"),
        ("goal", data.goal, "#8e44ad"),
    ] {
        if let Some(p) = p {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="6" fill="{color}"/><text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">{label}</text>"#,
                f.x(p.x),
                f.y(p.y),
                f.x(p.x) + 8.0,
                f.y(p.y) + 14.0
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{BodyVelocity, ControlInput, Pose};

    #[test]
    fn render_is_deterministic_and_complete() {
        let map = WorldMap::reference();
        let rows: Vec<TrajectoryRow> = (0..50)
            .map(|i| {
                let t = i as f64 * 0.5;
                TrajectoryRow {
                    t,
                    pose: Pose::new(2.0 + 0.6 * t, 15.0 - 0.5 * t, -0.7),
                    vel: BodyVelocity::default(),
                    acc: [0.0; 3],
                    tau: ControlInput::default(),
                    forces: [0.0; 2],
                    segment: 0,
                }
            })
            .collect();
        let corridors = [Corridor {
            x_min: 1.0,
            x_max: 5.0,
            y_min: 10.0,
            y_max: 16.0,
        }];
        let wps = [Point2::new(4.0, 12.0)];
        let data = PlotData {
            map: Some(&map),
            inflate: 0.8,
            corridors: &corridors,
            path: &wps,
            waypoints: &wps,
            trajectory: &rows,
            start: Some(Point2::new(2.0, 15.0)),
            goal: Some(Point2::new(18.0, 1.0)),
        };
        let a = render_svg(&data);
        assert_eq!(a, render_svg(&data));
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<circle").count(), 5);
        assert!(a.contains("marker-end"));
        assert!(a.contains("<polyline"));
    }
}
